from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from src.clifford import CliffordElement, clifford_mul, lift_orthogonal
from src.flat_manifold import AffineGen, BieberbachGroup, Delta, Vector, build_group, lattice_shift
from src.settings import Settings


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)


@dataclass(frozen=True)
class SpinStructure:
    """
    Homomorphism epsilon: Gamma -> Spin(n) lifting the holonomy.

    Attributes
    ----------
    group : BieberbachGroup
        The group.
    delta : tuple of int
        epsilon(L_{e_i}) for i = 1..n.
    sigma : tuple of int
        Generator signs: epsilon(gamma_i) = sigma_i u(B_i).
    coset_lifts : tuple of CliffordElement
        epsilon(rep) for every coset representative, in coset order.
    """

    group: BieberbachGroup = field(repr=False, compare=False)
    delta: Delta
    sigma: Tuple[int, ...]
    coset_lifts: Tuple[CliffordElement, ...] = field(repr=False, compare=False)

    def lattice_value(self, lam: Sequence[int]) -> int:
        value = 1
        for d, l in zip(self.delta, lam):
            if d == -1 and l % 2:
                value = -value
        return value

    def evaluate(self, element: AffineGen) -> CliffordElement:
        """epsilon(element) for any element of the group."""
        k, lam = self.group.locate(element)
        return self.coset_lifts[k] * self.lattice_value(lam)

    @property
    def trivial_type(self) -> bool:
        return all(d == 1 for d in self.delta)

    @property
    def j_minus(self) -> Tuple[int, ...]:
        """1-based indices with delta = -1."""
        return tuple(i + 1 for i, d in enumerate(self.delta) if d == -1)

    @property
    def j_plus(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i, d in enumerate(self.delta) if d == 1)

    @property
    def shift(self) -> Vector:
        return lattice_shift(self.delta)

    def to_json(self) -> dict:
        return {"delta": list(self.delta), "sigma": list(self.sigma)}


def structure_props(eps: SpinStructure) -> Tuple[bool, int, Vector]:
    """(trivial_type, |J^-|, u_epsilon)."""
    return eps.trivial_type, len(eps.j_minus), eps.shift


def _solve_gf2(rows: List[Tuple[int, int]], nvars: int) -> Optional[Tuple[int, List[int]]]:
    """
    Solve a GF(2) system given as (mask, rhs) rows.

    Returns a particular solution and a null-space basis, or None when the
    system is inconsistent.
    """

    pivots: dict = {}
    for mask, rhs in rows:
        for col, (pmask, prhs) in pivots.items():
            if mask >> col & 1:
                mask ^= pmask
                rhs ^= prhs
        if not mask:
            if rhs:
                return None
            continue
        col = mask.bit_length() - 1
        for c, (pmask, prhs) in list(pivots.items()):
            if pmask >> col & 1:
                pivots[c] = (pmask ^ mask, prhs ^ rhs)
        pivots[col] = (mask, rhs)

    particular = 0
    for col, (pmask, prhs) in pivots.items():
        if prhs:
            particular |= 1 << col
    basis = []
    for free in range(nvars):
        if free in pivots:
            continue
        vec = 1 << free
        for col, (pmask, _) in pivots.items():
            if pmask >> free & 1:
                vec |= 1 << col
        basis.append(vec)
    return particular, basis


class SpinStructureSolver:
    """
    Spin structures as solutions of a linear system over GF(2).

    Unknowns are t_g (epsilon(rep_g) = (-1)^{t_g} u(B_g)) for the non-identity
    cosets and d_i (delta_i = (-1)^{d_i}). Every coset product
    rep_g rep_h = rep_gh L_lambda with u(B_g) u(B_h) = (-1)^c u(B_gh) gives
    t_g + t_h + t_gh + sum d_i lambda_i = c, and invariance of delta under
    the holonomy gives d_{perm(j)} = d_j.

    Attributes
    ----------
    max_spin_structures : int
        Largest number of structures listed explicitly.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        settings = settings or Settings()
        self.max_spin_structures = settings.max_spin_structures
        self.logger = logging.getLogger(__name__)

    def _system(self, group: BieberbachGroup, trivial_type_only: bool = False):
        N, n = group.order, group.n
        lifts = [lift_orthogonal(rep.matrix) for rep in group.cosets]

        def t_bit(g: int) -> int:
            return 0 if g == 0 else 1 << (g - 1)

        def d_bit(i: int) -> int:
            return 1 << (N - 1 + i)

        rows = []
        for g in range(N):
            for h in range(N):
                gh, lam = group.multiply(g, h)
                product = clifford_mul(lifts[g], lifts[h])
                if product == lifts[gh]:
                    c = 0
                elif product == -lifts[gh]:
                    c = 1
                else:
                    raise RuntimeError(f"u(B_g) u(B_h) is not +-u(B_gh) for cosets {g}, {h}")
                mask = t_bit(g) ^ t_bit(h) ^ t_bit(gh)
                for i, l in enumerate(lam):
                    if l % 2:
                        mask ^= d_bit(i)
                rows.append((mask, c))
        for rep in group.cosets[1:]:
            for j, p in enumerate(rep.matrix.perm):
                if p != j:
                    rows.append((d_bit(j) ^ d_bit(p), 0))
        if trivial_type_only:
            rows.extend((d_bit(i), 0) for i in range(n))
        return rows, N - 1 + n, lifts

    def count_spin_structures(self, group: BieberbachGroup, trivial_type_only: bool = False) -> int:
        """
        Number of spin structures from the rank of the sign system.

        Parameters
        ----------
        group : BieberbachGroup
            The group.
        trivial_type_only : bool
            Count only structures with delta = 1.

        Returns
        -------
        int
            0 for non-orientable or non-spin groups.
        """

        if not group.orientable:
            self.logger.warning(f"{group.name or 'group'} is not orientable: no spin structures")
            return 0
        rows, nvars, _ = self._system(group, trivial_type_only)
        solution = _solve_gf2(rows, nvars)
        if solution is None:
            return 0
        return 2 ** len(solution[1])

    def enumerate_spin_structures(self, group: BieberbachGroup, trivial_type_only: bool = False) -> List[SpinStructure]:
        """
        List every spin structure of the group, or only those of trivial type.

        Structures are ordered by delta (lexicographic, +1 before -1) with
        sigma nested inside.

        Returns
        -------
        list of SpinStructure
            Empty when the group is not orientable or admits no spin structure.

        Raises
        ------
        ValueError
            If the number of structures exceeds the listing limit.
        """

        if not group.orientable:
            self.logger.warning(f"{group.name or 'group'} is not orientable: no spin structures")
            return []
        rows, nvars, lifts = self._system(group, trivial_type_only)
        solution = _solve_gf2(rows, nvars)
        if solution is None:
            self.logger.info(f"{group.name or 'group'} admits no spin structure")
            return []
        particular, basis = solution
        total = 2 ** len(basis)
        if total > self.max_spin_structures:
            raise ValueError(
                f"{group.name or 'group'} has {total} spin structures, above the listing limit "
                f"{self.max_spin_structures}; use count_spin_structures"
            )

        N, n = group.order, group.n
        located = [group.locate(g) for g in group.generators]
        structures = []
        for combo in range(total):
            vec = particular
            for i, b in enumerate(basis):
                if combo >> i & 1:
                    vec ^= b
            t = [0] + [vec >> (g - 1) & 1 for g in range(1, N)]
            delta = tuple(-1 if vec >> (N - 1 + i) & 1 else 1 for i in range(n))
            coset_lifts = tuple(lifts[g] * (-1 if t[g] else 1) for g in range(N))
            trial = SpinStructure(group=group, delta=delta, sigma=(), coset_lifts=coset_lifts)
            sigma = tuple((-1 if t[k] else 1) * trial.lattice_value(lam) for k, lam in located)
            structures.append(SpinStructure(group=group, delta=delta, sigma=sigma, coset_lifts=coset_lifts))

        structures.sort(key=lambda s: (tuple(d == -1 for d in s.delta), tuple(x == -1 for x in s.sigma)))
        self.logger.info(f"Enumerated {len(structures)} spin structures on {group.name or 'group'}")
        return structures

    def find_structure(self, group: BieberbachGroup, delta: Sequence[int], sigma: Optional[Sequence[int]] = None
                       ) -> SpinStructure:
        """
        Select the structure with the given delta and sigma; without sigma, the
        first structure with that delta in the listing order.

        Raises
        ------
        ValueError
            If no spin structure matches.
        """

        delta = tuple(int(d) for d in delta)
        sigma = tuple(int(s) for s in sigma) if sigma is not None else None
        for eps in self.enumerate_spin_structures(group):
            if eps.delta == delta and (sigma is None or eps.sigma == sigma):
                return eps
        raise ValueError(f"no spin structure with delta={delta}, sigma={sigma} on {group.name or 'group'}")


def enumerate_spin_structures(group: BieberbachGroup, trivial_type_only: bool = False,
                              settings: Optional[Settings] = None) -> List[SpinStructure]:
    return SpinStructureSolver(settings).enumerate_spin_structures(group, trivial_type_only)


def count_spin_structures(group: BieberbachGroup, trivial_type_only: bool = False,
                          settings: Optional[Settings] = None) -> int:
    return SpinStructureSolver(settings).count_spin_structures(group, trivial_type_only)


def find_structure(group: BieberbachGroup, delta: Sequence[int], sigma: Optional[Sequence[int]] = None,
                   settings: Optional[Settings] = None) -> SpinStructure:
    return SpinStructureSolver(settings).find_structure(group, delta, sigma)


def torus_structure(n: int, delta: Sequence[int]) -> SpinStructure:
    """Spin structure of the torus Z^n with the given lattice character."""
    group = build_group([], n=n, name=f"torus:{n}")
    return SpinStructure(group=group, delta=tuple(int(d) for d in delta), sigma=(),
                         coset_lifts=(CliffordElement.scalar_element(n),))

