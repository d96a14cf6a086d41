from __future__ import annotations

import logging
import math
from functools import lru_cache, reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.clifford import CliffordElement, TorusAngles, mask_indices, spin_character
from src.flat_manifold import BieberbachGroup, ShellEnumerator
from src.settings import Settings
from src.spin_structures import SpinStructure


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors, np.eye(1, dtype=complex))


class SpinRep:
    """
    Spin representation of Cl(n) on C^{2^m} by the tensor-product construction.

    L(e_{2j-1}) = i Z..Z X_j, L(e_{2j}) = -i Z..Z Y_j and, for n odd,
    L(e_n) = -i Z^{(x)m}. With these choices L(e_{2j-1} e_{2j}) = i Z_j and
    S^+ is the +1 eigenspace of Z^{(x)m}.

    Attributes
    ----------
    n : int
        Dimension.
    m : int
        n // 2.
    gens : tuple of np.ndarray
        L(e_1), ..., L(e_n).
    chirality : np.ndarray
        Z^{(x)m}.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.m = n // 2
        m = self.m
        gens = []
        for j in range(m):
            prefix = [_Z] * j
            suffix = [_I2] * (m - j - 1)
            gens.append(1j * _kron_all(prefix + [_X] + suffix))
            gens.append(-1j * _kron_all(prefix + [_Y] + suffix))
        self.chirality = _kron_all([_Z] * m)
        if n % 2:
            gens.append(-1j * self.chirality)
        self.gens = tuple(gens)
        self.dim = 2 ** m

    def check_relations(self, tolerance: float = 1e-12) -> None:
        """
        Verify L(e_i) L(e_j) + L(e_j) L(e_i) = -2 delta_ij and skew-Hermitian generators.

        Raises
        ------
        RuntimeError
            If some relation fails.
        """

        eye = np.eye(self.dim)
        for i, a in enumerate(self.gens):
            if np.abs(a + a.conj().T).max() > tolerance:
                raise RuntimeError(f"L(e_{i + 1}) is not skew-Hermitian")
            for j, b in enumerate(self.gens):
                target = -2 * eye if i == j else 0 * eye
                if np.abs(a @ b + b @ a - target).max() > tolerance:
                    raise RuntimeError(f"anticommutation fails for e_{i + 1}, e_{j + 1}")

    def monomial(self, mask: int) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for i in mask_indices(mask):
            out = out @ self.gens[i - 1]
        return out

    def element(self, x: CliffordElement) -> np.ndarray:
        if x.n != self.n:
            raise ValueError(f"element of Cl({x.n}) in the representation of Cl({self.n})")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for mask, coeff in x.terms.items():
            out += float(coeff) * self.monomial(mask)
        return out

    def vector(self, u: Sequence) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for ui, g in zip(u, self.gens):
            out += float(ui) * g
        return out

    def torus(self, x: TorusAngles) -> np.ndarray:
        """L(sign * prod_j (cos t_j + sin t_j e_{2j-1} e_{2j}))."""
        out = x.sign * np.eye(self.dim, dtype=complex)
        for j, t in enumerate(x.radians):
            rot = math.cos(t) * np.eye(self.dim) + math.sin(t) * (self.gens[2 * j] @ self.gens[2 * j + 1])
            out = out @ rot
        return out

    def half_projector(self, which: str) -> np.ndarray:
        if self.n % 2:
            raise ValueError("chirality splitting needs n even")
        eps = 1 if which == "plus" else -1
        return (np.eye(self.dim) + eps * self.chirality) / 2

    def u_projector(self, u: Sequence, which: str) -> np.ndarray:
        """Projector onto S_u^{+-}, the eigenspace of L(u) with eigenvalue -+ i|u|."""
        norm = math.sqrt(sum(float(c) ** 2 for c in u))
        if norm == 0:
            raise ValueError("S_u needs u != 0")
        eps = 1 if which == "plus" else -1
        return (np.eye(self.dim) + eps * 1j * self.vector(u) / norm) / 2

    def trace(self, matrix: np.ndarray, which: str = "full") -> complex:
        if which == "full":
            return complex(np.trace(matrix))
        return complex(np.trace(matrix @ self.half_projector(which)))


@lru_cache(maxsize=None)
def build_spin_rep(n: int, max_dim: int = 8) -> SpinRep:
    """
    Build and verify the spin representation for 2 <= n <= max_dim.

    Raises
    ------
    ValueError
        If n is out of range.
    RuntimeError
        If a Clifford relation fails.
    """

    if not 2 <= n <= max_dim:
        raise ValueError(f"the matrix oracle supports 2 <= n <= {max_dim}, got {n}")
    rep = SpinRep(n)
    rep.check_relations()
    logger.info(f"Built spin representation for n={n} ({rep.dim}x{rep.dim})")
    return rep


class SpinOracle:
    """
    Brute-force multiplicities and sigma signs in the explicit spin representation.

    Attributes
    ----------
    max_dim : int
        Largest n accepted.
    tolerance : float
        Residual allowed when rounding traces to integers.
    enumerator : ShellEnumerator
        Shell enumerator for the B-fixed vectors.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        settings = settings or Settings()
        self.max_dim = settings.oracle_max_dim
        self.tolerance = settings.oracle_tolerance
        self.enumerator = ShellEnumerator(settings)
        self.logger = logging.getLogger(__name__)

    def rep(self, n: int) -> SpinRep:
        return build_spin_rep(n, self.max_dim)

    def trace_on_su(self, lift: CliffordElement, u: Sequence, which: str) -> complex:
        rep = self.rep(lift.n)
        return rep.trace(rep.element(lift) @ rep.u_projector(u, which))

    def _coset_traces(self, group: BieberbachGroup, eps: SpinStructure, rho) -> List[tuple]:
        # per coset: chi_rho, tr L(lift), tr L(lift) L(e_i) and the translation as floats
        rep = self.rep(group.n)
        data = []
        for g, coset in enumerate(group.cosets):
            chi = complex(rho.value(g))
            if chi == 0:
                continue
            lift = rep.element(eps.coset_lifts[g])
            traces = np.array([np.trace(lift @ gen) for gen in rep.gens])
            translation = np.array([float(t) for t in coset.translation])
            data.append((chi, coset, complex(np.trace(lift)), traces, translation))
        return data

    def _round_pair(self, totals: np.ndarray, order: int, key: int) -> Tuple[int, int]:
        out = []
        for value in totals / order:
            nearest = round(value.real)
            if abs(value - nearest) > self.tolerance:
                raise RuntimeError(f"oracle multiplicity {value} at key {key} is not an integer")
            out.append(int(nearest))
        return out[0], out[1]

    def brute_spectrum(self, group: BieberbachGroup, eps: SpinStructure, rho,
                       keys: Iterable[int]) -> Dict[int, Tuple[int, int]]:
        """
        Multiplicities (d+, d-) for several shells, sharing the lifted matrices.

        On S_u^{+-} the trace of L(lift) is (tr L(lift) +- i tr(L(lift) L(u)) / |u|) / 2,
        and tr(L(lift) L(u)) is linear in u, so a whole shell is one matrix product
        over the doubled coordinates 2u.

        Raises
        ------
        ValueError
            If some key is not positive.
        RuntimeError
            If a total is not an integer within tolerance.
        """

        keys = sorted(set(keys))
        if any(key <= 0 for key in keys):
            raise ValueError(f"brute_multiplicity needs a positive shell key, got {keys[0]}")
        data = self._coset_traces(group, eps, rho)
        out = {}
        for key in keys:
            totals = np.zeros(2, dtype=complex)
            for chi, coset, trace, traces, translation in data:
                points = self.enumerator.fixed_points(eps.delta, coset, key)
                if not len(points):
                    continue
                # exp(-2 pi i u.b) with u = points / 2
                phases = np.exp(-1j * np.pi * (points @ translation))
                rotated = 1j * (points @ traces) / math.sqrt(key)
                totals += chi * np.array([np.sum(phases * (trace + rotated)),
                                          np.sum(phases * (trace - rotated))]) / 2
            out[key] = self._round_pair(totals, group.order, key)
        self.logger.debug(f"Oracle spectrum for {group.name or '<unnamed>'}: {len(keys)} shells")
        return out

    def brute_multiplicity(self, group: BieberbachGroup, eps: SpinStructure, rho, key: int) -> Tuple[int, int]:
        """
        Multiplicities (d+, d-) of the eigenvalue 2 pi mu, 4 mu^2 = key > 0.

        Every B-fixed vector u of the shell contributes
        chi_rho(gamma) exp(-2 pi i u.b) tr L(epsilon(gamma))|_{S_u^+-}; the
        total is averaged over the point group and rounded.

        Parameters
        ----------
        group : BieberbachGroup
            The group.
        eps : SpinStructure
            Spin structure on the group.
        rho : HolonomyCharacter
            Character with .dimension and .value(coset index).
        key : int
            4 mu^2, positive.

        Returns
        -------
        (int, int)
            (d+, d-).

        Raises
        ------
        ValueError
            If key <= 0.
        RuntimeError
            If a total is not an integer within tolerance.
        """

        return self.brute_spectrum(group, eps, rho, [key])[key]

    def brute_harmonic(self, group: BieberbachGroup, eps: SpinStructure, rho) -> int:
        """dim (S (x) V)^F when delta is trivial, 0 otherwise."""
        if not eps.trivial_type:
            return 0
        rep = self.rep(group.n)
        total = sum(complex(rho.value(g)) * rep.trace(rep.element(eps.coset_lifts[g]))
                    for g in range(group.order))
        value = total / group.order
        nearest = round(value.real)
        if abs(value - nearest) > self.tolerance:
            raise RuntimeError(f"oracle harmonic count {value} is not an integer")
        return int(nearest)

    def sigma_sign(self, u: Sequence, x: TorusAngles, lift: CliffordElement) -> int:
        """
        sigma(u, x) by comparing tr L(lift)|_{S_u^+} with the half-spin characters of x.

        Returns +1 when the two characters agree.

        Raises
        ------
        ValueError
            If n is even.
        RuntimeError
            If the trace matches neither character.
        """

        if lift.n % 2 == 0:
            raise ValueError("sigma signs are defined for n odd")
        inner = x.restricted()
        chi_plus = complex(spin_character(inner, "plus"))
        chi_minus = complex(spin_character(inner, "minus"))
        if abs(chi_plus - chi_minus) < 1e-9:
            return 1
        trace = self.trace_on_su(lift, u, "plus")
        if abs(trace - chi_plus) < 1e-9:
            return 1
        if abs(trace - chi_minus) < 1e-9:
            return -1
        raise RuntimeError(f"trace {trace} on S_u^+ matches neither {chi_plus} nor {chi_minus}")

    def sigma_sign_torus(self, u: Sequence, x: TorusAngles) -> int:
        """sigma(u, x) for a torus element given only by its angles (float model)."""
        if x.n % 2 == 0:
            raise ValueError("sigma signs are defined for n odd")
        rep = self.rep(x.n)
        inner = x.restricted()
        chi_plus = complex(spin_character(inner, "plus"))
        chi_minus = complex(spin_character(inner, "minus"))
        if abs(chi_plus - chi_minus) < 1e-9:
            return 1
        trace = rep.trace(rep.torus(x) @ rep.u_projector(u, "plus"))
        if abs(trace - chi_plus) < 1e-9:
            return 1
        if abs(trace - chi_minus) < 1e-9:
            return -1
        raise RuntimeError(f"trace {trace} on S_u^+ matches neither {chi_plus} nor {chi_minus}")
