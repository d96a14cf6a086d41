from __future__ import annotations

import json
import logging
import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.clifford import SignedPermMatrix
from src.quadratic_field import ComplexQSqrt2, PhaseSum
from src.settings import Settings


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)

MAX_POINT_GROUP = 2 ** 16

Vector = Tuple[Fraction, ...]
Delta = Tuple[int, ...]


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q ** 0.5) + 1))


def _frac(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


class AffineGen:
    """
    Affine isometry B L_b acting by x -> B(x + b).

    Attributes
    ----------
    matrix : SignedPermMatrix
        Linear part B.
    translation : tuple of Fraction
        Translation b.

    Methods
    -------
    compose(other) -> AffineGen
        (B L_b)(C L_c) = BC L_{c + C^{-1} b}.
    inverse() -> AffineGen
        B^{-1} L_{-Bb}.
    reduced() -> AffineGen
        Same coset with b reduced to [0, 1)^n.
    """

    __slots__ = ("matrix", "translation")

    def __init__(self, matrix: SignedPermMatrix, translation: Sequence[Union[int, str, Fraction]]) -> None:
        if len(translation) != matrix.n:
            raise ValueError(f"translation of length {len(translation)} for dimension {matrix.n}")
        self.matrix = matrix
        self.translation: Vector = tuple(Fraction(t) for t in translation)

    @classmethod
    def identity(cls, n: int) -> AffineGen:
        return cls(SignedPermMatrix.identity(n), [0] * n)

    @classmethod
    def lattice(cls, vector: Sequence[int]) -> AffineGen:
        return cls(SignedPermMatrix.identity(len(vector)), vector)

    @property
    def n(self) -> int:
        return self.matrix.n

    def __repr__(self) -> str:
        return f"AffineGen({self.matrix}, b=({', '.join(str(t) for t in self.translation)}))"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineGen):
            return NotImplemented
        return self.matrix == other.matrix and self.translation == other.translation

    def __hash__(self) -> int:
        return hash((self.matrix, self.translation))

    def compose(self, other: AffineGen) -> AffineGen:
        shifted = other.matrix.inverse().apply(self.translation)
        return AffineGen(self.matrix @ other.matrix, [c + s for c, s in zip(other.translation, shifted)])

    def __mul__(self, other: AffineGen) -> AffineGen:
        return self.compose(other)

    def inverse(self) -> AffineGen:
        return AffineGen(self.matrix.inverse(), [-t for t in self.matrix.apply(self.translation)])

    def power(self, k: int) -> AffineGen:
        base = self if k >= 0 else self.inverse()
        result = AffineGen.identity(self.n)
        for _ in range(abs(k)):
            result = result.compose(base)
        return result

    def conjugate_by(self, other: AffineGen) -> AffineGen:
        """other * self * other^{-1}."""
        return other.compose(self).compose(other.inverse())

    def apply(self, point: Sequence[Fraction]) -> Vector:
        return self.matrix.apply([Fraction(p) + t for p, t in zip(point, self.translation)])

    def reduced(self) -> AffineGen:
        return AffineGen(self.matrix, [_frac(t) for t in self.translation])

    def lattice_part(self) -> Tuple[int, ...]:
        """Integer vector lambda with b = reduced b + lambda."""
        return tuple(int(t - _frac(t)) for t in self.translation)

    def averaged_translation(self) -> Vector:
        """(1/q) sum_{i<q} B^i(b) with q the order of B."""
        q = self.matrix.order()
        total = [Fraction(0)] * self.n
        image = self.translation
        for _ in range(q):
            total = [a + b for a, b in zip(total, image)]
            image = self.matrix.apply(image)
        return tuple(t / q for t in total)

    def has_fixed_point_in_coset(self) -> bool:
        """
        True when some element B L_{b + lambda}, lambda in Z^n, fixes a point.

        The averaged translation must project into the projection of Z^n on
        ker(B - Id): v.avg is an integer for every fixed cycle vector v.
        """

        avg = self.averaged_translation()
        for v in self.matrix.fixed_vectors():
            dot = sum(a * t for a, t in zip(v, avg))
            if dot.denominator != 1:
                return False
        return True

    def to_json(self) -> dict:
        out = self.matrix.to_json()
        out["translation"] = [str(t) for t in self.translation]
        return out

    @classmethod
    def from_json(cls, data: dict) -> AffineGen:
        perm = [int(p) - 1 for p in data["perm"]]
        matrix = SignedPermMatrix(perm, data["signs"])
        return cls(matrix, [Fraction(t) for t in data["translation"]])


def reflection_criterion(gen: AffineGen) -> bool:
    """
    Torsion-freeness of an order-two coset by the (B + Id) criterion.

    B L_b has no fixed point for any lattice translate iff
    (B + Id) b lies in Z^n but not in (B + Id) Z^n.

    Raises
    ------
    ValueError
        If B^2 != Id or (B + Id) b is not integral.
    """

    B = gen.matrix
    if not (B @ B).is_identity():
        raise ValueError(f"{B} is not an involution")
    image = B.apply(gen.translation)
    w = [t + s for t, s in zip(gen.translation, image)]
    if any(x.denominator != 1 for x in w):
        raise ValueError(f"(B + Id) b = {w} is not integral")
    w = [int(x) for x in w]

    in_image = True
    for cycle, sign in B.cycles():
        if len(cycle) == 1:
            i = cycle[0]
            if sign == 1 and w[i] % 2:
                in_image = False
            if sign == -1 and w[i] != 0:
                in_image = False
        else:
            i, j = cycle
            if w[j] != B.signs[i] * w[i]:
                in_image = False
    return not in_image


@dataclass(frozen=True)
class CosetSummary:
    """One row of the point-group summary."""
    rep: AffineGen
    n_B: int
    order: int
    in_F1: bool


class BieberbachGroup:
    """
    Bieberbach group generated by affine generators and the lattice Z^n.

    Attributes
    ----------
    n : int
        Dimension.
    generators : list of AffineGen
        Generators as given (lattice translations implicit).
    cosets : list of AffineGen
        One representative per point-group element, translations in [0, 1)^n,
        identity first, then breadth-first closure order.
    name : str
        Optional label.
    logger : logging.Logger
        Logger for logging messages.

    Methods
    -------
    index(matrix) -> int
        Coset index of a holonomy matrix.
    multiply(i, j) -> (int, tuple)
        rep_i rep_j = rep_k L_lambda.
    """

    def __init__(self, n: int, generators: Sequence[AffineGen], cosets: Sequence[AffineGen], name: str = "") -> None:
        self.n = n
        self.generators = list(generators)
        self.cosets = list(cosets)
        self.name = name
        self._index = {rep.matrix: i for i, rep in enumerate(self.cosets)}
        self.logger = logging.getLogger(__name__)

    def __repr__(self) -> str:
        return f"BieberbachGroup(name={self.name!r}, n={self.n}, |F|={self.order})"

    @property
    def order(self) -> int:
        return len(self.cosets)

    @property
    def orientable(self) -> bool:
        return all(rep.matrix.det() == 1 for rep in self.cosets)

    @property
    def is_z2k(self) -> bool:
        return all((rep.matrix @ rep.matrix).is_identity() for rep in self.cosets)

    @property
    def k(self) -> Optional[int]:
        """Exponent k when F is Z_2^k."""
        if not self.is_z2k:
            return None
        return self.order.bit_length() - 1

    @property
    def is_diagonal(self) -> bool:
        return all(rep.matrix.is_diagonal() for rep in self.cosets)

    def index(self, matrix: SignedPermMatrix) -> int:
        try:
            return self._index[matrix]
        except KeyError:
            raise ValueError(f"{matrix} is not in the point group of {self.name or 'the group'}")

    def multiply(self, i: int, j: int) -> Tuple[int, Tuple[int, ...]]:
        product = self.cosets[i].compose(self.cosets[j])
        k = self.index(product.matrix)
        lam = tuple(int(a - b) for a, b in zip(product.translation, self.cosets[k].translation))
        return k, lam

    def locate(self, element: AffineGen) -> Tuple[int, Tuple[int, ...]]:
        """Write element as rep_k L_lambda."""
        k = self.index(element.matrix)
        diff = [a - b for a, b in zip(element.translation, self.cosets[k].translation)]
        if any(d.denominator != 1 for d in diff):
            raise ValueError(f"{element} is not in the group")
        return k, tuple(int(d) for d in diff)

    def element(self, i: int, lam: Sequence[int]) -> AffineGen:
        rep = self.cosets[i]
        return AffineGen(rep.matrix, [t + l for t, l in zip(rep.translation, lam)])

    def f1_indices(self) -> List[int]:
        return [i for i, rep in enumerate(self.cosets) if rep.matrix.fixed_dim() == 1]

    def to_json(self) -> dict:
        out = {"n": self.n, "generators": [g.to_json() for g in self.generators]}
        if self.name:
            out["name"] = self.name
        return out


def build_group(gens: Sequence[AffineGen], n: Optional[int] = None, name: str = "") -> BieberbachGroup:
    """
    Close the generators into a coset table and validate the group.

    Parameters
    ----------
    gens : list of AffineGen
        Affine generators; the lattice Z^n is always included.
    n : int, optional
        Dimension, required when gens is empty.
    name : str
        Label carried by the group.

    Returns
    -------
    BieberbachGroup
        Validated group.

    Raises
    ------
    ValueError
        If the point group is too large, the translation subgroup exceeds Z^n,
        a translation has a denominator outside {1, 2, 4, p}, or some coset
        contains an element with a fixed point (torsion).
    """

    if n is None:
        if not gens:
            raise ValueError("dimension required for a group without generators")
        n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError(f"generator {g} has dimension {g.n}, expected {n}")
        for t in g.translation:
            q = t.denominator
            if q not in (1, 2, 4) and not _is_prime(q):
                raise ValueError(f"translation denominator {q} in {g} is not 1, 2, 4 or a prime")

    identity = AffineGen.identity(n)
    reps: Dict[SignedPermMatrix, AffineGen] = {identity.matrix: identity}
    order = [identity]
    queue = deque([identity])
    reduced_gens = [g.reduced() for g in gens]
    while queue:
        current = queue.popleft()
        for g in reduced_gens:
            product = current.compose(g).reduced()
            known = reps.get(product.matrix)
            if known is None:
                if len(reps) >= MAX_POINT_GROUP:
                    raise ValueError(f"point group closure exceeds {MAX_POINT_GROUP} elements")
                reps[product.matrix] = product
                order.append(product)
                queue.append(product)
            elif known.translation != product.translation:
                raise ValueError(
                    f"translation part of Gamma exceeds Z^n: coset {product.matrix} carries "
                    f"{[str(t) for t in known.translation]} and {[str(t) for t in product.translation]}"
                )

    for rep in order[1:]:
        if rep.has_fixed_point_in_coset():
            raise ValueError(f"torsion detected in coset {rep}")

    group = BieberbachGroup(n, gens, order, name=name)
    group.logger.info(f"Built group {name or '<unnamed>'}: n={n}, |F|={group.order}, orientable={group.orientable}")
    return group


def point_group_summary(group: BieberbachGroup) -> List[CosetSummary]:
    """One CosetSummary per holonomy element, in coset order."""
    return [
        CosetSummary(rep=rep, n_B=rep.matrix.fixed_dim(), order=rep.matrix.order(), in_F1=rep.matrix.fixed_dim() == 1)
        for rep in group.cosets
    ]


def random_word(group: BieberbachGroup, length: int, rng: random.Random) -> Tuple[List[int], AffineGen]:
    """
    Random word in the generators and the standard lattice translations.

    Returns the letters (generator index, negative for the lattice basis -i-1)
    and the resulting element.
    """

    letters, element = [], AffineGen.identity(group.n)
    for _ in range(length):
        if group.generators and rng.random() < 0.6:
            i = rng.randrange(len(group.generators))
            letter, step = i, group.generators[i]
        else:
            i = rng.randrange(group.n)
            vec = [0] * group.n
            vec[i] = 1
            letter, step = -i - 1, AffineGen.lattice(vec)
        letters.append(letter)
        element = element.compose(step)
    return letters, element


def load_group(path: Union[str, Path], name: str = "") -> BieberbachGroup:
    """
    Read a group description file.

    The file holds {"n": int, "generators": [{"perm": [...], "signs": [...],
    "translation": ["p/q", ...]}]} with a 1-based permutation.
    """

    with open(path) as f:
        data = json.load(f)
    gens = [AffineGen.from_json(g) for g in data.get("generators", [])]
    return build_group(gens, n=int(data["n"]), name=name or data.get("name", Path(path).stem))


def dump_group(group: BieberbachGroup) -> str:
    return json.dumps(group.to_json(), indent=4)


def lattice_shift(delta: Delta) -> Vector:
    """u_epsilon: 1/2 on every coordinate where delta is -1."""
    return tuple(Fraction(1, 2) if d == -1 else Fraction(0) for d in delta)


@dataclass
class ShellCount:
    """
    One shell of the shifted dual lattice.

    Attributes
    ----------
    key : int
        4 mu^2.
    count : int
        Number of vectors of norm mu in the shifted lattice.
    sums : dict
        Coset index -> sum of exp(-2 pi i u.b) over the B-fixed vectors.
    fixed_counts : dict
        Coset index -> number of B-fixed vectors.
    """

    key: int
    count: int
    sums: Dict[int, Union[ComplexQSqrt2, complex]] = field(default_factory=dict)
    fixed_counts: Dict[int, int] = field(default_factory=dict)


Series = Dict[int, Counter]


@lru_cache(maxsize=8192)
def _fixed_points(delta: Delta, perm: Tuple[int, ...], signs: Tuple[int, ...], key: int) -> np.ndarray:
    B = SignedPermMatrix(perm, signs)
    n = len(perm)
    empty = np.zeros((0, n), dtype=np.int64)
    # y is 2x for the coordinate x of each +1 cycle, with the parity of its shift
    ys = np.zeros((1, 0), dtype=np.int64)
    norms = np.zeros(1, dtype=np.int64)
    blocks = []
    for cycle, sign in B.cycles():
        halves = {delta[c] for c in cycle}
        if len(halves) > 1:
            return empty
        half = halves.pop() == -1
        if sign == -1:
            if half:
                return empty
            continue
        coeffs, a = [], 1
        for c in cycle:
            coeffs.append(a)
            a *= B.signs[c]
        length = len(cycle)
        bound = math.isqrt(key // length)
        y = np.arange(-bound, bound + 1, dtype=np.int64)
        y = y[(y % 2 == 1) == half]
        candidate = norms[:, None] + length * y[None, :] ** 2
        rows, cols = np.nonzero(candidate <= key)
        ys = np.hstack([ys[rows], y[cols][:, None]])
        norms = candidate[rows, cols]
        blocks.append((cycle, coeffs))

    ys = ys[norms == key]
    points = np.zeros((len(ys), n), dtype=np.int64)
    for b, (cycle, coeffs) in enumerate(blocks):
        for coef, c in zip(coeffs, cycle):
            points[:, c] = coef * ys[:, b]
    points = points[np.lexsort(points.T[::-1])]
    points.setflags(write=False)
    return points


class ShellEnumerator:
    """
    Exact enumeration of B-fixed vectors of the shifted lattice Z^n + u_epsilon.

    The fixed sublattice splits over the cycles of B: a cycle with sign
    product +1 contributes x v_c (x integral or half-integral), a cycle with
    sign product -1 contributes 0. Shells are assembled by convolving the
    per-cycle series {4|u|^2: Counter(phase)}.

    Attributes
    ----------
    max_key_budget : int
        Largest shell key accepted.
    enumeration_budget : int
        Largest number of explicitly enumerated vectors.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        settings = settings or Settings()
        self.max_key_budget = settings.four_mu_sq_budget
        self.enumeration_budget = settings.enumeration_budget
        self.logger = logging.getLogger(__name__)

    def _cycle_series(self, B: SignedPermMatrix, cycle: Tuple[int, ...], sign: int,
                      shift: Vector, b: Vector, max_key: int) -> Optional[Series]:
        halves = {shift[c] for c in cycle}
        if len(halves) > 1:
            return None
        half = halves.pop() != 0
        if sign == -1:
            if half:
                return None
            return {0: Counter({Fraction(0): 1})}

        length = len(cycle)
        coeffs, a = [], 1
        for c in cycle:
            coeffs.append(a)
            a *= B.signs[c]
        vb = sum(coef * b[c] for coef, c in zip(coeffs, cycle))

        series: Series = {}
        bound = int((max_key // length) ** 0.5) + 1
        for y in range(-bound, bound + 1):
            if (y % 2 == 1) != half:
                continue
            key = length * y * y
            if key > max_key:
                continue
            phase = _frac(Fraction(y, 2) * vb)
            series.setdefault(key, Counter())[phase] += 1
        return series

    def coset_series(self, delta: Delta, rep: AffineGen, max_key: int) -> Series:
        """
        Generating series of the B-fixed shifted vectors: key -> Counter of u.b mod 1.
        """

        shift = lattice_shift(delta)
        total: Series = {0: Counter({Fraction(0): 1})}
        for cycle, sign in rep.matrix.cycles():
            series = self._cycle_series(rep.matrix, cycle, sign, shift, rep.translation, max_key)
            if series is None:
                return {}
            merged: Series = {}
            for k1, c1 in total.items():
                for k2, c2 in series.items():
                    if k1 + k2 > max_key:
                        continue
                    bucket = merged.setdefault(k1 + k2, Counter())
                    for p1, w1 in c1.items():
                        for p2, w2 in c2.items():
                            bucket[_frac(p1 + p2)] += w1 * w2
            total = merged
        return total

    def fixed_points(self, delta: Delta, rep: AffineGen, key: int) -> np.ndarray:
        """
        Doubled coordinates 2u of the B-fixed vectors u in Z^n + u_epsilon with 4|u|^2 = key.

        Rows are in lexicographic order. Shells are cached per (delta, B, key)
        and shared by every coset with the same linear part.

        Raises
        ------
        ValueError
            If the enumeration budget is exceeded.
        """

        points = _fixed_points(tuple(delta), rep.matrix.perm, rep.matrix.signs, key)
        if len(points) > self.enumeration_budget:
            raise ValueError(f"shell {key} exceeds the enumeration budget {self.enumeration_budget}")
        return points

    def fixed_vectors(self, delta: Delta, rep: AffineGen, key: int) -> List[Vector]:
        """
        Explicit list of B-fixed vectors u in Z^n + u_epsilon with 4|u|^2 = key.

        Raises
        ------
        ValueError
            If the enumeration budget is exceeded.
        """

        return [tuple(Fraction(int(v), 2) for v in row) for row in self.fixed_points(delta, rep, key)]

    def count_shifted_shell(self, group: BieberbachGroup, delta: Delta, coset: Union[int, AffineGen], key: int,
                            sign_fn: Optional[Callable[[Vector], int]] = None
                            ) -> Tuple[int, Union[ComplexQSqrt2, complex]]:
        """
        Count B-fixed vectors of norm mu and their phase sum.

        Parameters
        ----------
        group : BieberbachGroup
            The group.
        delta : tuple of int
            Lattice character values on e_1..e_n.
        coset : int or AffineGen
            Coset index or representative B L_b.
        key : int
            4 mu^2.
        sign_fn : callable, optional
            Weight u -> +1/-1 applied to every phase.

        Returns
        -------
        (int, ComplexQSqrt2 or complex)
            The number of fixed vectors and sum sign_fn(u) exp(-2 pi i u.b);
            the sum is a complex float when some phase is not in (1/8)Z.
        """

        rep = group.cosets[coset] if isinstance(coset, int) else coset
        if len(delta) != group.n:
            raise ValueError(f"delta has {len(delta)} entries, expected {group.n}")
        if key < 0:
            return 0, ComplexQSqrt2(0)

        total = PhaseSum()
        if sign_fn is None:
            series = self.coset_series(delta, rep, key).get(key, Counter())
            count = sum(series.values())
            for phase, weight in series.items():
                total.add(phase, weight)
        else:
            vectors = self.fixed_vectors(delta, rep, key)
            count = len(vectors)
            for u in vectors:
                total.add(sum(a * t for a, t in zip(u, rep.translation)), sign_fn(u))
        if not total.is_exact:
            self.logger.warning(f"Inexact phase sum at key {key} for coset {rep}")
        return count, total.value()

    def theta_table(self, group: BieberbachGroup, delta: Delta, max_key: int) -> List[ShellCount]:
        """
        All nonempty shells up to max_key with per-coset phase sums.

        Raises
        ------
        ValueError
            If max_key exceeds the configured budget.
        """

        if max_key > self.max_key_budget:
            raise ValueError(f"shell cap {max_key} exceeds the budget {self.max_key_budget}")
        per_coset = [self.coset_series(delta, rep, max_key) for rep in group.cosets]
        table = []
        for key in sorted(per_coset[0]):
            shell = ShellCount(key=key, count=sum(per_coset[0][key].values()))
            for i, series in enumerate(per_coset):
                phases = series.get(key)
                if not phases:
                    continue
                shell.fixed_counts[i] = sum(phases.values())
                shell.sums[i] = PhaseSum.from_counter(phases).value()
            table.append(shell)
        self.logger.info(f"Theta table for {group.name or '<unnamed>'}: {len(table)} shells up to 4mu^2={max_key}")
        return table


def count_shifted_shell(group: BieberbachGroup, delta: Delta, coset: Union[int, AffineGen], key: int,
                        sign_fn: Optional[Callable[[Vector], int]] = None):
    return ShellEnumerator().count_shifted_shell(group, delta, coset, key, sign_fn)


def theta_table(group: BieberbachGroup, delta: Delta, max_key: int, settings: Optional[Settings] = None) -> List[ShellCount]:
    return ShellEnumerator(settings).theta_table(group, delta, max_key)
