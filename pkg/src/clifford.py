from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.quadratic_field import COS_EIGHTHS, SIN_EIGHTHS, ComplexQSqrt2, QSqrt2, Rational, i_power


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)

MAX_DIMENSION = 16

Scalar = Union[Rational, QSqrt2]
Character = Union[ComplexQSqrt2, complex]


class SignedPermMatrix:
    """
    Orthogonal matrix that maps e_i to s_i e_{perm[i]}.

    Indices are 0-based internally; the JSON form uses a 1-based permutation.

    Attributes
    ----------
    perm : tuple of int
        Image index of every basis vector.
    signs : tuple of int
        Sign s_i attached to column i.

    Methods
    -------
    det() -> int
        Exact determinant sign(perm) * prod(signs).
    cycles() -> list
        Cycles of the permutation with their sign products.
    fixed_dim() -> int
        Dimension of ker(B - Id).
    eigen_angles() -> list
        Eigenvalue arguments as multiples of pi.
    """

    __slots__ = ("perm", "signs")

    def __init__(self, perm: Sequence[int], signs: Sequence[int]) -> None:
        perm = tuple(int(p) for p in perm)
        signs = tuple(int(s) for s in signs)
        if len(perm) != len(signs):
            raise ValueError(f"permutation of length {len(perm)} paired with {len(signs)} signs")
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"signs must be +1 or -1, got {signs}")
        self.perm = perm
        self.signs = signs

    @classmethod
    def identity(cls, n: int) -> SignedPermMatrix:
        return cls(range(n), [1] * n)

    @classmethod
    def diagonal(cls, signs: Sequence[int]) -> SignedPermMatrix:
        return cls(range(len(signs)), signs)

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[int]]) -> SignedPermMatrix:
        """
        Read a signed permutation from a dense integer matrix.

        Raises
        ------
        ValueError
            If some column is not a signed basis vector.
        """

        arr = np.asarray(matrix, dtype=int)
        n = arr.shape[0]
        if arr.shape != (n, n):
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        perm, signs = [], []
        for i in range(n):
            nonzero = np.flatnonzero(arr[:, i])
            if len(nonzero) != 1 or abs(arr[nonzero[0], i]) != 1:
                raise ValueError(f"column {i + 1} is not a signed basis vector")
            perm.append(int(nonzero[0]))
            signs.append(int(arr[nonzero[0], i]))
        return cls(perm, signs)

    @property
    def n(self) -> int:
        return len(self.perm)

    def __repr__(self) -> str:
        return f"SignedPermMatrix(perm={self.perm}, signs={self.signs})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedPermMatrix):
            return NotImplemented
        return self.perm == other.perm and self.signs == other.signs

    def __hash__(self) -> int:
        return hash((self.perm, self.signs))

    def __matmul__(self, other: SignedPermMatrix) -> SignedPermMatrix:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        perm = [self.perm[other.perm[i]] for i in range(self.n)]
        signs = [other.signs[i] * self.signs[other.perm[i]] for i in range(self.n)]
        return SignedPermMatrix(perm, signs)

    def inverse(self) -> SignedPermMatrix:
        perm = [0] * self.n
        signs = [1] * self.n
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p] = i
            signs[p] = s
        return SignedPermMatrix(perm, signs)

    def power(self, k: int) -> SignedPermMatrix:
        base = self if k >= 0 else self.inverse()
        result = SignedPermMatrix.identity(self.n)
        for _ in range(abs(k)):
            result = base @ result
        return result

    def apply(self, vector: Sequence) -> tuple:
        """Image B(x) of a coordinate vector (any ring)."""
        if len(vector) != self.n:
            raise ValueError(f"vector of length {len(vector)} for a {self.n}x{self.n} matrix")
        out = [None] * self.n
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            out[p] = vector[i] if s == 1 else -vector[i]
        return tuple(out)

    def to_dense(self) -> np.ndarray:
        arr = np.zeros((self.n, self.n), dtype=int)
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            arr[p, i] = s
        return arr

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.n)) and all(s == 1 for s in self.signs)

    def is_diagonal(self) -> bool:
        return self.perm == tuple(range(self.n))

    def det(self) -> int:
        parity = sum(len(c) - 1 for c, _ in self.cycles()) % 2
        sign = -1 if parity else 1
        for s in self.signs:
            sign *= s
        return sign

    def cycles(self) -> List[Tuple[Tuple[int, ...], int]]:
        """
        Cycles c_0 -> c_1 -> ... of the permutation, each with its sign product.

        Every cycle starts at its smallest index; cycles are listed by that index.
        """

        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cycle, sign, i = [], 1, start
            while not seen[i]:
                seen[i] = True
                cycle.append(i)
                sign *= self.signs[i]
                i = self.perm[i]
            out.append((tuple(cycle), sign))
        return out

    def fixed_vectors(self) -> List[Tuple[int, ...]]:
        """Integer basis of ker(B - Id), one vector per cycle with sign product +1."""
        vectors = []
        for cycle, sign in self.cycles():
            if sign != 1:
                continue
            v = [0] * self.n
            a = 1
            for c in cycle:
                v[c] = a
                a *= self.signs[c]
            vectors.append(tuple(v))
        return vectors

    def fixed_dim(self) -> int:
        return sum(1 for _, sign in self.cycles() if sign == 1)

    def order(self) -> int:
        order = 1
        for cycle, sign in self.cycles():
            length = len(cycle) * (2 if sign == -1 else 1)
            order = order * length // math.gcd(order, length)
        return order

    def eigen_angles(self) -> List[Fraction]:
        """
        Arguments of all eigenvalues as multiples of pi in [0, 2).

        A cycle of length L with sign product s has the L-th roots of s as eigenvalues.
        """

        angles = []
        for cycle, sign in self.cycles():
            length = len(cycle)
            for k in range(length):
                numerator = 2 * k if sign == 1 else 2 * k + 1
                angles.append(Fraction(numerator, length) % 2)
        return sorted(angles)

    def to_json(self) -> dict:
        return {"perm": [p + 1 for p in self.perm], "signs": list(self.signs)}


@lru_cache(maxsize=None)
def blade_product(a: int, b: int) -> Tuple[int, int]:
    """
    Product of basis monomials given as bitmasks: (sign, mask).

    The sign counts transpositions needed to sort the indices and one factor
    e_i^2 = -1 per shared index.
    """

    swaps = 0
    rest = b
    while rest:
        low = rest & -rest
        j = low.bit_length() - 1
        swaps += bin(a >> (j + 1)).count("1")
        rest ^= low
    swaps += bin(a & b).count("1")
    return (-1 if swaps % 2 else 1), a ^ b


def reverse_sign(mask: int) -> int:
    k = bin(mask).count("1")
    return -1 if (k * (k - 1) // 2) % 2 else 1


def mask_indices(mask: int) -> Tuple[int, ...]:
    """1-based indices of a monomial."""
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


class CliffordElement:
    """
    Exact element of Cl(n) with e_i e_j = -e_j e_i and e_i^2 = -1.

    Terms map a monomial bitmask (bit i stands for e_{i+1}) to a nonzero
    coefficient in Q(sqrt 2).

    Attributes
    ----------
    n : int
        Dimension of the underlying vector space.
    terms : dict
        Sparse expansion {mask: QSqrt2}.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[int, Scalar]] = None) -> None:
        if not 0 <= n <= MAX_DIMENSION:
            raise ValueError(f"Clifford dimension must lie in 0..{MAX_DIMENSION}, got {n}")
        self.n = n
        self.terms: Dict[int, QSqrt2] = {}
        for mask, coeff in (terms or {}).items():
            if mask >> n:
                raise ValueError(f"monomial {mask_indices(mask)} outside Cl({n})")
            coeff = QSqrt2.coerce(coeff)
            if coeff:
                self.terms[mask] = coeff

    @classmethod
    def scalar_element(cls, n: int, value: Scalar = 1) -> CliffordElement:
        return cls(n, {0: value})

    @classmethod
    def monomial(cls, n: int, indices: Iterable[int], coeff: Scalar = 1) -> CliffordElement:
        """Ordered product e_{i_1} ... e_{i_k} of 1-based indices, scaled by coeff."""
        result = cls.scalar_element(n, coeff)
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"basis index {i} outside 1..{n}")
            result = result * cls(n, {1 << (i - 1): 1})
        return result

    def __repr__(self) -> str:
        if not self.terms:
            return f"CliffordElement({self.n}, 0)"
        parts = []
        for mask in sorted(self.terms):
            name = "e" + "e".join(str(i) for i in mask_indices(mask)) if mask else "1"
            parts.append(f"({self.terms[mask]})*{name}")
        return f"CliffordElement({self.n}, {' + '.join(parts)})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, QSqrt2)):
            other = CliffordElement.scalar_element(self.n, other)
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def _check(self, other: CliffordElement) -> None:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: Cl({self.n}) vs Cl({other.n})")

    def __add__(self, other: CliffordElement) -> CliffordElement:
        self._check(other)
        terms = dict(self.terms)
        for mask, coeff in other.terms.items():
            terms[mask] = terms.get(mask, QSqrt2()) + coeff
        return CliffordElement(self.n, terms)

    def __neg__(self) -> CliffordElement:
        return CliffordElement(self.n, {mask: -c for mask, c in self.terms.items()})

    def __sub__(self, other: CliffordElement) -> CliffordElement:
        return self + (-other)

    def scale(self, factor: Scalar) -> CliffordElement:
        factor = QSqrt2.coerce(factor)
        return CliffordElement(self.n, {mask: c * factor for mask, c in self.terms.items()})

    def __mul__(self, other: Union[CliffordElement, Scalar]) -> CliffordElement:
        if not isinstance(other, CliffordElement):
            return self.scale(other)
        return clifford_mul(self, other)

    def __rmul__(self, other: Scalar) -> CliffordElement:
        return self.scale(other)

    def coeff(self, mask: int) -> QSqrt2:
        return self.terms.get(mask, QSqrt2())

    def scalar(self) -> QSqrt2:
        return self.coeff(0)

    def vol_coeff(self) -> QSqrt2:
        """Coefficient of e_1 e_2 ... e_n."""
        return self.coeff((1 << self.n) - 1)

    def is_even(self) -> bool:
        return all(bin(mask).count("1") % 2 == 0 for mask in self.terms)

    def is_vector(self) -> bool:
        return all(bin(mask).count("1") == 1 for mask in self.terms)

    def is_spin(self) -> bool:
        return self.is_even() and clifford_mul(self, reverse(self)) == 1

    def vector_coeffs(self) -> Tuple[QSqrt2, ...]:
        return tuple(self.coeff(1 << i) for i in range(self.n))


def clifford_mul(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """
    Exact product in Cl(n).

    Parameters
    ----------
    a, b : CliffordElement
        Factors of the same dimension.

    Returns
    -------
    CliffordElement
        The product a * b in canonical form.

    Raises
    ------
    ValueError
        If the dimensions differ.
    """

    if a.n != b.n:
        raise ValueError(f"dimension mismatch: Cl({a.n}) vs Cl({b.n})")
    terms: Dict[int, QSqrt2] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign, mask = blade_product(ma, mb)
            term = ca * cb
            terms[mask] = terms.get(mask, QSqrt2()) + (term if sign == 1 else -term)
    return CliffordElement(a.n, terms)


def reverse(x: CliffordElement) -> CliffordElement:
    """Main anti-automorphism e_{i_1}...e_{i_k} -> e_{i_k}...e_{i_1}."""
    return CliffordElement(x.n, {mask: c if reverse_sign(mask) == 1 else -c for mask, c in x.terms.items()})


def vector_element(coeffs: Sequence[Scalar]) -> CliffordElement:
    """Embed a vector of R^n in Cl(n)."""
    n = len(coeffs)
    return CliffordElement(n, {1 << i: c for i, c in enumerate(coeffs)})


def g_h(n: int, h: int) -> CliffordElement:
    """The element e_1 e_2 ... e_{2h} of Cl(n)."""
    if not 0 <= 2 * h <= n:
        raise ValueError(f"g_h needs 0 <= 2h <= n, got h={h}, n={n}")
    return CliffordElement(n, {(1 << (2 * h)) - 1: 1})


DenseMatrix = Tuple[Tuple[QSqrt2, ...], ...]


def mu_project(g: CliffordElement) -> Union[SignedPermMatrix, DenseMatrix]:
    """
    Image of a spin element under the covering Spin(n) -> SO(n).

    Column i is g e_i g^{-1}, with g^{-1} = reverse(g).

    Parameters
    ----------
    g : CliffordElement
        Even element of unit norm.

    Returns
    -------
    SignedPermMatrix or tuple of tuples of QSqrt2
        A signed permutation when every column is a signed basis vector,
        otherwise the dense exact matrix (rows of QSqrt2).

    Raises
    ------
    ValueError
        If g has odd terms or g * reverse(g) != 1.
    """

    if not g.is_even():
        raise ValueError("mu_project needs an even element")
    g_rev = reverse(g)
    if clifford_mul(g, g_rev) != 1:
        raise ValueError("mu_project needs a unit element (g * reverse(g) = 1)")

    columns = []
    for i in range(g.n):
        image = clifford_mul(clifford_mul(g, CliffordElement(g.n, {1 << i: 1})), g_rev)
        if not image.is_vector():
            raise RuntimeError(f"conjugate of e_{i + 1} is not a vector")
        columns.append(image.vector_coeffs())

    perm, signs = [], []
    for col in columns:
        nonzero = [k for k, c in enumerate(col) if c]
        if len(nonzero) != 1 or col[nonzero[0]] not in (1, -1):
            break
        perm.append(nonzero[0])
        signs.append(int(col[nonzero[0]].a))
    else:
        return SignedPermMatrix(perm, signs)

    return tuple(tuple(columns[j][i] for j in range(g.n)) for i in range(g.n))


def lift_orthogonal(B: SignedPermMatrix) -> CliffordElement:
    """
    Canonical lift u(B) in Spin(n) of a signed permutation with det +1.

    B is factored as P D. Each cycle c_0 -> ... -> c_{L-1} contributes the
    vectors (e_{c_{k-1}} - e_{c_k})/sqrt 2 for k = 1..L-1 (cycles by smallest
    index), followed by e_i for every s_i = -1 in ascending order. The lift is
    the product of these vectors.

    Raises
    ------
    ValueError
        If det B = -1.
    """

    if B.det() != 1:
        raise ValueError(f"cannot lift {B}: determinant is -1")
    n = B.n
    half_sqrt2 = QSqrt2(0, Fraction(1, 2))
    result = CliffordElement.scalar_element(n)
    for cycle, _ in B.cycles():
        for k in range(1, len(cycle)):
            vec = CliffordElement(n, {1 << cycle[k - 1]: half_sqrt2, 1 << cycle[k]: -half_sqrt2})
            result = clifford_mul(result, vec)
    for i, s in enumerate(B.signs):
        if s == -1:
            result = clifford_mul(result, CliffordElement(n, {1 << i: 1}))
    return result


def _cos_sin_exact(angle: Fraction) -> Optional[Tuple[QSqrt2, QSqrt2]]:
    if (4 * angle).denominator != 1:
        return None
    k = int(4 * angle) % 8
    return COS_EIGHTHS[k], SIN_EIGHTHS[k]


class TorusAngles:
    """
    Torus element sign * x(t_1, ..., t_m) of Spin(n), m = n // 2.

    Angles are stored as rational multiples of pi reduced mod 2.

    Attributes
    ----------
    n : int
        Dimension of Spin(n).
    angles : tuple of Fraction
        t_j / pi for j = 1..m.
    sign : int
        Global sign +1 or -1.
    """

    __slots__ = ("n", "angles", "sign")

    def __init__(self, n: int, angles: Sequence[Rational], sign: int = 1) -> None:
        if len(angles) != n // 2:
            raise ValueError(f"Spin({n}) torus elements need {n // 2} angles, got {len(angles)}")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        self.n = n
        self.angles = tuple(Fraction(a) % 2 for a in angles)
        self.sign = sign

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def radians(self) -> Tuple[float, ...]:
        return tuple(float(a) * math.pi for a in self.angles)

    def __repr__(self) -> str:
        return f"TorusAngles(n={self.n}, angles={[str(a) for a in self.angles]}, sign={self.sign})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TorusAngles):
            return NotImplemented
        return (self.n, self.angles, self.sign) == (other.n, other.angles, other.sign)

    def __hash__(self) -> int:
        return hash((self.n, self.angles, self.sign))

    def is_exact(self) -> bool:
        return all((4 * a).denominator == 1 for a in self.angles)

    def cos_product(self) -> Union[QSqrt2, float]:
        """prod cos t_j, exact when every angle is a multiple of pi/4."""
        if self.is_exact():
            out = QSqrt2(1)
            for a in self.angles:
                out = out * _cos_sin_exact(a)[0]
            return out
        return float(np.prod(np.cos(self.radians))) if self.angles else 1.0

    def sin_product(self) -> Union[QSqrt2, float]:
        if self.is_exact():
            out = QSqrt2(1)
            for a in self.angles:
                out = out * _cos_sin_exact(a)[1]
            return out
        return float(np.prod(np.sin(self.radians))) if self.angles else 1.0

    def power(self, k: int) -> TorusAngles:
        return TorusAngles(self.n, [k * a for a in self.angles], self.sign if k % 2 else 1)

    def restricted(self) -> TorusAngles:
        """The same element viewed in Spin(n - 1) for n odd."""
        if self.n % 2 == 0:
            raise ValueError("restriction to Spin(n-1) needs n odd")
        return TorusAngles(self.n - 1, self.angles, self.sign)

    def flip_first(self) -> TorusAngles:
        """x(-t_1, t_2, ..., t_m)."""
        if not self.angles:
            return self
        return TorusAngles(self.n, (-self.angles[0],) + self.angles[1:], self.sign)

    def to_json(self) -> dict:
        return {"n": self.n, "angles_over_pi": [str(a) for a in self.angles], "sign": self.sign}


def torus_element(x: TorusAngles) -> CliffordElement:
    """
    Exact Clifford element sign * prod_j (cos t_j + sin t_j e_{2j-1} e_{2j}).

    Raises
    ------
    ValueError
        If some angle is not a multiple of pi/4.
    """

    if not x.is_exact():
        raise ValueError(f"{x} has angles outside (pi/4)Z; use TorusAngles only")
    result = CliffordElement.scalar_element(x.n, x.sign)
    for j, a in enumerate(x.angles):
        c, s = _cos_sin_exact(a)
        factor = CliffordElement(x.n, {0: c, (0b11 << (2 * j)): s})
        result = clifford_mul(result, factor)
    return result


def _to_character(value: Union[QSqrt2, float, ComplexQSqrt2, complex]) -> Character:
    if isinstance(value, (QSqrt2, ComplexQSqrt2)):
        return ComplexQSqrt2.coerce(value)
    return complex(value)


def spin_character(x: TorusAngles, which: str = "full") -> Character:
    """
    Character of the spin representation on a torus element.

    full gives 2^m prod cos t_j; plus and minus give the half-spin characters
    2^{m-1} (prod cos t_j +- i^m prod sin t_j) of Spin(2m). The global sign of
    x multiplies the result.

    Parameters
    ----------
    x : TorusAngles
        Torus element.
    which : str
        One of 'full', 'plus', 'minus'.

    Returns
    -------
    ComplexQSqrt2 or complex
        Exact when every angle is a multiple of pi/4, otherwise a complex float.

    Raises
    ------
    ValueError
        If which is unknown, or a half-spin character is asked for n odd.
    """

    if which not in ("full", "plus", "minus"):
        raise ValueError(f"unknown character {which!r}")
    m = x.m
    cos_p = x.cos_product()
    if which == "full":
        return _to_character(cos_p * (x.sign * 2 ** m))
    if x.n % 2:
        raise ValueError(f"half-spin characters need n even, got n={x.n}")
    sin_p = x.sin_product()
    eps = 1 if which == "plus" else -1
    scale = x.sign * Fraction(2 ** m, 2)
    if isinstance(cos_p, QSqrt2):
        return (ComplexQSqrt2(cos_p) + i_power(m) * sin_p * eps) * QSqrt2(scale)
    return (cos_p + eps * (1j ** m) * sin_p) * float(scale)


def clifford_trace(g: CliffordElement, which: str = "full") -> ComplexQSqrt2:
    """
    Exact trace of g in the spin representation.

    For n even: full is 2^m scalar(g) and the half-spin traces are
    2^{m-1}(scalar(g) +- i^m vol(g)). For n odd the representation sends the
    volume element to -i^{m+1}, so full is 2^m (scalar(g) - i^{m+1} vol(g)).
    """

    m = g.n // 2
    scalar = ComplexQSqrt2(g.scalar())
    vol = ComplexQSqrt2(g.vol_coeff())
    if which == "full":
        if g.n % 2 == 0:
            return scalar * (2 ** m)
        return (scalar - i_power(m + 1) * vol) * (2 ** m)
    if which not in ("plus", "minus"):
        raise ValueError(f"unknown character {which!r}")
    if g.n % 2:
        raise ValueError(f"half-spin traces need n even, got n={g.n}")
    eps = 1 if which == "plus" else -1
    return (scalar + i_power(m) * vol * eps) * QSqrt2(Fraction(2 ** m, 2))


def rotation_angles(B: SignedPermMatrix) -> List[Fraction]:
    """
    Rotation angles theta_1..theta_m of B as multiples of pi in [0, 1].

    Conjugate eigenvalue pairs give their argument; eigenvalues -1 pair into
    pi and eigenvalues +1 into 0. For n odd one eigenvalue +1 is left over.
    """

    angles = B.eigen_angles()
    inner = [a for a in angles if 0 < a < 1]
    minus = sum(1 for a in angles if a == 1)
    plus = sum(1 for a in angles if a == 0)
    if minus % 2:
        raise ValueError(f"{B} has determinant -1")
    rotation = sorted(inner, reverse=True) + [Fraction(1)] * (minus // 2) + [Fraction(0)] * (plus // 2)
    return rotation


def torus_angles_of(lift: CliffordElement, B: SignedPermMatrix, tolerance: float = 1e-9) -> TorusAngles:
    """
    Torus element x_gamma conjugate to a lift of B.

    Angles are half the rotation angles of B; the global sign is fixed by
    matching scalar(lift) = sign * prod cos t_j (sign +1 when the product vanishes).
    """

    half = [a / 2 for a in rotation_angles(B)]
    x = TorusAngles(B.n, half, 1)
    cos_p = x.cos_product()
    scalar = lift.scalar()
    if isinstance(cos_p, QSqrt2):
        if not cos_p:
            return x
        if scalar == cos_p:
            return x
        if scalar == -cos_p:
            return TorusAngles(B.n, half, -1)
        raise RuntimeError(f"lift scalar {scalar} does not match +-{cos_p}")
    if abs(cos_p) < tolerance:
        return x
    ratio = float(scalar) / cos_p
    if abs(abs(ratio) - 1) > 1e-6:
        raise RuntimeError(f"lift scalar {float(scalar)} does not match +-{cos_p}")
    return TorusAngles(B.n, half, 1 if ratio > 0 else -1)


def clifford_sigma(u: Sequence[Rational], x: TorusAngles, lift: CliffordElement) -> int:
    """
    Sign sigma(u, x) for n odd from exact Clifford data.

    The trace of the lift on S_u^+ is 2^{m-1}(scalar + i^m q/|u|) with
    q the volume coefficient of lift * u; comparing with the half-spin
    characters of x gives sigma = sign(q) * sign(x.sign * prod sin t_j).

    Raises
    ------
    ValueError
        If n is even or u = 0.
    RuntimeError
        If the characters differ but q vanishes.
    """

    if lift.n % 2 == 0:
        raise ValueError("sigma signs are defined for n odd")
    if not any(u):
        raise ValueError("sigma(u, x) needs u != 0")
    sin_p = x.sin_product()
    s = sin_p.sign() if isinstance(sin_p, QSqrt2) else (0 if abs(sin_p) < 1e-12 else (1 if sin_p > 0 else -1))
    s *= x.sign
    if s == 0:
        return 1
    q = clifford_mul(lift, vector_element([Fraction(c) for c in u])).vol_coeff()
    if not q:
        raise RuntimeError(f"half-spin characters differ but vol(lift*u) = 0 for u={tuple(u)}")
    return q.sign() * s
