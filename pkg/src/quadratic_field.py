from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import total_ordering
from typing import Mapping, Union

Rational = Union[int, Fraction]

SQRT2_FLOAT = math.sqrt(2.0)


@total_ordering
class QSqrt2:
    """
    Exact element a + b*sqrt(2) of the field Q(sqrt 2), a and b rational.
    """

    __slots__ = ("_a", "_b")

    def __init__(self, a: Rational = 0, b: Rational = 0) -> None:
        self._a = Fraction(a)
        self._b = Fraction(b)

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @classmethod
    def from_rational(cls, x: Rational) -> QSqrt2:
        return cls(x, 0)

    @classmethod
    def coerce(cls, x: Union[Rational, QSqrt2]) -> QSqrt2:
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to QSqrt2")

    def __repr__(self) -> str:
        return f"QSqrt2({self._a}, {self._b})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        if self._a == 0:
            return f"{self._b}*sqrt2"
        sign = "+" if self._b > 0 else "-"
        return f"{self._a}{sign}{abs(self._b)}*sqrt2"

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and self._a == other
        if isinstance(other, QSqrt2):
            return self._a == other.a and self._b == other.b
        return NotImplemented

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(2)."""
        a, b = self._a, self._b
        if a >= 0 and b >= 0:
            return 0 if (a == 0 and b == 0) else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def __lt__(self, other: Union[Rational, QSqrt2]) -> bool:
        return (self - QSqrt2.coerce(other)).sign() < 0

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def is_rational(self) -> bool:
        return self._b == 0

    def __add__(self, other: Union[Rational, QSqrt2]) -> QSqrt2:
        try:
            other = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a + other.a, self._b + other.b)

    def __radd__(self, other: Rational) -> QSqrt2:
        return self + other

    def __neg__(self) -> QSqrt2:
        return QSqrt2(-self._a, -self._b)

    def __sub__(self, other: Union[Rational, QSqrt2]) -> QSqrt2:
        try:
            other = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a - other.a, self._b - other.b)

    def __rsub__(self, other: Rational) -> QSqrt2:
        return (-self) + other

    def __mul__(self, other: Union[Rational, QSqrt2]) -> QSqrt2:
        try:
            other = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a * other.a + 2 * self._b * other.b, self._a * other.b + self._b * other.a)

    def __rmul__(self, other: Rational) -> QSqrt2:
        return self * other

    @property
    def conj_sq2(self) -> QSqrt2:
        """Galois conjugate a - b*sqrt(2)."""
        return QSqrt2(self._a, -self._b)

    @property
    def norm(self) -> Fraction:
        return self._a * self._a - 2 * self._b * self._b

    def inverse(self) -> QSqrt2:
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(sqrt 2)")
        n = self.norm
        return QSqrt2(self._a / n, -self._b / n)

    def __truediv__(self, other: Union[Rational, QSqrt2]) -> QSqrt2:
        return self * QSqrt2.coerce(other).inverse()

    def __pow__(self, k: int) -> QSqrt2:
        if k < 0:
            return self.inverse() ** (-k)
        result = QSqrt2(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * SQRT2_FLOAT

    def to_json(self) -> str:
        return str(self)


class ComplexQSqrt2:
    """
    Exact element re + i*im of Q(sqrt 2)(i).
    """

    __slots__ = ("_re", "_im")

    def __init__(self, re: Union[Rational, QSqrt2] = 0, im: Union[Rational, QSqrt2] = 0) -> None:
        self._re = QSqrt2.coerce(re)
        self._im = QSqrt2.coerce(im)

    @property
    def re(self) -> QSqrt2:
        return self._re

    @property
    def im(self) -> QSqrt2:
        return self._im

    @classmethod
    def coerce(cls, x: Union[Rational, QSqrt2, ComplexQSqrt2]) -> ComplexQSqrt2:
        if isinstance(x, ComplexQSqrt2):
            return x
        return cls(x, 0)

    def __repr__(self) -> str:
        return f"ComplexQSqrt2({self._re}, {self._im})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, QSqrt2)):
            return self._im == 0 and self._re == other
        if isinstance(other, ComplexQSqrt2):
            return self._re == other.re and self._im == other.im
        return NotImplemented

    def __hash__(self) -> int:
        if not self._im:
            return hash(self._re)
        return hash((self._re, self._im))

    def __bool__(self) -> bool:
        return bool(self._re) or bool(self._im)

    def __add__(self, other: Union[Rational, QSqrt2, ComplexQSqrt2]) -> ComplexQSqrt2:
        other = ComplexQSqrt2.coerce(other)
        return ComplexQSqrt2(self._re + other.re, self._im + other.im)

    def __radd__(self, other: Union[Rational, QSqrt2]) -> ComplexQSqrt2:
        return self + other

    def __neg__(self) -> ComplexQSqrt2:
        return ComplexQSqrt2(-self._re, -self._im)

    def __sub__(self, other: Union[Rational, QSqrt2, ComplexQSqrt2]) -> ComplexQSqrt2:
        return self + (-ComplexQSqrt2.coerce(other))

    def __mul__(self, other: Union[Rational, QSqrt2, ComplexQSqrt2]) -> ComplexQSqrt2:
        other = ComplexQSqrt2.coerce(other)
        return ComplexQSqrt2(self._re * other.re - self._im * other.im, self._re * other.im + self._im * other.re)

    def __rmul__(self, other: Union[Rational, QSqrt2]) -> ComplexQSqrt2:
        return self * other

    def conjugate(self) -> ComplexQSqrt2:
        return ComplexQSqrt2(self._re, -self._im)

    def __complex__(self) -> complex:
        return complex(float(self._re), float(self._im))

    def is_real(self) -> bool:
        return not self._im

    def is_rational(self) -> bool:
        return not self._im and self._re.is_rational()


I_UNIT = ComplexQSqrt2(0, 1)

_HALF_SQRT2 = QSqrt2(0, Fraction(1, 2))

# cos(k*pi/4), sin(k*pi/4) for k = 0..7
COS_EIGHTHS = (QSqrt2(1), _HALF_SQRT2, QSqrt2(0), -_HALF_SQRT2, QSqrt2(-1), -_HALF_SQRT2, QSqrt2(0), _HALF_SQRT2)
SIN_EIGHTHS = (QSqrt2(0), _HALF_SQRT2, QSqrt2(1), _HALF_SQRT2, QSqrt2(0), -_HALF_SQRT2, QSqrt2(-1), -_HALF_SQRT2)


def i_power(k: int) -> ComplexQSqrt2:
    """Exact i**k."""
    return (ComplexQSqrt2(1), ComplexQSqrt2(0, 1), ComplexQSqrt2(-1), ComplexQSqrt2(0, -1))[k % 4]


def exact_phase(q: Fraction) -> Union[ComplexQSqrt2, None]:
    """
    Exact value of exp(-2*pi*i*q) when 8q is an integer, otherwise None.
    """

    q = Fraction(q)
    if (8 * q).denominator != 1:
        return None
    k = int(8 * q) % 8
    # exp(-i*k*pi/4) = cos(k*pi/4) - i*sin(k*pi/4)
    return ComplexQSqrt2(COS_EIGHTHS[k], -SIN_EIGHTHS[k])


class PhaseSum:
    """
    Accumulator for sums of weighted phases exp(-2*pi*i*q).

    Terms with q in (1/8)Z are kept exactly; any other term is added as a
    complex float and the sum is flagged inexact.
    """

    __slots__ = ("exact", "approx", "is_exact")

    def __init__(self) -> None:
        self.exact = ComplexQSqrt2(0)
        self.approx = 0j
        self.is_exact = True

    @classmethod
    def from_counter(cls, phases: Mapping[Fraction, int]) -> PhaseSum:
        total = cls()
        for q, weight in phases.items():
            total.add(q, weight)
        return total

    def add(self, q: Fraction, weight: Union[Rational, QSqrt2] = 1) -> None:
        phase = exact_phase(q)
        if phase is not None:
            self.exact = self.exact + phase * weight
        else:
            self.approx += cmath.exp(-2j * math.pi * float(q)) * float(weight)
            self.is_exact = False

    def value(self) -> Union[ComplexQSqrt2, complex]:
        if self.is_exact:
            return self.exact
        return complex(self.exact) + self.approx

    def __complex__(self) -> complex:
        return complex(self.exact) + self.approx


def to_integer(value: Union[Rational, QSqrt2, ComplexQSqrt2, complex, float], tolerance: float = 1e-9) -> int:
    """
    Convert an exact or floating total to an integer.

    Parameters
    ----------
    value : number
        The total to convert.
    tolerance : float
        Largest residual accepted for floating inputs.

    Returns
    -------
    int
        The integer value.

    Raises
    ------
    RuntimeError
        If the value is not an integer (exactly, or within tolerance).
    """

    if isinstance(value, ComplexQSqrt2):
        if value.is_rational() and value.re.a.denominator == 1:
            return int(value.re.a)
        raise RuntimeError(f"expected an integer, got {value!r}")
    if isinstance(value, QSqrt2):
        if value.is_rational() and value.a.denominator == 1:
            return int(value.a)
        raise RuntimeError(f"expected an integer, got {value!r}")
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        raise RuntimeError(f"expected an integer, got {value}")
    if isinstance(value, int):
        return value
    z = complex(value)
    nearest = round(z.real)
    residual = abs(z - nearest)
    if residual > tolerance:
        raise RuntimeError(f"expected an integer, got {z} (residual {residual:.3e})")
    return int(nearest)


Number = Union[int, Fraction, QSqrt2, ComplexQSqrt2, complex, float]


def exact_or_complex(x: Number) -> Union[ComplexQSqrt2, complex]:
    if isinstance(x, ComplexQSqrt2):
        return x
    if isinstance(x, (int, Fraction, QSqrt2)):
        return ComplexQSqrt2(x)
    return complex(x)


def mul_number(a: Number, b: Number) -> Union[ComplexQSqrt2, complex]:
    """Product, exact when both factors are exact."""
    a, b = exact_or_complex(a), exact_or_complex(b)
    if isinstance(a, ComplexQSqrt2) and isinstance(b, ComplexQSqrt2):
        return a * b
    return complex(a) * complex(b)


def add_number(a: Number, b: Number) -> Union[ComplexQSqrt2, complex]:
    a, b = exact_or_complex(a), exact_or_complex(b)
    if isinstance(a, ComplexQSqrt2) and isinstance(b, ComplexQSqrt2):
        return a + b
    return complex(a) + complex(b)
