from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import mpmath
import numpy as np
import pandas as pd

from src.clifford import TorusAngles, spin_character
from src.eta_invariants import hurwitz_zeta
from src.flat_manifold import Vector, _is_prime
from src.quadratic_field import add_number, to_integer
from src.settings import Settings


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)

# largest p whose harmonic count fits the float guard 2^m * p < 2^53
FLOAT_HARMONIC_LIMIT = 71
ROUNDING_RESIDUAL = 1e-6
HARMONIC_RESIDUAL = 1e-3


def legendre(k: int, p: int) -> int:
    """
    Legendre symbol (k/p) by Euler's criterion.

    Raises
    ------
    ValueError
        If p is not an odd prime.
    """

    if p == 2 or not _is_prime(p):
        raise ValueError(f"Legendre symbol needs an odd prime, got {p}")
    value = pow(k % p, (p - 1) // 2, p)
    return -1 if value == p - 1 else value


@dataclass(frozen=True)
class ZpManifold:
    """
    The p-dimensional flat manifold with holonomy Z_p, p = 4r + 3 prime.

    Attributes
    ----------
    p : int
        The prime.
    """

    p: int

    def __post_init__(self) -> None:
        if not _is_prime(self.p) or self.p % 4 != 3:
            raise ValueError(f"Z_p-manifolds need a prime p = 3 mod 4, got {self.p}")

    @property
    def r(self) -> int:
        return (self.p - 3) // 4

    @property
    def m(self) -> int:
        return (self.p - 1) // 2

    @property
    def fixed_vector(self) -> Tuple[int, ...]:
        return tuple(1 if i == self.p - 1 else 0 for i in range(self.p))

    def spin_structure(self, h: int) -> Tuple[TorusAngles, Vector]:
        """
        epsilon_h(gamma) = (-1)^{r+h} x(pi/p, 2pi/p, ..., m pi/p) and the lattice shift u_eps.

        Raises
        ------
        ValueError
            If h is not 1 or 2.
        """

        if h not in (1, 2):
            raise ValueError(f"Z_p-manifolds carry the spin structures 1 and 2, got {h}")
        sign = -1 if (self.r + h) % 2 else 1
        angles = [Fraction(j, self.p) for j in range(1, self.m + 1)]
        shift = tuple(Fraction(1, 2) if (h == 2 and i == self.p - 1) else Fraction(0) for i in range(self.p))
        return TorusAngles(self.p, angles, sign), shift


def _round_eta(value: float, p: int) -> Fraction:
    denominator = 3 if p == 3 else 1
    nearest = Fraction(round(value * denominator), denominator)
    residual = abs(value - float(nearest))
    if residual >= ROUNDING_RESIDUAL:
        raise RuntimeError(f"eta value {value} for p={p} is not within {ROUNDING_RESIDUAL} of {nearest}")
    return nearest


def _raw_eta(p: int, extended: bool) -> Tuple[float, float]:
    half = (p - 1) // 2
    if extended:
        with mpmath.workdps(50):
            s1 = mpmath.fsum(legendre(k, p) * mpmath.cot(k * mpmath.pi / p) for k in range(1, half + 1))
            s2 = mpmath.fsum((-1) ** k * legendre(k, p) * mpmath.csc(k * mpmath.pi / p) for k in range(1, half + 1))
            scale = -2 / mpmath.sqrt(p)
            return float(scale * s1), float(scale * s2)
    k = np.arange(1, half + 1)
    symbols = np.array([legendre(int(x), p) for x in k], dtype=float)
    angles = k * np.pi / p
    s1 = np.sum(symbols / np.tan(angles))
    s2 = np.sum((-1.0) ** k * symbols / np.sin(angles))
    scale = -2 / math.sqrt(p)
    return float(scale * s1), float(scale * s2)


def zp_eta(p: int, chi: Union[int, complex] = 1, extended: bool = False
           ) -> Tuple[Union[Fraction, complex], Union[Fraction, complex]]:
    """
    Eta invariants (eta_1, eta_2) of the two spin structures of the Z_p-manifold.

    eta_1 = (-2 chi / sqrt p) sum_{k=1}^{(p-1)/2} (k/p) cot(k pi/p) and
    eta_2 = (-2 chi / sqrt p) sum_{k=1}^{(p-1)/2} (-1)^k (k/p) csc(k pi/p).

    Parameters
    ----------
    p : int
        Prime p = 3 mod 4.
    chi : int or complex
        chi_rho(gamma) of the holonomy character.
    extended : bool
        Evaluate the trigonometric sums with mpmath.

    Returns
    -------
    (Fraction, Fraction)
        The invariants, rounded to thirds for p = 3 and to integers otherwise;
        multiplied by chi.

    Raises
    ------
    ValueError
        If p is not a prime = 3 mod 4.
    RuntimeError
        If a sum is not within the rounding residual of its rational value.
    """

    ZpManifold(p)
    raw1, raw2 = _raw_eta(p, extended)
    eta1, eta2 = _round_eta(raw1, p), _round_eta(raw2, p)
    if chi == 1:
        return eta1, eta2
    return eta1 * chi, eta2 * chi


def zp_series_terms(p: int, h: int, s: float) -> List[float]:
    """
    Per-k terms of the eta series of epsilon_h before the common factor.

    For h = 1 the k-th term is (k/p) sum_{l=1}^{p-1} sin(2 l pi k/p) zeta(s, l/p);
    for h = 2 it is (-1)^k (k/p) sum_{l=0}^{p-1} sin((2l+1) pi k/p) zeta(s, (2l+1)/(2p)).
    """

    manifold = ZpManifold(p)
    if h not in (1, 2):
        raise ValueError(f"Z_p-manifolds carry the spin structures 1 and 2, got {h}")
    if h == 1:
        zetas = [hurwitz_zeta(s, l / p) for l in range(1, p)]
    else:
        zetas = [hurwitz_zeta(s, (2 * l + 1) / (2 * p)) for l in range(p)]
    terms = []
    for k in range(1, manifold.p):
        if h == 1:
            inner = math.fsum(math.sin(2 * l * math.pi * k / p) * z for l, z in zip(range(1, p), zetas))
            terms.append(legendre(k, p) * inner)
        else:
            inner = math.fsum(math.sin((2 * l + 1) * math.pi * k / p) * z for l, z in zip(range(p), zetas))
            terms.append((-1) ** k * legendre(k, p) * inner)
    return terms


def zp_eta_series(p: int, h: int, s: float, chi: Union[int, complex] = 1) -> Union[float, complex]:
    """
    eta(s) of epsilon_h: -2 chi / (sqrt p (2 pi p)^s) times the sum of zp_series_terms.

    Raises
    ------
    ValueError
        If s = 1, or p, h are out of range.
    """

    if s == 1:
        raise ValueError("the Z_p eta series is evaluated through hurwitz_zeta, which has a pole at s = 1")
    total = math.fsum(zp_series_terms(p, h, s))
    value = -2 * total / (math.sqrt(p) * (2 * math.pi * p) ** s)
    return value * chi if chi != 1 else value


def symmetric_terms(p: int) -> pd.DataFrame:
    """
    The k and p-k terms of both eta sums at s = 0, one row per k <= (p-1)/2.
    """

    first = zp_series_terms(p, 1, 0.0)
    second = zp_series_terms(p, 2, 0.0)
    rows = []
    for k in range(1, (p - 1) // 2 + 1):
        rows.append({
            "k": k,
            "eps1_k": first[k - 1],
            "eps1_p_minus_k": first[p - k - 1],
            "eps2_k": second[k - 1],
            "eps2_p_minus_k": second[p - k - 1],
        })
    return pd.DataFrame(rows, columns=["k", "eps1_k", "eps1_p_minus_k", "eps2_k", "eps2_p_minus_k"])


def zp_harmonic(p: int, h: int = 1, extended: bool = False) -> int:
    """
    Harmonic spinors d_0(epsilon_h) of the Z_p-manifold.

    d_0(eps_1) = (1/p) sum_{k=0}^{p-1} chi_L(eps_1(gamma)^k), that is
    (2^m/p) sum_k (-1)^{(r+1)k} prod_{j=1}^m cos(j k pi/p); d_0(eps_2) = 0.

    Raises
    ------
    ValueError
        If p > 71 without extended precision.
    RuntimeError
        If the average is not within 1e-3 of an integer.
    """

    manifold = ZpManifold(p)
    if h not in (1, 2):
        raise ValueError(f"Z_p-manifolds carry the spin structures 1 and 2, got {h}")
    if h == 2:
        return 0
    m, r = manifold.m, manifold.r
    if extended:
        with mpmath.workdps(int(0.31 * m) + 30):
            total = mpmath.fsum(
                (-1) ** ((r + 1) * k) * mpmath.fprod(mpmath.cos(j * k * mpmath.pi / p) for j in range(1, m + 1))
                for k in range(p)
            )
            value = total * mpmath.mpf(2) ** m / p
            nearest = int(mpmath.nint(value))
            if abs(value - nearest) >= HARMONIC_RESIDUAL:
                raise RuntimeError(f"harmonic count {value} for p={p} is not an integer")
            return nearest
    if p > FLOAT_HARMONIC_LIMIT:
        raise ValueError(f"zp_harmonic in double precision is limited to p <= {FLOAT_HARMONIC_LIMIT}, got {p}")
    x, _ = manifold.spin_structure(1)
    total = 0
    for k in range(p):
        total = add_number(total, spin_character(x.power(k), "full"))
    value = complex(total) / p
    return to_integer(value, HARMONIC_RESIDUAL)


def _zp_row(p: int, extended: bool) -> dict:
    eta1, eta2 = zp_eta(p, extended=extended)
    d0 = zp_harmonic(p, extended=extended) if (extended or p <= FLOAT_HARMONIC_LIMIT) else pd.NA
    return {"r": (p - 3) // 4, "p": p, "eta_eps1": str(eta1), "eta_eps2": str(eta2), "d0_eps1": d0}


def zp_table(p_max: int, settings: Optional[Settings] = None, extended: Optional[bool] = None) -> pd.DataFrame:
    """
    Eta invariants and harmonic spinors for every prime p = 3 mod 4 up to p_max.

    Parameters
    ----------
    p_max : int
        Largest prime considered.
    settings : Settings, optional
        Thread count and the extended precision default.
    extended : bool, optional
        Overrides settings.extended_precision.

    Returns
    -------
    pd.DataFrame
        Columns r, p, eta_eps1, eta_eps2 (as exact strings) and d0_eps1
        (missing beyond p = 71 unless extended precision is on), in order of p.
    """

    settings = settings or Settings()
    extended = settings.extended_precision if extended is None else extended
    primes = [p for p in range(3, p_max + 1) if p % 4 == 3 and _is_prime(p)]
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        rows = list(pool.map(lambda p: _zp_row(p, extended), primes))
    table = pd.DataFrame(rows, columns=["r", "p", "eta_eps1", "eta_eps2", "d0_eps1"])
    table["d0_eps1"] = table["d0_eps1"].astype("Int64")
    logger.info(f"Z_p table up to p={p_max}: {len(table)} rows")
    return table
