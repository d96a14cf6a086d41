from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from scipy.special import bernoulli, loggamma

from src.dirac_spectrum import DiracSpectrum, HolonomyCharacter, SpectrumTable
from src.flat_manifold import BieberbachGroup
from src.settings import Settings
from src.spin_structures import SpinStructure


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)

# B_2, B_4, ..., B_16
_BERNOULLI_EVEN = [float(b) for b in bernoulli(16)[2::2]]
_SHIFT_TARGET = 20.0


def hurwitz_zeta(s: float, a: float) -> float:
    """
    Hurwitz zeta function zeta(s, a) = sum_{j >= 0} (j + a)^{-s}.

    The first N terms are summed directly with N chosen so that N + a >= 20,
    and the remainder is given by the Euler-Maclaurin formula with eight
    Bernoulli corrections.

    Parameters
    ----------
    s : float
        Exponent, s != 1.
    a : float
        Shift, a > 0.

    Returns
    -------
    float
        zeta(s, a); exactly 1/2 - a at s = 0.

    Raises
    ------
    ValueError
        If s = 1 (pole) or a <= 0.
    """

    if s == 1:
        raise ValueError("hurwitz_zeta has a pole at s = 1")
    if a <= 0:
        raise ValueError(f"hurwitz_zeta needs a > 0, got {a}")
    if s == 0:
        return 0.5 - a

    N = max(0, math.ceil(_SHIFT_TARGET - a))
    head = math.fsum((j + a) ** (-s) for j in range(N))
    x = N + a
    tail = x ** (1 - s) / (s - 1) + 0.5 * x ** (-s)
    rising = s  # s (s+1) ... (s+2k-2)
    power = x ** (-s - 1)
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        tail += b / math.factorial(2 * k) * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= x * x
    return head + tail


def hurwitz_zeta_derivative_at_zero(a: float) -> float:
    """d/ds zeta(s, a) at s = 0, equal to log Gamma(a) - log(2 pi) / 2."""
    if a <= 0:
        raise ValueError(f"hurwitz_zeta_derivative_at_zero needs a > 0, got {a}")
    return float(loggamma(a)) - 0.5 * math.log(2 * math.pi)


def quarter_difference(s: float) -> float:
    """zeta(s, 1/4) - zeta(s, 3/4); pi at s = 1 where both poles cancel."""
    if s == 1:
        return math.pi
    return hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75)


@dataclass
class EtaReport:
    """
    Eta invariant of a twisted Dirac operator.

    Attributes
    ----------
    eta_at_0 : Fraction or complex
        eta(0); exact when chi_rho(gamma) is an integer.
    eta_prime_at_0 : float
        eta'(0).
    samples : list of (float, float)
        (s, eta(s)) for the requested sample points.
    identically_zero : bool
        True when the spectrum is symmetric.
    d0 : int
        Harmonic spinors.
    """

    eta_at_0: Union[Fraction, complex] = Fraction(0)
    eta_prime_at_0: float = 0.0
    samples: List[Tuple[float, Union[float, complex]]] = field(default_factory=list)
    identically_zero: bool = True
    d0: int = 0

    @property
    def xi(self) -> Union[Fraction, complex]:
        """(eta(0) + d_0) / 2."""
        return (self.eta_at_0 + self.d0) / 2

    def to_json(self) -> dict:
        return {
            "eta0": str(self.eta_at_0),
            "eta_prime0": self.eta_prime_at_0,
            "samples": [[s, v if isinstance(v, float) else str(v)] for s, v in self.samples],
            "identically_zero": self.identically_zero,
            "d0": self.d0,
            "xi": str(self.xi),
        }


class EtaCalculator:
    """
    Eta series and eta invariants from closed forms and from spectrum tables.

    Attributes
    ----------
    spectra : DiracSpectrum
        Spectrum engine used for asymmetry data and multiplicities.
    logger : logging.Logger
        Logger for logging messages.

    Methods
    -------
    eta_z2k(group, eps, rho, sample_s) -> EtaReport
    eta_partial_sum(table, s, tail_terms) -> float
    eta_general_partial_sum(group, eps, rho, s, max_key) -> float
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or Settings()
        self.spectra = DiracSpectrum(self.settings)
        self.logger = logging.getLogger(__name__)

    def eta_z2k(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
                sample_s: Sequence[float] = ()) -> EtaReport:
        """
        Closed-form eta series of a Z_2^k-manifold.

        eta(s) = A 2^{m-k+1} (|f| / 4 pi)^s (zeta(s, 1/4) - zeta(s, 3/4)) with
        A = (-1)^r sigma_gamma chi_rho(gamma), so eta(0) = A 2^{m-k} and
        eta'(0) = eta(0) (4 log Gamma(1/4) + log|f| - 3 log 2 pi).

        Parameters
        ----------
        group : BieberbachGroup
            Group with holonomy Z_2^k.
        eps : SpinStructure
            Spin structure.
        rho : HolonomyCharacter, optional
            Holonomy character, trivial by default.
        sample_s : list of float
            Points where eta(s) is evaluated.

        Returns
        -------
        EtaReport
            The report; identically zero when no asymmetric coset exists.

        Raises
        ------
        ValueError
            If the holonomy is not Z_2^k.
        """

        if not group.is_z2k:
            raise ValueError(f"{group.name or 'group'} does not have holonomy Z_2^k")
        rho = rho or HolonomyCharacter.trivial(group)
        report = EtaReport(d0=self.spectra.harmonic_spinors(group, eps, rho))
        data = self.spectra.asymmetry_data(group, eps, rho)
        if data is None:
            report.samples = [(float(s), 0.0) for s in sample_s]
            self.logger.info(f"Eta series of {group.name or 'group'} vanishes identically")
            return report

        sign = -1 if data.r % 2 else 1
        amplitude = sign * data.sigma * data.chi
        eta0 = amplitude * data.scale
        if not isinstance(eta0, Fraction):
            eta0 = complex(eta0)
        log_f = 0.5 * math.log(data.f_norm_sq)
        derivative = 4 * float(loggamma(0.25)) + log_f - 3 * math.log(2 * math.pi)

        report.identically_zero = False
        report.eta_at_0 = eta0
        report.eta_prime_at_0 = _real_or_complex(complex(eta0) * derivative)
        for s in sample_s:
            s = float(s)
            if s == 0:
                value = complex(eta0)
            else:
                factor = (math.sqrt(data.f_norm_sq) / (4 * math.pi)) ** s
                value = complex(amplitude) * float(2 * data.scale) * factor * quarter_difference(s)
            report.samples.append((s, _real_or_complex(value)))
        self.logger.info(f"Eta invariant of {group.name or 'group'}, delta={eps.delta}: {eta0}")
        return report

    def eta_partial_sum(self, table: SpectrumTable, s: float, tail_terms: int = 0) -> float:
        """
        sum (d+ - d-) / (2 pi mu)^s over the table, plus tail_terms terms of the
        asymmetric progression beyond the table cap.

        Raises
        ------
        ValueError
            If s <= 1, or a tail is requested for an asymmetric table without
            asymmetry data.
        """

        if s <= 1:
            raise ValueError(f"eta partial sums need s > 1, got {s}")
        if not table.asymmetric:
            return 0.0
        if tail_terms and table.asymmetry is None:
            raise ValueError("asymmetric table carries no asymmetry data for the tail")
        total = 0.0
        for key, (d_plus, d_minus) in sorted(table.entries.items()):
            if d_plus != d_minus:
                total += (d_plus - d_minus) / (math.pi * math.sqrt(key)) ** s
        if tail_terms:
            data = table.asymmetry
            j = 0
            while data.key(j) <= table.max_key:
                j += 1
            amplitude = 2 * float(data.scale) * complex(data.sigma * data.chi).real
            for jj in range(j, j + tail_terms):
                sign = -1 if (data.r + jj) % 2 else 1
                total += sign * amplitude / (math.pi * math.sqrt(float(data.key(jj)))) ** s
        return total

    def eta_general_partial_sum(self, group: BieberbachGroup, eps: SpinStructure,
                                rho: Optional[HolonomyCharacter] = None, s: float = 5.0,
                                max_key: Optional[int] = None) -> float:
        """Truncated eta series through eta_difference on every shell up to max_key."""
        if s <= 1:
            raise ValueError(f"eta partial sums need s > 1, got {s}")
        if group.n % 2 == 0:
            return 0.0
        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        keys = sorted(self.spectra._shell_keys(group, eps, max_key))
        total = 0.0
        for key in keys:
            diff = self.spectra.eta_difference(group, eps, rho, key)
            if diff:
                total += diff / (math.pi * math.sqrt(key)) ** s
        return total


def _real_or_complex(z: complex) -> Union[float, complex]:
    if abs(z.imag) < 1e-15:
        return float(z.real)
    return z


def eta_z2k(group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
            sample_s: Sequence[float] = (), settings: Optional[Settings] = None) -> EtaReport:
    return EtaCalculator(settings).eta_z2k(group, eps, rho, sample_s)


def eta_partial_sum(table: SpectrumTable, s: float, tail_terms: int = 0) -> float:
    return EtaCalculator().eta_partial_sum(table, s, tail_terms)
