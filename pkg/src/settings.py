import logging
import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    """
    Engine-wide limits and defaults.

    Attributes
    ----------
    max_four_mu_sq : int
        Default shell cap (largest key 4*mu^2) for spectrum tables.
    four_mu_sq_budget : int
        Hard cap for any theta table request.
    enumeration_budget : int
        Largest number of explicitly enumerated lattice points per request.
    length_cap : int
        Default squared-length cap for length spectra.
    max_spin_structures : int
        Largest number of spin structures that will be listed explicitly.
    oracle_max_dim : int
        Largest dimension accepted by the matrix oracle.
    oracle_tolerance : float
        Residual allowed when rounding oracle traces to integers.
    threads : int
        Worker threads used for fan-out over shells and primes.
    extended_precision : bool
        Evaluate the Z_p harmonic spinor count with mpmath beyond p = 71.
    """

    max_four_mu_sq: int = 100
    four_mu_sq_budget: int = 400
    enumeration_budget: int = 200000
    length_cap: int = 25
    max_spin_structures: int = 65536
    oracle_max_dim: int = 8
    oracle_tolerance: float = 1e-6
    threads: int = 1
    extended_precision: bool = False


def _read_int(environ: Mapping[str, str], name: str, default: int) -> int:
    raw = environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Build the settings object, applying environment overrides.

    Parameters
    ----------
    environ : Mapping[str, str], optional
        Environment to read. Defaults to os.environ.

    Returns
    -------
    Settings
        Defaults with FLATDIRAC_THREADS, FLATDIRAC_MAX_4MU2 and
        FLATDIRAC_EXTENDED_PRECISION applied.

    Raises
    ------
    ValueError
        If an override is not a positive integer.
    """

    environ = os.environ if environ is None else environ
    settings = Settings()
    threads = _read_int(environ, "FLATDIRAC_THREADS", settings.threads)
    max_key = _read_int(environ, "FLATDIRAC_MAX_4MU2", settings.max_four_mu_sq)
    if max_key > settings.four_mu_sq_budget:
        logger.warning(f"FLATDIRAC_MAX_4MU2={max_key} exceeds the budget {settings.four_mu_sq_budget}, clamping")
        max_key = settings.four_mu_sq_budget
    extended = environ.get("FLATDIRAC_EXTENDED_PRECISION", "").lower() in ("1", "true", "yes")

    return replace(settings, threads=threads, max_four_mu_sq=max_key, extended_precision=extended)
