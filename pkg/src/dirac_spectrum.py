from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from src.clifford import (
    CliffordElement,
    TorusAngles,
    clifford_sigma,
    clifford_trace,
    spin_character,
    torus_angles_of,
)
from src.flat_manifold import BieberbachGroup, ShellEnumerator, Vector
from src.quadratic_field import ComplexQSqrt2, add_number, mul_number, to_integer
from src.settings import Settings
from src.spin_oracle import SpinOracle
from src.spin_structures import SpinStructure, torus_structure


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

SigmaProvider = Callable[[Vector, TorusAngles, CliffordElement], int]


class HolonomyCharacter:
    """
    Character of a representation rho of the holonomy group, rho trivial on the lattice.

    Attributes
    ----------
    dimension : int
        d_rho.
    values : tuple
        chi_rho on every coset, in coset order (ints kept exact).
    """

    def __init__(self, dimension: int, values: Sequence[Union[int, complex]]) -> None:
        if dimension < 1:
            raise ValueError(f"character dimension must be positive, got {dimension}")
        values = tuple(_clean(v) for v in values)
        if not values or values[0] != dimension:
            raise ValueError(f"chi_rho(Id) must equal the dimension {dimension}")
        self.dimension = dimension
        self.values = values

    def __repr__(self) -> str:
        return f"HolonomyCharacter(dimension={self.dimension}, values={self.values})"

    def value(self, i: int) -> Union[int, complex]:
        return self.values[i]

    @classmethod
    def trivial(cls, group: BieberbachGroup, dimension: int = 1) -> HolonomyCharacter:
        return cls(dimension, [dimension] * group.order)

    @classmethod
    def from_mapping(cls, group: BieberbachGroup, mapping: Dict[int, Union[int, complex]]) -> HolonomyCharacter:
        values = [mapping.get(i, 0) for i in range(group.order)]
        return cls(int(abs(values[0])), values)

    @classmethod
    def from_generator_values(cls, group: BieberbachGroup, gen_values: Sequence[Union[int, complex]]) -> HolonomyCharacter:
        """
        One-dimensional character fixed by its values on the generators.

        Raises
        ------
        ValueError
            If the values do not define a homomorphism.
        """

        if len(gen_values) != len(group.generators):
            raise ValueError(f"{len(gen_values)} values for {len(group.generators)} generators")
        values: Dict[int, Union[int, complex]] = {0: 1}
        frontier = [0]
        gen_cosets = [group.index(g.matrix) for g in group.generators]
        while frontier:
            i = frontier.pop()
            for g, v in zip(gen_cosets, gen_values):
                k, _ = group.multiply(i, g)
                value = _clean(values[i] * v)
                if k not in values:
                    values[k] = value
                    frontier.append(k)
                elif abs(complex(values[k]) - complex(value)) > 1e-12:
                    raise ValueError(f"generator values {list(gen_values)} do not define a character")
        return cls(1, [values[i] for i in range(group.order)])

    @classmethod
    def from_file(cls, group: BieberbachGroup, path: Union[str, Path]) -> HolonomyCharacter:
        """
        Read {"generator_values": [...]} or {"dimension": d, "values": [...]}.

        Complex values may be given as strings such as "1j" or "-1".
        """

        with open(path) as f:
            data = json.load(f)
        if "generator_values" in data:
            return cls.from_generator_values(group, [_parse(v) for v in data["generator_values"]])
        return cls(int(data["dimension"]), [_parse(v) for v in data["values"]])

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "values": [str(v) for v in self.values]}


def _parse(v) -> Union[int, complex]:
    return _clean(complex(v) if isinstance(v, str) else v)


def _clean(v) -> Union[int, complex]:
    if isinstance(v, int):
        return v
    z = complex(v)
    if abs(z.imag) < 1e-12 and abs(z.real - round(z.real)) < 1e-12:
        return int(round(z.real))
    return z


@dataclass
class AsymmetryData:
    """
    Data of the asymmetric coset gamma = B L_b.

    Attributes
    ----------
    coset : int
        Coset index of gamma.
    f : tuple of int
        Generator of Lambda^B = Z f.
    sigma : int
        sigma_gamma.
    chi : int or complex
        chi_rho(gamma).
    r : int
        n = 4r + 3.
    scale : Fraction
        2^{m-k}.
    """

    coset: int
    f: Tuple[int, ...]
    sigma: int
    chi: Union[int, complex]
    r: int
    scale: Fraction = Fraction(1)

    @property
    def f_norm_sq(self) -> int:
        return sum(x * x for x in self.f)

    def key(self, j: int) -> Fraction:
        """4 mu_j^2 with mu_j = (j + 1/2)/|f|."""
        return Fraction((2 * j + 1) ** 2, self.f_norm_sq)


@dataclass
class SpectrumTable:
    """
    Dirac multiplicities keyed by 4 mu^2.

    Attributes
    ----------
    entries : dict
        key -> (d+, d-), nonzero shells only.
    d0 : int
        Harmonic spinors.
    d0_plus, d0_minus : int, optional
        Chiral harmonic spinors for n even.
    asymmetry : AsymmetryData, optional
        Present when the Z_2^k asymmetry conditions hold.
    """

    n: int
    entries: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    d0: int = 0
    d0_plus: Optional[int] = None
    d0_minus: Optional[int] = None
    asymmetry: Optional[AsymmetryData] = None
    max_key: int = 0

    @property
    def asymmetric(self) -> bool:
        return any(p != m for p, m in self.entries.values())

    def laplacian(self) -> Dict[int, int]:
        return {key: p + m for key, (p, m) in sorted(self.entries.items())}

    def to_json(self) -> dict:
        return {
            "entries": [{"four_mu_sq": k, "d_plus": p, "d_minus": m} for k, (p, m) in sorted(self.entries.items())],
            "d0": self.d0,
            "asymmetric": self.asymmetric,
        }


class DiracSpectrum:
    """
    Twisted Dirac multiplicities on flat spin manifolds.

    Attributes
    ----------
    settings : Settings
        Engine limits.
    enumerator : ShellEnumerator
        Shell and phase-sum enumeration.
    oracle : SpinOracle
        Matrix oracle, used for sigma signs when n fits.
    logger : logging.Logger
        Logger for logging messages.

    Methods
    -------
    torus_spectrum(eps, rho, max_key) -> SpectrumTable
    z2k_spectrum(group, eps, rho, max_key) -> SpectrumTable
    general_multiplicity(group, eps, rho, key, sigma_provider) -> (int, int)
    harmonic_spinors(group, eps, rho) -> int
    spinor_laplacian_spectrum(group, eps, rho, max_key) -> dict
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or Settings()
        self.enumerator = ShellEnumerator(self.settings)
        self.oracle = SpinOracle(self.settings)
        self.logger = logging.getLogger(__name__)

    def default_sigma_provider(self, n: int) -> SigmaProvider:
        if n <= self.settings.oracle_max_dim:
            return self.oracle.sigma_sign
        return clifford_sigma

    def _shell_keys(self, group: BieberbachGroup, eps: SpinStructure, max_key: int) -> Dict[int, int]:
        table = self.enumerator.theta_table(group, eps.delta, max_key)
        return {shell.key: shell.count for shell in table if shell.key > 0}

    def torus_spectrum(self, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
                       max_key: Optional[int] = None) -> SpectrumTable:
        """
        Multiplicities 2^{m-1} d_rho |Lambda*_{eps,mu}| on the torus Z^n.

        Raises
        ------
        ValueError
            If the structure lives on a group with holonomy.
        """

        group = eps.group
        if group.order != 1:
            raise ValueError(f"torus_spectrum needs a torus, got |F|={group.order}")
        rho = rho or HolonomyCharacter.trivial(group)
        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        n, m = group.n, group.n // 2
        table = SpectrumTable(n=n, max_key=max_key)
        for key, count in self._shell_keys(group, eps, max_key).items():
            d = to_integer(Fraction(2 ** m, 2) * rho.dimension * count)
            table.entries[key] = (d, d)
        table.d0 = 2 ** m * rho.dimension if eps.trivial_type else 0
        if n % 2 == 0:
            table.d0_plus = table.d0_minus = table.d0 // 2
        self.logger.info(f"Torus spectrum n={n}, delta={eps.delta}: {len(table.entries)} shells")
        return table

    def asymmetry_data(self, group: BieberbachGroup, eps: SpinStructure, rho: HolonomyCharacter,
                       sigma_provider: Optional[SigmaProvider] = None) -> Optional[AsymmetryData]:
        """
        The coset gamma with n = 4r+3, n_B = 1, chi_rho(gamma) != 0 and B e_i = e_i exactly when delta_i = -1.

        Raises
        ------
        RuntimeError
            If an F_1 element is not diagonal.
        """

        n = group.n
        if n % 4 != 3:
            return None
        sigma_provider = sigma_provider or self.default_sigma_provider(n)
        for g in group.f1_indices():
            rep = group.cosets[g]
            B = rep.matrix
            if not B.is_diagonal():
                raise RuntimeError(f"F_1 element {B} is not diagonal")
            chi = rho.value(g)
            if chi == 0:
                continue
            if any((B.signs[i] == 1) != (eps.delta[i] == -1) for i in range(n)):
                continue
            i0 = B.signs.index(1)
            f = tuple(1 if i == i0 else 0 for i in range(n))
            lift = eps.coset_lifts[g]
            x = torus_angles_of(lift, B)
            sigma = sigma_provider(f, x, lift)
            return AsymmetryData(coset=g, f=f, sigma=sigma, chi=chi, r=(n - 3) // 4,
                                 scale=Fraction(2 ** (n // 2), 2 ** group.k) if group.is_z2k else Fraction(1))
        return None

    def z2k_spectrum(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
                     max_key: Optional[int] = None) -> SpectrumTable:
        """
        Multiplicities for holonomy Z_2^k.

        Symmetric shells carry 2^{m-k-1} d_rho |Lambda*_{eps,mu}|; on the
        asymmetric progression 4 mu_j^2 = (2j+1)^2 / |f|^2 the multiplicities
        are 2^{m-k-1}(d_rho |Lambda*| +- 2 sigma_gamma (-1)^{r+j} chi_rho(gamma)).

        Raises
        ------
        ValueError
            If the holonomy is not Z_2^k.
        RuntimeError
            If some multiplicity is not a non-negative integer.
        """

        if not group.is_z2k:
            raise ValueError(f"{group.name or 'group'} does not have holonomy Z_2^k")
        rho = rho or HolonomyCharacter.trivial(group)
        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        n, m, k = group.n, group.n // 2, group.k
        base_scale = Fraction(2 ** m, 2 ** (k + 1))
        table = SpectrumTable(n=n, max_key=max_key)
        table.asymmetry = self.asymmetry_data(group, eps, rho)

        corrections: Dict[int, Union[int, complex]] = {}
        if table.asymmetry is not None:
            a = table.asymmetry
            j = 0
            while a.key(j) <= max_key:
                key = a.key(j)
                if key.denominator == 1:
                    sign = -1 if (a.r + j) % 2 else 1
                    corrections[int(key)] = 2 * a.sigma * sign * a.chi
                j += 1

        for key, count in self._shell_keys(group, eps, max_key).items():
            corr = corrections.get(key, 0)
            d_plus = to_integer(mul_number(add_number(rho.dimension * count, corr), base_scale))
            d_minus = to_integer(mul_number(add_number(rho.dimension * count, -corr), base_scale))
            if d_plus < 0 or d_minus < 0:
                raise RuntimeError(f"negative multiplicity at key {key}: count {count}, correction {corr}")
            table.entries[key] = (d_plus, d_minus)

        self._fill_harmonic(table, group, eps, rho)
        self.logger.info(
            f"Z_2^{k} spectrum for {group.name or 'group'}, delta={eps.delta}: {len(table.entries)} shells, "
            f"asymmetric={table.asymmetric}"
        )
        return table

    def _coset_term(self, group: BieberbachGroup, eps: SpinStructure, g: int, key: int,
                    sigma_provider: SigmaProvider) -> Tuple[Union[ComplexQSqrt2, complex], Union[ComplexQSqrt2, complex]]:
        """sum_u exp(-2 pi i u.b) tr L(eps(gamma))|_{S_u^+-} for one coset."""
        rep = group.cosets[g]
        lift = eps.coset_lifts[g]
        n = group.n
        count, phase_sum = self.enumerator.count_shifted_shell(group, eps.delta, rep, key)
        if count == 0:
            zero = ComplexQSqrt2(0)
            return zero, zero
        x = torus_angles_of(lift, rep.matrix)
        if n % 2 == 0:
            inner = _drop_zero_angle(x)
            half = spin_character(inner, "full")
            term = mul_number(half, phase_sum)
            return term, term

        inner = x.restricted()
        chi_plus = spin_character(inner, "plus")
        chi_minus = spin_character(inner, "minus")
        mean = mul_number(add_number(chi_plus, chi_minus), Fraction(1, 2))
        diff = mul_number(add_number(chi_plus, mul_number(chi_minus, -1)), Fraction(1, 2))
        symmetric = mul_number(mean, phase_sum)
        if rep.matrix.fixed_dim() != 1:
            return symmetric, symmetric
        _, signed_sum = self.enumerator.count_shifted_shell(
            group, eps.delta, rep, key, sign_fn=lambda u: sigma_provider(u, x, lift)
        )
        skew = mul_number(diff, signed_sum)
        return add_number(symmetric, skew), add_number(symmetric, mul_number(skew, -1))

    def general_multiplicity(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter],
                             key: int, sigma_provider: Optional[SigmaProvider] = None) -> Tuple[int, int]:
        """
        Multiplicities (d+, d-) of the eigenvalue 2 pi mu, key = 4 mu^2 > 0.

        d^{+-} = (1/|F|) sum_gamma chi_rho(gamma) sum_{u in (Lambda*_{eps,mu})^B}
        exp(-2 pi i u.b) chi(u, gamma)^{+-}, where chi(u, gamma)^{+-} is half the
        spin character of x_gamma in Spin(n-1) for n even or for n_B > 1, and the
        half-spin character chi^{+-sigma(u, x_gamma)} on F_1 cosets for n odd.

        Raises
        ------
        ValueError
            If key <= 0.
        RuntimeError
            If a multiplicity is not a non-negative integer.
        """

        if key <= 0:
            raise ValueError(f"general_multiplicity needs a positive key, got {key}")
        rho = rho or HolonomyCharacter.trivial(group)
        sigma_provider = sigma_provider or self.default_sigma_provider(group.n)
        plus, minus = ComplexQSqrt2(0), ComplexQSqrt2(0)
        for g in range(group.order):
            chi = rho.value(g)
            if chi == 0:
                continue
            tp, tm = self._coset_term(group, eps, g, key, sigma_provider)
            plus = add_number(plus, mul_number(chi, tp))
            minus = add_number(minus, mul_number(chi, tm))
        scale = Fraction(1, group.order)
        d_plus = to_integer(mul_number(plus, scale), self.settings.oracle_tolerance)
        d_minus = to_integer(mul_number(minus, scale), self.settings.oracle_tolerance)
        if d_plus < 0 or d_minus < 0:
            raise RuntimeError(f"negative multiplicity ({d_plus}, {d_minus}) at key {key}")
        return d_plus, d_minus

    def eta_difference(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter],
                       key: int, sigma_provider: Optional[SigmaProvider] = None) -> int:
        """
        d+ - d- from the F_1 cosets alone: (1/|F|) sum chi_rho (chi^+ - chi^-) sum_u sigma(u) exp(-2 pi i u.b).

        Zero for n even.
        """

        if group.n % 2 == 0:
            return 0
        rho = rho or HolonomyCharacter.trivial(group)
        sigma_provider = sigma_provider or self.default_sigma_provider(group.n)
        total = ComplexQSqrt2(0)
        for g in group.f1_indices():
            chi = rho.value(g)
            if chi == 0:
                continue
            rep, lift = group.cosets[g], eps.coset_lifts[g]
            x = torus_angles_of(lift, rep.matrix)
            inner = x.restricted()
            gap = add_number(spin_character(inner, "plus"), mul_number(spin_character(inner, "minus"), -1))
            _, signed_sum = self.enumerator.count_shifted_shell(
                group, eps.delta, rep, key, sign_fn=lambda u: sigma_provider(u, x, lift)
            )
            total = add_number(total, mul_number(chi, mul_number(gap, signed_sum)))
        return to_integer(mul_number(total, Fraction(1, group.order)), self.settings.oracle_tolerance)

    def _fill_harmonic(self, table: SpectrumTable, group: BieberbachGroup, eps: SpinStructure,
                       rho: HolonomyCharacter) -> None:
        table.d0 = self.harmonic_spinors(group, eps, rho)
        if group.n % 2 == 0:
            if eps.trivial_type:
                table.d0_plus, table.d0_minus = self.chiral_harmonic_spinors(group, eps, rho)
            else:
                table.d0_plus = table.d0_minus = 0

    def harmonic_spinors(self, group: BieberbachGroup, eps: SpinStructure,
                         rho: Optional[HolonomyCharacter] = None) -> int:
        """
        d_0 = (1/|F|) sum chi_rho(gamma) chi_{L_n}(x_gamma) when delta is trivial, else 0.
        """

        if not eps.trivial_type:
            return 0
        rho = rho or HolonomyCharacter.trivial(group)
        total = ComplexQSqrt2(0)
        for g, rep in enumerate(group.cosets):
            chi = rho.value(g)
            if chi == 0:
                continue
            x = torus_angles_of(eps.coset_lifts[g], rep.matrix)
            total = add_number(total, mul_number(chi, spin_character(x, "full")))
        return to_integer(mul_number(total, Fraction(1, group.order)), self.settings.oracle_tolerance)

    def chiral_harmonic_spinors(self, group: BieberbachGroup, eps: SpinStructure,
                                rho: Optional[HolonomyCharacter] = None) -> Tuple[int, int]:
        """(d_0^+, d_0^-) for n even from the exact half-spin traces."""
        if group.n % 2:
            raise ValueError("chiral harmonic spinors need n even")
        if not eps.trivial_type:
            return 0, 0
        rho = rho or HolonomyCharacter.trivial(group)
        out = []
        for which in ("plus", "minus"):
            total = ComplexQSqrt2(0)
            for g in range(group.order):
                total = add_number(total, mul_number(rho.value(g), clifford_trace(eps.coset_lifts[g], which)))
            out.append(to_integer(mul_number(total, Fraction(1, group.order)), self.settings.oracle_tolerance))
        return out[0], out[1]

    def general_spectrum(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
                         max_key: Optional[int] = None, sigma_provider: Optional[SigmaProvider] = None
                         ) -> SpectrumTable:
        """Spectrum table through general_multiplicity, fanned out over shells."""
        rho = rho or HolonomyCharacter.trivial(group)
        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        table = SpectrumTable(n=group.n, max_key=max_key)
        keys = sorted(self._shell_keys(group, eps, max_key))
        with ThreadPoolExecutor(max_workers=self.settings.threads) as pool:
            results = list(pool.map(
                lambda key: self.general_multiplicity(group, eps, rho, key, sigma_provider), keys
            ))
        for key, pair in zip(keys, results):
            if pair != (0, 0):
                table.entries[key] = pair
        self._fill_harmonic(table, group, eps, rho)
        self.logger.info(f"General spectrum for {group.name or 'group'}: {len(table.entries)} shells")
        return table

    def spectrum(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
                 max_key: Optional[int] = None) -> SpectrumTable:
        """Dispatch to the torus, Z_2^k or general path."""
        if group.order == 1:
            return self.torus_spectrum(eps, rho, max_key)
        if group.is_z2k:
            return self.z2k_spectrum(group, eps, rho, max_key)
        return self.general_spectrum(group, eps, rho, max_key)

    def spinor_laplacian_spectrum(self, group: BieberbachGroup, eps: SpinStructure,
                                  rho: Optional[HolonomyCharacter] = None,
                                  max_key: Optional[int] = None) -> Dict[int, int]:
        """Multiplicity d+ + d- of the eigenvalue 4 pi^2 mu^2 of the spinor Laplacian."""
        return self.spectrum(group, eps, rho, max_key).laplacian()

    def covering_torus_spectrum(self, group: BieberbachGroup, eps: SpinStructure,
                                rho: Optional[HolonomyCharacter] = None,
                                max_key: Optional[int] = None) -> SpectrumTable:
        """Spectrum of the covering torus with the restricted structure delta."""
        dimension = rho.dimension if rho is not None else 1
        torus_eps = torus_structure(group.n, eps.delta)
        return self.torus_spectrum(torus_eps, HolonomyCharacter(dimension, [dimension]), max_key)

    def cross_check(self, group: BieberbachGroup, eps: SpinStructure, rho: Optional[HolonomyCharacter] = None,
                    max_key: int = 40) -> List[Tuple[int, Tuple[int, int], Tuple[int, int]]]:
        """
        Formula multiplicities against the matrix oracle: (key, formula, oracle) per shell.
        """

        rho = rho or HolonomyCharacter.trivial(group)
        table = self.spectrum(group, eps, rho, max_key)
        keys = sorted(self._shell_keys(group, eps, max_key))
        oracle = self.oracle.brute_spectrum(group, eps, rho, keys)
        rows = [(key, table.entries.get(key, (0, 0)), oracle[key]) for key in keys]
        mismatches = [row for row in rows if row[1] != row[2]]
        if mismatches:
            self.logger.warning(f"Oracle mismatch on {len(mismatches)} shells: {mismatches[:3]}")
        return rows


def _drop_zero_angle(x: TorusAngles) -> TorusAngles:
    """x viewed in Spin(n-1) for n even, dropping one zero angle (the direction of u)."""
    angles = list(x.angles)
    if 0 in angles:
        angles.remove(0)
    else:
        raise RuntimeError(f"{x} fixes no vector")
    return TorusAngles(x.n - 1, angles, x.sign)
