from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from src.dirac_spectrum import DiracSpectrum, HolonomyCharacter
from src.families import example44_gamma, example44_gamma_prime, mjh_group, table2_group, z2_spin_structure
from src.flat_manifold import AffineGen, BieberbachGroup
from src.hodge_laplace import HodgeSpectrum
from src.settings import Settings
from src.spin_structures import SpinStructure, SpinStructureSolver


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

SPECTRAL_KINDS = ("dirac", "spinor_laplacian", "functions", "pform")

TABLE_COLUMNS = ("D", "Delta_s", "Delta_p", "[L]", "L")

# published verdicts per row, in TABLE_COLUMNS order
REFERENCE_VERDICTS: Dict[str, Tuple[str, ...]] = {
    "4.3 (i)": ("Yes", "Yes", "No", "No", "No"),
    "4.3 (iii)": ("Yes", "Yes", "Yes (p odd)", "No", "No"),
    "4.4 (i)": ("No", "Yes", "No", "No", "No"),
    "4.5 (i)": ("Yes/No", "Yes/No", "Yes", "Yes", "Yes"),
    "4.5 (ii)": ("Yes/No", "Yes/No", "Yes", "No", "Yes"),
}

ClassKey = Tuple[int, Tuple[int, ...], Tuple[int, ...]]


@dataclass
class Verdict:
    """
    Outcome of one spectral comparison.

    Attributes
    ----------
    kind : str
        Spectrum compared.
    equal : bool
        True when the spectra agree up to the cap.
    cap : Fraction
        Largest key (4 mu^2 or squared length) examined.
    certificate : Fraction, optional
        First key where the spectra differ.
    """

    kind: str
    equal: bool
    cap: Fraction
    certificate: Optional[Fraction] = None

    @property
    def bounded(self) -> bool:
        """
        True for a "Yes": agreement is only established up to the cap.

        A "No" carries a certificate key and holds without a bound.
        """
        return self.equal

    @property
    def label(self) -> str:
        return "Yes" if self.equal else "No"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "equal": self.equal,
            "bounded": self.bounded,
            "cap": str(self.cap),
            "certificate": None if self.certificate is None else str(self.certificate),
        }


def first_difference(a: Dict, b: Dict) -> Optional[Fraction]:
    """Smallest key whose values differ between two spectra (missing keys count as empty)."""
    for key in sorted(set(a) | set(b)):
        if a.get(key) != b.get(key):
            return Fraction(key)
    return None


@dataclass
class LengthSpectrum:
    """
    Closed geodesic lengths up to a cap.

    Attributes
    ----------
    cap : Fraction
        Largest squared length.
    weak : list of Fraction
        Distinct squared lengths.
    marked : dict, optional
        Squared length -> number of conjugacy classes.
    """

    cap: Fraction
    weak: List[Fraction] = field(default_factory=list)
    marked: Optional[Dict[Fraction, int]] = None

    def to_json(self) -> dict:
        out = {"cap": str(self.cap), "weak": [str(x) for x in self.weak]}
        if self.marked is not None:
            out["marked"] = [[str(k), v] for k, v in sorted(self.marked.items())]
        return out


def _cycle_data(rep: AffineGen) -> List[Tuple[Tuple[int, ...], int, List[int], Fraction]]:
    """(cycle, sign, fixed-vector coefficients, v.b) for every cycle of B."""
    B = rep.matrix
    out = []
    for cycle, sign in B.cycles():
        coeffs, a = [], 1
        for c in cycle:
            coeffs.append(a)
            a *= B.signs[c]
        vb = sum(coef * rep.translation[c] for coef, c in zip(coeffs, cycle))
        out.append((cycle, sign, coeffs, vb))
    return out


class LengthSpectrumCalculator:
    """
    Weak and marked length spectra of flat manifolds.

    Inside the coset B L_b, the elements B L_{b + lambda} are conjugate under
    translations exactly when lambda agrees modulo (Id - B) Z^n. The classes are
    labelled by v_c . lambda on cycles with sign product +1 and by the parity of
    the coordinate sum on cycles with sign product -1; the squared length of a
    class is sum_c (v_c . b + v_c . lambda)^2 / L_c. Gamma-conjugacy classes are
    the orbits of the coset representatives acting on these labels.

    Attributes
    ----------
    enumeration_budget : int
        Largest number of classes enumerated for a marked spectrum.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        settings = settings or Settings()
        self.enumeration_budget = settings.enumeration_budget
        self.length_cap = settings.length_cap
        self.logger = logging.getLogger(__name__)

    @staticmethod
    def _cycle_values(vb: Fraction, length: int, cap: Fraction) -> List[Tuple[int, Fraction]]:
        """(phi, (v.b + phi)^2 / L) for every integer phi inside the cap."""
        bound = math.isqrt(int(cap * length)) + 2
        base = math.floor(vb)
        out = []
        for phi in range(-base - bound, -base + bound + 1):
            value = (vb + phi) ** 2 / length
            if value <= cap:
                out.append((phi, value))
        return out

    def weak_lengths(self, group: BieberbachGroup, cap: Fraction) -> List[Fraction]:
        """Distinct squared lengths up to cap by a per-cycle set convolution."""
        found: Set[Fraction] = set()
        for rep in group.cosets:
            sums = {Fraction(0)}
            for cycle, sign, _, vb in _cycle_data(rep):
                if sign == -1:
                    continue
                values = {v for _, v in self._cycle_values(vb, len(cycle), cap)}
                sums = {a + b for a in sums for b in values if a + b <= cap}
            found |= sums
        found.discard(Fraction(0))
        return sorted(found)

    def _classes(self, group: BieberbachGroup, cap: Fraction) -> Dict[ClassKey, Fraction]:
        classes: Dict[ClassKey, Fraction] = {}
        for g, rep in enumerate(group.cosets):
            data = _cycle_data(rep)
            plus = [(len(cycle), vb) for cycle, sign, _, vb in data if sign == 1]
            n_minus = sum(1 for _, sign, _, _ in data if sign == -1)
            options = [self._cycle_values(vb, length, cap) for length, vb in plus]

            def descend(idx: int, phis: Tuple[int, ...], total: Fraction) -> None:
                if idx == len(options):
                    for bits in range(2 ** n_minus):
                        psis = tuple(bits >> i & 1 for i in range(n_minus))
                        if g == 0 and not any(phis):
                            continue
                        classes[(g, phis, psis)] = total
                        if len(classes) > self.enumeration_budget:
                            raise ValueError(
                                f"length cap {cap} needs more than {self.enumeration_budget} classes"
                            )
                    return
                for phi, value in options[idx]:
                    if total + value <= cap:
                        descend(idx + 1, phis + (phi,), total + value)

            descend(0, (), Fraction(0))
        return classes

    @staticmethod
    def _invariants(group: BieberbachGroup, g: int, lam: Sequence[int]) -> ClassKey:
        phis, psis = [], []
        for cycle, sign, coeffs, _ in _cycle_data(group.cosets[g]):
            if sign == 1:
                phis.append(sum(coef * lam[c] for coef, c in zip(coeffs, cycle)))
            else:
                psis.append(sum(lam[c] for c in cycle) % 2)
        return g, tuple(phis), tuple(psis)

    @staticmethod
    def _representative(group: BieberbachGroup, key: ClassKey) -> AffineGen:
        g, phis, psis = key
        lam = [0] * group.n
        plus = iter(phis)
        minus = iter(psis)
        for cycle, sign, _, _ in _cycle_data(group.cosets[g]):
            lam[cycle[0]] = next(plus) if sign == 1 else next(minus)
        return group.element(g, lam)

    def marked_lengths(self, group: BieberbachGroup, cap: Fraction) -> Dict[Fraction, int]:
        """
        Number of conjugacy classes of nontrivial elements per squared length.

        Raises
        ------
        ValueError
            If the number of classes exceeds the enumeration budget.
        RuntimeError
            If conjugation leaves the enumerated classes.
        """

        classes = self._classes(group, cap)
        seen: Set[ClassKey] = set()
        marked: Counter = Counter()
        for start in classes:
            if start in seen:
                continue
            seen.add(start)
            stack = [start]
            while stack:
                key = stack.pop()
                element = self._representative(group, key)
                for h in range(1, group.order):
                    k, lam = group.locate(element.conjugate_by(group.cosets[h]))
                    image = self._invariants(group, k, lam)
                    if image not in classes:
                        raise RuntimeError(f"conjugate of class {key} left the enumerated classes")
                    if image not in seen:
                        seen.add(image)
                        stack.append(image)
            marked[classes[start]] += 1
        self.logger.info(f"Marked length spectrum of {group.name or 'group'}: {sum(marked.values())} classes")
        return dict(sorted(marked.items()))

    def length_spectrum(self, group: BieberbachGroup, cap: Optional[Fraction] = None,
                        marked: bool = False) -> LengthSpectrum:
        cap = Fraction(self.length_cap if cap is None else cap)
        spectrum = LengthSpectrum(cap=cap, weak=self.weak_lengths(group, cap))
        if marked:
            spectrum.marked = self.marked_lengths(group, cap)
        return spectrum


def length_spectrum(group: BieberbachGroup, cap: Optional[Fraction] = None, marked: bool = False,
                    settings: Optional[Settings] = None) -> LengthSpectrum:
    return LengthSpectrumCalculator(settings).length_spectrum(group, cap, marked)


Subject = Tuple[BieberbachGroup, Optional[SpinStructure], Optional[HolonomyCharacter]]


class IsospectralityChecker:
    """
    Pairwise spectral comparisons and the isospectrality table.

    Attributes
    ----------
    settings : Settings
        Engine limits.
    dirac : DiracSpectrum
        Dirac spectrum engine.
    hodge : HodgeSpectrum
        p-form spectrum engine.
    lengths : LengthSpectrumCalculator
        Length spectrum engine.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or Settings()
        self.dirac = DiracSpectrum(self.settings)
        self.hodge = HodgeSpectrum(self.settings)
        self.lengths = LengthSpectrumCalculator(self.settings)
        self.solver = SpinStructureSolver(self.settings)
        self.logger = logging.getLogger(__name__)

    def _dirac_map(self, subject: Subject, max_key: int, laplacian: bool) -> Dict[int, object]:
        group, eps, rho = subject
        if eps is None:
            raise ValueError(f"a Dirac comparison needs a spin structure on {group.name or 'group'}")
        table = self.dirac.spectrum(group, eps, rho, max_key)
        out: Dict[int, object] = dict(table.laplacian()) if laplacian else dict(table.entries)
        if table.d0:
            out[0] = table.d0
        return out

    def compare_spectra(self, a: Subject, b: Subject, kinds: Iterable[str] = ("dirac",),
                        max_key: Optional[int] = None) -> Dict[str, Verdict]:
        """
        Compare two spectra shell by shell up to max_key.

        Parameters
        ----------
        a, b : tuple
            (group, spin structure or None, character or None).
        kinds : iterable of str
            dirac, spinor_laplacian, functions, pform (every degree) or pform:<p>.
        max_key : int, optional
            Shell cap 4 mu^2.

        Returns
        -------
        dict
            kind -> Verdict; 'Yes' verdicts hold up to the cap only.

        Raises
        ------
        ValueError
            If the dimensions differ or a kind is unknown.
        """

        if a[0].n != b[0].n:
            raise ValueError(f"cannot compare dimensions {a[0].n} and {b[0].n}")
        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        verdicts: Dict[str, Verdict] = {}
        for kind in kinds:
            if kind in ("dirac", "spinor_laplacian"):
                laplacian = kind == "spinor_laplacian"
                first, second = self._dirac_map(a, max_key, laplacian), self._dirac_map(b, max_key, laplacian)
                verdicts[kind] = self._verdict(kind, first, second, max_key)
            elif kind == "functions":
                verdicts[kind] = self._pform_verdict(a[0], b[0], 0, max_key, kind)
            elif kind == "pform":
                for p in range(a[0].n + 1):
                    verdicts[f"pform:{p}"] = self._pform_verdict(a[0], b[0], p, max_key, f"pform:{p}")
            elif kind.startswith("pform:"):
                verdicts[kind] = self._pform_verdict(a[0], b[0], int(kind.split(":", 1)[1]), max_key, kind)
            else:
                raise ValueError(f"unknown spectrum kind {kind!r}; expected one of {SPECTRAL_KINDS}")
        return verdicts

    def _pform_verdict(self, first: BieberbachGroup, second: BieberbachGroup, p: int, max_key: int,
                       kind: str) -> Verdict:
        return self._verdict(kind, self.hodge.pform_spectrum(first, p, max_key),
                             self.hodge.pform_spectrum(second, p, max_key), max_key)

    @staticmethod
    def _verdict(kind: str, first: Dict, second: Dict, cap) -> Verdict:
        certificate = first_difference(first, second)
        return Verdict(kind=kind, equal=certificate is None, cap=Fraction(cap), certificate=certificate)

    def compare_lengths(self, first: BieberbachGroup, second: BieberbachGroup,
                        cap: Optional[Fraction] = None) -> Tuple[Verdict, Verdict]:
        """
        (marked, weak) verdicts.

        Marked spectra are computed only when the weak spectra agree; a weak
        difference certifies both.
        """

        cap = Fraction(self.settings.length_cap if cap is None else cap)
        weak_a = self.lengths.weak_lengths(first, cap)
        weak_b = self.lengths.weak_lengths(second, cap)
        weak_cert = first_difference({x: True for x in weak_a}, {x: True for x in weak_b})
        weak = Verdict(kind="weak_length", equal=weak_cert is None, cap=cap, certificate=weak_cert)
        if not weak.equal:
            return Verdict(kind="marked_length", equal=False, cap=cap, certificate=weak_cert), weak
        marked_a = self.lengths.marked_lengths(first, cap)
        marked_b = self.lengths.marked_lengths(second, cap)
        return self._verdict("marked_length", marked_a, marked_b, cap), weak

    ### Isospectrality table ###

    def _pform_label(self, groups: Sequence[BieberbachGroup], max_key: int) -> str:
        n = groups[0].n
        equal = {p: all(self._pform_verdict(groups[0], g, p, max_key, f"pform:{p}").equal for g in groups[1:])
                 for p in range(n + 1)}
        if all(equal.values()):
            return "Yes"
        if all(equal[p] for p in range(1, n + 1, 2)):
            return "Yes (p odd)"
        return "No"

    def _length_labels(self, groups: Sequence[BieberbachGroup], cap: Fraction) -> Tuple[str, str]:
        pairs = [self.compare_lengths(groups[0], g, cap) for g in groups[1:]]
        marked = all(m.equal for m, _ in pairs)
        weak = all(w.equal for _, w in pairs)
        return ("Yes" if marked else "No"), ("Yes" if weak else "No")

    def _dirac_labels(self, pairs: Sequence[Tuple[Subject, Subject]], max_key: int) -> Tuple[str, str]:
        dirac, laplace = [], []
        for a, b in pairs:
            verdicts = self.compare_spectra(a, b, ("dirac", "spinor_laplacian"), max_key)
            dirac.append(verdicts["dirac"].label)
            laplace.append(verdicts["spinor_laplacian"].label)
        return "/".join(dict.fromkeys(dirac)), "/".join(dict.fromkeys(laplace))

    def _row(self, label: str, n: int, members: str, dirac_pairs, hodge_groups, max_key, cap) -> dict:
        d_label, s_label = self._dirac_labels(dirac_pairs, max_key)
        marked, weak = self._length_labels(hodge_groups, cap)
        row = {
            "row": label,
            "n": n,
            "members": members,
            "D": d_label,
            "Delta_s": s_label,
            "Delta_p": self._pform_label(hodge_groups, max_key),
            "[L]": marked,
            "L": weak,
            "max_4mu2": max_key,
            "length_cap": str(cap),
        }
        # any "Yes" (also inside "Yes/No") only holds up to max_4mu2 or length_cap
        row["bounded"] = ",".join(column for column in TABLE_COLUMNS if "Yes" in row[column])
        computed = tuple(row[column] for column in TABLE_COLUMNS)
        reference = REFERENCE_VERDICTS.get(label)
        row["matches_reference"] = computed == reference
        self.logger.info(f"Isospectrality row {label}: {row}")
        if reference is not None and computed != reference:
            differing = [f"{column} {got!r} != {want!r}"
                         for column, got, want in zip(TABLE_COLUMNS, computed, reference) if got != want]
            self.logger.warning(f"Isospectrality row {label} differs from the reference verdicts: "
                                f"{'; '.join(differing)}")
        return row

    def table1_report(self, max_key: Optional[int] = None, length_cap: Optional[Fraction] = None) -> List[dict]:
        """
        Recompute the five rows of the isospectrality table.

        Returns
        -------
        list of dict
            One dict per row with the D, Delta_s, Delta_p, [L] and L verdicts,
            the caps used, the columns whose "Yes" is bounded by those caps and
            whether the row agrees with REFERENCE_VERDICTS. A disagreeing row
            is logged as a warning.
        """

        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        cap = Fraction(self.settings.length_cap if length_cap is None else length_cap)
        rows = []

        # Z_2 family in dimension 6: M_{0,4} against M_{1,3}
        family = [mjh_group(6, 0, 4), mjh_group(6, 1, 3)]
        subjects = [(g, z2_spin_structure(g, settings=self.settings), None) for g in family]
        rows.append(self._row("4.3 (i)", 6, "M_{0,4}, M_{1,3}", [(subjects[0], subjects[1])], family,
                              max_key, cap))

        # dimension 8, j + h = 4
        family = [mjh_group(8, j, 4 - j) for j in range(4)]
        subjects = [(g, z2_spin_structure(g, settings=self.settings), None) for g in family]
        rows.append(self._row("4.3 (iii)", 8, "M_{j,h}, j+h=4",
                              [(subjects[0], s) for s in subjects[1:]], family, max_key, cap))

        gamma, gamma_prime = example44_gamma(), example44_gamma_prime()
        eps = self.solver.find_structure(gamma, (1, 1, 1, 1, 1, 1, -1))
        eps_prime = self.solver.find_structure(gamma_prime, (-1, 1, 1, 1, 1, 1, 1))
        rows.append(self._row("4.4 (i)", 7, "Gamma, Gamma'", [((gamma, eps, None), (gamma_prime, eps_prime, None))],
                              [gamma, gamma_prime], max_key, cap))

        m1, m1p = table2_group("M1"), table2_group("M1p")
        all_minus = (-1, -1, -1, -1)
        pairs = [
            ((m1, self.solver.find_structure(m1, all_minus), None),
             (m1p, self.solver.find_structure(m1p, all_minus), None)),
            ((m1, self.solver.find_structure(m1, (1, -1, 1, -1)), None),
             (m1p, self.solver.find_structure(m1p, (-1, -1, -1, 1)), None)),
        ]
        rows.append(self._row("4.5 (i)", 4, "M_1, M_1'", pairs, [m1, m1p], max_key, cap))

        m2t, m2tp = table2_group("M2t"), table2_group("M2tp")
        base = (m2t, self.solver.find_structure(m2t, (1, 1, -1, -1, 1, 1)), None)
        pairs = [
            (base, (m2tp, self.solver.find_structure(m2tp, (1, -1, -1, 1, 1, 1)), None)),
            (base, (m2tp, self.solver.find_structure(m2tp, (1, -1, 1, 1, 1, 1)), None)),
        ]
        rows.append(self._row("4.5 (ii)", 4, "M_2, M_2' (Dirac on the 6-dimensional lifts)", pairs,
                              [table2_group("M2"), table2_group("M2p")], max_key, cap))
        return rows


def compare_spectra(a: Subject, b: Subject, kinds: Iterable[str] = ("dirac",), max_key: Optional[int] = None,
                    settings: Optional[Settings] = None) -> Dict[str, Verdict]:
    return IsospectralityChecker(settings).compare_spectra(a, b, kinds, max_key)


def table1_report(settings: Optional[Settings] = None) -> List[dict]:
    return IsospectralityChecker(settings).table1_report()
