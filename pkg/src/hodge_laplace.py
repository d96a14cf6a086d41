from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional

from scipy.special import comb

from src.clifford import SignedPermMatrix
from src.flat_manifold import BieberbachGroup, ShellEnumerator
from src.quadratic_field import add_number, mul_number, to_integer
from src.settings import Settings


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)


def _binom(a: int, b: int) -> int:
    if b < 0 or a < 0 or b > a:
        return 0
    return int(comb(a, b, exact=True))


def krawtchouk(p: int, n: int, x: int) -> int:
    """
    Krawtchouk value K_p^n(x) = sum_t (-1)^t C(x, t) C(n - x, p - t).

    Raises
    ------
    ValueError
        Unless 0 <= p <= n and 0 <= x <= n.
    """

    if not (0 <= p <= n and 0 <= x <= n):
        raise ValueError(f"krawtchouk needs 0 <= p, x <= n, got p={p}, n={n}, x={x}")
    return sum((-1) ** t * _binom(x, t) * _binom(n - x, p - t) for t in range(p + 1))


def exterior_trace(B: SignedPermMatrix, p: int) -> int:
    """
    tr Lambda^p(B).

    When every eigenvalue is +-1 this is K_p^n(n - n_B). Otherwise it is the
    t^p coefficient of prod_c (1 + c_c t^{L_c}) over the cycles of B, with
    c_c = -s_c (-1)^{L_c} for a cycle of length L_c and sign product s_c.
    """

    n = B.n
    if not 0 <= p <= n:
        raise ValueError(f"exterior power {p} of an n={n} matrix")
    if all(a in (0, 1) for a in B.eigen_angles()):
        minus = sum(1 for a in B.eigen_angles() if a == 1)
        return krawtchouk(p, n, minus)
    poly = [1]
    for cycle, sign in B.cycles():
        length = len(cycle)
        c = -sign * (-1) ** length
        nxt = poly + [0] * length
        for i, a in enumerate(poly):
            nxt[i + length] += c * a
        poly = nxt
    return poly[p] if p < len(poly) else 0


class HodgeSpectrum:
    """
    Laplace spectra on p-forms of flat manifolds.

    The multiplicity of 4 pi^2 mu^2 is (1/|F|) sum_gamma tr_p(B) e_{mu,gamma},
    where e_{mu,gamma} sums exp(-2 pi i u.b) over the B-fixed u in Z^n of norm mu.

    Attributes
    ----------
    enumerator : ShellEnumerator
        Enumeration of B-fixed lattice vectors.
    threads : int
        Worker threads.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or Settings()
        self.enumerator = ShellEnumerator(self.settings)
        self.threads = self.settings.threads
        self.logger = logging.getLogger(__name__)

    def pform_spectrum(self, group: BieberbachGroup, p: int, max_key: Optional[int] = None) -> Dict[int, int]:
        """
        Multiplicities keyed by 4 mu^2 (key 0 gives beta_p).

        Parameters
        ----------
        group : BieberbachGroup
            The group.
        p : int
            Form degree.
        max_key : int, optional
            Largest key, the settings default when omitted.

        Returns
        -------
        dict
            key -> multiplicity for the nonzero multiplicities.

        Raises
        ------
        ValueError
            If p is out of range or the cap exceeds the budget.
        RuntimeError
            If a multiplicity is not an integer.
        """

        if not 0 <= p <= group.n:
            raise ValueError(f"form degree {p} outside 0..{group.n}")
        max_key = self.settings.max_four_mu_sq if max_key is None else max_key
        trivial = tuple(1 for _ in range(group.n))
        traces = [exterior_trace(rep.matrix, p) for rep in group.cosets]
        table = self.enumerator.theta_table(group, trivial, max_key)

        def multiplicity(shell) -> int:
            total = 0
            for g, phase_sum in shell.sums.items():
                if traces[g]:
                    total = add_number(total, mul_number(traces[g], phase_sum))
            return to_integer(mul_number(total, Fraction(1, group.order)), self.settings.oracle_tolerance)

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            values = list(pool.map(multiplicity, table))
        spectrum = {shell.key: value for shell, value in zip(table, values) if value}
        self.logger.info(f"{p}-form spectrum of {group.name or 'group'}: {len(spectrum)} eigenvalues up to {max_key}")
        return spectrum

    def betti(self, group: BieberbachGroup, p: int) -> int:
        """beta_p = dim (Lambda^p R^n)^F = (1/|F|) sum tr_p(B)."""
        total = sum(exterior_trace(rep.matrix, p) for rep in group.cosets)
        if total % group.order:
            raise RuntimeError(f"beta_{p} of {group.name or 'group'} is not an integer: {total}/{group.order}")
        return total // group.order

    def betti_numbers(self, group: BieberbachGroup) -> List[int]:
        return [self.betti(group, p) for p in range(group.n + 1)]


def pform_spectrum(group: BieberbachGroup, p: int, max_key: Optional[int] = None,
                   settings: Optional[Settings] = None) -> Dict[int, int]:
    return HodgeSpectrum(settings).pform_spectrum(group, p, max_key)


def betti(group: BieberbachGroup, p: int) -> int:
    return HodgeSpectrum().betti(group, p)


def betti_numbers(group: BieberbachGroup) -> List[int]:
    return HodgeSpectrum().betti_numbers(group)


def betti_mjh(j: int, h: int, l: int, p: int) -> int:
    """beta_p(M_{j,h}) = sum_i C(j+h, 2i) C(j+l, p-2i)."""
    return sum(_binom(j + h, 2 * i) * _binom(j + l, p - 2 * i) for i in range(p // 2 + 1))


def pform_closed_form(n: int, j: int, h: int, p: int, key: int) -> int:
    """
    Multiplicity of 4 pi^2 mu^2 on p-forms of M_{j,h} for 4 mu^2 in {4, 8}.

    (1/2)(C(n,p) |Lambda_mu| + K_p^n(j+h) e_mu) with |Lambda_1| = 2n,
    |Lambda_sqrt2| = 2n(n-1), e_1 = 2(l-2) and e_sqrt2 = 2j + 2(l-1)(l-4).
    """

    l = n - 2 * j - h
    if key == 4:
        count, e = 2 * n, 2 * (l - 2)
    elif key == 8:
        count, e = 2 * n * (n - 1), 2 * j + 2 * (l - 1) * (l - 4)
    else:
        raise ValueError(f"closed forms exist for 4 mu^2 in (4, 8), got {key}")
    return (_binom(n, p) * count + krawtchouk(p, n, j + h) * e) // 2
