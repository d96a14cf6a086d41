from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from src.clifford import SignedPermMatrix
from src.flat_manifold import AffineGen, BieberbachGroup, build_group, load_group
from src.hodge_laplace import betti_numbers
from src.settings import Settings
from src.spin_structures import SpinStructure, SpinStructureSolver


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)

HW_DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "hw"

HALF = Fraction(1, 2)

Pattern = List[List[int]]
SunadaNumbers = Dict[Tuple[int, int], int]


def _half_vector(n: int, coords: Sequence[int]) -> List[Fraction]:
    """1/2 on the given 1-based coordinates."""
    return [HALF if i + 1 in coords else Fraction(0) for i in range(n)]


def _diag_gen(signs: Sequence[int], half_coords: Sequence[int]) -> AffineGen:
    return AffineGen(SignedPermMatrix.diagonal(signs), _half_vector(len(signs), half_coords))


### Z_2 family ###

def mjh_group(n: int, j: int, h: int) -> BieberbachGroup:
    """
    Gamma_{j,h} = <B L_{e_n/2}, Z^n> with B = diag(J, ..., J, -1, ..., -1, 1, ..., 1),
    j swap blocks J, h entries -1 and l = n - 2j - h entries +1.

    Raises
    ------
    ValueError
        Unless j, h >= 0, j + h > 0 and l >= 1.
    """

    l = n - 2 * j - h
    if j < 0 or h < 0 or j + h == 0 or l < 1:
        raise ValueError(f"M_{{j,h}} needs j, h >= 0, j + h > 0 and l >= 1; got n={n}, j={j}, h={h}")
    perm, signs = list(range(n)), [1] * n
    for t in range(j):
        perm[2 * t], perm[2 * t + 1] = 2 * t + 1, 2 * t
    for i in range(2 * j, 2 * j + h):
        signs[i] = -1
    gen = AffineGen(SignedPermMatrix(perm, signs), _half_vector(n, [n]))
    return build_group([gen], name=f"mjh:{n}:{j}:{h}")


def mjh_parameters(group: BieberbachGroup) -> Tuple[int, int, int]:
    """(j, h, l) read off the holonomy generator of a Gamma_{j,h}."""
    if group.order != 2:
        raise ValueError(f"{group.name or 'group'} is not a Z_2-manifold group")
    B = group.cosets[1].matrix
    j = sum(1 for cycle, _ in B.cycles() if len(cycle) == 2)
    h = sum(1 for cycle, sign in B.cycles() if len(cycle) == 1 and sign == -1)
    return j, h, group.n - 2 * j - h


def z2_family(n: int, orientable_only: bool = False) -> List[BieberbachGroup]:
    """
    Every Gamma_{j,h} with 0 <= j <= (n-1)/2, 0 <= h < n - 2j and j + h != 0.

    Raises
    ------
    ValueError
        If n < 2.
    """

    if n < 2:
        raise ValueError(f"the Z_2 family needs n >= 2, got {n}")
    groups = []
    for j in range((n - 1) // 2 + 1):
        for h in range(n - 2 * j):
            if j + h == 0 or (orientable_only and (j + h) % 2):
                continue
            groups.append(mjh_group(n, j, h))
    return groups


def family_t(n: int, t: int) -> List[BieberbachGroup]:
    """Members M_{j,h} of dimension n with j + h = t."""
    if t < 1:
        raise ValueError(f"the sub-family index must be positive, got {t}")
    return [mjh_group(n, j, t - j) for j in range(t + 1) if n - 2 * j - (t - j) >= 1]


def z2_spin_structure(group: BieberbachGroup, sigma: int = 1, settings: Optional[Settings] = None) -> SpinStructure:
    """
    The structure (1, ..., 1, (-1)^{(j+h)/2}; sigma u(B)) on Gamma_{j,h}, j + h even.

    Raises
    ------
    ValueError
        If the group is not orientable.
    """

    j, h, _ = mjh_parameters(group)
    if (j + h) % 2:
        raise ValueError(f"{group.name or 'group'} is not orientable")
    delta = [1] * group.n
    delta[-1] = -1 if ((j + h) // 2) % 2 else 1
    return SpinStructureSolver(settings).find_structure(group, delta, [sigma])


### Hantzsche-Wendt groups ###

def hw_pattern(n: int, name: str) -> Pattern:
    """
    Named translation patterns for Hantzsche-Wendt groups.

    consecutive: b_i = (e_i + e_{i+1})/2; shifted: b_1 = (e_1 + e_n)/2 and
    b_i = (e_{i-1} + e_i)/2; classic is consecutive in dimension 3.
    """

    if name in ("consecutive", "classic"):
        return [[1 if c in (i, i + 1) else 0 for c in range(n)] for i in range(n - 1)]
    if name == "shifted":
        rows = [[1 if c in (0, n - 1) else 0 for c in range(n)]]
        rows += [[1 if c in (i - 1, i) else 0 for c in range(n)] for i in range(1, n - 1)]
        return rows
    raise ValueError(f"unknown Hantzsche-Wendt pattern {name!r}")


def load_hw_pattern(path: Union[str, Path]) -> Pattern:
    """
    Read rows of 0/1 flags, one row per generator; '#' starts a comment.

    Raises
    ------
    ValueError
        If a flag is not 0 or 1 or the rows have different lengths.
    """

    rows = []
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split() if " " in line else list(line)
            if any(t not in ("0", "1") for t in tokens):
                raise ValueError(f"pattern rows hold 0/1 flags, got {line!r} in {path}")
            rows.append([int(t) for t in tokens])
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path} does not hold a rectangular 0/1 pattern")
    return rows


def save_hw_pattern(pattern: Pattern, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        for row in pattern:
            f.write(" ".join(str(int(x)) for x in row) + "\n")


def hw_group(n: int, pattern: Union[str, Pattern], name: str = "") -> BieberbachGroup:
    """
    Hantzsche-Wendt group <B_1 L_{b_1}, ..., B_{n-1} L_{b_{n-1}}, Z^n>.

    B_i fixes e_i and negates every other coordinate; b_i carries 1/2 where
    row i of the pattern has a 1.

    Parameters
    ----------
    n : int
        Odd dimension.
    pattern : str or list of list of int
        A named pattern, a path to a pattern file, or the (n-1) x n flags.
    name : str
        Label for the group.

    Raises
    ------
    ValueError
        If n is even, the pattern has the wrong shape, or the group has torsion.
    """

    if n % 2 == 0 or n < 3:
        raise ValueError(f"Hantzsche-Wendt groups live in odd dimension >= 3, got {n}")
    label = name
    if isinstance(pattern, str):
        label = label or f"hw:{n}:{pattern}"
        if Path(pattern).exists():
            pattern = load_hw_pattern(pattern)
        else:
            pattern = hw_pattern(n, pattern)
    if len(pattern) != n - 1 or any(len(row) != n for row in pattern):
        raise ValueError(f"a Hantzsche-Wendt pattern in dimension {n} has {n - 1} rows of {n} flags")
    gens = []
    for i, row in enumerate(pattern):
        signs = [1 if c == i else -1 for c in range(n)]
        gens.append(_diag_gen(signs, [c + 1 for c, flag in enumerate(row) if flag]))
    return build_group(gens, name=label or f"hw:{n}")


def doubling(group: BieberbachGroup, times: int = 1) -> BieberbachGroup:
    """
    dGamma = <diag(B, B) L_{(b, b)}, Z^{2n}>, applied times times.
    """

    current = group
    for _ in range(times):
        n = current.n
        gens = []
        for g in current.generators:
            B = g.matrix
            perm = list(B.perm) + [p + n for p in B.perm]
            matrix = SignedPermMatrix(perm, list(B.signs) * 2)
            gens.append(AffineGen(matrix, list(g.translation) * 2))
        current = build_group(gens, n=2 * n, name=f"d{current.name}" if current.name else "")
    return current


def sunada_numbers(group: BieberbachGroup) -> SunadaNumbers:
    """
    c_{d,t}: cosets with n_B = d and t fixed coordinates carrying 1/2.

    Raises
    ------
    ValueError
        If the holonomy is not diagonal.
    """

    if not group.is_diagonal:
        raise ValueError(f"Sunada numbers need diagonal holonomy; {group.name or 'group'} is not diagonal")
    counts: Counter = Counter()
    for rep in group.cosets:
        fixed = [i for i, s in enumerate(rep.matrix.signs) if s == 1]
        t = sum(1 for i in fixed if rep.translation[i] == HALF)
        counts[(len(fixed), t)] += 1
    return dict(sorted(counts.items()))


### Built-in registry ###

def remark35_group() -> BieberbachGroup:
    return build_group([_diag_gen([-1, -1, 1], [3])], name="remark3.5")


def example44_gamma() -> BieberbachGroup:
    return build_group([
        _diag_gen([-1, -1, -1, -1, -1, -1, 1], [7]),
        _diag_gen([-1, -1, 1, 1, 1, 1, 1], [1, 3, 7]),
    ], name="example4.4:gamma")


def example44_gamma_prime() -> BieberbachGroup:
    return build_group([
        _diag_gen([-1, -1, -1, -1, 1, 1, 1], [7]),
        _diag_gen([1, 1, -1, -1, -1, -1, 1], [2]),
    ], name="example4.4:gamma_prime")


_TABLE2 = {
    "M1": ([(-1, -1, 1, 1), (1, -1, -1, 1), (-1, 1, -1, 1)], [[4], [2, 4], [2]]),
    "M1p": ([(-1, -1, 1, 1), (1, -1, -1, 1), (-1, 1, -1, 1)], [[3], [1, 2], [1, 2, 3]]),
    "M2": ([(1, 1, 1, -1), (1, 1, -1, 1), (1, 1, -1, -1)], [[3], [2, 4], [2, 3, 4]]),
    "M2p": ([(1, 1, 1, -1), (1, 1, -1, 1), (1, 1, -1, -1)], [[2], [1, 2], [1]]),
}

# characters adjoined on coordinates 5 and 6
_TILDE_SIGNS = [(-1, 1), (1, -1), (-1, -1)]


def table2_group(label: str) -> BieberbachGroup:
    """
    The four-dimensional pairs M1, M1p, M2, M2p and the six-dimensional M2t, M2tp.

    Raises
    ------
    ValueError
        If the label is unknown.
    """

    tilde = label.endswith("t") or label.endswith("tp")
    base = label.replace("tp", "p") if label.endswith("tp") else (label[:-1] if label.endswith("t") else label)
    if base not in _TABLE2:
        raise ValueError(f"unknown table2 group {label!r}")
    signs, halves = _TABLE2[base]
    gens = []
    for k, (s, h) in enumerate(zip(signs, halves)):
        s = list(s) + (list(_TILDE_SIGNS[k]) if tilde else [])
        gens.append(_diag_gen(s, h))
    return build_group(gens, name=f"table2:{label}")


def z4_group() -> BieberbachGroup:
    """Quarter turn in the (e_1, e_2) plane with translation e_3/4."""
    matrix = SignedPermMatrix([1, 0, 2], [1, -1, 1])
    return build_group([AffineGen(matrix, [0, 0, Fraction(1, 4)])], name="z4:3")


def _hw_file(stem: str) -> Callable[[], BieberbachGroup]:
    def build() -> BieberbachGroup:
        pattern = load_hw_pattern(HW_DATA_DIR / f"{stem}.txt")
        return hw_group(len(pattern[0]), pattern, name=f"hw:{stem}")
    return build


BUILTIN_GROUPS: Dict[str, Callable[[], BieberbachGroup]] = {
    "remark3.5": remark35_group,
    "example4.4:gamma": example44_gamma,
    "example4.4:gamma_prime": example44_gamma_prime,
    "table2:M1": lambda: table2_group("M1"),
    "table2:M1p": lambda: table2_group("M1p"),
    "table2:M2": lambda: table2_group("M2"),
    "table2:M2p": lambda: table2_group("M2p"),
    "table2:M2t": lambda: table2_group("M2t"),
    "table2:M2tp": lambda: table2_group("M2tp"),
    "z4:3": z4_group,
    "hw:3:classic": lambda: hw_group(3, "classic"),
    "hw:5:consecutive": lambda: hw_group(5, "consecutive"),
    "hw:7:consecutive": lambda: hw_group(7, "consecutive"),
    "hw:7:shifted": lambda: hw_group(7, "shifted"),
}


def builtin_examples() -> Dict[str, BieberbachGroup]:
    """Every registry group, built and validated, plus the pattern files under data/hw."""
    groups = {name: factory() for name, factory in BUILTIN_GROUPS.items()}
    for path in sorted(HW_DATA_DIR.glob("*.txt")):
        groups[f"hw:{path.stem}"] = _hw_file(path.stem)()
    logger.info(f"Built {len(groups)} registry groups")
    return groups


def resolve_group(name: str) -> BieberbachGroup:
    """
    Build a group from a registry name or a JSON file.

    Accepted forms: registry names, torus:N, mjh:n:j:h, hw:n:<pattern or
    file>, hw:<data file stem>, double:<name> and paths to group JSON files.

    Raises
    ------
    ValueError
        If the name is not recognised.
    """

    if name in BUILTIN_GROUPS:
        return BUILTIN_GROUPS[name]()
    if name.startswith("double:"):
        return doubling(resolve_group(name[len("double:"):]))
    parts = name.split(":")
    try:
        if parts[0] == "torus" and len(parts) == 2:
            return build_group([], n=int(parts[1]), name=name)
        if parts[0] == "mjh" and len(parts) == 4:
            return mjh_group(int(parts[1]), int(parts[2]), int(parts[3]))
        if parts[0] == "hw" and len(parts) == 3:
            return hw_group(int(parts[1]), parts[2], name=name)
    except ValueError as e:
        raise ValueError(f"cannot build {name!r}: {e}")
    if parts[0] == "hw" and len(parts) == 2 and (HW_DATA_DIR / f"{parts[1]}.txt").exists():
        return _hw_file(parts[1])()
    if Path(name).suffix == ".json" and Path(name).exists():
        return load_group(name)
    raise ValueError(f"unknown group {name!r}")


### Fingerprints ###

def fingerprint(group: BieberbachGroup, settings: Optional[Settings] = None) -> dict:
    """
    Invariants that separate flat manifolds: order, Betti vector, Sunada
    numbers (diagonal type) and spin-structure counts (orientable groups).
    """

    solver = SpinStructureSolver(settings)
    out = {
        "n": group.n,
        "order": group.order,
        "orientable": group.orientable,
        "betti": betti_numbers(group),
    }
    if group.is_diagonal:
        out["sunada"] = sorted(sunada_numbers(group).items())
    if group.orientable:
        out["spin_structures"] = solver.count_spin_structures(group)
        out["trivial_type"] = solver.count_spin_structures(group, trivial_type_only=True)
    return out


def distinguish(first: BieberbachGroup, second: BieberbachGroup, settings: Optional[Settings] = None) -> str:
    """'distinguished' when some fingerprint entry differs, else 'inconclusive'."""
    a, b = fingerprint(first, settings), fingerprint(second, settings)
    for key in sorted(set(a) | set(b)):
        if a.get(key) != b.get(key):
            logger.info(f"{first.name} and {second.name} differ in {key}")
            return "distinguished"
    return "inconclusive"
