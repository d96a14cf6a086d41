import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

import pandas as pd

from src.dirac_spectrum import DiracSpectrum, HolonomyCharacter
from src.eta_invariants import EtaCalculator, EtaReport
from src.families import distinguish, family_t, mjh_parameters, resolve_group, sunada_numbers, z2_family
from src.flat_manifold import BieberbachGroup, point_group_summary
from src.hodge_laplace import HodgeSpectrum
from src.isospec import IsospectralityChecker
from src.reporting import (
    FORMATS, ReportWriter, multiplicity_frame, records_frame, spectrum_frame, summary_frame,
)
from src.settings import Settings, load_settings
from src.spin_structures import SpinStructure, SpinStructureSolver
from src.zp_manifolds import ZpManifold, zp_eta, zp_eta_series, zp_harmonic, zp_table


logger = logging.getLogger("flatdirac")


def _int_list(raw: str) -> List[int]:
    return [int(x) for x in raw.replace(",", " ").split()]


def _float_list(raw: str) -> List[float]:
    return [float(x) for x in raw.replace(",", " ").split()]


def _character(group: BieberbachGroup, path: Optional[str]) -> Optional[HolonomyCharacter]:
    return HolonomyCharacter.from_file(group, path) if path else None


def select_structure(group: BieberbachGroup, spin: Optional[str] = None, delta: Optional[str] = None,
                     sigma: Optional[str] = None, rho: Optional[HolonomyCharacter] = None,
                     settings: Optional[Settings] = None) -> SpinStructure:
    """
    Pick a spin structure by delta/sigma tuples, by listing index, or by the
    sign of eta(0) (presets plus and minus, Z_2^k groups only).

    Raises
    ------
    ValueError
        If the group admits no structure or nothing matches the selection.
    """

    solver = SpinStructureSolver(settings)
    if delta is not None:
        return solver.find_structure(group, _int_list(delta), _int_list(sigma) if sigma else None)
    structures = solver.enumerate_spin_structures(group)
    if not structures:
        raise ValueError(f"{group.name or 'group'} admits no spin structure")
    if spin in ("plus", "minus"):
        calculator = EtaCalculator(settings)
        wanted = 1 if spin == "plus" else -1
        for eps in structures:
            eta0 = calculator.eta_z2k(group, eps, rho).eta_at_0
            if isinstance(eta0, Fraction) and eta0 * wanted > 0:
                return eps
        raise ValueError(f"no spin structure on {group.name or 'group'} has eta(0) of sign {spin}")
    index = int(spin) if spin else 0
    if not 0 <= index < len(structures):
        raise ValueError(f"spin index {index} outside 0..{len(structures) - 1}")
    return structures[index]


### Subcommands ###

def cmd_describe(args, settings: Settings, writer: ReportWriter) -> str:
    group = resolve_group(args.group)
    solver = SpinStructureSolver(settings)
    extra = {
        "name": group.name,
        "n": group.n,
        "order": group.order,
        "orientable": group.orientable,
        "k": group.k,
        "spin_structures": solver.count_spin_structures(group),
        "trivial_type": solver.count_spin_structures(group, trivial_type_only=True),
        "betti": HodgeSpectrum(settings).betti_numbers(group),
    }
    if group.is_diagonal and group.order > 1:
        extra["sunada"] = [[d, t, c] for (d, t), c in sorted(sunada_numbers(group).items())]
    if writer.fmt == "json":
        extra["group"] = group.to_json()
    return writer.render(summary_frame(point_group_summary(group)), extra)


def cmd_spin_list(args, settings: Settings, writer: ReportWriter) -> str:
    group = resolve_group(args.group)
    structures = SpinStructureSolver(settings).enumerate_spin_structures(group, args.trivial_type)
    rows = [{
        "index": i,
        "delta": " ".join(str(d) for d in eps.delta),
        "sigma": " ".join(str(s) for s in eps.sigma),
        "trivial_type": eps.trivial_type,
    } for i, eps in enumerate(structures)]
    return writer.render(records_frame(rows, ["index", "delta", "sigma", "trivial_type"]),
                         {"group": group.name, "count": len(rows)})


def cmd_dirac_spec(args, settings: Settings, writer: ReportWriter) -> str:
    group = resolve_group(args.group)
    rho = _character(group, args.rho)
    eps = select_structure(group, args.spin, args.delta, args.sigma, rho, settings)
    table = DiracSpectrum(settings).spectrum(group, eps, rho, args.max_4mu2)
    extra = {
        "group": group.name,
        "delta": list(eps.delta),
        "sigma": list(eps.sigma),
        "d0": table.d0,
        "asymmetric": table.asymmetric,
    }
    return writer.render(spectrum_frame(table), extra)


def _zp_report(p: int, h: int, samples: Sequence[float], extended: bool) -> EtaReport:
    manifold = ZpManifold(p)
    eta = zp_eta(manifold.p, extended=extended)[h - 1]
    report = EtaReport(eta_at_0=eta, identically_zero=False)
    report.d0 = zp_harmonic(p, h, extended=extended)
    report.samples = [(s, zp_eta_series(p, h, s)) for s in samples if s != 0]
    return report


def cmd_eta(args, settings: Settings, writer: ReportWriter) -> str:
    samples = _float_list(args.s) if args.s else []
    if args.p is not None:
        h = int(args.spin) if args.spin else 1
        report = _zp_report(args.p, h, samples, args.extended or settings.extended_precision)
        return writer.render_object({"p": args.p, "spin": h, **report.to_json()})
    if not args.group:
        raise ValueError("eta needs --group or --p")
    group = resolve_group(args.group)
    rho = _character(group, args.rho)
    eps = select_structure(group, args.spin, args.delta, args.sigma, rho, settings)
    report = EtaCalculator(settings).eta_z2k(group, eps, rho, samples)
    return writer.render_object({"group": group.name, "delta": list(eps.delta), **report.to_json()})


def cmd_hodge_spec(args, settings: Settings, writer: ReportWriter) -> str:
    group = resolve_group(args.group)
    p = args.p if args.p is not None else 0
    spectrum = HodgeSpectrum(settings).pform_spectrum(group, p, args.max_4mu2)
    return writer.render(multiplicity_frame(spectrum), {"group": group.name, "p": p})


def cmd_compare(args, settings: Settings, writer: ReportWriter) -> str:
    first, second = resolve_group(args.group), resolve_group(args.other)
    kinds = [k for k in args.kinds.replace(",", " ").split() if k]
    checker = IsospectralityChecker(settings)
    verdicts = []
    spectral = [k for k in kinds if k not in ("lengths", "fingerprint")]
    if spectral:
        needs_spin = any(k in ("dirac", "spinor_laplacian") for k in spectral)
        eps_a = select_structure(first, args.spin, args.delta, args.sigma, settings=settings) if needs_spin else None
        eps_b = (select_structure(second, args.other_spin, args.other_delta, args.other_sigma, settings=settings)
                 if needs_spin else None)
        result = checker.compare_spectra((first, eps_a, _character(first, args.rho)),
                                         (second, eps_b, _character(second, args.rho)), spectral, args.max_4mu2)
        verdicts.extend(v.to_json() for v in result.values())
    if "lengths" in kinds:
        cap = Fraction(args.length_cap) if args.length_cap is not None else None
        verdicts.extend(v.to_json() for v in checker.compare_lengths(first, second, cap))
    extra = {"first": first.name, "second": second.name}
    if "fingerprint" in kinds:
        extra["fingerprint"] = distinguish(first, second, settings)
    frame = records_frame(verdicts, ["kind", "equal", "bounded", "cap", "certificate"])
    return writer.render(frame, extra)


def cmd_zp_table(args, settings: Settings, writer: ReportWriter) -> str:
    table = zp_table(args.pmax, settings, args.extended or None)
    return writer.render(table)


def cmd_families(args, settings: Settings, writer: ReportWriter) -> str:
    if args.t is not None:
        groups = family_t(args.n, args.t)
    else:
        groups = z2_family(args.n, args.orientable_only)
    hodge = HodgeSpectrum(settings)
    rows = []
    for group in groups:
        j, h, l = mjh_parameters(group)
        functions = hodge.pform_spectrum(group, 0, 8)
        rows.append({
            "name": group.name,
            "j": j,
            "h": h,
            "l": l,
            "orientable": group.orientable,
            "betti": " ".join(str(b) for b in hodge.betti_numbers(group)),
            "d_1": functions.get(4, 0),
            "d_sqrt2": functions.get(8, 0),
        })
    frame = records_frame(rows, ["name", "j", "h", "l", "orientable", "betti", "d_1", "d_sqrt2"])
    return writer.render(frame, {"n": args.n})


def cmd_oracle_check(args, settings: Settings, writer: ReportWriter) -> str:
    group = resolve_group(args.group)
    rho = _character(group, args.rho)
    if args.delta is not None or args.spin is not None:
        structures = [select_structure(group, args.spin, args.delta, args.sigma, rho, settings)]
    else:
        structures = SpinStructureSolver(settings).enumerate_spin_structures(group)
    spectra = DiracSpectrum(settings)
    cap = args.max_4mu2 if args.max_4mu2 is not None else 40
    rows = []
    for eps in structures:
        for key, formula, oracle in spectra.cross_check(group, eps, rho, cap):
            rows.append({
                "delta": " ".join(str(d) for d in eps.delta),
                "sigma": " ".join(str(s) for s in eps.sigma),
                "four_mu_sq": key,
                "formula_plus": formula[0],
                "formula_minus": formula[1],
                "oracle_plus": oracle[0],
                "oracle_minus": oracle[1],
                "match": formula == oracle,
            })
    frame = records_frame(rows, ["delta", "sigma", "four_mu_sq", "formula_plus", "formula_minus",
                                 "oracle_plus", "oracle_minus", "match"])
    mismatches = int((~frame["match"]).sum()) if len(frame) else 0
    if mismatches:
        logger.warning(f"{mismatches} oracle mismatches on {group.name}")
    args.failed = bool(mismatches)
    return writer.render(frame, {"group": group.name, "mismatches": mismatches})


def cmd_table1(args, settings: Settings, writer: ReportWriter) -> str:
    cap = Fraction(args.length_cap) if args.length_cap is not None else None
    rows = IsospectralityChecker(settings).table1_report(args.max_4mu2, cap)
    return writer.render(pd.DataFrame(rows))


HANDLERS = {
    "describe": cmd_describe,
    "spin-list": cmd_spin_list,
    "dirac-spec": cmd_dirac_spec,
    "eta": cmd_eta,
    "hodge-spec": cmd_hodge_spec,
    "compare": cmd_compare,
    "zp-table": cmd_zp_table,
    "families": cmd_families,
    "oracle-check": cmd_oracle_check,
    "table1": cmd_table1,
}


### Parser ###

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="json", help="Output format")
    parser.add_argument("--out", help="Write the output to this file instead of stdout")
    parser.add_argument("--verbose", action="store_true", help="Log INFO lines to stderr")
    parser.add_argument("--max-4mu2", dest="max_4mu2", type=int, help="Largest shell key 4 mu^2")
    parser.add_argument("--length-cap", dest="length_cap", type=int, help="Largest squared length")


def _add_spin(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spin", help="Spin structure index, or plus/minus by the sign of eta(0)")
    parser.add_argument("--delta", help="Lattice signs, e.g. '1,1,-1'")
    parser.add_argument("--sigma", help="Generator signs, e.g. '1'")
    parser.add_argument("--rho", help="JSON file with the holonomy character")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatdirac", description="Spectra of flat spin manifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="Point group, spin structure counts, Betti and Sunada numbers")
    p.add_argument("--group", required=True)
    _add_common(p)

    p = sub.add_parser("spin-list", help="List spin structures")
    p.add_argument("--group", required=True)
    p.add_argument("--trivial-type", dest="trivial_type", action="store_true")
    _add_common(p)

    p = sub.add_parser("dirac-spec", help="Dirac multiplicities up to a shell cap")
    p.add_argument("--group", required=True)
    _add_spin(p)
    _add_common(p)

    p = sub.add_parser("eta", help="Eta invariant and eta series samples")
    p.add_argument("--group")
    p.add_argument("--p", type=int, help="Prime p = 3 mod 4 for the Z_p-manifold")
    p.add_argument("--s", help="Sample points for eta(s), e.g. '2,5'")
    p.add_argument("--extended", action="store_true", help="mpmath evaluation for Z_p-manifolds")
    _add_spin(p)
    _add_common(p)

    p = sub.add_parser("hodge-spec", help="Hodge Laplacian multiplicities on p-forms")
    p.add_argument("--group", required=True)
    p.add_argument("--p", type=int, help="Form degree")
    _add_common(p)

    p = sub.add_parser("compare", help="Compare spectra of two groups")
    p.add_argument("--group", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--kinds", default="dirac",
                   help="dirac, spinor_laplacian, functions, pform, pform:<p>, lengths, fingerprint")
    _add_spin(p)
    p.add_argument("--other-spin", dest="other_spin")
    p.add_argument("--other-delta", dest="other_delta")
    p.add_argument("--other-sigma", dest="other_sigma")
    _add_common(p)

    p = sub.add_parser("zp-table", help="Eta invariants of the Z_p-manifolds")
    p.add_argument("--pmax", type=int, default=503)
    p.add_argument("--extended", action="store_true")
    _add_common(p)

    p = sub.add_parser("families", help="The Z_2 family M_{j,h} in dimension n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, help="Restrict to j + h = t")
    p.add_argument("--orientable-only", dest="orientable_only", action="store_true")
    _add_common(p)

    p = sub.add_parser("oracle-check", help="Formula multiplicities against the matrix oracle")
    p.add_argument("--group", required=True)
    _add_spin(p)
    _add_common(p)

    p = sub.add_parser("table1", help="Recompute the isospectrality table")
    _add_common(p)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.getLogger().setLevel(logging.INFO if args.verbose else logging.WARNING)
    args.failed = False
    try:
        settings = load_settings()
        writer = ReportWriter(args.format)
        text = HANDLERS[args.command](args, settings, writer)
    except (ValueError, RuntimeError) as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    if args.out:
        writer.save_data(text, args.out)
    else:
        sys.stdout.write(text)
    return 1 if args.failed else 0


if __name__ == '__main__':
    sys.exit(main())
