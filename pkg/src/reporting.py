from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import pandas as pd

from src.dirac_spectrum import SpectrumTable
from src.flat_manifold import CosetSummary


logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

FORMATS = ("json", "csv", "md")


def spectrum_frame(table: SpectrumTable) -> pd.DataFrame:
    """Three-column frame (four_mu_sq, d_plus, d_minus) of a Dirac spectrum, in key order."""
    rows = [{"four_mu_sq": k, "d_plus": p, "d_minus": m} for k, (p, m) in sorted(table.entries.items())]
    return pd.DataFrame(rows, columns=["four_mu_sq", "d_plus", "d_minus"])


def multiplicity_frame(spectrum: Dict[int, int]) -> pd.DataFrame:
    """Two-column frame (four_mu_sq, multiplicity) for Laplace-type spectra."""
    rows = [{"four_mu_sq": k, "multiplicity": v} for k, v in sorted(spectrum.items())]
    return pd.DataFrame(rows, columns=["four_mu_sq", "multiplicity"])


def summary_frame(summary: Iterable[CosetSummary]) -> pd.DataFrame:
    """One row per coset: 1-based permutation, signs, translation, n_B, order and the F_1 flag."""
    rows = []
    for i, row in enumerate(summary):
        rows.append({
            "coset": i,
            "perm": " ".join(str(p + 1) for p in row.rep.matrix.perm),
            "signs": " ".join(str(s) for s in row.rep.matrix.signs),
            "translation": " ".join(str(t) for t in row.rep.translation),
            "n_B": row.n_B,
            "order": row.order,
            "in_F1": row.in_F1,
        })
    return pd.DataFrame(rows, columns=["coset", "perm", "signs", "translation", "n_B", "order", "in_F1"])


def records_frame(records: List[dict], columns: Optional[List[str]] = None) -> pd.DataFrame:
    """Frame from a list of row dicts; columns, when given, fixes the column order."""
    return pd.DataFrame(records, columns=columns)


def _markdown(df: pd.DataFrame) -> str:
    header = "| " + " | ".join(str(c) for c in df.columns) + " |"
    rule = "|" + "|".join("---" for _ in df.columns) + "|"
    lines = [header, rule]
    for row in df.itertuples(index=False):
        cells = ["" if pd.isna(v) else str(v).replace("|", "\\|") for v in row]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


class ReportWriter:
    """
    Render tables as CSV, markdown or JSON and write them out.

    Attributes
    ----------
    fmt : str
        One of json, csv, md.
    logger : logging.Logger
        Logger for logging messages.
    """

    def __init__(self, fmt: str = "json") -> None:
        if fmt not in FORMATS:
            raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
        self.fmt = fmt
        self.logger = logging.getLogger(__name__)

    def render(self, df: pd.DataFrame, extra: Optional[dict] = None) -> str:
        """
        Render a frame; JSON output nests the rows under "rows" next to extra fields.

        Parameters
        ----------
        df : pd.DataFrame
            Table to render.
        extra : dict, optional
            Scalar fields placed before the table (JSON) or as a header (markdown).

        Returns
        -------
        str
            Rendered text.
        """

        if self.fmt == "csv":
            return df.to_csv(index=False)
        if self.fmt == "md":
            head = "".join(f"**{k}**: {v}\n\n" for k, v in (extra or {}).items())
            return head + _markdown(df)
        payload = dict(extra or {})
        payload["rows"] = json.loads(df.to_json(orient="records"))
        return json.dumps(payload, indent=4, default=str) + "\n"

    def render_object(self, payload: dict) -> str:
        """Render a plain mapping; csv and md fall back to a key/value table."""
        if self.fmt == "json":
            return json.dumps(payload, indent=4, default=str) + "\n"
        df = pd.DataFrame([{"field": k, "value": json.dumps(v, default=str) if isinstance(v, (list, dict)) else v}
                           for k, v in payload.items()], columns=["field", "value"])
        return self.render(df)

    def save_data(self, text: str, fname: Union[str, Path]) -> None:
        """
        Save rendered output to a file.

        Parameters
        ----------
        text : str
            Rendered output.
        fname : str or Path
            File name to write.
        """

        with open(fname, "w") as f:
            f.write(text)
        self.logger.info(f"Saved {self.fmt} report to {fname}")
