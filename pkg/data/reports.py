"""
Tabular CLI reports built as pandas DataFrames.
"""

from __future__ import annotations

from typing import Dict, Optional, Sequence

import pandas as pd

from core.cancellation import CancellationResult
from core.enumeration import Catalog, ClassificationReport


def _witness(result: CancellationResult) -> str:
    if not result.admits:
        return "—"
    return " ".join(f"(e{p.edge},R{p.region})" for p in result.sequence.pairs) or "(empty)"


def catalog_frame(catalog: Catalog) -> pd.DataFrame:
    rows = []
    for label, rec in zip(catalog.labels(), catalog.records):
        p = rec.profile
        rows.append({
            "Label":   label,
            "Regions": rec.region_count,
            "Chi":     rec.euler_characteristic,
            "Betti":   ",".join(map(str, p.betti)),
            "T1":      ",".join(map(str, p.torsion_1)) or "-",
            "T2":      ",".join(map(str, p.torsion_2)) or "-",
            "Acyclic": "yes" if rec.acyclic else "no",
            "Cancel":  "-" if rec.canceling is None else ("yes" if rec.canceling else "no"),
            "Key":     rec.key_hex,
        })
    return pd.DataFrame(rows, columns=["Label", "Regions", "Chi", "Betti", "T1", "T2",
                                       "Acyclic", "Cancel", "Key"])


def histogram_frame(catalog: Catalog, report: Optional[ClassificationReport] = None) -> pd.DataFrame:
    acyclic: Dict[int, int] = report.acyclic_by_regions if report else {}
    row = catalog.histogram_row()
    df = pd.DataFrame({
        "Regions": list(range(1, len(row) + 1)),
        "Classes": row,
        "Acyclic": [acyclic.get(r, 0) for r in range(1, len(row) + 1)],
    })
    return df


def cancellation_frame(catalog: Catalog, results: Sequence[CancellationResult]) -> pd.DataFrame:
    rows = []
    for label, rec, res in zip(catalog.labels(), catalog.records, results):
        rows.append({
            "Label":    label,
            "Regions":  rec.region_count,
            "Acyclic":  "yes" if rec.acyclic else "no",
            "Admits":   "yes" if res.admits else "no",
            "Trees":    res.trees_checked,
            "Admitting": res.trees_admitting,
            "TreeDep":  "yes" if res.tree_dependent else "no",
            "Tree":     ",".join(map(str, res.tree)) if res.tree is not None else "—",
            "Witness":  _witness(res),
        })
    return pd.DataFrame(rows, columns=["Label", "Regions", "Acyclic", "Admits", "Trees",
                                       "Admitting", "TreeDep", "Tree", "Witness"])


def to_text(df: pd.DataFrame) -> str:
    if df.empty:
        return "(no rows)\n"
    return df.to_string(index=False) + "\n"
