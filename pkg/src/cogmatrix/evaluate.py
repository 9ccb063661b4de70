"""Precision-recall evaluation of score matrices against gold pairs.

The curve protocol: sort every candidate pair by score descending (ties
broken by row label, then column label) and walk down the list, emitting one
(threshold, precision, recall) point per rank position.  Two summaries are
reported per curve: MaxF1, the best harmonic mean of precision and recall on
the curve, and the 11-point interpolated average precision, the mean of the
interpolated precision at recall 0.0, 0.1, ..., 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np

from .matrix import GoldPairs, ScoreMatrix
from .rescore import RescoreMethod


@dataclass(frozen=True)
class PRCurve:
    """Ordered (threshold, precision, recall) triples along a score sweep."""

    thresholds: np.ndarray
    precisions: np.ndarray
    recalls: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.thresholds, dtype=np.float64)
        p = np.asarray(self.precisions, dtype=np.float64)
        r = np.asarray(self.recalls, dtype=np.float64)
        if not (t.ndim == p.ndim == r.ndim == 1) or not (len(t) == len(p) == len(r)):
            raise ValueError("thresholds, precisions, recalls must be 1-D and equal length")
        if len(r) and (np.diff(r) < 0).any():
            raise ValueError("recall must be non-decreasing along the sweep")
        if len(p) and ((p < 0).any() or (p > 1).any() or (r < 0).any() or (r > 1).any()):
            raise ValueError("precision and recall must lie in [0, 1]")
        for arr, name in ((t, "thresholds"), (p, "precisions"), (r, "recalls")):
            if arr.flags.writeable:
                if not arr.flags.owndata:
                    arr = arr.copy()
                arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.thresholds)

    @property
    def max_f1(self) -> float:
        return max_f1(self)

    @property
    def iap11(self) -> float:
        return iap11(self)


class ReportRow(NamedTuple):
    method: str
    max_f1: float
    iap11: float


def pr_curve(m: ScoreMatrix, gold: GoldPairs) -> PRCurve:
    """Full precision-recall curve over every candidate pair of the matrix.

    Recall is measured against all of ``gold``, so it reaches 1.0 exactly
    when every gold pair is a candidate.  Requires at least one gold pair
    among the candidates.
    """
    if m.scores.size == 0:
        raise ValueError("empty matrix")
    gold_idx = [
        (m.row_index[l1], m.col_index[l2])
        for l1, l2 in gold.pairs
        if l1 in m.row_index and l2 in m.col_index
    ]
    if not gold_idx:
        raise ValueError("no gold pairs in candidate universe")

    # Reorder rows and columns by label so that a stable sort on the flat
    # score array breaks ties by (row label, column label).
    row_perm = np.argsort(np.asarray(m.row_labels), kind="stable")
    col_perm = np.argsort(np.asarray(m.col_labels), kind="stable")
    scores = m.scores[np.ix_(row_perm, col_perm)]
    is_gold = np.zeros(m.shape, dtype=bool)
    rows, cols = zip(*gold_idx)
    is_gold[list(rows), list(cols)] = True
    is_gold = is_gold[np.ix_(row_perm, col_perm)]

    flat = scores.ravel()
    order = np.argsort(-flat, kind="stable")
    hits = np.cumsum(is_gold.ravel()[order])
    positions = np.arange(1, len(flat) + 1, dtype=np.float64)
    return PRCurve(
        thresholds=flat[order],
        precisions=hits / positions,
        recalls=hits / len(gold.pairs),
    )


def interpolated_precision(curve: PRCurve, r: float) -> float:
    """Highest precision at any recall level >= r (0 when none exists)."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("recall level must be in [0, 1]")
    qualifying = curve.precisions[curve.recalls >= r]
    if qualifying.size == 0:
        return 0.0
    return float(qualifying.max())


def iap11(curve: PRCurve) -> float:
    """Mean interpolated precision at recall 0.0, 0.1, ..., 1.0."""
    if len(curve) == 0:
        raise ValueError("empty curve")
    levels = np.arange(11) / 10.0
    return float(np.mean([interpolated_precision(curve, r) for r in levels]))


def max_f1(curve: PRCurve) -> float:
    """Maximum harmonic mean of precision and recall over the curve."""
    if len(curve) == 0:
        raise ValueError("empty curve")
    p, r = curve.precisions, curve.recalls
    denom = p + r
    f1 = np.divide(2.0 * p * r, denom, out=np.zeros_like(denom), where=denom > 0)
    return float(f1.max())


def compare_methods(
    matrices: Mapping[RescoreMethod | str, ScoreMatrix],
    gold: GoldPairs,
    out_dir: str | Path | None = None,
) -> list[ReportRow]:
    """Evaluate several method matrices against one gold set.

    Returns one (method, MaxF1, IAP11) row per matrix, ordered canonically
    (known methods first, extras in given order).  When ``out_dir`` is set,
    a curve file is written per method.
    """
    def name_of(key) -> str:
        return key.value if isinstance(key, RescoreMethod) else str(key)

    canonical = [m.value for m in RescoreMethod]
    keys = sorted(
        matrices,
        key=lambda k: canonical.index(name_of(k)) if name_of(k) in canonical else len(canonical),
    )
    rows = []
    for key in keys:
        curve = pr_curve(matrices[key], gold)
        rows.append(ReportRow(name_of(key), max_f1(curve), iap11(curve)))
        if out_dir is not None:
            save_curve(curve, Path(out_dir) / f"curve_{name_of(key)}.tsv", name_of(key))
    return rows


def save_curve(curve: PRCurve, path: str | Path, method: str) -> None:
    """Write ``threshold<TAB>precision<TAB>recall`` lines for plotting."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#prcurve v1 method={method}\n")
        for t, p, r in zip(curve.thresholds, curve.precisions, curve.recalls):
            f.write(f"{float(t)!r}\t{float(p)!r}\t{float(r)!r}\n")


def load_curve(path: str | Path) -> tuple[PRCurve, str]:
    """Read a curve file back; returns the curve and its method name."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="\n") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith("#prcurve v1 method="):
        raise ValueError(f"{path}:1: expected header '#prcurve v1 method=<name>'")
    method = lines[0][len("#prcurve v1 method="):]
    triples = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated values")
        try:
            triples.append(tuple(float(x) for x in fields))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: unparseable value in {line!r}") from None
    arr = np.array(triples, dtype=np.float64).reshape(-1, 3)
    return PRCurve(arr[:, 0], arr[:, 1], arr[:, 2]), method


def save_report(rows: list[ReportRow], path: str | Path) -> None:
    """Write ``method<TAB>maxf1<TAB>iap11`` lines, four decimal places."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for method, best_f1, avg_p in rows:
            f.write(f"{method}\t{best_f1:.4f}\t{avg_p:.4f}\n")
