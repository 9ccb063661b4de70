"""Dense labeled score matrices and their bit-exact text persistence.

A ScoreMatrix holds one score per candidate (L1 word, L2 word) pair: rows are
L1 words, columns are L2 words.  Matrices are immutable after construction and
every downstream stage (combination, rescoring, assignment, evaluation)
consumes and produces them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

MATRIX_FORMAT_MAGIC = "#cogmatrix"
MATRIX_FORMAT_VERSION = "v1"


def _check_labels(labels: tuple[str, ...], kind: str) -> None:
    seen: set[str] = set()
    for lab in labels:
        if lab in seen:
            raise ValueError(f"duplicate {kind} label: {lab!r}")
        seen.add(lab)


@dataclass(frozen=True)
class ScoreMatrix:
    """Dense n1 x n2 matrix of finite pair scores with word labels.

    Immutable: the scores array is made read-only at construction, so
    instances are safe to share across threads.
    """

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2:
            raise ValueError(f"scores must be 2-dimensional, got shape {scores.shape}")
        if scores.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(
                f"scores shape {scores.shape} does not match labels "
                f"({len(self.row_labels)}, {len(self.col_labels)})"
            )
        if scores.size and not np.isfinite(scores).all():
            raise ValueError("scores must be finite (no NaN or infinity)")
        _check_labels(self.row_labels, "row")
        _check_labels(self.col_labels, "column")
        if scores.flags.writeable:
            if not scores.flags.owndata:
                scores = scores.copy()
            scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    @property
    def n_rows(self) -> int:
        return len(self.row_labels)

    @property
    def n_cols(self) -> int:
        return len(self.col_labels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.scores.shape

    @cached_property
    def row_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.row_labels)}

    @cached_property
    def col_index(self) -> dict[str, int]:
        return {lab: j for j, lab in enumerate(self.col_labels)}

    def with_scores(self, scores: np.ndarray) -> "ScoreMatrix":
        """New matrix with the same labels and different scores."""
        return ScoreMatrix(self.row_labels, self.col_labels, scores)


@dataclass(frozen=True)
class GoldPairs:
    """Reference set of (L1 word, L2 word) pairs for a one-to-one relation."""

    pairs: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        pairs = frozenset(tuple(p) for p in self.pairs)
        l1_seen: set[str] = set()
        l2_seen: set[str] = set()
        for l1, l2 in sorted(pairs):
            if l1 in l1_seen:
                raise ValueError(f"gold pairs are not one-to-one: L1 word {l1!r} repeats")
            if l2 in l2_seen:
                raise ValueError(f"gold pairs are not one-to-one: L2 word {l2!r} repeats")
            l1_seen.add(l1)
            l2_seen.add(l2)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def l1_words(self) -> set[str]:
        return {l1 for l1, _ in self.pairs}

    def l2_words(self) -> set[str]:
        return {l2 for _, l2 in self.pairs}


def normalize_min_max(m: ScoreMatrix) -> ScoreMatrix:
    """Affinely map scores onto [0, 1]; an all-equal matrix maps to 0.5.

    The map is order-preserving on every row and column, and it guarantees
    the non-negative scores that rank rescoring requires.
    """
    if m.scores.size == 0:
        raise ValueError("empty matrix")
    lo = float(m.scores.min())
    hi = float(m.scores.max())
    if hi == lo:
        return m.with_scores(np.full(m.shape, 0.5))
    return m.with_scores((m.scores - lo) / (hi - lo))


def _format_score(v: float) -> str:
    # repr() of a Python float is the shortest decimal that round-trips.
    return repr(v)


def save_matrix(m: ScoreMatrix, path: str | Path) -> None:
    """Write a matrix in the versioned tab-separated text format.

    Layout: header ``#cogmatrix v1 <n1> <n2>``, one line of tab-separated
    column labels, then one line per row (label followed by the scores).
    Scores are printed as shortest round-trippable decimals, so
    ``load_matrix(save_matrix(m))`` reproduces the float64 bits exactly.
    """
    for lab in (*m.row_labels, *m.col_labels):
        if lab == "" or "\t" in lab or "\n" in lab:
            raise ValueError(f"label not representable in matrix format: {lab!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{MATRIX_FORMAT_MAGIC} {MATRIX_FORMAT_VERSION} {m.n_rows} {m.n_cols}\n")
        f.write("\t".join(m.col_labels) + "\n")
        for label, row in zip(m.row_labels, m.scores):
            f.write(label)
            f.write("\t")
            f.write("\t".join(map(_format_score, row.tolist())))
            f.write("\n")


def load_matrix(path: str | Path) -> ScoreMatrix:
    """Read a matrix written by save_matrix.

    Raises ValueError naming the first malformed line.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="\n") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def bad(lineno: int, msg: str) -> ValueError:
        return ValueError(f"{path}:{lineno}: {msg}")

    if not lines:
        raise bad(1, "empty file, expected '#cogmatrix v1 <n1> <n2>' header")
    head = lines[0].split(" ")
    if len(head) != 4 or head[0] != MATRIX_FORMAT_MAGIC or head[1] != MATRIX_FORMAT_VERSION:
        raise bad(1, "expected header '#cogmatrix v1 <n1> <n2>'")
    try:
        n1, n2 = int(head[2]), int(head[3])
    except ValueError:
        raise bad(1, f"non-integer dimensions in header: {lines[0]!r}") from None
    if n1 < 0 or n2 < 0:
        raise bad(1, "negative dimensions in header")
    if len(lines) != 2 + n1:
        raise bad(len(lines), f"expected {2 + n1} lines for a {n1}x{n2} matrix, found {len(lines)}")

    col_labels = lines[1].split("\t") if lines[1] != "" else []
    if len(col_labels) != n2:
        raise bad(2, f"expected {n2} column labels, found {len(col_labels)}")

    row_labels: list[str] = []
    seen_rows: set[str] = set()
    scores = np.empty((n1, n2), dtype=np.float64)
    for i in range(n1):
        lineno = 3 + i
        fields = lines[2 + i].split("\t")
        if len(fields) != 1 + n2:
            raise bad(lineno, f"expected row label plus {n2} scores, found {len(fields)} fields")
        label = fields[0]
        if label in seen_rows:
            raise bad(lineno, f"duplicate row label: {label!r}")
        seen_rows.add(label)
        row_labels.append(label)
        for j, tok in enumerate(fields[1:]):
            try:
                v = float(tok)
            except ValueError:
                raise bad(lineno, f"unparseable score {tok!r}") from None
            if not math.isfinite(v):
                raise bad(lineno, f"non-finite score {tok!r}")
            scores[i, j] = v
    return ScoreMatrix(tuple(row_labels), tuple(col_labels), scores)


def matrices_share_labels(matrices: Iterable[ScoreMatrix]) -> bool:
    """True when all matrices have identical row and column labels."""
    it = iter(matrices)
    try:
        first = next(it)
    except StopIteration:
        return True
    return all(
        m.row_labels == first.row_labels and m.col_labels == first.col_labels for m in it
    )
