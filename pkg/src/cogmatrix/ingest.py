"""Parsing of corpus-derived artifact files and candidate-universe construction.

File formats (UTF-8, LF line endings, ``#``-prefixed comment lines ignored
except for the named header directives):

* frequency file:    ``#total <N>`` header, then ``word<TAB>count`` lines
* daily counts file: ``#days <T>`` header, then ``word<TAB>c1,c2,...,cT`` lines
* co-occurrence:     ``word<TAB>context_word<TAB>count`` lines
* gold pairs:        ``l1_word<TAB>l2_word`` lines

Inputs are assumed pre-lemmatized; lemmatization is upstream of this tool.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .matrix import GoldPairs

log = logging.getLogger(__name__)

UNIVERSE_MODES = ("standard", "large")


@dataclass(frozen=True)
class LexiconSide:
    """One language's vocabulary with corpus statistics.

    ``daily_counts`` vectors all have length ``n_days``; words missing from
    the daily or co-occurrence data implicitly have a zero vector / an empty
    profile (see :meth:`daily` and :meth:`cooc_profile`).
    """

    words: tuple[str, ...]
    total_tokens: int
    freq: dict[str, int]
    daily_counts: dict[str, np.ndarray] = field(default_factory=dict)
    cooc: dict[str, dict[str, int]] = field(default_factory=dict)
    n_days: int = 0

    def __post_init__(self) -> None:
        if self.total_tokens <= 0:
            raise ValueError("total_tokens must be positive")
        if any(c < 0 for c in self.freq.values()):
            raise ValueError("frequency counts must be non-negative")
        if sum(self.freq.values()) > self.total_tokens:
            raise ValueError("frequency counts exceed total_tokens")
        daily: dict[str, np.ndarray] = {}
        for w, vec in self.daily_counts.items():
            vec = np.asarray(vec, dtype=np.int64)
            if vec.ndim != 1 or len(vec) != self.n_days:
                raise ValueError(
                    f"daily counts for {w!r} have length {vec.size}, expected {self.n_days}"
                )
            if (vec < 0).any():
                raise ValueError(f"negative daily count for {w!r}")
            if vec.flags.writeable:
                if not vec.flags.owndata:
                    vec = vec.copy()
                vec.setflags(write=False)
            daily[w] = vec
        object.__setattr__(self, "daily_counts", daily)
        for w, profile in self.cooc.items():
            if any(c < 0 for c in profile.values()):
                raise ValueError(f"negative co-occurrence count for {w!r}")

    def rel_freq(self, word: str) -> float:
        return self.freq.get(word, 0) / self.total_tokens

    def daily(self, word: str) -> np.ndarray:
        vec = self.daily_counts.get(word)
        if vec is None:
            return np.zeros(self.n_days, dtype=np.int64)
        return vec

    def cooc_profile(self, word: str) -> dict[str, int]:
        return self.cooc.get(word, {})

    # Marginals of the co-occurrence table, shared by all context scoring.
    @cached_property
    def cooc_word_totals(self) -> dict[str, int]:
        return {w: sum(p.values()) for w, p in self.cooc.items()}

    @cached_property
    def cooc_context_totals(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for profile in self.cooc.values():
            for ctx, c in profile.items():
                totals[ctx] = totals.get(ctx, 0) + c
        return totals

    @cached_property
    def cooc_grand_total(self) -> int:
        return sum(self.cooc_word_totals.values())


@dataclass(frozen=True)
class SeedSet:
    """Known pairs reserved for weight training, disjoint from evaluation."""

    pairs: GoldPairs

    def __len__(self) -> int:
        return len(self.pairs)


def _read_lines(path: str | Path) -> list[str]:
    with open(path, "r", encoding="utf-8", newline="\n") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _parse_count(tok: str, path: Path, lineno: int, what: str) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise ValueError(f"{path}:{lineno}: unparseable {what} {tok!r}") from None
    if value < 0:
        raise ValueError(f"{path}:{lineno}: negative {what} {tok!r}")
    return value


def _load_freq(path: Path) -> tuple[list[str], dict[str, int], int | None]:
    words: list[str] = []
    freq: dict[str, int] = {}
    total: int | None = None
    for lineno, line in enumerate(_read_lines(path), start=1):
        if line.startswith("#total "):
            total = _parse_count(line[len("#total "):].strip(), path, lineno, "total")
            continue
        if line.startswith("#") or line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'word<TAB>count', got {line!r}")
        word, tok = fields
        if word in freq:
            raise ValueError(f"{path}:{lineno}: duplicate word {word!r}")
        freq[word] = _parse_count(tok, path, lineno, "count")
        words.append(word)
    if total is None:
        raise ValueError(f"{path}: missing '#total <N>' header")
    return words, freq, total


def _load_daily(path: Path) -> tuple[dict[str, np.ndarray], int]:
    n_days: int | None = None
    daily: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if line.startswith("#days "):
            n_days = _parse_count(line[len("#days "):].strip(), path, lineno, "day count")
            continue
        if line.startswith("#") or line == "":
            continue
        if n_days is None:
            raise ValueError(f"{path}:{lineno}: data before '#days <T>' header")
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'word<TAB>c1,c2,...', got {line!r}")
        word, csv = fields
        if word in daily:
            raise ValueError(f"{path}:{lineno}: duplicate word {word!r}")
        toks = csv.split(",") if csv != "" else []
        if len(toks) != n_days:
            raise ValueError(
                f"{path}:{lineno}: expected {n_days} daily counts for {word!r}, got {len(toks)}"
            )
        daily[word] = np.array(
            [_parse_count(t, path, lineno, "daily count") for t in toks], dtype=np.int64
        )
    if n_days is None:
        raise ValueError(f"{path}: missing '#days <T>' header")
    return daily, n_days


def _load_cooc(path: Path) -> dict[str, dict[str, int]]:
    cooc: dict[str, dict[str, int]] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if line.startswith("#") or line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(
                f"{path}:{lineno}: expected 'word<TAB>context<TAB>count', got {line!r}"
            )
        word, ctx, tok = fields
        count = _parse_count(tok, path, lineno, "count")
        cooc.setdefault(word, {})
        cooc[word][ctx] = cooc[word].get(ctx, 0) + count
    return cooc


def load_lexicon(
    freq_path: str | Path,
    daily_path: str | Path | None = None,
    cooc_path: str | Path | None = None,
) -> LexiconSide:
    """Load one language side from its statistics files.

    The frequency file defines the base vocabulary; words that appear only in
    the daily or co-occurrence files are appended with frequency 0.
    """
    words, freq, total = _load_freq(Path(freq_path))
    daily: dict[str, np.ndarray] = {}
    n_days = 0
    if daily_path is not None:
        daily, n_days = _load_daily(Path(daily_path))
    cooc: dict[str, dict[str, int]] = {}
    if cooc_path is not None:
        cooc = _load_cooc(Path(cooc_path))
    known = set(words)
    for extra in (*daily, *cooc):
        if extra not in known:
            known.add(extra)
            words.append(extra)
            freq[extra] = 0
    return LexiconSide(
        words=tuple(words),
        total_tokens=total,
        freq=freq,
        daily_counts=daily,
        cooc=cooc,
        n_days=n_days,
    )


def load_gold_pairs(path: str | Path) -> GoldPairs:
    """Read ``l1_word<TAB>l2_word`` lines into a one-to-one pair set."""
    path = Path(path)
    pairs: set[tuple[str, str]] = set()
    l1_seen: dict[str, int] = {}
    l2_seen: dict[str, int] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if line.startswith("#") or line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'l1_word<TAB>l2_word', got {line!r}")
        l1, l2 = fields
        if (l1, l2) in pairs:
            continue
        if l1 in l1_seen:
            raise ValueError(
                f"{path}:{lineno}: L1 word {l1!r} already paired on line {l1_seen[l1]}"
            )
        if l2 in l2_seen:
            raise ValueError(
                f"{path}:{lineno}: L2 word {l2!r} already paired on line {l2_seen[l2]}"
            )
        l1_seen[l1] = lineno
        l2_seen[l2] = lineno
        pairs.add((l1, l2))
    return GoldPairs(frozenset(pairs))


def save_gold_pairs(gold: GoldPairs, path: str | Path, comments: tuple[str, ...] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for comment in comments:
            f.write(f"# {comment}\n")
        for l1, l2 in sorted(gold.pairs):
            f.write(f"{l1}\t{l2}\n")


def split_seed(gold: GoldPairs, fraction: float, rng_seed: int) -> tuple[SeedSet, GoldPairs]:
    """Partition gold pairs into a training seed and an evaluation remainder.

    The seed gets ``floor(fraction * len(gold))`` pairs, chosen by a seeded
    shuffle, so the split is deterministic for a fixed ``rng_seed``.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    if len(gold) == 0:
        raise ValueError("gold pairs are empty")
    ordered = sorted(gold.pairs)
    n_seed = int(math.floor(fraction * len(ordered)))
    rng = np.random.default_rng(rng_seed)
    perm = rng.permutation(len(ordered))
    seed_pairs = frozenset(ordered[i] for i in perm[:n_seed])
    eval_pairs = frozenset(ordered[i] for i in perm[n_seed:])
    return SeedSet(GoldPairs(seed_pairs)), GoldPairs(eval_pairs)


def build_universe(
    lex1: LexiconSide | None,
    lex2: LexiconSide | None,
    gold: GoldPairs,
    mode: str = "standard",
    k: int = 10_000,
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Construct the candidate word sets X (L1) and Y (L2).

    ``standard`` mode uses exactly the gold words of each side.  ``large``
    mode takes the k most frequent lexicon words per side and unions in the
    gold words, modelling the realistic condition where most candidates have
    no match at all.  Order is deterministic: descending frequency with
    lexicographic tie-breaking (standard mode is the all-gold special case).
    """
    if mode not in UNIVERSE_MODES:
        raise ValueError(f"unknown universe mode {mode!r}; expected one of {UNIVERSE_MODES}")

    def side(lex: LexiconSide | None, gold_words: set[str], name: str) -> tuple[str, ...]:
        if lex is not None:
            for w in sorted(gold_words - set(lex.words)):
                log.warning("gold word %r missing from %s lexicon; using zero statistics", w, name)
        if mode == "standard":
            return tuple(sorted(gold_words))
        if k < 1:
            raise ValueError("k must be >= 1 in large mode")
        if lex is None:
            raise ValueError("large mode requires lexicons")
        by_freq = sorted(lex.words, key=lambda w: (-lex.freq.get(w, 0), w))
        chosen = set(by_freq[:k]) | gold_words
        return tuple(sorted(chosen, key=lambda w: (-(lex.freq.get(w, 0)), w)))

    return (
        side(lex1, gold.l1_words(), "L1"),
        side(lex2, gold.l2_words(), "L2"),
    )
