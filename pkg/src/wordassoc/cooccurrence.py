"""Span-constrained word-pair counting.

An occurrence of the pair (x, y) in one document is a pair of token
positions, one of x and one of y, in either order; its span is the absolute
position difference and its interval covers [min, max] inclusive. Two
occurrences are non-overlapped when their intervals are disjoint (which also
means they share no token position). Per document we record:

    f      maximum number of non-overlapped occurrences, any span
    fhat   maximum number of non-overlapped occurrences with span <= s

The corpus-level counts aggregate fhat: f(x,y) sums fhat over documents,
d(x,y) counts documents with fhat >= 1, and K counts documents containing
the pair at all.

Span convention: the constraint is span <= s everywhere, and both word
orders count alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import CorpusIndex, tokenize
from .errors import DataFormatError, UnsupportedPairError

BRUTE_FORCE_LIMIT = 36


@dataclass(frozen=True)
class PairOccurrence:
    pos_x: int
    pos_y: int

    @property
    def span(self) -> int:
        return abs(self.pos_y - self.pos_x)

    @property
    def interval(self) -> tuple[int, int]:
        return min(self.pos_x, self.pos_y), max(self.pos_x, self.pos_y)


@dataclass(frozen=True)
class PairDocProfile:
    """Per-document co-occurrence profile: length, f, and fhat at one s."""

    doc_id: int
    length: int
    f: int
    fhat: int


@dataclass
class PairStatistics:
    """Everything a measure can consume for one ordered pair at one s."""

    x: str
    y: str
    s: int
    fxy: int
    dxy: int
    k: int
    profiles: list[PairDocProfile] = field(default_factory=list)
    fx: int = 0
    fy: int = 0
    dx: int = 0
    dy: int = 0
    w: int = 0
    d: int = 0


def enumerate_pair_occurrences(
    positions_x: Sequence[int],
    positions_y: Sequence[int],
    span_limit: int | None = None,
) -> list[PairOccurrence]:
    """All cross pairs of positions with span <= span_limit (or all if None).

    Position lists must be sorted ascending and disjoint; a shared position
    would mean x == y, which the counting model does not define.
    """
    if set(positions_x) & set(positions_y):
        raise UnsupportedPairError("identical-word pairs are not supported")
    out = []
    for px in positions_x:
        for py in positions_y:
            if span_limit is None or abs(px - py) <= span_limit:
                out.append(PairOccurrence(px, py))
    return out


def max_nonoverlapped(occurrences: Sequence[PairOccurrence]) -> int:
    """Maximum number of pairwise-disjoint occurrence intervals.

    Greedy interval scheduling: scan intervals by right endpoint and take
    each one starting after the last taken endpoint. Optimal for this
    problem; see brute_force_max_nonoverlapped for the exhaustive check.
    """
    intervals = sorted((hi, lo) for lo, hi in (occ.interval for occ in occurrences))
    count = 0
    last_end = -1
    for hi, lo in intervals:
        if lo > last_end:
            count += 1
            last_end = hi
    return count


def brute_force_max_nonoverlapped(
    occurrences: Sequence[PairOccurrence],
    limit: int = BRUTE_FORCE_LIMIT,
) -> int:
    """Exhaustive-search oracle for max_nonoverlapped.

    Explores every subset of occurrences whose intervals are pairwise
    disjoint and returns the largest cardinality found. Refuses inputs
    beyond `limit` occurrences; infeasible branches are cut early, which
    keeps the search tractable for the short documents it is meant for.
    """
    if len(occurrences) > limit:
        raise ValueError(f"too many occurrences for exhaustive search (> {limit})")
    intervals = [occ.interval for occ in occurrences]

    def explore(i: int, taken: list[tuple[int, int]]) -> int:
        if i == len(intervals):
            return len(taken)
        best = explore(i + 1, taken)
        lo, hi = intervals[i]
        if all(hi < tlo or lo > thi for tlo, thi in taken):
            taken.append((lo, hi))
            best = max(best, explore(i + 1, taken))
            taken.pop()
        return best

    return explore(0, [])


def pair_profile(
    positions_x: Sequence[int],
    positions_y: Sequence[int],
    s: int,
    doc_id: int = 0,
    length: int = 0,
) -> PairDocProfile:
    """Profile one document containing both words of the pair."""
    occurrences = enumerate_pair_occurrences(positions_x, positions_y)
    f = max_nonoverlapped(occurrences)
    fhat = max_nonoverlapped([occ for occ in occurrences if occ.span <= s])
    return PairDocProfile(doc_id=doc_id, length=length, f=f, fhat=fhat)


def pair_statistics(index: CorpusIndex, x: str, y: str, s: int) -> PairStatistics:
    """Corpus-level pair counts for (x, y) at span threshold s.

    Unknown words yield all-zero pair counts rather than an error. x == y
    is rejected.
    """
    if x == y:
        raise UnsupportedPairError("identical-word pairs are not supported")
    if s < 1:
        raise ValueError(f"span threshold must be >= 1, got {s}")
    fx, dx = index.unigram_stats(x)
    fy, dy = index.unigram_stats(y)
    stats = PairStatistics(
        x=x, y=y, s=s, fxy=0, dxy=0, k=0,
        fx=fx, fy=fy, dx=dx, dy=dy, w=index.W, d=index.D,
    )
    postings_x = index.postings_for(x)
    postings_y = index.postings_for(y)
    if not postings_x or not postings_y:
        return stats
    ix = iy = 0
    while ix < len(postings_x) and iy < len(postings_y):
        doc_x, pos_x = postings_x[ix]
        doc_y, pos_y = postings_y[iy]
        if doc_x < doc_y:
            ix += 1
        elif doc_y < doc_x:
            iy += 1
        else:
            profile = pair_profile(
                pos_x, pos_y, s, doc_id=doc_x, length=index.doc_lengths[doc_x]
            )
            stats.profiles.append(profile)
            stats.k += 1
            stats.fxy += profile.fhat
            if profile.fhat >= 1:
                stats.dxy += 1
            ix += 1
            iy += 1
    return stats


def load_pairs(path: str | Path) -> list[tuple[str, str]]:
    """Read a two-column TSV of word pairs; '#' lines are comments."""
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            columns = stripped.split("\t")
            if len(columns) != 2:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 2 tab-separated columns, got {len(columns)}"
                )
            pairs.append((columns[0].strip(), columns[1].strip()))
    return pairs
