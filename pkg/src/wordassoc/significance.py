"""Document-level significance under a random-permutation null model.

A document containing a word pair is abstracted to a bag with f copies of
each pair word and length-2f indistinct fillers; the null model permutes the
bag uniformly. pi(fhat, f, length) at span threshold s is the probability
that a random arrangement attains a span-constrained frequency of at least
fhat. A document supports the pair at level epsilon when its observed
pi value falls below epsilon; Z counts supporting documents and E(Z) is the
expectation of that counter under the null.

pi values depend only on (length, f, fhat, s), so they are memoized in a
PiTable that can be precomputed offline and persisted. Small documents are
solved by exact enumeration of arrangements; longer ones by Monte Carlo with
a seed derived deterministically from (master seed, length, f, s), making
every value reproducible.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .cooccurrence import PairDocProfile, PairStatistics
from .errors import DataFormatError

PI_MAGIC = b"PITB"
PI_VERSION = 1

DEFAULT_MC_SAMPLES = 10_000
DEFAULT_EXACT_CUTOFF = 8

# Hard cap on arrangements the exact enumerator will visit.
_MAX_EXACT_ARRANGEMENTS = 250_000


@dataclass(frozen=True, order=True)
class PiKey:
    """Lookup key (length, f, fhat, s) for a null-model tail probability."""

    length: int
    f: int
    fhat: int
    s: int

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError(f"span threshold must be >= 1, got {self.s}")
        if not 0 <= self.fhat <= self.f:
            raise ValueError(f"need 0 <= fhat <= f, got fhat={self.fhat}, f={self.f}")
        if 2 * self.f > self.length:
            raise ValueError(f"need 2f <= length, got f={self.f}, length={self.length}")


@dataclass(frozen=True)
class PiProvenance:
    kind: str  # "exact" or "monte_carlo"
    samples: int = 0
    seed: int = 0


@dataclass
class NullModelConfig:
    mc_samples: int = DEFAULT_MC_SAMPLES
    rng_seed: int = 0
    exact_cutoff: int = DEFAULT_EXACT_CUTOFF

    def __post_init__(self) -> None:
        if self.mc_samples < 100:
            raise ValueError(f"mc_samples must be >= 100, got {self.mc_samples}")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in an unsigned 64-bit integer")
        if self.exact_cutoff < 0:
            raise ValueError("exact_cutoff must be >= 0")


class PiTable:
    """Memoized map PiKey -> (probability, provenance)."""

    def __init__(self) -> None:
        self._entries: dict[PiKey, tuple[float, PiProvenance]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: PiKey) -> bool:
        return key in self._entries

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PiTable) and self._entries == other._entries

    def value(self, key: PiKey) -> float:
        return self._entries[key][0]

    def provenance(self, key: PiKey) -> PiProvenance:
        return self._entries[key][1]

    def put(self, key: PiKey, value: float, provenance: PiProvenance) -> None:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"probability out of range: {value}")
        # Insert-if-absent: values for a key are deterministic, so keeping
        # the first write is safe even under concurrent computation.
        self._entries.setdefault(key, (value, provenance))

    def items(self) -> list[tuple[PiKey, float, PiProvenance]]:
        return [(k, v, p) for k, (v, p) in sorted(self._entries.items())]


# ------------------------------ exact path -----------------------------------


def _constrained_matches(xs: tuple[int, ...], ys: tuple[int, ...], s: int) -> int:
    """Greedy maximum disjoint count over cross pairs with span <= s."""
    intervals = []
    for px in xs:
        for py in ys:
            if abs(px - py) <= s:
                lo, hi = (px, py) if px < py else (py, px)
                intervals.append((hi, lo))
    intervals.sort()
    count = 0
    last_end = -1
    for hi, lo in intervals:
        if lo > last_end:
            count += 1
            last_end = hi
    return count


def exact_tail(length: int, f: int, s: int) -> list[float]:
    """Tail distribution of fhat over all arrangements: tail[v] = P(fhat >= v).

    Enumerates every placement of f x-positions and f y-positions among
    `length` slots (filler identity is irrelevant); all placements are
    equally likely under a uniform permutation of the bag.
    """
    if f == 0:
        return [1.0]
    total_arrangements = math.comb(length, f) * math.comb(length - f, f)
    if total_arrangements > _MAX_EXACT_ARRANGEMENTS:
        raise ValueError(
            f"exact enumeration too large ({total_arrangements} arrangements); use Monte Carlo"
        )
    counts = [0] * (f + 1)
    slots = range(length)
    for xs in combinations(slots, f):
        xset = set(xs)
        rest = [p for p in slots if p not in xset]
        for ys in combinations(rest, f):
            counts[_constrained_matches(xs, ys, s)] += 1
    total = sum(counts)
    tail = []
    acc = 0
    for v in range(f, -1, -1):
        acc += counts[v]
        tail.append(acc / total)
    tail.reverse()
    return tail


def pi_exact(key: PiKey, max_length: int = DEFAULT_EXACT_CUTOFF) -> float:
    """Exact null tail probability; refuses documents longer than max_length."""
    if key.length > max_length:
        raise ValueError(
            f"document length {key.length} exceeds exact cutoff {max_length}; use Monte Carlo"
        )
    return exact_tail(key.length, key.f, key.s)[key.fhat]


# ---------------------------- Monte Carlo path --------------------------------


def _group_rng(seed: int, length: int, f: int, s: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(length, f, s)))


def _sample_positions(rng: np.random.Generator, n: int, length: int, f: int) -> np.ndarray:
    """(n, 2f) array: per row, 2f distinct positions drawn uniformly.

    Columns [:f] are x-positions, [f:] are y-positions. Rejection sampling
    when 2f is small relative to length; full per-row permutations (via
    argsort of random keys) otherwise.
    """
    k = 2 * f
    if k * k <= length:
        out = rng.integers(0, length, size=(n, k))
        while True:
            srt = np.sort(out, axis=1)
            bad = (np.diff(srt, axis=1) == 0).any(axis=1)
            if not bad.any():
                return out
            out[bad] = rng.integers(0, length, size=(int(bad.sum()), k))
    chunks = []
    chunk_rows = max(1, 2_000_000 // max(length, 1))
    remaining = n
    while remaining > 0:
        rows = min(chunk_rows, remaining)
        keys = rng.random((rows, length))
        chunks.append(np.argsort(keys, axis=1)[:, :k])
        remaining -= rows
    return np.concatenate(chunks, axis=0)


def _fhat_two_pairs(xs: np.ndarray, ys: np.ndarray, s: int) -> np.ndarray:
    """Vectorized fhat for f == 2: values in {0, 1, 2} per row."""
    spans = np.abs(xs[:, :, None] - ys[:, None, :])  # (n, 2, 2): span of (x_i, y_j)
    ok = spans <= s
    any_ok = ok.any(axis=(1, 2))
    lo = np.minimum(xs[:, :, None], ys[:, None, :])
    hi = np.maximum(xs[:, :, None], ys[:, None, :])

    def disjoint(i1, j1, i2, j2):
        return (hi[:, i1, j1] < lo[:, i2, j2]) | (hi[:, i2, j2] < lo[:, i1, j1])

    # Two disjoint occurrences must use distinct x's and y's, so only the
    # two perfect matchings can realize fhat = 2.
    match_a = ok[:, 0, 0] & ok[:, 1, 1] & disjoint(0, 0, 1, 1)
    match_b = ok[:, 0, 1] & ok[:, 1, 0] & disjoint(0, 1, 1, 0)
    return np.where(match_a | match_b, 2, np.where(any_ok, 1, 0))


def mc_tail(length: int, f: int, s: int, samples: int, seed: int) -> list[float]:
    """Monte Carlo tail distribution of fhat; deterministic for fixed seed.

    One batch of arrangements per (length, f, s) serves every fhat level,
    which keeps the stored values monotone in fhat by construction.
    """
    if f == 0:
        return [1.0]
    rng = _group_rng(seed, length, f, s)
    positions = _sample_positions(rng, samples, length, f)
    xs, ys = positions[:, :f], positions[:, f:]
    if f == 1:
        values = (np.abs(xs[:, 0] - ys[:, 0]) <= s).astype(np.int64)
    elif f == 2:
        values = _fhat_two_pairs(xs, ys, s)
    else:
        values = np.fromiter(
            (_constrained_matches(tuple(x), tuple(y), s) for x, y in zip(xs, ys)),
            dtype=np.int64,
            count=samples,
        )
    counts = np.bincount(values, minlength=f + 1)
    tail_counts = counts[::-1].cumsum()[::-1]
    return [float(c) / samples for c in tail_counts]


def pi_monte_carlo(key: PiKey, config: NullModelConfig) -> float:
    """Sampled null tail probability for one key."""
    tail = mc_tail(key.length, key.f, key.s, config.mc_samples, config.rng_seed)
    return tail[key.fhat]


# ------------------------------- dispatcher ----------------------------------


def pi(key: PiKey, table: PiTable, config: NullModelConfig) -> float:
    """Memoized pi lookup; on a miss, computes and stores the whole
    (length, f, s) group so sibling fhat levels become lookups too."""
    if key in table:
        return table.value(key)
    if key.length <= config.exact_cutoff:
        tail = exact_tail(key.length, key.f, key.s)
        provenance = PiProvenance("exact")
    else:
        tail = mc_tail(key.length, key.f, key.s, config.mc_samples, config.rng_seed)
        provenance = PiProvenance("monte_carlo", config.mc_samples, config.rng_seed)
    for v, value in enumerate(tail):
        table.put(PiKey(key.length, key.f, v, key.s), value, provenance)
    return table.value(key)


def epsilon_significant(
    profile: PairDocProfile,
    s: int,
    epsilon: float,
    table: PiTable,
    config: NullModelConfig,
) -> bool:
    """True iff the document's pi value falls strictly below epsilon."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    key = PiKey(profile.length, profile.f, profile.fhat, s)
    return pi(key, table, config) < epsilon


def compute_z(
    stats: PairStatistics,
    epsilon: float,
    table: PiTable,
    config: NullModelConfig,
) -> int:
    """Number of documents that support the pair at level epsilon."""
    return sum(
        1
        for profile in stats.profiles
        if epsilon_significant(profile, stats.s, epsilon, table, config)
    )


def expected_z(
    stats: PairStatistics,
    epsilon: float,
    table: PiTable,
    config: NullModelConfig,
) -> float:
    """Expectation of the Z counter under the null.

    Per document, the null probability of support is the probability that a
    random arrangement lands in the significant region {v : pi(v) < epsilon}.
    Since pi is nonincreasing in v, that region is an upper tail and its
    probability is pi at its smallest member (0 when the region is empty),
    so each term is < epsilon and E(Z) <= epsilon * K.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    total = 0.0
    for profile in stats.profiles:
        for v in range(profile.f + 1):
            value = pi(PiKey(profile.length, profile.f, v, stats.s), table, config)
            if value < epsilon:
                total += value
                break
    return total


# ------------------------------ persistence ----------------------------------

_RECORD = struct.Struct("<IIIIdBQQ")
_PROVENANCE_TAGS = {"exact": 0, "monte_carlo": 1}
_PROVENANCE_KINDS = {tag: kind for kind, tag in _PROVENANCE_TAGS.items()}


def save_pi_table(table: PiTable, path: str | Path) -> None:
    buf = io.BytesIO()
    buf.write(PI_MAGIC)
    buf.write(struct.pack("<I", PI_VERSION))
    entries = table.items()
    buf.write(struct.pack("<Q", len(entries)))
    for key, value, provenance in entries:
        buf.write(
            _RECORD.pack(
                key.length,
                key.f,
                key.fhat,
                key.s,
                value,
                _PROVENANCE_TAGS[provenance.kind],
                provenance.samples,
                provenance.seed,
            )
        )
    Path(path).write_bytes(buf.getvalue())


def load_pi_table(path: str | Path) -> PiTable:
    data = Path(path).read_bytes()
    if data[:4] != PI_MAGIC:
        raise DataFormatError(f"{path}: bad magic {data[:4]!r}, expected {PI_MAGIC!r}")
    if len(data) < 16:
        raise DataFormatError(f"{path}: truncated header")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != PI_VERSION:
        raise DataFormatError(f"{path}: unsupported pi-table version {version}")
    (count,) = struct.unpack_from("<Q", data, 8)
    expected_size = 16 + count * _RECORD.size
    if len(data) != expected_size:
        raise DataFormatError(
            f"{path}: expected {expected_size} bytes for {count} entries, found {len(data)}"
        )
    table = PiTable()
    offset = 16
    for _ in range(count):
        length, f, fhat, s, value, tag, samples, seed = _RECORD.unpack_from(data, offset)
        offset += _RECORD.size
        if tag not in _PROVENANCE_KINDS:
            raise DataFormatError(f"{path}: unknown provenance tag {tag}")
        table.put(
            PiKey(length, f, fhat, s), value, PiProvenance(_PROVENANCE_KINDS[tag], samples, seed)
        )
    return table


def build_pi_table(
    max_length: int,
    max_f: int,
    spans: list[int],
    config: NullModelConfig,
    table: PiTable | None = None,
) -> PiTable:
    """Precompute pi for every key with length <= max_length, f <= max_f."""
    table = table if table is not None else PiTable()
    for length in range(2, max_length + 1):
        for f in range(1, min(max_f, length // 2) + 1):
            for s in spans:
                pi(PiKey(length, f, f, s), table, config)
    return table
