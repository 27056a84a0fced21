"""Association measures over pair statistics.

Sixteen measures share one calling convention: pure functions of a
PairStatistics value (plus Z and E(Z) where document-level significance is
involved) returning a ScoreResult. Natural log is used throughout; rankings
are invariant to the base.

Undefined scores (log of a zero numerator, or a zero T-test denominator)
are encoded as ScoreResult(value=-inf, defined=False). The -inf value makes
them sort below every defined score with no special casing downstream.

The penalized variants (cPMI, cPMId, cPMIz, CSR) anchor their penalty term
on the FIRST word of the pair: the underlying bound conditions on
occurrences of x, and evaluation pairs are ordered (stimulus, response).
Pass symmetrize=True to score both orders and keep the minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .cooccurrence import PairStatistics, pair_statistics
from .corpus import CorpusIndex
from .significance import NullModelConfig, PiTable, compute_z, expected_z

NEG_INFINITY = float("-inf")


class MeasureId(str, Enum):
    PMI = "pmi"
    CPMI = "cpmi"
    PMID = "pmid"
    CPMID = "cpmid"
    PMIZ = "pmiz"
    CPMIZ = "cpmiz"
    CSR = "csr"
    PMI2 = "pmi2"
    PMI2D = "pmi2d"
    NPMI = "npmi"
    NPMID = "npmid"
    DICE = "dice"
    JACCARD = "jaccard"
    CHI2 = "chi2"
    LLR = "llr"
    TTEST = "ttest"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


ALL_MEASURES: tuple[MeasureId, ...] = tuple(MeasureId)

# Parameters each measure actually reads; the rest are ignored, which lets
# grid search collapse equivalent grid points.
MEASURE_PARAMS: dict[MeasureId, tuple[str, ...]] = {
    MeasureId.PMI: ("s",),
    MeasureId.CPMI: ("s", "delta"),
    MeasureId.PMID: ("s",),
    MeasureId.CPMID: ("s", "delta"),
    MeasureId.PMIZ: ("s", "epsilon"),
    MeasureId.CPMIZ: ("s", "delta", "epsilon"),
    MeasureId.CSR: ("s", "delta", "epsilon"),
    MeasureId.PMI2: ("s",),
    MeasureId.PMI2D: ("s",),
    MeasureId.NPMI: ("s",),
    MeasureId.NPMID: ("s",),
    MeasureId.DICE: ("s",),
    MeasureId.JACCARD: ("s",),
    MeasureId.CHI2: ("s",),
    MeasureId.LLR: ("s",),
    MeasureId.TTEST: ("s",),
}

# Measures whose score depends on the document-significance counter Z.
NEEDS_Z: frozenset[MeasureId] = frozenset(
    {MeasureId.PMIZ, MeasureId.CPMIZ, MeasureId.CSR}
)


def parse_measure_id(text: str) -> MeasureId:
    try:
        return MeasureId(text.strip().lower())
    except ValueError:
        valid = ", ".join(m.value for m in ALL_MEASURES)
        raise ValueError(f"unknown measure id {text!r}; valid ids: {valid}") from None


@dataclass(frozen=True)
class ScoreResult:
    value: float
    defined: bool = True


UNDEFINED = ScoreResult(NEG_INFINITY, False)


@dataclass
class MeasureConfig:
    s: int = 20
    delta: float = 0.7
    epsilon: float = 0.5
    null_config: NullModelConfig = field(default_factory=NullModelConfig)
    symmetrize: bool = False

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError(f"span threshold must be >= 1, got {self.s}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 observed table over presence/absence of the pair words."""

    n11: int
    n12: int
    n21: int
    n22: int

    @classmethod
    def from_counts(cls, fxy: int, fx: int, fy: int, w: int) -> "ContingencyTable":
        table = cls(fxy, fx - fxy, fy - fxy, w - fx - fy + fxy)
        for cell in (table.n11, table.n12, table.n21, table.n22):
            if cell < 0:
                raise ValueError(
                    f"inconsistent counts: fxy={fxy}, fx={fx}, fy={fy}, W={w}"
                )
        return table

    @property
    def total(self) -> int:
        return self.n11 + self.n12 + self.n21 + self.n22

    def cells(self) -> list[tuple[int, int, int]]:
        """(observed, row marginal, column marginal) for each of the 4 cells."""
        row1 = self.n11 + self.n12
        row2 = self.n21 + self.n22
        col1 = self.n11 + self.n21
        col2 = self.n12 + self.n22
        return [
            (self.n11, row1, col1),
            (self.n12, row1, col2),
            (self.n21, row2, col1),
            (self.n22, row2, col2),
        ]


def penalized_expectation(expected: float, anchor_count: int, delta: float) -> float:
    """expected + sqrt(anchor) * sqrt(ln(delta) / -2).

    delta = 1.0 is accepted so callers can force the penalty to exactly zero
    (ln 1 == 0 in floating point); pipeline configs keep delta strictly
    inside (0, 1).
    """
    if anchor_count < 0:
        raise ValueError(f"anchor count must be >= 0, got {anchor_count}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    return expected + math.sqrt(anchor_count) * math.sqrt(math.log(delta) / -2.0)


def _require_positive(**counts: float) -> None:
    for name, count in counts.items():
        if count <= 0:
            raise ValueError(f"{name} must be > 0, got {count}")


def _log_ratio(observed: float, expected: float) -> ScoreResult:
    if observed <= 0:
        return UNDEFINED
    return ScoreResult(math.log(observed / expected))


def score_pmi(stats: PairStatistics) -> ScoreResult:
    _require_positive(fx=stats.fx, fy=stats.fy, W=stats.w)
    return _log_ratio(stats.fxy, stats.fx * stats.fy / stats.w)


def score_pmid(stats: PairStatistics) -> ScoreResult:
    _require_positive(dx=stats.dx, dy=stats.dy, D=stats.d)
    return _log_ratio(stats.dxy, stats.dx * stats.dy / stats.d)


def score_pmiz(stats: PairStatistics, z: int) -> ScoreResult:
    _require_positive(dx=stats.dx, dy=stats.dy, D=stats.d)
    return _log_ratio(z, stats.dx * stats.dy / stats.d)


def score_cpmi(stats: PairStatistics, delta: float) -> ScoreResult:
    _require_positive(fx=stats.fx, fy=stats.fy, W=stats.w)
    expected = penalized_expectation(stats.fx * stats.fy / stats.w, stats.fx, delta)
    return _log_ratio(stats.fxy, expected)


def score_cpmid(stats: PairStatistics, delta: float) -> ScoreResult:
    _require_positive(dx=stats.dx, dy=stats.dy, D=stats.d)
    expected = penalized_expectation(stats.dx * stats.dy / stats.d, stats.dx, delta)
    return _log_ratio(stats.dxy, expected)


def score_cpmiz(stats: PairStatistics, z: int, delta: float) -> ScoreResult:
    _require_positive(dx=stats.dx, dy=stats.dy, D=stats.d)
    expected = penalized_expectation(stats.dx * stats.dy / stats.d, stats.dx, delta)
    return _log_ratio(z, expected)


def score_csr(stats: PairStatistics, z: int, ez: float, delta: float) -> ScoreResult:
    """Plain ratio Z / (E(Z) + penalty); no log. Z = 0 scores 0, and a pair
    with no co-occurring documents (K = 0, E(Z) = 0) scores 0 by convention."""
    if z < 0 or ez < 0 or stats.k < 0:
        raise ValueError("Z, E(Z), K must be >= 0")
    if z == 0:
        return ScoreResult(0.0)
    denominator = penalized_expectation(ez, stats.k, delta)
    if denominator <= 0:
        # Only reachable with delta = 1 and a zero E(Z) estimate.
        return ScoreResult(math.inf)
    return ScoreResult(z / denominator)


def _flavor_counts(stats: PairStatistics, flavor: str) -> tuple[int, int, int, int]:
    if flavor == "word":
        return stats.fxy, stats.fx, stats.fy, stats.w
    if flavor == "document":
        return stats.dxy, stats.dx, stats.dy, stats.d
    raise ValueError(f"flavor must be 'word' or 'document', got {flavor!r}")


def score_pmi2(stats: PairStatistics, flavor: str = "word") -> ScoreResult:
    obs, ux, uy, _total = _flavor_counts(stats, flavor)
    _require_positive(ux=ux, uy=uy)
    if obs <= 0:
        return UNDEFINED
    return ScoreResult(math.log(obs * obs / (ux * uy)))


def score_npmi(stats: PairStatistics, flavor: str = "word") -> ScoreResult:
    obs, ux, uy, total = _flavor_counts(stats, flavor)
    _require_positive(ux=ux, uy=uy, total=total)
    if obs <= 0:
        return UNDEFINED
    if obs >= total:
        # ln(total/obs) = 0: normalization divides by zero.
        return UNDEFINED
    return ScoreResult(math.log(obs / (ux * uy / total)) / math.log(total / obs))


def score_dice(stats: PairStatistics) -> ScoreResult:
    _require_positive(fx=stats.fx, fy=stats.fy)
    return ScoreResult(2.0 * stats.fxy / (stats.fx + stats.fy))


def score_jaccard(stats: PairStatistics) -> ScoreResult:
    _require_positive(fx=stats.fx, fy=stats.fy)
    return ScoreResult(stats.fxy / (stats.fx + stats.fy - stats.fxy))


def score_chi2(stats: PairStatistics) -> ScoreResult:
    table = ContingencyTable.from_counts(stats.fxy, stats.fx, stats.fy, stats.w)
    total = table.total
    _require_positive(W=total)
    value = 0.0
    for observed, row_sum, col_sum in table.cells():
        expected = row_sum * col_sum / total
        if expected > 0:
            diff = observed - expected
            value += diff * diff / expected
    return ScoreResult(value)


def score_llr(stats: PairStatistics) -> ScoreResult:
    """Mutual-information form: sum over cells of p * ln(p / (p_row * p_col));
    cells with zero joint probability contribute 0."""
    table = ContingencyTable.from_counts(stats.fxy, stats.fx, stats.fy, stats.w)
    total = table.total
    _require_positive(W=total)
    value = 0.0
    for observed, row_sum, col_sum in table.cells():
        if observed > 0:
            p = observed / total
            value += p * math.log(p / ((row_sum / total) * (col_sum / total)))
    return ScoreResult(value)


def score_ttest(stats: PairStatistics) -> ScoreResult:
    _require_positive(W=stats.w)
    if stats.fxy <= 0:
        return UNDEFINED
    variance = stats.fxy * (1.0 - stats.fxy / stats.w)
    if variance <= 0:
        return UNDEFINED
    expected = stats.fx * stats.fy / stats.w
    return ScoreResult((stats.fxy - expected) / math.sqrt(variance))


def score_from_stats(
    measure: MeasureId,
    stats: PairStatistics,
    config: MeasureConfig,
    table: PiTable | None = None,
) -> ScoreResult:
    """Score precomputed pair statistics. Pairs with an unseen word score
    undefined for every measure except CSR, which scores 0 (no evidence)."""
    try:
        if stats.fx == 0 or stats.fy == 0:
            return ScoreResult(0.0) if measure is MeasureId.CSR else UNDEFINED
        if measure in NEEDS_Z:
            table = table if table is not None else PiTable()
            z = compute_z(stats, config.epsilon, table, config.null_config)
            if measure is MeasureId.PMIZ:
                return score_pmiz(stats, z)
            if measure is MeasureId.CPMIZ:
                return score_cpmiz(stats, z, config.delta)
            ez = expected_z(stats, config.epsilon, table, config.null_config)
            return score_csr(stats, z, ez, config.delta)
        if measure is MeasureId.PMI:
            return score_pmi(stats)
        if measure is MeasureId.CPMI:
            return score_cpmi(stats, config.delta)
        if measure is MeasureId.PMID:
            return score_pmid(stats)
        if measure is MeasureId.CPMID:
            return score_cpmid(stats, config.delta)
        if measure is MeasureId.PMI2:
            return score_pmi2(stats, "word")
        if measure is MeasureId.PMI2D:
            return score_pmi2(stats, "document")
        if measure is MeasureId.NPMI:
            return score_npmi(stats, "word")
        if measure is MeasureId.NPMID:
            return score_npmi(stats, "document")
        if measure is MeasureId.DICE:
            return score_dice(stats)
        if measure is MeasureId.JACCARD:
            return score_jaccard(stats)
        if measure is MeasureId.CHI2:
            return score_chi2(stats)
        if measure is MeasureId.LLR:
            return score_llr(stats)
        if measure is MeasureId.TTEST:
            return score_ttest(stats)
    except ValueError as err:
        raise ValueError(f"{measure.value}: {err}") from err
    raise ValueError(f"unhandled measure id: {measure!r}")


def score(
    measure: MeasureId,
    pair: tuple[str, str],
    index: CorpusIndex,
    config: MeasureConfig,
    table: PiTable | None = None,
) -> ScoreResult:
    """Dispatcher: pair statistics at config.s, then the requested measure.

    Deterministic given (index, config, null seed). With config.symmetrize,
    both word orders are scored and the smaller value wins.
    """
    x, y = pair
    result = score_from_stats(measure, pair_statistics(index, x, y, config.s), config, table)
    if config.symmetrize:
        swapped = score_from_stats(
            measure, pair_statistics(index, y, x, config.s), config, table
        )
        if swapped.value < result.value:
            result = swapped
    return result
