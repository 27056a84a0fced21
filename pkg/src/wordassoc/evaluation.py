"""Evaluation harness: gold datasets, rank correlation, cross-validation.

The protocol mirrors a standard word-association benchmark: score every gold
pair with a measure, Spearman-correlate against the human scores, and report
the mean over k cross-validation test folds, with the (s, delta, epsilon)
parameters picked per fold by grid search on the training folds. A summary
statistic, the average deviation, compares measures across datasets: for
each dataset the deviation is the gap to the best measure on that dataset,
averaged over datasets.

Gold pairs containing a word absent from the corpus are kept, not dropped:
they score as the undefined sentinel, which ranks below all defined scores
and ties with other undefined pairs. This keeps dataset size constant
across measures.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from .cooccurrence import pair_statistics
from .corpus import CorpusIndex, tokenize
from .errors import DataFormatError
from .measures import (
    MEASURE_PARAMS,
    MeasureConfig,
    MeasureId,
    ScoreResult,
    score_from_stats,
)
from .significance import NullModelConfig, PiTable

DEFAULT_S_VALUES = (5, 10, 20, 30, 40, 50)
DEFAULT_DELTA_VALUES = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_EPSILON_VALUES = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class GoldEntry:
    word1: str
    word2: str
    human_score: float


@dataclass
class GoldDataset:
    name: str
    entries: list[GoldEntry]

    def __post_init__(self) -> None:
        if len(self.entries) < 2:
            raise ValueError(f"dataset {self.name!r} needs >= 2 entries")
        seen = set()
        for entry in self.entries:
            pair = (entry.word1, entry.word2)
            if pair in seen:
                raise ValueError(f"dataset {self.name!r} has duplicate pair {pair}")
            seen.add(pair)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def pairs(self) -> list[tuple[str, str]]:
        return [(e.word1, e.word2) for e in self.entries]

    @property
    def human_scores(self) -> list[float]:
        return [e.human_score for e in self.entries]


def normalize_word(word: str) -> str:
    """Apply the corpus tokenization rule; the word must survive as one token."""
    tokens = tokenize(word)
    if len(tokens) != 1:
        raise DataFormatError(
            f"word {word!r} does not normalize to a single token (got {tokens})"
        )
    return tokens[0]


def load_gold(path: str | Path, name: str | None = None) -> GoldDataset:
    """Read a three-column TSV (word1, word2, human score); '#' comments."""
    name = name if name is not None else Path(path).stem
    entries = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            columns = stripped.split("\t")
            if len(columns) != 3:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 3 tab-separated columns, got {len(columns)}"
                )
            try:
                score = float(columns[2])
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: third column is not a number: {columns[2]!r}"
                ) from None
            try:
                word1 = normalize_word(columns[0])
                word2 = normalize_word(columns[1])
            except DataFormatError as err:
                raise DataFormatError(f"{path}:{lineno}: {err}") from None
            entries.append(GoldEntry(word1, word2, score))
    try:
        return GoldDataset(name, entries)
    except ValueError as err:
        raise DataFormatError(f"{path}: {err}") from None


# ------------------------------ rank correlation ------------------------------


def average_ranks(values: list[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their rank range.

    The undefined sentinel (-inf) sorts below every defined value and ties
    with other sentinels, so no special handling is needed here.
    """
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        # ranks i+1 .. j+1 share their mean; the mean of consecutive
        # integers is a half-integer, exactly representable.
        shared = (i + j + 2) / 2
        for pos in range(i, j + 1):
            ranks[order[pos]] = shared
        i = j + 1
    return ranks


def spearman(xs: list[float], ys: list[float]) -> float:
    """Pearson correlation of average ranks."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least 2 observations")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    n = len(rx)
    mean_x = sum(rx) / n
    mean_y = sum(ry) / n
    sxy = sxx = syy = 0.0
    for a, b in zip(rx, ry):
        da = a - mean_x
        db = b - mean_y
        sxy += da * db
        sxx += da * da
        syy += db * db
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation undefined for constant input")
    return sxy / math.sqrt(sxx * syy)


# --------------------------------- grid ---------------------------------------


@dataclass(frozen=True)
class GridPoint:
    s: int
    delta: float
    epsilon: float


@dataclass
class GridSpec:
    s_values: tuple[int, ...] = DEFAULT_S_VALUES
    delta_values: tuple[float, ...] = DEFAULT_DELTA_VALUES
    epsilon_values: tuple[float, ...] = DEFAULT_EPSILON_VALUES

    def __post_init__(self) -> None:
        self.s_values = tuple(sorted(set(self.s_values)))
        self.delta_values = tuple(sorted(set(self.delta_values)))
        self.epsilon_values = tuple(sorted(set(self.epsilon_values)))
        if not (self.s_values and self.delta_values and self.epsilon_values):
            raise ValueError("grid axes must be nonempty")
        if any(s < 1 for s in self.s_values):
            raise ValueError("span values must be >= 1")
        for axis, vals in (("delta", self.delta_values), ("epsilon", self.epsilon_values)):
            if any(not 0 < v < 1 for v in vals):
                raise ValueError(f"{axis} values must lie in (0, 1)")

    def points(self) -> Iterator[GridPoint]:
        """Ascending in s, then delta, then epsilon; ties in grid search are
        broken by this order."""
        for s in self.s_values:
            for delta in self.delta_values:
                for epsilon in self.epsilon_values:
                    yield GridPoint(s, delta, epsilon)


def parse_grid_spec(text: str) -> GridSpec:
    """Parse "s=5,10;delta=0.5,0.7;epsilon=0.5"; "default" or "" keeps defaults."""
    text = text.strip().lower()
    if text in ("", "default"):
        return GridSpec()
    axes: dict[str, tuple] = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad grid component {part!r}; expected axis=v1,v2,...")
        axis, _, raw = part.partition("=")
        axis = axis.strip()
        if axis not in ("s", "delta", "epsilon"):
            raise ValueError(f"unknown grid axis {axis!r}; expected s, delta, epsilon")
        cast = int if axis == "s" else float
        try:
            axes[f"{axis}_values"] = tuple(cast(v) for v in raw.split(","))
        except ValueError:
            raise ValueError(f"bad values for grid axis {axis!r}: {raw!r}") from None
    return GridSpec(**axes)


# ------------------------------- scoring cache --------------------------------


class PairScorer:
    """Memoizing scorer shared across grid points, folds, and measures.

    Pair statistics are cached per (word1, word2, s) and final scores per
    (measure, effective parameters, pair). Measures that ignore delta or
    epsilon share cache slots across those axes, so a grid sweep costs one
    scoring pass per parameter the measure actually reads. A single pi
    memo table backs every significance-based score.
    """

    def __init__(
        self,
        index: CorpusIndex,
        null_config: NullModelConfig | None = None,
        symmetrize: bool = False,
        pi_table: PiTable | None = None,
    ) -> None:
        self.index = index
        self.null_config = null_config if null_config is not None else NullModelConfig()
        self.symmetrize = symmetrize
        self.pi_table = pi_table if pi_table is not None else PiTable()
        self._stats: dict[tuple[str, str, int], object] = {}
        self._scores: dict[tuple, ScoreResult] = {}

    def effective_key(self, measure: MeasureId, point: GridPoint) -> tuple:
        """Grid point collapsed to the parameters the measure reads."""
        params = MEASURE_PARAMS[measure]
        return (
            measure.value,
            point.s,
            point.delta if "delta" in params else None,
            point.epsilon if "epsilon" in params else None,
        )

    def _stats_for(self, x: str, y: str, s: int):
        key = (x, y, s)
        found = self._stats.get(key)
        if found is None:
            found = pair_statistics(self.index, x, y, s)
            self._stats[key] = found
        return found

    def score_pair(self, measure: MeasureId, x: str, y: str, point: GridPoint) -> ScoreResult:
        key = self.effective_key(measure, point) + (x, y)
        found = self._scores.get(key)
        if found is not None:
            return found
        config = MeasureConfig(
            s=point.s,
            delta=point.delta,
            epsilon=point.epsilon,
            null_config=self.null_config,
        )
        result = score_from_stats(measure, self._stats_for(x, y, point.s), config, self.pi_table)
        if self.symmetrize:
            swapped = score_from_stats(
                measure, self._stats_for(y, x, point.s), config, self.pi_table
            )
            if swapped.value < result.value:
                result = swapped
        self._scores[key] = result
        return result

    def score_vector(
        self, measure: MeasureId, pairs: list[tuple[str, str]], point: GridPoint
    ) -> list[float]:
        return [self.score_pair(measure, x, y, point).value for x, y in pairs]


# ------------------------- grid search / cross-validation ---------------------


def _best_point(
    scorer: PairScorer,
    measure: MeasureId,
    pairs: list[tuple[str, str]],
    human: list[float],
    grid: GridSpec,
) -> tuple[GridPoint, float]:
    best_point = None
    best_corr = -math.inf
    seen: dict[tuple, float | None] = {}
    for point in grid.points():
        ekey = scorer.effective_key(measure, point)
        if ekey not in seen:
            try:
                seen[ekey] = spearman(scorer.score_vector(measure, pairs, point), human)
            except ValueError:
                # Constant scores carry no ranking signal; skip the point.
                seen[ekey] = None
        corr = seen[ekey]
        # Strict improvement only: earlier grid points win ties.
        if corr is not None and corr > best_corr:
            best_point, best_corr = point, corr
    if best_point is None:
        raise ValueError(
            f"{measure.value}: constant scores at every grid point; nothing to rank"
        )
    return best_point, best_corr


def grid_search(
    train: GoldDataset,
    measure: MeasureId,
    grid: GridSpec,
    index: CorpusIndex,
    null_config: NullModelConfig | None = None,
    scorer: PairScorer | None = None,
) -> GridPoint:
    """Parameters maximizing training Spearman; ties go to the earlier point
    in grid order (s, then delta, then epsilon ascending). Points where the
    measure is constant over the training pairs are skipped as unrankable."""
    scorer = scorer if scorer is not None else PairScorer(index, null_config)
    point, _ = _best_point(scorer, measure, train.pairs, train.human_scores, grid)
    return point


@dataclass(frozen=True)
class FoldResult:
    fold: int
    params: GridPoint
    train_correlation: float
    test_correlation: float


@dataclass
class CrossValidationResult:
    measure: MeasureId
    dataset: str
    mean_correlation: float
    folds: list[FoldResult]
    assignments: list[int]  # fold id per dataset entry, original order


def make_folds(n: int, k: int, seed: int) -> list[list[int]]:
    """Seeded shuffle then contiguous near-equal slices; the first n % k
    folds get one extra element."""
    if n < k:
        raise ValueError(f"dataset of size {n} is too small for {k} folds")
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    folds = []
    base, extra = divmod(n, k)
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(indices[start : start + size])
        start += size
    return folds


def cross_validate(
    dataset: GoldDataset,
    measure: MeasureId,
    grid: GridSpec,
    index: CorpusIndex,
    k: int = 5,
    seed: int = 0,
    null_config: NullModelConfig | None = None,
    scorer: PairScorer | None = None,
) -> CrossValidationResult:
    """k-fold cross-validation: per fold, grid-search parameters on the
    other k-1 folds, then correlate the held-out fold. Deterministic given
    (dataset, grid, seed, index, null seed)."""
    scorer = scorer if scorer is not None else PairScorer(index, null_config)
    folds = make_folds(len(dataset), k, seed)
    assignments = [0] * len(dataset)
    for fold_id, members in enumerate(folds):
        for entry_index in members:
            assignments[entry_index] = fold_id
    pairs = dataset.pairs
    human = dataset.human_scores
    results = []
    for fold_id, test_idx in enumerate(folds):
        train_idx = [i for fold in folds[:fold_id] + folds[fold_id + 1 :] for i in fold]
        train_pairs = [pairs[i] for i in train_idx]
        train_human = [human[i] for i in train_idx]
        point, train_corr = _best_point(scorer, measure, train_pairs, train_human, grid)
        test_pairs = [pairs[i] for i in test_idx]
        test_human = [human[i] for i in test_idx]
        test_corr = spearman(scorer.score_vector(measure, test_pairs, point), test_human)
        results.append(FoldResult(fold_id, point, train_corr, test_corr))
    mean = sum(r.test_correlation for r in results) / len(results)
    return CrossValidationResult(measure, dataset.name, mean, results, assignments)


def average_deviation(results: dict[str, dict[str, float]]) -> dict[str, float]:
    """Per measure: mean over datasets of (best correlation on that dataset
    minus this measure's correlation). Requires a complete matrix."""
    if not results:
        raise ValueError("empty result matrix")
    measures = list(results)
    datasets = list(results[measures[0]])
    if not datasets:
        raise ValueError("result matrix has no datasets")
    for measure in measures:
        if list(results[measure]) != datasets:
            raise ValueError(f"incomplete matrix: {measure!r} differs in datasets")
    deviations = {measure: 0.0 for measure in measures}
    for dataset in datasets:
        best = max(results[measure][dataset] for measure in measures)
        for measure in measures:
            deviations[measure] += best - results[measure][dataset]
    return {measure: total / len(datasets) for measure, total in deviations.items()}


# --------------------------------- reporting ----------------------------------


@dataclass
class EvalReport:
    k: int
    seed: int
    grid: GridSpec
    measures: list[str]
    datasets: list[str]
    correlations: dict[str, dict[str, float]]  # measure -> dataset -> mean corr
    avg_deviation: dict[str, float]
    folds: dict[str, dict[str, list[FoldResult]]]  # dataset -> measure -> folds
    assignments: dict[str, list[int]]  # dataset -> fold id per entry
    errors: dict[str, str] = field(default_factory=dict)  # dataset -> message

    def to_json_dict(self) -> dict:
        def fold_dict(measure: str, result: FoldResult) -> dict:
            params = MEASURE_PARAMS[MeasureId(measure)]
            return {
                "fold": result.fold,
                "s": result.params.s,
                "delta": result.params.delta if "delta" in params else None,
                "epsilon": result.params.epsilon if "epsilon" in params else None,
                "train_correlation": result.train_correlation,
                "test_correlation": result.test_correlation,
            }

        return {
            "k": self.k,
            "seed": self.seed,
            "grid": {
                "s": list(self.grid.s_values),
                "delta": list(self.grid.delta_values),
                "epsilon": list(self.grid.epsilon_values),
            },
            "measures": list(self.measures),
            "datasets": list(self.datasets),
            "correlations": {
                m: {d: self.correlations[m][d] for d in self.datasets} for m in self.measures
            },
            "average_deviation": dict(self.avg_deviation),
            "folds": {
                d: {
                    m: [fold_dict(m, r) for r in self.folds[d][m]] for m in self.measures
                }
                for d in self.datasets
            },
            "fold_assignments": {d: list(self.assignments[d]) for d in self.datasets},
            "errors": dict(self.errors),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"Cross-validated Spearman correlation (k={self.k}, seed={self.seed})",
            "",
        ]
        headers = ["measure"] + list(self.datasets) + ["avg_dev"]
        rows = [headers]
        for measure in self.measures:
            row = [measure]
            row += [f"{self.correlations[measure][d]:.4f}" for d in self.datasets]
            row.append(f"{self.avg_deviation[measure]:.4f}")
            rows.append(row)
        lines += _align(rows)
        lines.append("")
        lines.append("Parameters chosen per fold:")
        detail = [["dataset", "measure", "fold", "s", "delta", "epsilon", "train", "test"]]
        for dataset in self.datasets:
            for measure in self.measures:
                params = MEASURE_PARAMS[MeasureId(measure)]
                for result in self.folds[dataset][measure]:
                    detail.append(
                        [
                            dataset,
                            measure,
                            str(result.fold),
                            str(result.params.s),
                            f"{result.params.delta:.2f}" if "delta" in params else "-",
                            f"{result.params.epsilon:.2f}" if "epsilon" in params else "-",
                            f"{result.train_correlation:.4f}",
                            f"{result.test_correlation:.4f}",
                        ]
                    )
        lines += _align(detail)
        if self.errors:
            lines.append("")
            lines.append("Datasets skipped:")
            for dataset in sorted(self.errors):
                lines.append(f"  {dataset}: {self.errors[dataset]}")
        return "\n".join(lines) + "\n"


def _align(rows: list[list[str]]) -> list[str]:
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    return [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]


def evaluate(
    index: CorpusIndex,
    datasets: list[GoldDataset],
    measures: list[MeasureId],
    grid: GridSpec,
    k: int = 5,
    seed: int = 0,
    null_config: NullModelConfig | None = None,
    symmetrize: bool = False,
    map_fn: Callable = map,
) -> EvalReport:
    """Cross-validate every measure on every dataset and assemble the report.

    A dataset that fails (too small for k folds, constant scores) is
    recorded under errors and excluded from the matrix; others continue.
    map_fn may be a thread pool's map; tasks are independent and results
    are keyed by position, so any order-preserving map is safe.
    """
    if not datasets:
        raise ValueError("no datasets given")
    if not measures:
        raise ValueError("no measures given")
    correlations: dict[str, dict[str, float]] = {m.value: {} for m in measures}
    folds: dict[str, dict[str, list[FoldResult]]] = {}
    assignments: dict[str, list[int]] = {}
    errors: dict[str, str] = {}
    kept: list[str] = []

    def run_dataset(dataset: GoldDataset):
        scorer = PairScorer(index, null_config, symmetrize=symmetrize)
        per_measure = []
        for measure in measures:
            per_measure.append(
                cross_validate(dataset, measure, grid, index, k, seed, scorer=scorer)
            )
        return per_measure

    def try_dataset(dataset: GoldDataset):
        try:
            return run_dataset(dataset)
        except ValueError as err:
            return err

    for dataset, outcome in zip(datasets, map_fn(try_dataset, datasets)):
        if isinstance(outcome, ValueError):
            errors[dataset.name] = str(outcome)
            continue
        kept.append(dataset.name)
        folds[dataset.name] = {}
        for result in outcome:
            correlations[result.measure.value][dataset.name] = result.mean_correlation
            folds[dataset.name][result.measure.value] = result.folds
        assignments[dataset.name] = outcome[0].assignments
    if not kept:
        raise DataFormatError(
            "no dataset could be evaluated: "
            + "; ".join(f"{name}: {msg}" for name, msg in sorted(errors.items()))
        )
    deviation = average_deviation(correlations)
    return EvalReport(
        k=k,
        seed=seed,
        grid=grid,
        measures=[m.value for m in measures],
        datasets=kept,
        correlations=correlations,
        avg_deviation=deviation,
        folds=folds,
        assignments=assignments,
        errors=errors,
    )
