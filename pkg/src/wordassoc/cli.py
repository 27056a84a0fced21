"""Command-line interface: index building, batch scoring, evaluation, and
null-model table precomputation.

Defaults follow the recommended no-training configuration: span threshold
s=20, delta=0.7. There is no canonical default for epsilon; 0.5 is this
tool's choice and can always be overridden with --epsilon.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or malformed
input, unwritable output), 3 internal error. Every run is reproducible from
its flag set plus input files; seeds are explicit and echoed into outputs.
"""

from __future__ import annotations

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .cooccurrence import load_pairs
from .corpus import CorpusIndex, build_index, read_corpus
from .errors import WordAssocError
from .evaluation import (
    GridSpec,
    PairScorer,
    evaluate,
    load_gold,
    normalize_word,
    parse_grid_spec,
)
from .measures import (
    ALL_MEASURES,
    MeasureConfig,
    MeasureId,
    parse_measure_id,
    score,
)
from .plots import render_report_figures
from .significance import (
    DEFAULT_EXACT_CUTOFF,
    DEFAULT_MC_SAMPLES,
    NullModelConfig,
    PiTable,
    build_pi_table,
    load_pi_table,
    save_pi_table,
)

THREADS_ENV = "ASSOC_THREADS"


def _resolve_threads(option: int | None) -> int:
    if option is not None:
        if option < 1:
            raise click.UsageError("--threads must be >= 1")
        return option
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise click.UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise click.UsageError(f"{THREADS_ENV} must be >= 1")
        return value
    return os.cpu_count() or 1


def _parse_measures(text: str) -> list[MeasureId]:
    if text.strip().lower() == "all":
        return list(ALL_MEASURES)
    try:
        return [parse_measure_id(part) for part in text.split(",") if part.strip()]
    except ValueError as err:
        raise click.UsageError(str(err)) from None


def _measure_config(s: int, delta: float, epsilon: float, null: NullModelConfig,
                    symmetrize: bool) -> MeasureConfig:
    try:
        return MeasureConfig(
            s=s, delta=delta, epsilon=epsilon, null_config=null, symmetrize=symmetrize
        )
    except ValueError as err:
        raise click.UsageError(str(err)) from None


@click.group()
def cli() -> None:
    """Corpus word-association toolkit: index, score, evaluate."""


@cli.command(name="index")
@click.option("--corpus", required=True, type=click.Path(exists=True),
              help="Corpus path: a directory of .txt files or a single file.")
@click.option("--format", "fmt", required=True, type=click.Choice(["dir", "blankline"]),
              help="dir: one document per file; blankline: blank-line separated.")
@click.option("--out", required=True, type=click.Path(), help="Output index file.")
@click.option("--json-out", type=click.Path(), default=None,
              help="Also write a JSON rendering of the index.")
def cmd_index(corpus: str, fmt: str, out: str, json_out: str | None) -> None:
    """Tokenize a corpus and write a binary index of counts and positions."""
    documents = read_corpus(corpus, fmt)
    index = build_index(documents)
    index.save(out)
    if json_out is not None:
        index.save_json(json_out)
    click.echo(f"indexed: W={index.W} tokens, D={index.D} documents, "
               f"vocabulary={len(index.vocab)}")
    if index.D == 0:
        click.echo("warning: corpus is empty", err=True)


@cli.command(name="score")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True),
              help="Two-column TSV of word pairs; '#' lines are comments.")
@click.option("--measure", "measure_spec", default="all", show_default=True,
              help="Comma-separated measure ids, or 'all'.")
@click.option("--s", "s", default=20, show_default=True, type=int,
              help="Span threshold in words.")
@click.option("--delta", default=0.7, show_default=True, type=float,
              help="Corpus-significance parameter in (0,1).")
@click.option("--epsilon", default=0.5, show_default=True, type=float,
              help="Document-significance parameter in (0,1); 0.5 is this "
                   "tool's own default, there is no standard recommendation.")
@click.option("--pi-table", "pi_table_path", type=click.Path(exists=True), default=None,
              help="Precomputed null-model table; missing entries are computed on the fly.")
@click.option("--seed", default=0, show_default=True, type=int,
              help="Monte Carlo seed for null-model sampling.")
@click.option("--symmetrize", is_flag=True, default=False,
              help="Score both word orders and keep the minimum.")
@click.option("--threads", type=int, default=None,
              help=f"Worker threads (default: {THREADS_ENV} or machine parallelism).")
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_score(index_path: str, pairs_path: str, measure_spec: str, s: int, delta: float,
              epsilon: float, pi_table_path: str | None, seed: int, symmetrize: bool,
              threads: int | None, out_path: str) -> None:
    """Score word pairs; one TSV row per (pair, measure), input order."""
    measures = _parse_measures(measure_spec)
    null = NullModelConfig(rng_seed=seed)
    config = _measure_config(s, delta, epsilon, null, symmetrize)
    index = CorpusIndex.load(index_path)
    pairs = [
        (normalize_word(a), normalize_word(b)) for a, b in load_pairs(pairs_path)
    ]
    table = load_pi_table(pi_table_path) if pi_table_path is not None else PiTable()
    workers = _resolve_threads(threads)

    def score_pair(pair: tuple[str, str]) -> list[str]:
        rows = []
        for measure in measures:
            result = score(measure, pair, index, config, table)
            rendered = f"{result.value:.12g}" if result.defined else "undef"
            rows.append("\t".join(
                (pair[0], pair[1], measure.value, str(s), f"{delta:g}", f"{epsilon:g}",
                 rendered)
            ))
        return rows

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scored = list(pool.map(score_pair, pairs))
    else:
        scored = [score_pair(pair) for pair in pairs]

    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(f"# seed={seed} symmetrize={symmetrize}\n")
        handle.write("# word1\tword2\tmeasure\ts\tdelta\tepsilon\tscore\n")
        for rows in scored:
            for row in rows:
                handle.write(row + "\n")
    click.echo(f"scored {len(pairs)} pairs x {len(measures)} measures -> {out_path}")


@cli.command(name="eval")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_specs", required=True, multiple=True,
              help="Gold TSV path(s); repeatable, comma lists accepted.")
@click.option("--measures", "measure_spec", default="all", show_default=True)
@click.option("--cv", "k", default=5, show_default=True, type=int,
              help="Number of cross-validation folds.")
@click.option("--grid", "grid_spec", default="default", show_default=True,
              help='Grid as "s=5,10;delta=0.5,0.7;epsilon=0.5" or "default".')
@click.option("--seed", default=0, show_default=True, type=int,
              help="Seed for fold shuffling and null-model sampling.")
@click.option("--mc-samples", default=DEFAULT_MC_SAMPLES, show_default=True, type=int,
              help="Monte Carlo samples per null-model group.")
@click.option("--symmetrize", is_flag=True, default=False)
@click.option("--threads", type=int, default=None,
              help=f"Worker threads (default: {THREADS_ENV} or machine parallelism).")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render correlation and deviation charts next to the report.")
@click.option("--report", "report_path", required=True, type=click.Path(),
              help="Report JSON path; an aligned text table is written alongside.")
def cmd_eval(index_path: str, gold_specs: tuple[str, ...], measure_spec: str, k: int,
             grid_spec: str, seed: int, mc_samples: int, symmetrize: bool,
             threads: int | None, figures: bool, report_path: str) -> None:
    """Cross-validated evaluation of measures against human-ranked gold pairs."""
    measures = _parse_measures(measure_spec)
    if k < 2:
        raise click.UsageError("--cv must be >= 2")
    try:
        grid = parse_grid_spec(grid_spec)
        null = NullModelConfig(mc_samples=mc_samples, rng_seed=seed)
    except ValueError as err:
        raise click.UsageError(str(err)) from None
    index = CorpusIndex.load(index_path)
    paths = [p for spec in gold_specs for p in spec.split(",") if p.strip()]
    datasets = []
    seen_names = set()
    for path in paths:
        dataset = load_gold(path)
        if dataset.name in seen_names:
            raise click.UsageError(
                f"duplicate dataset name {dataset.name!r}; rename one of the files"
            )
        seen_names.add(dataset.name)
        datasets.append(dataset)
    workers = _resolve_threads(threads)
    if workers > 1 and len(datasets) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            report = evaluate(index, datasets, measures, grid, k=k, seed=seed,
                              null_config=null, symmetrize=symmetrize, map_fn=pool.map)
    else:
        report = evaluate(index, datasets, measures, grid, k=k, seed=seed,
                          null_config=null, symmetrize=symmetrize)

    report_file = Path(report_path)
    report_file.write_text(report.to_json(), encoding="utf-8")
    text_file = report_file.with_suffix(".txt")
    text_file.write_text(report.to_text(), encoding="utf-8")
    written = [str(report_file), str(text_file)]
    if figures:
        written += [str(p) for p in render_report_figures(report, report_file)]
    for name, message in sorted(report.errors.items()):
        click.echo(f"warning: dataset {name} skipped: {message}", err=True)
    click.echo(report.to_text(), nl=False)
    click.echo("wrote " + ", ".join(written))


@cli.command(name="pitable")
@click.option("--max-len", required=True, type=int, help="Largest document length to cover.")
@click.option("--max-f", default=3, show_default=True, type=int,
              help="Largest per-document pair frequency to cover.")
@click.option("--spans", default="5,10,20,30,40,50", show_default=True,
              help="Comma-separated span thresholds.")
@click.option("--samples", default=DEFAULT_MC_SAMPLES, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--exact-cutoff", default=DEFAULT_EXACT_CUTOFF, show_default=True, type=int,
              help="Lengths up to this are enumerated exactly; longer ones sampled.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Also dump the table as CSV for inspection.")
def cmd_pitable(max_len: int, max_f: int, spans: str, samples: int, seed: int,
                exact_cutoff: int, out_path: str, csv_path: str | None) -> None:
    """Precompute the null-model probability table for offline reuse."""
    if max_len < 2:
        raise click.UsageError("--max-len must be >= 2")
    if max_f < 1:
        raise click.UsageError("--max-f must be >= 1")
    try:
        span_values = sorted({int(v) for v in spans.split(",") if v.strip()})
    except ValueError:
        raise click.UsageError(f"bad --spans value: {spans!r}") from None
    if not span_values or any(s < 1 for s in span_values):
        raise click.UsageError("--spans needs integers >= 1")
    try:
        null = NullModelConfig(mc_samples=samples, rng_seed=seed, exact_cutoff=exact_cutoff)
    except ValueError as err:
        raise click.UsageError(str(err)) from None
    table = build_pi_table(max_len, max_f, span_values, null)
    save_pi_table(table, out_path)
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8") as handle:
            handle.write("length,f,fhat,s,value,provenance,samples,seed\n")
            for key, value, provenance in table.items():
                handle.write(
                    f"{key.length},{key.f},{key.fhat},{key.s},{value:.12g},"
                    f"{provenance.kind},{provenance.samples},{provenance.seed}\n"
                )
    click.echo(f"pi table: {len(table)} entries (seed={seed}, samples={samples}) "
               f"-> {out_path}")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as err:
        return err.exit_code
    except click.ClickException as err:
        err.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (WordAssocError, OSError) as err:
        click.echo(f"data error: {err}", err=True)
        return 2
    except Exception as err:  # noqa: BLE001 - the CLI boundary reports, not raises
        click.echo(f"internal error: {type(err).__name__}: {err}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
