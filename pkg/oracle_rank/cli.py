"""
Command-line interface: evaluate, gen, rank and stats-compare

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import logging
import sys
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError

from oracle_rank.core.config import settings
from oracle_rank.core.logging import configure_logging
from oracle_rank.deps.exceptions import ConfigurationError, OracleRankError, PipelineStageError
from oracle_rank.deps.utils import parse_int_list, parse_int_range
from oracle_rank.schemas.pipeline import PipelineConfig, ProvenanceFilter
from oracle_rank.schemas.ranking import RankingMethod
from oracle_rank.schemas.synthetic import SyntheticSpec
from oracle_rank.services.pipeline import EvaluationPipeline
from oracle_rank.services.report_compare import RUN_LEVEL, SEED_LEVEL, report_comparison_service
from oracle_rank.services.synthetic import generate_synthetic_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def _report_error(stage: str, error_code: str, message: str) -> None:
    click.echo(f"error [{stage}] {error_code}: {message}", err=True)


class OracleRankGroup(click.Group):
    """
    Click group that maps every failure to the toolchain's exit codes

    Click's own usage errors exit with 1 instead of click's default 2, so 2 is
    left for data errors.
    """

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
            exit_code = result if isinstance(result, int) else EXIT_OK
        except click.UsageError as e:
            e.show()
            exit_code = EXIT_USAGE
        except click.ClickException as e:
            e.show()
            exit_code = EXIT_USAGE
        except click.Abort:
            click.echo("Aborted!", err=True)
            exit_code = EXIT_USAGE
        except ValidationError as e:
            details = "; ".join(
                f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
            )
            _report_error("config", ConfigurationError.error_code, details)
            exit_code = EXIT_USAGE
        except PipelineStageError as e:
            _report_error(e.stage, e.error_code, e.message)
            exit_code = e.exit_code
        except OracleRankError as e:
            _report_error("cli", e.error_code, e.message)
            exit_code = e.exit_code

        if standalone_mode:
            sys.exit(exit_code)
        return exit_code


def _int_list(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return parse_int_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def _int_range(ctx: click.Context, param: click.Parameter, value: str) -> Tuple[int, int]:
    try:
        return parse_int_range(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def _name_list(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    names = [name.strip() for name in value.split(",") if name.strip()]
    if not names:
        raise click.BadParameter("expected a comma-separated list of metric names")
    return names


def _pipeline_options(func):
    """Options shared by evaluate and rank"""
    options = [
        click.option("--records", "records", required=True, type=click.Path(dir_okay=False), help="records.jsonl"),
        click.option("--outcomes", "outcomes", required=True, type=click.Path(dir_okay=False), help="outcomes.jsonl"),
        click.option("--out-dir", "out_dir", required=True, type=click.Path(file_okay=False), help="Report directory"),
        click.option(
            "--ranking",
            type=click.Choice([m.value for m in RankingMethod]),
            default=RankingMethod.IFOREST.value,
            show_default=True,
        ),
        click.option("--seeds", callback=_int_list, default=None, help="Comma-separated ranking seeds"),
        click.option(
            "--provenance",
            type=click.Choice([p.value for p in ProvenanceFilter]),
            default=ProvenanceFilter.BUGGY.value,
            show_default=True,
        ),
        click.option("--trees", type=int, default=None, help="Isolation Forest trees per seed"),
        click.option("--max-samples", "max_samples", type=int, default=None, help="Isolation Forest subsample size"),
        click.option("--threads", type=int, default=None, help="Worker threads (ORACLE_RANK_THREADS)"),
        click.option("--progress/--no-progress", default=None, help="Show progress bars"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _build_config(
    records: str,
    outcomes: str,
    out_dir: str,
    ranking: str,
    seeds: Optional[List[int]],
    provenance: str,
    trees: Optional[int],
    max_samples: Optional[int],
    threads: Optional[int],
    progress: Optional[bool],
    k_values: Optional[List[int]] = None,
    baseline_noexception: bool = False,
) -> PipelineConfig:
    method = RankingMethod(ranking)
    if seeds is None:
        seeds = settings.default_seeds if method != RankingMethod.NONE else []
    return PipelineConfig(
        records_path=records,
        outcomes_path=outcomes,
        out_dir=out_dir,
        k_values=k_values if k_values is not None else settings.default_k_values,
        ranking=method,
        seeds=seeds,
        baseline_noexception=baseline_noexception,
        provenance=ProvenanceFilter(provenance),
        num_trees=trees if trees is not None else settings.iforest_num_trees,
        max_samples=max_samples if max_samples is not None else settings.iforest_max_samples,
        threads=threads if threads is not None else settings.threads,
        show_progress=progress if progress is not None else settings.show_progress,
    )


@click.group(cls=OracleRankGroup)
@click.option("--log-level", "log_level", default=None, help="Log level (default from ORACLE_RANK_LOG_LEVEL)")
@click.option(
    "--log-format",
    "log_format",
    type=click.Choice(["text", "structured"]),
    default=None,
    help="Log format (default from ORACLE_RANK_LOG_FORMAT)",
)
def cli(log_level: Optional[str], log_format: Optional[str]) -> None:
    """Evaluate generated test oracles and rank failed tests per bug."""
    configure_logging(log_level or settings.log_level, log_format or settings.log_format)


@cli.command()
@_pipeline_options
@click.option("--k", "k_values", callback=_int_list, default=None, help="Found@K cut-offs, e.g. 1,3,5,10")
@click.option("--baseline-noexception", is_flag=True, default=False, help="Also evaluate the NoException baseline")
def evaluate(k_values: Optional[List[int]], baseline_noexception: bool, **options) -> None:
    """Run the full evaluation and write the report files."""
    config = _build_config(k_values=k_values, baseline_noexception=baseline_noexception, **options)
    result = EvaluationPipeline(config).run()
    generated = next(iter(result.report.approaches.values()))
    logger.info(
        f"Evaluation complete: {result.report.bug_count} bugs, "
        f"mean BugFound {generated.aggregate.bug_found:.2f}, mean Precision {generated.aggregate.precision:.4f}",
        extra={"event_type": "evaluate_complete", "count": result.report.bug_count},
    )


@cli.command()
@_pipeline_options
def rank(**options) -> None:
    """Write the ranked list of failed tests of every bug (rankings.tsv)."""
    config = _build_config(**options)
    ranked_lists = EvaluationPipeline(config).run_rank_only()
    logger.info(
        f"Ranked failed tests of {len(ranked_lists)} bug runs",
        extra={"event_type": "rank_complete", "count": len(ranked_lists)},
    )


@cli.command()
@click.option("--bugs", type=int, required=True, help="Number of bugs")
@click.option("--failed", callback=_int_range, required=True, help="Failed tests per bug: N or A-B")
@click.option("--tp", callback=_int_range, default="1", show_default=True, help="True positives per bug: N or A-B")
@click.option("--passed", type=int, default=0, show_default=True, help="Passing tests per bug (TN)")
@click.option("--fn", "fn", type=int, default=0, show_default=True, help="False negatives per bug")
@click.option("--compile-errors", "compile_errors", type=int, default=0, show_default=True)
@click.option("--runs", type=int, default=1, show_default=True)
@click.option("--fixed-fraction", "fixed_fraction", type=float, default=0.0, show_default=True)
@click.option("--distinct-lines", "distinct_lines", type=int, default=3, show_default=True)
@click.option("--doc-similarity/--no-doc-similarity", "doc_similarity", default=True, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", "out_dir", required=True, type=click.Path(file_okay=False))
def gen(
    bugs: int,
    failed: Tuple[int, int],
    tp: Tuple[int, int],
    passed: int,
    fn: int,
    compile_errors: int,
    runs: int,
    fixed_fraction: float,
    distinct_lines: int,
    doc_similarity: bool,
    seed: int,
    out_dir: str,
) -> None:
    """Generate a synthetic corpus (records.jsonl, outcomes.jsonl, truth.tsv)."""
    spec = SyntheticSpec(
        bugs=bugs,
        failed_min=failed[0],
        failed_max=failed[1],
        tp_min=tp[0],
        tp_max=tp[1],
        passed_per_bug=passed,
        fn_per_bug=fn,
        compile_errors_per_bug=compile_errors,
        runs=runs,
        fixed_fraction=fixed_fraction,
        distinct_lines=distinct_lines,
        doc_similarity=doc_similarity,
    )
    try:
        corpus = generate_synthetic_corpus(spec, seed, out_dir)
    except OSError as e:
        raise PipelineStageError("gen", e) from e
    logger.info(f"Wrote {len(corpus)} synthetic entries", extra={"event_type": "gen_complete", "count": len(corpus)})


@cli.command("stats-compare")
@click.option("--a", "report_a", required=True, type=click.Path(dir_okay=False), help="report.json of run A")
@click.option("--b", "report_b", required=True, type=click.Path(dir_okay=False), help="report.json of run B")
@click.option("--metrics", callback=_name_list, default=None, help="Metrics to compare, e.g. found_at_5,precision")
@click.option("--level", type=click.Choice([RUN_LEVEL, SEED_LEVEL]), default=RUN_LEVEL, show_default=True)
@click.option("--approach", default="generated", show_default=True)
@click.option("--alpha", type=float, default=None, help="Significance level")
@click.option("--out-dir", "out_dir", required=True, type=click.Path(file_okay=False))
def stats_compare(
    report_a: str,
    report_b: str,
    metrics: Optional[List[str]],
    level: str,
    approach: str,
    alpha: Optional[float],
    out_dir: str,
) -> None:
    """Paired Wilcoxon signed-rank and Cliff's delta between two reports."""
    comparison = report_comparison_service.compare(
        report_a, report_b, metrics=metrics, level=level, approach=approach, alpha=alpha
    )
    try:
        report_comparison_service.write(comparison, out_dir)
    except OSError as e:
        raise PipelineStageError("report", e) from e
    for result in comparison.results:
        logger.info(
            f"{result.metric}: p={result.p_value:.4f} delta={result.delta:.4f} ({result.magnitude.value})",
            extra={"event_type": "comparison"},
        )


def main() -> None:
    cli(prog_name="oracle-rank")


if __name__ == "__main__":
    main()
