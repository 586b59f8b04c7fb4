"""secrev command line: one subcommand per pipeline stage.

Every command validates the config fully before running, holds the workdir
lock while it runs, prints a JSON summary with --json, and exits with a
distinct code per error class so scripts can branch on failures.
"""

import json
import logging
import sys

import click

from secrev.errors import (
    ConfigError,
    MissingStageInput,
    OutputDirLocked,
    SecrevError,
    StageIntegrityError,
)
from secrev.pipeline import run as stages
from secrev.pipeline.config import load_config
from secrev.pipeline.stages import workdir_lock

EXIT_CODES = [
    (ConfigError, 2),
    (MissingStageInput, 3),
    (StageIntegrityError, 5),
    (OutputDirLocked, 6),
    (SecrevError, 4),
]

logger = logging.getLogger(__name__)


def _exit_code(exc: Exception) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 1


def _emit(summary: dict, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(summary, indent=1, sort_keys=True))
        return
    table = summary.pop("table", None)
    for key, value in summary.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        click.echo(f"{key}: {value}")
    if table:
        click.echo(table)


def run_stage(config_path: str, as_json: bool, verbose: bool, fn, *args, **kwargs) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(config_path)
        if verbose:
            click.echo("effective configuration:", err=True)
            click.echo(config.model_dump_json(indent=1), err=True)
        with workdir_lock(config.workdir_path):
            summary = fn(config, *args, **kwargs)
    except Exception as exc:  # noqa: BLE001 - single exit point for error codes
        code = _exit_code(exc)
        message = f"{type(exc).__name__}: {exc}"
        if as_json:
            click.echo(json.dumps({"error": type(exc).__name__,
                                   "detail": str(exc), "exit_code": code}))
        click.echo(message, err=True)
        if verbose and not isinstance(exc, SecrevError):
            raise
        sys.exit(code)
    _emit(summary, as_json)


def common_options(fn):
    fn = click.option("--config", "-c", "config_path", required=True,
                      type=click.Path(), help="pipeline config file (YAML)")(fn)
    fn = click.option("--json", "as_json", is_flag=True,
                      help="machine-readable JSON summary on stdout")(fn)
    fn = click.option("--verbose", "-v", is_flag=True,
                      help="debug logging and effective config")(fn)
    return fn


@click.group()
def main():
    """Vulnerability-commit mining and synthetic review generation."""


@main.command("mine")
@common_options
def mine_command(config_path, as_json, verbose):
    """Discover repositories and harvest commits with diffs."""
    run_stage(config_path, as_json, verbose, stages.stage_mine)


@main.command("filter")
@common_options
def filter_command(config_path, as_json, verbose):
    """Apply candidacy rules to mined commits; write the funnel report."""
    run_stage(config_path, as_json, verbose, stages.stage_filter)


@main.group("keywords")
def keywords_group():
    """Security-keyword sampling and refinement."""


@keywords_group.command("sample")
@common_options
def keywords_sample_command(config_path, as_json, verbose):
    """Draw statistically sized per-keyword samples for annotation."""
    run_stage(config_path, as_json, verbose, stages.stage_keywords_sample)


@keywords_group.command("refine")
@common_options
@click.option("--round", "round_number", type=click.IntRange(1, 2), required=True)
@click.option("--labels", "labels_path", required=True, type=click.Path(),
              help="annotation session export (JSONL)")
def keywords_refine_command(config_path, as_json, verbose, round_number, labels_path):
    """Update keyword precision from annotation labels for one round."""
    run_stage(config_path, as_json, verbose, stages.stage_keywords_refine,
              labels_path, round_number)


@main.group("grid")
def grid_group():
    """Prompt/provider grid evaluation."""


@grid_group.command("run")
@common_options
def grid_run_command(config_path, as_json, verbose):
    """Generate one review per (commit, provider, strategy) cell."""
    run_stage(config_path, as_json, verbose, stages.stage_grid_run)


@grid_group.command("select")
@common_options
@click.option("--labels", "labels_path", required=True, type=click.Path(),
              help="suitability session export (JSONL)")
def grid_select_command(config_path, as_json, verbose, labels_path):
    """Pick the winning provider/strategy from suitability labels."""
    run_stage(config_path, as_json, verbose, stages.stage_grid_select, labels_path)


@main.group("dataset")
def dataset_group():
    """Synthetic dataset generation."""


@dataset_group.command("build")
@common_options
def dataset_build_command(config_path, as_json, verbose):
    """Generate the full dataset with the winning combination."""
    run_stage(config_path, as_json, verbose, stages.stage_dataset_build)


@main.group("external")
def external_group():
    """External review-dataset handling."""


@external_group.command("filter")
@common_options
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="external partition JSONL (defaults to external.input)")
def external_filter_command(config_path, as_json, verbose, input_path):
    """Flag external samples whose review comments match the keyword list."""
    run_stage(config_path, as_json, verbose, stages.stage_external_filter, input_path)


@main.command("evaluate")
@common_options
@click.option("--labels", "labels_path", required=True, type=click.Path(),
              help="final-evaluation session export (JSONL)")
def evaluate_command(config_path, as_json, verbose, labels_path):
    """Score generated reviews: BLEU-4 plus the two manual metrics."""
    run_stage(config_path, as_json, verbose, stages.stage_evaluate, labels_path)


@main.command("report")
@common_options
def report_command(config_path, as_json, verbose):
    """Summarize every artifact present in the workdir."""
    run_stage(config_path, as_json, verbose, stages.stage_report)


@main.group("annotate")
def annotate_group():
    """Human annotation service."""


@annotate_group.command("serve")
@common_options
@click.option("--host", default=None, help="bind address (default from config)")
@click.option("--port", type=int, default=None, help="port (default from config)")
@click.option("--sessions-dir", type=click.Path(), default=None,
              help="session storage (default: <workdir>/sessions)")
@click.option("--ui-dir", type=click.Path(), default=None,
              help="built frontend assets to serve at /ui")
def annotate_serve_command(config_path, as_json, verbose, host, port,
                           sessions_dir, ui_dir):
    """Run the annotation HTTP service (long-running)."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO)
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"ConfigError: {exc}", err=True)
        sys.exit(2)
    from secrev.annotation.server import serve

    serve(
        sessions_dir or (config.workdir_path / "sessions"),
        host=host or config.annotation.host,
        port=port or config.annotation.port,
        ui_dir=ui_dir,
    )


if __name__ == "__main__":
    main()
