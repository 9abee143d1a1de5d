"""
``shadowlab`` command line.

One experiment per invocation: the JSON config is validated first, the
subcommand handler runs, and the report artifacts land in the output
directory. Exit codes: 0 on success, 1 when a computation fails (a JSON
error report is written), 2 for configuration problems.
"""

import json
from pathlib import Path
from typing import Callable, Optional

import click
from loguru import logger
from pydantic import ValidationError

from config.settings import Settings, get_settings
from src.exceptions import ConfigError, ShadowLabError
from src.handlers import (
    handle_chainrec,
    handle_conjecture_probe,
    handle_demo,
    handle_oracle,
    handle_shadow,
    handle_spectrum,
    handle_split,
)
from src.models.experiment import MAX_SEED, ExperimentConfig
from src.services.report_writer import (
    ExperimentOutcome,
    render_summary,
    write_error_report,
    write_outputs,
)
from src.utils.constants import DemoName, Subcommand
from src.utils.log_setup import configure_logging

DEFAULT_OUT_DIR = "shadowlab_out"
EXIT_FAILURE = 1
EXIT_CONFIG = 2

Handler = Callable[[ExperimentConfig, Settings], ExperimentOutcome]


def load_config(path: Optional[Path], seed: Optional[int] = None) -> ExperimentConfig:
    """Read and validate the experiment config; ``seed`` overrides the file."""
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Config {path} must hold a JSON object")
    if seed is not None:
        data = {**data, "seed": seed}
    return ExperimentConfig.model_validate(data)


def _run(ctx: click.Context, subcommand: str, handler: Handler) -> None:
    options = ctx.obj
    settings: Settings = options["settings"]
    timestamp = options["timestamp"]

    try:
        config = load_config(options["config_path"], options["seed"])
    except (ConfigError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        ctx.exit(EXIT_CONFIG)

    out_dir = Path(options["out"] or config.output_dir or DEFAULT_OUT_DIR)
    resolved = config.model_dump(mode="json")
    try:
        outcome = handler(config, settings)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        ctx.exit(EXIT_CONFIG)
    except ShadowLabError as e:
        logger.error(f"{subcommand} failed: {type(e).__name__}: {e}")
        path = write_error_report(out_dir, subcommand, resolved, e, timestamp=timestamp)
        logger.info(f"Error report written to {path}")
        ctx.exit(EXIT_FAILURE)

    write_outputs(out_dir, subcommand, resolved, outcome, timestamp=timestamp)
    render_summary(f"shadowlab {subcommand} ({outcome.status})", outcome.summary)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Experiment config (JSON); defaults apply when omitted.",
)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--seed", type=click.IntRange(0, MAX_SEED), default=None, help="Override the config seed.")
@click.option("--no-timestamp", is_flag=True, help="Omit the timestamp for byte-identical reports.")
@click.option("--log-level", default=None, help="Override SHADOWLAB_LOG_LEVEL.")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[Path],
    out: Optional[str],
    seed: Optional[int],
    no_timestamp: bool,
    log_level: Optional[str],
) -> None:
    """Numerical lab for shadowing and limit-shadowing of linear semigroups."""
    settings = get_settings()
    configure_logging(log_level or settings.log_level, settings.log_file)
    ctx.obj = {
        "settings": settings,
        "config_path": config_path,
        "out": out,
        "seed": seed,
        "timestamp": not no_timestamp,
    }


@cli.command()
@click.pass_context
def spectrum(ctx: click.Context) -> None:
    """σ(A), σ(T(1)), the hyperbolicity gap and the resolvent sweep."""
    _run(ctx, Subcommand.SPECTRUM.value, handle_spectrum)


@cli.command()
@click.pass_context
def split(ctx: click.Context) -> None:
    """Stable/unstable splitting with certified decay constants."""
    _run(ctx, Subcommand.SPLIT.value, handle_split)


@cli.command()
@click.pass_context
def shadow(ctx: click.Context) -> None:
    """Generate a pseudo-orbit and run the matching shadowing solver."""
    _run(ctx, Subcommand.SHADOW.value, handle_shadow)


@cli.command()
@click.pass_context
def oracle(ctx: click.Context) -> None:
    """Compare the constructive shadow point with the brute-force oracle."""
    _run(ctx, Subcommand.ORACLE.value, handle_oracle)


@cli.command()
@click.pass_context
def chainrec(ctx: click.Context) -> None:
    """Chain graph on a grid and its recurrent nodes."""
    _run(ctx, Subcommand.CHAINREC.value, handle_chainrec)


@cli.command()
@click.argument("name", type=click.Choice([d.value for d in DemoName]))
@click.pass_context
def demo(ctx: click.Context, name: str) -> None:
    """Canned reproductions: heat, transport, rotation, ghshift, trivial."""
    demo_name = DemoName(name)
    _run(ctx, f"{Subcommand.DEMO.value} {name}", lambda config, settings: handle_demo(demo_name, config, settings))


@cli.command("conjecture-probe")
@click.pass_context
def conjecture_probe(ctx: click.Context) -> None:
    """Shadowing experiments on the weighted shift, reported without assertion."""
    _run(ctx, Subcommand.CONJECTURE_PROBE.value, handle_conjecture_probe)


def main() -> None:
    cli(prog_name="shadowlab")


if __name__ == "__main__":
    main()
