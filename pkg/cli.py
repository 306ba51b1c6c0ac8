# cli.py
"""
Command surface for the QSNN laboratory.

    python cli.py binary-real --seed 1 --iterations 50
    python cli.py werner-classify --config configs/werner_classify.json --out results/werner
    python cli.py preset ablation_coupling
    python cli.py rerun --manifest results/binary_real/manifest.json
"""
import click
from dotenv import load_dotenv

from utils.config import KINDS, PRESETS, load_config, preset_config
from utils.errors import QSNNError
from utils.experiments import run_experiment
from utils.helper import log_progress

# Load environment variables from .env file
load_dotenv()


def _fail(e):
    log_progress(f"ERROR: {e}")
    return click.ClickException(str(e))


def _run(config, workers):
    try:
        config.validate()
        run_experiment(config, workers=workers)
    except QSNNError as e:
        raise _fail(e)


def _override_options(func):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="JSON experiment config (defaults to the built-in preset)."),
        click.option("--seed", type=int, default=None, help="Run a single training seed."),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory."),
        click.option("--iterations", type=int, default=None, help="Gradient-descent iterations."),
        click.option("--eta", type=float, default=None, help="Learning rate."),
        click.option("--time", "evolution_time", type=float, default=None, help="Evolution time T."),
        click.option("--workers", type=int, default=None, help="Threads for independent sub-runs."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _make_command(kind):
    @_override_options
    def command(config_path, seed, out, iterations, eta, evolution_time, workers):
        try:
            config = load_config(config_path, expected_kind=kind) if config_path else preset_config(kind)
        except QSNNError as e:
            raise _fail(e)
        config.apply_overrides(seed=seed, out=out, iterations=iterations, eta=eta, time=evolution_time)
        _run(config, workers)

    command.__doc__ = f"Run the {kind} experiment."
    return click.command(name=kind.replace("_", "-"))(command)


@click.group()
def cli():
    """Train and evaluate quantum stochastic neural networks."""


for _kind in KINDS:
    cli.add_command(_make_command(_kind))


@cli.command()
@click.argument("name", type=click.Choice(sorted(PRESETS)))
@_override_options
def preset(name, config_path, seed, out, iterations, eta, evolution_time, workers):
    """Run a named ablation preset."""
    try:
        config = load_config(config_path) if config_path else preset_config(name)
    except QSNNError as e:
        raise _fail(e)
    config.apply_overrides(seed=seed, out=out, iterations=iterations, eta=eta, time=evolution_time)
    _run(config, workers)


@cli.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--workers", type=int, default=None)
def rerun(manifest_path, out, workers):
    """Re-run an experiment from the manifest.json it wrote."""
    try:
        config = load_config(manifest_path)
    except QSNNError as e:
        raise _fail(e)
    config.apply_overrides(out=out)
    _run(config, workers)


if __name__ == "__main__":
    cli()
