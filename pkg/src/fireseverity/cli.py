"""``fireseverity <subcommand> --config PATH [--seed N] [--out DIR]``.

Exit codes: 0 ok, 2 config error, 3 input error, 4 numeric/validation
failure.  Failures print one line to stderr::

    fireseverity: error code=3 kind=input: dem input not found: /data/dem.tif
"""

from __future__ import annotations

import logging
import sys

import click

from .config import read_config
from .errors import ConfigError, FireSeverityError, InputError, ValidationError
from .pipeline import STAGES, run_all

_KIND = {ConfigError: "config", InputError: "input", ValidationError: "validation"}


def _kind(exc: FireSeverityError) -> str:
    for cls, name in _KIND.items():
        if isinstance(exc, cls):
            return name
    return "error"


def _fail(exc: FireSeverityError) -> None:
    message = " ".join(str(exc).split())
    click.echo(f"fireseverity: error code={exc.exit_code} kind={_kind(exc)}: {message}", err=True)
    sys.exit(exc.exit_code)


def _run(stage, config_path, seed, out, quiet):
    logging.basicConfig(
        level=logging.ERROR if quiet else logging.WARNING,
        format="fireseverity: %(levelname)s: %(message)s",
    )
    try:
        cfg = read_config(config_path)
        if seed is not None:
            cfg = cfg.with_seed(seed)
        if out is not None:
            cfg = cfg.with_output(out)
        written = stage(cfg)
    except FireSeverityError as exc:
        _fail(exc)
    except OSError as exc:
        _fail(InputError(f"{exc.filename or ''}: {exc.strerror or exc}"))
    for path in written:
        click.echo(path)


def _options(fn):
    fn = click.option("--quiet", is_flag=True, help="Suppress warnings.")(fn)
    fn = click.option("--out", "out", type=click.Path(file_okay=False), default=None,
                      help="Output directory (overrides [output] directory).")(fn)
    fn = click.option("--seed", type=click.IntRange(min=0), default=None,
                      help="Seed override for the model, split and folds.")(fn)
    fn = click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                      help="Pipeline config file.")(fn)
    return fn


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Bushfire severity pipeline: FIRMS trends, raster features, boosted
    dNBR regression and downstream analyses."""


def _register(name, stage, help_text):
    @main.command(name=name, help=help_text)
    @_options
    def command(config_path, seed, out, quiet):
        _run(stage, config_path, seed, out, quiet)

    return command


_HELP = {
    "ingest": "Stage events and 36-band stacks per fire year.",
    "features": "Compute indices, terrain and dNBR; write the feature matrix.",
    "fsi": "Monthly and annual fire severity index series.",
    "train": "Standardise, split, cross-validate, train and score the model.",
    "importance": "Gain and frequency importance of the trained model.",
    "correlate": "Pearson correlation matrix of features and target.",
    "residuals": "Residual histogram and moments on the test split.",
    "sensitivity": "Vegetation-shift scenarios through the frozen model.",
    "priority": "Resource-allocation priority per region.",
}

for _name, _stage in STAGES.items():
    _register(_name, _stage, _HELP[_name])
_register("run", run_all, "Run every stage in order.")


if __name__ == "__main__":  # pragma: no cover
    main()
