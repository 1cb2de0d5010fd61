"""Command line: ``plot lines|heatmap --spec file.json``."""

from __future__ import annotations

import sys

import click

from . import __version__
from .plots import DataError, plot_heatmap, plot_lines
from .spec import SpecError, load_spec


def _run(spec_path, expected_kind, renderer):
    try:
        spec = load_spec(spec_path)
        if spec.kind != expected_kind:
            raise SpecError(
                f"spec kind is {spec.kind!r}, expected {expected_kind!r}"
            )
        out = renderer(spec)
    except (SpecError, DataError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {out}")


@click.group()
@click.version_option(version=__version__, prog_name="combplots")
def main():
    """Render sweep CSV outputs; no physics is recomputed."""


@main.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True), help="JSON plot spec")
def lines(spec_path):
    """Line plot, one curve per group."""
    _run(spec_path, "lines", plot_lines)


@main.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True), help="JSON plot spec")
def heatmap(spec_path):
    """Heatmap of a rectangular grid CSV, optional overlay curve."""
    _run(spec_path, "heatmap", plot_heatmap)


if __name__ == "__main__":
    main()
