"""Figure rendering from sweep CSVs.

Pure functions of their input files: nothing is recomputed, only read,
grouped and drawn.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# stable element ids so identical inputs give identical SVG bytes
matplotlib.rcParams["svg.hashsalt"] = "combplots"

import matplotlib.pyplot as plt
import numpy as np

from .spec import PlotSpec, SpecError

__all__ = ["plot_lines", "plot_heatmap"]


class DataError(ValueError):
    """Input CSV does not satisfy the plot's preconditions."""


def _read_rows(path) -> list[dict]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def _require_columns(rows, columns, path):
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")


def plot_lines(spec: PlotSpec) -> Path:
    """One line per distinct ``group_by`` value combination.

    The legend is built from the group keys; rows keep CSV order within
    each group.  Returns the written image path.
    """
    rows = _read_rows(spec.csv)
    _require_columns(rows, [spec.x, spec.y, *spec.group_by], spec.csv)

    groups: dict[tuple, list[tuple[float, float]]] = {}
    for row in rows:
        key = tuple(row[c] for c in spec.group_by)
        groups.setdefault(key, []).append(
            (float(row[spec.x]), float(row[spec.y]))
        )

    fig, ax = plt.subplots(figsize=spec.figsize)
    for key, points in groups.items():
        xs, ys = zip(*points)
        ax.plot(xs, ys, marker="o", markersize=3, label=", ".join(key))
    ax.set_xlabel(spec.xlabel or spec.x)
    ax.set_ylabel(spec.ylabel or spec.y)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize="small")
    fig.savefig(spec.out)
    plt.close(fig)
    return Path(spec.out)


def _read_grid(path):
    """Wide-format grid: first column is the row coordinate, remaining
    header cells are the column coordinates."""
    with open(path, newline="") as fh:
        raw = list(csv.reader(fh))
    raw = [r for r in raw if r]
    if len(raw) < 2:
        raise DataError(f"{path}: grid needs a header and at least one row")
    header = raw[0]
    width = len(header)
    for i, row in enumerate(raw[1:], start=2):
        if len(row) != width:
            raise DataError(
                f"{path}: ragged grid (line {i} has {len(row)} cells, "
                f"header has {width})"
            )
    cols = np.array([float(tok) for tok in header[1:]])
    row_coord = np.array([float(r[0]) for r in raw[1:]])
    values = np.array([[float(tok) for tok in r[1:]] for r in raw[1:]])
    return row_coord, cols, values, header[0]


def plot_heatmap(spec: PlotSpec) -> Path:
    """Rectangular grid as a heatmap; colorbar spans exactly
    [min, max] of the value cells.  An optional overlay CSV is drawn as
    a black curve and must have one row per grid row."""
    rows_coord, cols_coord, values, row_name = _read_grid(spec.csv)
    vmin, vmax = float(values.min()), float(values.max())
    fig, ax = plt.subplots(figsize=spec.figsize)
    mesh = ax.pcolormesh(
        cols_coord,
        rows_coord,
        values,
        cmap=spec.cmap,
        vmin=vmin,
        vmax=vmax,
        shading="nearest",
    )
    label = spec.value_label or Path(spec.csv).stem
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel(spec.xlabel or "added pump amplitude")
    ax.set_ylabel(spec.ylabel or row_name)
    if spec.title:
        ax.set_title(spec.title)

    if spec.overlay_csv is not None:
        overlay = _read_rows(spec.overlay_csv)
        _require_columns(
            overlay, [spec.overlay_x, spec.overlay_y], spec.overlay_csv
        )
        if len(overlay) != len(rows_coord):
            raise DataError(
                f"{spec.overlay_csv}: overlay has {len(overlay)} rows, "
                f"grid has {len(rows_coord)}"
            )
        xs = [float(r[spec.overlay_x]) for r in overlay]
        ys = [float(r[spec.overlay_y]) for r in overlay]
        ax.plot(xs, ys, color="black", linewidth=2)

    fig.savefig(spec.out)
    plt.close(fig)
    return Path(spec.out)
