"""Plot specifications: a small JSON contract describing one figure.

Common fields
    kind:  "lines" | "heatmap"
    csv:   input CSV path (sweep results for lines, grid for heatmap)
    out:   output image path (.png or .svg)

Lines
    x: x-axis column          (default "n_pumps")
    y: y-axis column          (default "E_N")
    group_by: list of columns; one line per distinct value combination
              (default ["family"])

Heatmap
    value_label:  colorbar label        (default the CSV file stem)
    overlay_csv:  optional equipower trace drawn as a black curve;
                  needs columns overlay_x / overlay_y
    overlay_x:    default "added_amplitude"
    overlay_y:    default "n_pumps"

Styling fields (title, xlabel, ylabel, cmap, figsize) are optional with
documented defaults; visual parity with any particular publication is
not a goal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["PlotSpec", "SpecError", "load_spec"]

_KINDS = ("lines", "heatmap")
_FORMATS = (".png", ".svg")


class SpecError(ValueError):
    """Invalid plot specification."""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    csv: Path
    out: Path
    x: str = "n_pumps"
    y: str = "E_N"
    group_by: tuple = ("family",)
    value_label: str | None = None
    overlay_csv: Path | None = None
    overlay_x: str = "added_amplitude"
    overlay_y: str = "n_pumps"
    title: str = ""
    xlabel: str | None = None
    ylabel: str | None = None
    cmap: str = "viridis"
    figsize: tuple = (6.4, 4.8)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SpecError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if Path(self.out).suffix.lower() not in _FORMATS:
            raise SpecError(
                f"out must end in one of {_FORMATS}, got {self.out}"
            )


def load_spec(path) -> PlotSpec:
    """Read and validate a JSON plot spec."""
    raw = Path(path).read_text()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecError(f"{path}: spec must be a JSON object")
    known = set(PlotSpec.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise SpecError(f"{path}: unknown spec keys {sorted(unknown)}")
    for key in ("kind", "csv", "out"):
        if key not in data:
            raise SpecError(f"{path}: missing required key {key!r}")
    kwargs = dict(data)
    kwargs["csv"] = Path(data["csv"])
    kwargs["out"] = Path(data["out"])
    if data.get("overlay_csv"):
        kwargs["overlay_csv"] = Path(data["overlay_csv"])
    if "group_by" in data:
        kwargs["group_by"] = tuple(data["group_by"])
    if "figsize" in data:
        kwargs["figsize"] = tuple(data["figsize"])
    return PlotSpec(**kwargs)
