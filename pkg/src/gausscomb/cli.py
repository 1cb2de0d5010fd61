"""Command-line front end: run sweeps, validate configs, export pump
graphs.  Results are deterministic for a fixed config + seed regardless
of thread count."""

from __future__ import annotations

import importlib.resources
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import (
    ConfigError,
    ScenarioPoint,
    SweepConfig,
    expand_points,
    load_config,
)
from .dynamics import ThresholdExceededError, scenario_metrics
from .graph import build_asymmetric_adjacency, build_symmetric_adjacency, export_graph_dot

RESULT_COLUMNS = [
    "scenario_id",
    "family",
    "point_index",
    "n_pumps",
    "alphas",
    "seed",
    "E_N",
    "mu_pair",
    "mu_full",
    "nu_tilde_minus",
    "converged",
    "residual",
    "wall_time_s",
]


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _preset_path(name: str) -> Path:
    override = os.environ.get("GAUSSCOMB_PRESET_DIR")
    if override:
        candidate = Path(override) / f"{name}.toml"
        if candidate.exists():
            return candidate
    builtin = importlib.resources.files("gausscomb") / "presets" / f"{name}.toml"
    if builtin.is_file():
        return Path(str(builtin))
    raise ConfigError(f"unknown preset {name!r}")


def _resolve_config(config_path, preset) -> SweepConfig:
    if (config_path is None) == (preset is None):
        raise ConfigError("give exactly one of CONFIG path or --preset")
    path = Path(config_path) if config_path else _preset_path(preset)
    return load_config(path)


def _solve_point(point: ScenarioPoint) -> dict:
    t0 = time.perf_counter()
    try:
        m = scenario_metrics(
            point.pumps,
            topology=point.topology,
            theta=point.theta,
            n_bar=point.n_bar,
            monitored=point.monitored,
            pair=point.pair,
            tol=point.tol,
            t_max=point.t_max,
        )
        row = dict(
            E_N=m.log_negativity,
            mu_pair=m.purity_pair,
            mu_full=m.purity_full,
            nu_tilde_minus=m.nu_tilde_minus,
            converged=m.converged,
            residual=m.residual,
        )
    except (ThresholdExceededError, RuntimeError):
        row = dict(
            E_N=np.nan,
            mu_pair=np.nan,
            mu_full=np.nan,
            nu_tilde_minus=np.nan,
            converged=False,
            residual=np.nan,
        )
    row["wall_time_s"] = time.perf_counter() - t0
    return row


def _run_points(points, threads: int):
    if threads <= 1:
        results = [_solve_point(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_solve_point, points))
    return results


def _write_results_csv(path, cfg: SweepConfig, points, results) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(RESULT_COLUMNS) + "\n")
        for point, row in zip(points, results):
            alphas = ";".join(_fmt(p.amplitude) for p in point.pumps)
            fields = [
                cfg.scenario_id,
                point.family,
                str(point.index),
                str(point.n_pumps),
                alphas,
                "" if point.seed is None else str(point.seed),
                _fmt(row["E_N"]),
                _fmt(row["mu_pair"]),
                _fmt(row["mu_full"]),
                _fmt(row["nu_tilde_minus"]),
                str(bool(row["converged"])).lower(),
                _fmt(row["residual"]),
                _fmt(row["wall_time_s"]),
            ]
            fh.write(",".join(fields) + "\n")


def _write_run_json(path, cfg: SweepConfig, points, master_seed, threads) -> None:
    payload = {
        "version": __version__,
        "scenario_id": cfg.scenario_id,
        "master_seed": master_seed if master_seed is not None else cfg.seed,
        "threads": threads,
        "config": cfg.raw,
        "points": [
            {
                "family": p.family,
                "index": p.index,
                "n_pumps": p.n_pumps,
                "seed": p.seed,
                "topology": p.topology,
                "pumps": [
                    {
                        "half_position": t.half_position,
                        "amplitude": t.amplitude,
                        "phase": t.phase,
                    }
                    for t in p.pumps
                ],
            }
            for p in points
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@click.group()
@click.version_option(version=__version__, prog_name="gausscomb")
def main():
    """Steady-state entanglement sweeps for multi-pump parametric
    circuits."""


@main.command()
@click.argument("config_path", required=False, type=click.Path(exists=True))
@click.option("--preset", help="named preset shipped with the package")
@click.option("--out", "out_dir", default=".", type=click.Path(), show_default=True)
@click.option("--seed", type=int, default=None, help="override the master seed")
@click.option("--threads", type=int, default=1, show_default=True)
def run(config_path, preset, out_dir, seed, threads):
    """Run a sweep and write results.csv + run.json."""
    try:
        cfg = _resolve_config(config_path, preset)
        points = expand_points(cfg, master_seed=seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = _run_points(points, threads)
    _write_results_csv(out / "results.csv", cfg, points, results)
    _write_run_json(out / "run.json", cfg, points, seed, threads)
    n_failed = sum(1 for r in results if not r["converged"])
    click.echo(
        f"{cfg.scenario_id}: {len(results)} points, {n_failed} not converged"
    )
    sys.exit(1 if n_failed else 0)


@main.command("run-grid")
@click.argument("config_path", required=False, type=click.Path(exists=True))
@click.option("--preset", help="named preset shipped with the package")
@click.option("--out", "out_dir", default=".", type=click.Path(), show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--threads", type=int, default=1, show_default=True)
def run_grid(config_path, preset, out_dir, seed, threads):
    """Run a (pump count x amplitude) grid preset; write heatmap CSVs
    and the constant-total-power trace."""
    try:
        cfg = _resolve_config(config_path, preset)
        if cfg.kind != "grid":
            raise ConfigError("run-grid needs a sweep of kind 'grid'")
        points = expand_points(cfg, master_seed=seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = _run_points(points, threads)
    _write_results_csv(out / "results.csv", cfg, points, results)
    _write_run_json(out / "run.json", cfg, points, seed, threads)

    lo, hi = cfg.amplitude_range
    amps = [lo + (hi - lo) * i / max(cfg.n_points - 1, 1) for i in range(cfg.n_points)]
    n_rows = cfg.n_pumps_max - cfg.n_pumps_min + 1
    fam = cfg.families[0].name
    for key, fname in (("E_N", "grid_en.csv"), ("mu_pair", "grid_mu.csv")):
        with open(out / fname, "w") as fh:
            fh.write("n_pumps," + ",".join(_fmt(a) for a in amps) + "\n")
            for r in range(n_rows):
                row = results[r * cfg.n_points : (r + 1) * cfg.n_points]
                fh.write(
                    str(cfg.n_pumps_min + r)
                    + ","
                    + ",".join(_fmt(cell[key]) for cell in row)
                    + "\n"
                )

    _write_equipower(out / "equipower.csv", cfg, seed, threads)
    n_failed = sum(1 for r in results if not r["converged"])
    click.echo(f"{cfg.scenario_id}: grid {n_rows}x{cfg.n_points}, {n_failed} not converged")
    sys.exit(1 if n_failed else 0)


def _write_equipower(path, cfg: SweepConfig, seed, threads) -> None:
    """Trace of constant mean pump power P = sum |alpha_k|^2 / N,
    referenced to the (n_pumps_min, added = 0) corner."""
    from .config import FamilySpec, splitmix64, _make_pumps

    fam = cfg.families[0]
    a1 = cfg.first_amplitude
    p_ref = a1 * a1 / cfg.n_pumps_min
    rows = []
    points = []
    for i, n in enumerate(range(cfg.n_pumps_min, cfg.n_pumps_max + 1)):
        added_sq = (n * p_ref - a1 * a1) / max(n - 1, 1)
        added = float(np.sqrt(max(added_sq, 0.0)))
        point_seed = None
        if fam.phase_mode == "random":
            base = cfg.seed if seed is None else seed
            point_seed = splitmix64(base, 1_000_000 + i)
        amps = [a1] + [added] * (n - 1)
        points.append(
            ScenarioPoint(
                family=fam.name,
                index=i,
                topology=fam.topology,
                pumps=_make_pumps(fam, amps, point_seed),
                theta=fam.theta,
                n_bar=fam.n_bar,
                monitored=fam.monitored,
                pair=cfg.pair,
                seed=point_seed,
                n_pumps=n,
                tol=cfg.tol,
                t_max=cfg.t_max,
            )
        )
        rows.append((n, added))
    results = _run_points(points, threads)
    with open(path, "w") as fh:
        fh.write("n_pumps,added_amplitude,E_N,mu_pair\n")
        for (n, added), res in zip(rows, results):
            fh.write(
                f"{n},{_fmt(added)},{_fmt(res['E_N'])},{_fmt(res['mu_pair'])}\n"
            )


@main.command()
@click.argument("config_path", required=False, type=click.Path(exists=True))
@click.option("--preset", help="named preset shipped with the package")
def validate(config_path, preset):
    """Parse a config and check its invariants without solving."""
    try:
        cfg = _resolve_config(config_path, preset)
        points = expand_points(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"ok: {cfg.scenario_id}, {len(points)} points")


@main.command("export-graph")
@click.argument("config_path", required=False, type=click.Path(exists=True))
@click.option("--preset", help="named preset shipped with the package")
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--point", "point_index", type=int, default=0, show_default=True,
              help="which sweep point's pump configuration to export")
def export_graph(config_path, preset, out_file, point_index):
    """Write the coupling graph of one sweep point in DOT format."""
    try:
        cfg = _resolve_config(config_path, preset)
        points = expand_points(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    if not 0 <= point_index < len(points):
        click.echo(f"point index {point_index} out of range", err=True)
        sys.exit(2)
    point = points[point_index]
    if point.topology == "symmetric":
        adj = build_symmetric_adjacency(point.pumps)
    else:
        adj = build_asymmetric_adjacency(point.pumps)
    Path(out_file).write_text(export_graph_dot(adj))
    click.echo(f"wrote {out_file}")


if __name__ == "__main__":
    main()
