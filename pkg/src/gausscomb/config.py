"""Sweep configuration: TOML parsing, validation, and expansion of a
config into the concrete list of scenario points to solve.

Per-point seeds derive from the master seed and the point index through
splitmix64, so parallel execution order cannot affect results.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field

import numpy as np

from .graph import PumpTone, symmetric_pump_positions

__all__ = [
    "ConfigError",
    "SweepConfig",
    "ScenarioPoint",
    "load_config",
    "parse_config",
    "expand_points",
    "splitmix64",
]


class ConfigError(ValueError):
    """Invalid sweep configuration."""


def splitmix64(seed: int, index: int) -> int:
    """Derive a per-point seed from (master seed, point index).

    One splitmix64 scramble round over seed + golden-ratio increments;
    documented so runs are reproducible across implementations.
    """
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    topology: str
    phase_mode: str
    theta: float
    n_bar: float
    monitored: bool


@dataclass(frozen=True)
class SweepConfig:
    scenario_id: str
    pair: tuple
    kind: str                  # pump_count | amplitude | grid
    families: tuple
    seed: int | None
    tol: float
    t_max: float
    # pump_count
    n_pumps_min: int = 1
    n_pumps_max: int = 1
    first_amplitude: float = 0.0
    added_amplitude: float = 0.0
    # amplitude / grid
    amplitude_range: tuple = (0.0, 0.0)
    n_points: int = 0
    raw: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioPoint:
    family: str
    index: int
    topology: str
    pumps: tuple
    theta: float
    n_bar: float
    monitored: bool
    pair: tuple
    seed: int | None
    n_pumps: int
    tol: float
    t_max: float


def load_config(path) -> SweepConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(data)


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return table[key]


def parse_config(data: dict) -> SweepConfig:
    scen = data.get("scenario")
    if scen is None:
        raise ConfigError("missing [scenario] table")
    scenario_id = str(_require(scen, "id", "scenario"))
    pair = tuple(scen.get("pair", [-1, 1]))
    if len(pair) != 2:
        raise ConfigError("scenario.pair must list exactly two mode labels")

    phases = data.get("phases", {"mode": "zero"})
    phase_mode = phases.get("mode", "zero")
    if phase_mode not in ("zero", "random"):
        raise ConfigError(f"unknown phase mode {phase_mode!r}")
    seed = phases.get("seed")
    if seed is not None:
        seed = int(seed)

    base_theta = float(scen.get("theta", 0.0))
    base_nbar = float(scen.get("n_bar", 1.0))
    base_monitored = bool(scen.get("monitored", True))
    base_topology = scen.get("topology", "symmetric")

    fam_tables = data.get("families")
    families = []
    if fam_tables:
        for i, fam in enumerate(fam_tables):
            families.append(
                FamilySpec(
                    name=str(fam.get("name", f"family{i}")),
                    topology=fam.get("topology", base_topology),
                    phase_mode=fam.get("phases", phase_mode),
                    theta=float(fam.get("theta", base_theta)),
                    n_bar=float(fam.get("n_bar", base_nbar)),
                    monitored=bool(fam.get("monitored", base_monitored)),
                )
            )
    else:
        families.append(
            FamilySpec(
                name=scenario_id,
                topology=base_topology,
                phase_mode=phase_mode,
                theta=base_theta,
                n_bar=base_nbar,
                monitored=base_monitored,
            )
        )
    for fam in families:
        if fam.topology not in ("symmetric", "asymmetric"):
            raise ConfigError(f"unknown topology {fam.topology!r}")
        if not 0 <= fam.theta < np.pi / 2:
            raise ConfigError("theta must lie in [0, pi/2)")
        if fam.n_bar < 1:
            raise ConfigError("n_bar must be >= 1")
        if fam.phase_mode == "random" and seed is None:
            raise ConfigError("random phases require phases.seed")

    sweep = data.get("sweep")
    if sweep is None:
        raise ConfigError("missing [sweep] table")
    kind = _require(sweep, "kind", "sweep")
    solver = data.get("solver", {})
    cfg = dict(
        scenario_id=scenario_id,
        pair=pair,
        kind=kind,
        families=tuple(families),
        seed=seed,
        tol=float(solver.get("tol", 1e-8)),
        t_max=float(solver.get("t_max", 1e4)),
        raw=data,
    )
    if kind == "pump_count":
        cfg.update(
            n_pumps_min=int(sweep.get("n_pumps_min", 1)),
            n_pumps_max=int(_require(sweep, "n_pumps_max", "sweep")),
            first_amplitude=float(_require(sweep, "first_amplitude", "sweep")),
            added_amplitude=float(
                sweep.get("added_amplitude", sweep.get("first_amplitude"))
            ),
        )
        if not 1 <= cfg["n_pumps_min"] <= cfg["n_pumps_max"] <= 15:
            raise ConfigError("pump-count range must satisfy 1 <= min <= max <= 15")
    elif kind == "amplitude":
        cfg.update(
            first_amplitude=float(_require(sweep, "first_amplitude", "sweep")),
            amplitude_range=tuple(_require(sweep, "amplitude_range", "sweep")),
            n_points=int(_require(sweep, "n_points", "sweep")),
            n_pumps_min=2,
            n_pumps_max=2,
        )
        if cfg["n_points"] < 1:
            raise ConfigError("amplitude sweep needs n_points >= 1")
    elif kind == "grid":
        cfg.update(
            n_pumps_min=int(sweep.get("n_pumps_min", 2)),
            n_pumps_max=int(_require(sweep, "n_pumps_max", "sweep")),
            first_amplitude=float(_require(sweep, "first_amplitude", "sweep")),
            amplitude_range=tuple(_require(sweep, "amplitude_range", "sweep")),
            n_points=int(_require(sweep, "n_points", "sweep")),
        )
        if not 2 <= cfg["n_pumps_min"] <= cfg["n_pumps_max"] <= 15:
            raise ConfigError("grid pump-count range must lie in 2..15")
    else:
        raise ConfigError(f"unknown sweep kind {kind!r}")
    if len(cfg.get("amplitude_range", (0, 0))) != 2:
        raise ConfigError("amplitude_range must be [lo, hi]")
    return SweepConfig(**cfg)


def _make_pumps(fam: FamilySpec, amplitudes, point_seed):
    """Pump list with grid positions and the family's phase policy."""
    n = len(amplitudes)
    if fam.topology == "symmetric":
        positions = symmetric_pump_positions(n)
    else:
        # first two pumps anchor the 44-mode block; later half-positions
        # are irrelevant to the block model and recorded as metadata
        positions = symmetric_pump_positions(min(n, 2)) + [
            2.0 * (k + 2) for k in range(max(0, n - 2))
        ]
    if fam.phase_mode == "random":
        rng = np.random.default_rng(point_seed)
        phases = rng.uniform(0.0, 2.0 * np.pi, n)
    else:
        phases = np.zeros(n)
    return tuple(
        PumpTone(half_position=positions[k], amplitude=amplitudes[k], phase=phases[k])
        for k in range(n)
    )


def _amplitude_list(cfg: SweepConfig, n_pumps: int, added: float):
    return [cfg.first_amplitude] + [added] * (n_pumps - 1)


def expand_points(cfg: SweepConfig, master_seed: int | None = None):
    """Concrete list of ScenarioPoints, seeds fixed per point index."""
    seed = cfg.seed if master_seed is None else master_seed
    points = []
    counter = 0
    for fam in cfg.families:
        if cfg.kind == "pump_count":
            cells = [
                (n, cfg.added_amplitude)
                for n in range(cfg.n_pumps_min, cfg.n_pumps_max + 1)
            ]
        elif cfg.kind == "amplitude":
            lo, hi = cfg.amplitude_range
            cells = [
                (2, lo + (hi - lo) * i / max(cfg.n_points - 1, 1))
                for i in range(cfg.n_points)
            ]
        else:  # grid
            lo, hi = cfg.amplitude_range
            cells = [
                (n, lo + (hi - lo) * i / max(cfg.n_points - 1, 1))
                for n in range(cfg.n_pumps_min, cfg.n_pumps_max + 1)
                for i in range(cfg.n_points)
            ]
        for n_pumps, added in cells:
            point_seed = None
            if fam.phase_mode == "random":
                point_seed = splitmix64(seed, counter)
            amps = _amplitude_list(cfg, n_pumps, added)
            points.append(
                ScenarioPoint(
                    family=fam.name,
                    index=counter,
                    topology=fam.topology,
                    pumps=_make_pumps(fam, amps, point_seed),
                    theta=fam.theta,
                    n_bar=fam.n_bar,
                    monitored=fam.monitored,
                    pair=cfg.pair,
                    seed=point_seed,
                    n_pumps=n_pumps,
                    tol=cfg.tol,
                    t_max=cfg.t_max,
                )
            )
            counter += 1
    return points
