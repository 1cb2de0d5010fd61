"""Command-line interface: sweeps, validation, graph export."""

import csv
import json

import pytest
from click.testing import CliRunner

from gausscomb.cli import RESULT_COLUMNS, main

SMALL_CONFIG = """
[scenario]
id = "mini"
theta = 0.0
n_bar = 1.0

[phases]
mode = "zero"

[sweep]
kind = "pump_count"
n_pumps_min = 1
n_pumps_max = 3
first_amplitude = 0.25

[solver]
tol = 1e-8
"""

GRID_CONFIG = """
[scenario]
id = "minigrid"
theta = 0.0
n_bar = 1.0

[phases]
mode = "zero"

[sweep]
kind = "grid"
n_pumps_min = 2
n_pumps_max = 3
first_amplitude = 0.3
amplitude_range = [0.0, 0.2]
n_points = 3
"""


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_results(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestValidate:
    def test_ok(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        res = runner.invoke(main, ["validate", cfg])
        assert res.exit_code == 0
        assert "3 points" in res.output

    def test_bad_config_exit_2(self, runner, tmp_path):
        cfg = write_config(tmp_path, "[scenario]\nid='x'\n")
        res = runner.invoke(main, ["validate", cfg])
        assert res.exit_code == 2
        assert "config error" in res.output

    def test_preset_and_path_exclusive(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        res = runner.invoke(main, ["validate", cfg, "--preset", "fig4"])
        assert res.exit_code == 2

    def test_shipped_presets_validate(self, runner):
        for preset, n_points in (
            ("fig4", 90),
            ("fig5", 15),
            ("fig6", 15),
            ("fig7", 120),
            ("fig8", 120),
        ):
            res = runner.invoke(main, ["validate", "--preset", preset])
            assert res.exit_code == 0, res.output
            assert f"{n_points} points" in res.output

    def test_unknown_preset(self, runner):
        res = runner.invoke(main, ["validate", "--preset", "fig99"])
        assert res.exit_code == 2


class TestRun:
    def test_writes_results_and_manifest(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out = tmp_path / "out"
        res = runner.invoke(main, ["run", cfg, "--out", str(out)])
        assert res.exit_code == 0, res.output

        rows = read_results(out / "results.csv")
        assert len(rows) == 3
        assert list(rows[0].keys()) == RESULT_COLUMNS
        assert [r["n_pumps"] for r in rows] == ["1", "2", "3"]
        assert all(r["converged"] == "true" for r in rows)
        en = [float(r["E_N"]) for r in rows]
        assert all(v > 0 for v in en)

        manifest = json.loads((out / "run.json").read_text())
        assert manifest["scenario_id"] == "mini"
        assert len(manifest["points"]) == 3
        assert manifest["points"][2]["pumps"][0]["amplitude"] == 0.25

    def test_alphas_column_semicolon_joined(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out = tmp_path / "out"
        runner.invoke(main, ["run", cfg, "--out", str(out)])
        rows = read_results(out / "results.csv")
        assert rows[2]["alphas"].count(";") == 2

    def test_bad_config_exit_2(self, runner, tmp_path):
        cfg = write_config(tmp_path, "[scenario]\n")
        res = runner.invoke(main, ["run", cfg])
        assert res.exit_code == 2


class TestRunGrid:
    def test_grid_outputs(self, runner, tmp_path):
        cfg = write_config(tmp_path, GRID_CONFIG)
        out = tmp_path / "out"
        res = runner.invoke(main, ["run-grid", cfg, "--out", str(out)])
        assert res.exit_code == 0, res.output
        for name in ("results.csv", "run.json", "grid_en.csv",
                     "grid_mu.csv", "equipower.csv"):
            assert (out / name).exists(), name

        with open(out / "grid_en.csv", newline="") as fh:
            grid = list(csv.reader(fh))
        assert len(grid) == 3  # header + 2 pump counts
        assert len(grid[0]) == 4  # n_pumps + 3 amplitudes
        assert grid[1][0] == "2" and grid[2][0] == "3"

        with open(out / "equipower.csv", newline="") as fh:
            eq = list(csv.DictReader(fh))
        assert [r["n_pumps"] for r in eq] == ["2", "3"]
        # constant total power: n * (a1^2 + (n-1) added^2)/n fixed at
        # the reference corner a1^2 / n_min
        a1 = 0.3
        p_ref = a1 * a1 / 2
        for r in eq:
            n = int(r["n_pumps"])
            added = float(r["added_amplitude"])
            total = a1 * a1 + (n - 1) * added * added
            assert total / n == pytest.approx(p_ref, rel=1e-12)

    def test_rejects_non_grid(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        res = runner.invoke(main, ["run-grid", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 2


class TestExportGraph:
    def test_writes_dot(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out = tmp_path / "graph.dot"
        res = runner.invoke(main, ["export-graph", cfg, "--out", str(out)])
        assert res.exit_code == 0, res.output
        text = out.read_text()
        assert text.startswith("graph pump_graph {")
        assert " -- " in text

    def test_point_out_of_range(self, runner, tmp_path):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out = tmp_path / "graph.dot"
        res = runner.invoke(
            main, ["export-graph", cfg, "--out", str(out), "--point", "99"]
        )
        assert res.exit_code == 2


class TestPresetDirOverride:
    def test_env_override(self, runner, tmp_path, monkeypatch):
        (tmp_path / "mine.toml").write_text(SMALL_CONFIG)
        monkeypatch.setenv("GAUSSCOMB_PRESET_DIR", str(tmp_path))
        res = runner.invoke(main, ["validate", "--preset", "mine"])
        assert res.exit_code == 0
