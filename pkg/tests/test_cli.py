import json
import os

import numpy as np
import pytest

from bundler import cli, metrics, onephoton, phonon
from bundler.cli import ScenarioConfig, entrypoint, load_config, run_sweep
from bundler.errors import ConfigError
from bundler.phonon import PhononEnvironment


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestConfig:
    def test_preset_resolution(self, tmp_path):
        cfg = load_config(_write(tmp_path, {"preset": "hamsen2016"}))
        assert cfg.params.gamma_a == 0.2
        assert cfg.params.gamma_sigma == 0.25
        assert cfg.params.cooperativity == pytest.approx(80.0)
        assert cfg.params.delta_a == pytest.approx(20.0)  # default resonance

    def test_absolute_frequency_conversion(self, tmp_path):
        cfg = load_config(_write(tmp_path, {
            "preset": "fischer2016", "params.omega_ueV": 900.0,
        }))
        assert cfg.params.omega == pytest.approx(20.0)

    def test_missing_rates_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, {"params.omega": 20}))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, {
                "preset": "fischer2016", "params.coupling": 3,
            }))

    def test_overrides_beat_file(self, tmp_path):
        path = _write(tmp_path, {"preset": "fischer2016", "params.omega": 20})
        cfg = load_config(path, overrides=("params.omega=30",))
        assert cfg.params.omega == 30.0

    def test_sweep_axis_validation(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, {
                "preset": "fischer2016",
                "sweep": {"axis": "gamma_a", "start": 0.1, "stop": 1, "count": 1},
            }))
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, {
                "preset": "fischer2016",
                "sweep": {"axis": "nope", "start": 0.1, "stop": 1, "count": 4},
            }))

    def test_log_axis_is_geometric(self, tmp_path):
        cfg = load_config(_write(tmp_path, {
            "preset": "fischer2016",
            "sweep": {"axis": "gamma_sigma", "start": 1e-3, "stop": 1.0,
                      "count": 7, "scale": "log"},
        }))
        grid = cfg.sweep[0]["grid"]
        ratios = [b / a for a, b in zip(grid, grid[1:])]
        assert np.ptp(ratios) < 1e-12 * ratios[0]

    def test_environment_block(self, tmp_path):
        cfg = load_config(_write(tmp_path, {
            "preset": "fischer2016", "env.temperature": 30.0,
        }))
        assert isinstance(cfg.env, PhononEnvironment)
        assert cfg.env.hbar_g_ueV == 45.0


class TestMetricsCommand:
    def test_emits_reproducible_json(self, tmp_path):
        cfg_path = _write(tmp_path, {
            "preset": "fischer2016",
            "params.omega": 20,
            "out_dir": str(tmp_path / "m"),
        })
        assert entrypoint(["metrics", "-c", cfg_path]) == 0
        first = (tmp_path / "m" / "metrics.json").read_bytes()
        assert entrypoint(["metrics", "-c", cfg_path]) == 0
        assert (tmp_path / "m" / "metrics.json").read_bytes() == first
        doc = json.loads(first)
        assert doc["pi_n_f"]["analytic"] >= doc["pi_n"]["analytic"] - 1e-9
        manifest = json.loads((tmp_path / "m" / "manifest.json").read_text())
        assert manifest["command"] == "metrics"

    def test_zero_temperature_environment_is_nearly_inert(self, tmp_path):
        # the dephasing and thermal feeding vanish at T = 0; the zero-point
        # downhill transfer survives at the 1e-5 relative level, so the
        # reports agree closely but not to machine precision
        base = {"preset": "fischer2016", "params.omega": 20}
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        assert entrypoint([
            "metrics", "-c", _write(tmp_path, base), "--set", f"out_dir={out_a}",
        ]) == 0
        cfg_env = dict(base, **{"env.temperature": 0.0})
        assert entrypoint([
            "metrics", "-c", _write(tmp_path, cfg_env, "cfg2.json"),
            "--set", f"out_dir={out_b}",
        ]) == 0
        da = json.loads(open(os.path.join(out_a, "metrics.json")).read())
        db = json.loads(open(os.path.join(out_b, "metrics.json")).read())
        for field in ("n_a", "n_af", "pi_n", "pi_n_f"):
            assert db[field]["numeric"] == pytest.approx(
                da[field]["numeric"], rel=1e-3
            )


class TestSweepCommand:
    def _config(self, tmp_path, threads_dir, metrics_list=None):
        return ScenarioConfig(
            params=load_config(None, overrides=(
                "preset=fischer2016", "params.omega=20",
            )).params,
            sweep=[{"axis": "gamma_a", "grid": [0.5, 1.0, 2.0], "scale": "lin"}],
            sweep_metrics=metrics_list or ["na_full", "na_n_closed", "na1_closed"],
            out_dir=str(tmp_path / threads_dir),
        )

    def test_deterministic_under_parallelism(self, tmp_path):
        cfg1 = self._config(tmp_path, "s1")
        cfg4 = self._config(tmp_path, "s4")
        run_sweep(cfg1, threads=1)
        run_sweep(cfg4, threads=4)
        assert (tmp_path / "s1" / "sweep.csv").read_bytes() == (
            tmp_path / "s4" / "sweep.csv"
        ).read_bytes()

    def test_rows_match_pointwise_evaluation(self, tmp_path):
        cfg = self._config(tmp_path, "s")
        run_sweep(cfg, threads=1)
        rows = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
        assert rows[0] == "gamma_a,na_full,na_n_closed,na1_closed,error"
        cells = rows[2].split(",")
        p = cfg.params.at(gamma_a=1.0)
        assert float(cells[1]) == pytest.approx(
            metrics.full_solution(p, decompose=False)["n_a"], rel=1e-12
        )
        assert float(cells[3]) == pytest.approx(onephoton.na1(p, "full"), rel=1e-12)

    def test_errors_recorded_not_fatal(self, tmp_path):
        cfg = self._config(tmp_path, "se", metrics_list=["naf1_closed"])
        cfg.params = cfg.params.at(delta=0.5)  # closed form refuses detuning
        run_sweep(cfg, threads=1)
        rows = (tmp_path / "se" / "sweep.csv").read_text().splitlines()
        assert all("ValueError" in r for r in rows[1:])

    def test_two_axes(self, tmp_path):
        cfg = self._config(tmp_path, "s2")
        cfg.sweep.append({"axis": "gamma_sigma", "grid": [0.005, 0.02], "scale": "lin"})
        run_sweep(cfg, threads=2)
        rows = (tmp_path / "s2" / "sweep.csv").read_text().splitlines()
        assert len(rows) == 1 + 3 * 2


class TestSpectrumCommand:
    def test_columns_and_grid(self, tmp_path):
        cfg_path = _write(tmp_path, {
            "preset": "fischer2016", "params.omega": 5,
            "params.delta_a": 5, "outputs": ["spectrum", "lines"],
            "out_dir": str(tmp_path / "sp"),
        })
        assert entrypoint(["spectrum", "-c", cfg_path, "--omega", "-12:12:0.5"]) == 0
        lines = (tmp_path / "sp" / "spectrum.csv").read_text().splitlines()
        assert lines[0] == "omega_over_g,S"
        assert len(lines) == 1 + 49
        table = (tmp_path / "sp" / "lines.csv").read_text().splitlines()
        assert table[0] == "omega_beta,gamma_beta,L_beta,K_beta,label"
        assert any("cavity_peak" in r for r in table[1:])

    def test_bad_grid_spec(self, tmp_path):
        cfg_path = _write(tmp_path, {"preset": "fischer2016"})
        assert entrypoint(["spectrum", "-c", cfg_path, "--omega", "5:1:0.5"]) == 2


class TestPhononRatesCommand:
    def test_table_layout(self, tmp_path):
        cfg_path = _write(tmp_path, {
            "preset": "fischer2016", "params.omega": 5, "params.delta_a": 5,
            "env.temperature": 30.0, "out_dir": str(tmp_path / "ph"),
        })
        assert entrypoint(["phonon-rates", "-c", cfg_path, "--temps", "0,15,30"]) == 0
        rows = (tmp_path / "ph" / "phonon_rates.csv").read_text().splitlines()
        assert rows[0] == "T_K,rate_up,rate_down,gamma_phi"
        assert len(rows) == 4
        up15 = float(rows[2].split(",")[1])
        ref, _ = phonon.feeding_rates(
            PhononEnvironment(temperature=15.0, hbar_g_ueV=45.0), 0.225
        )
        assert up15 == pytest.approx(ref, rel=1e-12)

    def test_requires_environment(self, tmp_path):
        cfg_path = _write(tmp_path, {"preset": "fischer2016"})
        assert entrypoint(["phonon-rates", "-c", cfg_path, "--temps", "0,30"]) == 2


class TestFigureCommand:
    def test_unknown_id_is_config_error(self, tmp_path):
        assert entrypoint([
            "figure", "9z", "--out-dir", str(tmp_path / "f"),
        ]) == 2

    def test_figure_1c_outputs(self, tmp_path):
        out = tmp_path / "f1c"
        assert entrypoint([
            "figure", "1c", "--out-dir", str(out), "--no-plot",
        ]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["figure"] == "1c"
        assert "spectrum.csv" in manifest["outputs"]
        assert (out / "lines.csv").exists()
        spec_rows = (out / "spectrum.csv").read_text().splitlines()
        assert spec_rows[0] == "omega_over_g,S"

    def test_reproducible_bytes(self, tmp_path):
        out = tmp_path / "rep"
        entrypoint(["figure", "1c", "--out-dir", str(out), "--no-plot"])
        blob = {p.name: p.read_bytes() for p in out.iterdir()}
        entrypoint(["figure", "1c", "--out-dir", str(out), "--no-plot"])
        for p in out.iterdir():
            assert p.read_bytes() == blob[p.name]


class TestExitCodes:
    def test_help_is_success(self, capsys):
        assert entrypoint(["--help"]) == 0
        assert "figure" in capsys.readouterr().out

    def test_missing_config_file(self):
        assert entrypoint(["metrics", "-c", "/nonexistent/cfg.json"]) == 2
