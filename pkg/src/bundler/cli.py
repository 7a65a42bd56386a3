"""Command-line front end: figure reproduction, sweeps, reports, spectra.

Configs are flat JSON with dotted keys (see ``config_schema.json`` next
to this module); command-line ``--set key=value`` pairs override file
entries.  All frequencies are in units of g; a key suffixed ``_ueV`` is
converted through hbar*g (from the preset or the ``hbar_g_ueV`` key).

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__
from . import drive as drive_mod
from . import effective, figures, metrics, onephoton, phonon, presets, spectra, steady
from .errors import BundlerError, ConfigError
from .liouville import SystemParams
from .phonon import PhononEnvironment

_PARAM_KEYS = {
    "omega", "delta_a", "gamma_a", "gamma_sigma", "gamma_phi", "delta", "n", "g",
}
_ENV_KEYS = {"temperature", "alpha_p", "omega_b", "dephasing_slope", "hbar_g_ueV"}


@dataclass
class ScenarioConfig:
    """One fully resolved scenario: parameters, environment, products."""

    params: SystemParams
    env: PhononEnvironment | None = None
    drive_mode: str = "tls"
    sweep: list = field(default_factory=list)
    sweep_metrics: list = field(default_factory=list)
    outputs: list = field(default_factory=lambda: ["metrics"])
    out_dir: str = "out"
    raw: dict = field(default_factory=dict)


def _coerce_scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path: str | None, overrides=()) -> ScenarioConfig:
    doc: dict = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object of dotted keys")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, val = item.partition("=")
        doc[key.strip()] = _coerce_scalar(val.strip())
    return _resolve(doc)


def _resolve(doc: dict) -> ScenarioConfig:
    doc = dict(doc)
    hbar_g = doc.get("hbar_g_ueV")
    pvals: dict = {}
    evals: dict = {}
    if "preset" in doc:
        pr = presets.load_preset(str(doc["preset"]))
        pvals.update(gamma_a=pr.gamma_a, gamma_sigma=pr.gamma_sigma)
        hbar_g = hbar_g or pr.hbar_g_ueV
    for key, val in doc.items():
        if key.startswith("params."):
            name = key.split(".", 1)[1]
            if name.endswith("_ueV"):
                base = name[: -len("_ueV")]
                if hbar_g is None:
                    raise ConfigError(
                        f"{key} needs hbar_g_ueV (directly or via a preset)"
                    )
                pvals[base] = float(val) / float(hbar_g)
                name = base
            elif name in _PARAM_KEYS:
                pvals[name] = val
            else:
                raise ConfigError(f"unknown parameter key {key!r}")
            if name not in _PARAM_KEYS:
                raise ConfigError(f"unknown parameter key {key!r}")
        elif key.startswith("env."):
            name = key.split(".", 1)[1]
            if name not in _ENV_KEYS:
                raise ConfigError(f"unknown environment key {key!r}")
            evals[name] = val
    pvals.setdefault("omega", 20.0)
    pvals.setdefault("n", 2)
    pvals.setdefault(
        "delta_a", 2.0 * float(pvals["omega"]) / int(pvals["n"])
    )
    if "gamma_a" not in pvals or "gamma_sigma" not in pvals:
        raise ConfigError(
            "gamma_a and gamma_sigma are required (directly or via a preset)"
        )
    try:
        params = SystemParams(
            omega=float(pvals["omega"]),
            delta_a=float(pvals["delta_a"]),
            gamma_a=float(pvals["gamma_a"]),
            gamma_sigma=float(pvals["gamma_sigma"]),
            gamma_phi=float(pvals.get("gamma_phi", 0.0)),
            delta=float(pvals.get("delta", 0.0)),
            n=int(pvals.get("n", 2)),
            g=float(pvals.get("g", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc
    env = None
    if evals:
        if "temperature" not in evals:
            raise ConfigError("env.* keys given but env.temperature missing")
        if hbar_g is not None:
            evals.setdefault("hbar_g_ueV", float(hbar_g))
        try:
            env = PhononEnvironment(**{k: float(v) for k, v in evals.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid environment: {exc}") from exc
    drive_mode = str(doc.get("drive_mode", "tls"))
    if drive_mode not in ("tls", "cavity"):
        raise ConfigError(f"drive_mode must be 'tls' or 'cavity', got {drive_mode!r}")
    sweep = doc.get("sweep", [])
    if isinstance(sweep, dict):
        sweep = [sweep]
    axes = []
    for ax in sweep:
        axes.append(_resolve_axis(ax))
    if len(axes) > 2:
        raise ConfigError("at most two sweep axes are supported")
    outputs = doc.get("outputs", ["metrics"])
    if isinstance(outputs, str):
        outputs = [outputs]
    known = {"spectrum", "lines", "metrics", "sweep_table"}
    bad = set(outputs) - known
    if bad:
        raise ConfigError(f"unknown outputs {sorted(bad)}; known: {sorted(known)}")
    return ScenarioConfig(
        params=params,
        env=env,
        drive_mode=drive_mode,
        sweep=axes,
        sweep_metrics=list(doc.get("sweep.metrics", ["na_full", "naf_full", "na_n_closed", "na1_closed"])),
        outputs=list(outputs),
        out_dir=str(doc.get("out_dir", "out")),
        raw=doc,
    )


def _resolve_axis(ax: dict) -> dict:
    try:
        name = str(ax["axis"])
        start, stop = float(ax["start"]), float(ax["stop"])
        count = int(ax["count"])
        scale = str(ax.get("scale", "lin"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid sweep axis {ax!r}: {exc}") from exc
    if name not in _PARAM_KEYS:
        raise ConfigError(f"sweep axis must be a parameter name, got {name!r}")
    if count < 2:
        raise ConfigError(f"sweep axis {name!r} needs count >= 2")
    if scale not in ("lin", "log"):
        raise ConfigError(f"sweep scale must be 'lin' or 'log', got {scale!r}")
    if scale == "log" and (start <= 0 or stop <= 0):
        raise ConfigError("log-scale axes need positive endpoints")
    grid = (
        np.geomspace(start, stop, count) if scale == "log"
        else np.linspace(start, stop, count)
    )
    return {"axis": name, "grid": [float(x) for x in grid], "scale": scale}


# ----------------------------------------------------------------------
# sweep metric registry


def _metric_values(params, env, names, track_resonance=True):
    """Evaluate the requested metrics at one grid point."""
    if track_resonance:
        params = params.at(delta_a=2.0 * params.rabi / params.n)
    out = {}
    sol = None
    dec_needed = any(m in names for m in ("naf_full", "pi_nf_numeric"))
    full_needed = dec_needed or any(
        m in names for m in ("na_full", "pi_n_numeric")
    )
    if full_needed:
        sol = metrics.full_solution(params, env=env, decompose=dec_needed)
    for name in names:
        if name == "na_full":
            out[name] = sol["n_a"]
        elif name == "naf_full":
            out[name] = sol["n_af"]
        elif name == "na_n_closed":
            out[name] = effective.bundle_population(params, method="closed", env=env)
        elif name == "na_n_bundle":
            out[name] = metrics._bundle_numeric(params, params.n, env=env)
        elif name == "na1_closed":
            out[name] = onephoton.na1(params, "full")
        elif name == "naf1_qrt":
            out[name] = onephoton.na1_filtered(params, "qrt")
        elif name == "naf1_closed":
            out[name] = onephoton.na1_filtered(params, "closed")
        elif name == "pi_n_analytic":
            out[name] = metrics.purity(params, mode="analytic", env=env)
        elif name == "pi_n_numeric":
            out[name] = metrics._bundle_numeric(params, params.n, env=env) / sol["n_a"]
        elif name == "pi_nf_analytic":
            out[name] = metrics.purity_filtered(params, mode="analytic", env=env)
        elif name == "pi_nf_numeric":
            out[name] = metrics.purity_filtered(params, mode="numeric", env=env)
        elif name == "cooperativity":
            out[name] = params.cooperativity
        elif name == "rejection_ratio":
            out[name] = drive_mod.rejection_ratio(params)
        else:
            raise ConfigError(f"unknown sweep metric {name!r}")
    return out


def run_sweep(config: ScenarioConfig, threads: int | None = None) -> list[str]:
    """Evaluate the config's metrics over its grid; returns written files."""
    if not config.sweep:
        raise ConfigError("sweep requested but no sweep axes configured")
    axes = config.sweep
    grids = [ax["grid"] for ax in axes]
    names = [ax["axis"] for ax in axes]
    points = [(i, vals) for i, vals in enumerate(_product(grids))]
    if threads is None:
        threads = int(os.environ.get("BUNDLER_THREADS", "0")) or (os.cpu_count() or 1)

    def evaluate(item):
        _, vals = item
        p = config.params
        for name, v in zip(names, vals):
            p = p.at(**{name: v if name != "n" else int(v)})
        try:
            got = _metric_values(p, config.env, config.sweep_metrics)
            return got, ""
        except Exception as exc:
            return {}, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, points))
    else:
        results = [evaluate(pt) for pt in points]

    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "sweep.csv")
    header = names + config.sweep_metrics + ["error"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for (_, vals), (got, err) in zip(points, results):
            cells = [repr(float(v)) for v in vals]
            for m in config.sweep_metrics:
                cells.append(repr(float(got[m])) if m in got else "")
            cells.append(err)
            fh.write(",".join(cells) + "\n")
    _write_scenario_manifest(config, "sweep", ["sweep.csv"])
    return [path]


def _product(grids):
    if len(grids) == 1:
        for x in grids[0]:
            yield (x,)
    else:
        for x in grids[0]:
            for y in grids[1]:
                yield (x, y)


def _write_scenario_manifest(config: ScenarioConfig, command: str, files):
    doc = {
        "command": command,
        "version": __version__,
        "config": config.raw,
        "outputs": sorted(files),
    }
    path = os.path.join(config.out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------
# click commands


@click.group()
@click.version_option(__version__)
def main():
    """Multiphoton bundle emission from a driven emitter-cavity system."""


@main.command()
@click.argument("fig_id")
@click.option("--out-dir", default=None, help="Output directory (default out/figure_<id>)")
@click.option("--plot/--no-plot", default=True, help="Also render a PNG quick look")
def figure(fig_id, out_dir, plot):
    """Reproduce the datasets of one reference figure (1b..6b)."""
    out_dir = out_dir or os.path.join("out", f"figure_{fig_id}")
    doc = figures.run_figure(fig_id, out_dir, plot=plot)
    click.echo(f"figure {fig_id}: wrote {', '.join(doc['outputs'])} to {out_dir}")


_config_opt = click.option("-c", "--config", "config_path", default=None,
                           help="Path to a JSON scenario config")
_set_opt = click.option("--set", "overrides", multiple=True,
                        help="Override a config key, e.g. --set params.omega=30")


@main.command()
@_config_opt
@_set_opt
@click.option("--threads", type=int, default=None, help="Worker pool size")
def sweep(config_path, overrides, threads):
    """Evaluate metrics over the configured parameter grid."""
    cfg = load_config(config_path, overrides)
    files = run_sweep(cfg, threads=threads)
    click.echo(f"sweep: wrote {', '.join(files)}")


@main.command("metrics")
@_config_opt
@_set_opt
def metrics_cmd(config_path, overrides):
    """Emit the full metrics report as JSON with provenance tags."""
    cfg = load_config(config_path, overrides)
    rep = metrics.report(cfg.params, env=cfg.env)
    if cfg.drive_mode == "cavity":
        try:
            rep.set("rejection_ratio", drive_mod.rejection_ratio(cfg.params), "numeric")
        except Exception as exc:
            rep.fail("rejection_ratio", exc)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "metrics.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rep.to_json() + "\n")
    _write_scenario_manifest(cfg, "metrics", ["metrics.json"])
    click.echo(f"metrics: wrote {path}")


@main.command()
@_config_opt
@_set_opt
@click.option("--omega", "omega_spec", required=True,
              help="Spectral grid start:stop:step in units of g")
def spectrum(config_path, overrides, omega_spec):
    """Sample the incoherent cavity spectrum on a frequency grid."""
    cfg = load_config(config_path, overrides)
    try:
        start, stop, step = (float(x) for x in omega_spec.split(":"))
        if step <= 0 or stop <= start:
            raise ValueError("need start < stop and step > 0")
    except ValueError as exc:
        raise ConfigError(f"bad --omega spec {omega_spec!r}: {exc}") from exc
    grid = np.arange(start, stop + step / 2, step)
    sol = metrics.full_solution(cfg.params, env=cfg.env)
    dec = sol["decomposition"]
    os.makedirs(cfg.out_dir, exist_ok=True)
    files = []
    if "spectrum" in cfg.outputs or not cfg.outputs:
        path = os.path.join(cfg.out_dir, "spectrum.csv")
        spectra.write_spectrum_csv(path, grid, spectra.spectrum_at(dec, grid),
                                   columns=("omega_over_g", "S"))
        files.append("spectrum.csv")
    if "lines" in cfg.outputs:
        labels = spectra.classify_peaks(dec, cfg.params)
        path = os.path.join(cfg.out_dir, "lines.csv")
        spectra.write_lines_csv(path, dec, labels)
        files.append("lines.csv")
    if not files:
        path = os.path.join(cfg.out_dir, "spectrum.csv")
        spectra.write_spectrum_csv(path, grid, spectra.spectrum_at(dec, grid),
                                   columns=("omega_over_g", "S"))
        files.append("spectrum.csv")
    _write_scenario_manifest(cfg, "spectrum", files)
    click.echo(f"spectrum: wrote {', '.join(files)} to {cfg.out_dir}")


@main.command("phonon-rates")
@_config_opt
@_set_opt
@click.option("--temps", required=True, help="Comma-separated temperatures in K")
def phonon_rates(config_path, overrides, temps):
    """Tabulate phonon feeding and dephasing rates versus temperature."""
    cfg = load_config(config_path, overrides)
    if cfg.env is None:
        raise ConfigError("phonon-rates needs env.* keys (at least env.temperature)")
    try:
        tlist = [float(x) for x in temps.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --temps {temps!r}: {exc}") from exc
    env0 = cfg.env
    delta_a_meV = cfg.params.delta_a * env0.hbar_g_ueV / 1000.0 / cfg.params.g
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "phonon_rates.csv")

    def factory(T):
        return PhononEnvironment(
            temperature=float(T), alpha_p=env0.alpha_p, omega_b=env0.omega_b,
            dephasing_slope=env0.dephasing_slope, hbar_g_ueV=env0.hbar_g_ueV,
        )

    phonon.write_rates_csv(path, factory, tlist, delta_a_meV)
    _write_scenario_manifest(cfg, "phonon-rates", ["phonon_rates.csv"])
    click.echo(f"phonon-rates: wrote {path}")


def entrypoint(argv=None):
    """Console entry with the documented exit codes."""
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 2
    except (BundlerError, ArithmeticError, np.linalg.LinAlgError) as exc:
        click.echo(f"numeric failure: {type(exc).__name__}: {exc}", err=True)
        return 3
    except click.exceptions.Abort:
        return 1


def console():
    sys.exit(entrypoint())


if __name__ == "__main__":
    console()
