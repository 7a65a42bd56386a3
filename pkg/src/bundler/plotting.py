"""Quick-look renderings of the figure datasets.

The CSV files are the primary product; these PNGs exist so a run can be
eyeballed without loading the data elsewhere.  Styling is deliberately
plain.  PNG output carries no timestamps, so re-runs are byte-identical.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.figsize": (7.0, 4.6),
    "figure.dpi": 130,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "savefig.bbox": "tight",
}


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return os.path.basename(path)


def _floor(arr, fraction=1e-8):
    arr = np.asarray(arr, dtype=float)
    top = np.nanmax(arr)
    return np.maximum(arr, top * fraction if top > 0 else 1e-300)


def spectrum_png(path, omegas, values, marks=()):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.semilogy(omegas, _floor(values), color="tab:blue")
        for m in marks:
            ax.axvline(m, color="0.7", lw=0.8, ls="--")
        ax.set_xlabel(r"$(\omega-\omega_L)/g$")
        ax.set_ylabel(r"$S(\omega)$")
        return _save(fig, path)


def spectrum_map_png(path, omegas, drives, S):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        floor = np.nanmax(S) * 1e-6
        img = ax.pcolormesh(
            omegas, drives, np.log10(np.maximum(S, floor)),
            shading="auto", cmap="inferno",
        )
        fig.colorbar(img, ax=ax, label=r"$\log_{10} S(\omega)$")
        ax.set_xlabel(r"$(\omega-\omega_L)/g$")
        ax.set_ylabel(r"$\Omega/g$")
        return _save(fig, path)


def loss_grid_png(path, gammas_a, gammas_s, za, zb, contour_num, contour_ana, la, lb):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        GA, GS = np.meshgrid(gammas_a, gammas_s, indexing="ij")
        ax.contourf(GA, GS, np.log10(_floor(zb)), levels=12, cmap="Reds", alpha=0.7)
        ax.contourf(GA, GS, np.log10(_floor(za)), levels=12, cmap="Blues", alpha=0.4)
        cn = ax.contour(GA, GS, np.log10(_floor(contour_num)), levels=6,
                        colors="k", linewidths=0.9)
        ax.contour(GA, GS, np.log10(_floor(contour_ana)), levels=cn.levels,
                   colors="k", linewidths=0.9, linestyles="--")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(r"$\gamma_a/g$")
        ax.set_ylabel(r"$\gamma_\sigma/g$")
        ax.set_title(f"{la} (blue) vs {lb} (red); contours: total, solid=numeric")
        return _save(fig, path)


def population_curve_png(path, drives, curves):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        styles = {"full": ("k", "-"), "plateau": ("0.5", ":")}
        for name, ys in curves.items():
            color, ls = styles.get(name, (None, "-"))
            ax.loglog(drives, _floor(ys), ls, color=color, label=name)
        ax.set_xlabel(r"$\Omega/g$")
        ax.set_ylabel("cavity population")
        ax.legend()
        return _save(fig, path)


def purity_curves_png(path, rows):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ns = sorted({int(r[0]) for r in rows})
        colors = {2: "tab:red", 3: "tab:green", 4: "tab:purple"}
        for n in ns:
            sel = [r for r in rows if int(r[0]) == n]
            ga = [r[1] for r in sel]
            ax.semilogx(ga, [r[2] for r in sel], "-", color=colors[n],
                        label=f"n={n} unfiltered")
            ax.semilogx(ga, [r[3] for r in sel], "--", color=colors[n],
                        label=f"n={n} filtered")
        ax.set_xlabel(r"$\gamma_a/g$")
        ax.set_ylabel("purity")
        ax.set_ylim(0, 1.02)
        ax.legend(fontsize=8)
        return _save(fig, path)


def rate_curves_png(path, rows):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ns = sorted({int(r[0]) for r in rows})
        colors = {2: "tab:red", 3: "tab:green", 4: "tab:purple"}
        for n in ns:
            sel = [r for r in rows if int(r[0]) == n]
            ga = [r[1] for r in sel]
            ax.loglog(ga, _floor([r[2] for r in sel]), "-", color="k", lw=0.8)
            ax.loglog(ga, _floor([r[3] for r in sel]), "--", color="k", lw=0.8)
            ax.loglog(ga, _floor([r[3 + n - 1] for r in sel]), "-",
                      color=colors[n], label=f"bundle n={n}")
        ax.set_xlabel(r"$\gamma_a/g$")
        ax.set_ylabel(r"emission rate $\gamma_a n_a$  [$g$]")
        ax.legend(fontsize=8)
        return _save(fig, path)


def phonon_rates_png(path, temps, up_ueV, down_ueV):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(temps, up_ueV, "o-", label="emitter-exciting transfer")
        ax.plot(temps, down_ueV, "s-", label="cavity-feeding transfer")
        ax.set_xlabel("T [K]")
        ax.set_ylabel(r"rate [$\mu$eV]")
        ax.legend()
        return _save(fig, path)


def filtered_vs_drive_png(path, rows, temps):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for T in temps:
            sel = [r for r in rows if r[0] == T]
            ax.loglog([r[1] for r in sel], _floor([r[2] for r in sel]),
                      label=f"T={T:.0f} K")
        sel0 = [r for r in rows if r[0] == temps[0]]
        ax.loglog([r[1] for r in sel0], _floor([r[4] for r in sel0]),
                  "k--", label="bundle (no phonons)")
        ax.set_xlabel(r"$\Omega/g$")
        ax.set_ylabel("filtered population")
        ax.legend(fontsize=8)
        return _save(fig, path)


def cavity_signal_png(path, rows, keys, key, x, y, label):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for k in keys:
            sel = [r for r in rows if key(r) == k]
            ax.loglog([x(r) for r in sel], _floor([y(r) for r in sel]),
                      label=label.format(k))
        ax.set_xlabel(r"$\Omega/g$")
        ax.set_ylabel(r"$S(\omega_a)$")
        ax.legend(fontsize=8)
        return _save(fig, path)


def rejection_png(path, drives, ratios):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.loglog(drives, ratios, "o-")
        ax.axhline(1e4, color="0.6", ls="--", lw=0.8)
        ax.set_xlabel(r"$\Omega_\mathrm{eff}/g$")
        ax.set_ylabel(r"$S_C(\omega_a)/S_I(\omega_a)$")
        return _save(fig, path)
