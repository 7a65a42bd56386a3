"""Lorentzian decomposition of the cavity emission spectrum.

The two-time correlator <a+(t+tau) a(t)> is expanded over the right/left
eigenvectors of the Liouvillian.  Each eigenmode beta contributes one line

    S_beta(w) = (1/pi) [ (gamma_beta/2) L_beta - (w - w_beta) K_beta ]
                / [ (w - w_beta)^2 + (gamma_beta/2)^2 ]

centered at w_beta = Im(lambda_beta) with full width gamma_beta =
-2 Re(lambda_beta).  The Fourier kernel is fixed so that the cavity line
lands at +Delta_a and the upper Mollow sideband at +2R (the mirrored
convention is equally consistent; this one is used everywhere here).

The stationary eigenmode carries the coherent (delta-like) weight
|<a>|^2 and is reported as a zero-width line so that the weights satisfy
the exact sum rule  sum_beta L_beta = <a+a>.  The spectrum function
itself excludes zero-width lines (it is the incoherent spectrum); the
coherent part is handled by the drive module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import DecompositionError, DimensionError
from .hilbert import QOperator
from .liouville import Superoperator, SystemParams, vec
from .steady import DensityMatrix

__all__ = [
    "SpectralLine",
    "SpectrumDecomposition",
    "decompose",
    "spectrum_at",
    "filtered_population",
    "classify_peaks",
    "group_lines",
    "write_spectrum_csv",
    "write_lines_csv",
]

#: lines with |L| + |K| below this fraction of n_a are dropped
WEIGHT_FLOOR = 1e-12

#: eigenvalues closer than this (units of g) are merged into one line
CLUSTER_EPS = 1e-9


@dataclass(frozen=True)
class SpectralLine:
    """One Lorentzian component of the emission spectrum."""

    omega: float        #: peak position, laser frame, units of g
    width: float        #: full width gamma_beta = -2 Re(lambda_beta)
    weight: float       #: Lorentzian weight L_beta (population)
    dispersive: float   #: dispersive weight K_beta
    lam: complex        #: the Liouvillian eigenvalue lambda_beta

    @property
    def is_coherent(self) -> bool:
        return self.width == 0.0


@dataclass(frozen=True)
class SpectrumDecomposition:
    """All spectral lines of one steady-state configuration."""

    lines: tuple[SpectralLine, ...]
    n_a: float                      #: total cavity population <a+a>
    coherent_weight: float          #: |<a>|^2 (zero-width component)
    classification: Mapping[int, str] | None = None

    @property
    def incoherent_population(self) -> float:
        return self.n_a - self.coherent_weight

    def weight_sum(self) -> float:
        return float(sum(ln.weight for ln in self.lines))

    def with_classification(self, labels: Mapping[int, str]) -> "SpectrumDecomposition":
        return replace(self, classification=dict(labels))


def decompose(
    L: Superoperator,
    a_op: QOperator,
    rho_ss: DensityMatrix,
    weight_floor: float = WEIGHT_FLOOR,
    cluster_eps: float = CLUSTER_EPS,
) -> SpectrumDecomposition:
    """Eigendecompose the Liouvillian into spectral lines of the cavity field.

    Parameters
    ----------
    L : Superoperator
        Liouvillian whose steady state is ``rho_ss``.
    a_op : QOperator
        Cavity annihilation operator on the same composite space.
    rho_ss : DensityMatrix
        Steady state of ``L`` (verified; a loose residual raises).

    Returns
    -------
    SpectrumDecomposition
        Lines sorted by position.  Eigenvalues within ``cluster_eps`` are
        reported as a single line with summed weights, since individual
        weight attribution is meaningless for quasi-degenerate modes.
    """
    if a_op.dims != L.dims or rho_ss.dims != L.dims:
        raise DimensionError("operator, state and Liouvillian dims must agree")
    resid = np.linalg.norm(L.data @ vec(rho_ss.data))
    if resid > 1e-8 * max(np.linalg.norm(L.data), 1.0):
        raise DecompositionError(
            f"rho_ss is not stationary for L (residual {resid:.3e})"
        )

    lam, R = np.linalg.eig(L.data)
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > 1e12:
        clusters = _cluster_report(lam)
        raise DecompositionError(
            f"near-defective eigenvector basis (cond {cond:.3e}); "
            f"clustered eigenvalues: {clusters}"
        )

    # initial vector a rho_ss; observation functional Tr[a+ .]
    chi0 = vec(a_op.data @ rho_ss.data)
    y = np.linalg.solve(R, chi0)
    obs = vec(a_op.data).conj() @ R
    c = obs * y

    n_a = float((vec(a_op.dag().data @ a_op.data).conj() @ vec(rho_ss.data)).real)
    coherent = 0.0
    raw = []
    for k in range(lam.size):
        lk = lam[k]
        if abs(lk) < 1e-12 * max(1.0, np.abs(lam).max()):
            coherent += c[k].real
            raw.append((0.0, 0.0, c[k].real, 0.0, 0.0 + 0.0j))
            continue
        width = max(0.0, -2.0 * lk.real)
        raw.append((float(lk.imag), width, float(c[k].real), float(-c[k].imag), lk))

    merged = _merge_clusters(raw, cluster_eps)
    floor = weight_floor * max(abs(n_a), 1e-300)
    lines = tuple(
        SpectralLine(*vals)
        for vals in merged
        if abs(vals[2]) + abs(vals[3]) >= floor
    )
    lines = tuple(sorted(lines, key=lambda ln: (ln.omega, ln.width)))
    return SpectrumDecomposition(lines=lines, n_a=n_a, coherent_weight=coherent)


def _merge_clusters(raw, eps):
    """Sum weights of eigenvalues closer than eps; position by weight mean."""
    out = []
    used = [False] * len(raw)
    lams = [r[4] for r in raw]
    for i in range(len(raw)):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        for j in range(i + 1, len(raw)):
            if not used[j] and abs(lams[i] - lams[j]) < eps:
                group.append(j)
                used[j] = True
        if len(group) == 1:
            out.append(raw[i])
            continue
        Ls = sum(raw[j][2] for j in group)
        Ks = sum(raw[j][3] for j in group)
        wsum = sum(abs(raw[j][2]) for j in group) or 1.0
        om = sum(raw[j][0] * abs(raw[j][2]) for j in group) / wsum
        wd = max(raw[j][1] for j in group)
        out.append((om, wd, Ls, Ks, lams[i]))
    return out


def _cluster_report(lam, eps=1e-9, limit=4):
    lam = np.sort_complex(lam)
    pairs = [
        (lam[i], lam[i + 1])
        for i in range(lam.size - 1)
        if abs(lam[i + 1] - lam[i]) < eps
    ]
    return pairs[:limit]


def spectrum_at(dec: SpectrumDecomposition, omega) -> np.ndarray | float:
    """Incoherent spectrum S(omega); vectorized over omega.

    Zero-width (coherent) lines are excluded; their delta-like weight is
    available as ``dec.coherent_weight``.
    """
    om = np.asarray(omega, dtype=float)
    S = np.zeros_like(om)
    for ln in dec.lines:
        if ln.is_coherent:
            continue
        half = ln.width / 2.0
        d = om - ln.omega
        S += (half * ln.weight - d * ln.dispersive) / (d * d + half * half)
    S /= np.pi
    return S if S.shape else float(S)


def filtered_population(
    dec: SpectrumDecomposition,
    omega_target: float,
    window: float,
    include_coherent: bool = False,
) -> float:
    """Population emitted within ``window`` of ``omega_target``.

    Sums the Lorentzian weights of all lines whose center lies strictly
    inside the window.  Returns 0.0 when no line is selected (the
    ``empty`` flag is observable via :func:`selected_lines`).
    """
    if window <= 0:
        raise ValueError(f"window must be positive, got {window}")
    sel = selected_lines(dec, omega_target, window, include_coherent)
    if not sel:
        warnings.warn(
            f"no spectral line within {window} of omega={omega_target}",
            stacklevel=2,
        )
        return 0.0
    return float(sum(ln.weight for ln in sel))


def selected_lines(dec, omega_target, window, include_coherent=False):
    return [
        ln
        for ln in dec.lines
        if abs(ln.omega - omega_target) < window
        and (include_coherent or not ln.is_coherent)
    ]


def classify_peaks(dec: SpectrumDecomposition, params: SystemParams) -> dict[int, str]:
    """Assign each line to the nearest expected transition frequency.

    Targets are the Mollow lines at 0 and +-2R and the cavity line at
    Delta_a; a line matches when it falls within max(gamma_a, width)/2 of
    the target.  A line equidistant from two merged targets is labeled
    ``other`` and the merge is reported through a warning.
    """
    R = params.rabi
    targets = {
        "mollow_central": 0.0,
        "mollow_sideband_plus": 2.0 * R,
        "mollow_sideband_minus": -2.0 * R,
        "cavity_peak": params.delta_a,
    }
    if 2.0 * R < params.gamma_a / 2.0:
        # triplet unresolved: a single emitter line remains
        targets = {"mollow_central": 0.0, "cavity_peak": params.delta_a}
    if abs(2.0 * R - params.delta_a) < params.gamma_a / 2.0:
        warnings.warn(
            "cavity peak and upper Mollow sideband coincide "
            f"(2R={2 * R:g}, delta_a={params.delta_a:g}): merged taxonomy",
            stacklevel=2,
        )
    labels: dict[int, str] = {}
    for idx, ln in enumerate(dec.lines):
        if ln.is_coherent:
            labels[idx] = "coherent"
            continue
        tol = max(params.gamma_a, ln.width) / 2.0
        dists = sorted((abs(ln.omega - pos), name) for name, pos in targets.items())
        best, second = dists[0], dists[1]
        if best[0] > tol:
            labels[idx] = "other"
        elif second[0] - best[0] < 1e-9:
            labels[idx] = "other"  # tie between merged targets
        else:
            labels[idx] = best[1]
    return labels


def group_lines(dec: SpectrumDecomposition, resolution: float):
    """Aggregate lines into peak groups no finer than ``resolution``.

    Returns a list of (position, width, weight) sorted by position, where
    the position is the |L|-weighted mean and the width the weighted mean
    of the group members.  Useful to compare against peaks read off a
    plotted spectrum.
    """
    live = [ln for ln in dec.lines if not ln.is_coherent]
    live.sort(key=lambda ln: ln.omega)
    groups: list[list[SpectralLine]] = []
    for ln in live:
        if groups and ln.omega - groups[-1][-1].omega < resolution:
            groups[-1].append(ln)
        else:
            groups.append([ln])
    out = []
    for grp in groups:
        wsum = sum(abs(l.weight) for l in grp)
        if wsum <= 0:
            continue
        pos = sum(l.omega * abs(l.weight) for l in grp) / wsum
        wid = sum(l.width * abs(l.weight) for l in grp) / wsum
        out.append((pos, wid, sum(l.weight for l in grp)))
    return out


def _fmt(x) -> str:
    return repr(float(x))


def write_spectrum_csv(path, omegas, values, columns=("omega", "S_omega")):
    """Two-column CSV of a sampled spectrum (shortest round-trip floats)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for w, s in zip(omegas, values):
            fh.write(f"{_fmt(w)},{_fmt(s)}\n")


def write_lines_csv(path, dec: SpectrumDecomposition, labels=None):
    """Line table CSV: omega_beta, gamma_beta, L_beta, K_beta, label."""
    labels = labels or dec.classification or {}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("omega_beta,gamma_beta,L_beta,K_beta,label\n")
        for idx, ln in enumerate(dec.lines):
            lab = labels.get(idx, "")
            fh.write(
                f"{_fmt(ln.omega)},{_fmt(ln.width)},{_fmt(ln.weight)},"
                f"{_fmt(ln.dispersive)},{lab}\n"
            )
