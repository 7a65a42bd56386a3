"""Effective n-photon model of the dressed emitter-cavity system.

In the strong-driving regime the dressed doublet |+>, |-> exchanges
excitation with the cavity through an effective n-photon coupling g_n.
This module provides g_n both in closed form (leading order in g) and
numerically (projection of the full coupling onto the near-resonant
manifold followed by elimination of the intermediate levels), the
master equation of the reduced bundle model, and the closed-form and
linear-closure values of the bundle population it predicts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import (
    DimensionError,
    InvalidOrderError,
    ManifoldDegeneracyError,
    ValidityWarning,
)
from .hilbert import QOperator, dressed_basis, tensor_embed
from .liouville import Channel, Superoperator, SystemParams, liouvillian

__all__ = [
    "DressedRates",
    "EffectiveCoupling",
    "dressed_rates",
    "gn_closed",
    "gn_numeric",
    "manifold_hamiltonian",
    "shifted_resonance",
    "bundle_liouvillian",
    "bundle_operators",
    "bundle_population",
    "weak_driving_limit",
    "strong_driving_coefficient",
]


@dataclass(frozen=True)
class DressedRates:
    """Secular rates of the dressed doublet inherited from the bare decay.

    gamma_tilde and P_tilde are the dressed decay and pump (gamma_sigma/4
    each), gamma_phi_tilde the dressed dephasing (gamma_sigma).  An
    optional phonon environment adds its pure dephasing in the same
    secular fashion: gamma_phi/4 to both pump and decay.
    """

    gamma_tilde: float
    P_tilde: float
    gamma_phi_tilde: float

    @property
    def Gamma_tilde(self) -> float:
        return self.gamma_tilde + self.P_tilde


@dataclass(frozen=True)
class EffectiveCoupling:
    """Effective n-photon coupling and the Purcell rate it implies."""

    n: int
    gn: float
    gamma_a: float
    level_shifts: tuple[float, float] | None = None

    @property
    def kappa_n(self) -> float:
        """Generalized n-photon Purcell rate 4 (n-1)! g_n^2 / gamma_a."""
        return 4.0 * math.factorial(self.n - 1) * self.gn**2 / self.gamma_a


def dressed_rates(params: SystemParams, env=None) -> DressedRates:
    """Dressed decay/pump/dephasing rates for the given parameters.

    Bare pure dephasing (params.gamma_phi, or the phonon environment's
    temperature-linear rate) flips the dressed doublet rather than
    dephasing it, so it feeds the dressed pump and decay equally.
    """
    gs = params.gamma_sigma
    gphi = params.gamma_phi
    if env is not None:
        from . import phonon

        gphi = gphi + phonon.dephasing_rate(env)
    return DressedRates(
        gamma_tilde=gs / 4.0 + gphi / 4.0,
        P_tilde=gs / 4.0 + gphi / 4.0,
        gamma_phi_tilde=gs,
    )


def _warn_strong_driving(params, stacklevel=3):
    if params.omega < 5.0 * params.g:
        warnings.warn(
            f"effective coupling assumes Omega >> g (Omega={params.omega})",
            ValidityWarning,
            stacklevel=stacklevel,
        )


def gn_closed(params: SystemParams, n: int | None = None) -> EffectiveCoupling:
    """Leading-order effective n-photon coupling.

    General-detuning form g_n = (g^n / R^{n-1}) (n^2/2)^{n-1}
    c^{n-1} s^{n+1} / ((n-1)!)^2, which at zero emitter-laser detuning
    reduces to g^n n^{2(n-1)} / (2 (4 Omega)^{n-1} ((n-1)!)^2).
    """
    n = params.n if n is None else int(n)
    if n < 1:
        raise InvalidOrderError(f"order must be >= 1, got {n}")
    _warn_strong_driving(params)
    db = dressed_basis(params.delta, params.omega)
    gn = (
        (params.g**n / db.R ** (n - 1))
        * (n**2 / 2.0) ** (n - 1)
        * db.c ** (n - 1)
        * db.s ** (n + 1)
        / math.factorial(n - 1) ** 2
    )
    return EffectiveCoupling(n=n, gn=float(gn), gamma_a=params.gamma_a)


def manifold_hamiltonian(params: SystemParams, n: int):
    """Blocks (h, H, V) of the coupling Hamiltonian on the bundle manifold.

    The slow subspace holds {|+,0>, |-,n>}; the fast one the intermediate
    pairs {|+,1>, |-,1>, ..., |+,n-1>, |-,n-1>}.  Built recursively; the
    construction is validated against a brute-force projection of the full
    Hamiltonian onto the same states.
    """
    db = dressed_basis(params.delta, params.omega)
    g, R, Da = params.g, db.R, params.delta_a
    c, s = db.c, db.s
    h = np.array([[R, 0.0], [0.0, -R + n * Da]])
    # H over intermediate pairs, built up one photon rung at a time
    H = np.array([[R + Da, 0.0], [0.0, -R + Da]])
    for m in range(2, n):
        k = H.shape[0]
        new = np.zeros((k + 2, k + 2))
        new[:k, :k] = H
        new[k, k] = R + m * Da
        new[k + 1, k + 1] = -R + m * Da
        X = math.sqrt(m) * g * np.array([[c * s, -(c**2)], [s**2, -c * s]])
        new[k : k + 2, k - 2 : k] = X
        new[k - 2 : k, k : k + 2] = X.T
        H = new
    V = np.zeros((2, 2 * (n - 1)))
    V[0, 0] = g * c * s
    V[0, 1] = g * s**2
    V[1, -2] = math.sqrt(n) * g * s**2
    V[1, -1] = -math.sqrt(n) * g * c * s
    return h, H, V


def gn_numeric(params: SystemParams, n: int | None = None) -> EffectiveCoupling:
    """Effective n-photon coupling by elimination of intermediate levels.

    Computes h_eff = h + V (E0 - H)^(-1) V^T with E0 the unperturbed
    energy of |+,0> and returns |h_eff[0,1]| / sqrt(n!), since sqrt(n!)
    is the a^n matrix element between the manifold endpoints and hence
    the conversion between the two-state Rabi element and the coupling
    constant of the reduced model.  The diagonal of h_eff carries the
    level renormalizations, exposed as ``level_shifts``.
    """
    n = params.n if n is None else int(n)
    if not 2 <= n <= 6:
        raise InvalidOrderError(f"numeric coupling supports 2 <= n <= 6, got {n}")
    h, H, V = manifold_hamiltonian(params, n)
    db = dressed_basis(params.delta, params.omega)
    E0 = db.R
    # elimination is valid only while every intermediate level stays far
    # from the manifold compared with the coupling to it
    gap = float(np.min(np.abs(np.linalg.eigvalsh(H) - E0)))
    vmax = float(np.max(np.abs(V))) if V.size else 0.0
    if gap < 3.0 * vmax:
        levels = np.diag(H)
        idx = int(np.argmin(np.abs(levels - E0)))
        sign = "+" if idx % 2 == 0 else "-"
        raise ManifoldDegeneracyError(
            f"intermediate level |{sign},{idx // 2 + 1}> (energy {levels[idx]:.6g}) "
            f"crosses the target manifold at E0={E0:.6g} "
            f"(gap {gap:.3g} vs coupling {vmax:.3g})"
        )
    A = E0 * np.eye(H.shape[0]) - H
    h_eff = h + V @ np.linalg.solve(A, V.T)
    shifts = (float(h_eff[0, 0] - h[0, 0]), float(h_eff[1, 1] - h[1, 1]))
    gn = abs(h_eff[0, 1]) / math.sqrt(math.factorial(n))
    return EffectiveCoupling(
        n=n, gn=float(gn), gamma_a=params.gamma_a, level_shifts=shifts
    )


def shifted_resonance(params: SystemParams, n: int | None = None, iterations: int = 2) -> float:
    """n-photon resonance detuning corrected by the manifold level shifts.

    Solves R + d0(delta_a) = -R + n delta_a + dn(delta_a) by fixed-point
    iteration starting from the unshifted value 2R/n.
    """
    n = params.n if n is None else int(n)
    da = 2.0 * params.rabi / n
    for _ in range(iterations):
        ec = gn_numeric(params.at(delta_a=da), n)
        d0, dn = ec.level_shifts
        da = (2.0 * params.rabi + d0 - dn) / n
    return float(da)


def bundle_operators(n: int, N: int):
    """Dressed-doublet and cavity operators of the reduced bundle model."""
    if N < 2 * n + 2:
        raise DimensionError(f"bundle model needs N >= 2n+2 = {2 * n + 2}, got {N}")
    dims = (2, N + 1)
    a = tensor_embed(hilbert.annihilation(N + 1), 1, dims)
    sm = tensor_embed(hilbert.lower_tls(), 0, dims)  # dressed basis order (-, +)
    sz = tensor_embed(QOperator(np.diag([-1.0, 1.0]), (2,)), 0, dims)
    return {"a": a, "ad": a.dag(), "sigma": sm, "sigmad": sm.dag(), "sigma_z": sz, "dims": dims}


def bundle_liouvillian(
    params: SystemParams,
    n: int | None = None,
    N: int | None = None,
    env=None,
) -> tuple[Superoperator, dict]:
    """Master equation of the reduced n-photon model.

    H = R sz + Delta_a a+a + g_n (s+ a^n + s a+^n) with the dressed decay,
    pump and dephasing channels plus cavity leakage.  Returns the
    Liouvillian and the operator dictionary.
    """
    n = params.n if n is None else int(n)
    if N is None:
        N = 2 * n + 4
    if params.omega < 10 * params.gamma_sigma:
        warnings.warn(
            "bundle model assumes Omega >> gamma_sigma",
            ValidityWarning,
            stacklevel=2,
        )
    ops = bundle_operators(n, N)
    rates = dressed_rates(params, env=env)
    gn = gn_closed(params, n).gn
    a, sm, sp, sz = ops["a"], ops["sigma"], ops["sigmad"], ops["sigma_z"]
    an = ops["a"]
    for _ in range(n - 1):
        an = an @ ops["a"]
    H = (
        params.rabi * sz
        + params.delta_a * (ops["ad"] @ a)
        + gn * (sp @ an + (sp @ an).dag())
    )
    chans = [
        Channel(a, params.gamma_a),
        Channel(sm, rates.gamma_tilde),
        Channel(sp, rates.P_tilde),
        Channel(sp @ sm, rates.gamma_phi_tilde),
    ]
    _warn_antibunching(params, n, gn, rates)
    return liouvillian(H, chans), ops


def _warn_antibunching(params, n, gn, rates):
    kappa = 4.0 * math.factorial(n - 1) * gn**2 / params.gamma_a
    if n * params.gamma_a < 10.0 * (kappa + rates.gamma_tilde):
        warnings.warn(
            "outside the antibunched-bundle regime: n*gamma_a is not large "
            f"against kappa_n + gamma_tilde ({n * params.gamma_a:.3g} vs "
            f"{kappa + rates.gamma_tilde:.3g})",
            ValidityWarning,
            stacklevel=4,
        )


def bundle_population(
    params: SystemParams,
    n: int | None = None,
    method: str = "closed",
    env=None,
) -> float:
    """Steady bundle population n_a^(n) of the reduced model.

    ``closed``
        n^2 kappa_n P~ / [Gamma~ (n gamma_a + Gamma~ + gamma_phi~)
        + kappa_n n gamma_a], the resonant closed form.
    ``simplified``
        n (kappa_n/gamma_a) P~ / (kappa_n + Gamma~), its n gamma_a >>
        gamma_sigma limit.
    ``ode``
        Steady state of the three-correlator linear closure, including
        the detuning mismatch 2R - n delta_a, so it reduces to ``closed``
        exactly on resonance.
    """
    n = params.n if n is None else int(n)
    ec = gn_closed(params, n)
    rates = dressed_rates(params, env=env)
    if ec.gn > 0.1 * params.gamma_a:
        warnings.warn(
            f"bundle population assumes g_n << gamma_a (g_n={ec.gn:.3g}, "
            f"gamma_a={params.gamma_a:.3g})",
            ValidityWarning,
            stacklevel=2,
        )
    _warn_antibunching(params, n, ec.gn, rates)
    ga = params.gamma_a
    P, G, gphi = rates.P_tilde, rates.Gamma_tilde, rates.gamma_phi_tilde
    kap = 4.0 * math.factorial(n - 1) * ec.gn**2 / ga
    if method == "closed":
        return float(
            n**2 * kap * P / (G * (n * ga + G + gphi) + kap * n * ga)
        )
    if method == "simplified":
        return float(n * (kap / ga) * P / (kap + G))
    if method == "ode":
        # linear closure over <a^n s+>, <s+ s>, <a+ a>
        mismatch = 2.0 * params.rabi - n * params.delta_a
        D0 = (n * ga + P + rates.gamma_tilde + gphi) / 2.0
        fac = math.factorial(n)
        lor = D0 / (D0**2 + mismatch**2)
        x = P / (G + 2.0 * fac * ec.gn**2 * lor)
        return float(2.0 * n * fac * ec.gn**2 * lor * x / ga)
    raise ValueError(f"unknown method {method!r}")


def weak_driving_limit(params: SystemParams, n: int | None = None) -> float:
    """Bundle population plateau (n/4)(gamma_sigma/gamma_a) as Omega -> 0."""
    n = params.n if n is None else int(n)
    return float(n * params.gamma_sigma / (4.0 * params.gamma_a))


def strong_driving_coefficient(params: SystemParams, n: int | None = None) -> float:
    """Coefficient A_n of the large-driving law n_a^(n) -> g^{2n} A_n / Omega^{2(n-1)}."""
    n = params.n if n is None else int(n)
    ga, gs = params.gamma_a, params.gamma_sigma
    return float(
        1.0
        / (
            16.0 ** (n - 1)
            * ga
            * (2.0 * n * ga + 3.0 * gs)
            * n ** (2 * (1 - 2 * n))
            * math.factorial(n - 1) ** 3
        )
    )
