"""Phonon environment: spectral density, displacement factor, feeding rates.

This is the only module that works in laboratory units (meV, K, ps); the
conversion to solver units happens here, through the environment's value
of hbar*g.  The spectral density is super-ohmic with a Gaussian cutoff,

    J(E) = alpha_p E^3 exp(-E^2 / 2 omega_b^2),

with E in meV and alpha_p in meV^-2.  Temperature enters through the
thermal occupation factor coth(E / 2 kB T).

Emitter-cavity transfer rates follow from the polaron-frame correlation
function: with phi(t) the phonon correlation phase, the uphill (cavity to
emitter, operator s+ a) and downhill (s a+) rates are

    rate = 2 <B>^2 g^2 Re int_0^inf dt e^(+-i Delta_a t) (e^phi(t) - 1),

with the + sign on the s+ a channel.  For a cavity above the emitter
(Delta_a > 0) that channel releases energy to the lattice and survives at
T = 0; the s a+ channel needs thermal phonons and vanishes there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IntegrationError
from .liouville import SystemParams

__all__ = [
    "PhononEnvironment",
    "KB_MEV_PER_K",
    "HBAR_MEV_PS",
    "spectral_density",
    "displacement_B",
    "phi",
    "feeding_rates",
    "feeding_rates_in_g",
    "dephasing_rate",
    "ueV_to_g",
    "g_to_ueV",
    "write_rates_csv",
]

KB_MEV_PER_K = 0.08617333262  # Boltzmann constant, meV/K
HBAR_MEV_PS = 0.6582119569    # hbar, meV*ps


@dataclass(frozen=True)
class PhononEnvironment:
    """Lattice environment of a semiconductor emitter.

    Attributes
    ----------
    temperature : float
        Lattice temperature in K.
    alpha_p : float
        Phonon coupling in meV^-2.
    omega_b : float
        Cutoff energy of the spectral density in meV.
    dephasing_slope : float
        Linear-in-T pure dephasing slope A in ueV/K.
    hbar_g_ueV : float
        Emitter-cavity coupling hbar*g in ueV; sets the conversion between
        lab units and solver units.
    """

    temperature: float
    alpha_p: float = 0.18
    omega_b: float = 0.22
    dephasing_slope: float = 1.0
    hbar_g_ueV: float = 45.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.alpha_p < 0 or self.omega_b <= 0:
            raise ValueError("need alpha_p >= 0 and omega_b > 0")


def spectral_density(omega_meV, env: PhononEnvironment):
    """J(E) in meV for E >= 0 (vectorized)."""
    E = np.asarray(omega_meV, dtype=float)
    out = env.alpha_p * E**3 * np.exp(-(E**2) / (2.0 * env.omega_b**2))
    return out if out.shape else float(out)


def _coth_half_beta(E, T):
    """coth(E / 2 kB T), with the T = 0 limit equal to 1."""
    if T <= 0:
        return np.ones_like(E)
    x = E / (2.0 * KB_MEV_PER_K * T)
    return 1.0 / np.tanh(x)


def _gl_nodes(env: PhononEnvironment, t_max_ps: float, upper_factor: float = 12.0):
    """Composite Gauss-Legendre nodes resolving oscillations up to t_max."""
    upper = upper_factor * env.omega_b
    width = env.omega_b / 4.0
    if t_max_ps > 0:
        width = min(width, math.pi * HBAR_MEV_PS / (4.0 * t_max_ps))
    panels = max(8, int(math.ceil(upper / width)))
    x, w = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(0.0, upper, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def displacement_B(env: PhononEnvironment) -> float:
    """Mean lattice displacement factor <B> in (0, 1].

    exp[-1/2 int_0^inf dE J(E)/E^2 coth(E / 2 kB T)]; the Gaussian cutoff
    makes the exponent finite, and for very hot lattices a value
    underflowing to zero is returned with a diagnostic.
    """
    if env.alpha_p == 0.0:
        return 1.0
    E, w = _gl_nodes(env, 0.0)
    integ = env.alpha_p * E * np.exp(-(E**2) / (2.0 * env.omega_b**2))
    exponent = 0.5 * float(w @ (integ * _coth_half_beta(E, env.temperature)))
    if exponent > 50.0:
        import warnings

        warnings.warn(
            f"<B> underflows to zero (exponent {exponent:.1f})", stacklevel=2
        )
        return 0.0
    return math.exp(-exponent)


def phi(t_ps, env: PhononEnvironment):
    """Phonon correlation phase phi(t) (t in ps; vectorized, complex).

    phi(t) = int_0^inf dE J(E)/E^2 [coth(E/2 kB T) cos(E t / hbar)
                                     - i sin(E t / hbar)].
    Quadrature panels shrink with max(t) so the oscillatory kernel stays
    resolved: panel width <= pi hbar / (4 t).
    """
    t = np.atleast_1d(np.asarray(t_ps, dtype=float))
    E, w = _gl_nodes(env, float(np.max(np.abs(t))) if t.size else 0.0)
    f = env.alpha_p * E * np.exp(-(E**2) / (2.0 * env.omega_b**2))
    cothv = _coth_half_beta(E, env.temperature)
    phase = np.outer(t, E) / HBAR_MEV_PS
    out = (np.cos(phase) * (f * cothv) - 1j * np.sin(phase) * f) @ w
    return out if np.asarray(t_ps).shape else complex(out[0])


@lru_cache(maxsize=32)
def _kernel_grid(env: PhononEnvironment):
    """Cached (t, e^phi - 1, use_tail) for one environment.

    The window closes where |e^phi - 1| drops below 1e-8 of its initial
    value.  The zero-point part of the kernel carries a real -alpha
    hbar^2/t^2 tail that does not reach that threshold at any practical
    time for cold lattices; in that case the grid stops where the kernel
    matches its power-law asymptote and the remainder is integrated
    analytically (see :func:`_tail_integral`).
    """
    corr_time = HBAR_MEV_PS / env.omega_b
    kern0 = abs(np.expm1(phi(0.0, env)))
    use_tail = False
    t_max = None
    if kern0 == 0.0:
        t_max = 10.0 * corr_time
    else:
        t_probe = np.linspace(0.0, 40.0 * corr_time, 128)
        kern_probe = np.abs(np.expm1(phi(t_probe, env)))
        below = np.nonzero(kern_probe <= 1e-8 * kern0)[0]
        if below.size:
            t_max = float(max(t_probe[below[0]], 4.0 * corr_time))
        else:
            # power-law regime: switch to the analytic tail once phi has
            # converged onto -alpha hbar^2 / t^2
            t_max = 25.0 * corr_time
            asym = -env.alpha_p * HBAR_MEV_PS**2 / t_max**2
            val = phi(t_max, env)
            if abs(val - asym) > 0.25 * abs(asym):
                raise IntegrationError(
                    f"phonon kernel neither decays below 1e-8 of its initial "
                    f"value by t={t_probe[-1]:.0f} ps nor matches its power-law "
                    f"asymptote at t={t_max:.0f} ps ({val:.3e} vs {asym:.3e})"
                )
            use_tail = True
    # dt resolves oscillations up to ~5 meV detunings at 40+ points/period
    npts = int(math.ceil(t_max / 0.02)) + 1
    npts += (npts + 1) % 2  # Simpson wants an odd point count
    t = np.linspace(0.0, t_max, npts)
    return t, np.expm1(phi(t, env)), use_tail


def _tail_integral(env: PhononEnvironment, sign: float, delta_ang: float, T: float):
    """int_T^inf e^(sign i Delta t) (-alpha hbar^2 / t^2) dt, analytic."""
    from scipy.special import exp1

    c = sign * 1j * delta_ang
    if abs(delta_ang) < 1e-12:
        return complex(-env.alpha_p * HBAR_MEV_PS**2 / T)
    val = np.exp(c * T) / T + c * exp1(-c * T)
    return complex(-env.alpha_p * HBAR_MEV_PS**2 * val)


def feeding_rates(env: PhononEnvironment, delta_a_meV: float) -> tuple[float, float]:
    """Phonon-assisted transfer rates (uphill s+a, downhill s a+) in meV.

    Time-domain quadrature of the polaron kernel against e^(+-i Delta t).
    Results are cached per (environment, detuning).
    """
    return _feeding_rates_cached(env, float(delta_a_meV))


@lru_cache(maxsize=4096)
def _feeding_rates_cached(env: PhononEnvironment, delta_a_meV: float):
    if env.alpha_p == 0.0:
        return (0.0, 0.0)
    t, kernel, use_tail = _kernel_grid(env)
    delta_ang = delta_a_meV / HBAR_MEV_PS
    g_ang = (env.hbar_g_ueV / 1000.0) / HBAR_MEV_PS  # 1/ps
    pref = 2.0 * displacement_B(env) ** 2 * g_ang**2
    rates = []
    for sign in (+1.0, -1.0):
        integral = _simpson(np.exp(sign * 1j * delta_ang * t) * kernel, t)
        if use_tail:
            integral += _tail_integral(env, sign, delta_ang, float(t[-1]))
        rates.append(pref * integral.real * HBAR_MEV_PS)  # 1/ps -> meV
    up, down = rates
    # quadrature noise floor: deeply suppressed rates may come out as a
    # small negative residual of the truncated window; clamp those,
    # reject anything beyond the floor as a genuine integration failure
    scale = pref * HBAR_MEV_PS * float(np.trapezoid(np.abs(kernel), t))
    out = []
    for r in (up, down):
        if r < 0.0:
            if abs(r) > 1e-4 * max(scale, 1e-300):
                raise IntegrationError(
                    f"negative phonon rate {r:.3e} meV at delta_a={delta_a_meV} meV"
                )
            r = 0.0
        out.append(r)
    return tuple(out)


def _simpson(y, x):
    from scipy.integrate import simpson

    return complex(simpson(y.real, x=x)) + 1j * complex(simpson(y.imag, x=x))


def feeding_rates_in_g(env: PhononEnvironment, params: SystemParams):
    """Feeding rates at the detuning implied by ``params``, in units of g."""
    hbar_g_meV = env.hbar_g_ueV / 1000.0
    delta_a_meV = params.delta_a * hbar_g_meV / params.g
    up, down = feeding_rates(env, delta_a_meV)
    return up / hbar_g_meV * params.g, down / hbar_g_meV * params.g


def dephasing_rate(env: PhononEnvironment) -> float:
    """Linear-in-T pure dephasing A*T, converted to units of g."""
    return ueV_to_g(env, env.dephasing_slope * env.temperature)


def ueV_to_g(env: PhononEnvironment, x_ueV: float) -> float:
    return x_ueV / env.hbar_g_ueV


def g_to_ueV(env: PhononEnvironment, x_g: float) -> float:
    return x_g * env.hbar_g_ueV


def write_rates_csv(path, env_factory, temperatures, delta_a_meV):
    """Rate-vs-temperature table: T_K, rate_up, rate_down, gamma_phi (meV)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("T_K,rate_up,rate_down,gamma_phi\n")
        for T in temperatures:
            env = env_factory(T)
            up, down = feeding_rates(env, delta_a_meV)
            gphi_meV = env.dephasing_slope * env.temperature / 1000.0
            fh.write(f"{repr(float(T))},{repr(up)},{repr(down)},{repr(gphi_meV)}\n")
