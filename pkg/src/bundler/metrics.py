"""Composite figures of merit: purities, optima, asymptotes and reports.

Analytic quantities are assembled from their constituent populations
(bundle population from the reduced-model closed form, one-photon
background from the correlator closure, filtered background from the
quantum-regression line) rather than from any single purity formula, and
numeric quantities from full steady-state solves plus spectral
filtering.  Every report field carries a provenance tag.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import effective, onephoton, spectra, steady
from .effective import (
    bundle_population,
    dressed_rates,
    gn_closed,
    strong_driving_coefficient,
)
from .errors import InvalidOrderError, ValidityWarning
from .liouville import (
    SystemParams,
    bare_channels,
    hamiltonian,
    liouvillian,
    phonon_channels,
    system_operators,
)

__all__ = [
    "BundleMetrics",
    "purity",
    "purity_filtered",
    "purity_two_photon_asymptote",
    "purity_filtered_two_photon_asymptote",
    "optimal_gamma_sigma",
    "optimal_omega",
    "resonance_detuning",
    "report",
    "full_solution",
    "filtered_window",
]

#: spectral filter half-window around the cavity line, in units of gamma_a
FILTER_HALF_WINDOWS = 0.5


def filtered_window(params: SystemParams) -> float:
    """Default filter half-width gamma_a/2 around the cavity frequency."""
    return FILTER_HALF_WINDOWS * params.gamma_a


def full_solution(
    params: SystemParams,
    env=None,
    N: int | None = None,
    decompose: bool = True,
    truncation_tol: float = steady.TRUNCATION_TOL,
):
    """Steady state of the full model and (optionally) its decomposition.

    Returns a dict with n_a, n_af (when decomposed), the truncation and
    the decomposition object.  Phonon channels are included when an
    environment is given.
    """
    extra = None
    if env is not None:
        extra = lambda M: phonon_channels(env, params, M)
    if N is None:
        N = steady.choose_truncation(params, tol=truncation_tol, extra_channels=extra)
    H = hamiltonian(params, N)
    chans = bare_channels(params, N)
    if extra is not None:
        chans = chans + extra(N)
    L = liouvillian(H, chans)
    rho = steady.steady_state(L)
    ops = system_operators(N)
    n_a = steady.expectation(rho, ops["ad"] @ ops["a"]).real
    out = {"N": N, "n_a": float(n_a), "rho": rho, "L": L, "ops": ops}
    if decompose:
        dec = spectra.decompose(L, ops["a"], rho)
        out["decomposition"] = dec
        out["n_af"] = spectra.filtered_population(
            dec, params.delta_a, filtered_window(params)
        )
    return out


def purity(params: SystemParams, n: int | None = None, mode: str = "analytic", env=None) -> float:
    """Fraction of the cavity population fed by the n-photon process.

    ``analytic``
        bundle population (closed form) over bundle + one-photon
        background (correlator closure at the actual detuning).
    ``numeric``
        bundle population from the reduced-model steady state over the
        total population of the full solve.
    """
    n = params.n if n is None else int(n)
    if mode == "analytic":
        na_n = bundle_population(params, n, "closed", env=env)
        na_1 = onephoton.na1(params, "full")
        return _clamp_unit(na_n / (na_1 + na_n))
    if mode == "numeric":
        na_n = _bundle_numeric(params, n, env=env)
        na_full = full_solution(params, env=env, decompose=False)["n_a"]
        return _clamp_unit(na_n / na_full)
    raise ValueError(f"unknown mode {mode!r}")


def purity_filtered(
    params: SystemParams, n: int | None = None, mode: str = "analytic", env=None
) -> float:
    """Purity of the emission filtered at the cavity frequency.

    ``analytic``
        bundle population over the filtered background (quantum
        regression) plus every lower-order bundle population m = 2..n,
        evaluated off resonance through the closure's detuning mismatch.
    ``numeric``
        bundle population over the filtered population of the full
        spectral decomposition.
    """
    n = params.n if n is None else int(n)
    if mode == "analytic":
        na_n = _offresonant_bundle(params, n, env=env)
        background = onephoton.na1_filtered(params, "qrt")
        spurious = sum(
            _offresonant_bundle(params, m, env=env) for m in range(2, n + 1)
        )
        return _clamp_unit(na_n / (background + spurious))
    if mode == "numeric":
        na_n = _bundle_numeric(params, n, env=env)
        sol = full_solution(params, env=env)
        n_af = sol["n_af"]
        if n_af <= 0:
            return 0.0
        return _clamp_unit(na_n / n_af)
    raise ValueError(f"unknown mode {mode!r}")


def _bundle_numeric(params, n, env=None):
    L, ops = effective.bundle_liouvillian(params, n, env=env)
    rho = steady.steady_state(L)
    return steady.expectation(rho, ops["ad"] @ ops["a"]).real


def _offresonant_bundle(params, m, env=None):
    """Population grown by the (generally off-resonant) m-photon process.

    The linear correlator closure carries the detuning mismatch
    2R - m delta_a as a Lorentzian suppression of the coupling correlator;
    on resonance it reduces to the plain bundle population.  Treating the
    mismatch instead as an extra linewidth underestimates the off-resonant
    pumping by orders of magnitude (checked against the reduced-model
    master equation at the large-loss crossing).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        return bundle_population(params, m, "ode", env=env)


def _clamp_unit(x: float) -> float:
    if x < 0.0 or x > 1.0:
        if x > 1.0 + 1e-6 or x < -1e-6:
            warnings.warn(
                f"purity {x:.6g} outside [0, 1]; outside formula validity",
                ValidityWarning,
                stacklevel=3,
            )
        return min(1.0, max(0.0, x))
    return float(x)


def purity_two_photon_asymptote(params: SystemParams) -> float:
    """Large-driving two-photon purity from loss rates and cooperativity."""
    ga, g = params.gamma_a, params.g
    C = params.cooperativity
    return float(
        1.0
        / (
            1.0
            + (7.0 / 18.0) * (ga / g) ** 2
            + 8.0 / (3.0 * C)
            + 21.0 / (18.0 * C)
            + 8.0 * g**2 / (ga**2 * C**2)
        )
    )


def purity_filtered_two_photon_asymptote(params: SystemParams) -> float:
    """Large-driving filtered purity; depends only on C in the bad-cavity limit."""
    ga, g = params.gamma_a, params.g
    C = params.cooperativity
    return float(1.0 / (1.0 + 8.0 / (3.0 * C) + 8.0 * g**2 / (ga**2 * C**2)))


def optimal_gamma_sigma(params: SystemParams, n: int | None = None) -> float:
    """Emitter decay maximizing the bundle population at fixed drive.

    (g n^2 / 4 Omega)^n * 8 Omega / sqrt(3 (n!)^3); the exact stationary
    point of the resonant closed-form population.
    """
    n = params.n if n is None else int(n)
    if n < 2:
        raise InvalidOrderError(f"optimal emitter decay defined for n >= 2, got {n}")
    g, Om = params.g, params.omega
    return float(
        (g * n**2 / (4.0 * Om)) ** n * 8.0 * Om / math.sqrt(3.0 * math.factorial(n) ** 3)
    )


def optimal_omega(params: SystemParams, n: int | None = None) -> float:
    """Drive maximizing the purity for n > 2 bundles.

    Crossing point of the weak-driving plateau and the strong-driving
    asymptote of the bundle population.  For n = 2 the purity grows
    monotonically with the drive, so +inf is returned.
    """
    n = params.n if n is None else int(n)
    if n < 2:
        raise InvalidOrderError(f"optimal drive defined for n >= 2, got {n}")
    if n == 2:
        warnings.warn(
            "two-photon purity is monotone in the drive; no finite optimum",
            stacklevel=2,
        )
        return math.inf
    A_n = strong_driving_coefficient(params, n)
    return float(
        (4.0 * params.gamma_a * params.g ** (2 * n) * A_n / (n * params.gamma_sigma))
        ** (1.0 / (2.0 * (n - 1)))
    )


def resonance_detuning(
    params: SystemParams,
    n: int | None = None,
    refine: bool = False,
    objective: str = "filtered",
    tol: float = 1e-3,
) -> float:
    """Cavity detuning of the n-photon resonance.

    Unrefined: 2R/n.  Refined: golden-section maximization of the
    filtered population (or, with ``objective='population'``, of the
    plain cavity population, which is much cheaper) over a bracket of
    width 5 g_n + gamma_a around 2R/n.
    """
    n = params.n if n is None else int(n)
    base = 2.0 * params.rabi / n
    if not refine:
        return float(base)
    gn = gn_closed(params, n).gn
    half = 5.0 * gn + params.gamma_a
    lo, hi = base - half, base + half

    N = steady.choose_truncation(params.at(delta_a=base, n=max(n, 2)))

    def value(da: float) -> float:
        p = params.at(delta_a=da, n=max(n, 2))
        sol = full_solution(p, N=N, decompose=(objective == "filtered"))
        return sol["n_af"] if objective == "filtered" else sol["n_a"]

    da, fmax, interior = _golden_max(value, lo, hi, tol * params.g)
    if not interior:
        warnings.warn(
            f"no interior maximum in [{lo:.6g}, {hi:.6g}]; returning 2R/n",
            stacklevel=2,
        )
        return float(base)
    return float(da)


def _golden_max(f, lo, hi, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    fx = max(fc, fd)
    interior = (f(lo) < fx) and (f(hi) < fx)
    return x, fx, interior


@dataclass
class BundleMetrics:
    """Every figure of merit of one configuration, with provenance tags.

    ``values[name]`` maps provenance ("analytic" or "numeric") to the
    value computed along that path; fields that failed carry an error
    marker instead so a partial report still serializes.
    """

    values: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)

    def set(self, name, value, source):
        self.values.setdefault(name, {})[source] = float(value)

    def fail(self, name, exc):
        self.errors[name] = f"{type(exc).__name__}: {exc}"

    def get(self, name, source="analytic", default=None):
        return self.values.get(name, {}).get(source, default)

    def best(self, name, default=None):
        entry = self.values.get(name, {})
        if "numeric" in entry:
            return entry["numeric"]
        return entry.get("analytic", default)

    def to_json(self) -> str:
        doc = {name: dict(sorted(v.items())) for name, v in self.values.items()}
        for name in self.errors:
            doc.setdefault(name, {})["error"] = self.errors[name]
        return json.dumps(doc, indent=2, sort_keys=True)


def report(
    params: SystemParams,
    env=None,
    n: int | None = None,
    numeric: bool = True,
    N: int | None = None,
) -> BundleMetrics:
    """Fill a :class:`BundleMetrics` via analytic and numeric paths.

    Component failures are recorded as per-field error markers so a
    partial report is still emitted.
    """
    n = params.n if n is None else int(n)
    m = BundleMetrics()
    analytic = {
        "n_a_n": lambda: bundle_population(params, n, "closed", env=env),
        "n_a_1": lambda: onephoton.na1(params, "full"),
        "n_af_1": lambda: onephoton.na1_filtered(params, "qrt"),
        "pi_n": lambda: purity(params, n, "analytic", env=env),
        "pi_n_f": lambda: purity_filtered(params, n, "analytic", env=env),
        "A_n": lambda: strong_driving_coefficient(params, n),
        "gn": lambda: gn_closed(params, n).gn,
        "kappa_n": lambda: gn_closed(params, n).kappa_n,
        "optimal_gamma_sigma": lambda: optimal_gamma_sigma(params, n),
        "weak_driving_plateau": lambda: effective.weak_driving_limit(params, n),
    }
    for name, fn in analytic.items():
        try:
            m.set(name, fn(), "analytic")
        except Exception as exc:  # partial report allowed
            m.fail(name, exc)
    na1_a = m.get("n_a_1")
    nan_a = m.get("n_a_n")
    if na1_a is not None and nan_a is not None:
        m.set("n_a", na1_a + nan_a, "analytic")
        m.set("n_af", m.get("n_af_1", default=0.0) + nan_a, "analytic")
        m.set("rate_n", params.gamma_a * nan_a, "analytic")
    if n > 2:
        try:
            m.set("optimal_omega", optimal_omega(params, n), "analytic")
        except Exception as exc:
            m.fail("optimal_omega", exc)
    if not numeric:
        return m
    try:
        sol = full_solution(params, env=env, N=N)
        m.set("n_a", sol["n_a"], "numeric")
        m.set("n_af", sol["n_af"], "numeric")
        na_n_num = _bundle_numeric(params, n, env=env)
        m.set("n_a_n", na_n_num, "numeric")
        m.set("rate_n", params.gamma_a * na_n_num, "numeric")
        m.set("pi_n", _clamp_unit(na_n_num / sol["n_a"]), "numeric")
        if sol["n_af"] > 0:
            m.set("pi_n_f", _clamp_unit(na_n_num / sol["n_af"]), "numeric")
    except Exception as exc:
        m.fail("numeric_solve", exc)
    return m
