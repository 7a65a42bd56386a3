"""Named parameter presets for state-of-the-art cavity QED samples.

Each preset carries the published loss rates relative to the coupling g
and the absolute coupling hbar*g, so phonon calculations can convert to
lab units.  ``load_preset`` accepts either the slug ("fischer2016") or
the display name ("Fischer et al. (2016)").
"""

from __future__ import annotations

from dataclasses import dataclass

from .liouville import SystemParams
from .phonon import PhononEnvironment

__all__ = ["Preset", "PRESETS", "load_preset", "preset_params"]


@dataclass(frozen=True)
class Preset:
    slug: str
    display: str
    kind: str            # "semiconductor" | "atom"
    hbar_g_ueV: float
    gamma_a: float       # units of g
    gamma_sigma: float   # units of g

    @property
    def cooperativity(self) -> float:
        return 4.0 / (self.gamma_a * self.gamma_sigma)


_ROWS = [
    ("desantis2017", "De Santis et al. (2017)", "semiconductor", 19.0, 9.4, 0.036),
    ("giesz2016", "Giesz et al. (2016)", "semiconductor", 21.0, 8.56, 0.028),
    ("loo2012", "Loo et al. (2012)", "semiconductor", 33.0, 2.76, 0.6),
    ("kim2014", "Kim et al. (2014)", "semiconductor", 63.0, 2.35, 0.01),
    ("laucht2009", "Laucht et al. (2009)", "semiconductor", 60.0, 1.6, 0.1),
    ("fischer2016", "Fischer et al. (2016)", "semiconductor", 45.0, 1.3, 0.01),
    ("ota2011", "Ota et al. (2011)", "semiconductor", 51.0, 0.5, 0.016),
    ("hennessy2007", "Hennessy et al. (2007)", "semiconductor", 90.0, 1.1, 0.005),
    ("volz2012", "Volz et al. (2012)", "semiconductor", 141.0, 0.37, 0.006),
    ("srinivasan2007", "Srinivasan et al. (2007)", "semiconductor", 12.0, 0.33, 0.2),
    ("arakawa2012", "Arakawa et al. (2012)", "semiconductor", 80.0, 0.3, 0.01),
    ("hamsen2016", "Hamsen et al. (2016)", "atom", 0.08, 0.2, 0.25),
    ("birnbaum2005", "Birnbaum et al. (2005)", "atom", 0.14, 0.12, 0.071),
]

PRESETS: dict[str, Preset] = {
    slug: Preset(slug, display, kind, hg, ga, gs)
    for slug, display, kind, hg, ga, gs in _ROWS
}

_BY_DISPLAY = {p.display.lower(): p for p in PRESETS.values()}


def load_preset(name: str) -> Preset:
    key = name.strip()
    if key in PRESETS:
        return PRESETS[key]
    disp = _BY_DISPLAY.get(key.lower())
    if disp is not None:
        return disp
    raise KeyError(
        f"unknown preset {name!r}; known: {sorted(PRESETS)}"
    )


def preset_params(
    name: str,
    omega: float = 20.0,
    n: int = 2,
    at_resonance: bool = True,
    temperature: float | None = None,
) -> tuple[SystemParams, PhononEnvironment | None]:
    """SystemParams (and optional phonon environment) for a named sample.

    The cavity is parked at the n-photon resonance 2R/n unless
    ``at_resonance`` is false, in which case delta_a must be set by the
    caller afterwards.
    """
    p = load_preset(name)
    params = SystemParams(
        omega=omega,
        delta_a=2.0 * omega / n if at_resonance else 0.0,
        gamma_a=p.gamma_a,
        gamma_sigma=p.gamma_sigma,
        n=n,
    )
    env = None
    if temperature is not None:
        env = PhononEnvironment(temperature=temperature, hbar_g_ueV=p.hbar_g_ueV)
    return params, env
