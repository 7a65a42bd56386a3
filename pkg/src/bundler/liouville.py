"""Hamiltonians and Lindblad Liouvillians of the driven 2LS-cavity system.

All frequencies are expressed in units of the emitter-cavity coupling g;
only the phonon module deals in laboratory units and converts at its
boundary.

Vectorization is column-stacking throughout: ``vec(rho)`` stacks the
columns of ``rho``, so ``vec(A rho B) = kron(B.T, A) vec(rho)``.  Left
multiplication is therefore represented by ``kron(I, A)`` and right
multiplication by ``kron(B.T, I)``.  The construction is unit-tested
against a direct elementwise build of the same map.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import hilbert
from .errors import DimensionError, UnsupportedFrameError, ValidityWarning
from .hilbert import QOperator, dressed_basis, tensor_embed

__all__ = [
    "SystemParams",
    "Channel",
    "Superoperator",
    "vec",
    "unvec",
    "vec_identity",
    "system_operators",
    "hamiltonian",
    "liouvillian",
    "bare_channels",
    "dressed_decay_channels",
    "phonon_channels",
]


@dataclass(frozen=True)
class SystemParams:
    """Physical rates and detunings of the driven 2LS-cavity system.

    Every frequency is in units of the coupling ``g`` (``g`` itself defaults
    to 1 and is carried only to make unit bookkeeping explicit).

    Attributes
    ----------
    omega : float
        Drive amplitude Omega.
    delta_a : float
        Cavity-2LS detuning (cavity frequency minus 2LS frequency).
    gamma_a, gamma_sigma : float
        Cavity and 2LS decay rates.
    gamma_phi : float
        Pure dephasing rate of the 2LS.
    delta : float
        2LS-laser detuning (zero for a resonant drive).
    n : int
        Target bundle order (>= 2).
    """

    omega: float
    delta_a: float
    gamma_a: float
    gamma_sigma: float
    gamma_phi: float = 0.0
    delta: float = 0.0
    n: int = 2
    g: float = 1.0

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.gamma_a <= 0:
            raise ValueError(f"gamma_a must be positive, got {self.gamma_a}")
        if self.gamma_sigma < 0 or self.gamma_phi < 0:
            raise ValueError("decay and dephasing rates must be non-negative")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"bundle order n must be an integer >= 2, got {self.n}")

    @property
    def cooperativity(self) -> float:
        """C = 4 g^2 / (gamma_a gamma_sigma)."""
        return 4.0 * self.g**2 / (self.gamma_a * self.gamma_sigma)

    @property
    def rabi(self) -> float:
        """Generalized Rabi frequency R = sqrt(Omega^2 + (Delta/2)^2)."""
        return math.hypot(self.omega, self.delta / 2.0)

    @property
    def bundle_resonance(self) -> float:
        """n-photon resonance detuning 2R/n (positive branch)."""
        return 2.0 * self.rabi / self.n

    def at(self, **changes) -> "SystemParams":
        """Copy with the given fields replaced."""
        return replace(self, **changes)


@dataclass(frozen=True)
class Channel:
    """One Lindblad collapse channel: rate/2 * (2 O rho O+ - {O+O, rho})."""

    op: QOperator
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"channel rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class Superoperator:
    """Dense matrix acting on column-stacked density matrices."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.data, dtype=complex)
        d = math.prod(self.dims)
        if mat.shape != (d * d, d * d):
            raise DimensionError(
                f"superoperator shape {mat.shape} does not match dims {self.dims}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "data", mat)
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))

    @property
    def hilbert_dim(self) -> int:
        return math.prod(self.dims)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the map to a density matrix given in matrix form."""
        d = self.hilbert_dim
        return unvec(self.data @ vec(rho), d)

    def trace_defect(self) -> float:
        """Norm of vec(I)+ L relative to the matrix norm (0 if trace preserving)."""
        d = self.hilbert_dim
        lhs = vec_identity(d).conj() @ self.data
        return float(np.linalg.norm(lhs) / max(np.linalg.norm(self.data), 1e-300))


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if d is None:
        d = int(round(math.isqrt(v.size)))
    return v.reshape((d, d), order="F")


def vec_identity(d: int) -> np.ndarray:
    """vec(I): the trace functional in the column-stacking convention."""
    return np.eye(d, dtype=complex).reshape(-1, order="F")


def system_operators(N: int, frame: str = "bare") -> dict[str, QOperator]:
    """Composite operators on the 2LS (slot 0) (x) cavity (slot 1) space.

    For the dressed frame the 2LS slot holds the dressed doublet ordered
    (-, +), so ``sigma`` is the dressed lowering operator |-><+| and
    ``sigma_z`` is the dressed inversion.
    """
    dims = (2, N + 1)
    a = tensor_embed(hilbert.annihilation(N + 1), 1, dims)
    sm = tensor_embed(hilbert.lower_tls(), 0, dims)
    out = {"a": a, "ad": a.dag(), "sigma": sm, "sigmad": sm.dag(), "dims": dims}
    if frame == "dressed":
        sz = tensor_embed(
            QOperator(np.diag([-1.0, 1.0]), (2,)), 0, dims
        )
        out["sigma_z"] = sz
    return out


def hamiltonian(params: SystemParams, N: int, frame: str = "bare") -> QOperator:
    """System Hamiltonian in the laser frame at cavity truncation ``N``.

    Frames
    ------
    ``bare``
        Delta_a a+a + Delta s+s + g(a+s + s+a) + Omega(s + s+).
    ``dressed``
        Basis rotated to the laser-dressed doublet (valid for Delta = 0
        only): Omega sz + Delta_a a+a + (g/2){a+(s - s+ + sz) + h.c.}.
        The dressed 2LS basis is ordered (-, +).
    ``cavity_driven``
        The drive acts on the cavity instead of the 2LS.  The drive phase
        is fixed so that the steady coherent amplitude of the bare cavity
        equals Omega / (Delta_a - i gamma_a / 2).
    """
    if N < params.n + 2:
        raise DimensionError(f"truncation N={N} below floor n+2={params.n + 2}")
    g = params.g
    ops = system_operators(N, frame="dressed" if frame == "dressed" else "bare")
    a, ad, sm, sp = ops["a"], ops["ad"], ops["sigma"], ops["sigmad"]
    num_cav = ad @ a
    if frame == "bare":
        H = (
            params.delta_a * num_cav
            + params.delta * (sp @ sm)
            + g * (ad @ sm + sp @ a)
            + params.omega * (sm + sp)
        )
    elif frame == "dressed":
        if params.delta != 0.0:
            raise UnsupportedFrameError(
                "dressed frame implemented for delta = 0 only; use the bare frame"
            )
        sz = ops["sigma_z"]
        coupling = ad @ (sm - sp + sz)
        H = (
            params.omega * sz
            + params.delta_a * num_cav
            + (g / 2.0) * (coupling + coupling.dag())
        )
    elif frame == "cavity_driven":
        H = (
            params.delta_a * num_cav
            + params.delta * (sp @ sm)
            + g * (ad @ sm + sp @ a)
            - params.omega * (a + ad)
        )
    else:
        raise UnsupportedFrameError(f"unknown frame {frame!r}")
    return H


def bare_channels(params: SystemParams, N: int) -> list[Channel]:
    """Cavity leakage, 2LS decay and (if set) pure dephasing channels."""
    ops = system_operators(N)
    chans = [
        Channel(ops["a"], params.gamma_a),
        Channel(ops["sigma"], params.gamma_sigma),
    ]
    if params.gamma_phi > 0:
        chans.append(Channel(ops["sigmad"] @ ops["sigma"], params.gamma_phi))
    return chans


def dressed_decay_channels(params: SystemParams, N: int) -> list[Channel]:
    """Secular image of the bare 2LS decay in the dressed doublet.

    For Omega >> gamma_sigma the bare decay splits into dressed decay and
    pump at gamma_sigma/4 each plus dephasing at gamma_sigma; fast-rotating
    cross terms are dropped.  This helper is the single source of those
    rates for the whole package.
    """
    if params.omega < 10 * params.gamma_sigma:
        warnings.warn(
            "dressed channels assume Omega >> gamma_sigma "
            f"(Omega={params.omega}, gamma_sigma={params.gamma_sigma})",
            ValidityWarning,
            stacklevel=2,
        )
    ops = system_operators(N, frame="dressed")
    sm, sp = ops["sigma"], ops["sigmad"]
    gs = params.gamma_sigma
    return [
        Channel(sm, gs / 4.0),
        Channel(sp, gs / 4.0),
        Channel(sp @ sm, gs),
    ]


def phonon_channels(env, params: SystemParams, N: int) -> list[Channel]:
    """Phonon-induced feeding and dephasing channels in solver units.

    Returns channels (s+a, rate_up), (s a+, rate_down), (s+s, gamma_phi(T))
    with rates computed by the phonon module at the detuning implied by
    ``params`` and converted from lab units to units of g.
    """
    from . import phonon  # deferred: phonon pulls in quadrature machinery

    rate_up, rate_down = phonon.feeding_rates_in_g(env, params)
    gphi = phonon.dephasing_rate(env)
    ops = system_operators(N)
    a, ad, sm, sp = ops["a"], ops["ad"], ops["sigma"], ops["sigmad"]
    return [
        Channel(sp @ a, rate_up),
        Channel(sm @ ad, rate_down),
        Channel(sp @ sm, gphi),
    ]


def liouvillian(H: QOperator, channels: Iterable[Channel]) -> Superoperator:
    """Lindblad generator -i[H, .] + sum_k (rate_k/2) D[O_k] as a matrix.

    The dissipator convention is D[O] rho = 2 O rho O+ - O+O rho - rho O+O,
    so each channel enters with a prefactor rate/2.
    """
    d = H.dim
    I = np.eye(d)
    Hm = H.data
    L = -1j * (np.kron(I, Hm) - np.kron(Hm.T, I))
    for ch in channels:
        if ch.op.dims != H.dims:
            raise DimensionError(
                f"channel dims {ch.op.dims} do not match Hamiltonian dims {H.dims}"
            )
        O = ch.op.data
        OdO = O.conj().T @ O
        L += (ch.rate / 2.0) * (
            2.0 * np.kron(O.conj(), O) - np.kron(I, OdO) - np.kron(OdO.T, I)
        )
    return Superoperator(L, H.dims)
