"""Steady states of the master equation and Fock-truncation selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    NonUniqueSteadyStateError,
    SteadyStateError,
    TruncationOverflowError,
)
from .hilbert import QOperator
from .liouville import (
    Superoperator,
    SystemParams,
    bare_channels,
    hamiltonian,
    liouvillian,
    unvec,
    vec,
    vec_identity,
)

__all__ = [
    "DensityMatrix",
    "steady_state",
    "expectation",
    "choose_truncation",
    "evolve",
]

#: default relative tolerance for the truncation chooser
TRUNCATION_TOL = 1e-8

#: hard cap on the cavity truncation
TRUNCATION_CAP = 64


@dataclass(frozen=True)
class DensityMatrix:
    """Normalized state: Hermitian, unit trace, non-negative spectrum."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.data, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "data", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def validate(self, herm_tol=1e-10, trace_tol=1e-10, eig_floor=-1e-8):
        """Raise if the state violates its invariants."""
        herm = np.linalg.norm(self.data - self.data.conj().T)
        if herm > herm_tol * max(1.0, np.linalg.norm(self.data)):
            raise SteadyStateError(f"state not Hermitian: defect {herm:.3e}")
        tr = self.data.trace()
        if abs(tr - 1.0) > trace_tol:
            raise SteadyStateError(f"trace {tr} differs from 1")
        w = np.linalg.eigvalsh(self.data)
        if w.min() < eig_floor:
            raise SteadyStateError(f"negative population {w.min():.3e}")
        return self

    def fock_populations(self) -> np.ndarray:
        """Cavity-level populations, traced over the 2LS (slot 0)."""
        n_tls, n_cav = self.dims
        # composite kron index is i_tls * n_cav + i_cav
        diag = np.real(np.diag(self.data)).reshape((n_tls, n_cav))
        return diag.sum(axis=0)


def steady_state(L: Superoperator, check: bool = True) -> DensityMatrix:
    """Unique stationary state of a trace-preserving Liouvillian.

    Replaces the row corresponding to rho[0, 0] with the trace constraint
    and solves the resulting linear system (LU with partial pivoting).
    Falls back to an SVD null-space solve when the direct solve is poorly
    conditioned, and raises :class:`NonUniqueSteadyStateError` when the
    null space is degenerate.
    """
    d = L.hilbert_dim
    A = np.array(L.data)
    b = np.zeros(d * d, dtype=complex)
    # row of vec index (0, 0) in column stacking is 0
    A[0, :] = vec_identity(d).conj()
    b[0] = 1.0
    norm_L = np.linalg.norm(L.data)
    try:
        x = scipy.linalg.solve(A, b)
        residual = np.linalg.norm(L.data @ x)
    except scipy.linalg.LinAlgError:
        x, residual = None, np.inf
    if x is None or not np.isfinite(residual) or residual > 1e-10 * max(norm_L, 1.0):
        x, residual = _nullspace_state(L)
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= rho.trace().real
    state = DensityMatrix(rho, L.dims)
    if check:
        state.validate()
        res = np.linalg.norm(L.data @ vec(state.data))
        if res > 1e-10 * max(norm_L, 1.0):
            raise SteadyStateError(
                f"steady-state residual {res:.3e} exceeds 1e-10*|L|={1e-10 * norm_L:.3e}"
            )
    return state


def _nullspace_state(L: Superoperator):
    """SVD fallback: smallest right-singular vector, with degeneracy check."""
    U, s, Vh = np.linalg.svd(L.data)
    if s[-2] < 1e-12 * s[0]:
        raise NonUniqueSteadyStateError(
            f"degenerate null space: two smallest singular values "
            f"{s[-1]:.3e}, {s[-2]:.3e} vs largest {s[0]:.3e}"
        )
    x = Vh[-1].conj()
    d = L.hilbert_dim
    tr = unvec(x, d).trace()
    if abs(tr) < 1e-14:
        raise SteadyStateError(
            f"null vector is traceless (trace {tr:.3e}); conditioning: "
            f"sigma_min={s[-1]:.3e}, sigma_max={s[0]:.3e}"
        )
    x = x / tr
    return x, float(np.linalg.norm(L.data @ x))


def expectation(rho: DensityMatrix, O: QOperator) -> complex:
    """Tr(O rho)."""
    if rho.dims != O.dims:
        raise DimensionError(f"dims mismatch: {rho.dims} vs {O.dims}")
    return complex(np.trace(O.data @ rho.data))


def _solve_at(params: SystemParams, N: int, extra_channels=None, frame="bare"):
    H = hamiltonian(params, N, frame=frame)
    chans = bare_channels(params, N)
    if extra_channels:
        chans = chans + list(extra_channels(N))
    return steady_state(liouvillian(H, chans))


def choose_truncation(
    params: SystemParams,
    tol: float = TRUNCATION_TOL,
    cap: int = TRUNCATION_CAP,
    extra_channels=None,
    frame: str = "bare",
) -> int:
    """Smallest cavity truncation with converged steady-state population.

    Doubles N until the combined population of the two highest Fock levels
    falls below ``tol`` times the cavity population, then bisects back to
    the smallest passing N.  Always returns at least n + 2.
    """
    if not 0 < tol <= 1e-2:
        raise ValueError(f"tol must be in (0, 1e-2], got {tol}")

    def top_ok(N: int) -> bool:
        rho = _solve_at(params, N, extra_channels, frame)
        pops = rho.fock_populations()
        n_a = float(np.arange(N + 1) @ pops)
        return pops[-2:].sum() <= tol * max(n_a, 1e-30)

    floor = params.n + 2
    N = floor
    if top_ok(N):
        return N
    lo = N
    while True:
        N = min(2 * N, cap)
        if top_ok(N):
            hi = N
            break
        lo = N
        if N >= cap:
            raise TruncationOverflowError(
                f"no converged truncation below cap {cap} (tol={tol})"
            )
    while hi - lo > 1:
        mid = (hi + lo) // 2
        if top_ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def evolve(L: Superoperator, rho0: np.ndarray, t: float, steps: int = 2000) -> DensityMatrix:
    """Fixed-step fourth-order integration of d vec(rho)/dt = L vec(rho).

    Validation utility only; all production quantities are steady-state.
    """
    x = vec(rho0)
    h = t / steps
    A = L.data
    for _ in range(steps):
        k1 = A @ x
        k2 = A @ (x + 0.5 * h * k1)
        k3 = A @ (x + 0.5 * h * k2)
        k4 = A @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    rho = unvec(x, L.hilbert_dim)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / rho.trace().real, L.dims)
