"""Truncated Fock-space and two-level operator algebra.

Dense complex matrices are the canonical representation; dimensions stay
small (Hilbert dimension <= ~64) at desk scale, so no sparse path is needed
for correctness.  The global ordering convention is (two-level system,
cavity): the 2LS always occupies slot 0 of a composite space, and every
composite operator and vectorization in the package inherits this ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError, DimensionError

__all__ = [
    "QOperator",
    "DressedBasis",
    "annihilation",
    "creation",
    "number",
    "identity",
    "lower_tls",
    "raise_tls",
    "tls_projector_excited",
    "tensor",
    "tensor_embed",
    "dressed_basis",
]


@dataclass(frozen=True)
class QOperator:
    """A dense operator together with its subsystem dimensions.

    Parameters
    ----------
    data : np.ndarray
        Square complex matrix of side ``prod(dims)``.
    dims : tuple of int
        Ordered subsystem dimensions, e.g. ``(2, N + 1)`` for 2LS (x) cavity.

    The matrix is copied and frozen at construction; instances are immutable
    and safe to share between threads.
    """

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.data, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        side = math.prod(dims)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"operator matrix must be square, got {mat.shape}")
        if mat.shape[0] != side:
            raise DimensionError(
                f"matrix side {mat.shape[0]} does not match prod(dims)={side}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "data", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "QOperator":
        return QOperator(self.data.conj().T, self.dims)

    def tensor(self, other: "QOperator") -> "QOperator":
        """Kronecker product; subsystem dims concatenate."""
        return QOperator(np.kron(self.data, other.data), self.dims + other.dims)

    def _check_dims(self, other: "QOperator"):
        if self.dims != other.dims:
            raise DimensionError(f"dims mismatch: {self.dims} vs {other.dims}")

    def __matmul__(self, other: "QOperator") -> "QOperator":
        self._check_dims(other)
        return QOperator(self.data @ other.data, self.dims)

    def __add__(self, other: "QOperator") -> "QOperator":
        self._check_dims(other)
        return QOperator(self.data + other.data, self.dims)

    def __sub__(self, other: "QOperator") -> "QOperator":
        self._check_dims(other)
        return QOperator(self.data - other.data, self.dims)

    def __mul__(self, scalar: complex) -> "QOperator":
        return QOperator(self.data * scalar, self.dims)

    __rmul__ = __mul__

    def __neg__(self) -> "QOperator":
        return QOperator(-self.data, self.dims)


def annihilation(dim: int) -> QOperator:
    """Fock lowering operator on a space truncated at ``dim`` levels.

    Entries are sqrt(k) at (k-1, k).  The commutator [a, a^dag] equals the
    identity except for the topmost Fock level, where truncation leaves a
    defect of size ``dim - 1``; callers must keep that level unpopulated.
    """
    if dim < 2:
        raise DimensionError(f"annihilation needs dim >= 2, got {dim}")
    return QOperator(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1), (dim,))


def creation(dim: int) -> QOperator:
    return annihilation(dim).dag()


def number(dim: int) -> QOperator:
    return QOperator(np.diag(np.arange(dim, dtype=float)), (dim,))


def identity(dim: int) -> QOperator:
    return QOperator(np.eye(dim), (dim,))


def lower_tls() -> QOperator:
    """Two-level lowering operator |g><e| in the basis order (g, e)."""
    return QOperator(np.array([[0.0, 1.0], [0.0, 0.0]]), (2,))


def raise_tls() -> QOperator:
    return lower_tls().dag()


def tls_projector_excited() -> QOperator:
    return raise_tls() @ lower_tls()


def tensor(*ops: QOperator) -> QOperator:
    out = ops[0]
    for op in ops[1:]:
        out = out.tensor(op)
    return out


def tensor_embed(op: QOperator, slot: int, dims) -> QOperator:
    """Embed a single-subsystem operator into a composite space.

    Kronecker product with identities on every other slot; the result has
    subsystem dimensions ``dims``.
    """
    dims = tuple(int(d) for d in dims)
    if not 0 <= slot < len(dims):
        raise DimensionError(f"slot {slot} out of range for dims {dims}")
    if op.dims != (dims[slot],):
        raise DimensionError(
            f"operator dims {op.dims} do not match dims[{slot}]={dims[slot]}"
        )
    mat = np.eye(1, dtype=complex)
    for k, d in enumerate(dims):
        mat = np.kron(mat, op.data if k == slot else np.eye(d))
    return QOperator(mat, dims)


@dataclass(frozen=True)
class DressedBasis:
    """Amplitudes of the laser-dressed two-level eigenstates.

    |+> = c|g> + s|e> and |-> = s|g> - c|e>, with mixing set by
    xi = Omega / (Delta/2 + R) and R = sqrt(Omega^2 + (Delta/2)^2) the
    generalized Rabi frequency.  c^2 + s^2 = 1 by construction.
    """

    c: float
    s: float
    xi: float
    R: float

    def rotation(self) -> np.ndarray:
        """Columns are |+>, |-> expressed in the bare (g, e) basis."""
        return np.array([[self.c, self.s], [self.s, -self.c]])


def dressed_basis(delta: float, omega: float) -> DressedBasis:
    """Dressed-state amplitudes of the driven two-level system.

    Parameters
    ----------
    delta : float
        Emitter-laser detuning (units of g).
    omega : float
        Drive amplitude (units of g).
    """
    R = math.hypot(omega, delta / 2.0)
    if R == 0.0:
        raise DegenerateBasisError("dressed basis undefined at delta = omega = 0")
    if omega == 0.0:
        # no mixing: |+> is the higher-energy bare state
        if delta > 0.0:
            return DressedBasis(c=0.0, s=1.0, xi=0.0, R=R)
        return DressedBasis(c=1.0, s=0.0, xi=math.inf, R=R)
    xi = omega / (delta / 2.0 + R)
    c = 1.0 / math.sqrt(1.0 + xi ** (-2))
    s = 1.0 / math.sqrt(1.0 + xi**2)
    return DressedBasis(c=c, s=s, xi=xi, R=R)
