"""Dense complex matrix helpers and density-matrix utilities.

Matrices are plain ``numpy`` complex arrays in C (row-major) storage.
Qubit ordering inside a two-qubit matrix is ``|AB>`` with basis
``|00>, |01>, |10>, |11>``; the first Kronecker factor is qubit A.
Vectorization (see :mod:`discord_dynamics.liouville`) is column stacking,
which in this storage is ``reshape(-1, order="F")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, ValidationError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_FLOOR = -1e-8
ENTROPY_FLOOR = 1e-14
XSTATE_TOL = 1e-9

# positions of the X pattern (0-based): diagonal plus the |01>,|10> coherence
_X_MASK = np.zeros((4, 4), dtype=bool)
_X_MASK[np.diag_indices(4)] = True
_X_MASK[1, 2] = _X_MASK[2, 1] = True


def as_cmatrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or min(m.shape) < 1:
        raise ValidationError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


@dataclass(frozen=True)
class DensityMatrix:
    """Validated, Hermitized density matrix of one or two qubits.

    Build instances through :meth:`from_array`; the stored ``mat`` is the
    symmetrized ``(rho + rho^dagger)/2`` and ``herm_defect`` keeps the size
    of the asymmetry that was removed.
    """

    mat: np.ndarray = field(repr=False)
    herm_defect: float = 0.0
    min_eig: float = 0.0

    @classmethod
    def from_array(cls, a, *, validate: bool = True) -> "DensityMatrix":
        m = as_cmatrix(a)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValidationError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        defect = hermiticity_defect(m)
        if validate and defect > HERMITIAN_TOL:
            raise ValidationError(f"matrix is not Hermitian (defect {defect:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if validate:
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValidationError(f"trace is {tr!r}, expected 1")
            if min_eig < POSITIVITY_FLOOR:
                raise ValidationError(f"negative eigenvalue {min_eig:.3e}")
        return cls(m, defect, min_eig)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)


def as_array(rho) -> np.ndarray:
    """Matrix of a :class:`DensityMatrix` or anything array-like."""
    if isinstance(rho, DensityMatrix):
        return rho.mat
    return as_cmatrix(rho)


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced state of qubit ``"A"`` or ``"B"`` of a two-qubit state."""
    m = as_array(rho)
    if m.shape != (4, 4):
        raise ValidationError(f"partial_trace needs a 4x4 state, got {m.shape}")
    r = m.reshape(2, 2, 2, 2)  # [a, b, a', b']
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValidationError(f"subsystem must be 'A' or 'B', got {keep!r}")


def eigh(h):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    m = as_cmatrix(h)
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise ValidationError(f"matrix is not Hermitian (defect {defect:.3e})")
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > ENTROPY_FLOOR]
    return float(-np.sum(p * np.log2(p)))


def vn_entropy(rho) -> float:
    """Von Neumann entropy in bits; eigenvalues below 1e-14 count as zero."""
    m = as_array(rho)
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return shannon_bits(w)


@dataclass(frozen=True)
class XStateEntries:
    """Entries of an X-shaped two-qubit state.

    ``u, x, y, v`` are the populations of ``|00>, |01>, |10>, |11>`` and
    ``z`` is the ``<01|rho|10>`` coherence.
    """

    u: float
    x: float
    y: float
    v: float
    z: complex

    def validate(self, tol: float = 1e-10) -> "XStateEntries":
        pops = (self.u, self.x, self.y, self.v)
        if not all(np.isfinite(pops)) or not np.isfinite(self.z):
            raise ValidationError("X-state entries must be finite")
        if abs(sum(pops) - 1.0) > tol:
            raise ValidationError(f"populations sum to {sum(pops)!r}, expected 1")
        if min(pops) < -tol:
            raise ValidationError(f"negative population {min(pops)!r}")
        if abs(self.z) ** 2 > self.x * self.y + tol:
            raise ValidationError("|z|^2 exceeds x*y; block is not positive")
        return self

    def swapped(self) -> "XStateEntries":
        """Relabel both qubits' levels (u<->v, x<->y)."""
        return XStateEntries(self.v, self.y, self.x, self.u, self.z.conjugate())

    def to_matrix(self) -> np.ndarray:
        m = np.diag([self.u, self.x, self.y, self.v]).astype(complex)
        m[1, 2] = self.z
        m[2, 1] = np.conj(self.z)
        return m


def offpattern_max(rho) -> float:
    m = as_array(rho)
    return float(np.max(np.abs(np.where(_X_MASK, 0.0, m))))


def as_xstate(rho, tol: float = XSTATE_TOL) -> XStateEntries:
    m = as_array(rho)
    if m.shape != (4, 4):
        raise ValidationError(f"X-state needs a 4x4 matrix, got {m.shape}")
    off = np.abs(np.where(_X_MASK, 0.0, m))
    if off.max() > tol:
        i, j = np.unravel_index(np.argmax(off), off.shape)
        raise ShapeError(
            f"entry ({i}, {j}) = {m[i, j]!r} breaks the X pattern",
            offending=(int(i), int(j), complex(m[i, j])),
        )
    d = m.diagonal().real
    return XStateEntries(float(d[0]), float(d[1]), float(d[2]), float(d[3]), complex(m[1, 2]))


def is_xstate(rho, tol: float = XSTATE_TOL) -> bool:
    return offpattern_max(rho) <= tol


def sanitize_state(m: np.ndarray, floor: float = POSITIVITY_FLOOR):
    """Hermitize and clamp small negative eigenvalues.

    Returns ``(state, raw_herm_defect, raw_min_eig)``.  Eigenvalues below
    ``floor`` are left in place so callers can reject the state.
    """
    defect = hermiticity_defect(m)
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    raw_min = float(w[0])
    if floor <= raw_min < 0.0:
        w = np.clip(w, 0.0, None)
        h = (v * w) @ v.conj().T
        h = 0.5 * (h + h.conj().T)
        h /= np.trace(h).real
    return h, defect, raw_min
