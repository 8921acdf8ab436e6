"""Lindblad generator in superoperator form and its time evolution.

States are vectorized by column stacking, so for 4x4 operators

    vec(A rho B) = spre(A) @ spost(B) @ vec(rho),
    spre(A) = I (x) A,   spost(B) = B^T (x) I.

Three evolution routes are provided: spectral decomposition of the
generator (``evolve_diag``), per-time matrix exponentials
(``evolve_expm``, used when the eigenbasis is ill conditioned) and a
fixed-step RK4 integrator of the master equation that never touches the
superoperator (``evolve_rk4``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import FallbackRequired, InvariantViolation, ValidationError
from .qmat import POSITIVITY_FLOOR, as_array, hermiticity_defect, sanitize_state
from .spinmodel import SIGMA_MINUS, on_a, on_b

log = logging.getLogger(__name__)

DIM = 4
I4 = np.eye(DIM, dtype=complex)
SPECTRAL_TOL = 1e-10
MAX_CONDITION = 1e8


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(w) -> np.ndarray:
    """Inverse of :func:`vec`; also accepts a stack of vectors."""
    w = np.asarray(w, dtype=complex)
    n = math.isqrt(w.shape[-1])
    return np.swapaxes(w.reshape(w.shape[:-1] + (n, n)), -1, -2)


def spre(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return np.kron(np.eye(a.shape[0]), a)


def spost(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return np.kron(a.T, np.eye(a.shape[0]))


@dataclass(frozen=True)
class BathParams:
    """Identical thermal reservoirs on both qubits."""

    nbar: float = 1.0
    gamma: float = 0.1

    def __post_init__(self):
        if not (math.isfinite(self.nbar) and math.isfinite(self.gamma)):
            raise ValidationError("bath parameters must be finite")
        if self.nbar < 0:
            raise ValidationError(f"nbar must be >= 0, got {self.nbar}")
        if not self.gamma > 0:
            raise ValidationError(f"gamma must be > 0, got {self.gamma}")

    @property
    def relaxation_rate(self) -> float:
        """Population relaxation rate 2*gamma*(2*nbar + 1) of one qubit."""
        return 2.0 * self.gamma * (2.0 * self.nbar + 1.0)


def lowering_ops(n_qubits: int = 2):
    if n_qubits == 1:
        return [SIGMA_MINUS]
    return [on_a(SIGMA_MINUS), on_b(SIGMA_MINUS)]


def dissipator(lowering, bath: BathParams) -> np.ndarray:
    """Superoperator of the thermal dissipator for the given lowering operators."""
    n = lowering[0].shape[0]
    out = np.zeros((n * n, n * n), dtype=complex)
    down = (bath.nbar + 1.0) * bath.gamma
    up = bath.nbar * bath.gamma
    for sm in lowering:
        sp = sm.conj().T
        pm, mp = sp @ sm, sm @ sp
        out += down * (2.0 * spre(sm) @ spost(sp) - spre(pm) - spost(pm))
        out += up * (2.0 * spre(sp) @ spost(sm) - spre(mp) - spost(mp))
    return out


def lindblad_rhs(h: np.ndarray, bath: BathParams, rho: np.ndarray, lowering=None) -> np.ndarray:
    """Right-hand side of the master equation in matrix form."""
    drho = -1j * (h @ rho - rho @ h)
    down = (bath.nbar + 1.0) * bath.gamma
    up = bath.nbar * bath.gamma
    for sm in lowering if lowering is not None else lowering_ops():
        sp = sm.conj().T
        pm, mp = sp @ sm, sm @ sp
        drho += down * (2.0 * sm @ rho @ sp - rho @ pm - pm @ rho)
        drho += up * (2.0 * sp @ rho @ sm - rho @ mp - mp @ rho)
    return drho


@dataclass(frozen=True)
class Superoperator:
    gen: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    condition: float
    diagonalizable: bool

    @property
    def dim(self) -> int:
        return math.isqrt(self.gen.shape[0])

    def zero_modes(self, tol: float = SPECTRAL_TOL) -> int:
        return int(np.sum(np.abs(self.eigenvalues) <= tol))

    def steady_state(self) -> np.ndarray:
        """Normalized right null vector of the generator."""
        k = int(np.argmin(np.abs(self.eigenvalues)))
        rho = unvec(self.eigenvectors[:, k])
        rho = rho / np.trace(rho)
        return 0.5 * (rho + rho.conj().T)

    def mode_coefficients(self, rho0) -> np.ndarray:
        """Table ``a[i, j]`` with ``vec(rho(t))_i = sum_j a[i, j] exp(s_j t)``."""
        c = np.linalg.solve(self.eigenvectors, vec(as_array(rho0)))
        return self.eigenvectors * c[None, :]


def superoperator(gen: np.ndarray, *, check: bool = True) -> Superoperator:
    s, u = np.linalg.eig(gen)
    cond = float(np.linalg.cond(u))
    if check:
        n = math.isqrt(gen.shape[0])
        if s.real.max() > SPECTRAL_TOL:
            raise InvariantViolation(f"generator has growing mode Re(s) = {s.real.max():.3e}")
        if np.abs(s).min() > SPECTRAL_TOL:
            raise InvariantViolation("generator has no zero mode (no steady state)")
        leak = float(np.max(np.abs(vec(np.eye(n)).conj() @ gen)))
        if leak > SPECTRAL_TOL:
            raise InvariantViolation(f"generator is not trace preserving (leak {leak:.3e})")
    return Superoperator(gen, s, u, cond, bool(np.isfinite(cond) and cond < MAX_CONDITION))


def build_liouvillian(h, bath: BathParams) -> Superoperator:
    h = as_array(h)
    if hermiticity_defect(h) > 1e-10:
        raise ValidationError("Hamiltonian must be Hermitian")
    lowering = lowering_ops(1 if h.shape[0] == 2 else 2)
    gen = -1j * (spre(h) - spost(h)) + dissipator(lowering, bath)
    return superoperator(gen)


@dataclass
class Trajectory:
    """States on a time grid plus the raw defects removed before use."""

    times: np.ndarray
    states: np.ndarray  # (n, 4, 4), Hermitized and clamped
    trace_err: np.ndarray
    herm_defect: np.ndarray
    min_eig: np.ndarray
    method: str = "diag"

    def __len__(self):
        return len(self.times)


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0:
        raise ValidationError("empty time grid")
    if np.any(t < 0) or np.any(np.diff(t) < 0):
        raise ValidationError("times must be non-negative and ascending")
    return t


def _finish(times, raw: np.ndarray, method: str) -> Trajectory:
    n = len(times)
    states = np.empty_like(raw)
    trace_err = np.empty(n)
    herm = np.empty(n)
    min_eig = np.empty(n)
    for i, m in enumerate(raw):
        trace_err[i] = abs(np.trace(m) - 1.0)
        states[i], herm[i], min_eig[i] = sanitize_state(m)
        if min_eig[i] < POSITIVITY_FLOOR:
            raise InvariantViolation(
                f"state at t={times[i]} has eigenvalue {min_eig[i]:.3e} ({method})"
            )
    log.debug(
        "%s trajectory: max trace err %.2e, max herm defect %.2e, min eig %.2e",
        method, trace_err.max(), herm.max(), min_eig.min(),
    )
    return Trajectory(np.asarray(times), states, trace_err, herm, min_eig, method)


def evolve_diag(L: Superoperator, rho0, times) -> Trajectory:
    """Evolve by the spectral decomposition of the generator."""
    if not L.diagonalizable:
        raise FallbackRequired(
            f"eigenvector condition {L.condition:.2e} >= {MAX_CONDITION:.0e}; "
            "use evolve_expm or evolve_rk4"
        )
    t = _check_times(times)
    a = L.mode_coefficients(rho0)
    w = np.exp(np.outer(t, L.eigenvalues)) @ a.T  # (n, 16)
    raw = unvec(w)
    return _finish(t, raw, "diag")


def evolve_expm(L: Superoperator, rho0, times) -> Trajectory:
    """Evolve with a scaled-and-squared matrix exponential per time point."""
    t = _check_times(times)
    r0 = vec(as_array(rho0))
    raw = unvec(np.array([scipy.linalg.expm(L.gen * ti) @ r0 for ti in t]))
    return _finish(t, raw, "expm")


def evolve(L: Superoperator, rho0, times) -> Trajectory:
    if L.diagonalizable:
        return evolve_diag(L, rho0, times)
    log.warning("ill-conditioned eigenbasis (cond %.2e); using expm", L.condition)
    return evolve_expm(L, rho0, times)


def max_step(h, bath: BathParams) -> float:
    """Largest step accepted by :func:`evolve_rk4`."""
    return 0.01 / (bath.gamma * (2.0 * bath.nbar + 1.0) + np.linalg.norm(as_array(h), 2))


def evolve_rk4(h, bath: BathParams, rho0, times, dt: float | None = None) -> Trajectory:
    """Classical fixed-step RK4 on the matrix master equation.

    Each interval between consecutive output times is split into equal
    steps no longer than ``dt`` (default: the largest admissible step).
    """
    h = as_array(h)
    limit = max_step(h, bath)
    if dt is None:
        dt = limit
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ValidationError(f"step {dt} outside (0, {limit:.4g}]")
    t = _check_times(times)
    lowering = lowering_ops(1 if h.shape[0] == 2 else 2)
    # rhs = -i (H_eff rho - rho H_eff^dagger) + sum_k c_k A_k rho A_k^dagger
    down = (bath.nbar + 1.0) * bath.gamma
    up = bath.nbar * bath.gamma
    jumps = []
    anti = np.zeros_like(h)
    for sm in lowering:
        sp = sm.conj().T
        jumps += [(2.0 * down, sm, sp), (2.0 * up, sp, sm)]
        anti += down * (sp @ sm) + up * (sm @ sp)
    h_eff = h - 1j * anti
    h_eff_dag = h_eff.conj().T

    def f(r):
        out = -1j * (h_eff @ r - r @ h_eff_dag)
        for c, a, ad in jumps:
            out += c * (a @ r @ ad)
        return out

    rho = np.array(as_array(rho0), dtype=complex)
    raw = np.empty((len(t),) + rho.shape, dtype=complex)
    now = 0.0
    for i, target in enumerate(t):
        span = target - now
        n = max(1, math.ceil(span / dt - 1e-9)) if span > 0 else 0
        step = span / n if n else 0.0
        for _ in range(n):
            k1 = f(rho)
            k2 = f(rho + 0.5 * step * k1)
            k3 = f(rho + 0.5 * step * k2)
            k4 = f(rho + step * k3)
            rho = rho + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        now = target
        raw[i] = rho
    return _finish(t, raw, "rk4")
