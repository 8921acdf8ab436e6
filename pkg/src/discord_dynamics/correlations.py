"""Mutual information, classical correlation, discord and X-state measures.

Classical correlation is found by projective measurement on qubit B with
basis ``V(theta, phi)|k>``, ``theta in [0, pi]``, ``phi in [0, 2 pi)``.
The conditional entropy is minimized over a deterministic grid followed by
coordinate-wise golden-section refinement, so results are bit-reproducible.
The search is vectorized over batches of states; use
:func:`correlation_reports` for trajectories and sweeps.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import InvariantViolation, ValidationError
from .qmat import (
    ENTROPY_FLOOR,
    XStateEntries,
    as_array,
    as_xstate,
    is_xstate,
    partial_trace,
    shannon_bits,
    vn_entropy,
)

GRID = (64, 64)
ANGLE_TOL = 1e-10
TIE_TOL = 1e-12
RANGE_SLACK = 1e-9
MAX_SWEEPS = 6
CHUNK = 128

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SWAP = np.eye(4)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class MeasurementBasis:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValidationError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValidationError(f"phi must lie in [0, 2 pi), got {self.phi}")

    @classmethod
    def wrapped(cls, theta: float, phi: float) -> "MeasurementBasis":
        return cls(min(max(theta, 0.0), math.pi), phi % (2.0 * math.pi))


def measurement_unitary(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, s * np.exp(-1j * phi)], [s * np.exp(1j * phi), -c]], dtype=complex
    )


def measurement_projectors(b: MeasurementBasis) -> tuple[np.ndarray, np.ndarray]:
    v = measurement_unitary(b.theta, b.phi)
    return tuple(np.outer(v[:, k], v[:, k].conj()) for k in (0, 1))


class Outcome(NamedTuple):
    prob: float
    state: np.ndarray
    null: bool  # probability below the entropy floor; state is I/2


def conditional_state(rho, b: MeasurementBasis, k: int) -> Outcome:
    """Probability and post-measurement state of A for outcome ``k`` on B."""
    if k not in (0, 1):
        raise ValidationError(f"outcome must be 0 or 1, got {k}")
    proj = np.kron(np.eye(2), measurement_projectors(b)[k])
    m = proj @ as_array(rho) @ proj
    p = float(np.trace(m).real)
    if p < ENTROPY_FLOOR:
        return Outcome(max(p, 0.0), np.eye(2, dtype=complex) / 2, True)
    return Outcome(p, partial_trace(m / p, "A"), False)


def mutual_information(rho) -> float:
    m = as_array(rho)
    return vn_entropy(partial_trace(m, "A")) + vn_entropy(partial_trace(m, "B")) - vn_entropy(m)


# -- vectorized conditional entropy -------------------------------------------


def _xlog2x(a):
    a = np.asarray(a, dtype=float)
    safe = np.where(a > ENTROPY_FLOOR, a, 1.0)
    return np.where(a > ENTROPY_FLOOR, a * np.log2(safe), 0.0)


def _unnormalized_entropy(m00, m11, m01):
    """p * S(M/p) for the 2x2 Hermitian block [[m00, m01], [m01*, m11]]."""
    tr = m00 + m11
    disc = np.sqrt((m00 - m11) ** 2 + 4.0 * (m01.real**2 + m01.imag**2))
    return -_xlog2x(0.5 * (tr + disc)) - _xlog2x(0.5 * (tr - disc)) + _xlog2x(tr)


class _Blocks:
    """B-indexed blocks of a stack of states, shaped for broadcasting."""

    def __init__(self, states: np.ndarray, ndim: int):
        r = states.reshape(-1, 2, 2, 2, 2)  # [s, a, b, a', b']
        pad = (slice(None),) + (None,) * ndim

        def blk(a, ap):
            return (r[:, a, 0, ap, 0][pad], r[:, a, 1, ap, 1][pad], r[:, a, 0, ap, 1][pad], r[:, a, 1, ap, 0][pad])

        self.b00 = blk(0, 0)
        self.b11 = blk(1, 1)
        self.b01 = blk(0, 1)

    def entropy(self, theta, phi):
        c2 = np.cos(theta / 2) ** 2
        s2 = np.sin(theta / 2) ** 2
        cs = 0.5 * np.sin(theta)
        e = np.exp(1j * phi)
        total = 0.0
        for sign, w0, w1 in ((1.0, c2, s2), (-1.0, s2, c2)):

            def q(bl):
                r00, r11, r01, r10 = bl
                return w0 * r00 + w1 * r11 + sign * cs * (e * r01 + np.conj(e) * r10)

            total = total + _unnormalized_entropy(q(self.b00).real, q(self.b11).real, q(self.b01))
        return total


def conditional_entropy(rho, theta, phi):
    """Measured conditional entropy of A given outcomes on B, in bits."""
    th, ph = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    blocks = _Blocks(np.asarray(as_array(rho))[None], th.ndim)
    out = blocks.entropy(th[None], ph[None])[0]
    return float(out) if out.ndim == 0 else out


def _golden(f, lo, hi, n_iter):
    """Vectorized golden-section minimization on per-state brackets."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(n_iter):
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + _GOLDEN * (hi - lo))
        x1n = np.where(left, hi - _GOLDEN * (hi - lo), x2)
        # reuse the surviving interior point
        f_keep = np.where(left, f1, f2)
        fresh = f(np.where(left, x1n, x2n))
        f1 = np.where(left, fresh, f_keep)
        f2 = np.where(left, f_keep, fresh)
        x1, x2 = x1n, x2n
    x = np.where(f1 <= f2, x1, x2)
    return x, np.minimum(f1, f2)


def _golden_steps(width: float, tol: float) -> int:
    return max(1, math.ceil(math.log(width / tol) / -math.log(_GOLDEN)))


def _minimize_chunk(chunk: np.ndarray, grid, tol):
    n_t, n_p = grid
    s = len(chunk)
    thetas = np.linspace(0.0, math.pi, n_t)
    phis = np.arange(n_p) * (2.0 * math.pi / n_p)
    vals = _Blocks(chunk, 2).entropy(thetas[None, :, None], phis[None, None, :]).reshape(s, -1)
    # first grid point within TIE_TOL of the minimum: lowest theta, then phi
    best = np.argmax(vals <= vals.min(axis=1, keepdims=True) + TIE_TOL, axis=1)
    th = thetas[best // n_p].copy()
    ph = phis[best % n_p].copy()
    fbest = vals[np.arange(s), best]

    blocks = _Blocks(chunk, 0)
    h_t = math.pi / (n_t - 1)
    h_p = 2.0 * math.pi / n_p
    steps_t = _golden_steps(2 * h_t, tol)
    steps_p = _golden_steps(2 * h_p, tol)
    # per-state convergence mask keeps results independent of batching
    active = np.ones(s, dtype=bool)
    for _ in range(MAX_SWEEPS):
        before = fbest.copy()
        t_new, f_new = _golden(
            lambda t: blocks.entropy(t, ph),
            np.clip(th - h_t, 0.0, math.pi),
            np.clip(th + h_t, 0.0, math.pi),
            steps_t,
        )
        take = active & (f_new < fbest)
        th = np.where(take, t_new, th)
        fbest = np.where(take, f_new, fbest)
        p_new, f_new = _golden(lambda p: blocks.entropy(th, p), ph - h_p, ph + h_p, steps_p)
        take = active & (f_new < fbest)
        ph = np.where(take, np.mod(p_new, 2.0 * math.pi), ph)
        fbest = np.where(take, f_new, fbest)
        active &= before - fbest > 1e-15
        if not active.any():
            break
    return fbest, th, ph


def minimize_conditional_entropy(states: np.ndarray, grid=GRID, tol=ANGLE_TOL, workers: int = 1):
    """Grid search plus coordinate refinement for a stack of states.

    Returns ``(min_entropy, theta, phi)`` arrays of length ``len(states)``.
    Each state's result is independent of batching and of ``workers``.
    """
    n_t, n_p = grid
    if n_t < 2 or n_p < 1:
        raise ValidationError(f"grid must be at least 2x1, got {grid}")
    chunks = [states[i : i + CHUNK] for i in range(0, len(states), CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _minimize_chunk(c, grid, tol), chunks))
    else:
        parts = [_minimize_chunk(c, grid, tol) for c in chunks]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def _stack(states) -> np.ndarray:
    arr = np.array([as_array(r) for r in states], dtype=complex)
    if arr.ndim != 3 or arr.shape[1:] != (4, 4):
        raise ValidationError("expected a stack of 4x4 two-qubit states")
    return arr


def _measure_side(arr: np.ndarray, measured: str) -> np.ndarray:
    if measured == "B":
        return arr
    if measured == "A":
        return _SWAP @ arr @ _SWAP
    raise ValidationError(f"measured side must be 'A' or 'B', got {measured!r}")


def classical_correlation(rho, grid=GRID, measured: str = "B"):
    """``(C, argmin basis)`` for one two-qubit state."""
    arr = _measure_side(_stack([rho]), measured)
    f, th, ph = minimize_conditional_entropy(arr, grid)
    c = vn_entropy(partial_trace(arr[0], "A")) - float(f[0])
    return max(c, 0.0), MeasurementBasis.wrapped(float(th[0]), float(ph[0]))


# -- X-state closed forms -------------------------------------------------------


class XDiscord(NamedTuple):
    Q: float
    S0: float
    S1: float
    theta1: float


def _cond_term(a: float, b: float) -> float:
    # -a log2(a / (a + b)), zero when a vanishes
    if a <= ENTROPY_FLOOR:
        return 0.0
    return -a * math.log2(a / (a + b))


def xstate_eigenvalues(e: XStateEntries) -> np.ndarray:
    mid = 0.5 * (e.x + e.y)
    r = 0.5 * math.sqrt((e.x - e.y) ** 2 + 4.0 * abs(e.z) ** 2)
    return np.array([e.u, mid + r, mid - r, e.v])


def discord_xstate(e: XStateEntries) -> XDiscord:
    """Closed-form discord of an X state from the two candidate bases."""
    e.validate()
    s0 = _cond_term(e.u, e.y) + _cond_term(e.y, e.u) + _cond_term(e.x, e.v) + _cond_term(e.v, e.x)
    theta1 = math.sqrt((e.u + e.x - e.y - e.v) ** 2 + 4.0 * abs(e.z) ** 2)
    s1 = shannon_bits([(1 + theta1) / 2, (1 - theta1) / 2])
    s_b = shannon_bits([e.u + e.y, e.x + e.v])
    s_ab = shannon_bits(xstate_eigenvalues(e))
    return XDiscord(s_b - s_ab + min(s0, s1), s0, s1, theta1)


def entanglement_xstate(e: XStateEntries) -> float:
    e.validate()
    return 2.0 * max(abs(e.z) - math.sqrt(max(e.u * e.v, 0.0)), 0.0)


def concurrence(rho) -> float:
    """Wootters concurrence; equals :func:`entanglement_xstate` on X states."""
    m = as_array(rho)
    yy = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
    r = m @ yy @ m.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# -- reports ----------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationReport:
    mutual_info: float
    classical: float
    discord: float
    entanglement: float
    argmin_basis: MeasurementBasis
    closed_form_Q: Optional[float] = None
    S0: Optional[float] = None
    S1: Optional[float] = None
    theta1: Optional[float] = None

    @property
    def closed_form_residual(self) -> Optional[float]:
        if self.closed_form_Q is None:
            return None
        return self.closed_form_Q - self.discord


def _clamp(value: float, lo: float, hi: float, what: str) -> float:
    if value < lo - RANGE_SLACK or value > hi + RANGE_SLACK:
        raise InvariantViolation(f"{what} = {value!r} outside [{lo!r}, {hi!r}]")
    return min(max(value, lo), hi)


def correlation_reports(
    states, grid=GRID, measured: str = "B", workers: int = 1
) -> list[CorrelationReport]:
    """Reports for a sequence of two-qubit states (vectorized optimizer)."""
    arr = _stack(states)
    measured_arr = _measure_side(arr, measured)
    fmin, th, ph = minimize_conditional_entropy(measured_arr, grid, workers=workers)
    reports = []
    for i, m in enumerate(arr):
        s_a = vn_entropy(partial_trace(m, "A"))
        s_b = vn_entropy(partial_trace(m, "B"))
        mi = _clamp(s_a + s_b - vn_entropy(m), 0.0, 2.0, "mutual information")
        s_kept = s_a if measured == "B" else s_b
        c = _clamp(s_kept - float(fmin[i]), 0.0, mi, "classical correlation")
        basis = MeasurementBasis.wrapped(float(th[i]), float(ph[i]))
        if is_xstate(m):
            e = as_xstate(m)
            xd = discord_xstate(e)
            ent = entanglement_xstate(e)
            reports.append(CorrelationReport(mi, c, mi - c, ent, basis, *xd))
        else:
            reports.append(CorrelationReport(mi, c, mi - c, concurrence(m), basis))
    return reports


def correlation_report(rho, grid=GRID, measured: str = "B") -> CorrelationReport:
    return correlation_reports([rho], grid, measured)[0]


def discord_numeric(rho, grid=GRID, measured: str = "B") -> CorrelationReport:
    """Discord ``I - C`` from the numeric measurement search."""
    return correlation_report(rho, grid, measured)
