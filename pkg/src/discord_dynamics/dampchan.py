"""Generalized amplitude damping for two non-interacting qubits.

With no exchange coupling each qubit relaxes independently, and the
master-equation evolution reduces to a product of single-qubit Kraus
channels with exchange probability

    p(t) = 1 - exp(-2 gamma (2 nbar + 1) t).

The rate 2*gamma*(2*nbar + 1) is the population relaxation rate of the
single-qubit generator in :mod:`discord_dynamics.liouville`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qmat import XStateEntries, as_array

# exponent constant in p(t); calibrated against the one-qubit generator
RATE_FACTOR = 2.0


@dataclass(frozen=True)
class ChannelParams:
    nbar: float
    p: float

    def __post_init__(self):
        if self.nbar < 0:
            raise ValidationError(f"nbar must be >= 0, got {self.nbar}")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"p must lie in [0, 1], got {self.p}")


def p_of_t(gamma: float, nbar: float, t):
    """Probability that a qubit has exchanged a quantum with its bath by ``t``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValidationError("time must be >= 0")
    p = -np.expm1(-RATE_FACTOR * gamma * (2.0 * nbar + 1.0) * t_arr)
    return float(p) if p.ndim == 0 else p


def kraus_ops(nbar: float, p: float) -> list[np.ndarray]:
    ChannelParams(nbar, p)
    g = 2.0 * nbar + 1.0
    s = math.sqrt(1.0 - p)
    k0 = math.sqrt((nbar + 1.0) / g) * np.array([[1.0, 0.0], [0.0, s]], dtype=complex)
    k1 = math.sqrt((nbar + 1.0) * p / g) * np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    k2 = math.sqrt(nbar / g) * np.array([[s, 0.0], [0.0, 1.0]], dtype=complex)
    k3 = math.sqrt(nbar * p / g) * np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    return [k0, k1, k2, k3]


def apply_channel(rho, nbar: float, p: float) -> np.ndarray:
    """Single-qubit channel."""
    m = as_array(rho)
    return sum(k @ m @ k.conj().T for k in kraus_ops(nbar, p))


def apply_two_qubit_channel(rho, nbar: float, p: float) -> np.ndarray:
    """Independent identical channels on both qubits."""
    m = as_array(rho)
    ks = kraus_ops(nbar, p)
    out = np.zeros((4, 4), dtype=complex)
    for ka in ks:
        for kb in ks:
            k = np.kron(ka, kb)
            out += k @ m @ k.conj().T
    return 0.5 * (out + out.conj().T)


def eq12_printed(nbar: float, p: float) -> tuple[float, float, float, float, float]:
    """Closed-form Bell-state entries under the printed labels ``(u, x, y, v, z)``.

    Here ``u`` is the doubly excited and ``v`` the doubly ground population;
    :func:`closed_form_bell` returns the same numbers in basis order.
    """
    ChannelParams(nbar, p)
    g = 2.0 * nbar + 1.0
    up = nbar * p / g
    down = (nbar + 1.0) * p / g
    u = up * (1.0 - down)
    v = down * (1.0 - up)
    x = 0.5 * (nbar * (nbar + 1.0) * p * p / g**2 + (1.0 - up) * (1.0 - down))
    z = 0.5 * (1.0 - p)
    y = 1.0 - u - x - v
    return u, x, y, v, z


def closed_form_bell(nbar: float, p: float, phase: complex = 1.0):
    """Entries of the decayed Bell-like state and the closed-form ``theta1``.

    ``phase`` is the initial relative phase ``<10|psi>/<01|psi>`` (unit
    modulus); it rotates ``z`` but no correlation measure depends on it.
    Returns ``(XStateEntries, theta1)`` with entries in basis order.
    """
    u_p, x_p, y_p, v_p, z_p = eq12_printed(nbar, p)
    g = 2.0 * nbar + 1.0
    theta1 = math.sqrt(p * p / g**2 + (1.0 - p) ** 2)
    # basis order |00>,|01>,|10>,|11>: swap (u<->v, x<->y) of the printed labels
    entries = XStateEntries(v_p, y_p, x_p, u_p, complex(z_p * np.conj(phase)))
    return entries, theta1


def channel_trajectory(rho0, nbar: float, gamma: float, times) -> np.ndarray:
    """States ``(n, 4, 4)`` of the two-qubit channel on a time grid."""
    ps = np.atleast_1d(p_of_t(gamma, nbar, times))
    return np.array([apply_two_qubit_channel(rho0, nbar, float(p)) for p in ps])
