"""Two-qubit Heisenberg model with a z-axis Dzyaloshinskii-Moriya term.

Single-qubit convention: ``|0>`` is the ground level and
``sigma_z |0> = -|0>``, ``sigma_z |1> = +|1>``.  The remaining Pauli
matrices are fixed by the algebra ``sigma_x sigma_y = i sigma_z``, which
makes ``sigma_minus = (sigma_x - i sigma_y)/2 = |0><1|``.

Units: hbar = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DegeneracyError, ValidationError
from .qmat import eigh, pure_state

I2 = np.eye(2, dtype=complex)
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T

DEGENERACY_TOL = 1e-12
SPECTRUM_TOL = 1e-9


def on_a(op):
    return np.kron(op, I2)


def on_b(op):
    return np.kron(I2, op)


def basis_ket(label: str) -> np.ndarray:
    """Two-qubit computational ket from a label such as ``"10"``."""
    if len(label) != 2 or set(label) - {"0", "1"}:
        raise ValidationError(f"bad basis label {label!r}")
    psi = np.zeros(4, dtype=complex)
    psi[int(label, 2)] = 1.0
    return psi


@dataclass(frozen=True)
class ModelParams:
    J: float = 1.0
    D: float = 0.2
    omega: float = 0.1

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.J, self.D, self.omega)):
            raise ValidationError("model parameters must be finite")
        if self.J < 0:
            raise ValidationError(f"J must be >= 0 (antiferromagnetic), got {self.J}")

    @property
    def eta(self) -> complex:
        return complex(1.0, self.D)


def build_hamiltonian(p: ModelParams) -> np.ndarray:
    h0 = 0.5 * p.omega * (on_a(SIGMA_Z) + on_b(SIGMA_Z))
    exchange = sum(np.kron(s, s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))
    # (sigma_A x sigma_B) . z
    dm = np.kron(SIGMA_X, SIGMA_Y) - np.kron(SIGMA_Y, SIGMA_X)
    return h0 + 0.5 * p.J * (exchange + p.D * dm)


def closed_form_levels(p: ModelParams) -> np.ndarray:
    """The four energies in closed form, in ascending order."""
    r = abs(p.eta)
    levels = [p.J * (-0.5 + r), p.J * (-0.5 - r), 0.5 * p.J - p.omega, 0.5 * p.J + p.omega]
    return np.sort(np.array(levels))


@dataclass(frozen=True)
class SpectrumRecord:
    energies: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors
    eta: complex


def exact_spectrum(p: ModelParams) -> SpectrumRecord:
    """Numeric diagonalization checked against the closed-form levels."""
    w, v = eigh(build_hamiltonian(p))
    expected = closed_form_levels(p)
    err = float(np.max(np.abs(w - expected)))
    if err > SPECTRUM_TOL:
        raise ConsistencyError(
            f"numeric spectrum {w} disagrees with closed form {expected} (max {err:.2e})"
        )
    return SpectrumRecord(w, v, p.eta)


def _fix_phase(psi: np.ndarray) -> np.ndarray:
    # <01|psi> real positive when present, else the largest component
    k = 1 if abs(psi[1]) > 1e-12 else int(np.argmax(np.abs(psi)))
    return psi * (abs(psi[k]) / psi[k])


def ground_state(p: ModelParams) -> np.ndarray:
    spec = exact_spectrum(p)
    gap = spec.energies[1] - spec.energies[0]
    if gap <= DEGENERACY_TOL:
        raise DegeneracyError(
            f"ground level is degenerate (gap {gap:.2e}) for {p}; no unique ground state"
        )
    return _fix_phase(spec.vectors[:, 0].copy())


def bell_phase(psi: np.ndarray) -> complex:
    """Relative phase ``<10|psi> / <01|psi>`` of a one-excitation state."""
    return complex(psi[2] / psi[1])


def thermal_state(p: ModelParams, T: float) -> np.ndarray:
    """Gibbs state of the model at temperature ``T``."""
    if not T > 0:
        raise ValidationError(f"temperature must be > 0, got {T}; use ground_state for T=0")
    spec = exact_spectrum(p)
    e = spec.energies
    weights = np.exp(-(e - e[0]) / T)
    rho = (spec.vectors * (weights / weights.sum())) @ spec.vectors.conj().T
    return 0.5 * (rho + rho.conj().T)


def partition_function(p: ModelParams, T: float) -> float:
    if not T > 0:
        raise ValidationError(f"temperature must be > 0, got {T}")
    return float(np.sum(np.exp(-closed_form_levels(p) / T)))


def nbar_from_temperature(omega_e: float, T_res: float) -> float:
    """Bose-Einstein occupation of a reservoir mode of frequency ``omega_e``."""
    if not omega_e > 0:
        raise ValidationError(f"reservoir frequency must be > 0, got {omega_e}")
    if T_res < 0:
        raise ValidationError(f"reservoir temperature must be >= 0, got {T_res}")
    if T_res == 0:
        return 0.0
    return 1.0 / math.expm1(omega_e / T_res)


__all__ = [
    "ModelParams",
    "SpectrumRecord",
    "build_hamiltonian",
    "closed_form_levels",
    "exact_spectrum",
    "ground_state",
    "thermal_state",
    "partition_function",
    "nbar_from_temperature",
    "basis_ket",
    "bell_phase",
    "pure_state",
]
