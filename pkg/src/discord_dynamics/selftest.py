"""Built-in property suites run by ``discord-dynamics selftest``.

Suites look up library functions through their modules at call time, so a
monkeypatched (mutated) implementation is what gets checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import correlations, dampchan, liouville, qmat, spinmodel


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _rng():
    return np.random.default_rng(20240601)


def _random_state(rng, dim=4, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def _default_trajectories():
    model, bath = spinmodel.ModelParams(), liouville.BathParams()
    h = spinmodel.build_hamiltonian(model)
    times = np.linspace(0.0, 30.0, 121)
    L = liouville.build_liouvillian(h, bath)
    out = []
    for psi in (spinmodel.ground_state(model), spinmodel.basis_ket("10")):
        rho0 = qmat.pure_state(psi)
        out.append(liouville.evolve_diag(L, rho0, times))
        out.append(liouville.evolve_rk4(h, bath, rho0, times))
    return out


def suite_vectorization():
    rng = _rng()
    worst = 0.0
    for _ in range(10):
        a, r, b = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
        lhs = liouville.vec(a @ r @ b)
        rhs = liouville.spre(a) @ liouville.spost(b) @ liouville.vec(r)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= 1e-12, f"max |vec(ArB) - spre(A)spost(B)vec(r)| = {worst:.2e}"


def suite_preservation():
    worst_tr = worst_h = 0.0
    worst_eig = 1.0
    for traj in _default_trajectories():
        worst_tr = max(worst_tr, float(traj.trace_err.max()))
        worst_h = max(worst_h, float(traj.herm_defect.max()))
        worst_eig = min(worst_eig, float(traj.min_eig.min()))
    ok = worst_tr <= 1e-10 and worst_h <= 1e-9 and worst_eig >= -1e-8
    return ok, f"trace err {worst_tr:.2e}, herm defect {worst_h:.2e}, min eig {worst_eig:.2e}"


def suite_cptp():
    worst = 0.0
    for nbar in (0.0, 0.5, 1.0, 5.0):
        for p in (0.0, 0.25, 0.5, 1.0):
            ks = dampchan.kraus_ops(nbar, p)
            s = sum(k.conj().T @ k for k in ks)
            worst = max(worst, float(np.max(np.abs(s - np.eye(2)))))
    return worst <= 1e-12, f"max completeness defect {worst:.2e}"


def suite_xstate_closure():
    worst = 0.0
    for traj in _default_trajectories():
        worst = max(worst, max(qmat.offpattern_max(m) for m in traj.states))
    return worst <= 1e-9, f"max off-pattern magnitude {worst:.2e}"


def suite_swap_phase():
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        p = rng.dirichlet(np.ones(4))
        zmax = math.sqrt(p[1] * p[2])
        e = qmat.XStateEntries(*p, zmax * rng.uniform() * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        q, e_ent = correlations.discord_xstate(e).Q, correlations.entanglement_xstate(e)
        rot = qmat.XStateEntries(e.u, e.x, e.y, e.v, e.z * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        for other in (e.swapped(), rot):
            worst = max(
                worst,
                abs(correlations.discord_xstate(other).Q - q),
                abs(correlations.entanglement_xstate(other) - e_ent),
            )
    return worst <= 1e-12, f"max change under swap/phase {worst:.2e}"


def suite_lindblad_channel():
    bath = liouville.BathParams()
    rho0 = qmat.pure_state(spinmodel.ground_state(spinmodel.ModelParams()))
    h0 = spinmodel.build_hamiltonian(spinmodel.ModelParams(J=0.0, D=0.2, omega=0.1))
    times = np.linspace(0.0, 30.0, 61)
    lind = liouville.evolve(liouville.build_liouvillian(h0, bath), rho0, times)
    chan = dampchan.channel_trajectory(rho0, bath.nbar, bath.gamma, times)
    worst = float(np.max(np.abs(lind.states - chan)))
    return worst <= 1e-8, f"max |Lindblad - channel| at J=0: {worst:.2e}"


def suite_spectrum():
    rng = _rng()
    worst = 0.0
    for _ in range(100):
        p = spinmodel.ModelParams(rng.uniform(0, 3), rng.uniform(-3, 3), rng.uniform(-2, 2))
        spec = spinmodel.exact_spectrum(p)
        worst = max(worst, float(np.max(np.abs(spec.energies - spinmodel.closed_form_levels(p)))))
    return worst <= 1e-10, f"max eigenvalue deviation {worst:.2e}"


def suite_liouvillian_spectrum():
    msgs, ok = [], True
    for nbar, gamma in ((1.0, 0.1), (0.0, 0.1), (3.0, 0.5)):
        h = spinmodel.build_hamiltonian(spinmodel.ModelParams())
        L = liouville.build_liouvillian(h, liouville.BathParams(nbar, gamma))
        good = L.eigenvalues.real.max() <= 1e-10 and L.zero_modes() == 1
        ok &= bool(good)
        msgs.append(f"nbar={nbar}: max Re {L.eigenvalues.real.max():.1e}, zero modes {L.zero_modes()}")
    return ok, "; ".join(msgs)


def suite_closed_vs_numeric():
    states = [
        spinmodel.thermal_state(spinmodel.ModelParams(1.0, d, 0.1), t)
        for t in (0.2, 1.0, 2.0)
        for d in (0.0, 1.0, 3.0)
    ]
    worst_abs, worst_signed = 0.0, 0.0
    for r in correlations.correlation_reports(states):
        worst_abs = max(worst_abs, abs(r.closed_form_residual))
        worst_signed = min(worst_signed, r.closed_form_residual)
    ok = worst_abs <= 1e-3 and worst_signed >= -1e-9
    return ok, f"max |Q_closed - Q_numeric| {worst_abs:.2e}, min signed {worst_signed:.2e}"


SUITES = {
    "vectorization": suite_vectorization,
    "preservation": suite_preservation,
    "cptp": suite_cptp,
    "xstate_closure": suite_xstate_closure,
    "swap_phase_invariance": suite_swap_phase,
    "lindblad_channel_equivalence": suite_lindblad_channel,
    "spectrum_closed_form": suite_spectrum,
    "liouvillian_spectrum": suite_liouvillian_spectrum,
    "closed_vs_numeric_discord": suite_closed_vs_numeric,
}


def run_selftest(names=None) -> list[SuiteResult]:
    results = []
    for name, fn in SUITES.items():
        if names and name not in names:
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing suite is a failing suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, bool(ok), detail))
    return results
