"""Scenario runners behind the command line: trajectories and sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import dampchan, liouville
from .correlations import RANGE_SLACK, CorrelationReport, correlation_reports, discord_xstate, entanglement_xstate
from .errors import InvariantViolation, ValidationError
from .liouville import BathParams
from .qmat import TRACE_TOL, DensityMatrix, as_xstate, pure_state
from .spinmodel import ModelParams, basis_ket, build_hamiltonian, closed_form_levels, ground_state, thermal_state


SCENARIOS = ("fig1a", "fig1b", "fig2", "fig3", "custom")
METHODS = ("diag", "rk4", "both")
BACKEND_TOL = 1e-6

TRAJECTORY_HEADER = [
    "t", "u", "x", "y", "v", "re_z", "im_z", "I", "C", "Q", "E",
    "theta_opt", "phi_opt", "trace_err", "min_eig",
]
COMPARE_HEADER = ["t", "Q_J1", "Q_J0", "Q_J0_lindblad", "j0_resid"]
THERMAL_HEADER = ["T", "D", "Q", "Q_numeric_check", "E"]

# grid values not given in the source figures; flagged in the metadata
ARTIFACT_CHOICES = {
    "t_max": 30.0,
    "steps": 601,
    "t_range": (0.1, 2.0, 0.05),
    "d_range": (0.0, 3.0, 0.05),
}


def parse_range(text) -> tuple[float, float, float]:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(":")
    if len(parts) != 3:
        raise ValidationError(f"range must look like start:stop:step, got {text!r}")
    try:
        a, b, s = (float(v) for v in parts)
    except ValueError as exc:
        raise ValidationError(f"bad range {text!r}: {exc}") from None
    if not s > 0 or b < a:
        raise ValidationError(f"range {text!r} is empty or has a non-positive step")
    return a, b, s


def range_values(r: tuple[float, float, float]) -> np.ndarray:
    """Inclusive grid ``start, start+step, ..., stop``."""
    a, b, s = r
    n = int(math.floor((b - a) / s + 1e-9))
    return np.round(a + s * np.arange(n + 1), 12)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "fig1a"
    model: ModelParams = field(default_factory=ModelParams)
    bath: BathParams = field(default_factory=BathParams)
    initial: str = "ground"
    t_max: float = 30.0
    steps: int = 601
    method: str = "diag"
    d_range: tuple = ARTIFACT_CHOICES["d_range"]
    t_range: tuple = ARTIFACT_CHOICES["t_range"]
    check_every: int = 1
    workers: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.scenario!r}")
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.steps < 2:
            raise ValidationError(f"steps must be >= 2, got {self.steps}")
        if not self.t_max > 0:
            raise ValidationError(f"t_max must be > 0, got {self.t_max}")
        if self.check_every < 1 or self.workers < 1:
            raise ValidationError("check_every and workers must be >= 1")
        parse_range(self.d_range)
        a, _, _ = parse_range(self.t_range)
        if self.scenario == "fig3" and not a > 0:
            raise ValidationError("temperature range must exclude T <= 0")

    @classmethod
    def for_scenario(cls, scenario: str, **overrides) -> "ScenarioConfig":
        defaults = {"fig1b": {"initial": "separable10"}}.get(scenario, {})
        return cls(scenario=scenario, **{**defaults, **overrides})

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps)

    def _artifact_choices(self) -> list[str]:
        used = []
        for key, default in ARTIFACT_CHOICES.items():
            value = getattr(self, key)
            if key.endswith("range"):
                value = parse_range(value)
            if value == default:
                used.append(key)
        return used

    def metadata(self) -> dict:
        return {
            "scenario": self.scenario,
            "model": {"J": self.model.J, "D": self.model.D, "omega": self.model.omega},
            "bath": {"nbar": self.bath.nbar, "gamma": self.bath.gamma},
            "initial": self.initial,
            "t_max": self.t_max,
            "steps": self.steps,
            "method": self.method,
            "d_range": list(parse_range(self.d_range)),
            "t_range": list(parse_range(self.t_range)),
            "artifact_choices": self._artifact_choices(),
            "units": "hbar = k_B = 1",
        }


def read_state_file(path) -> np.ndarray:
    """Four lines of four ``re+imj`` entries; validated as a density matrix."""
    try:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise ValidationError(f"cannot read initial state {path}: {exc}") from None
    try:
        rows = [[complex(tok) for tok in ln.split()] for ln in lines]
    except ValueError as exc:
        raise ValidationError(f"bad complex entry in {path}: {exc}") from None
    if len(rows) != 4 or any(len(r) != 4 for r in rows):
        raise ValidationError(f"{path} must hold a 4x4 matrix")
    return DensityMatrix.from_array(rows).mat.copy()


def initial_state(cfg: ScenarioConfig, model: Optional[ModelParams] = None) -> np.ndarray:
    model = model or cfg.model
    if cfg.initial == "ground":
        return pure_state(ground_state(model))
    if cfg.initial == "separable10":
        return pure_state(basis_ket("10"))
    if cfg.initial.startswith("file:"):
        return read_state_file(cfg.initial[len("file:"):])
    raise ValidationError(f"initial must be ground, separable10 or file:PATH, got {cfg.initial!r}")


def check_bell_ground(model: ModelParams) -> None:
    """The entangled level must be the unique ground level for the ground-state scenarios."""
    levels = closed_form_levels(model)
    bell = model.J * (-0.5 - abs(model.eta))
    if abs(bell - levels[0]) > 1e-12 or levels[1] - levels[0] <= 1e-12:
        raise InvariantViolation(f"entangled level is not the unique ground level for {model}")


def check_report(r: CorrelationReport, where: str) -> None:
    for name, value, hi in (("Q", r.discord, r.mutual_info), ("C", r.classical, r.mutual_info)):
        if not (-RANGE_SLACK <= value <= hi + RANGE_SLACK):
            raise InvariantViolation(f"{name} = {value!r} outside [0, I] at {where}")
    if not (0.0 <= r.entanglement <= 1.0 + RANGE_SLACK):
        raise InvariantViolation(f"E = {r.entanglement!r} outside [0, 1] at {where}")


def _evolve(cfg: ScenarioConfig, rho0: np.ndarray):
    h = build_hamiltonian(cfg.model)
    times = cfg.times
    diag = rk4 = None
    if cfg.method in ("diag", "both"):
        diag = liouville.evolve(liouville.build_liouvillian(h, cfg.bath), rho0, times)
    if cfg.method in ("rk4", "both"):
        rk4 = liouville.evolve_rk4(h, cfg.bath, rho0, times)
    return diag, rk4


def run_evolve(cfg: ScenarioConfig):
    """Trajectory rows ``(header, rows)`` for fig1a, fig1b and custom."""
    if cfg.initial == "ground" and cfg.scenario in ("fig1a", "fig2"):
        check_bell_ground(cfg.model)
    rho0 = initial_state(cfg)
    diag, rk4 = _evolve(cfg, rho0)
    traj = diag if diag is not None else rk4
    header = list(TRAJECTORY_HEADER)
    resid = None
    if diag is not None and rk4 is not None:
        header.append("backend_resid")
        resid = np.max(np.abs(diag.states - rk4.states), axis=(1, 2))
        if resid.max() > BACKEND_TOL:
            raise InvariantViolation(f"backend residual {resid.max():.3e} exceeds {BACKEND_TOL}")
    reports = correlation_reports(traj.states, workers=cfg.workers)
    rows = []
    for i, (t, m, r) in enumerate(zip(traj.times, traj.states, reports)):
        if traj.trace_err[i] > TRACE_TOL:
            raise InvariantViolation(f"trace error {traj.trace_err[i]:.3e} at t={t}")
        check_report(r, f"t={t}")
        d = m.diagonal().real
        row = [
            t, d[0], d[1], d[2], d[3], m[1, 2].real, m[1, 2].imag,
            r.mutual_info, r.classical, r.discord, r.entanglement,
            r.argmin_basis.theta, r.argmin_basis.phi, traj.trace_err[i], traj.min_eig[i],
        ]
        if resid is not None:
            row.append(resid[i])
        rows.append(row)
    return header, rows


def run_compare_j0(cfg: ScenarioConfig):
    """Discord with the configured coupling next to the J=0 channel result.

    Both runs start from the ground state of the configured model.  The
    J=0 column comes from the Kraus channel; the master-equation solution
    at J=0 and their largest elementwise state difference are also listed.
    """
    check_bell_ground(cfg.model)
    rho0 = initial_state(replace(cfg, initial="ground"))
    times = cfg.times
    interacting, _ = _evolve(replace(cfg, method="diag"), rho0)
    free_model = replace(cfg.model, J=0.0)
    channel = dampchan.channel_trajectory(rho0, cfg.bath.nbar, cfg.bath.gamma, times)
    lind = liouville.evolve(
        liouville.build_liouvillian(build_hamiltonian(free_model), cfg.bath), rho0, times
    )
    q_j = correlation_reports(interacting.states, workers=cfg.workers)
    q_0 = correlation_reports(channel, workers=cfg.workers)
    q_0l = correlation_reports(lind.states, workers=cfg.workers)
    rows = []
    for i, t in enumerate(times):
        for r in (q_j[i], q_0[i], q_0l[i]):
            check_report(r, f"t={t}")
        resid = float(np.max(np.abs(channel[i] - lind.states[i])))
        rows.append([t, q_j[i].discord, q_0[i].discord, q_0l[i].discord, resid])
    return list(COMPARE_HEADER), rows


def run_thermal_sweep(cfg: ScenarioConfig):
    """Closed-form thermal discord over the (T, D) grid with numeric checks."""
    temps = range_values(parse_range(cfg.t_range))
    ds = range_values(parse_range(cfg.d_range))
    if temps.min() <= 0:
        raise ValidationError("temperatures must be > 0")
    points, states = [], []
    for T in temps:
        for D in ds:
            points.append((float(T), float(D)))
            states.append(thermal_state(replace(cfg.model, D=float(D)), float(T)))
    checked = list(range(0, len(states), cfg.check_every))
    numeric = dict(zip(checked, correlation_reports([states[i] for i in checked], workers=cfg.workers)))
    rows = []
    for i, ((T, D), rho) in enumerate(zip(points, states)):
        e = as_xstate(rho)
        q = discord_xstate(e).Q
        ent = entanglement_xstate(e)
        check = None
        if i in numeric:
            check_report(numeric[i], f"T={T}, D={D}")
            check = numeric[i].discord
        rows.append([T, D, q, check, ent])
    return list(THERMAL_HEADER), rows


def run_scenario(cfg: ScenarioConfig):
    if cfg.scenario == "fig2":
        return run_compare_j0(cfg)
    if cfg.scenario == "fig3":
        return run_thermal_sweep(cfg)
    return run_evolve(cfg)


def format_value(v) -> str:
    if v is None:
        return ""
    return f"{float(v) + 0.0:.11e}"


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def gnuplot_script(cfg: ScenarioConfig, csv_path: str) -> str:
    head = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 800,600",
        f"set output '{Path(csv_path).with_suffix('.png').name}'",
    ]
    if cfg.scenario == "fig3":
        body = [
            "set xlabel 'T'", "set ylabel 'D'", "set zlabel 'Q'",
            f"splot '{csv_path}' using 1:2:3 with points pt 7 ps 0.4 title 'Q'",
        ]
    elif cfg.scenario == "fig2":
        body = [
            "set xlabel 't'", "set ylabel 'Q'",
            f"plot '{csv_path}' using 1:2 with lines lw 2 title 'Q (J={cfg.model.J:g})', "
            f"'' using 1:3 with lines dt 2 lw 2 title 'Q (J=0)'",
        ]
    else:
        body = [
            "set xlabel 't'", "set ylabel 'correlation'",
            f"plot '{csv_path}' using 1:10 with lines lw 2 title 'Q', "
            f"'' using 1:11 with lines dt 2 lw 2 title 'E'",
        ]
    return "\n".join(head + body) + "\n"
