"""``discord-dynamics`` command line.

Exit codes: 0 success, 2 invalid input, 3 numeric invariant violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import (
    ConsistencyError,
    DegeneracyError,
    FallbackRequired,
    InvariantViolation,
    ValidationError,
)
from .liouville import BathParams
from .scenarios import SCENARIOS, ScenarioConfig, gnuplot_script, run_scenario, to_csv
from .selftest import run_selftest
from .spinmodel import ModelParams

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

# flag name -> (config key, type)
_OPTIONS = {
    "J": float, "D": float, "omega": float, "nbar": float, "gamma": float,
    "t_max": float, "steps": int, "initial": str, "method": str,
    "d_range": str, "t_range": str, "out": str, "check_every": int, "workers": int,
}
_MODEL_KEYS = ("J", "D", "omega")
_BATH_KEYS = ("nbar", "gamma")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="discord-dynamics",
        description="Discord and entanglement of two DM-coupled qubits in thermal baths.",
    )
    p.add_argument("scenario", choices=SCENARIOS + ("selftest",))
    p.add_argument("--J", type=float)
    p.add_argument("--D", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--nbar", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--initial", help="ground | separable10 | file:PATH")
    p.add_argument("--method", choices=("diag", "rk4", "both"))
    p.add_argument("--d-range", dest="d_range", help="start:stop:step (fig3)")
    p.add_argument("--t-range", dest="t_range", help="start:stop:step (fig3)")
    p.add_argument("--check-every", dest="check_every", type=int,
                   help="numeric discord check on every n-th grid point (fig3)")
    p.add_argument("--workers", type=int, help="threads for the measurement search")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.add_argument("--config", help="JSON file with any of the options above")
    p.add_argument("--emit-gnuplot", action="store_true",
                   help="write a gnuplot script next to the CSV")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    unknown = set(data) - set(_OPTIONS)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return data


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    """Merge defaults, config file and flags (flags win)."""
    merged = load_config(args.config) if args.config else {}
    for key in _OPTIONS:
        value = getattr(args, key)
        if value is not None:
            merged[key] = value
    for key, typ in _OPTIONS.items():
        if key in merged:
            try:
                merged[key] = typ(merged[key]) if not isinstance(merged[key], list) else merged[key]
            except (TypeError, ValueError):
                raise ValidationError(f"bad value for {key}: {merged[key]!r}") from None
    model = ModelParams(**{k: merged.pop(k) for k in _MODEL_KEYS if k in merged})
    bath = BathParams(**{k: merged.pop(k) for k in _BATH_KEYS if k in merged})
    return ScenarioConfig.for_scenario(args.scenario, model=model, bath=bath, **merged)


def _write(cfg: ScenarioConfig, text: str, emit_gnuplot: bool) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        if emit_gnuplot:
            raise ValidationError("--emit-gnuplot needs --out")
        return
    out = Path(cfg.out)
    out.write_text(text)
    meta = out.with_name(out.name + ".meta.json")
    meta.write_text(json.dumps(cfg.metadata(), indent=2, sort_keys=True) + "\n")
    if emit_gnuplot:
        out.with_suffix(".gp").write_text(gnuplot_script(cfg, out.name))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.scenario == "selftest":
        results = run_selftest()
        passed = all(r.passed for r in results)
        summary = {"passed": passed, "suites": [r.as_dict() for r in results]}
        print(json.dumps(summary, indent=2))
        if not passed:
            failed = ", ".join(r.name for r in results if not r.passed)
            print(f"failed invariants: {failed}", file=sys.stderr)
        return EXIT_OK if passed else EXIT_NUMERIC
    try:
        cfg = config_from_args(args)
        header, rows = run_scenario(cfg)
        _write(cfg, to_csv(header, rows), args.emit_gnuplot)
    except (ValidationError, DegeneracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InvariantViolation, ConsistencyError, FallbackRequired) as exc:
        print(f"numeric invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
