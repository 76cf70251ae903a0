"""Command line: spectrum, evolve, verify, charges.

Exit codes: 0 success, 1 a verification check failed, 2 bad input
(unsupported boundary regime, unreadable files, invalid coefficients).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io, symmetry, verify
from .field import (
    angular_momentum_integral,
    angular_momentum_mode,
    energy_integral,
    energy_mode,
    evolve,
    random_state,
    synthesize,
)
from .numerics import UnderResolvedGridError
from .spectrum import NonOscillatoryModeError, build_spectrum

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
DEFAULT_TIMES = (0.0, 0.5, 1.0)


class UsageError(Exception):
    pass


def _times(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"times must be comma-separated numbers: {exc}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("times must be finite and non-empty")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run config JSON; explicit flags override it")
    common.add_argument("--radius", type=float)
    common.add_argument("--mass", type=float)
    bnd = common.add_mutually_exclusive_group()
    bnd.add_argument("--lambda", dest="lam", type=float, help="Robin parameter")
    bnd.add_argument("--dirichlet", action="store_true", help="Dirichlet boundary instead of Robin")
    common.add_argument("--lmax", dest="l_max", type=int)
    common.add_argument("--nmax", dest="n_max", type=int)
    common.add_argument("--grid-r", dest="grid_r", type=int)
    common.add_argument("--grid-theta", dest="grid_theta", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output JSON path (default: stdout)")

    parser = argparse.ArgumentParser(prog="robin-disk", description="Free scalar field on a disk with Robin boundary.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="roots, wavenumbers, frequencies")
    p.add_argument("--csv", help="also write the table as CSV")

    p = sub.add_parser("evolve", parents=[common], help="evolve a state and sample the field")
    p.add_argument("--state", help="state JSON (default: seeded random state)")
    p.add_argument("--times", type=_times, help="comma-separated sample times")
    p.add_argument("--csv", help="trajectory CSV path")

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=verify.SUITES + ("all",))

    p = sub.add_parser("charges", parents=[common], help="bilocal charge in integral and mode form")
    p.add_argument("--state", help="state JSON (default: seeded random state)")
    p.add_argument("--coefficients", help="coefficients JSON (default: energy-selecting choice)")
    p.add_argument("--times", type=_times, help="evaluation time (first value used)")
    return parser


def run_config_from_args(args: argparse.Namespace) -> io.RunConfig:
    cfg = io.RunConfig.from_dict(io.read_json(args.config)) if args.config else io.RunConfig()
    for name in ("radius", "mass", "l_max", "n_max", "grid_r", "grid_theta", "seed", "out",
                 "suite", "times", "state", "coefficients", "csv"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if args.dirichlet:
        cfg.boundary = "dirichlet"
    elif args.lam is not None:
        cfg.boundary = "robin"
        cfg.lam = args.lam
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_spectrum(cfg: io.RunConfig) -> tuple[dict, int]:
    spectrum = build_spectrum(cfg.disk())
    if cfg.csv:
        io.write_spectrum_csv(cfg.csv, spectrum)
    return io.spectrum_to_dict(spectrum), EXIT_OK


def _load_state(cfg: io.RunConfig, basis):
    if cfg.state:
        return io.state_from_dict(io.read_json(cfg.state), basis)
    return random_state(basis, seed=cfg.seed)


def cmd_evolve(cfg: io.RunConfig) -> tuple[dict, int]:
    setup = verify.make_setup(cfg.disk(), cfg.grid_r, cfg.grid_theta)
    state = _load_state(cfg, setup.basis)
    times = list(cfg.times) if cfg.times else list(DEFAULT_TIMES)
    frames = [synthesize(state, t, setup.grid) for t in times]
    if cfg.csv:
        io.write_trajectory_csv(cfg.csv, frames)
    e_mode, l_mode = energy_mode(state), angular_momentum_mode(state)
    e_quad = [energy_integral(f).value for f in frames]
    l_quad = [angular_momentum_integral(f).value for f in frames]
    final = evolve(state, times[-1] - state.t0)
    summary = {
        "times": times,
        "energy_mode": e_mode,
        "angular_momentum_mode": l_mode,
        "energy_quadrature": e_quad,
        "angular_momentum_quadrature": l_quad,
        "energy_drift": max(abs(e - e_mode) for e in e_quad) / max(abs(e_mode), 1e-300),
        "angular_momentum_drift": max(abs(v - l_mode) for v in l_quad) / max(abs(l_mode), 1.0),
        "final_energy_mode": energy_mode(final),
        "final_angular_momentum_mode": angular_momentum_mode(final),
    }
    return {"final_state": io.state_to_dict(final), "conservation": summary}, EXIT_OK


def cmd_verify(cfg: io.RunConfig) -> tuple[dict, int]:
    disk = cfg.disk()
    setup = verify.make_setup(disk, cfg.grid_r, cfg.grid_theta)
    results = verify.run_suites(setup, cfg.suite, cfg.seed)
    failed = [r for r in results if not r.passed]
    report = {
        "config": io.config_to_dict(disk),
        "grid": {"n_r": setup.grid.n_r, "n_theta": setup.grid.n_theta},
        "seed": cfg.seed,
        "suite": cfg.suite,
        "checks": [r.as_dict() for r in results],
        "n_checks": len(results),
        "n_failed": len(failed),
        "passed": not failed,
    }
    return report, EXIT_OK if not failed else EXIT_FAILED


def cmd_charges(cfg: io.RunConfig) -> tuple[dict, int]:
    setup = verify.make_setup(cfg.disk(), cfg.grid_r, cfg.grid_theta)
    basis = setup.basis
    state = _load_state(cfg, basis)
    if cfg.coefficients:
        coeffs = io.coefficients_from_dict(io.read_json(cfg.coefficients), basis)
    else:
        coeffs = symmetry.energy_coefficients(basis)
    problems = symmetry.validate_coefficients(coeffs)
    if problems:
        raise symmetry.InvalidCoefficientsError(problems)
    t = cfg.times[0] if cfg.times else 0.0
    integral = symmetry.charge_bilocal_integral(symmetry.BilocalKernel(coeffs), state, t, setup.grid)
    mode = symmetry.charge_mode_form(coeffs, state)
    gap = abs(integral - mode)
    table = symmetry.generator_values(state)
    generators = [
        {"l": ell, "n": n, "N": float(nv), "Q_re": float(qv.real), "Q_im": float(qv.imag)}
        for (ell, n), nv, qv in zip(table.index, table.N, table.Q)
    ]
    report = {
        "time": t,
        "integral": integral,
        "mode": mode,
        "abs_gap": gap,
        "rel_gap": gap / abs(mode) if mode != 0 else (0.0 if gap == 0 else math.inf),
        "generators": generators,
    }
    if not math.isfinite(report["rel_gap"]):
        report["rel_gap"] = None
    return report, EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
    "charges": cmd_charges,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = run_config_from_args(args)
        report, code = COMMANDS[args.command](cfg)
    except symmetry.InvalidCoefficientsError as exc:
        print("error: invalid coefficients:", file=sys.stderr)
        for item in exc.violations:
            print(f"  {item}", file=sys.stderr)
        return EXIT_INPUT
    except (NonOscillatoryModeError, UnderResolvedGridError, io.InputFormatError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(io.dumps(report) + "\n", cfg.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
