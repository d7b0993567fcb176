"""``gpfield`` command line: ``gpfield <subcommand> --config PATH [--seed N] [--out DIR]``.

Every subcommand prints a JSON summary on stdout.  Exit status is 0 when the
run passes its checks, 1 when a check fails and 2 on usage, config or file
format errors.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .background import (Background, bump_modulated_background, check_Hphi, constant_background,
                         kink_pair_background)
from .config import ConfigError, RunConfig, parse_config
from .conservation import drift_report, renormalized_mass, state_energy
from .decomposition import (forcing_part1, forcing_part2_explicit, frequency_split,
                            part1_lipschitz_constant, q_smoothing_bound, q_smoothing_ratio,
                            split_forcing)
from .io import SnapshotFormatError, read_snapshot, to_json, write_csv, write_json, write_snapshot
from .nonlinearity import (Nonlinearity, check_Halpha1, check_Halpha1prime, check_Halpha2, check_ff01,
                           check_Hf, make_cubic_quintic, make_gross_pitaevskii, make_polynomial,
                           max_admissible_dimension)
from .propagator import strichartz_ratio
from .rng import seeded_random_field
from .solver import (BlowUpError, ConvergenceDiagnosticsError, NonContractionError, SolverConfig,
                     Trajectory, convergence_order, evolve, picard_solve)
from .spectral import AdmissiblePair, Field, Grid, admissible_pair_for, h1_norm, lp_norm

log = logging.getLogger("gpfield")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# -- builders -----------------------------------------------------------------

def build_grid(cfg: RunConfig) -> Grid:
    return Grid(cfg.grid.dim, cfg.grid.N, cfg.grid.L)


def build_nonlinearity(cfg: RunConfig) -> Nonlinearity:
    sec, rho0 = cfg.nonlinearity, cfg.background.rho0
    if sec.kind == "gross-pitaevskii":
        return make_gross_pitaevskii(rho0)
    if sec.kind == "cubic-quintic":
        return make_cubic_quintic(rho0, sec.a)
    return make_polynomial(rho0, sec.coefficients)


def build_background(cfg: RunConfig, grid: Grid | None = None) -> Background:
    grid = grid or build_grid(cfg)
    b = cfg.background
    if b.type == "constant":
        return constant_background(grid, b.rho0)
    if b.type == "kink-pair":
        return kink_pair_background(grid, b.rho0, b.separation)
    return bump_modulated_background(grid, b.rho0, b.amplitude, b.width)


def build_initial(cfg: RunConfig, grid: Grid | None = None, seed: int | None = None) -> Field:
    """Initial perturbation w0, scaled to the configured H^1 norm."""
    grid = grid or build_grid(cfg)
    ini = cfg.initial
    if ini.type == "zero":
        return Field.zeros(grid)
    if ini.type == "gaussian":
        w = Field(grid, np.exp(-grid.radius**2 / ini.width**2).astype(complex))
    else:
        w = seeded_random_field(grid, cfg.seed if seed is None else seed, ini.spectrum)
    return w * (ini.h1_norm / h1_norm(w))


def solver_config(cfg: RunConfig, scheme: str | None = None) -> SolverConfig:
    s = cfg.solver
    return SolverConfig(dt=s.dt, T=s.T, scheme=scheme or s.scheme, picard_max_iter=s.picard_max_iter,
                        picard_tol=s.picard_tol, snapshot_stride=s.snapshot_stride)


def declared_pair(cfg: RunConfig) -> AdmissiblePair:
    if cfg.norms.p is not None:
        return AdmissiblePair(cfg.norms.p, cfg.norms.q, cfg.grid.dim)
    return admissible_pair_for(cfg.grid.dim)


# -- artifacts ----------------------------------------------------------------

def write_run_artifacts(out: Path, traj: Trajectory, bg: Background, nl: Nonlinearity,
                        formats) -> dict:
    """Time series, drift report and snapshots; returns the drift summary."""
    report = drift_report(traj, bg, nl)
    written = []
    if "csv" in formats:
        n = len(traj.energy_series)
        write_csv(out / "timeseries.csv", ["t", "energy", "mass", "h1_w"],
                  ((k * traj.dt, traj.energy_series[k], traj.mass_series[k], traj.h1_series[k])
                   for k in range(n)))
        write_csv(out / "drift.csv", ["t", "energy", "rel_drift", "mass"],
                  zip(report.times, report.series, report.rel_drift(), report.mass_series))
        written += ["timeseries.csv", "drift.csv"]
    if "snapshots" in formats:
        for step, t, w in zip(traj.snapshot_steps, traj.times, traj.w_fields):
            name = f"snapshots/step_{step:08d}.gpf"
            write_snapshot(out / name, bg.phi + w, bg.rho0, t)
            written.append(name)
    return {"drift": report.to_dict(), "artifacts": written}


def _finish(out: Path, summary: dict, formats) -> None:
    if "json" in formats:
        write_json(out / "summary.json", summary)
    print(to_json(summary))


# -- subcommands --------------------------------------------------------------

def cmd_check_hypotheses(cfg: RunConfig, args) -> int:
    nl = build_nonlinearity(cfg)
    sec = cfg.nonlinearity
    alpha1 = sec.alpha1 if sec.alpha1 is not None else nl.alpha1_hint
    alpha2 = sec.alpha2 if sec.alpha2 is not None else alpha1
    reports = [
        check_Hf(nl),
        check_Halpha1prime(nl, alpha1, r_max=sec.r_max, samples=sec.samples),
        check_ff01(nl, alpha1, samples=sec.samples, r_max=sec.r_max),
        check_Halpha2(nl, alpha1, alpha2, r_max=sec.r_max, samples=sec.samples),
    ]
    dims = sorted(max_admissible_dimension(alpha1))
    hphi = check_Hphi(build_background(cfg))
    # the regularity bound on f'' / f''' depends on the simulated dimension
    halpha1 = check_Halpha1(nl, alpha1, n=cfg.grid.dim, r_max=sec.r_max, samples=sec.samples)
    passed = all(r.passed for r in reports) and hphi["passed"]
    summary = {
        "command": "check-hypotheses",
        "passed": passed,
        "nonlinearity": nl.to_dict(),
        "alpha1": alpha1,
        "reports": [r.to_dict() for r in reports],
        "Halpha1": halpha1.to_dict(),
        "max_admissible_dimension": dims,
        "background": hphi,
    }
    _finish(Path(cfg.output.directory), summary, cfg.output.formats)
    return EXIT_OK if passed else EXIT_FAIL


def _evolve_summary(cmd: str, cfg: RunConfig, traj: Trajectory) -> dict:
    return {
        "command": cmd,
        "passed": True,
        "grid": build_grid(cfg).describe(),
        "dt": cfg.solver.dt,
        "T": cfg.solver.T,
        "steps": len(traj.energy_series) - 1,
        "seed": cfg.seed,
        "xt_norm": traj.xt_norm,
        "final_h1_w": float(traj.h1_series[-1]),
    }


def cmd_evolve(cfg: RunConfig, args) -> int:
    grid = build_grid(cfg)
    bg, nl = build_background(cfg, grid), build_nonlinearity(cfg)
    w0 = build_initial(cfg, grid)
    out = Path(cfg.output.directory)
    try:
        traj = evolve(w0, bg, nl, solver_config(cfg, "strang"))
    except BlowUpError as exc:
        print(to_json({"command": "evolve", "passed": False, "error": str(exc), "step": exc.step}))
        return EXIT_FAIL
    summary = _evolve_summary("evolve", cfg, traj)
    summary.update(write_run_artifacts(out, traj, bg, nl, cfg.output.formats))
    _finish(out, summary, cfg.output.formats)
    return EXIT_OK


def cmd_picard(cfg: RunConfig, args) -> int:
    grid = build_grid(cfg)
    bg, nl = build_background(cfg, grid), build_nonlinearity(cfg)
    w0 = build_initial(cfg, grid)
    out = Path(cfg.output.directory)
    try:
        traj = picard_solve(w0, bg, nl, solver_config(cfg, "picard"))
    except NonContractionError as exc:
        summary = {"command": "picard", "passed": False, "error": str(exc)}
        _finish(out, summary, cfg.output.formats)
        return EXIT_FAIL
    summary = _evolve_summary("picard", cfg, traj)
    summary["iterations"] = traj.iterations
    summary["contraction_factors"] = traj.picard_history
    summary["contracting"] = all(f < 1 for f in traj.picard_history)
    if not args.no_compare:
        strang = evolve(w0, bg, nl, solver_config(cfg, "strang"), require_hf=False)
        summary["strang_l2_difference"] = lp_norm(traj.final - strang.final, 2)
    summary["passed"] = summary["contracting"]
    summary.update(write_run_artifacts(out, traj, bg, nl, cfg.output.formats))
    _finish(out, summary, cfg.output.formats)
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def cmd_strichartz(cfg: RunConfig, args) -> int:
    grid = build_grid(cfg)
    sec = cfg.strichartz
    pair = declared_pair(cfg)
    report = strichartz_ratio(grid, cfg.seed, pair, sec.T, sec.steps, sec.num_fields, sec.spectrum)
    summary = {"command": "strichartz", "seed": cfg.seed, "spectrum": sec.spectrum, "steps": sec.steps,
               "passed": math.isfinite(report.max_ratio)}
    summary.update(report.to_dict())
    _finish(Path(cfg.output.directory), summary, cfg.output.formats)
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def decompose_probes(cfg: RunConfig) -> dict:
    """Reconstruction identities, explicit-remainder oracle and boundedness probes."""
    grid = build_grid(cfg)
    bg, nl = build_background(cfg, grid), build_nonlinearity(cfg)
    sec = cfg.decompose
    radius = sec.perturbation_h1
    lip_bound = part1_lipschitz_constant(bg, nl)
    q_bound = q_smoothing_bound(sec.cutoff_scale)
    split_err = oracle_err = freq_err = 0.0
    lip_max = q_max = 0.0
    for k in range(sec.cases):
        seed = cfg.seed + 2 * k
        w1 = seeded_random_field(grid, seed, "sobolev-decay")
        w1 = w1 * (radius / h1_norm(w1))
        w2 = seeded_random_field(grid, seed + 1, "sobolev-decay")
        w2 = w2 * (radius / h1_norm(w2))
        s = split_forcing(w1, bg, nl)
        split_err = max(split_err, lp_norm(s.f1 + s.f2 - s.whole, math.inf))
        scale = max(1.0, lp_norm(s.whole, math.inf))
        oracle_err = max(oracle_err, lp_norm(s.f2 - forcing_part2_explicit(w1, bg, nl), math.inf) / scale)
        eta = seeded_random_field(grid, seed, "flat")
        fs = frequency_split(eta, sec.cutoff_scale)
        freq_err = max(freq_err, lp_norm(fs.low + fs.high - eta, math.inf) / lp_norm(eta, math.inf))
        q_max = max(q_max, q_smoothing_ratio(eta, sec.cutoff_scale))
        diff = forcing_part1(w1, bg, nl) - forcing_part1(w2, bg, nl)
        lip_max = max(lip_max, lp_norm(diff, 2) / h1_norm(w1 - w2))
    return {
        "cases": sec.cases,
        "tol": sec.tol,
        "split_reconstruction_err": split_err,
        "explicit_remainder_rel_err": oracle_err,
        "frequency_reconstruction_err": freq_err,
        "lipschitz_max_ratio": lip_max,
        "lipschitz_bound": lip_bound,
        "q_smoothing_max_ratio": q_max,
        "q_smoothing_bound": q_bound,
    }


def cmd_decompose_test(cfg: RunConfig, args) -> int:
    res = decompose_probes(cfg)
    tol = res["tol"]
    checks = {
        "split_reconstruction": res["split_reconstruction_err"] <= tol,
        "frequency_reconstruction": res["frequency_reconstruction_err"] <= tol,
        "explicit_remainder": res["explicit_remainder_rel_err"] <= 1e3 * tol,
        "lipschitz": res["lipschitz_max_ratio"] <= res["lipschitz_bound"] * (1 + 1e-12),
        "q_smoothing": res["q_smoothing_max_ratio"] <= res["q_smoothing_bound"] * (1 + 1e-12),
    }
    summary = {"command": "decompose-test", "seed": cfg.seed, "checks": checks,
               "passed": all(checks.values())}
    summary.update(res)
    _finish(Path(cfg.output.directory), summary, cfg.output.formats)
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def cmd_energy(cfg: RunConfig, args) -> int:
    if args.snapshot is None:
        raise UsageError("energy needs --snapshot PATH")
    u, rho0, t = read_snapshot(args.snapshot)
    nl = build_nonlinearity(cfg)
    if abs(rho0 - nl.rho0) > 1e-12 * max(1.0, abs(rho0)):
        log.warning("snapshot rho0=%r differs from config rho0=%r", rho0, nl.rho0)
    summary = {
        "command": "energy",
        "passed": True,
        "snapshot": str(args.snapshot),
        "time": t,
        "rho0": rho0,
        "grid": u.grid.describe(),
        "energy": state_energy(u, nl),
        "mass": renormalized_mass(u, rho0),
    }
    print(to_json(summary))
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, args) -> int:
    grid = build_grid(cfg)
    bg, nl = build_background(cfg, grid), build_nonlinearity(cfg)
    w0 = build_initial(cfg, grid)
    sec = cfg.convergence
    try:
        res = convergence_order(w0, bg, nl, cfg.solver.T, sec.dt_list)
    except ConvergenceDiagnosticsError as exc:
        summary = {"command": "convergence", "passed": False, "error": str(exc)}
        _finish(Path(cfg.output.directory), summary, cfg.output.formats)
        return EXIT_FAIL
    passed = res.exact or sec.order_min <= res.order <= sec.order_max
    summary = {"command": "convergence", "passed": passed, "T": cfg.solver.T,
               "order_min": sec.order_min, "order_max": sec.order_max}
    summary.update(res.to_dict())
    _finish(Path(cfg.output.directory), summary, cfg.output.formats)
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "check-hypotheses": cmd_check_hypotheses,
    "evolve": cmd_evolve,
    "picard": cmd_picard,
    "strichartz": cmd_strichartz,
    "decompose-test": cmd_decompose_test,
    "energy": cmd_energy,
    "convergence": cmd_convergence,
}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpfield", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="INI run configuration")
        p.add_argument("--seed", type=int, default=None, help="override [run] seed")
        p.add_argument("--out", type=Path, default=None, help="override [output] directory")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "energy":
            p.add_argument("--snapshot", type=Path, default=None, help="GPF1 snapshot file")
        if name == "picard":
            p.add_argument("--no-compare", action="store_true",
                           help="skip the Strang run used for cross-validation")
    return parser


def _error(command: str, message: str, **extra) -> int:
    print(f"gpfield {command}: {message}", file=sys.stderr)
    print(to_json({"command": command, "passed": False, "error": message, **extra}))
    return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg.run.seed = args.seed
        if args.out is not None:
            cfg.output.directory = str(args.out)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        return _error(args.command, f"config error: {exc}",
                      problems=[f"{w}: {m}" for w, m in exc.problems])
    except SnapshotFormatError as exc:
        return _error(args.command, f"snapshot format error: {exc}", offset=exc.offset)
    except (UsageError, OSError) as exc:
        return _error(args.command, str(exc))
    except ValueError as exc:
        # domain errors raised by the modules for inputs the config could not rule out
        return _error(args.command, f"invalid input: {exc}")


if __name__ == "__main__":
    sys.exit(main())
