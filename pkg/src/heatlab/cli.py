"""Command-line entry point.

Subcommands: solve, check, gap, sweep.  Exit codes are stable across all of
them: 0 completed / estimate holds, 1 usage or config error, 2 estimate
violated, 3 solver abort.  Every report echoes the resolved tolerance, the
curvature bound K, and the geometry hash so runs can be audited.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import reports
from .config import RunConfig
from .errors import (ConfigError, EigenSolveError, EstimateInputError,
                     GeometryError, HeatLabError, SolverAbort, ValidationError)
from .estimates import (RefinementNote, auto_tolerance, check_estimate,
                        classic_residual, drift_residual, nonlinear_residual)
from .explore import SweepSpec, run_sweep
from .gap import build_gap_problem, gap_pde_residual, verify_gap
from .geometry import build_geometry, gradient_components
from .solver import solve

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATED = 2
EXIT_ABORT = 3

_RESIDUAL_FNS = {
    "drift": drift_residual,
    "classic": classic_residual,
    "nonlinear": nonlinear_residual,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="heatlab",
        description="Heat-flow runs and gradient-estimate checks on discrete geometries")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (("solve", "integrate the configured problem"),
                      ("check", "solve and verify the configured estimate"),
                      ("gap", "run the fundamental-gap construction"),
                      ("sweep", "run the exploration parameter sweep")):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="path to key=value run config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--dump-trajectory", action="store_true",
                       help="write trajectory.csv alongside the reports")
        p.add_argument("--resolution-override", type=int, default=None,
                       help="replace the configured resolution on every axis")
        if name == "gap":
            p.add_argument("--corrupt-lambda", action="store_true",
                           help="debug: shift the gap by +1 to exercise failure paths")
    return parser


def _out_dir(args, cfg):
    return args.out if args.out is not None else cfg.output_dir()


def _drift_active(manifold, phi) -> bool:
    comps = gradient_components(manifold, phi)
    return bool(np.max(np.abs(comps)) > 1e-13)


def _resolve_tol(cfg, tag, manifold, problem) -> float:
    tol = cfg.check_tol()
    if tol != "auto":
        return float(tol)
    drifty = tag == "drift" and problem.kind == "drifting" and _drift_active(
        manifold, problem.phi)
    return auto_tolerance(tag, manifold.max_spacing, drift_active=drifty)


def cmd_solve(args) -> int:
    cfg = RunConfig.load(args.config)
    manifold = build_geometry(cfg.geometry_spec(args.resolution_override))
    problem = cfg.problem(manifold)
    schedule = cfg.schedule()
    traj = solve(problem, schedule)
    out = _out_dir(args, cfg)
    if args.dump_trajectory:
        reports.write_trajectory_csv(os.path.join(out, "trajectory.csv"), traj)
    print("solved t_end=%s snapshots=%d" % (schedule.t_end, traj.num_snapshots))
    print("geometry=%s scheme=%s dt=%s" % (manifold.geometry_hash, traj.scheme, traj.dt))
    return EXIT_OK


def _run_check_once(cfg, tag, spec):
    manifold = build_geometry(spec)
    problem = cfg.problem(manifold)
    schedule = cfg.schedule()
    traj = solve(problem, schedule)
    series = _RESIDUAL_FNS[tag](traj)
    tol = _resolve_tol(cfg, tag, manifold, problem)
    return manifold, traj, series, check_estimate(series, tol)


def cmd_check(args) -> int:
    cfg = RunConfig.load(args.config)
    tag = cfg.check_tag()
    spec = cfg.geometry_spec(args.resolution_override)
    manifold, traj, series, verdict = _run_check_once(cfg, tag, spec)

    # Refinement note: same scenario at half resolution distinguishes a
    # genuine violation (resolution independent) from numerical slack.
    coarse_res = tuple(r // 2 for r in spec.resolution)
    if all(r >= 8 for r in coarse_res):
        coarse_spec = spec.with_resolution(resolution=coarse_res)
        _, _, _, c_verdict = _run_check_once(cfg, tag, coarse_spec)
        note = RefinementNote(
            coarse_resolution=coarse_res,
            coarse_worst=c_verdict.worst_residual,
            fine_resolution=spec.resolution,
            fine_worst=verdict.worst_residual)
        verdict = verdict.with_refinement(note)

    out = _out_dir(args, cfg)
    reports.write_residual_csv(os.path.join(out, "residual_%s.csv" % tag), series)
    reports.write_verdict_csv(os.path.join(out, "verdict.csv"), tag, verdict,
                              series.curvature_bound, manifold.geometry_hash)
    if args.dump_trajectory:
        reports.write_trajectory_csv(os.path.join(out, "trajectory.csv"), traj)
    print("check=%s holds=%s worst=%.6g at t=%.6g node=%d" % (
        tag, verdict.holds, verdict.worst_residual, verdict.worst_t, verdict.worst_node))
    print("tol=%s K=%s geometry=%s" % (verdict.tolerance, series.curvature_bound,
                                       manifold.geometry_hash))
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_gap(args) -> int:
    cfg = RunConfig.load(args.config)
    spec = cfg.geometry_spec(args.resolution_override)
    if spec.kind not in ("interval", "box2"):
        raise ConfigError("gap runs need a bounded geometry (interval or box2), "
                          "got '%s'" % spec.kind)
    manifold = build_geometry(spec)
    t_end = cfg._number("schedule.t_end", 0.5)
    gp = build_gap_problem(manifold)
    lam = gp.lam + (1.0 if getattr(args, "corrupt_lambda", False) else 0.0)
    verdict = verify_gap(manifold, lam, gp.u, gp.phi, t_end, core=gp.core)
    data = gap_pde_residual(manifold, lam, gp.u, gp.phi, t_end, core=gp.core)
    out = _out_dir(args, cfg)
    reports.write_gap_csv(os.path.join(out, "gap.csv"), gp,
                          data["max_rel_residual"], spec.resolution)
    print("gap=%.6g lambda1=%.6g lambda2=%.6g holds=%s" % (
        gp.lam, gp.lambda1, gp.lambda2, verdict.holds))
    print("tol=%s K=0.0 geometry=%s min_phi_hess=%.6g rel_residual=%.6g" % (
        verdict.tolerance, manifold.geometry_hash, gp.min_phi_hessian_eig,
        data["max_rel_residual"]))
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_sweep(args) -> int:
    cfg = RunConfig.load(args.config)
    a_values, sup_values, seeds = cfg.sweep_values()
    spec = SweepSpec(geometry=cfg.geometry_spec(args.resolution_override),
                     schedule=cfg.schedule(), a_values=a_values,
                     sup_values=sup_values, seeds=seeds, tol=cfg.check_tol())
    report = run_sweep(spec)
    out = _out_dir(args, cfg)
    reports.write_sweep_csv(os.path.join(out, "sweep.csv"), report)
    n_hold = sum(c.verdict == "holds" for c in report.cells)
    print("sweep cells=%d holds=%d proven_regime_ok=%s" % (
        len(report.cells), n_hold, report.proven_regime_ok))
    print("tol=%s K=0.0 geometry=%s" % (report.tolerance, report.geometry_hash))
    return EXIT_OK if report.proven_regime_ok else EXIT_VIOLATED


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    handler = {"solve": cmd_solve, "check": cmd_check,
               "gap": cmd_gap, "sweep": cmd_sweep}[args.command]
    try:
        return handler(args)
    except (ConfigError, GeometryError, ValidationError, EstimateInputError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (SolverAbort, EigenSolveError) as exc:
        print("abort: %s" % exc, file=sys.stderr)
        return EXIT_ABORT
    except HeatLabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
