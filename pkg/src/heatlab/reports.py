"""Machine-readable CSV reports with deterministic bytes.

All writers format floats with shortest round-trip repr and write through a
temp file plus rename, so identical runs produce identical files and
readers never observe a half-written report.
"""

from __future__ import annotations

import math
import os
import tempfile


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def atomic_write_text(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_trajectory_csv(path: str, traj):
    """One row per node per snapshot: t,node_index,x[,y],u."""
    two_d = traj.manifold.coords.shape[1] > 1
    header = ["t", "node_index", "x", "y", "u"] if two_d else ["t", "node_index", "x", "u"]
    rows = []
    for t, snap in zip(traj.times, traj.snapshots):
        for i in range(traj.manifold.num_nodes):
            if two_d:
                rows.append((t, i, traj.manifold.coords[i, 0],
                             traj.manifold.coords[i, 1], snap[i]))
            else:
                rows.append((t, i, traj.manifold.coords[i, 0], snap[i]))
    write_csv(path, header, rows)


def write_residual_csv(path: str, series):
    header = ["tag", "t", "min_residual", "argmin_node", "sup_u", "max_grad_f_sq", "K"]
    rows = []
    for k in range(len(series.times)):
        rows.append((series.tag, series.times[k], series.min_residual[k],
                     int(series.argmin_node[k]), series.sup_u[k],
                     series.max_grad_f_sq[k], series.curvature_bound))
    write_csv(path, header, rows)


def write_verdict_csv(path: str, tag: str, verdict, curvature_bound: float,
                      geometry_hash: str):
    header = ["tag", "holds", "worst_t", "worst_node", "worst_residual",
              "tolerance", "K", "geometry_hash",
              "coarse_resolution", "coarse_worst", "refinement_ratio"]
    note = verdict.refinement
    rows = [(tag, verdict.holds, verdict.worst_t, verdict.worst_node,
             verdict.worst_residual, verdict.tolerance, curvature_bound,
             geometry_hash,
             "x".join(str(r) for r in note.coarse_resolution) if note else "",
             note.coarse_worst if note else float("nan"),
             note.ratio if note else float("nan"))]
    write_csv(path, header, rows)


def write_gap_csv(path: str, gap_problem, max_pde_residual: float, resolution):
    header = ["lambda1", "lambda2", "gap", "min_phi_hess_eig",
              "max_pde_residual", "resolution"]
    rows = [(gap_problem.lambda1, gap_problem.lambda2, gap_problem.lam,
             gap_problem.min_phi_hessian_eig, max_pde_residual,
             "x".join(str(r) for r in resolution))]
    write_csv(path, header, rows)


def write_sweep_csv(path: str, report):
    header = ["a", "sup_u0", "seed", "verdict", "worst_residual",
              "first_violation_t", "refinement_class"]
    rows = [(c.a, c.sup_u0, c.seed, c.verdict, c.worst_residual,
             c.first_violation_t, c.refinement_class) for c in report.cells]
    write_csv(path, header, rows)
