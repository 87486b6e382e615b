"""Parameter sweeps probing the log-nonlinear estimate outside its hypotheses.

The proven regime is a <= 0 with sup u(0) < 1.  The sweep runs a grid of
(a, initial condition) cells through the solver and the nonlinear residual
in exploratory mode, then classifies any violation by its behavior under
one refinement doubling: a defect that shrinks is numerical, one that
persists is a candidate counterexample.  No outcome outside the proven
regime is ever asserted; the report is data.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import SolverAbort, ValidationError
from .estimates import auto_tolerance, check_estimate, nonlinear_residual
from .fields import random_smooth_field
from .geometry import GeometrySpec, build_geometry
from .solver import Problem, Schedule, solve

# a violation counts as numerical if refinement shrinks it by at least this
SHRINK_FACTOR = 0.6


@dataclass(frozen=True)
class SweepSpec:
    """Finite (a, sup, seed) grid over one geometry and schedule."""

    geometry: GeometrySpec
    schedule: Schedule
    a_values: tuple
    sup_values: tuple
    seeds: tuple
    tol: object = "auto"

    def __post_init__(self):
        if not self.a_values or not self.sup_values or not self.seeds:
            raise ValidationError("sweep grid must be nonempty")
        object.__setattr__(self, "a_values", tuple(float(a) for a in self.a_values))
        object.__setattr__(self, "sup_values", tuple(float(s) for s in self.sup_values))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def num_cells(self) -> int:
        return len(self.a_values) * len(self.sup_values) * len(self.seeds)


@dataclass(frozen=True)
class SweepCell:
    """Outcome of one (a, initial condition) cell."""

    a: float
    sup_u0: float
    seed: int
    verdict: str            # holds | violated | aborted
    worst_residual: float
    first_violation_t: float
    refinement_class: str   # none | shrinking | persistent | aborted

    @property
    def proven_regime(self) -> bool:
        return self.a <= 0.0 and self.sup_u0 < 1.0


@dataclass(frozen=True)
class SweepReport:
    spec: SweepSpec
    cells: tuple
    tolerance: float
    geometry_hash: str

    @property
    def proven_regime_ok(self) -> bool:
        return all(c.verdict == "holds" for c in self.cells if c.proven_regime)


def _run_cell(manifold, schedule, a, sup, seed, tol):
    u0 = random_smooth_field(manifold, seed, sup)
    problem = Problem.lognonlinear(manifold, a, u0)
    traj = solve(problem, schedule)
    series = nonlinear_residual(traj, exploratory=True)
    verdict = check_estimate(series, tol)
    violated = series.min_residual < -tol
    first_t = float(series.times[np.argmax(violated)]) if violated.any() else float("nan")
    return verdict, first_t


def run_sweep(spec: SweepSpec) -> SweepReport:
    """Evaluate every cell; deterministic for a fixed seed set.

    Solver aborts are recorded per cell, never fatal.  Violated cells are
    re-run once at doubled resolution to classify the defect.
    """
    manifold = build_geometry(spec.geometry)
    h = manifold.max_spacing
    tol = auto_tolerance("nonlinear", h) if spec.tol == "auto" else float(spec.tol)
    fine_manifold = None

    cells = []
    for a, sup, seed in product(spec.a_values, spec.sup_values, spec.seeds):
        try:
            verdict, first_t = _run_cell(manifold, spec.schedule, a, sup, seed, tol)
        except SolverAbort:
            cells.append(SweepCell(a, sup, seed, "aborted", float("nan"),
                                   float("nan"), "aborted"))
            continue
        if verdict.holds:
            cells.append(SweepCell(a, sup, seed, "holds", verdict.worst_residual,
                                   first_t, "none"))
            continue
        if fine_manifold is None:
            fine_manifold = build_geometry(spec.geometry.with_resolution(factor=2))
        fine_tol = (auto_tolerance("nonlinear", fine_manifold.max_spacing)
                    if spec.tol == "auto" else float(spec.tol))
        try:
            fine_verdict, _ = _run_cell(fine_manifold, spec.schedule, a, sup, seed, fine_tol)
        except SolverAbort:
            cells.append(SweepCell(a, sup, seed, "violated", verdict.worst_residual,
                                   first_t, "aborted"))
            continue
        coarse_mag = max(0.0, -verdict.worst_residual)
        fine_mag = max(0.0, -fine_verdict.worst_residual)
        klass = "shrinking" if fine_mag <= SHRINK_FACTOR * coarse_mag else "persistent"
        cells.append(SweepCell(a, sup, seed, "violated", verdict.worst_residual,
                               first_t, klass))
    return SweepReport(spec=spec, cells=tuple(cells), tolerance=tol,
                       geometry_hash=manifold.geometry_hash)
