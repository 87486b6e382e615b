"""Pointwise residuals of the Hamilton-type gradient inequalities.

For a positive solution u with f = -log u, the checkable forms are

    drift:      (2Kt + 1) f - t |grad f|^2   >= 0      (sup u(0) = 1)
    classic:    (A-u)^2 log(A/(A-u)) - t |grad u|^2 >= 0   (K = 0)
    nonlinear:  f - t |grad f|^2             >= 0      (a <= 0, sup u(0) < 1)

Each checker walks a trajectory, records the per-snapshot minimum of the
residual and where it occurs, and a tolerance-aware verdict decides whether
the inequality held.  Discretely the inequalities can dip negative by pure
discretization error, so tolerances scale with the grid spacing and every
CLI verdict carries a refinement note that separates genuine violations
(resolution independent) from numerical slack (shrinking under refinement).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import EstimateInputError, ValidationError
from .fields import ScalarField
from .geometry import bakry_emery_bound, gradient_components
from .solver import Trajectory

DEFAULT_FLOOR = 1e-12
NORMALIZATION_TOL = 1e-9


class FloorWarning(RuntimeWarning):
    """Raised as a warning when the positivity floor truncates a field."""


def neg_log(u: ScalarField, floor: float = DEFAULT_FLOOR) -> ScalarField:
    """f = -log(max(u, floor)) nodewise; warns if the floor activates."""
    if not floor > 0:
        raise ValidationError("floor must be positive")
    vals = u.values
    if np.any(vals < floor):
        warnings.warn(
            "neg_log floor %g activated at %d node(s)" % (floor, int(np.sum(vals < floor))),
            FloorWarning, stacklevel=2)
        vals = np.maximum(vals, floor)
    # + 0.0 normalizes IEEE -0.0 at nodes where u == 1
    return ScalarField(u.manifold, -np.log(vals) + 0.0)


@dataclass(frozen=True)
class ResidualSeries:
    """Per-snapshot minimum of an estimate residual along one trajectory."""

    tag: str
    times: np.ndarray
    min_residual: np.ndarray
    argmin_node: np.ndarray
    sup_u: np.ndarray
    max_grad_f_sq: np.ndarray
    curvature_bound: float
    geometry_hash: str
    sup_below_one: np.ndarray = None
    exploratory: bool = False

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValidationError("residual series times must be strictly increasing")
        for arr in (self.times, self.min_residual, self.argmin_node,
                    self.sup_u, self.max_grad_f_sq):
            arr.setflags(write=False)

    @property
    def worst(self):
        """(t, node, value) of the most negative per-snapshot minimum."""
        k = int(np.argmin(self.min_residual))
        return float(self.times[k]), int(self.argmin_node[k]), float(self.min_residual[k])


@dataclass(frozen=True)
class RefinementNote:
    """Worst residuals of the same scenario at two resolutions."""

    coarse_resolution: tuple
    coarse_worst: float
    fine_resolution: tuple
    fine_worst: float

    @property
    def ratio(self) -> float:
        """|coarse| / |fine|; > 1 means the defect shrinks under refinement."""
        if self.fine_worst >= 0 and self.coarse_worst >= 0:
            return float("inf")
        denom = abs(min(self.fine_worst, 0.0))
        if denom == 0.0:
            return float("inf")
        return abs(min(self.coarse_worst, 0.0)) / denom


@dataclass(frozen=True)
class Verdict:
    """Tolerance decision for a residual series."""

    holds: bool
    worst_t: float
    worst_node: int
    worst_residual: float
    tolerance: float
    refinement: RefinementNote = None

    def with_refinement(self, note: RefinementNote) -> "Verdict":
        return replace(self, refinement=note)


def auto_tolerance(tag: str, h: float, drift_active: bool = False) -> float:
    """Resolution-scaled tolerance policy.

    Centered operators leave O(h^2) slack; the upwind drift term is O(h),
    so drift checks with a nonconstant potential get the linear budget.
    """
    if tag == "drift" and drift_active:
        return 0.5 * h
    return 5.0 * h * h


def _series_stats(manifold, tag, times, residual_fields, sup_u, max_gf2, K,
                  sup_below_one=None, exploratory=False) -> ResidualSeries:
    mins = np.array([r.min() for r in residual_fields])
    argmins = np.array([int(np.argmin(r)) for r in residual_fields])
    return ResidualSeries(
        tag=tag, times=np.asarray(times, dtype=float),
        min_residual=mins, argmin_node=argmins,
        sup_u=np.asarray(sup_u, dtype=float),
        max_grad_f_sq=np.asarray(max_gf2, dtype=float),
        curvature_bound=float(K), geometry_hash=manifold.geometry_hash,
        sup_below_one=None if sup_below_one is None else np.asarray(sup_below_one, dtype=bool),
        exploratory=exploratory)


def drift_residual(traj: Trajectory, phi: ScalarField = None) -> ResidualSeries:
    """Residual (2Kt+1) f - t |grad f|^2 with K from the curvature bound.

    Requires a drifting trajectory normalized to sup u(0) = 1 (validated,
    never silently rescaled: rescaling changes f nonlinearly).
    """
    if traj.problem.kind != "drifting":
        raise EstimateInputError("drift residual needs a drifting trajectory")
    m = traj.manifold
    if phi is None:
        phi = traj.problem.phi
    sup0 = float(traj.initial_values.max())
    if abs(sup0 - 1.0) > NORMALIZATION_TOL:
        raise EstimateInputError(
            "drift residual requires sup u(0) = 1 (got %.12g); "
            "normalize the initial data" % sup0)
    K = bakry_emery_bound(m, phi)
    residuals, sups, gf2max = [], [], []
    for t, u in zip(traj.times, traj.snapshots):
        f = neg_log(ScalarField(m, u))
        gf = gradient_components(m, f)
        gf2 = np.sum(gf * gf, axis=0)
        residuals.append((2.0 * K * t + 1.0) * f.values - t * gf2)
        sups.append(u.max())
        gf2max.append(gf2.max())
    return _series_stats(m, "drift", traj.times, residuals, sups, gf2max, K)


def classic_residual(traj: Trajectory, floor: float = DEFAULT_FLOOR) -> ResidualSeries:
    """Residual (A-u)^2 log(A/(A-u)) - t |grad u|^2 for K = 0 runs.

    A is the trajectory supremum plus a small slack so A - u stays
    positive; where A - u falls below the floor the first term is its
    limit, zero, and |grad u| is left to the verdict tolerance.
    """
    if traj.problem.kind != "drifting":
        raise EstimateInputError("classic residual needs a drifting trajectory")
    m = traj.manifold
    K = bakry_emery_bound(m, traj.problem.phi)
    if K > 0.0:
        raise EstimateInputError(
            "classic residual requires K = 0; this potential/geometry has K = %.6g" % K)
    A = float(traj.snapshots.max()) + 1e-12
    residuals, sups, gf2max = [], [], []
    for t, u in zip(traj.times, traj.snapshots):
        gu = gradient_components(m, ScalarField(m, u))
        gu2 = np.sum(gu * gu, axis=0)
        gap = A - u
        first = np.where(gap > floor, gap**2 * np.log(A / np.maximum(gap, floor)), 0.0)
        residuals.append(first - t * gu2)
        sups.append(u.max())
        gf2max.append(gu2.max())
    return _series_stats(m, "classic", traj.times, residuals, sups, gf2max, 0.0)


def nonlinear_residual(traj: Trajectory, exploratory: bool = False) -> ResidualSeries:
    """Residual f - t |grad f|^2 for the log-nonlinear flow.

    Outside exploration mode the proven hypotheses a <= 0 and sup u(0) < 1
    are enforced; the series also records whether sup u < 1 held at each
    snapshot.
    """
    if traj.problem.kind != "lognonlinear":
        raise EstimateInputError("nonlinear residual needs a log-nonlinear trajectory")
    m = traj.manifold
    a = traj.problem.a
    sup0 = float(traj.initial_values.max())
    if not exploratory:
        if a > 0:
            raise EstimateInputError(
                "nonlinear residual requires a <= 0 (got a=%g); "
                "use exploratory mode to relax" % a)
        if sup0 >= 1.0:
            raise EstimateInputError(
                "nonlinear residual requires sup u(0) < 1 (got %.12g); "
                "use exploratory mode to relax" % sup0)
    residuals, sups, gf2max, below = [], [], [], []
    for t, u in zip(traj.times, traj.snapshots):
        f = neg_log(ScalarField(m, u))
        gf = gradient_components(m, f)
        gf2 = np.sum(gf * gf, axis=0)
        residuals.append(f.values - t * gf2)
        sups.append(u.max())
        gf2max.append(gf2.max())
        below.append(u.max() < 1.0)
    return _series_stats(m, "nonlinear", traj.times, residuals, sups, gf2max, 0.0,
                         sup_below_one=below, exploratory=exploratory)


def check_estimate(series: ResidualSeries, tol: float) -> Verdict:
    """Holds iff every per-snapshot minimum is >= -tol; reports the worst."""
    if tol < 0:
        raise ValidationError("tolerance must be nonnegative")
    t, node, value = series.worst
    return Verdict(holds=bool(value >= -tol), worst_t=t, worst_node=node,
                   worst_residual=value, tolerance=float(tol))
