"""Time integration for the drifting and log-nonlinear heat equations.

Drifting flow:        du/dt = Lap(u) - grad(phi) . grad(u)
Log-nonlinear flow:   du/dt = Lap(u) + a * u * log(u)

The drift is discretized with first-order upwind differences so that the
explicit update matrix (and the implicit system matrix) keep the sign
structure of an M-matrix: the schemes are then order preserving and the
discrete maximum principle holds exactly up to the linear-solve tolerance.
The nonlinear source is always evaluated at the current step.  Solutions
must stay strictly positive; a step that loses positivity aborts with the
offending node and time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BlowupError, PositivityError, ValidationError
from .fields import ScalarField, require_bound
from .geometry import DiscreteManifold, gradient_components

SCHEMES = ("explicit_euler", "implicit_euler", "crank_nicolson")
LINEAR_RESIDUAL_TOL = 1e-12
BLOWUP_CAP = 1e12


@dataclass(frozen=True)
class Problem:
    """Equation kind, geometry, and strictly positive initial data."""

    manifold: DiscreteManifold
    kind: str
    initial: ScalarField
    phi: ScalarField = None
    a: float = None

    def __post_init__(self):
        if self.kind not in ("drifting", "lognonlinear"):
            raise ValidationError("unknown problem kind '%s'" % (self.kind,))
        require_bound(self.manifold, self.initial)
        if np.any(self.initial.values <= 0.0):
            node = int(np.argmin(self.initial.values))
            raise ValidationError(
                "initial data must be strictly positive (node %d is %g)"
                % (node, self.initial.values[node]))
        if self.kind == "drifting":
            if self.phi is None:
                raise ValidationError("drifting problem needs a potential phi")
            require_bound(self.manifold, self.phi)
        else:
            if self.a is None:
                raise ValidationError("lognonlinear problem needs the coefficient a")
            object.__setattr__(self, "a", float(self.a))

    @property
    def geometry(self):
        return self.manifold.spec

    @classmethod
    def drifting(cls, manifold, phi, initial):
        return cls(manifold, "drifting", initial, phi=phi)

    @classmethod
    def lognonlinear(cls, manifold, a, initial):
        return cls(manifold, "lognonlinear", initial, a=a)


@dataclass(frozen=True)
class Schedule:
    """End time, step size (or 'auto'), snapshot stride, and scheme."""

    t_end: float
    dt: object = "auto"
    stride: int = 1
    scheme: str = "crank_nicolson"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValidationError("unknown scheme '%s'" % (self.scheme,))
        if not self.t_end > 0:
            raise ValidationError("t_end must be positive")
        if self.dt != "auto" and not float(self.dt) > 0:
            raise ValidationError("dt must be positive or 'auto'")
        if int(self.stride) < 1:
            raise ValidationError("snapshot stride must be >= 1")
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "stride", int(self.stride))

    def resolve_dt(self, problem: Problem) -> float:
        """'auto' means 0.9-safety stable step (explicit) or h^2 (implicit)."""
        if self.dt != "auto":
            return float(self.dt)
        if self.scheme == "explicit_euler":
            return stable_dt(problem.manifold, problem, 0.9)
        h = problem.manifold.max_spacing
        return h * h


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped solution snapshots plus solver metadata."""

    manifold: DiscreteManifold
    problem: Problem
    times: np.ndarray
    snapshots: np.ndarray = field(repr=False)
    scheme: str = ""
    dt: float = 0.0
    stride: int = 1

    def __post_init__(self):
        self.times.setflags(write=False)
        self.snapshots.setflags(write=False)

    @property
    def geometry_hash(self) -> str:
        return self.manifold.geometry_hash

    @property
    def num_snapshots(self) -> int:
        return len(self.times)

    def snapshot(self, k: int) -> ScalarField:
        return ScalarField(self.manifold, self.snapshots[k])

    @property
    def initial_values(self) -> np.ndarray:
        return self.snapshots[0]


def _drift_coefficients(manifold: DiscreteManifold, phi: ScalarField):
    """Per-axis frame components of grad(phi) used by the upwind drift.

    The normal component is zeroed at wall nodes: Neumann solutions have no
    normal gradient there, and dropping the term keeps the update matrix
    rows summing to zero.
    """
    comps = gradient_components(manifold, phi)
    if manifold.axis_neighbors is None:
        if np.max(np.abs(comps)) > 1e-13:
            raise ValidationError(
                "drifting problems on sphere2 support constant potentials only")
        return None
    if manifold.kind in ("interval", "box2"):
        n = manifold.num_nodes
        idx = np.arange(n)
        if manifold.dim == 1:
            wall = manifold.is_boundary
            comps[0] = np.where(wall, 0.0, comps[0])
        else:
            nx, ny = manifold.grid_shape
            ix, iy = idx // ny, idx % ny
            comps[0] = np.where((ix == 0) | (ix == nx - 1), 0.0, comps[0])
            comps[1] = np.where((iy == 0) | (iy == ny - 1), 0.0, comps[1])
    return [comps[a] for a in range(manifold.dim)]


def _drift_matrix(manifold: DiscreteManifold, b_list) -> sp.csr_matrix:
    """Upwind discretization of -grad(phi) . grad(u) as a sparse matrix."""
    n = manifold.num_nodes
    rows, cols, vals = [], [], []
    idx = np.arange(n)
    for axis, b in enumerate(b_list):
        h = manifold.axis_spacing[axis]
        plus, minus = manifold.axis_neighbors[axis]
        pos = b > 0
        neg = b < 0
        # b > 0: -b (u_i - u_{i-}) / h ; b < 0: -b (u_{i+} - u_i) / h
        rows.extend(idx[pos]); cols.extend(minus[pos]); vals.extend(b[pos] / h)
        rows.extend(idx[pos]); cols.extend(idx[pos]); vals.extend(-b[pos] / h)
        rows.extend(idx[neg]); cols.extend(plus[neg]); vals.extend(-b[neg] / h)
        rows.extend(idx[neg]); cols.extend(idx[neg]); vals.extend(b[neg] / h)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def stable_dt(manifold: DiscreteManifold, problem: Problem, safety: float = 1.0) -> float:
    """Largest explicit step keeping the update matrix order preserving.

    Equals safety / max_i (outgoing conductance per unit volume + upwind
    drift coefficient) -- the diagonal of the explicit update stays
    nonnegative up to exactly this step.
    """
    if not 0.0 < safety <= 1.0:
        raise ValidationError("safety factor must be in (0, 1]")
    row_rate = np.asarray(manifold.weights.sum(axis=1)).ravel() / manifold.volumes
    if problem.kind == "drifting":
        b_list = _drift_coefficients(manifold, problem.phi)
        if b_list is not None:
            for axis, b in enumerate(b_list):
                row_rate = row_rate + np.abs(b) / manifold.axis_spacing[axis]
    return float(safety / row_rate.max())


class _Stepper:
    """One factorized time step; reused across a whole solve."""

    def __init__(self, problem: Problem, dt: float, scheme: str):
        self.problem = problem
        self.dt = float(dt)
        self.scheme = scheme
        m = problem.manifold
        A = m.laplacian
        if problem.kind == "drifting":
            b_list = _drift_coefficients(m, problem.phi)
            if b_list is not None:
                A = (A + _drift_matrix(m, b_list)).tocsr()
        self.A = A
        n = m.num_nodes
        if scheme == "implicit_euler":
            self.M = (sp.identity(n, format="csr") - dt * A).tocsc()
            self.lu = spla.splu(self.M)
        elif scheme == "crank_nicolson":
            self.M = (sp.identity(n, format="csr") - 0.5 * dt * A).tocsc()
            self.E = (sp.identity(n, format="csr") + 0.5 * dt * A).tocsr()
            self.lu = spla.splu(self.M)
        else:
            self.M = None

    def _source(self, u):
        if self.problem.kind == "lognonlinear":
            return self.problem.a * u * np.log(u)
        return 0.0

    def _solve_linear(self, rhs):
        x = self.lu.solve(rhs)
        scale = max(np.max(np.abs(rhs)), 1.0)
        resid = self.M @ x - rhs
        if np.max(np.abs(resid)) > LINEAR_RESIDUAL_TOL * scale:
            x = x + self.lu.solve(-resid)
        return x

    def advance(self, t, u):
        dt = self.dt
        src = self._source(u)
        if self.scheme == "explicit_euler":
            u_next = u + dt * (self.A @ u) + dt * src
        elif self.scheme == "implicit_euler":
            u_next = self._solve_linear(u + dt * src)
        else:
            u_next = self._solve_linear(self.E @ u + dt * src)
        t_next = t + dt
        if np.any(u_next <= 0.0) or not np.all(np.isfinite(u_next)):
            bad = np.where(~np.isfinite(u_next), -np.inf, u_next)
            node = int(np.argmin(bad))
            raise PositivityError(
                "solution lost positivity at node %d, t=%.6g (value %g)"
                % (node, t_next, u_next[node]), node, t_next, t)
        if self.problem.kind == "lognonlinear" and u_next.max() > BLOWUP_CAP:
            node = int(np.argmax(u_next))
            raise BlowupError(
                "solution exceeded the blow-up cap %g at node %d, t=%.6g"
                % (BLOWUP_CAP, node, t_next), node, t_next, t)
        return t_next, u_next


def step(state, problem: Problem, dt: float, scheme: str = "implicit_euler"):
    """Advance one step from state = (t, u); u may be a ScalarField or array.

    For the explicit scheme dt must not exceed stable_dt.  Raises
    PositivityError / BlowupError with the offending node and time.
    """
    t, u = state
    u_vals = u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)
    if scheme not in SCHEMES:
        raise ValidationError("unknown scheme '%s'" % (scheme,))
    if not dt > 0:
        raise ValidationError("dt must be positive")
    if np.any(u_vals <= 0):
        raise ValidationError("state must be strictly positive")
    if scheme == "explicit_euler":
        limit = stable_dt(problem.manifold, problem, 1.0)
        if dt > limit * (1.0 + 1e-12):
            raise ValidationError(
                "explicit step dt=%g exceeds stable_dt=%g" % (dt, limit))
    stepper = _Stepper(problem, dt, scheme)
    t_next, u_next = stepper.advance(float(t), u_vals)
    return t_next, ScalarField(problem.manifold, u_next)


def solve(problem: Problem, schedule: Schedule) -> Trajectory:
    """Integrate to t_end, storing every stride-th snapshot plus the final one.

    Deterministic for fixed inputs.  Solver aborts carry the last good
    snapshot time in the raised error.
    """
    m = problem.manifold
    dt = schedule.resolve_dt(problem)
    if schedule.scheme == "explicit_euler":
        limit = stable_dt(m, problem, 1.0)
        if dt > limit * (1.0 + 1e-12):
            raise ValidationError(
                "explicit step dt=%g exceeds stable_dt=%g" % (dt, limit))
    n_steps = int(np.ceil(schedule.t_end / dt - 1e-12))
    n_steps = max(n_steps, 1)
    dt_last = schedule.t_end - (n_steps - 1) * dt

    stepper = _Stepper(problem, dt, schedule.scheme)
    last_stepper = stepper
    if abs(dt_last - dt) > 1e-14 * dt:
        last_stepper = _Stepper(problem, dt_last, schedule.scheme)

    u = problem.initial.values.copy()
    t = 0.0
    times = [0.0]
    snaps = [u.copy()]
    for k in range(1, n_steps + 1):
        active = last_stepper if k == n_steps else stepper
        t, u = active.advance(t, u)
        if k == n_steps:
            t = schedule.t_end
        if k % schedule.stride == 0 or k == n_steps:
            times.append(t)
            snaps.append(u.copy())
    return Trajectory(
        manifold=m, problem=problem,
        times=np.array(times), snapshots=np.array(snaps),
        scheme=schedule.scheme, dt=dt, stride=schedule.stride)
