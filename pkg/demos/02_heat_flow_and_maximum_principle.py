"""Drifting heat flow with an order-preserving scheme.

Runs the drifting equation du/dt = Lap(u) - grad(phi).grad(u) with the
upwind implicit-Euler stepper and shows the discrete maximum principle in
action: the solution range never leaves the initial range.  Also
demonstrates the positivity guard, which aborts with the exact node and
time instead of continuing from a nonpositive state.
"""

import numpy as np

from heatlab import (GeometrySpec, PositivityError, Problem, Schedule,
                     build_geometry, coscomb_field, gaussian_field,
                     random_smooth_field, solve, stable_dt)

TWO_PI = 2.0 * np.pi

m = build_geometry(GeometrySpec("circle", 256, TWO_PI))
phi = coscomb_field(m, 0.0, 1.0, 1.0)          # phi = cos x
u0 = random_smooth_field(m, seed=7, sup=1.0)

prob = Problem.drifting(m, phi, u0)
print("stable explicit step:", stable_dt(m, prob, 1.0))

traj = solve(prob, Schedule(t_end=1.0, dt="auto", scheme="implicit_euler", stride=100))
print("snapshots:", traj.num_snapshots, " dt:", traj.dt)
print("initial range: [%.6f, %.6f]" % (u0.values.min(), u0.values.max()))
print("range over the whole run: [%.6f, %.6f]"
      % (traj.snapshots.min(), traj.snapshots.max()))
print("maximum principle slack: %.2e below, %.2e above"
      % (u0.values.min() - traj.snapshots.min(),
         traj.snapshots.max() - u0.values.max()))

print()
print("== positivity guard ==")
# a tall narrow spike on a tiny background makes the oscillatory
# Crank-Nicolson step at a large dt dip below zero
spiky = gaussian_field(m, 0.999, np.pi, 0.05, baseline=1e-4)
bad = Problem.lognonlinear(m, -5.0, spiky)
try:
    solve(bad, Schedule(t_end=1.0, dt=0.05, scheme="crank_nicolson"))
    print("no abort (unexpected)")
except PositivityError as err:
    print("aborted as designed: %s" % err)
    print("failure node %d at t=%.4f, last good state at t=%.4f"
          % (err.node, err.time, err.last_good_t))
