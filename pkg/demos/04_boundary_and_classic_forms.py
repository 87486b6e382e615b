"""The Neumann-boundary variant and the classic Hamilton form.

On a box with flat (hence convex) walls and the convex potential
phi = (x^2 + y^2)/2, the curvature bound is K = 0 and the same drift
inequality holds for Neumann solutions.  With K = 0 the estimate can also
be written in the classic form

    t |grad u|^2  <=  (A - u)^2 log(A / (A - u)),   A = sup u,

which needs no normalization; both checkers must agree on such runs.
"""

import numpy as np

from heatlab import (GeometrySpec, Problem, Schedule, auto_tolerance,
                     bakry_emery_bound, build_geometry, check_estimate,
                     classic_residual, drift_residual, random_smooth_field,
                     solve, sqnorm_field)

print("== Neumann box, phi = (x^2 + y^2)/2 ==")
m = build_geometry(GeometrySpec("box2", (128, 128), (np.pi, np.pi)))
phi = sqnorm_field(m)
print("K =", bakry_emery_bound(m, phi), "(identity Hessian, flat Ricci)")

u0 = random_smooth_field(m, seed=1, sup=1.0)
traj = solve(Problem.drifting(m, phi, u0),
             Schedule(t_end=1.0, dt="auto", scheme="implicit_euler", stride=50))
series = drift_residual(traj)
tol = auto_tolerance("drift", m.max_spacing, drift_active=True)
verdict = check_estimate(series, tol)
print("drift verdict holds:", verdict.holds,
      " worst %.3e vs tolerance %.3e" % (verdict.worst_residual, tol))

print()
print("== classic form on the circle (K = 0) ==")
mc = build_geometry(GeometrySpec("circle", 256, 2 * np.pi))
x = mc.coords[:, 0]
u0c = mc.field(0.5 + 0.25 * np.cos(x))        # A = sup u = 0.75
h = mc.max_spacing
trajc = solve(Problem.drifting(mc, mc.constant(0.0), u0c),
              Schedule(t_end=1.0, dt=h * h, scheme="crank_nicolson", stride=100))
classic = classic_residual(trajc)
vc = check_estimate(classic, auto_tolerance("classic", h))
print("classic verdict holds:", vc.holds,
      " worst %.3e" % vc.worst_residual)

# on sup-normalized K=0 runs the two forms must agree
u0n = mc.field(u0c.values / 0.75)
trajn = solve(Problem.drifting(mc, mc.constant(0.0), u0n),
              Schedule(t_end=1.0, dt="auto", scheme="implicit_euler", stride=100))
agree_drift = check_estimate(drift_residual(trajn), 5e-3).holds
agree_classic = check_estimate(classic_residual(trajn), 5e-3).holds
print("normalized run: drift holds =", agree_drift,
      ", classic holds =", agree_classic)
