"""Probing the open question: the bound outside its proven hypotheses.

The gradient bound for the log-nonlinear flow is proven for a <= 0 with
sup u(0) < 1.  Whether some Hamilton-type bound survives without those
assumptions is open, so the sweep treats cells outside the regime as data:
it records the verdict, the worst residual, and whether any violation
persists under refinement (persistent = candidate counterexample,
shrinking = numerical artifact).  Nothing outside the proven regime is
asserted.
"""

import numpy as np

from heatlab import GeometrySpec, Schedule, SweepSpec, run_sweep

spec = SweepSpec(
    geometry=GeometrySpec("circle", 128, 2 * np.pi),
    schedule=Schedule(t_end=1.0, dt="auto", scheme="implicit_euler", stride=25),
    a_values=(-1.0, -0.5, 0.0, 0.5),
    sup_values=(0.5, 0.9, 1.5),
    seeds=(0, 1, 2),
)
report = run_sweep(spec)

print("cells: %d   tolerance: %.4e   geometry: %s"
      % (len(report.cells), report.tolerance, report.geometry_hash))
print("proven-regime cells all hold:", report.proven_regime_ok)
print()
print("%6s %7s %5s  %-9s %13s %8s  %s"
      % ("a", "sup_u0", "seed", "verdict", "worst", "t_viol", "refinement"))
for c in report.cells:
    print("%6.1f %7.2f %5d  %-9s %13.4e %8s  %s"
          % (c.a, c.sup_u0, c.seed, c.verdict, c.worst_residual,
             "-" if np.isnan(c.first_violation_t) else "%.3f" % c.first_violation_t,
             c.refinement_class))

n_regime = sum(c.proven_regime for c in report.cells)
print()
print("summary: %d proven-regime cells (all must hold), %d exploratory cells "
      "(recorded as data)" % (n_regime, len(report.cells) - n_regime))
