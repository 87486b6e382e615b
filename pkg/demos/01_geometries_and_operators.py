"""Tour of the built-in geometries and their calibrated operators.

Builds each geometry, checks the volume normalization, and measures the
accuracy of the Laplace-Beltrami operator on fields with known closed-form
images, including the refinement behavior that all verification tolerances
lean on.
"""

import numpy as np

from heatlab import (GeometrySpec, build_geometry, gradient_norm_sq, hessian,
                     laplace_beltrami)

TWO_PI = 2.0 * np.pi

print("== volumes ==")
for spec, target in [
        (GeometrySpec("circle", 256, TWO_PI), TWO_PI),
        (GeometrySpec("torus2", (64, 64), (TWO_PI, TWO_PI)), 4 * np.pi**2),
        (GeometrySpec("interval", 128, np.pi), np.pi),
        (GeometrySpec("box2", (64, 64), (np.pi, np.pi)), np.pi**2),
        (GeometrySpec("sphere2", (64, 128), 1.0), 4 * np.pi)]:
    m = build_geometry(spec)
    total = m.volumes.sum()
    print("%-8s N=%6d  vol=%.6f  target=%.6f  rel err=%.2e"
          % (spec.kind, m.num_nodes, total, target, abs(total - target) / target))

print()
print("== Laplacian accuracy on cos x (circle) ==")
for n in (64, 128, 256, 512):
    m = build_geometry(GeometrySpec("circle", n, TWO_PI))
    x = m.coords[:, 0]
    err = np.max(np.abs(laplace_beltrami(m, m.field(np.cos(x))).values + np.cos(x)))
    print("n=%4d  L_inf error %.3e   (h^2 = %.3e)" % (n, err, (TWO_PI / n) ** 2))

print()
print("== sphere: l=1 spherical harmonic, eigenvalue 2 ==")
for n in (32, 64):
    m = build_geometry(GeometrySpec("sphere2", (n, 2 * n), 1.0))
    th = m.coords[:, 0]
    err = np.max(np.abs(laplace_beltrami(m, m.field(np.cos(th))).values
                        + 2 * np.cos(th)))
    print("grid %dx%d  L_inf error %.3e" % (n, 2 * n, err))

print()
print("== gradient and Hessian on the interval ==")
m = build_geometry(GeometrySpec("interval", 128, np.pi))
x = m.coords[:, 0]
g2 = gradient_norm_sq(m, m.field(x))
H = hessian(m, m.field(0.5 * x * x))
print("grad of x: interior max dev from 1 = %.2e" % np.max(np.abs(g2.values[1:-1] - 1)))
print("hess of x^2/2: interior max dev from 1 = %.2e"
      % np.max(np.abs(H.values[1:-1, 0, 0] - 1)))
print()
print("Both are exact for polynomials of the stencil's order, as expected.")
