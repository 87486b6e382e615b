import numpy as np
import pytest

from heatlab import (
    GeometryError,
    GeometrySpec,
    ValidationError,
    bakry_emery_bound,
    build_geometry,
    coscomb_field,
    directional_drift,
    gradient_norm_sq,
    hessian,
    laplace_beltrami,
    sqnorm_field,
    tabulated_field,
    tensor_min_eigenvalues,
)

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# GeometrySpec validation


def test_spec_rejects_low_resolution():
    with pytest.raises(GeometryError):
        GeometrySpec("circle", 7, TWO_PI)


def test_spec_rejects_nonpositive_extent():
    with pytest.raises(GeometryError):
        GeometrySpec("interval", 64, 0.0)
    with pytest.raises(GeometryError):
        GeometrySpec("circle", 64, -1.0)


def test_spec_rejects_inconsistent_boundary():
    with pytest.raises(GeometryError):
        GeometrySpec("circle", 64, TWO_PI, boundary="neumann")
    with pytest.raises(GeometryError):
        GeometrySpec("interval", 64, np.pi, boundary="none")
    # the consistent flags are accepted
    GeometrySpec("circle", 64, TWO_PI, boundary="none")
    GeometrySpec("box2", (16, 16), (1.0, 1.0), boundary="neumann")


def test_spec_rejects_unknown_kind():
    with pytest.raises(GeometryError):
        GeometrySpec("klein_bottle", 64, 1.0)


# ---------------------------------------------------------------------------
# build_geometry examples


def test_circle_build(circle256):
    m = circle256
    assert m.num_nodes == 256
    for i in (0, 17, 255):
        assert len(m.stencil(i)) == 2
    total = m.volumes.sum()
    assert 0.99 * TWO_PI <= total <= 1.01 * TWO_PI
    # uniform grid: h * N equals the circumference exactly
    assert total == pytest.approx(TWO_PI, rel=1e-14)


def test_interval_build(interval128):
    m = interval128
    assert m.num_nodes == 128
    assert set(m.boundary_nodes.tolist()) == {0, 127}
    assert m.boundary_convex
    assert m.volumes.sum() == pytest.approx(np.pi, rel=1e-14)


def test_torus_and_box_volume(torus64, box64):
    assert torus64.volumes.sum() == pytest.approx(4.0 * np.pi**2, rel=1e-13)
    assert box64.volumes.sum() == pytest.approx(np.pi**2, rel=1e-13)


def test_sphere_volume_against_quadrature_oracle(sphere64):
    # independent oracle: area = int_0^pi 2 pi r^2 sin(theta) dtheta by quadrature
    theta = np.linspace(0.0, np.pi, 20001)
    oracle = np.trapezoid(2.0 * np.pi * np.sin(theta), theta)
    total = sphere64.volumes.sum()
    assert abs(total - oracle) <= 0.01 * oracle


def test_weights_positive_and_symmetric_everywhere(circle256, interval128, torus64,
                                                   box64, sphere64):
    for m in (circle256, interval128, torus64, box64, sphere64):
        assert m.volumes.min() > 0
        assert m.weights.data.min() > 0
        asym = m.weights - m.weights.T
        assert asym.nnz == 0 or np.max(np.abs(asym.data)) == 0.0
        # stencil symmetry spot check
        for i in (0, m.num_nodes // 2, m.num_nodes - 1):
            for j in m.stencil(i):
                assert i in m.stencil(j)


# ---------------------------------------------------------------------------
# laplace_beltrami


def test_laplacian_kills_constants_on_every_geometry(circle256, interval128, torus64,
                                                     box64, sphere64):
    for m in (circle256, interval128, torus64, box64, sphere64):
        out = laplace_beltrami(m, m.constant(3.0))
        assert np.max(np.abs(out.values)) <= 1e-12


def test_laplacian_circle_cos_with_refinement_ratio():
    errs = {}
    for n in (128, 256):
        m = build_geometry(GeometrySpec("circle", n, TWO_PI))
        x = m.coords[:, 0]
        out = laplace_beltrami(m, m.field(np.cos(x)))
        errs[n] = np.max(np.abs(out.values + np.cos(x)))
        h = TWO_PI / n
        assert errs[n] <= 0.2 * h * h
    assert 3.0 <= errs[128] / errs[256] <= 5.0


def test_laplacian_sphere_spherical_harmonic(sphere64):
    # l=1 harmonic cos(theta): eigenvalue l(l+1) = 2 on the unit sphere
    th = sphere64.coords[:, 0]
    out = laplace_beltrami(sphere64, sphere64.field(np.cos(th)))
    assert np.max(np.abs(out.values + 2.0 * np.cos(th))) <= 5e-2


def test_laplacian_sphere_sectoral_harmonic(sphere64):
    # l=2, m=2 harmonic sin^2(theta) cos(2 phi): eigenvalue 6
    th, ph = sphere64.coords[:, 0], sphere64.coords[:, 1]
    f = np.sin(th) ** 2 * np.cos(2 * ph)
    out = laplace_beltrami(sphere64, sphere64.field(f))
    assert np.max(np.abs(out.values + 6.0 * f)) <= 5e-2


def test_field_manifold_mismatch_rejected(circle256, circle128):
    from heatlab import FieldMismatchError

    f = circle128.constant(1.0)
    with pytest.raises(FieldMismatchError):
        laplace_beltrami(circle256, f)


# ---------------------------------------------------------------------------
# gradient_norm_sq


def test_gradient_constant_is_zero(torus64):
    out = gradient_norm_sq(torus64, torus64.constant(4.2))
    assert np.max(np.abs(out.values)) == 0.0


def test_gradient_circle_cos():
    errs = {}
    for n in (128, 256):
        m = build_geometry(GeometrySpec("circle", n, TWO_PI))
        x = m.coords[:, 0]
        out = gradient_norm_sq(m, m.field(np.cos(x)))
        errs[n] = np.max(np.abs(out.values - np.sin(x) ** 2))
        assert errs[n] <= 2.0 * (TWO_PI / n) ** 2
    assert 3.0 <= errs[128] / errs[256] <= 5.0


def test_gradient_interval_linear_exact(interval128):
    x = interval128.coords[:, 0]
    out = gradient_norm_sq(interval128, interval128.field(x))
    assert np.max(np.abs(out.values[1:-1] - 1.0)) <= 1e-10


# ---------------------------------------------------------------------------
# hessian


def test_hessian_constant_zero(sphere64):
    H = hessian(sphere64, sphere64.constant(1.5))
    assert np.max(np.abs(H.values)) <= 1e-12


def test_hessian_circle_cos():
    errs = {}
    for n in (128, 256):
        m = build_geometry(GeometrySpec("circle", n, TWO_PI))
        x = m.coords[:, 0]
        H = hessian(m, m.field(np.cos(x)))
        errs[n] = np.max(np.abs(H.values[:, 0, 0] + np.cos(x)))
    assert 3.0 <= errs[128] / errs[256] <= 5.0


def test_hessian_interval_quadratic_exact(interval128):
    x = interval128.coords[:, 0]
    H = hessian(interval128, interval128.field(0.5 * x * x))
    assert np.max(np.abs(H.values[1:-1, 0, 0] - 1.0)) <= 1e-10


def test_hessian_symmetry_exact(torus64):
    X, Y = torus64.coords[:, 0], torus64.coords[:, 1]
    H = hessian(torus64, torus64.field(np.cos(X) * np.sin(Y)))
    assert np.array_equal(H.values[:, 0, 1], H.values[:, 1, 0])


def test_hessian_torus_cross_term(torus64):
    X, Y = torus64.coords[:, 0], torus64.coords[:, 1]
    H = hessian(torus64, torus64.field(np.cos(X) * np.cos(Y)))
    assert np.max(np.abs(H.values[:, 0, 1] - np.sin(X) * np.sin(Y))) <= 5e-3


def test_hessian_sphere_radial_harmonic(sphere64):
    # Hess of cos(theta) on the unit sphere is -cos(theta) * identity
    th = sphere64.coords[:, 0]
    H = hessian(sphere64, sphere64.field(np.cos(th)))
    target = -np.cos(th)
    assert np.max(np.abs(H.values[:, 0, 0] - target)) <= 5e-2
    assert np.max(np.abs(H.values[:, 1, 1] - target)) <= 5e-2
    assert np.max(np.abs(H.values[:, 0, 1])) <= 5e-2


# ---------------------------------------------------------------------------
# directional_drift


def test_drift_constant_potential_zero(circle256):
    u = circle256.field(np.sin(circle256.coords[:, 0]))
    out = directional_drift(circle256, circle256.constant(2.0), u)
    assert np.max(np.abs(out.values)) == 0.0


def test_drift_non_periodic_tabulated_potential_rejected(circle256):
    xs = np.linspace(0.0, TWO_PI, 257)
    with pytest.raises(ValidationError):
        tabulated_field(circle256, xs, xs)  # phi = x does not close up


def test_drift_circle_product_of_closed_forms():
    errs = {}
    for n in (128, 256):
        m = build_geometry(GeometrySpec("circle", n, TWO_PI))
        x = m.coords[:, 0]
        out = directional_drift(m, m.field(np.cos(x)), m.field(np.sin(x)))
        errs[n] = np.max(np.abs(out.values + np.sin(x) * np.cos(x)))
        assert errs[n] <= 2.0 * (TWO_PI / n) ** 2
    assert 3.0 <= errs[128] / errs[256] <= 5.0


# ---------------------------------------------------------------------------
# bakry_emery_bound


def test_bakry_emery_flat_zero_potential(circle256, torus64):
    for m in (circle256, torus64):
        assert bakry_emery_bound(m, m.constant(0.0)) == 0.0


def test_bakry_emery_circle_cosine(circle256):
    phi = coscomb_field(circle256, 0.0, 1.0, 1.0)
    K = bakry_emery_bound(circle256, phi)
    assert abs(K - 1.0) <= 1e-3
    # the extremum sits where phi'' = -1, i.e. near x = 0
    eigs = tensor_min_eigenvalues(hessian(circle256, phi)) + circle256.ricci_min
    node = int(np.argmin(eigs))
    x = circle256.coords[node, 0]
    assert min(x, TWO_PI - x) <= 3 * TWO_PI / 256


def test_bakry_emery_sphere_positive_curvature(sphere64):
    assert bakry_emery_bound(sphere64, sphere64.constant(0.0)) == 0.0


def test_bakry_emery_zero_for_convex_potentials(interval128, box64):
    rng = np.random.default_rng(7)
    x = interval128.coords[:, 0]
    for _ in range(5):
        c = rng.uniform(0.1, 4.0)
        x0 = rng.uniform(0.0, np.pi)
        phi = interval128.field(0.5 * c * (x - x0) ** 2)
        assert bakry_emery_bound(interval128, phi) == 0.0
    X, Y = box64.coords[:, 0], box64.coords[:, 1]
    for _ in range(5):
        g = rng.normal(size=(2, 2))
        A = g @ g.T + 0.05 * np.eye(2)  # SPD
        quad = 0.5 * (A[0, 0] * X * X + 2 * A[0, 1] * X * Y + A[1, 1] * Y * Y)
        assert bakry_emery_bound(box64, box64.field(quad)) == 0.0


# ---------------------------------------------------------------------------
# module invariants


def test_integration_by_parts_on_closed_geometries(circle256, torus64, sphere64):
    rng = np.random.default_rng(11)
    for m in (circle256, torus64, sphere64):
        for _ in range(3):
            f = rng.normal(size=m.num_nodes)
            g = rng.normal(size=m.num_nodes)
            lf = laplace_beltrami(m, m.field(f)).values
            lg = laplace_beltrami(m, m.field(g)).values
            s1 = np.sum(m.volumes * lf * g)
            s2 = np.sum(m.volumes * lg * f)
            norm = np.linalg.norm(f) * np.linalg.norm(g)
            assert abs(s1 - s2) <= 1e-10 * norm


def test_refinement_order_all_operator_families():
    def op_errors(spec_fn, exact_fn, apply_fn, resolutions):
        errs = []
        for n in resolutions:
            m = build_geometry(spec_fn(n))
            approx, exact = apply_fn(m), exact_fn(m)
            errs.append(np.max(np.abs(approx - exact)))
        return errs

    # interval with a Neumann-compatible test field cos(x)
    for apply_fn, exact_fn in (
        (lambda m: laplace_beltrami(m, m.field(np.cos(m.coords[:, 0]))).values,
         lambda m: -np.cos(m.coords[:, 0])),
        (lambda m: gradient_norm_sq(m, m.field(np.cos(m.coords[:, 0]))).values,
         lambda m: np.sin(m.coords[:, 0]) ** 2),
        (lambda m: hessian(m, m.field(np.cos(m.coords[:, 0]))).values[:, 0, 0],
         lambda m: -np.cos(m.coords[:, 0])),
    ):
        errs = op_errors(lambda n: GeometrySpec("interval", n, np.pi),
                         exact_fn, apply_fn, (64, 128))
        assert 3.0 <= errs[0] / errs[1] <= 5.0

    # torus Laplacian
    def torus_apply(m):
        X, Y = m.coords[:, 0], m.coords[:, 1]
        return laplace_beltrami(m, m.field(np.cos(X) * np.cos(Y))).values

    errs = op_errors(lambda n: GeometrySpec("torus2", (n, n), (TWO_PI, TWO_PI)),
                     lambda m: -2 * np.cos(m.coords[:, 0]) * np.cos(m.coords[:, 1]),
                     torus_apply, (32, 64))
    assert 3.0 <= errs[0] / errs[1] <= 5.0

    # sphere Laplacian and gradient on the l=1 harmonic
    errs = op_errors(lambda n: GeometrySpec("sphere2", (n, 2 * n), 1.0),
                     lambda m: -2 * np.cos(m.coords[:, 0]),
                     lambda m: laplace_beltrami(m, m.field(np.cos(m.coords[:, 0]))).values,
                     (32, 64))
    assert 3.0 <= errs[0] / errs[1] <= 5.0


def test_sqnorm_rejected_on_closed_geometries(circle256):
    with pytest.raises(ValidationError):
        sqnorm_field(circle256)
