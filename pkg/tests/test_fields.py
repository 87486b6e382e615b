import numpy as np
import pytest

from heatlab import (
    FieldMismatchError,
    ScalarField,
    TensorField,
    ValidationError,
    coscomb_field,
    gaussian_field,
    parse_field_text,
    random_smooth_field,
    tabulated_field,
)
from heatlab.geometry import GeometrySpec, build_geometry

TWO_PI = 2.0 * np.pi


def test_scalar_field_validation(circle64):
    with pytest.raises(FieldMismatchError):
        ScalarField(circle64, np.ones(63))
    with pytest.raises(ValidationError):
        ScalarField(circle64, np.full(64, np.nan))
    f = ScalarField(circle64, np.ones(64))
    with pytest.raises(ValueError):
        f.values[0] = 2.0  # immutable


def test_tensor_field_symmetry_enforced(circle64):
    vals = np.zeros((64, 1, 1))
    TensorField(circle64, vals)
    m = build_geometry(GeometrySpec("torus2", (8, 8), (TWO_PI, TWO_PI)))
    bad = np.zeros((64, 2, 2))
    bad[:, 0, 1] = 1.0
    with pytest.raises(ValidationError):
        TensorField(m, bad)


def test_coscomb_rejects_non_periodic_wavenumber(circle64):
    with pytest.raises(ValidationError):
        coscomb_field(circle64, 0.0, 1.0, 0.5)
    # integer wavenumbers fit the 2*pi circle
    f = coscomb_field(circle64, 0.5, 0.25, 1.0)
    assert f.values == pytest.approx(0.5 + 0.25 * np.cos(circle64.coords[:, 0]))


def test_coscomb_allowed_on_interval(interval128):
    # bounded domains impose no periodicity constraint
    f = coscomb_field(interval128, 1.0, 0.3, 0.5)
    assert np.all(np.isfinite(f.values))


def test_gaussian_baseline_and_wrap(circle64):
    f = gaussian_field(circle64, 0.5, np.pi, 0.3, baseline=0.1)
    assert f.values.min() >= 0.1
    assert f.values.max() == pytest.approx(0.6, abs=1e-6)
    # periodic wrap: the profile is symmetric about the center
    v = f.values
    assert v[1] == pytest.approx(v[-1], rel=1e-12)


def test_random_smooth_field_hits_sup_exactly(circle64, box64):
    for m in (circle64, box64):
        f = random_smooth_field(m, seed=3, sup=1.0)
        assert f.values.max() == pytest.approx(1.0, abs=1e-12)
        assert f.values.min() > 0.0


def test_random_smooth_field_deterministic_and_resolution_consistent():
    a = random_smooth_field(build_geometry(GeometrySpec("circle", 64, TWO_PI)), 5, 0.9)
    b = random_smooth_field(build_geometry(GeometrySpec("circle", 64, TWO_PI)), 5, 0.9)
    assert np.array_equal(a.values, b.values)
    # same seed at doubled resolution describes the same smooth profile, up
    # to the per-grid sup normalization (an O(h^2) scale drift)
    fine = random_smooth_field(build_geometry(GeometrySpec("circle", 128, TWO_PI)), 5, 0.9)
    assert np.max(np.abs(fine.values[::2] - a.values)) <= 5e-3


def test_tabulated_field_interpolates_on_interval(interval128):
    xs = np.linspace(0.0, np.pi, 50)
    f = tabulated_field(interval128, xs, np.sin(xs))
    x = interval128.coords[:, 0]
    assert np.max(np.abs(f.values - np.sin(x))) <= 2e-3


def test_tabulated_field_periodicity_gate(circle64):
    xs = np.linspace(0.0, TWO_PI, 129)
    tabulated_field(circle64, xs, np.cos(xs))  # closes up: accepted
    with pytest.raises(ValidationError):
        tabulated_field(circle64, xs, xs)  # phi = x: rejected


def test_parse_field_text_vocabulary(circle64):
    assert parse_field_text(circle64, "const 0.7").values[0] == 0.7
    f = parse_field_text(circle64, "coscomb 0.5 0.25 1")
    assert f.values == pytest.approx(0.5 + 0.25 * np.cos(circle64.coords[:, 0]))
    g = parse_field_text(circle64, "gauss 1.0 pi 0.1 0.5")
    assert g.values.max() == pytest.approx(1.5, abs=1e-9)
    r = parse_field_text(circle64, "random 3 0.9")
    assert r.values.max() == pytest.approx(0.9, abs=1e-12)
    with pytest.raises(ValidationError):
        parse_field_text(circle64, "sqnorm")  # not periodic
    with pytest.raises(ValidationError):
        parse_field_text(circle64, "mystery 1 2")
    with pytest.raises(ValidationError):
        parse_field_text(circle64, "gauss 1.0")  # wrong arity
