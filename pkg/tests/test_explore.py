import numpy as np
import pytest

from heatlab import (
    GeometrySpec,
    Schedule,
    SweepSpec,
    ValidationError,
    run_sweep,
)

TWO_PI = 2.0 * np.pi


def small_sweep(a_values, sup_values, seeds, n=64, t_end=0.5):
    return SweepSpec(
        geometry=GeometrySpec("circle", n, TWO_PI),
        schedule=Schedule(t_end=t_end, dt="auto", scheme="implicit_euler", stride=20),
        a_values=a_values, sup_values=sup_values, seeds=seeds)


def test_proven_regime_cells_hold():
    report = run_sweep(small_sweep((-1.0, 0.0), (0.9,), (0, 1)))
    assert report.proven_regime_ok
    for cell in report.cells:
        assert cell.proven_regime
        assert cell.verdict == "holds"
        assert cell.refinement_class == "none"
        assert np.isnan(cell.first_violation_t)


def test_a_zero_reduces_to_heat_equation():
    # a = 0 specialization: pure heat flow, still inside the proven regime
    report = run_sweep(small_sweep((0.0,), (0.9,), (0,)))
    assert report.cells[0].verdict == "holds"


def test_exploratory_cells_are_recorded_not_asserted():
    report = run_sweep(small_sweep((0.5,), (1.5,), (0,), t_end=0.3))
    (cell,) = report.cells
    assert not cell.proven_regime
    assert cell.verdict in ("holds", "violated", "aborted")
    # whatever the exploratory cell did, the proven-regime verdict is clean
    assert report.proven_regime_ok


def test_cell_count_is_grid_times_family():
    spec = small_sweep((-1.0, -0.5, 0.0), (0.5, 0.9), (0, 1, 2))
    assert spec.num_cells == 18
    report = run_sweep(spec)
    assert len(report.cells) == 18
    # deterministic cell order: a-major, then sup, then seed
    assert [c.a for c in report.cells[:6]] == [-1.0] * 6


def test_sweep_determinism():
    spec = small_sweep((-1.0, 0.0), (0.5, 0.9), (0, 1))
    r1 = run_sweep(spec)
    r2 = run_sweep(spec)
    # repr round-trips floats exactly and treats the nan sentinels as equal
    assert repr(r1.cells) == repr(r2.cells)
    assert r1.tolerance == r2.tolerance


def test_aborting_cell_is_data_not_fatal():
    # a > 0 with sup > 1 blows up; the cell is recorded and the sweep goes on
    report = run_sweep(small_sweep((5.0, -1.0), (1.5,), (0,), t_end=2.0))
    by_a = {c.a: c for c in report.cells}
    assert by_a[5.0].verdict == "aborted"
    assert by_a[5.0].refinement_class == "aborted"
    assert np.isnan(by_a[5.0].worst_residual)
    assert by_a[-1.0].verdict in ("holds", "violated")
    assert report.proven_regime_ok  # the aborted cell is exploratory


def test_refinement_classification_consistent():
    # any persistent classification must survive one more doubling
    spec = small_sweep((-1.0, -0.5, 0.0), (0.5, 0.9), (0, 1, 2), n=32)
    report = run_sweep(spec)
    persistent = [c for c in report.cells if c.refinement_class == "persistent"]
    if persistent:
        finer = run_sweep(small_sweep((-1.0, -0.5, 0.0), (0.5, 0.9), (0, 1, 2), n=64))
        finer_by_key = {(c.a, c.sup_u0, c.seed): c for c in finer.cells}
        for cell in persistent:
            again = finer_by_key[(cell.a, cell.sup_u0, cell.seed)]
            assert again.refinement_class in ("persistent", "aborted")
    # nothing in the proven regime may be persistent at all
    assert all(c.refinement_class != "persistent" for c in report.cells
               if c.proven_regime)


def test_sweep_spec_validation():
    with pytest.raises(ValidationError):
        SweepSpec(geometry=GeometrySpec("circle", 64, TWO_PI),
                  schedule=Schedule(t_end=0.5), a_values=(), sup_values=(0.5,),
                  seeds=(0,))
