"""Side-by-side lattice/field comparison driver."""

import numpy as np
import pytest

import kgchain as kg
from kgchain.compare import ratio_table, run_comparison, scaling_sweep


def test_run_comparison_basics():
    params = kg.LatticeParams(32, 0.5, 0.25, 0.0, kg.DBC)
    field = kg.field_from_trig(params, sin={1: 1j})
    series = run_comparison(params, field, t_end=5.0, dt=0.05, n_records=5)
    assert series.times[-1] == pytest.approx(5.0)
    for key, values in series.norms.items():
        assert np.all(np.isfinite(values))
    assert series.correction_distance is not None
    assert series.correction_distance < series.final_error.norms[(2.0, 0.0)]
    assert series.final_z10.t == pytest.approx(5.0)


def test_run_comparison_no_correction_for_beta_model():
    params = kg.LatticeParams(32, 0.5, 0.0, 0.25, kg.DBC)
    field = kg.field_from_trig(params, sin={1: 1j})
    series = run_comparison(params, field, t_end=2.0, dt=0.05, n_records=2)
    assert series.correction_distance is None


def test_correction_distance_shrinks_with_doubling():
    # sup ||z1 - z10|| over t <= mu^{-1/2} shrinks per N-doubling by about
    # sqrt(2), within a factor 1.5 (measured decay is in fact ~2: the
    # explicit correction beats its own error bound)
    base = kg.LatticeParams(64, 0.5, 0.25, 0.0, kg.DBC)
    rows = scaling_sweep(
        base, (64, 128), lambda p: kg.field_from_trig(p, sin={1: 1j}),
        horizon="mu^-b", b=0.5, dt=0.02, n_records=16,
        norm_list=((2.0, 0.0),), with_correction=True,
    )
    ratio = rows[0].correction_distance / rows[1].correction_distance
    assert np.sqrt(2) / 1.5 < ratio < np.sqrt(2) * 1.5


def test_scaling_sweep_rows_and_ratios():
    base = kg.LatticeParams(16, 0.5, 0.25, 0.0, kg.DBC)
    rows = scaling_sweep(
        base,
        (16, 32),
        lambda p: kg.field_from_trig(p, sin={1: 1j}),
        horizon="mu^-b",
        b=0.5,
        dt=0.05,
        n_records=4,
        norm_list=((2.0, 0.0),),
    )
    assert [r.N for r in rows] == [16, 32]
    assert rows[0].t_end < rows[1].t_end
    ratios = ratio_table(rows, (2.0, 0.0))
    assert len(ratios) == 1 and np.isfinite(ratios[0])
