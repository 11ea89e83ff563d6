"""Averaging, pair means, decay fits, crossover detection."""

import numpy as np
import pytest

import kgchain as kg
from kgchain import observables as obs
from conftest import random_state


def feed(acc, times, values):
    for t, e in zip(times, values):
        obs.accumulate(acc, e, t)
    return acc


def test_constant_signal_average():
    params = kg.LatticeParams(4, 0.2, bc=kg.DBC)
    acc = obs.new_accumulator(params)
    e = np.array([1.0, 2.0, 3.0, 4.0])
    feed(acc, np.linspace(0, 10, 33), [e] * 33)
    assert np.allclose(acc.e_avg, e, rtol=1e-14)
    assert acc.t_accum == pytest.approx(10.0)


def test_linear_signal_exact_average():
    # E(t) = t: trapezoid integrates it exactly, <E>(T) = T/2
    params = kg.LatticeParams(4, 0.2, bc=kg.DBC)
    acc = obs.new_accumulator(params)
    times = np.linspace(0, 8, 21)
    feed(acc, times, [np.full(4, t) for t in times])
    assert np.allclose(acc.e_avg, 4.0, rtol=1e-14)
    # refinement leaves the exact value unchanged
    acc2 = obs.new_accumulator(params)
    times2 = np.linspace(0, 8, 161)
    feed(acc2, times2, [np.full(4, t) for t in times2])
    assert np.allclose(acc2.e_avg, acc.e_avg, rtol=1e-14)


def test_sparse_vs_dense_sampling_on_harmonic():
    params = kg.LatticeParams(4, 0.2, bc=kg.DBC)
    t_end = 50.0
    dense_t = np.arange(0, t_end + 1e-9, 0.01)
    sparse_t = dense_t[::10]

    def e_of(t):
        return np.full(4, 1.0 + 0.5 * np.cos(1.3 * t) ** 2)

    dense = feed(obs.new_accumulator(params), dense_t, [e_of(t) for t in dense_t])
    sparse = feed(obs.new_accumulator(params), sparse_t, [e_of(t) for t in sparse_t])
    rel = np.abs(sparse.e_avg - dense.e_avg) / dense.e_avg
    assert np.max(rel) < 1e-3


def test_non_monotone_rejected():
    params = kg.LatticeParams(4, 0.2, bc=kg.DBC)
    acc = obs.new_accumulator(params)
    obs.accumulate(acc, np.zeros(4), 0.0)
    obs.accumulate(acc, np.zeros(4), 1.0)
    with pytest.raises(kg.ContractError):
        obs.accumulate(acc, np.zeros(4), 0.5)


def test_pair_average_values():
    params = kg.LatticeParams(3, 0.2, bc=kg.PBC)
    acc = obs.new_accumulator(params)
    e = np.zeros(8)
    # canonical order [0, +1, -1, +2, -2, +3, -3, -(N+1)]
    e[1], e[2] = 3.0, 1.0
    e[0], e[-1] = 0.7, 0.9
    feed(acc, [0.0, 1.0], [e, e])
    paired = obs.pair_average(acc)
    assert np.array_equal(paired.k, [0, 1, 2, 3, 4])
    assert paired.e_avg[1] == pytest.approx(2.0)
    assert paired.e_avg[0] == pytest.approx(0.7)
    assert paired.e_avg[-1] == pytest.approx(0.9)
    with pytest.raises(kg.ContractError):
        obs.pair_average(paired)
    dbc = obs.new_accumulator(kg.LatticeParams(3, 0.2, bc=kg.DBC))
    with pytest.raises(kg.ContractError):
        obs.pair_average(dbc)


def test_pair_average_symmetric_spectrum_unchanged(rng):
    params = kg.LatticeParams(5, 0.2, bc=kg.PBC)
    acc = obs.new_accumulator(params)
    vals = rng.uniform(0.5, 2.0, size=5)
    e = np.zeros(12)
    e[1:11:2] = vals
    e[2:12:2] = vals
    feed(acc, [0.0, 1.0], [e, e])
    paired = obs.pair_average(acc)
    assert np.allclose(paired.e_avg[1:6], vals, rtol=1e-14)


def test_pair_average_of_odd_extension_matches_dbc(rng):
    # short beta-model run, both paths
    params = kg.LatticeParams(15, 0.4, 0.0, 0.3, kg.DBC)
    st = random_state(params, rng, scale=0.15)
    pbc = params.pbc_counterpart()
    ext = kg.odd_extend(params, st)
    cfg = kg.IntegratorConfig("yoshida4", 0.05, 200.0, 10)

    dbc_obs = obs.ModeEnergyObserver(params)
    kg.integrate(params, st, cfg, observers=(dbc_obs,))
    pbc_obs = obs.ModeEnergyObserver(pbc)
    kg.integrate(pbc, ext, cfg, observers=(pbc_obs,))
    paired = obs.pair_average(pbc_obs.spectrum)
    assert np.allclose(paired.e_avg[1:16], dbc_obs.spectrum.e_avg, rtol=1e-9, atol=1e-18)


def synthetic_spectrum(kind, n=200):
    k = np.arange(1, n + 1)
    if kind == "exp":
        return k, 7.3 * np.exp(-0.1 * k)
    if kind == "pow":
        return k, 2.1 * k**-6.0
    raise ValueError(kind)


def test_fit_exact_laws():
    k, e = synthetic_spectrum("exp")
    fit = obs.fit_decay((k, e), obs.EXPONENTIAL, (1, 200))
    assert fit.slope == pytest.approx(-0.1, abs=1e-12)
    assert fit.residual < 1e-12
    k, e = synthetic_spectrum("pow")
    fit = obs.fit_decay((k, e), obs.POWERLAW, (1, 200))
    assert fit.slope == pytest.approx(-6.0, abs=1e-12)


def test_fit_noisy_power_law(rng):
    k = np.arange(1, 301)
    e = 0.4 * k**-6.0 * (1.0 + rng.uniform(-0.1, 0.1, size=300))
    fit = obs.fit_decay((k, e), obs.POWERLAW, (1, 300), parity="odd")
    assert abs(fit.slope + 6.0) < 0.3


def test_fit_scale_covariance(rng):
    k = np.arange(1, 101)
    e = np.exp(-0.23 * k) * (1 + 0.02 * rng.normal(size=100))
    base = obs.fit_decay((k, e), obs.EXPONENTIAL, (1, 100))
    scaled = obs.fit_decay((k, 50.0 * e), obs.EXPONENTIAL, (1, 100))
    assert scaled.slope == pytest.approx(base.slope, rel=1e-12)
    assert scaled.intercept - base.intercept == pytest.approx(np.log(50.0), rel=1e-10)
    p = 1.3 * k**-4.2
    f1 = obs.fit_decay((k, p), obs.POWERLAW, (1, 100))
    f2 = obs.fit_decay((k, 1e-3 * p), obs.POWERLAW, (1, 100))
    assert f2.slope == pytest.approx(f1.slope, rel=1e-12)


def test_fit_errors():
    k = np.arange(1, 30)
    e = np.exp(-k / 3.0)
    with pytest.raises(obs.FitError):
        obs.fit_decay((k, e), obs.EXPONENTIAL, (1, 3))
    e2 = e.copy()
    e2[9] = 0.0
    with pytest.raises(obs.FitError) as err:
        obs.fit_decay((k, e2), obs.EXPONENTIAL, (1, 29))
    assert err.value.bad_k == [10]


def test_crossover_pure_exponential_declines():
    k = np.arange(1, 201)
    e = 3.0 * np.exp(-0.12 * k)
    res = obs.detect_crossover((k, e), parity="odd", k_min=3, k_max=151)
    assert res.k_star is None
    assert res.head.slope == pytest.approx(-0.12, abs=1e-10)


def test_crossover_synthetic_intersection():
    k = np.arange(1, 256)
    head = np.exp(-0.5 * k)
    tail = 1e-4 * k**-6.0
    e = np.maximum(head, tail)
    # analytic switch point: e^{-0.5k} = 1e-4 k^-6
    from scipy.optimize import brentq

    k_true = brentq(lambda x: -0.5 * x - np.log(1e-4) + 6 * np.log(x), 5, 100)
    res = obs.detect_crossover((k, e), parity="odd", k_min=3, k_max=201)
    assert res.k_star is not None
    assert abs(res.k_star - k_true) <= 2.0
    assert res.tail.slope == pytest.approx(-6.0, abs=0.2)
    e_true = np.exp(-0.5 * k_true)
    assert abs(np.log10(res.e_star) - np.log10(e_true)) < 0.5


def test_crossover_needs_two_decades():
    k = np.arange(1, 60)
    e = np.full(59, 3.0) * np.exp(-0.01 * k)  # barely one decade
    with pytest.raises(kg.ContractError):
        obs.detect_crossover((k, e), parity=None, k_min=1, k_max=59)
