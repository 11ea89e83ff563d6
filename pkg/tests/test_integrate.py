"""Symplectic integrator quality gates."""

import numpy as np
import pytest

import kgchain as kg
from conftest import random_state


def single_mode_state(params, k=1, amplitude=1.0):
    fr = kg.frequencies(params)
    q_hat = np.zeros(params.n_sites)
    q_hat[k - 1] = amplitude
    return kg.from_modes(params, kg.ModeState(np.zeros(params.n_sites), q_hat)), fr


def test_zero_state_is_fixed_point():
    params = kg.LatticeParams(9, 0.5, 0.25, 0.1, kg.DBC)
    st = kg.SiteState(np.zeros(9), np.zeros(9))
    end = kg.integrate(params, st, kg.IntegratorConfig("leapfrog", 0.1, 50.0, 100))
    assert np.all(end.p == 0) and np.all(end.q == 0)


def test_harmonic_mode_rotation_phase_error():
    params = kg.LatticeParams(31, 0.5, 0.0, 0.0, kg.DBC)
    st, fr = single_mode_state(params, k=3)
    w = fr.omega[2]
    dt, t_end = 0.01, 10.0
    end = kg.integrate(params, st, kg.IntegratorConfig("leapfrog", dt, t_end, 10**9))
    m = kg.to_modes(params, end)
    angle = np.arctan2(-m.p_hat[2], m.q_hat[2])
    err = abs((angle - w * t_end + np.pi) % (2 * np.pi) - np.pi)
    # leapfrog phase error is ~ w^3 dt^2 t / 24; allow a 4x envelope
    assert err < 4 * w**3 * dt**2 * t_end / 24


def test_measured_convergence_orders():
    params = kg.LatticeParams(31, 0.5, 0.25, 0.0, kg.DBC)
    st, _ = single_mode_state(params, k=1, amplitude=0.8)
    assert abs(kg.richardson_order(params, st, 10.0, 0.02, "leapfrog") - 2.0) < 0.1
    assert abs(kg.richardson_order(params, st, 10.0, 0.04, "yoshida4") - 4.0) < 0.2


def test_time_reversal():
    params = kg.LatticeParams(31, 0.5, 0.25, 0.0, kg.DBC)
    st, _ = single_mode_state(params, k=1, amplitude=0.5)
    n, dt = 10**4, 0.05
    cfg = kg.IntegratorConfig("leapfrog", dt, n * dt, 10**9)
    s = kg.integrate(params, st.copy(), cfg)
    # march back with -dt using the raw stepper
    back = s
    for _ in range(n):
        back = kg.step(params, back, -dt, "leapfrog")
    assert np.max(np.abs(back.q - st.q)) < 1e-10
    assert np.max(np.abs(back.p - st.p)) < 1e-10


def test_determinism_bit_identical(rng):
    params = kg.LatticeParams(21, 0.5, 0.25, 0.1, kg.DBC)
    st = random_state(params, rng, scale=0.1)
    cfg = kg.IntegratorConfig("yoshida4", 0.05, 20.0, 7)
    a = kg.integrate(params, st, cfg)
    b = kg.integrate(params, st, cfg)
    assert np.array_equal(a.p, b.p) and np.array_equal(a.q, b.q)


def test_single_site_jacobian_determinant():
    # a = 0 decouples the sites; the (p_0, q_0) block of one step is the
    # full single-oscillator map and its determinant must be 1
    params = kg.LatticeParams(2, 0.0, 0.25, 0.1, kg.DBC)
    base = kg.SiteState(np.array([0.13, 0.0]), np.array([0.21, 0.0]))
    h, dt = 1e-6, 0.1

    def flow(p0, q0):
        st = kg.SiteState(np.array([p0, 0.0]), np.array([q0, 0.0]))
        out = kg.step(params, st, dt, "yoshida4")
        return np.array([out.p[0], out.q[0]])

    jac = np.empty((2, 2))
    jac[:, 0] = (flow(base.p[0] + h, base.q[0]) - flow(base.p[0] - h, base.q[0])) / (2 * h)
    jac[:, 1] = (flow(base.p[0], base.q[0] + h) - flow(base.p[0], base.q[0] - h)) / (2 * h)
    assert abs(np.linalg.det(jac) - 1.0) < 1e-9


def test_energy_drift_bounded_medium_run():
    params = kg.LatticeParams(63, 0.5, 0.25, 0.0, kg.DBC)
    fr = kg.frequencies(params)
    q_hat = np.zeros(63)
    q_hat[0] = np.sqrt(2 * 0.01 * 63 / fr.omega[0])
    st = kg.from_modes(params, kg.ModeState(np.zeros(63), q_hat))
    from kgchain.observables import EnergyDriftObserver

    drift = EnergyDriftObserver(lambda p, q: kg.eval_energy(params, kg.SiteState(p, q)))
    kg.integrate(params, st, kg.IntegratorConfig("yoshida4", 0.05, 5000.0, 50), (drift,))
    assert drift.max_relative_drift() < 1e-5


def test_stability_rejected_at_construction():
    params = kg.LatticeParams(15, 0.5, bc=kg.DBC)  # omega_max = sqrt(3)
    cfg = kg.IntegratorConfig("leapfrog", 1.2, 12.0, 1)
    with pytest.raises(kg.ContractError, match="unstable"):
        cfg.validate(params)
    with pytest.raises(kg.ContractError):
        kg.integrate(params, kg.SiteState(np.zeros(15), np.zeros(15)), cfg)


def test_nonfinite_abort_references_last_good_sample():
    # alpha-model escape orbit: amplitude far beyond the potential barrier
    params = kg.LatticeParams(9, 0.1, 1.0, 0.0, kg.DBC)
    st = kg.SiteState(np.zeros(9), np.full(9, -50.0))
    cfg = kg.IntegratorConfig("leapfrog", 0.1, 50.0, 5)
    with pytest.raises(kg.NonFiniteStateError) as err:
        kg.integrate(params, st, cfg)
    assert err.value.last_good_t is not None


def test_observer_cadence_and_checkpointer():
    params = kg.LatticeParams(9, 0.2, bc=kg.DBC)
    st = kg.SiteState(np.zeros(9), np.zeros(9))
    seen, ckpts = [], []
    cfg = kg.IntegratorConfig("leapfrog", 0.1, 1.0, 2, checkpoint_every=5)
    kg.integrate(
        params, st, cfg,
        observers=(lambda t, p, q: seen.append(round(t, 10)),),
        checkpointer=lambda t, p, q: ckpts.append(round(t, 10)),
    )
    assert seen == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    assert ckpts == [0.0, 0.5, 1.0]
