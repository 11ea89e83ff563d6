"""Basis identities, transforms, mode energies, weighted norms."""

import numpy as np
import pytest

import kgchain as kg
from kgchain.spectral import omega_of
from conftest import random_state


@pytest.mark.parametrize("bc", [kg.DBC, kg.PBC])
@pytest.mark.parametrize("n", [7, 15, 63])
def test_basis_orthonormal_and_complete(bc, n):
    params = kg.LatticeParams(n, 0.5, bc=bc)
    b = kg.basis_matrix(params)
    eye = np.eye(params.n_sites)
    assert np.max(np.abs(b @ b.T - eye)) < 1e-12
    assert np.max(np.abs(b.T @ b - eye)) < 1e-12


def test_basis_vanishes_at_walls():
    params = kg.LatticeParams(12, 0.5, bc=kg.DBC)
    for k in (1, 5, 12):
        assert kg.basis_value(params, k, 0) == pytest.approx(0.0, abs=1e-13)
        assert abs(kg.basis_value(params, k, 13)) < 1e-12


def test_basis_constant_mode():
    params = kg.LatticeParams(7, 0.5, bc=kg.PBC)
    vals = [kg.basis_value(params, 0, j) for j in range(-8, 8)]
    assert np.allclose(vals, 1 / np.sqrt(16), atol=0)


def test_basis_index_contracts():
    params = kg.LatticeParams(7, 0.5, bc=kg.DBC)
    with pytest.raises(kg.ContractError):
        kg.basis_value(params, 0, 1)
    with pytest.raises(kg.ContractError):
        kg.basis_value(params, 1, 9)


def test_frequency_values():
    params = kg.LatticeParams(15, 0.5, bc=kg.PBC)
    fr = kg.frequencies(params)
    by_k = dict(zip(fr.k.tolist(), fr.omega))
    assert by_k[0] == 1.0
    assert by_k[8] == pytest.approx(np.sqrt(2.0), rel=1e-15)  # k = (N+1)/2
    assert by_k[-16] == pytest.approx(np.sqrt(3.0), rel=1e-15)  # |k| = N+1
    assert np.all(fr.omega >= 1.0) and np.all(fr.omega <= params.omega_max)
    assert np.all(fr.nu <= 2 * params.a + 1e-15)
    # even in k, monotone in |k|
    for k in range(1, 16):
        assert by_k[k] == by_k[-k]
    ks = np.arange(0, 17)
    assert np.all(np.diff(omega_of(params, ks)) > 0)


def test_cancellation_safe_nu():
    params = kg.LatticeParams(10**4, 1e-6, bc=kg.DBC)
    fr = kg.frequencies(params)
    expect = 4 * params.a * np.sin(fr.k * np.pi / (2 * params.N + 2)) ** 2 / (
        fr.omega + 1.0
    )
    assert np.all(fr.nu > 0)
    assert np.allclose(fr.nu, expect, rtol=1e-12)


@pytest.mark.parametrize("bc", [kg.DBC, kg.PBC])
@pytest.mark.parametrize("n", [15, 511])
def test_transform_roundtrip(bc, n, rng):
    params = kg.LatticeParams(n, 0.5, bc=bc)
    st = random_state(params, rng)
    back = kg.from_modes(params, kg.to_modes(params, st))
    scale = np.max(np.abs(st.q))
    assert np.max(np.abs(back.p - st.p)) < 1e-12 * scale
    assert np.max(np.abs(back.q - st.q)) < 1e-12 * scale


@pytest.mark.parametrize("bc", [kg.DBC, kg.PBC])
@pytest.mark.parametrize("n", [15, 63, 511])
def test_fast_matches_reference(bc, n, rng):
    params = kg.LatticeParams(n, 0.5, bc=bc)
    st = random_state(params, rng)
    fast = kg.to_modes(params, st)
    ref = kg.to_modes(params, st, reference=True)
    assert np.max(np.abs(fast.p_hat - ref.p_hat)) < 1e-12 * np.max(np.abs(ref.p_hat))
    assert np.max(np.abs(fast.q_hat - ref.q_hat)) < 1e-12 * np.max(np.abs(ref.q_hat))


def test_single_mode_amplitude():
    params = kg.LatticeParams(14, 0.5, bc=kg.DBC)
    fr = kg.frequencies(params)
    q = np.array([kg.basis_value(params, 1, j) for j in range(1, 15)]) / np.sqrt(
        fr.omega[0]
    )
    m = kg.to_modes(params, kg.SiteState(np.zeros(14), q))
    assert m.q_hat[0] == pytest.approx(1.0, rel=1e-13)
    assert np.max(np.abs(m.q_hat[1:])) < 1e-13


@pytest.mark.parametrize("bc", [kg.DBC, kg.PBC])
def test_quadratic_energy_identity_and_parseval(bc, rng):
    params = kg.LatticeParams(31, 0.5, 0.7, 0.3, bc)
    st = random_state(params, rng)
    m = kg.to_modes(params, st)
    fr = kg.frequencies(params)
    e = kg.mode_energies(m, fr)
    assert np.all(e >= 0)
    h0 = kg.quadratic_energy(params, st)
    assert np.sum(e) == pytest.approx(h0, rel=1e-12)
    assert np.dot(st.p, st.p) == pytest.approx(np.sum(fr.omega * m.p_hat**2), rel=1e-12)
    assert np.dot(st.q, st.q) == pytest.approx(np.sum(m.q_hat**2 / fr.omega), rel=1e-12)


def test_mode_energy_density_inversion():
    params = kg.LatticeParams(21, 0.5, bc=kg.DBC)
    fr = kg.frequencies(params)
    density = 0.003
    q_hat = np.zeros(21)
    q_hat[0] = np.sqrt(2 * density * params.n_sites / fr.omega[0])
    e = kg.mode_energies(kg.ModeState(np.zeros(21), q_hat), fr)
    assert e[0] == pytest.approx(density * params.n_sites, rel=1e-14)
    assert np.all(e[1:] == 0)


def test_seq_norm_single_mode_and_plain_sum(rng):
    w = kg.NormWeights(1.7, 0.3, mu=0.2)
    k = np.arange(1, 11)
    c = np.zeros(10)
    c[4] = 2.5  # mode k = 5
    expect = np.sqrt(0.2 * 5.0 ** (2 * 1.7) * np.exp(2 * 0.3 * 5) * 2.5**2)
    assert kg.seq_norm(c, k, w) == pytest.approx(expect, rel=1e-14)
    v = rng.normal(size=10)
    w0 = kg.NormWeights(0.0, 0.0, mu=0.7)
    assert kg.seq_norm(v, k, w0) == pytest.approx(np.sqrt(0.7 * np.sum(v**2)), rel=1e-14)


def test_seq_norm_matches_direct_summation(rng):
    k = np.arange(-12, 13)
    v = rng.normal(size=k.size) + 1j * rng.normal(size=k.size)
    w = kg.NormWeights(2.0, 0.1, mu=0.31)
    direct = np.sqrt(
        0.31
        * np.sum(
            np.maximum(1, np.abs(k)) ** 4.0 * np.exp(0.2 * np.abs(k)) * np.abs(v) ** 2
        )
    )
    assert kg.seq_norm(v, k, w) == pytest.approx(direct, rel=1e-12)


def test_seq_norm_monotonicity_and_homogeneity(rng):
    k = np.arange(1, 40)
    v = rng.normal(size=39)
    base = kg.seq_norm(v, k, kg.NormWeights(1.0, 0.1))
    assert kg.seq_norm(v, k, kg.NormWeights(1.5, 0.1)) >= base
    assert kg.seq_norm(v, k, kg.NormWeights(1.0, 0.2)) >= base
    assert kg.seq_norm(3.5 * v, k, kg.NormWeights(1.0, 0.1)) == pytest.approx(
        3.5 * base, rel=1e-12
    )


def test_seq_norm_log_space_path():
    # weight exp(2*sigma*k) = exp(1800) overflows a direct evaluation, but
    # the tiny coefficient keeps the norm itself representable
    k = np.array([100, 150])
    c = np.array([0.0, 1e-280])
    w = kg.NormWeights(1.0, 6.0, mu=0.5)
    log_expected = 0.5 * (
        np.log(0.5) + 2 * np.log(150.0) + 2 * 6.0 * 150 + 2 * np.log(1e-280)
    )
    got = kg.seq_norm(c, k, w)
    assert np.log(got) == pytest.approx(log_expected, rel=1e-12)
    # a true overflow is still reported
    with pytest.raises(OverflowError):
        kg.seq_norm(np.array([0.0, 3.0]), k, w)
    with pytest.raises(kg.ContractError):
        kg.NormWeights(1.0, -0.1)


def test_phase_norm_combines_both_arrays(rng):
    params = kg.LatticeParams(9, 0.4, bc=kg.DBC)
    st = random_state(params, rng)
    m = kg.to_modes(params, st)
    w = kg.lattice_weights(params, 1.0, 0.0)
    k = kg.mode_indices(params)
    expect = np.hypot(kg.seq_norm(m.p_hat, k, w), kg.seq_norm(m.q_hat, k, w))
    assert kg.phase_norm(m, params, w) == pytest.approx(expect, rel=1e-14)
