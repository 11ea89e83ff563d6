"""Fourier basis, rescaled mode variables, mode energies and weighted norms.

Basis (orthonormal on the respective lattice):

* DBC, k = 1..N:          e_k(j) = sqrt(2/(N+1)) sin(j k pi/(N+1))
* PBC, k = 1..N (sine):   e_k(j) = sin(j k pi/(N+1)) / sqrt(N+1)
* PBC, k = -1..-N (cos):  e_k(j) = cos(j k pi/(N+1)) / sqrt(N+1)
* PBC, k = 0:             1/sqrt(2N+2)
* PBC, k = -(N+1):        (-1)^j / sqrt(2N+2)

Rescaled mode variables (p_hat, q_hat) are defined through

    p_j = sum_k sqrt(omega_k) p_hat_k e_k(j),
    q_j = sum_k q_hat_k / sqrt(omega_k) e_k(j),

with omega_k = sqrt(1 + 4 a sin^2(k pi/(2N+2))), so the harmonic energy
diagonalizes as H_0 = sum_k omega_k (p_hat_k^2 + q_hat_k^2)/2.

Mode storage order ("canonical order"):

* DBC: ascending k = 1..N.
* PBC: k = 0, +1, -1, +2, -2, ..., +N, -N, -(N+1); mode_indices() is the
  explicit index map written to output files.

Transforms come in a fast path (DST-I for DBC, one real FFT for PBC) and
an O(n^2) reference path through the explicit basis matrix; the two agree
to roundoff and the tests pin that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.special

from .lattice import DBC, ContractError, LatticeParams, SiteState

# exponent above which the weighted norm switches to log-space accumulation
_LOG_NORM_THRESHOLD = 600.0


def mode_indices(params: LatticeParams) -> np.ndarray:
    """Mode index k per storage position (canonical order)."""
    n = params.N
    if params.bc == DBC:
        return np.arange(1, n + 1)
    ks = np.empty(2 * n + 2, dtype=int)
    ks[0] = 0
    ks[1 : 2 * n + 1 : 2] = np.arange(1, n + 1)
    ks[2 : 2 * n + 2 : 2] = -np.arange(1, n + 1)
    ks[-1] = -(n + 1)
    return ks


def omega_of(params: LatticeParams, k) -> np.ndarray:
    """Dispersion omega_k = sqrt(1 + 4 a sin^2(k pi / (2N+2))); |k| only."""
    k = np.asarray(k, dtype=float)
    s = np.sin(k * np.pi / (2 * params.N + 2))
    return np.sqrt(1.0 + 4.0 * params.a * s * s)


@dataclass(frozen=True)
class FrequencyTable:
    """omega_k and the shift nu_k = omega_k - 1 in canonical mode order."""

    k: np.ndarray
    omega: np.ndarray
    nu: np.ndarray


def frequencies(params: LatticeParams) -> FrequencyTable:
    k = mode_indices(params)
    s2 = np.sin(k * np.pi / (2 * params.N + 2)) ** 2
    omega = np.sqrt(1.0 + 4.0 * params.a * s2)
    # cancellation-safe form of omega - 1
    nu = 4.0 * params.a * s2 / (omega + 1.0)
    return FrequencyTable(k, omega, nu)


def basis_value(params: LatticeParams, k: int, j: int) -> float:
    """Single basis entry e_k(j).

    DBC admits j = 0..N+1 (the walls evaluate to 0); PBC admits the site
    range -(N+1)..N.
    """
    n = params.N
    if params.bc == DBC:
        if not 1 <= k <= n:
            raise ContractError(f"DBC mode index must be in 1..{n}, got {k}")
        if not 0 <= j <= n + 1:
            raise ContractError(f"DBC site index must be in 0..{n + 1}, got {j}")
        return float(np.sqrt(2.0 / (n + 1)) * np.sin(j * k * np.pi / (n + 1)))
    if not -(n + 1) <= k <= n:
        raise ContractError(f"PBC mode index must be in -(N+1)..N, got {k}")
    if not -(n + 1) <= j <= n:
        raise ContractError(f"PBC site index must be in -(N+1)..N, got {j}")
    m = 2 * n + 2
    if k == 0:
        return 1.0 / np.sqrt(m)
    if k == -(n + 1):
        return float((-1.0) ** j / np.sqrt(m))
    if k > 0:
        return float(np.sin(j * k * np.pi / (n + 1)) / np.sqrt(n + 1))
    return float(np.cos(j * k * np.pi / (n + 1)) / np.sqrt(n + 1))


def basis_matrix(params: LatticeParams) -> np.ndarray:
    """Dense basis matrix B[mode, site] in canonical/storage order."""
    n = params.N
    if params.bc == DBC:
        j = np.arange(1, n + 1)
        k = np.arange(1, n + 1)[:, None]
        return np.sqrt(2.0 / (n + 1)) * np.sin(j[None, :] * k * np.pi / (n + 1))
    m = 2 * n + 2
    js = np.arange(m)  # storage order; basis functions are m-periodic in j
    b = np.empty((m, m))
    for pos, k in enumerate(mode_indices(params)):
        if k == 0:
            b[pos] = 1.0 / np.sqrt(m)
        elif k == -(n + 1):
            b[pos] = (-1.0) ** js / np.sqrt(m)
        elif k > 0:
            b[pos] = np.sin(2 * np.pi * k * js / m) / np.sqrt(n + 1)
        else:
            b[pos] = np.cos(2 * np.pi * k * js / m) / np.sqrt(n + 1)
    return b


@dataclass
class ModeState:
    """Rescaled Fourier amplitudes in canonical mode order."""

    p_hat: np.ndarray
    q_hat: np.ndarray
    t: float = 0.0


def _analyze(params: LatticeParams, values: np.ndarray, reference: bool) -> np.ndarray:
    """Plain (unweighted) coefficients sum_j values_j e_k(j), canonical order."""
    values = np.asarray(values, dtype=float)
    if values.shape != (params.n_sites,):
        raise ContractError("site array length mismatch")
    if reference:
        return basis_matrix(params) @ values
    n = params.N
    if params.bc == DBC:
        return scipy.fft.dst(values, type=1, norm="ortho")
    m = 2 * n + 2
    u = np.fft.rfft(values)
    out = np.empty(m)
    rj = 1.0 / np.sqrt(n + 1)
    out[0] = u[0].real / np.sqrt(m)
    out[1 : 2 * n + 1 : 2] = -u[1 : n + 1].imag * rj
    out[2 : 2 * n + 2 : 2] = u[1 : n + 1].real * rj
    out[-1] = u[n + 1].real / np.sqrt(m)
    return out


def _synthesize(params: LatticeParams, coeff: np.ndarray, reference: bool) -> np.ndarray:
    """Inverse of _analyze."""
    coeff = np.asarray(coeff, dtype=float)
    if coeff.shape != (params.n_sites,):
        raise ContractError("coefficient array length mismatch")
    if reference:
        return basis_matrix(params).T @ coeff
    n = params.N
    if params.bc == DBC:
        return scipy.fft.idst(coeff, type=1, norm="ortho")
    m = 2 * n + 2
    u = np.empty(n + 2, dtype=complex)
    u[0] = coeff[0] * np.sqrt(m)
    u[1 : n + 1] = np.sqrt(n + 1) * (coeff[2 : 2 * n + 2 : 2] - 1j * coeff[1 : 2 * n + 1 : 2])
    u[n + 1] = coeff[-1] * np.sqrt(m)
    return np.fft.irfft(u, n=m)


def to_modes(
    params: LatticeParams,
    state: SiteState,
    freqs: FrequencyTable | None = None,
    reference: bool = False,
) -> ModeState:
    """Site state -> rescaled mode amplitudes (p_hat, q_hat)."""
    if freqs is None:
        freqs = frequencies(params)
    sq = np.sqrt(freqs.omega)
    p_hat = _analyze(params, state.p, reference) / sq
    q_hat = _analyze(params, state.q, reference) * sq
    return ModeState(p_hat, q_hat, state.t)


def from_modes(
    params: LatticeParams,
    modes: ModeState,
    freqs: FrequencyTable | None = None,
    reference: bool = False,
) -> SiteState:
    """Rescaled mode amplitudes -> site state; inverse of to_modes."""
    if freqs is None:
        freqs = frequencies(params)
    sq = np.sqrt(freqs.omega)
    p = _synthesize(params, np.asarray(modes.p_hat) * sq, reference)
    q = _synthesize(params, np.asarray(modes.q_hat) / sq, reference)
    return SiteState(p, q, modes.t)


def mode_energies(modes: ModeState, freqs: FrequencyTable) -> np.ndarray:
    """Harmonic mode energies E_k = omega_k (p_hat_k^2 + q_hat_k^2)/2."""
    p = np.asarray(modes.p_hat)
    q = np.asarray(modes.q_hat)
    if p.shape != freqs.omega.shape:
        raise ContractError("mode/frequency index sets differ")
    return 0.5 * freqs.omega * (p * p + q * q)


# ---------------------------------------------------------------------------
# weighted sequence norms


@dataclass(frozen=True)
class NormWeights:
    """Weights of the norm  mu * sum_k [k]^{2s} e^{2 sigma |k|} |c_k|^2.

    [k] = max(1, |k|).  sigma >= 0; mu is the overall scale (pi/(N+1) for
    lattice sequences, 1 for functions on the torus).
    """

    s: float
    sigma: float
    mu: float = 1.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ContractError("sigma must be >= 0")


def seq_norm(coeff: np.ndarray, k: np.ndarray, w: NormWeights) -> float:
    """Weighted l2 norm of one coefficient array indexed by k."""
    coeff = np.asarray(coeff)
    k = np.asarray(k)
    if coeff.shape != k.shape:
        raise ContractError("coefficient and index arrays differ in shape")
    kk = np.maximum(1.0, np.abs(k).astype(float))
    log_w = 2.0 * w.s * np.log(kk) + 2.0 * w.sigma * np.abs(k)
    if np.max(log_w, initial=0.0) < _LOG_NORM_THRESHOLD:
        total = w.mu * float(np.sum(np.exp(log_w) * np.abs(coeff) ** 2))
        return float(np.sqrt(total))
    # log-space path for strongly weighted tails
    mag = np.abs(coeff)
    mask = mag > 0
    if not np.any(mask):
        return 0.0
    logs = log_w[mask] + 2.0 * np.log(mag[mask])
    log_total = scipy.special.logsumexp(logs) + np.log(w.mu)
    half = 0.5 * log_total
    if half > np.log(np.finfo(float).max):
        raise OverflowError("weighted norm overflows double precision")
    return float(np.exp(half))


def phase_norm(
    modes: ModeState, params: LatticeParams, w: NormWeights
) -> float:
    """Norm of a phase point: sqrt(||p_hat||^2 + ||q_hat||^2)."""
    k = mode_indices(params)
    np_ = seq_norm(modes.p_hat, k, w)
    nq = seq_norm(modes.q_hat, k, w)
    return float(np.hypot(np_, nq))


def lattice_weights(params: LatticeParams, s: float, sigma: float) -> NormWeights:
    """NormWeights with the lattice scale mu = pi/(N+1)."""
    return NormWeights(s, sigma, params.mu)
