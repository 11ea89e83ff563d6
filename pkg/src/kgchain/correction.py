"""Explicit first-order correction to the slow-field approximation and
measurement of the true error z1 = (z - mu z^a)/mu^2.

Mechanism
---------
Starting from the zero-velocity datum z(0) = mu z^a(0), phi0 = i g(x) with
g real, the cubic force -alpha s_j q_j^2 drives a second-order response.
Per mode (omega = omega_k, carrier-squared drive frequency Omega = 2) the
complex amplitude psi_hat = (p_hat + i q_hat)/sqrt2 obeys

    d/dt psi_hat = i omega psi_hat + F(t)/sqrt2,
    F(t) = -(alpha/sqrt(omega)) S_k (1 + cos(Omega t))/2,

whose closed-form Duhamel solution defines the response kernel

    K_w(t) = c e^{iwt} - e^{iOt}/(4(O-w)) + e^{-iOt}/(4(O+w)) + 1/(2w),
    c = (2w^2 - O^2) / (2w (O^2 - w^2)),      K_w(0) = 0,

so psi_hat(t) = -(alpha S_k/(sqrt2 sqrt(w))) i K_w(t).  Here S_k are the
coefficients of the step-weighted square sgn(x) g(x)^2: for Dirichlet data
the square of an odd function is even and must be folded back into the
sine sector, which produces the |k|^{-3} coefficient tail (the periodic
case keeps the finitely supported even-sector square and stays
exponentially localized).  In terms of Phi := -i (phi0)^2 one has
S = -i Phi_hat on the matching sector.

Site values carry the frequency weights, mixing the conjugate response:

    zeta_hat_k = c_plus Psi_k + c_minus conj(Psi_k),
    c_plus/minus = (sqrt(w) +- 1/sqrt(w)) / 2,

and the correction state is p_j + i q_j = sqrt2 zeta(mu j).

All multipliers depend on the mode only through omega_k, which is
invariant under aliasing by 2(N+1), so the construction commutes with
restriction to the lattice.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import DBC, ContractError, LatticeParams, SiteState
from .nls import (
    NlsField,
    ScaleMap,
    build_approx,
    exp_to_real,
    fold_to_lattice_bins,
    real_to_exp,
    scale_map,
)
from .spectral import NormWeights, _analyze, omega_of, phase_norm, to_modes

SQRT2 = np.sqrt(2.0)


@dataclass
class CorrectionField:
    """Coefficients of Phi(x) = -i phi0(x)^2 on the real trigonometric basis.

    For DBC the coefficients are the odd-sector (sine) expansion of
    sgn(x) Phi(x); only that sector drives the Dirichlet correction.
    Indexing: entry position K + k holds mode k (k < 0 sine, k > 0 cosine).
    """

    phi_hat: np.ndarray
    params: LatticeParams

    @property
    def k_max(self) -> int:
        return (self.phi_hat.size - 1) // 2

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)


def phi_field(
    phi0: NlsField,
    params: LatticeParams,
    k_max: int | None = None,
    n_quad: int = 1 << 15,
) -> CorrectionField:
    """Project Phi = -i phi0^2 onto the basis sector that drives z1.

    DBC: sine coefficients of the odd extension sgn(x) Phi(x), computed on
    a fine quadrature grid (the sgn factor makes the product only piecewise
    smooth; this is where the k^-3 law originates).  PBC: plain torus
    coefficients of Phi.  Warns when phi0 is not purely imaginary (the
    zero-velocity assumption behind the closed-form kernel).
    """
    if k_max is None:
        k_max = min(8 * params.N, n_quad // 4)
    if 2 * k_max >= n_quad:
        raise ContractError("n_quad too small for requested k_max")
    # phi0 values on the fine grid (exact trigonometric interpolation)
    spec = np.zeros(n_quad, dtype=complex)
    kf = phi0.k_max
    spec[: kf + 1] = phi0.coeff[kf:]
    spec[n_quad - kf :] = phi0.coeff[:kf]
    values = np.fft.ifft(spec) * (n_quad / np.sqrt(2.0 * np.pi))
    if np.max(np.abs(values.real), initial=0.0) > 1e-12 * max(
        1.0, np.max(np.abs(values))
    ):
        warnings.warn("phi0 is not purely imaginary; kernel assumes zero velocity")
    big = -1j * values * values
    if params.bc == DBC:
        x = 2.0 * np.pi * np.arange(n_quad) / n_quad
        sgn = np.where(x < np.pi, 1.0, -1.0)
        sgn[0] = 0.0
        sgn[np.isclose(x, np.pi)] = 0.0
        big = big * sgn
    proj = np.fft.fft(big) * (np.sqrt(2.0 * np.pi) / n_quad)
    cexp = np.empty(2 * k_max + 1, dtype=complex)
    cexp[k_max:] = proj[: k_max + 1]
    cexp[:k_max] = proj[n_quad - k_max :]
    return CorrectionField(exp_to_real(cexp, params.bc), params)


def sine_quadrature_coeff(values_fn, k: int, n: int = 1 << 16) -> float:
    """Independent oracle: int_0^pi f(x) sin(k x) dx by composite Simpson."""
    from scipy.integrate import simpson

    x = np.linspace(0.0, np.pi, n + 1)
    return float(simpson(values_fn(x) * np.sin(k * x), x=x))


def response_kernel(omega, t: float, drive: float = 2.0):
    """Closed-form Duhamel kernel K_w(t) with K_w(0) = 0 and dK_w/dt(0) = -i.

    Requires |drive - omega| bounded away from zero (no resonance;
    omega <= sqrt(1+4a) < 2 holds whenever a < 3/4).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(np.abs(drive - w) < 1e-9):
        raise ContractError("resonant drive: |Omega - omega| ~ 0 (needs a < 3/4)")
    c = (2.0 * w**2 - drive**2) / (2.0 * w * (drive**2 - w**2))
    return (
        c * np.exp(1j * w * t)
        - np.exp(1j * drive * t) / (4.0 * (drive - w))
        + np.exp(-1j * drive * t) / (4.0 * (drive + w))
        + 1.0 / (2.0 * w)
    )


def _dressed_response(phi_hat: np.ndarray, k: np.ndarray, params: LatticeParams, t: float):
    """zeta coefficients of the correction on the given mode set."""
    w = omega_of(params, k)
    # S = -i Phi_hat on the driving sector
    s_coeff = -1j * np.asarray(phi_hat, dtype=complex)
    psi = -(params.alpha / (SQRT2 * np.sqrt(w))) * 1j * response_kernel(w, t) * s_coeff
    c_plus = 0.5 * (np.sqrt(w) + 1.0 / np.sqrt(w))
    c_minus = 0.5 * (np.sqrt(w) - 1.0 / np.sqrt(w))
    return c_plus * psi + c_minus * np.conj(psi)


def psi10(corr: CorrectionField, t: float) -> np.ndarray:
    """Correction coefficients on the real trigonometric basis at time t.

    Vanishes identically at t = 0 and for alpha = 0; the envelope
    |psi10_k| <= (20 alpha / (6 sqrt2)) |Phi_hat_k| holds for all t.
    """
    if corr.params.alpha == 0.0:
        return np.zeros_like(np.asarray(corr.phi_hat, dtype=complex))
    return _dressed_response(corr.phi_hat, corr.k, corr.params, t)


def z10(corr: CorrectionField, t: float, params: LatticeParams) -> SiteState:
    """Correction as a lattice state: p_j + i q_j = sqrt2 zeta(mu j).

    The coefficients are folded onto the lattice first (every multiplier is
    aliasing-invariant, so folding and the kernel commute).
    """
    if params.bc != corr.params.bc or params.N != corr.params.N:
        raise ContractError("correction field built for different lattice")
    zeta_real = psi10(corr, t)
    bins = fold_to_lattice_bins(real_to_exp(zeta_real, params.bc), params)
    m = 2 * params.N + 2
    spec = np.roll(bins * np.sqrt(params.mu), -(params.N + 1))
    values = np.fft.ifft(spec) * (m / np.sqrt(2.0 * np.pi))
    if params.bc == DBC:
        values = values[1 : params.N + 1]
    return SiteState(SQRT2 * values.real, SQRT2 * values.imag, t)


def chi01_generating(psi: np.ndarray, alpha: float, step: np.ndarray | None = None) -> float:
    """Real generating function of the leading canonical transformation.

    chi01 = (alpha/(6 sqrt2)) sum_j s_j [ (psi^3 + conj^3)/3
                                          - 3 |psi|^2 (psi + conj) ].
    """
    psi = np.asarray(psi, dtype=complex)
    s = np.ones(psi.size) if step is None else np.asarray(step, dtype=float)
    cubic = (psi**3 + np.conj(psi) ** 3) / 3.0
    mixed = 3.0 * np.abs(psi) ** 2 * (psi + np.conj(psi))
    total = np.sum(s * (cubic - mixed))
    return float(total.real) * alpha / (6.0 * SQRT2)


def chi01_field(psi: np.ndarray, alpha: float, step: np.ndarray | None = None) -> np.ndarray:
    """Hamiltonian vector field of chi01: X_j = i d chi01 / d conj(psi_j).

    X_j = (i alpha/(6 sqrt2)) s_j (conj(psi_j)^2 - 3 psi_j^2 - 6 |psi_j|^2).
    The short-time correction is  mu^2 zeta1 = -e^{At} X(zeta0) + X(e^{it} zeta0).
    """
    psi = np.asarray(psi, dtype=complex)
    if alpha == 0.0:
        return np.zeros_like(psi)
    s = 1.0 if step is None else np.asarray(step, dtype=float)
    return (
        (1j * alpha / (6.0 * SQRT2))
        * s
        * (np.conj(psi) ** 2 - 3.0 * psi**2 - 6.0 * np.abs(psi) ** 2)
    )


# ---------------------------------------------------------------------------
# measuring the true error


@dataclass
class ErrorRecord:
    """The error z1 at one instant, with its weighted norms.

    zeta_abs holds |(p_hat + i q_hat)/sqrt2| per canonical lattice mode
    (plain transforms, no frequency weights); norms maps (s, sigma) to the
    phase-space norm of z1.
    """

    t: float
    p1: np.ndarray
    q1: np.ndarray
    zeta_abs: np.ndarray
    norms: dict[tuple[float, float], float]


def complex_mode_coeffs(params: LatticeParams, state: SiteState) -> np.ndarray:
    """Unweighted complex mode amplitudes (p_hat + i q_hat)/sqrt2."""
    pt = _analyze(params, state.p, reference=False)
    qt = _analyze(params, state.q, reference=False)
    return (pt + 1j * qt) / SQRT2


def extract_error(
    z: SiteState,
    field: NlsField,
    t: float,
    params: LatticeParams,
    norm_list: tuple[tuple[float, float], ...] = ((2.0, 0.0), (2.4, 0.0), (1.0, 0.05)),
    scale: ScaleMap | None = None,
) -> ErrorRecord:
    """z1 := (z - mu z^a)/mu^2 with weighted norms of its mode amplitudes.

    z must be the integrated state started from z(0) = mu z^a(0); field must
    be evolved to the slow time matching t.
    """
    if abs(z.t - t) > 1e-9 * max(1.0, abs(t)):
        raise ContractError(f"state at t = {z.t} but error requested at t = {t}")
    if scale is None:
        scale = scale_map(params)
    _, za = build_approx(field, t, params, scale)
    inv_mu2 = 1.0 / scale.mu**2
    z1 = SiteState((z.p - za.p) * inv_mu2, (z.q - za.q) * inv_mu2, t)
    modes = to_modes(params, z1)
    norms = {
        (s, sigma): phase_norm(modes, params, NormWeights(s, sigma, scale.mu))
        for (s, sigma) in norm_list
    }
    return ErrorRecord(t, z1.p, z1.q, np.abs(complex_mode_coeffs(params, z1)), norms)


def compare_correction(
    err: ErrorRecord, z10_state: SiteState, params: LatticeParams, w: NormWeights
) -> float:
    """Weighted phase-space norm of z1 - z10 at matching times."""
    if abs(err.t - z10_state.t) > 1e-9 * max(1.0, abs(err.t)):
        raise ContractError("error record and correction state are at different times")
    diff = SiteState(err.p1 - z10_state.p, err.q1 - z10_state.q, err.t)
    return phase_norm(to_modes(params, diff), params, w)
