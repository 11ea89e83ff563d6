"""Split-step solver for the limiting Schroedinger equation and the
lattice <-> torus dictionary (interpolation, restriction, approximate
solution).

Equation and conventions
------------------------
The field phi(x, tau) on the 2 pi torus obeys

    -i d_tau phi = -phi_xx + gamma phi |phi|^2,

so a plane wave A e^{i k x} rotates as e^{i (k^2 + gamma A^2) tau}.  The
solver stores complex coefficients c_k on the exponential basis
E_k = e^{ikx}/sqrt(2 pi), |k| <= K, and advances with Strang splitting:
exact linear half-step (multiplier e^{+i k^2 dtau/2}), exact pointwise
nonlinear rotation e^{+i gamma |phi|^2 dtau} on the collocation grid,
linear half-step.  Collocation uses the 2(N+1)-point grid aligned with
the lattice sites (x_j = mu j, mu = pi/(N+1)); products are dealiased by
the 2/3 rule.

Slow time and gauge
-------------------
A small-amplitude long-wave lattice solution is approximated by

    p_j(t) + i q_j(t)  ~  mu e^{it} phi(mu j, tau),   tau = (a/2) mu^2 t,

because the lattice dispersion is omega_k = 1 + (a/2) mu^2 k^2 + O(mu^4)
and the resonant quartic term rotates p_j + i q_j at the rate
gamma~ |p_j + i q_j|^2 (its single-site limit is the classical
amplitude-frequency shift omega(A) = 1 + (3/8) beta A^2).  The matching
equation coefficient is gamma_slow = 2 gamma~ / a; gamma_coeff and
gamma_tilde report the plain formula values (3/(8a))(beta - (10/9)
alpha^2) and (3/8)(...) used in the stationary-coefficient bookkeeping.

Index conventions
-----------------
On the real trigonometric basis (delta/sqrt(pi)) sin(|k|x) sits at k < 0
and cos(kx)/sqrt(pi) at k > 0, while lattice sines sit at k > 0; the
restriction identity e^c_k(mu j) = mu^{-1/2} e_{-k}(j) therefore carries
a sign flip of the index, implemented by LATTICE_OF_FUNCTION_MODE.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lattice import DBC, PBC, ContractError, LatticeParams, SiteState
from .spectral import _analyze

SQRT_2PI = np.sqrt(2.0 * np.pi)

#: a function-basis mode k is carried by lattice mode -k (sectors swap sign)
LATTICE_OF_FUNCTION_MODE = -1


def gamma_tilde(params: LatticeParams) -> float:
    """Resonant quartic coefficient (3/8)(beta - (10/9) alpha^2)."""
    return 0.375 * (params.beta - (10.0 / 9.0) * params.alpha**2)


def gamma_coeff(params: LatticeParams) -> float:
    """The coefficient (3/(8a))(beta - (10/9) alpha^2); requires a > 0."""
    if params.a <= 0:
        raise ContractError("the continuum limit requires a > 0")
    return gamma_tilde(params) / params.a


def gamma_slow(params: LatticeParams) -> float:
    """Equation coefficient paired with the slow time tau = (a/2) mu^2 t.

    The lattice dispersion advances phases by (a/2) mu^2 k^2 per unit t and
    the resonant quartic term by gamma~ |p + iq|^2 (the single-oscillator
    limit of the latter is the Duffing shift omega(A) = 1 + (3/8) beta A^2).
    Matching both against -i phi_tau = -phi_xx + gamma phi |phi|^2 forces
    d tau/d t = (a/2) mu^2 and gamma_slow = 2 gamma~ / a.
    """
    if params.a <= 0:
        raise ContractError("the continuum limit requires a > 0")
    return 2.0 * gamma_tilde(params) / params.a


@dataclass(frozen=True)
class ScaleMap:
    """Two-scale relations between lattice time and the slow field time."""

    N: int
    a: float

    @property
    def mu(self) -> float:
        return np.pi / (self.N + 1)

    @property
    def slow_rate(self) -> float:
        """d tau / d t = (a/2) mu^2."""
        return 0.5 * self.a * self.mu**2

    def tau_of_t(self, t: float) -> float:
        return self.slow_rate * t

    def t_of_tau(self, tau: float) -> float:
        return tau / self.slow_rate

    def gauge(self, t: float) -> complex:
        return complex(np.exp(1j * t))


def scale_map(params: LatticeParams) -> ScaleMap:
    if params.a <= 0:
        raise ContractError("the continuum limit requires a > 0")
    return ScaleMap(params.N, params.a)


@dataclass
class NlsField:
    """Complex field on the torus: coefficients c_k, k = -K..K.

    n_half = N+1 fixes the 2(N+1)-point collocation grid; gamma is the
    equation coefficient used by nls_step.
    """

    coeff: np.ndarray
    tau: float
    gamma: float
    n_half: int
    dealias: bool = True

    def __post_init__(self):
        self.coeff = np.asarray(self.coeff, dtype=complex)
        if self.coeff.ndim != 1 or self.coeff.size % 2 != 1:
            raise ContractError("coeff must be a 1-d array of odd length 2K+1")
        if self.k_max > self.n_half - 1:
            raise ContractError(
                f"K = {self.k_max} does not fit the {2 * self.n_half}-point grid"
            )
        if not np.all(np.isfinite(self.coeff.view(float))):
            raise ContractError("non-finite coefficients")

    @property
    def k_max(self) -> int:
        return (self.coeff.size - 1) // 2

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    @property
    def n_grid(self) -> int:
        return 2 * self.n_half

    def copy(self) -> "NlsField":
        return replace(self, coeff=self.coeff.copy())


def grid_points(n_half: int) -> np.ndarray:
    """Collocation nodes x_i = 2 pi i / (2 n_half) = mu * i."""
    m = 2 * n_half
    return 2.0 * np.pi * np.arange(m) / m


def _pack_fft(coeff: np.ndarray, m: int) -> np.ndarray:
    """Centered coefficients -> length-m fft-order spectrum."""
    k_max = (coeff.size - 1) // 2
    out = np.zeros(m, dtype=complex)
    out[: k_max + 1] = coeff[k_max:]
    out[m - k_max :] = coeff[:k_max]
    return out


def grid_values(field: NlsField, oversample: int = 1) -> np.ndarray:
    """Collocation values of phi, optionally on an oversampled grid."""
    m = field.n_grid * oversample
    spec = _pack_fft(field.coeff, m)
    return np.fft.ifft(spec) * (m / SQRT_2PI)


def _project(values: np.ndarray, k_max: int) -> np.ndarray:
    m = values.size
    spec = np.fft.fft(values) * (SQRT_2PI / m)
    out = np.empty(2 * k_max + 1, dtype=complex)
    out[k_max:] = spec[: k_max + 1]
    out[:k_max] = spec[m - k_max :]
    return out


def dealias_mask(field: NlsField) -> np.ndarray:
    """Keep |k| <= floor(2 n_half / 3) (2/3 rule for the cubic product)."""
    cut = (2 * field.n_half) // 3
    return np.abs(field.k) <= cut


def nls_step(field: NlsField, d_tau: float) -> NlsField:
    """One Strang step; both substeps are exact, splitting error O(d_tau^2)."""
    if d_tau <= 0:
        raise ContractError("d_tau must be > 0")
    k2 = field.k.astype(float) ** 2
    half = np.exp(0.5j * k2 * d_tau)
    c = field.coeff * half
    if field.gamma != 0.0:
        m = field.n_grid
        values = np.fft.ifft(_pack_fft(c, m)) * (m / SQRT_2PI)
        values *= np.exp(1j * field.gamma * d_tau * np.abs(values) ** 2)
        c = _project(values, field.k_max)
        if field.dealias:
            c = np.where(dealias_mask(field), c, 0.0)
    c *= half
    return replace(field, coeff=c, tau=field.tau + d_tau)


def default_dtau(field: NlsField) -> float:
    """Step so the fastest significant linear phase stays below 0.1 rad.

    The effective bandwidth counts modes above 1e-8 of the peak amplitude;
    roundoff-level content far in the dealiased band would otherwise force
    absurdly small steps without improving accuracy.
    """
    mags = np.abs(field.coeff)
    floor = 1e-8 * np.max(mags, initial=0.0)
    significant = np.abs(field.k[mags > floor]) if floor > 0 else np.array([1])
    k_eff = max(1, int(np.max(significant, initial=1)))
    return 1e-3 * (np.pi / k_eff) ** 2


def evolve_to(field: NlsField, tau_target: float, d_tau: float | None = None) -> NlsField:
    """Advance with uniform steps to exactly tau_target (>= field.tau)."""
    gap = tau_target - field.tau
    if gap < 0:
        raise ContractError("cannot evolve backwards in tau")
    if gap == 0:
        return field.copy()
    if d_tau is None:
        d_tau = default_dtau(field)
    n = max(1, int(np.ceil(gap / d_tau - 1e-12)))
    h = gap / n
    out = field
    for _ in range(n):
        out = nls_step(out, h)
    out.tau = tau_target  # kill accumulated roundoff in the time stamp
    return out


def nls_invariants(field: NlsField) -> tuple[float, float]:
    """(mass, hamiltonian): sum |c_k|^2 and sum k^2 |c_k|^2 + (gamma/2) int |phi|^4.

    The quartic integral uses a doubled (dealiased) quadrature grid, exact
    for the retained band.
    """
    mass = float(np.sum(np.abs(field.coeff) ** 2))
    k2 = field.k.astype(float) ** 2
    quad = float(np.sum(k2 * np.abs(field.coeff) ** 2))
    values = grid_values(field, oversample=2)
    m2 = values.size
    quartic = float(np.sum(np.abs(values) ** 4)) * (2.0 * np.pi / m2)
    return mass, quad + 0.5 * field.gamma * quartic


# ---------------------------------------------------------------------------
# real trigonometric basis views


def delta_pd(bc: str) -> float:
    """Sine-sector normalization: sqrt(2) for DBC, 1 for PBC."""
    return np.sqrt(2.0) if bc == DBC else 1.0


def exp_to_real(coeff: np.ndarray, bc: str) -> np.ndarray:
    """Exponential coefficients -> real-basis coefficients, same indexing.

    Output index k > 0 holds the cos(kx)/sqrt(pi) coefficient, k < 0 the
    (delta/sqrt(pi)) sin(|k|x) coefficient, k = 0 the constant mode.
    """
    coeff = np.asarray(coeff, dtype=complex)
    k_max = (coeff.size - 1) // 2
    d = delta_pd(bc)
    out = np.empty_like(coeff)
    out[k_max] = coeff[k_max]
    cp = coeff[k_max + 1 :]
    cm = coeff[k_max - 1 :: -1]  # c_{-1}, c_{-2}, ...
    out[k_max + 1 :] = (cp + cm) / np.sqrt(2.0)
    out[k_max - 1 :: -1] = 1j * (cp - cm) / (np.sqrt(2.0) * d)
    return out


def real_to_exp(coeff: np.ndarray, bc: str) -> np.ndarray:
    """Inverse of exp_to_real."""
    coeff = np.asarray(coeff, dtype=complex)
    k_max = (coeff.size - 1) // 2
    d = delta_pd(bc)
    out = np.empty_like(coeff)
    out[k_max] = coeff[k_max]
    cos_c = coeff[k_max + 1 :]
    sin_c = coeff[k_max - 1 :: -1]
    out[k_max + 1 :] = (cos_c - 1j * d * sin_c) / np.sqrt(2.0)
    out[k_max - 1 :: -1] = (cos_c + 1j * d * sin_c) / np.sqrt(2.0)
    return out


def field_from_trig(
    params: LatticeParams,
    sin: dict[int, complex] | None = None,
    cos: dict[int, complex] | None = None,
    dc: complex = 0.0,
    gamma: float | None = None,
    k_max: int | None = None,
) -> NlsField:
    """Build a field from plain trigonometric amplitudes.

    phi(x) = dc + sum_m sin[m] * sin(m x) + sum_m cos[m] * cos(m x);
    amplitudes are plain (no 1/sqrt(pi) factors).  gamma defaults to the
    lattice-matching gamma_slow(params).
    """
    if gamma is None:
        gamma = gamma_slow(params)
    if k_max is None:
        k_max = params.N  # full lattice-matching band
    if k_max > params.N:
        raise ContractError("k_max must not exceed N")
    c = np.zeros(2 * k_max + 1, dtype=complex)

    def at(k):
        return k_max + k

    c[at(0)] = dc * SQRT_2PI
    for m, amp in (sin or {}).items():
        if not 1 <= m <= k_max:
            raise ContractError(f"sine index {m} out of range")
        c[at(m)] += amp * SQRT_2PI / 2j
        c[at(-m)] -= amp * SQRT_2PI / 2j
    for m, amp in (cos or {}).items():
        if not 1 <= m <= k_max:
            raise ContractError(f"cosine index {m} out of range")
        c[at(m)] += amp * SQRT_2PI / 2.0
        c[at(-m)] += amp * SQRT_2PI / 2.0
    return NlsField(c, tau=0.0, gamma=gamma, n_half=params.N + 1)


# ---------------------------------------------------------------------------
# interpolation and restriction


def interpolate(lattice_coeff: np.ndarray, params: LatticeParams) -> np.ndarray:
    """Lattice sequence -> function coefficients sqrt(mu) q_hat_k.

    Input: plain (unweighted) lattice-basis coefficients in canonical mode
    order.  Output: centered exponential coefficients of the interpolating
    function, index range |k| <= N.  An isometry between the weighted
    sequence norm (scale mu) and the function norm.

    The PBC alternating mode has no unaliased continuum partner below the
    Nyquist frequency and must be zero.
    """
    lattice_coeff = np.asarray(lattice_coeff, dtype=complex)
    n = params.N
    if lattice_coeff.shape != (params.n_sites,):
        raise ContractError("lattice coefficient array length mismatch")
    root_mu = np.sqrt(params.mu)
    real = np.zeros(2 * n + 1, dtype=complex)  # he.300 indexing, |k| <= N
    if params.bc == DBC:
        # lattice sine mode k -> function sine sector (index -k)
        real[n - 1 :: -1] = root_mu * lattice_coeff
    else:
        if abs(lattice_coeff[-1]) > 0:
            raise ContractError("PBC alternating mode has no continuum image")
        real[n] = root_mu * lattice_coeff[0]
        real[n - 1 :: -1] = root_mu * lattice_coeff[1 : 2 * n + 1 : 2]  # sines
        real[n + 1 :] = root_mu * lattice_coeff[2 : 2 * n + 2 : 2]  # cosines
    return real_to_exp(real, params.bc)


def fold_to_lattice_bins(coeff: np.ndarray, params: LatticeParams) -> np.ndarray:
    """Alias exponential coefficients onto the 2(N+1) lattice bins.

    Returns length-M spectrum indexed by r = -(N+1)..N (stored centered at
    position r + N + 1), scaled by mu^{-1/2}: the exponential coefficients
    of the restricted sequence on the lattice exponential basis.
    """
    coeff = np.asarray(coeff, dtype=complex)
    k_max = (coeff.size - 1) // 2
    m = 2 * params.N + 2
    bins = np.zeros(m, dtype=complex)
    ks = np.arange(-k_max, k_max + 1)
    r = np.mod(ks + params.N + 1, m)  # position of residue class
    np.add.at(bins, r, coeff)
    return bins / np.sqrt(params.mu)


def restrict(coeff: np.ndarray, params: LatticeParams) -> np.ndarray:
    """Function coefficients -> lattice sequence by aliasing (folding).

    Equivalent to sampling the function at x = mu j; inverse of interpolate
    on its image.  Returns complex lattice-basis coefficients in canonical
    order (take .real for a real function).

    On a Dirichlet lattice the odd projection is applied first: sampling and
    folding agree on the odd (sine) sector, the only one a clamped chain
    represents, and every Dirichlet object in this package lives there.
    """
    bins = fold_to_lattice_bins(coeff, params)
    n = params.N
    cl_plus = bins[n + 2 :]  # r = 1..N
    cl_minus = bins[n : 0 : -1]  # r = -1..-N
    if params.bc == DBC:
        return 0.5j * (cl_plus - cl_minus)
    out = np.empty(2 * n + 2, dtype=complex)
    out[0] = bins[n + 1]
    out[1 : 2 * n + 1 : 2] = 1j * (cl_plus - cl_minus) / np.sqrt(2.0)
    out[2 : 2 * n + 2 : 2] = (cl_plus + cl_minus) / np.sqrt(2.0)
    out[-1] = bins[0]  # r = -(N+1), the alternating mode
    return out


def restrict_pointwise(coeff: np.ndarray, params: LatticeParams) -> np.ndarray:
    """Restriction by direct evaluation at the lattice points (cross-check).

    Matches restrict(): on a Dirichlet lattice the sampled values are odd
    projected across j <-> -j before the sine analysis.
    """
    coeff = np.asarray(coeff, dtype=complex)
    k_max = (coeff.size - 1) // 2
    x = grid_points(params.N + 1)
    ks = np.arange(-k_max, k_max + 1)
    values = (coeff[None, :] * np.exp(1j * np.outer(x, ks))).sum(axis=1) / SQRT_2PI
    if params.bc == DBC:
        n = params.N
        values = 0.5 * (values[1 : n + 1] - values[: n + 1 : -1])
    re = _analyze(params, values.real.copy(), reference=False)
    im = _analyze(params, values.imag.copy(), reference=False)
    return re + 1j * im


def lattice_site_values(coeff: np.ndarray, params: LatticeParams) -> np.ndarray:
    """Values of the function at the moving lattice sites (complex)."""
    coeff = np.asarray(coeff, dtype=complex)
    m = 2 * params.N + 2
    bins = fold_to_lattice_bins(coeff, params) * np.sqrt(params.mu)
    spec = np.roll(bins, -(params.N + 1))  # centered -> fft order
    values = np.fft.ifft(spec) * (m / SQRT_2PI)
    return values[1 : params.N + 1] if params.bc == DBC else values


def build_approx(
    field: NlsField, t: float, params: LatticeParams, scale: ScaleMap | None = None
) -> tuple[SiteState, SiteState]:
    """Approximate lattice solution at time t from the evolved field.

    Requires field.tau == tau_of_t(t).  Returns (z_a, mu * z_a): the
    unscaled profile p^a_j + i q^a_j = e^{it} phi(mu j, tau) and the
    physical small-amplitude state.
    """
    if scale is None:
        scale = scale_map(params)
    expected = scale.tau_of_t(t)
    if abs(field.tau - expected) > 1e-9 * max(1.0, abs(expected)):
        raise ContractError(
            f"field at tau = {field.tau} but t = {t} needs tau = {expected}"
        )
    u = scale.gauge(t) * lattice_site_values(field.coeff, params)
    z_a = SiteState(u.real.copy(), u.imag.copy(), t)
    z_phys = SiteState(scale.mu * u.real, scale.mu * u.imag, t)
    return z_a, z_phys
