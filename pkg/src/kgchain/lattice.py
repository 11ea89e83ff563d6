"""Klein-Gordon chain: model definition, energy, forces, odd extension.

The chain is a line of unit-mass particles in the on-site potential
V(x) = x^2/2 + alpha*x^3/3 + beta*x^4/4, coupled to nearest neighbours by
harmonic springs W(x) = a*x^2/2.  Two boundary conditions are supported:

* DBC -- Dirichlet.  Moving sites j = 1..N with clamped walls
  q_0 = q_{N+1} = 0.  Arrays hold the N moving sites.
* PBC -- periodic.  Sites j = -(N+1)..N with wrap-around, 2N+2 sites in
  total.  Arrays are stored in wrapped order: storage index i holds the
  site with physical index i for i <= N and i - (2N+2) for i > N, so
  storage is plain DFT order and np.roll implements the neighbour shift.

A Dirichlet state embeds into the periodic chain of doubled size through
the odd (skew-symmetric) extension q_{-j} = -q_j, p_{-j} = -p_j.  The
even quartic term extends untouched; the cubic term must be weighted by
the step sequence s_j (sign of the site index) for the extension to
commute with the dynamics.

Force expressions here keep an operand order that makes negation exact in
IEEE arithmetic, so odd initial data stay odd bit-for-bit under the
extended flow and the Dirichlet run coincides bit-for-bit with the
restriction of the extended run.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

DBC = "DBC"
PBC = "PBC"

# Coupling range where the normal-form construction behind the metastable
# spectra is proved; larger a is allowed but flagged.
A_THEOREM_MAX = 1.0 / 3.0


class ContractError(ValueError):
    """An operation was called outside its contract."""


class OddSymmetryError(ContractError):
    """Input expected to be skew-symmetric is not.

    Carries the measured asymmetry in ``asymmetry``.
    """

    def __init__(self, asymmetry: float, tol: float):
        self.asymmetry = asymmetry
        self.tol = tol
        super().__init__(
            f"state is not odd: max asymmetry {asymmetry:.3e} exceeds tol {tol:.3e}"
        )


@dataclass(frozen=True)
class LatticeParams:
    """Static description of a chain.

    N is the mode-count parameter: the DBC chain has N moving sites, the
    PBC chain 2N+2 sites.  a >= 0 is the spring coupling, alpha/beta the
    cubic/quartic on-site coefficients.
    """

    N: int
    a: float
    alpha: float = 0.0
    beta: float = 0.0
    bc: str = DBC

    def __post_init__(self):
        if self.N < 2:
            raise ContractError(f"N must be >= 2, got {self.N}")
        if self.a < 0 or self.alpha < 0 or self.beta < 0:
            raise ContractError("a, alpha, beta must all be >= 0")
        if self.bc not in (DBC, PBC):
            raise ContractError(f"bc must be {DBC!r} or {PBC!r}, got {self.bc!r}")
        if self.a >= A_THEOREM_MAX:
            warnings.warn(
                f"a = {self.a} is outside the a < 1/3 theorem regime; "
                "results are still computed",
                stacklevel=2,
            )

    @property
    def n_sites(self) -> int:
        return self.N if self.bc == DBC else 2 * self.N + 2

    @property
    def mu(self) -> float:
        """Lattice spacing pi/(N+1) of the continuum embedding."""
        return np.pi / (self.N + 1)

    @property
    def omega_max(self) -> float:
        return float(np.sqrt(1.0 + 4.0 * self.a))

    def pbc_counterpart(self) -> "LatticeParams":
        """The periodic chain a DBC chain odd-extends into."""
        return LatticeParams(self.N, self.a, self.alpha, self.beta, PBC)


@dataclass
class SiteState:
    """Momenta/positions per moving site at one instant."""

    p: np.ndarray
    q: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.p.shape != self.q.shape or self.p.ndim != 1:
            raise ContractError("p and q must be 1-d arrays of equal length")

    def copy(self) -> "SiteState":
        return SiteState(self.p.copy(), self.q.copy(), self.t)


def _check_state(params: LatticeParams, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (params.n_sites,):
        raise ContractError(
            f"array length {values.shape} does not match {params.bc} "
            f"site count {params.n_sites}"
        )
    if not np.all(np.isfinite(values)):
        raise ContractError("non-finite entries in state array")
    return values


def step_sequence(params: LatticeParams) -> np.ndarray:
    """Step sequence s_j on the periodic lattice: sign of the site index.

    s_j = 1 for j >= 1, s_0 = 0, s_j = -1 for j <= -1 (in wrapped storage
    the negative sites occupy indices N+1..2N+1).
    """
    if params.bc != PBC:
        raise ContractError("step_sequence is defined on the PBC lattice")
    s = np.empty(params.n_sites)
    s[0] = 0.0
    s[1 : params.N + 1] = 1.0
    s[params.N + 1 :] = -1.0
    return s


def _laplacian_dbc(q: np.ndarray) -> np.ndarray:
    # ghost zeros at both walls; (q_{j+1} + q_{j-1}) first so the whole
    # expression negates exactly under q -> -q
    qp = np.empty(q.size)
    qp[:-1] = q[1:]
    qp[-1] = 0.0
    qm = np.empty(q.size)
    qm[1:] = q[:-1]
    qm[0] = 0.0
    return (qp + qm) - 2.0 * q


def _laplacian_pbc(q: np.ndarray) -> np.ndarray:
    return (np.roll(q, -1) + np.roll(q, 1)) - 2.0 * q


def eval_force(params: LatticeParams, q: np.ndarray) -> np.ndarray:
    """Force F_j = -V'(q_j) + a*(q_{j+1} - 2 q_j + q_{j-1}).

    DBC applies the ghost values q_0 = q_{N+1} = 0 internally.
    """
    q = _check_state(params, q)
    lap = _laplacian_dbc(q) if params.bc == DBC else _laplacian_pbc(q)
    f = params.a * lap - q
    if params.alpha:
        f -= params.alpha * q * q
    if params.beta:
        f -= params.beta * (q * q * q)
    return f


def force_kernel(params: LatticeParams, extended: bool = False):
    """Unchecked force closure for hot loops.

    Skips the per-call contract validation of eval_force; integration
    drivers detect non-finite states at their sampling instants instead.
    """
    a, alpha, beta = params.a, params.alpha, params.beta
    if extended:
        if params.bc != PBC:
            raise ContractError("the extended model lives on the PBC lattice")
        s = step_sequence(params)
    lap = _laplacian_dbc if params.bc == DBC else _laplacian_pbc

    def force(q: np.ndarray) -> np.ndarray:
        f = a * lap(q) - q
        if alpha:
            f -= alpha * (s * (q * q)) if extended else alpha * (q * q)
        if beta:
            f -= beta * (q * q * q)
        return f

    return force


def eval_force_extended(params: LatticeParams, q: np.ndarray) -> np.ndarray:
    """Force of the step-weighted periodic extension of the alpha-model.

    Identical to eval_force on the PBC lattice except that the cubic term
    carries the step sequence: F_j = ... - alpha * s_j * q_j^2 - beta q_j^3.
    This is the system a Dirichlet chain embeds into.
    """
    if params.bc != PBC:
        raise ContractError("the extended model lives on the PBC lattice")
    q = _check_state(params, q)
    f = params.a * _laplacian_pbc(q) - q
    if params.alpha:
        f -= params.alpha * (step_sequence(params) * (q * q))
    if params.beta:
        f -= params.beta * (q * q * q)
    return f


def _bond_energy(params: LatticeParams, q: np.ndarray) -> float:
    if params.bc == DBC:
        # N+1 bonds, two of them to the clamped walls
        d = np.diff(q, prepend=0.0, append=0.0)
    else:
        d = q - np.roll(q, 1)
    return 0.5 * params.a * float(np.dot(d, d))


def eval_energy(params: LatticeParams, state: SiteState) -> float:
    """Total energy H = sum p^2/2 + sum V(q) + sum a (q_j - q_{j-1})^2 / 2."""
    p = _check_state(params, state.p)
    q = _check_state(params, state.q)
    h = 0.5 * float(np.dot(p, p)) + 0.5 * float(np.dot(q, q))
    if params.alpha:
        h += params.alpha / 3.0 * float(np.sum(q**3))
    if params.beta:
        h += params.beta / 4.0 * float(np.sum(q**4))
    return h + _bond_energy(params, q)


def eval_energy_extended(params: LatticeParams, state: SiteState) -> float:
    """Energy whose gradient matches eval_force_extended (cubic term s_j q^3/3)."""
    if params.bc != PBC:
        raise ContractError("the extended model lives on the PBC lattice")
    p = _check_state(params, state.p)
    q = _check_state(params, state.q)
    h = 0.5 * float(np.dot(p, p)) + 0.5 * float(np.dot(q, q))
    if params.alpha:
        h += params.alpha / 3.0 * float(np.sum(step_sequence(params) * q**3))
    if params.beta:
        h += params.beta / 4.0 * float(np.sum(q**4))
    return h + _bond_energy(params, q)


def quadratic_energy(params: LatticeParams, state: SiteState) -> float:
    """Harmonic part H_0 only (drops the cubic and quartic terms)."""
    p = _check_state(params, state.p)
    q = _check_state(params, state.q)
    return (
        0.5 * float(np.dot(p, p))
        + 0.5 * float(np.dot(q, q))
        + _bond_energy(params, q)
    )


def energy_density(params: LatticeParams, state: SiteState) -> float:
    """Harmonic energy per moving site: H_0/N for DBC, H_0/(2N+2) for PBC.

    With this normalization the odd extension preserves the density up to
    N/(N+1), and per-mode energies pair-average consistently.
    """
    return quadratic_energy(params, state) / params.n_sites


def odd_extend(params: LatticeParams, state: SiteState) -> SiteState:
    """Skew-symmetric extension of a DBC state onto the 2N+2 periodic lattice.

    q_{-j} = -q_j with q_0 = q_{-(N+1)} = 0; same for p.
    """
    if params.bc != DBC:
        raise ContractError("odd_extend takes a DBC state")
    p = _check_state(params, state.p)
    q = _check_state(params, state.q)
    m = 2 * params.N + 2
    ep = np.zeros(m)
    eq = np.zeros(m)
    ep[1 : params.N + 1] = p
    eq[1 : params.N + 1] = q
    # storage m - j holds physical site -j
    ep[params.N + 2 :] = -p[::-1]
    eq[params.N + 2 :] = -q[::-1]
    return SiteState(ep, eq, state.t)


def odd_asymmetry(extended: SiteState) -> float:
    """Max deviation of a periodic state from skew symmetry."""
    m = extended.q.size
    n = m // 2 - 1
    asym = max(
        abs(extended.q[0]), abs(extended.p[0]),
        abs(extended.q[n + 1]), abs(extended.p[n + 1]),
    )
    for arr in (extended.p, extended.q):
        asym = max(asym, float(np.max(np.abs(arr[1 : n + 1] + arr[m - 1 : n + 1 : -1]))))
    return asym


def restrict_odd(extended: SiteState, tol: float = 1e-8) -> SiteState:
    """Inverse of odd_extend on its image: the j = 1..N slice.

    Raises OddSymmetryError (with the measured value) if the input deviates
    from skew symmetry by more than tol.
    """
    m = extended.q.size
    if m < 6 or m % 2:
        raise ContractError("extended state must have 2N+2 sites with N >= 2")
    asym = odd_asymmetry(extended)
    if asym > tol:
        raise OddSymmetryError(asym, tol)
    n = m // 2 - 1
    return SiteState(extended.p[1 : n + 1].copy(), extended.q[1 : n + 1].copy(), extended.t)


def involution(params: LatticeParams, state: SiteState) -> SiteState:
    """The symmetry q_j -> -q_{-j}, p_j -> -p_{-j} on the periodic lattice."""
    if params.bc != PBC:
        raise ContractError("involution is defined on the PBC lattice")
    p = _check_state(params, state.p)
    q = _check_state(params, state.q)

    def flip(arr):
        out = np.empty_like(arr)
        out[0] = -arr[0]
        out[1:] = -arr[:0:-1]
        return out

    return SiteState(flip(p), flip(q), state.t)
