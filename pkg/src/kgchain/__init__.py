"""Klein-Gordon oscillator chains under Dirichlet and periodic boundary
conditions: symplectic simulation, averaged mode-energy spectra, the
Schroedinger continuum limit, and the explicit first-order correction
that separates the two boundary conditions in Fourier space.
"""

from .lattice import (
    DBC,
    PBC,
    ContractError,
    LatticeParams,
    OddSymmetryError,
    SiteState,
    energy_density,
    eval_energy,
    eval_energy_extended,
    eval_force,
    eval_force_extended,
    force_kernel,
    involution,
    odd_asymmetry,
    odd_extend,
    quadratic_energy,
    restrict_odd,
    step_sequence,
)
from .spectral import (
    FrequencyTable,
    ModeState,
    NormWeights,
    basis_matrix,
    basis_value,
    frequencies,
    from_modes,
    lattice_weights,
    mode_energies,
    mode_indices,
    phase_norm,
    seq_norm,
    to_modes,
)
from .integrate import (
    LEAPFROG,
    YOSHIDA4,
    IntegratorConfig,
    NonFiniteStateError,
    integrate,
    richardson_order,
    step,
)
from .nls import (
    NlsField,
    ScaleMap,
    build_approx,
    evolve_to,
    exp_to_real,
    field_from_trig,
    gamma_coeff,
    gamma_slow,
    gamma_tilde,
    grid_values,
    interpolate,
    nls_invariants,
    nls_step,
    real_to_exp,
    restrict,
    restrict_pointwise,
    scale_map,
)

__version__ = "0.1.0"
