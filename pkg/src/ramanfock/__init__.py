"""Selective Raman atom-field interaction in cavity QED.

Conditional preparation of large Fock states and Wigner-function
reconstruction from displaced photon statistics, with the effective
two-level model checked against the full three-level dynamics.
"""

from .errors import (
    ConfigError,
    DegenerateOutcomeError,
    InfeasiblePreparationError,
    IntegratorError,
    RamanFockError,
    TruncationError,
)
from .hilbert import (
    AtomLevel,
    FieldState,
    JointState,
    Operator,
    TruncatedFockSpace,
    annihilation,
    coherent_state,
    default_dim,
    displacement,
    fock_state,
    inner,
)
from .raman import (
    Doublet,
    RamanParams,
    compensation_shift,
    detuning_delta_n,
    effective_hamiltonian,
    eigendoublets,
    full_hamiltonian,
    omega_n,
    pi_time,
    rabi_g_n,
)
from .dynamics import PropagationResult, analytic_propagate, numeric_propagate_full, unitarity_probe
from .postselect import (
    ConditionedField,
    b_coefficients,
    condition_on_atom,
    excited_probability,
    fidelity,
    photon_distribution,
)
from .protocols import (
    Coherent,
    Fock,
    FockPrepReport,
    WignerGrid,
    exact_wigner,
    measure_photon_statistics,
    prepare_fock,
    prepare_fock_sequential,
    reconstruct_wigner,
    selectivity_margin,
    square_grid,
)

__version__ = "0.1.0"
