"""Entangling atoms by homodyne detection of cavity-transmitted light.

Numerical toolkit for the transmission-based QND measurement of the number
of atoms in a probed ground state: cavity transfer functions, exact
homodyne-outcome densities with spontaneous-emission branches, fidelity
optimization at fixed success probability, Monte Carlo protocol statistics,
and an exact checker for the measurement-based CNOT gate built on the
entangled pairs the measurement produces.
"""

__version__ = "0.1.0"

from .cavity_optics import (
    CavityParams,
    SingularTransferError,
    cavity_transfer,
    displacement_sq,
    effective_cooperativity,
    transmission_amplitude,
)
from .distributions import (
    AcceptanceWindow,
    OutcomeModel,
    PathologicalWindowError,
    PulseConfig,
    UndefinedConditionalError,
    decay_branch_cdfs,
    fidelity_conditional,
    fidelity_repeated_bound,
    gaussian_cdf,
    mixture_cdf,
    mixture_total_mass,
    p0,
    p_decay_one,
    p_decay_two,
    p_no_decay,
    p_total,
    success_probability,
    window_mass_decay_one,
    window_mass_decay_two,
    window_mass_no_decay,
)
from .gate import (
    BASIS_LABELS,
    CORRECTION_TABLE,
    AtomState,
    CnotBranch,
    MeasurementOutcome,
    TwoAtomState,
    cnot_protocol,
    cnot_truth_output,
    conditional_qubit_swap,
    estimate_gate_error,
    level_pi_half_pulse,
    level_swap,
    measure_level,
    prepare_entangled_levels,
    state_phase,
    swap_f1_g1,
)
from .optimizer import (
    InfeasibleError,
    Mode,
    MonotonicityError,
    OptimizationProblem,
    OptimizationResult,
    ScalingFit,
    UnitaryComparisonParams,
    UnitaryErrorEstimate,
    finesse_requirement,
    fit_inverse_sqrt_scaling,
    fit_measurement_scaling,
    optimize,
    solve_upper_cut,
    sweep_curve,
    unitary_scheme_error,
    unitary_scheme_error_at,
)
from .protocol import (
    RNG_ALGORITHM,
    AttemptRecord,
    BatchSample,
    HistogramResult,
    ProtocolConfig,
    ProtocolStats,
    histogram,
    run_protocol,
    sample_attempt,
    sample_batch,
)
