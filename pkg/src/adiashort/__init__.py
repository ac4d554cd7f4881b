"""Shortcut-to-adiabaticity simulator for STIRAP-like cascaded frequency conversion.

The package propagates a three-level effective model of a cascaded
second-harmonic / difference-frequency conversion process under plain,
exactly length-rescaled, and Gaussian-approximated coupling schedules,
and validates it against the full nonlinear coupled-wave equations.
"""

from .coupledwave import (
    DEFAULT_PUMP_AMPLITUDE,
    DEFAULT_REFERENCE_RATIO,
    REFERENCE_KAPPA0,
    SPEED_OF_LIGHT,
    ModelComparison,
    WaveParameters,
    WaveState,
    WaveTrajectory,
    compare_models,
    envelope_transform,
    manley_rowe_invariants,
    matched_wave_parameters,
    photon_fluxes,
    propagate_waves,
    wave_rhs,
)
from .dynamics import (
    DEFAULT_SETTINGS,
    KET1,
    KET2,
    KET3,
    IntegratorSettings,
    PropagationResult,
    StateVector,
    dark_state,
    fidelity,
    hamiltonian_at,
    max_intermediate_population,
    propagate,
    propagate_hamiltonian,
)
from .errors import (
    DomainError,
    NumericalFailureError,
    UndefinedMixingAngleError,
    ValidationError,
)
from .experiments import (
    DEFAULT_SWEEP_A,
    AdiabaticityReport,
    SweepResult,
    SweepRow,
    SweepSpec,
    TraceResult,
    adiabaticity_report,
    make_schedule,
    run_trace,
    sweep_contraction,
)
from .profiles import (
    DEFAULT_LENGTH,
    GAUSSIAN_APPROX,
    PLAIN,
    TIME_RESCALED,
    CouplingSchedule,
    PlainGaussianParams,
    RescalingParams,
    coupling_pair,
    detuning_at,
    mixing_angle,
    rescaling_map,
    rescaling_rate,
    rms_coupling,
)

__version__ = "0.1.0"
