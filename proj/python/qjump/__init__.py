"""Quantum jump unraveling of Markovian master equations."""

from ._core import (
    DimensionMismatch,
    Error,
    Generator,
    InvalidConfig,
    InvalidGenerator,
    InvalidState,
    StepTooLarge,
    apply_generator,
    eigh,
    frictional_rhs,
    integrate_master,
    jump_channels,
    modified_rate_operator,
    oscillator,
    run_ensemble,
    run_trajectory,
    single_step_residual,
    total_decay_rate,
    trace_distance,
    transition_rate_operator,
    validate_generator,
    verify,
)

__version__ = "0.1.0"
