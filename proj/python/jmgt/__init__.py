"""Python bindings for the jmgt library."""

from ._core import (
    ConfigError,
    ContractViolation,
    DomainError,
    FrequencyGrid,
    ModelParams,
    NonConvergence,
    Regime,
    __version__,
    characteristic_roots,
    cubic_residual,
    e_norm,
    geometric_time_grid,
    kernel_eval,
    linear_decay_exponent,
    propagate_dt,
    run_criterion,
    run_experiment,
    scenarios,
    sobolev_hom_norm,
    thresholds,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "DomainError",
    "FrequencyGrid",
    "ModelParams",
    "NonConvergence",
    "Regime",
    "__version__",
    "characteristic_roots",
    "cubic_residual",
    "e_norm",
    "geometric_time_grid",
    "kernel_eval",
    "linear_decay_exponent",
    "propagate_dt",
    "run_criterion",
    "run_experiment",
    "scenarios",
    "sobolev_hom_norm",
    "thresholds",
]
