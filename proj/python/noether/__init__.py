"""Generalized Noether charges for scaling symmetries of mechanical systems."""

from ._core import (
    BargmannMetric,
    ChargeSeries,
    ConfigError,
    ConformalVector,
    DomainError,
    DynamicalSystem,
    Error,
    IntegrationError,
    Potential,
    PPWaveProfile,
    ScalingLaw,
    Trajectory,
    UsageError,
    VirialReport,
    apply_scaling,
    chrono_projective_check,
    detect_period,
    eom_residual,
    free_dilation_charge,
    generator_residual,
    integrate,
    kv_split_charge,
    lie_derivative,
    lift_null_residual,
    list_builtins,
    noether_charge,
    run_builtin,
    run_config,
    solve_exponents,
    upstairs_geodesic,
    virial_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
