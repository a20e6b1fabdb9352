"""Positive-P Langevin equations, discrete noise and the semi-implicit integrator."""

from .integrator import (
    EnsembleRun,
    IntegratorConfig,
    TrajectoryRecord,
    integrate_ensemble,
    integrate_trajectory,
    ito_euler_step,
    step_semi_implicit,
)
from .noise import NoiseIncrement, NoiseStream, gaussian_pair, noise_increment, trajectory_generator
from .reference import GeometricNoise, OrnsteinUhlenbeck, endpoint_ensemble
from .systems import (
    AdiabaticSystem,
    FieldState,
    FullSystem,
    LangevinSystem,
    ReducedSystem,
    diffusion_full,
    diffusion_reduced,
    drift_adiabatic,
    drift_full,
    drift_reduced,
    make_system,
)

__all__ = [
    "AdiabaticSystem",
    "EnsembleRun",
    "FieldState",
    "FullSystem",
    "GeometricNoise",
    "IntegratorConfig",
    "LangevinSystem",
    "NoiseIncrement",
    "NoiseStream",
    "OrnsteinUhlenbeck",
    "ReducedSystem",
    "TrajectoryRecord",
    "diffusion_full",
    "diffusion_reduced",
    "drift_adiabatic",
    "drift_full",
    "drift_reduced",
    "endpoint_ensemble",
    "gaussian_pair",
    "integrate_ensemble",
    "integrate_trajectory",
    "ito_euler_step",
    "make_system",
    "noise_increment",
    "step_semi_implicit",
    "trajectory_generator",
]
