"""Galerkin reduction, stationary eigenmodes, time evolution and slow/fast splitting."""

from .assembly import GalerkinSystem, assemble, axis_matrix, build_system, export_coo
from .evolution import (InstabilityError, StepSizeError, Trajectory, coherent_state, evolution_matrix,
                        evolve, rotated_coherent_state, stable_step)
from .multiscale import InsufficientSamplesError, SlowFastSplit, slow_fast_split, temporal_decomposition
from .stationary import (Eigenmode, EigenmodeSet, EigensolverError, NoPhysicalModesError,
                         integral_weights, solve_stationary, superpose_modes)

__all__ = [
    "GalerkinSystem", "assemble", "axis_matrix", "build_system", "export_coo",
    "InstabilityError", "StepSizeError", "Trajectory", "coherent_state", "evolution_matrix", "evolve",
    "rotated_coherent_state", "stable_step",
    "InsufficientSamplesError", "SlowFastSplit", "slow_fast_split", "temporal_decomposition",
    "Eigenmode", "EigenmodeSet", "EigensolverError", "NoPhysicalModesError", "integral_weights",
    "solve_stationary", "superpose_modes",
]
