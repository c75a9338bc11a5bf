"""Numerical core: walk kernels, observables, actions, frames, continuum limit, mechanics."""

from .lattice_core import (
    SpinorField,
    CoinField,
    Trajectory,
    step,
    evolve,
    action_S,
    alternate_action,
    stationarity_residual,
)
from .observables import conservation_report, totals
from .extended_action import sigma_terms, functional_derivatives_closed_form
from .lorentz_covariance import FrameSpec, covariant_action, frame_invariance_report
from .continuum_limit import DiracParams, convergence_study, walk_eigenphases
from .discrete_mechanics import Potential, run_symplectic, run_extended
from .run_config import RunSpec, parse_config

__all__ = [
    "SpinorField",
    "CoinField",
    "Trajectory",
    "step",
    "evolve",
    "action_S",
    "alternate_action",
    "stationarity_residual",
    "conservation_report",
    "totals",
    "sigma_terms",
    "functional_derivatives_closed_form",
    "FrameSpec",
    "covariant_action",
    "frame_invariance_report",
    "DiracParams",
    "convergence_study",
    "walk_eigenphases",
    "Potential",
    "run_symplectic",
    "run_extended",
    "RunSpec",
    "parse_config",
]
