"""Epidemic modelling toolkit: compartment ODEs, a closed-form linearized SEIR,
a spectral reaction-diffusion SIR with stability analysis, Gillespie and
Langevin stochastic simulators, and sensitivity-based calibration."""

from .errors import EpikitError
from .models import (CompartmentState, ControlSchedule, SeirParams, derived_stats, r_eff_series,
                     simulate)
from .spatial import SpatialParams, make_grid, run_spatial

__version__ = "0.1.0"

__all__ = [
    "CompartmentState",
    "ControlSchedule",
    "EpikitError",
    "SeirParams",
    "SpatialParams",
    "derived_stats",
    "make_grid",
    "r_eff_series",
    "run_spatial",
    "simulate",
]
