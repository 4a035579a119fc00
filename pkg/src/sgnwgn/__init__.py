"""Pseudospectral solvers for the Serre-Green-Naghdi and Whitham-Green-Naghdi systems."""

__version__ = "0.1.0"

from .errors import CavitationError, ConvergenceError, ParameterError, SingularMatrixError
from .evolution import State, evolve, make_state
from .solitary import SolitaryWave, continuation, newton_solve, sgn_solitary
from .spectral import Field, Grid, Model, make_grid

__all__ = [
    "CavitationError", "ConvergenceError", "ParameterError", "SingularMatrixError",
    "State", "evolve", "make_state", "SolitaryWave", "continuation", "newton_solve",
    "sgn_solitary", "Field", "Grid", "Model", "make_grid",
]
