"""Value types: material, thermodynamic state, unknown layout, front geometry, grid and history."""

from app.models.front import FrontGeometry
from app.models.grid import Grid
from app.models.history import TraceHistory, backward_difference_weights
from app.models.layout import UnknownLayout
from app.models.material import EOSKind, EOSValues, EquationOfState, MaterialParams, eos_eval
from app.models.thermo_state import ThermoState, cauchy_stress, density_from_F, internal_energy

__all__ = [
    "FrontGeometry",
    "Grid",
    "TraceHistory",
    "backward_difference_weights",
    "UnknownLayout",
    "EOSKind",
    "EOSValues",
    "EquationOfState",
    "MaterialParams",
    "eos_eval",
    "ThermoState",
    "cauchy_stress",
    "density_from_F",
    "internal_energy",
]
