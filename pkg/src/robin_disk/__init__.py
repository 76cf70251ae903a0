"""Free Klein-Gordon field on a disk with a Robin boundary: modes, charges, symmetries."""

from .basis import ModeBasis, gram_matrix, mode_eval
from .config import Dirichlet, DiskConfig, Robin
from .field import FieldGrid, FieldState, analyze, evolve, random_state, synthesize
from .numerics import QuadratureGrid, disk_quadrature
from .spectrum import NonOscillatoryModeError, RobinSpectrum, build_spectrum

__all__ = [
    "Dirichlet",
    "DiskConfig",
    "FieldGrid",
    "FieldState",
    "ModeBasis",
    "NonOscillatoryModeError",
    "QuadratureGrid",
    "Robin",
    "RobinSpectrum",
    "analyze",
    "build_spectrum",
    "disk_quadrature",
    "evolve",
    "gram_matrix",
    "mode_eval",
    "random_state",
    "synthesize",
]
