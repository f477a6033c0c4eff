"""Time-harmonic elastic scattering from point-like and extended obstacles.

Forward solvers (point interactions, a 2D rigid obstacle via boundary
integral equations, and their combination) plus factorization-method
imaging from far-field data.
"""

from .medium import ElasticMedium
from .foldy import PointCloud, build_interaction, farfield_points, scatter_points, tau_residual
from .bie import BoundaryCurve, RigidSolver, circle, kite, make_curve
from .multiscale import MultiscaleSolver, build_multiscale
from .farfield import DirectionGrid, FarFieldMatrix, add_noise, assemble_operator, project
from .imaging import IndicatorGrid, SelfadjointOperator, build_fsharp, indicator, locate_points
from .scenario import Scenario, assemble_farfield, load_scenario

__version__ = "0.1.0"

__all__ = [
    "ElasticMedium",
    "PointCloud",
    "build_interaction",
    "scatter_points",
    "farfield_points",
    "tau_residual",
    "BoundaryCurve",
    "RigidSolver",
    "kite",
    "circle",
    "make_curve",
    "MultiscaleSolver",
    "build_multiscale",
    "DirectionGrid",
    "FarFieldMatrix",
    "assemble_operator",
    "add_noise",
    "project",
    "SelfadjointOperator",
    "IndicatorGrid",
    "build_fsharp",
    "indicator",
    "locate_points",
    "Scenario",
    "load_scenario",
    "assemble_farfield",
    "__version__",
]
