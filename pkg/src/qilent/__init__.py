"""Static entanglement analysis for QIL programs.

Two abstract domains built on signless stabilizer arrays over-approximate
which qubits may be entangled; a dense simulator and a randomized checker
test the analysis against the concrete semantics.
"""

from .analysis import AnalysisConfig, AnalysisError, analyze, interp_c, interp_e
from .concrete import Ensemble, SimConfig, sem_density, sem_ensemble
from .domain import Assignment, bottom, join_approx, join_c, leq_c, meet_c, top, zeros
from .qil import ParseError, Program, parse, pretty

__all__ = [
    "AnalysisConfig",
    "AnalysisError",
    "Assignment",
    "Ensemble",
    "ParseError",
    "Program",
    "SimConfig",
    "analyze",
    "bottom",
    "interp_c",
    "interp_e",
    "join_approx",
    "join_c",
    "leq_c",
    "meet_c",
    "parse",
    "pretty",
    "sem_density",
    "sem_ensemble",
    "top",
    "zeros",
]

__version__ = "0.1.0"
