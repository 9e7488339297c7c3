"""Multi-agent dynamic pickup-and-delivery planning with per-agent genetic search."""

from .fitness import AggregationMode, FitnessBreakdown, PlanEvaluator, aggregate
from .ga import EvolutionReport, GaConfig, evolve
from .kernels import BACKEND
from .scenario import ScenarioDocument, SimConfig, load_scenario
from .simulator import Simulation, run

__version__ = "0.1.0"

__all__ = [
    "AggregationMode",
    "BACKEND",
    "EvolutionReport",
    "FitnessBreakdown",
    "GaConfig",
    "PlanEvaluator",
    "ScenarioDocument",
    "SimConfig",
    "Simulation",
    "aggregate",
    "evolve",
    "load_scenario",
    "run",
]
