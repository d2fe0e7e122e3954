"""QUBO and HUBO formulations of asset-retrieval routing, compiled to QAOA circuits."""

from .circuit import Circuit, build_ansatz, cnot_count, factor_terms, metrics
from .formulation import HUBO, QUBO, Formulation, Route, build, decode, encode, route_objective
from .generate import canonical_instance, canonical_instances, random_instance
from .oracle import brute_force_min, enumerate_routes
from .poly import PBPoly, SpinPoly, evaluate, evaluate_spin, to_spin
from .problem import InfeasibleInstanceError, ProblemInstance, preprocess
from .qaoa import OptimizerConfig, RunRecord, best_measurement, normalized_distance, optimize
from .sim import SimulationCapError

__version__ = "0.1.0"

__all__ = [
    "Circuit", "build_ansatz", "cnot_count", "factor_terms", "metrics",
    "HUBO", "QUBO", "Formulation", "Route", "build", "decode", "encode", "route_objective",
    "canonical_instance", "canonical_instances", "random_instance",
    "brute_force_min", "enumerate_routes",
    "PBPoly", "SpinPoly", "evaluate", "evaluate_spin", "to_spin",
    "InfeasibleInstanceError", "ProblemInstance", "preprocess",
    "OptimizerConfig", "RunRecord", "best_measurement", "normalized_distance", "optimize",
    "SimulationCapError",
]
