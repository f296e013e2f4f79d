"""Statevector simulation of a quantum search for the most similar subgraph.

Given a weighted graph and a number ``x`` of edges to remove, the package
finds the removal whose Laplacian is closest (squared Frobenius norm) to the
original one. It provides the classical reference, a small statevector
simulator, the state-preparation and amplitude-estimation circuits, threshold
minimum finding, and analysis helpers.
"""
__version__ = "0.1.0"

from .graph import (CardinalityError, GraphFormatError, WeightedGraph, argmin_bruteforce, build_incidence,
                    build_laplacian, build_q_matrix, builtin_graph, builtin_graphs, configurations,
                    frobenius_distance_dense, frobenius_distance_q, frobenius_distance_sparse, generate,
                    load_graph, parse_graph, quadratic_form_classical)
from .statevector import QubitCapError, RegisterLayout, Statevector, measure_all
from .circuit import Circuit, Gate
from .encoding import (BlockEncoding, PreparedState, block_encode, block_encode_incidence, dicke_prepare,
                       prepare_psi_f)
from .estimation import LabeledState, build_cQ, label_configurations, label_single_config, phase_estimate
from .minfind import MinFinderRun, find_minimum
from .analysis import (CostModel, DistanceReport, convergence_study, cost_model_eval, quadratic_form_quantum,
                       reconstruct_distances, sample_distances)

__all__ = [
    "__version__",
    "CardinalityError",
    "GraphFormatError",
    "WeightedGraph",
    "argmin_bruteforce",
    "build_incidence",
    "build_laplacian",
    "build_q_matrix",
    "builtin_graph",
    "builtin_graphs",
    "configurations",
    "frobenius_distance_dense",
    "frobenius_distance_q",
    "frobenius_distance_sparse",
    "generate",
    "load_graph",
    "parse_graph",
    "quadratic_form_classical",
    "QubitCapError",
    "RegisterLayout",
    "Statevector",
    "measure_all",
    "Circuit",
    "Gate",
    "BlockEncoding",
    "PreparedState",
    "block_encode",
    "block_encode_incidence",
    "dicke_prepare",
    "prepare_psi_f",
    "LabeledState",
    "build_cQ",
    "label_configurations",
    "label_single_config",
    "phase_estimate",
    "MinFinderRun",
    "find_minimum",
    "CostModel",
    "DistanceReport",
    "convergence_study",
    "cost_model_eval",
    "quadratic_form_quantum",
    "reconstruct_distances",
    "sample_distances",
]
