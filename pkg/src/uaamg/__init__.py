"""Unsmoothed-aggregation algebraic multigrid for graph Laplacians."""

from .aggregation import (Aggregation, AggregationConfig, aggregate, compose,
                          quasi_random_scores, read_aggregation,
                          select_coarse_vertices, singleton_aggregation,
                          write_aggregation)
from .analysis import (TwoLevelReport, hierarchy_report, q_energy_norm,
                       two_level_rate)
from .graph import (GraphProblem, assemble_laplacian, generate_structured_grid,
                    read_graph_file, write_graph_file)
from .hierarchy import Hierarchy, SetupError, galerkin_coarse, setup
from .reshaping import (LocalPairProblem, enumerate_balanced_partitions,
                        extract_pair_problem, local_error_operators,
                        rank_one_trace, reshape_pair, reshape_sweep, t_norm)
from .solvers import (CycleSpec, NumericalError, Smoother, SolveReport, cycle,
                      npcg_solve, prolongate_add, restrict, smooth)
from .sparse import (SparseMatrix, read_matrix_market,
                     squared_adjacency_pattern, write_matrix_market)

__version__ = "0.1.0"

__all__ = [
    "Aggregation", "AggregationConfig", "aggregate", "compose",
    "quasi_random_scores", "read_aggregation", "select_coarse_vertices",
    "singleton_aggregation", "write_aggregation",
    "TwoLevelReport", "hierarchy_report", "q_energy_norm", "two_level_rate",
    "GraphProblem", "assemble_laplacian", "generate_structured_grid",
    "read_graph_file", "write_graph_file",
    "Hierarchy", "SetupError", "galerkin_coarse", "setup",
    "LocalPairProblem", "enumerate_balanced_partitions", "extract_pair_problem",
    "local_error_operators", "rank_one_trace", "reshape_pair", "reshape_sweep",
    "t_norm",
    "CycleSpec", "NumericalError", "Smoother", "SolveReport", "cycle",
    "npcg_solve", "prolongate_add", "restrict", "smooth",
    "SparseMatrix", "read_matrix_market", "squared_adjacency_pattern",
    "write_matrix_market",
    "__version__",
]
