"""Multilevel hierarchy: per-level aggregation, Galerkin coarse operators by
entry summation, stopping rules, coarsest-level factorization, complexities.

The prolongator is never materialized: coarse entries are scatter-sums of
fine entries keyed by the aggregate map.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .aggregation import Aggregation, AggregationConfig, aggregate, compose
from .sparse import SparseMatrix


class SetupError(RuntimeError):
    pass


def galerkin_coarse(a, agg):
    """(A_c)_IJ = sum over s in G_I, t in G_J of a_st; exact zeros dropped."""
    if agg.n_fine != a.n_rows or a.n_rows != a.n_cols:
        raise ValueError("aggregation does not match matrix dimensions")
    ptr, idx, val = kernels.galerkin_coo(a.indptr, a.indices, a.data,
                                         agg.vertex_to_agg, agg.n_coarse)
    return SparseMatrix(agg.n_coarse, agg.n_coarse, ptr, idx, val, _validate=False)


class CoarseSolver:
    """Dense factorization of the coarsest operator.

    Cholesky for SPD matrices; for singular (Neumann) ones an eigen-based
    pseudo-inverse that deflates the constant vector.
    """

    def __init__(self, a, singular):
        self.n = a.n_rows
        self.singular = bool(singular)
        dense = a.to_dense()
        self._eig = None
        self._cho = None
        if self.n == 0:
            return
        if not self.singular:
            try:
                self._cho = scipy.linalg.cho_factor(dense)
                return
            except scipy.linalg.LinAlgError:
                self.singular = True
        vals, vecs = np.linalg.eigh(dense)
        cut = 1e-12 * max(vals[-1], 0.0) if vals.shape[0] else 0.0
        inv = np.where(vals > cut, 1.0 / np.where(vals > cut, vals, 1.0), 0.0)
        self._eig = (vecs, inv)

    def solve(self, b):
        """Solve against one vector or a matrix of right-hand-side columns."""
        if self.n == 0:
            return np.zeros_like(b)
        if self._cho is not None:
            return scipy.linalg.cho_solve(self._cho, b)
        vecs, inv = self._eig
        scale = inv if b.ndim == 1 else inv[:, None]
        return vecs @ (scale * (vecs.T @ b))


@dataclass(frozen=True)
class Level:
    matrix: SparseMatrix
    aggregation: Aggregation | None  # None on the coarsest level


class Hierarchy:
    def __init__(self, levels, coarsest_solver, singular):
        self.levels = levels
        self.coarsest_solver = coarsest_solver
        self.singular = bool(singular)
        n0 = levels[0].matrix.n_rows
        nnz0 = max(levels[0].matrix.nnz, 1)
        self.grid_complexity = sum(l.matrix.n_rows for l in levels) / n0
        self.operator_complexity = sum(l.matrix.nnz for l in levels) / nnz0

    @property
    def n_levels(self):
        return len(self.levels)

    def matrix(self, level):
        return self.levels[level].matrix

    def sub(self, level):
        """View of the hierarchy starting at the given level (for coarse solves)."""
        if level == 0:
            return self
        return Hierarchy(self.levels[level:], self.coarsest_solver, self.singular)

    def summary(self):
        rows = []
        for l, lev in enumerate(self.levels):
            row = {"level": l, "n": lev.matrix.n_rows, "nnz": lev.matrix.nnz}
            if lev.aggregation is not None:
                row["coarsening_ratio"] = lev.aggregation.coarsening_ratio
            rows.append(row)
        return {
            "levels": rows,
            "grid_complexity": self.grid_complexity,
            "operator_complexity": self.operator_complexity,
            "singular": self.singular,
        }


def detect_singular(a):
    """Heuristic null-space flag: A annihilates the constant vector."""
    if a.nnz == 0:
        return True
    scale = np.max(np.abs(a.data))
    return np.max(np.abs(a.spmv(np.ones(a.n_rows)))) <= 1e-10 * scale


def setup(a, config=AggregationConfig(), n0=100, max_levels=20,
          reshape_sweeps=0, singular=None, reshape_pair_cap=16):
    """Build the multilevel hierarchy for a symmetric Laplacian-structured matrix.

    Coarsens until the level size is <= n0 or max_levels is reached, then
    factors the coarsest level. reshape_sweeps > 0 post-processes every
    level's aggregation with the subgraph reshaping sweep.
    """
    if a.n_rows != a.n_cols:
        raise SetupError("matrix must be square")
    if singular is None:
        singular = detect_singular(a)
    levels = []
    current = a
    while current.n_rows > n0 and len(levels) < max_levels - 1:
        if config.passes_per_level == 2 and current.n_rows > n0:
            agg1 = aggregate(current, config)
            mid = galerkin_coarse(current, agg1)
            agg = compose(agg1, aggregate(mid, config))
        else:
            agg = aggregate(current, config)
        if reshape_sweeps > 0:
            from .reshaping import reshape_sweep
            agg = reshape_sweep(current, agg, sweeps=reshape_sweeps,
                                pair_cap=reshape_pair_cap)
        if agg.n_coarse == current.n_rows:
            raise SetupError(
                f"aggregation stagnated at level {len(levels)}: "
                f"{current.n_rows} vertices produced no coarsening")
        levels.append(Level(current, agg))
        current = galerkin_coarse(current, agg)
    levels.append(Level(current, None))
    solver = CoarseSolver(current, singular)
    return Hierarchy(levels, solver, singular)
