"""Weighted graphs, boundary weights, and graph-Laplacian assembly.

A GraphProblem is a positively weighted undirected graph plus optional
per-vertex boundary weights. Its Laplacian has off-diagonals -w_ij and
diagonals sum(w_ij) (+ the boundary weight); with an empty boundary the
matrix is singular with null space span{1}.
"""

from dataclasses import dataclass, field

import numpy as np

from .sparse import SparseMatrix


class GraphError(ValueError):
    """Invalid graph input: bad weights, duplicate edges, self-loops."""


@dataclass(frozen=True)
class GraphProblem:
    n: int
    edges: list  # (i, j, w) with i < j, w > 0, each undirected edge once
    boundary: list = field(default_factory=list)  # (j, wD) with wD > 0

    def __post_init__(self):
        seen = set()
        norm_edges = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge ({i},{j}) out of range for n={self.n}")
            if w <= 0:
                raise GraphError(f"non-positive edge weight {w} on ({i},{j})")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
            norm_edges.append((i, j, w))
        seen_b = set()
        norm_boundary = []
        for j, w in self.boundary:
            j, w = int(j), float(w)
            if not 0 <= j < self.n:
                raise GraphError(f"boundary vertex {j} out of range")
            if w <= 0:
                raise GraphError(f"non-positive boundary weight {w} at {j}")
            if j in seen_b:
                raise GraphError(f"duplicate boundary weight at {j}")
            seen_b.add(j)
            norm_boundary.append((j, w))
        object.__setattr__(self, "edges", norm_edges)
        object.__setattr__(self, "boundary", norm_boundary)

    @property
    def singular(self):
        return len(self.boundary) == 0


def assemble_laplacian(problem):
    """Assemble the symmetric CSR graph Laplacian of a GraphProblem."""
    m = len(problem.edges)
    rows = np.empty(2 * m + len(problem.boundary) + problem.n, dtype=np.int64)
    cols = np.empty_like(rows)
    vals = np.empty(rows.shape[0])
    diag = np.zeros(problem.n)
    for k, (i, j, w) in enumerate(problem.edges):
        rows[2 * k], cols[2 * k], vals[2 * k] = i, j, -w
        rows[2 * k + 1], cols[2 * k + 1], vals[2 * k + 1] = j, i, -w
        diag[i] += w
        diag[j] += w
    pos = 2 * m
    for j, w in problem.boundary:
        rows[pos], cols[pos], vals[pos] = j, j, w
        pos += 1
    rows[pos:] = np.arange(problem.n)
    cols[pos:] = rows[pos:]
    vals[pos:] = diag
    return SparseMatrix.from_coo(problem.n, problem.n, rows, cols, vals)


def generate_structured_grid(n, bc="dirichlet", anisotropy=(1.0, 1.0)):
    """n-by-n lattice graph, horizontal weight w_h and vertical weight w_v.

    Dirichlet grids eliminate the off-grid boundary rows of the 5-point
    stencil: every lattice-boundary vertex gets a boundary weight equal to
    the sum of its missing off-grid edge weights. Neumann grids have no
    boundary weights and are singular.
    """
    if n < 2:
        raise GraphError(f"grid size must be >= 2, got {n}")
    if bc not in ("dirichlet", "neumann"):
        raise GraphError(f"unknown boundary condition {bc!r}")
    w_h, w_v = float(anisotropy[0]), float(anisotropy[1])
    if w_h <= 0 or w_v <= 0:
        raise GraphError("anisotropy weights must be positive")
    edges = []
    for r in range(n):
        for c in range(n):
            v = r * n + c
            if c + 1 < n:
                edges.append((v, v + 1, w_h))
            if r + 1 < n:
                edges.append((v, v + n, w_v))
    boundary = []
    if bc == "dirichlet":
        for r in range(n):
            for c in range(n):
                missing = 0.0
                if r == 0:
                    missing += w_v
                if r == n - 1:
                    missing += w_v
                if c == 0:
                    missing += w_h
                if c == n - 1:
                    missing += w_h
                if missing > 0:
                    boundary.append((r * n + c, missing))
    return GraphProblem(n * n, edges, boundary)


def write_graph_file(problem, path):
    """Plain-text format: header 'graph n m s', m edge lines, s boundary lines."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"graph {problem.n} {len(problem.edges)} {len(problem.boundary)}\n")
        for i, j, w in problem.edges:
            fh.write(f"{i} {j} {w!r}\n")
        for j, w in problem.boundary:
            fh.write(f"{j} {w!r}\n")


def read_graph_file(path):
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "graph":
            raise GraphError(f"{path}: expected header 'graph n m s'")
        n, m, s = int(header[1]), int(header[2]), int(header[3])
        edges = []
        for _ in range(m):
            toks = fh.readline().split()
            if len(toks) != 3:
                raise GraphError(f"{path}: bad edge line {toks!r}")
            edges.append((int(toks[0]), int(toks[1]), float(toks[2])))
        boundary = []
        for _ in range(s):
            toks = fh.readline().split()
            if len(toks) != 2:
                raise GraphError(f"{path}: bad boundary line {toks!r}")
            boundary.append((int(toks[0]), float(toks[1])))
    return GraphProblem(n, edges, boundary)
