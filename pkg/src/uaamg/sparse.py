"""CSR sparse matrices: storage, SpMV, structural ops, Matrix Market I/O.

The single canonical format is CSR with strictly increasing column indices
per row and no explicitly stored zeros. Matrices are immutable after
construction and safe to share across threads.
"""

import numpy as np

from . import kernels


class SparseFormatError(ValueError):
    """Malformed CSR arrays or unreadable matrix file."""


class SparseMatrix:
    """Immutable CSR matrix with 64-bit indices and float64 values."""

    __slots__ = ("n_rows", "n_cols", "indptr", "indices", "data")

    def __init__(self, n_rows, n_cols, indptr, indices, data, _validate=True):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        for arr in (self.indptr, self.indices, self.data):
            arr.flags.writeable = False
        if _validate:
            self._check()

    def _check(self):
        if self.indptr.shape[0] != self.n_rows + 1 or self.indptr[0] != 0:
            raise SparseFormatError("bad row offsets")
        if np.any(np.diff(self.indptr) < 0) or self.indptr[-1] != self.indices.shape[0]:
            raise SparseFormatError("row offsets not nondecreasing or wrong nnz")
        if self.indices.shape[0] != self.data.shape[0]:
            raise SparseFormatError("indices/data length mismatch")
        if self.indices.shape[0]:
            if self.indices.min() < 0 or self.indices.max() >= self.n_cols:
                raise SparseFormatError("column index out of range")
            rows = np.repeat(np.arange(self.n_rows), np.diff(self.indptr))
            same_row = rows[1:] == rows[:-1]
            if np.any(same_row & (np.diff(self.indices) <= 0)):
                raise SparseFormatError("columns not strictly increasing within a row")

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self):
        return int(self.indices.shape[0])

    @classmethod
    def from_coo(cls, n_rows, n_cols, rows, cols, vals):
        """Build canonical CSR from triplets: sort, sum duplicates, drop zeros."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if rows.shape[0]:
            if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
                raise SparseFormatError("coordinate out of range")
            order = np.lexsort((cols, rows))
            rows, cols, vals = rows[order], cols[order], vals[order]
            bounds = np.flatnonzero(np.r_[True, (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])])
            vals = np.add.reduceat(vals, bounds)
            rows, cols = rows[bounds], cols[bounds]
            keep = vals != 0.0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(np.bincount(rows, minlength=n_rows))
        return cls(n_rows, n_cols, indptr, cols, vals, _validate=False)

    @classmethod
    def identity(cls, n):
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, np.arange(n + 1, dtype=np.int64), idx, np.ones(n), _validate=False)

    @classmethod
    def from_dense(cls, dense):
        dense = np.asarray(dense, dtype=np.float64)
        rows, cols = np.nonzero(dense)
        return cls.from_coo(dense.shape[0], dense.shape[1], rows, cols, dense[rows, cols])

    def to_dense(self):
        out = np.zeros(self.shape)
        rows = np.repeat(np.arange(self.n_rows), np.diff(self.indptr))
        out[rows, self.indices] = self.data
        return out

    def diagonal(self):
        return kernels.diag_of(self.indptr, self.indices, self.data)

    def transpose(self):
        rows = np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.indptr))
        return SparseMatrix.from_coo(self.n_cols, self.n_rows, self.indices, rows, self.data)

    def is_symmetric(self, tol=0.0):
        if self.n_rows != self.n_cols:
            return False
        t = self.transpose()
        if not (np.array_equal(t.indptr, self.indptr) and np.array_equal(t.indices, self.indices)):
            return False
        return np.max(np.abs(t.data - self.data), initial=0.0) <= tol

    def spmv(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_cols,):
            raise ValueError(f"spmv dimension mismatch: matrix {self.shape}, vector {x.shape}")
        return kernels.spmv(self.indptr, self.indices, self.data, x)

    def __matmul__(self, x):
        return self.spmv(x)

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def squared_adjacency_pattern(a):
    """Structural pattern of A·A: vertices within graph distance <= 2, incl. self.

    Values are all ones; the input must be square with a symmetric pattern.
    """
    if a.n_rows != a.n_cols:
        raise ValueError("squared pattern requires a square matrix")
    ptr, idx = kernels.squared_pattern(a.n_rows, a.indptr, a.indices)
    return SparseMatrix(a.n_rows, a.n_cols, ptr, idx, np.ones(idx.shape[0]), _validate=False)


def read_matrix_market(path):
    """Read a Matrix Market coordinate file (real/integer, general/symmetric)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) < 5 or header[0] != "%%MatrixMarket" or header[1] != "matrix":
            raise SparseFormatError(f"{path}: not a Matrix Market matrix file")
        fmt, field, symmetry = header[2], header[3], header[4].lower()
        if fmt != "coordinate" or field not in ("real", "integer"):
            raise SparseFormatError(f"{path}: unsupported Matrix Market flavour {fmt}/{field}")
        if symmetry not in ("general", "symmetric"):
            raise SparseFormatError(f"{path}: unsupported symmetry {symmetry}")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        try:
            n_rows, n_cols, nnz = (int(tok) for tok in line.split())
        except ValueError as exc:
            raise SparseFormatError(f"{path}: bad size line {line!r}") from exc
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        k = 0
        for line in fh:
            toks = line.split()
            if not toks:
                continue
            if k >= nnz:
                raise SparseFormatError(f"{path}: more entries than declared")
            rows[k] = int(toks[0]) - 1
            cols[k] = int(toks[1]) - 1
            vals[k] = float(toks[2])
            k += 1
        if k != nnz:
            raise SparseFormatError(f"{path}: expected {nnz} entries, got {k}")
    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    return SparseMatrix.from_coo(n_rows, n_cols, rows, cols, vals)


def write_matrix_market(a, path, symmetric=None):
    """Write CSR to Matrix Market coordinate real format.

    With symmetric=True (default: auto-detect) only the lower triangle is stored.
    """
    if symmetric is None:
        symmetric = a.is_symmetric()
    rows = np.repeat(np.arange(a.n_rows, dtype=np.int64), np.diff(a.indptr))
    cols, vals = a.indices, a.data
    if symmetric:
        keep = rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    with open(path, "w", encoding="ascii") as fh:
        kind = "symmetric" if symmetric else "general"
        fh.write(f"%%MatrixMarket matrix coordinate real {kind}\n")
        fh.write(f"{a.n_rows} {a.n_cols} {rows.shape[0]}\n")
        for r, c, v in zip(rows, cols, vals):
            fh.write(f"{r + 1} {c + 1} {v!r}\n")
