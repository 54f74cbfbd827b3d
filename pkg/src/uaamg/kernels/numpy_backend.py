"""Pure-numpy fallback for the hot CSR and aggregation kernels.

Same contracts as the numba backend: deterministic accumulation order
(row-sequential sums, ascending member order) and bit-identical
quasi-random streams. Selected with ``UAAMG_KERNELS=numpy``.
"""

import numpy as np

NAME = "numpy"

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_PHI = np.uint64(0x9E3779B97F4A7C15)
_PASS_SALT = np.uint64(0xA0761D6478BD642F)
_INV_2_53 = 1.0 / 9007199254740992.0


def set_num_threads(n):
    """No-op: the numpy path is single-threaded by construction."""


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def hash_u01(seed, pass_idx, idx):
    """Counter-based uniform [0,1) stream for (seed, pass, vertex)."""
    with np.errstate(over="ignore"):
        base = _mix64(np.uint64(seed) ^ (_PASS_SALT * np.uint64(pass_idx + 1)))
        z = _mix64(_mix64(base + idx.astype(np.uint64) * _PHI))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def _entry_rows(indptr):
    n = indptr.shape[0] - 1
    return np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))


def spmv(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    if indices.shape[0] == 0:
        return np.zeros(n)
    prod = data * x[indices]
    return np.bincount(_entry_rows(indptr), weights=prod, minlength=n)


def diag_of(indptr, indices, data):
    n = indptr.shape[0] - 1
    rows = _entry_rows(indptr)
    out = np.zeros(n)
    on_diag = indices == rows
    out[rows[on_diag]] = data[on_diag]
    return out


def l1_diag(indptr, indices, data):
    n = indptr.shape[0] - 1
    rows = _entry_rows(indptr)
    off = indices != rows
    out = np.bincount(rows[off], weights=np.abs(data[off]), minlength=n)
    out += diag_of(indptr, indices, data)
    return out


def degrees(indptr, indices):
    n = indptr.shape[0] - 1
    rows = _entry_rows(indptr)
    off = indices != rows
    return np.bincount(rows[off], minlength=n).astype(np.int64)


def quasi_random_scores(indptr, indices, seed, pass_idx):
    n = indptr.shape[0] - 1
    deg = degrees(indptr, indices).astype(np.float64)
    idx = np.arange(n, dtype=np.int64)
    rand = hash_u01(seed, pass_idx, idx)
    return deg + ((idx % 12).astype(np.float64) + rand) / 12.0


def squared_pattern(n, indptr, indices):
    """Structural pattern of A·A: (i,j) present iff some k has A_ik and A_kj."""
    if indices.shape[0] == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    lens = np.diff(indptr)
    rows = _entry_rows(indptr)
    sub_lens = lens[indices]
    total = int(sub_lens.sum())
    rows2 = np.repeat(rows, sub_lens)
    starts = np.repeat(indptr[indices], sub_lens)
    base = np.repeat(np.cumsum(sub_lens) - sub_lens, sub_lens)
    cols2 = indices[starts + np.arange(total, dtype=np.int64) - base]
    order = np.lexsort((cols2, rows2))
    rows2, cols2 = rows2[order], cols2[order]
    keep = np.ones(total, dtype=bool)
    keep[1:] = (rows2[1:] != rows2[:-1]) | (cols2[1:] != cols2[:-1])
    rows2, cols2 = rows2[keep], cols2[keep]
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    out_ptr[1:] = np.cumsum(np.bincount(rows2, minlength=n))
    return out_ptr, cols2


def galerkin_coo(indptr, indices, data, v2a, n_coarse):
    """Entry-summation coarse operator: (A_c)_IJ = sum of a_st over the blocks."""
    rows = _entry_rows(indptr)
    key = v2a[rows] * np.int64(n_coarse) + v2a[indices]
    order = np.argsort(key, kind="stable")
    ks = key[order]
    vs = data[order]
    if ks.shape[0] == 0:
        return np.zeros(n_coarse + 1, dtype=np.int64), np.empty(0, dtype=np.int64), np.empty(0)
    bounds = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
    sums = np.add.reduceat(vs, bounds)
    ukeys = ks[bounds]
    keep = sums != 0.0
    ukeys, sums = ukeys[keep], sums[keep]
    out_rows = ukeys // n_coarse
    out_cols = ukeys % n_coarse
    out_ptr = np.zeros(n_coarse + 1, dtype=np.int64)
    out_ptr[1:] = np.cumsum(np.bincount(out_rows, minlength=n_coarse))
    return out_ptr, out_cols.astype(np.int64), sums


def select_centers(a2ptr, a2idx, scores, processed):
    """Unprocessed vertices beating every unprocessed vertex within distance 2.

    Ties broken by the smaller vertex index winning.
    """
    n = a2ptr.shape[0] - 1
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(a2ptr))
    js = a2idx
    live = (~processed[rows]) & (~processed[js]) & (js != rows)
    si, sj = scores[rows], scores[js]
    beats = (si > sj) | ((si == sj) & (rows < js))
    viol = live & ~beats
    bad = np.zeros(n, dtype=np.int64)
    if viol.any():
        bad = np.bincount(rows[viol], minlength=n)
    return (~processed) & (bad == 0)


def claim_owners(a2ptr, a2idx, scores, processed, is_center):
    """Assign each unprocessed vertex to its best claiming center (or -1)."""
    n = a2ptr.shape[0] - 1
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(a2ptr))
    cols = a2idx
    mask = (~processed[rows]) & (~is_center[rows]) & is_center[cols]
    mask &= scores[cols] >= scores[rows]
    rows, cols = rows[mask], cols[mask]
    owner = np.full(n, -1, dtype=np.int64)
    owner[is_center] = np.flatnonzero(is_center)
    if rows.shape[0] == 0:
        return owner
    order = np.lexsort((cols, -scores[cols], rows))
    rows, cols = rows[order], cols[order]
    first_rows, first_pos = np.unique(rows, return_index=True)
    owner[first_rows] = cols[first_pos]
    return owner


def _edge_weight(indptr, indices, data, i, j):
    s, e = indptr[i], indptr[i + 1]
    pos = s + np.searchsorted(indices[s:e], j)
    if pos < e and indices[pos] == j:
        return abs(data[pos])
    return 0.0


def admit_members(indptr, indices, data, centers, bucket_ptr, bucket_js,
                  cap, processed, vertex_to_agg, agg_base):
    """Grow one aggregate per center from its claimed vertices.

    Candidates are taken by descending |A_cj| (direct neighbours first),
    ties by ascending vertex id, and a vertex is admitted only once it is
    adjacent to an already-admitted member, so aggregates stay connected.
    """
    for b in range(centers.shape[0]):
        c = centers[b]
        agg_id = agg_base + b
        vertex_to_agg[c] = agg_id
        processed[c] = True
        js = bucket_js[bucket_ptr[b]:bucket_ptr[b + 1]]
        m = js.shape[0]
        if m == 0:
            continue
        w = np.array([_edge_weight(indptr, indices, data, c, j) for j in js])
        order = np.argsort(-w, kind="stable")
        admitted = np.zeros(m, dtype=bool)
        count = 1
        progress = True
        while progress and count < cap:
            progress = False
            for idx in order:
                if count >= cap:
                    break
                if admitted[idx]:
                    continue
                j = js[idx]
                s, e = indptr[j], indptr[j + 1]
                conn = False
                for nb in indices[s:e]:
                    if nb == c:
                        conn = True
                        break
                    pos = np.searchsorted(js, nb)
                    if pos < m and js[pos] == nb and admitted[pos]:
                        conn = True
                        break
                if conn:
                    admitted[idx] = True
                    vertex_to_agg[j] = agg_id
                    processed[j] = True
                    count += 1
                    progress = True


def restrict(agg_ptr, agg_members, r):
    if agg_ptr.shape[0] <= 1:
        return np.zeros(0)
    return np.add.reduceat(r[agg_members], agg_ptr[:-1])


def prolongate_add(v2a, e_coarse, x):
    return x + e_coarse[v2a]


def smooth_sweeps(indptr, indices, data, inv_m, x, b, sweeps):
    """Pointwise-relaxation sweeps x += inv_m * (b - A x), full residual per sweep."""
    for _ in range(sweeps):
        r = b - spmv(indptr, indices, data, x)
        x = x + inv_m * r
    return x
