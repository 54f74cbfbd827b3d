"""Numba-compiled CSR and aggregation kernels (the default backend).

Every parallel loop writes disjoint output slots and accumulates in a
fixed order (row-sequential, ascending member index), so results are
bit-identical for any thread count.
"""

import numba
import numpy as np
from numba import njit, prange

NAME = "numba"

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_PHI = np.uint64(0x9E3779B97F4A7C15)
_PASS_SALT = np.uint64(0xA0761D6478BD642F)
_INV_2_53 = 1.0 / 9007199254740992.0


def set_num_threads(n):
    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _hash_u01_scalar(base, i):
    z = _mix64(_mix64(base + np.uint64(i) * _PHI))
    return np.float64(z >> np.uint64(11)) * _INV_2_53


@njit(cache=True, parallel=True)
def hash_u01(seed, pass_idx, idx):
    base = _mix64(np.uint64(seed) ^ (_PASS_SALT * np.uint64(pass_idx + 1)))
    out = np.empty(idx.shape[0])
    for k in prange(idx.shape[0]):
        out[k] = _hash_u01_scalar(base, idx[k])
    return out


@njit(cache=True, parallel=True)
def spmv(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    y = np.empty(n)
    for i in prange(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        y[i] = acc
    return y


@njit(cache=True, parallel=True)
def diag_of(indptr, indices, data):
    n = indptr.shape[0] - 1
    out = np.zeros(n)
    for i in prange(n):
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] == i:
                out[i] = data[k]
                break
    return out


@njit(cache=True, parallel=True)
def l1_diag(indptr, indices, data):
    n = indptr.shape[0] - 1
    out = np.empty(n)
    for i in prange(n):
        acc = 0.0
        dii = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] == i:
                dii = data[k]
            else:
                acc += abs(data[k])
        out[i] = acc + dii
    return out


@njit(cache=True, parallel=True)
def degrees(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    for i in prange(n):
        d = 0
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] != i:
                d += 1
        out[i] = d
    return out


@njit(cache=True, parallel=True)
def quasi_random_scores(indptr, indices, seed, pass_idx):
    n = indptr.shape[0] - 1
    base = _mix64(np.uint64(seed) ^ (_PASS_SALT * np.uint64(pass_idx + 1)))
    out = np.empty(n)
    for i in prange(n):
        d = 0
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] != i:
                d += 1
        out[i] = d + ((i % 12) + _hash_u01_scalar(base, i)) / 12.0
    return out


@njit(cache=True)
def squared_pattern(n, indptr, indices):
    # Classic symbolic-SpGEMM with a stamp workspace; two sweeps (count, fill).
    stamp = np.full(n, -1, dtype=np.int64)
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        cnt = 0
        for k in range(indptr[i], indptr[i + 1]):
            kk = indices[k]
            for k2 in range(indptr[kk], indptr[kk + 1]):
                j = indices[k2]
                if stamp[j] != i:
                    stamp[j] = i
                    cnt += 1
        out_ptr[i + 1] = out_ptr[i] + cnt
    out_idx = np.empty(out_ptr[n], dtype=np.int64)
    stamp[:] = -1
    for i in range(n):
        pos = out_ptr[i]
        for k in range(indptr[i], indptr[i + 1]):
            kk = indices[k]
            for k2 in range(indptr[kk], indptr[kk + 1]):
                j = indices[k2]
                if stamp[j] != i:
                    stamp[j] = i
                    out_idx[pos] = j
                    pos += 1
        out_idx[out_ptr[i]:pos].sort()
    return out_ptr, out_idx


@njit(cache=True)
def galerkin_coo(indptr, indices, data, v2a, n_coarse):
    nnz = indices.shape[0]
    key = np.empty(nnz, dtype=np.int64)
    for i in range(indptr.shape[0] - 1):
        base = v2a[i] * n_coarse
        for k in range(indptr[i], indptr[i + 1]):
            key[k] = base + v2a[indices[k]]
    order = np.argsort(key, kind="mergesort")
    out_ptr = np.zeros(n_coarse + 1, dtype=np.int64)
    out_idx = np.empty(nnz, dtype=np.int64)
    out_val = np.empty(nnz)
    m = 0
    k = 0
    while k < nnz:
        cur = key[order[k]]
        acc = 0.0
        while k < nnz and key[order[k]] == cur:
            acc += data[order[k]]
            k += 1
        if acc != 0.0:
            out_idx[m] = cur % n_coarse
            out_val[m] = acc
            out_ptr[cur // n_coarse + 1] += 1
            m += 1
    for i in range(n_coarse):
        out_ptr[i + 1] += out_ptr[i]
    return out_ptr, out_idx[:m].copy(), out_val[:m].copy()


@njit(cache=True, parallel=True)
def select_centers(a2ptr, a2idx, scores, processed):
    n = a2ptr.shape[0] - 1
    out = np.zeros(n, dtype=np.bool_)
    for i in prange(n):
        if processed[i]:
            continue
        ok = True
        si = scores[i]
        for k in range(a2ptr[i], a2ptr[i + 1]):
            j = a2idx[k]
            if j == i or processed[j]:
                continue
            sj = scores[j]
            if not (si > sj or (si == sj and i < j)):
                ok = False
                break
        out[i] = ok
    return out


@njit(cache=True, parallel=True)
def claim_owners(a2ptr, a2idx, scores, processed, is_center):
    n = a2ptr.shape[0] - 1
    owner = np.full(n, -1, dtype=np.int64)
    for j in prange(n):
        if is_center[j]:
            owner[j] = j
            continue
        if processed[j]:
            continue
        best = -1
        best_s = 0.0
        sj = scores[j]
        for k in range(a2ptr[j], a2ptr[j + 1]):
            i = a2idx[k]
            if not is_center[i]:
                continue
            si = scores[i]
            if si < sj:
                continue
            if best == -1 or si > best_s or (si == best_s and i < best):
                best = i
                best_s = si
        owner[j] = best
    return owner


@njit(cache=True, parallel=True)
def admit_members(indptr, indices, data, centers, bucket_ptr, bucket_js,
                  cap, processed, vertex_to_agg, agg_base):
    for b in prange(centers.shape[0]):
        c = centers[b]
        agg_id = agg_base + b
        vertex_to_agg[c] = agg_id
        processed[c] = True
        lo, hi = bucket_ptr[b], bucket_ptr[b + 1]
        m = hi - lo
        if m == 0:
            continue
        js = bucket_js[lo:hi]
        w = np.empty(m)
        for t in range(m):
            j = js[t]
            wv = 0.0
            s, e = indptr[c], indptr[c + 1]
            pos = s + np.searchsorted(indices[s:e], j)
            if pos < e and indices[pos] == j:
                wv = abs(data[pos])
            w[t] = -wv
        order = np.argsort(w, kind="mergesort")
        admitted = np.zeros(m, dtype=np.bool_)
        count = 1
        progress = True
        while progress and count < cap:
            progress = False
            for t in range(m):
                if count >= cap:
                    break
                idx = order[t]
                if admitted[idx]:
                    continue
                j = js[idx]
                conn = False
                for k in range(indptr[j], indptr[j + 1]):
                    nb = indices[k]
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


@njit(cache=True, parallel=True)
def restrict(agg_ptr, agg_members, r):
    nc = agg_ptr.shape[0] - 1
    out = np.empty(nc)
    for a in prange(nc):
        acc = 0.0
        for k in range(agg_ptr[a], agg_ptr[a + 1]):
            acc += r[agg_members[k]]
        out[a] = acc
    return out


@njit(cache=True, parallel=True)
def prolongate_add(v2a, e_coarse, x):
    n = x.shape[0]
    out = np.empty(n)
    for i in prange(n):
        out[i] = x[i] + e_coarse[v2a[i]]
    return out


@njit(cache=True, parallel=True)
def smooth_sweeps(indptr, indices, data, inv_m, x, b, sweeps):
    n = x.shape[0]
    cur = x.copy()
    r = np.empty(n)
    for _ in range(sweeps):
        for i in prange(n):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * cur[indices[k]]
            r[i] = b[i] - acc
        for i in prange(n):
            cur[i] = cur[i] + inv_m[i] * r[i]
    return cur
