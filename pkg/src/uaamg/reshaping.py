"""Aggregate-pair quality optimization: two-level operators on the union
subgraph of a pair, rank-one trace evaluation of the complement operator T,
exhaustive balanced repartitioning, and the pairwise reshaping sweep.

Convention: t_norm returns tr(W) with W = S' A_hat Q S A_hat^+, which is the
*squared* energy seminorm of T (the single nonzero eigenvalue of the rank-one
W). Maximizing it is equivalent to maximizing |T|.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from ._dense import a_selfadjoint_norm, eig_pinv, smoother_error_matrix
from .aggregation import renumber_by_min_member
from .solvers import Smoother

log = logging.getLogger("uaamg.reshaping")

DEFAULT_PAIR_CAP = 16


class PairTooLarge(Exception):
    """Union subgraph exceeds the exhaustive-enumeration cap; skip the pair."""


class DisconnectedPair(ValueError):
    """The union subgraph of the pair is not connected."""


@dataclass
class LocalPairProblem:
    """Dense local Laplacian of the union of two aggregates.

    a_hat is the graph Laplacian of the induced weighted subgraph (zero row
    sums, hence semidefinite with null space span{1} when connected);
    members are the global vertex ids (ascending) and split assigns each
    member to side 1 or 2.
    """

    a_hat: np.ndarray
    members: np.ndarray
    split: np.ndarray
    singular: bool = True

    @property
    def size(self):
        return int(self.members.shape[0])


def extract_pair_problem(a, agg, agg_i, agg_j):
    """Build the LocalPairProblem for two aggregates of a level matrix."""
    ptr, members_all = agg.members_csr()
    gi = members_all[ptr[agg_i]:ptr[agg_i + 1]]
    gj = members_all[ptr[agg_j]:ptr[agg_j + 1]]
    members = np.sort(np.concatenate([gi, gj]))
    local = {int(v): k for k, v in enumerate(members)}
    n_hat = members.shape[0]
    a_hat = np.zeros((n_hat, n_hat))
    for k, v in enumerate(members):
        for p in range(a.indptr[v], a.indptr[v + 1]):
            col = int(a.indices[p])
            if col == v:
                continue
            kc = local.get(col)
            if kc is not None:
                w = -a.data[p]  # off-diagonals of a Laplacian are -w_ij
                a_hat[k, kc] = -w
                a_hat[k, k] += w
    split = np.where(np.isin(members, gi), 1, 2).astype(np.int8)
    return LocalPairProblem(a_hat, members.astype(np.int64), split)


def pair_coarse_vector(split):
    """w = 1_{V1}/|V1| - 1_{V2}/|V2|, l2-orthogonal to the constant vector."""
    split = np.asarray(split)
    n1 = int((split == 1).sum())
    n2 = int((split == 2).sum())
    if n1 == 0 or n2 == 0:
        raise ValueError("both sides of a split must be nonempty")
    return np.where(split == 1, 1.0 / n1, -1.0 / n2)


def local_error_operators(prob, smoother=Smoother("l1")):
    """(S, E, T) for the pair two-level method with coarse space span{w}.

    S = I - M^{-1} A_hat, Q = w (w'A w)^{-1} w'A (the A-orthogonal projection
    onto span{w}), E = (I - Q) S and T = Q S, so S = E + T.
    """
    a_hat = prob.a_hat
    w = pair_coarse_vector(prob.split)
    s = smoother_error_matrix(a_hat, smoother)
    waw = float(w @ a_hat @ w)
    if waw <= 1e-14 * max(np.abs(a_hat).max(), 1.0):
        raise DisconnectedPair("coarse vector has zero energy: union subgraph disconnected")
    q = np.outer(w, (a_hat @ w) / waw)
    t = q @ s
    e = s - t
    return s, e, t


def rank_one_trace(w_mat):
    """Trace of a rank-one matrix from one column: tr = W_k'W_k / W_kk for the
    first k with a nonzero diagonal entry; 0 if the diagonal vanishes."""
    diag = np.abs(np.diag(w_mat))
    scale = np.abs(w_mat).max(initial=0.0)
    if scale == 0.0:
        return 0.0
    nz = np.flatnonzero(diag > 1e-12 * scale)
    if nz.shape[0] == 0:
        return 0.0
    k = int(nz[0])
    col = w_mat[:, k]
    return float(col @ col / w_mat[k, k])


def t_norm(prob, split=None, smoother=Smoother("l1")):
    """Squared energy seminorm of T(V_c) via the rank-one trace identity:
    tr(S' A_hat Q S A_hat^+)."""
    if split is None:
        split = prob.split
    work = LocalPairProblem(prob.a_hat, prob.members, np.asarray(split, dtype=np.int8),
                            prob.singular)
    s, _, _ = local_error_operators(work, smoother)
    w = pair_coarse_vector(work.split)
    a_hat = prob.a_hat
    waw = float(w @ a_hat @ w)
    q = np.outer(w, (a_hat @ w) / waw)
    a_pinv = eig_pinv(a_hat) if prob.singular else np.linalg.inv(a_hat)
    w_mat = s.T @ a_hat @ q @ s @ a_pinv
    return rank_one_trace(w_mat)


def _side_connected(adj, subset):
    if len(subset) <= 1:
        return True
    subset = list(subset)
    pos = {v: k for k, v in enumerate(subset)}
    seen = [False] * len(subset)
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        k = stack.pop()
        for nb in np.flatnonzero(adj[subset[k]]):
            j = pos.get(int(nb))
            if j is not None and not seen[j]:
                seen[j] = True
                count += 1
                stack.append(j)
    return count == len(subset)


def enumerate_balanced_partitions(prob, cap=DEFAULT_PAIR_CAP):
    """Yield every split with |V1| = floor(n/2) and both sides connected.

    For even n the duplicate complement is removed by keeping vertex 0 on
    side 1. Raises PairTooLarge above the enumeration cap.
    """
    n = prob.size
    if n > cap:
        raise PairTooLarge(f"pair of size {n} exceeds enumeration cap {cap}")
    m = n // 2
    adj = (prob.a_hat != 0) & ~np.eye(n, dtype=bool)
    vertices = range(n)
    if n % 2 == 0:
        candidates = (frozenset((0,) + rest)
                      for rest in itertools.combinations(range(1, n), m - 1))
    else:
        candidates = (frozenset(c) for c in itertools.combinations(vertices, m))
    for side1 in candidates:
        side2 = [v for v in vertices if v not in side1]
        if _side_connected(adj, sorted(side1)) and _side_connected(adj, side2):
            split = np.full(n, 2, dtype=np.int8)
            split[list(side1)] = 1
            yield split


def reshape_pair(prob, smoother=Smoother("l1"), cap=DEFAULT_PAIR_CAP):
    """Best balanced connected split of the pair: maximal squared |T|.

    Enumeration order is lexicographic in the membership vector, and only a
    strictly larger objective replaces the incumbent, so ties resolve to the
    lexicographically smallest split.
    """
    best_split = None
    best_t = -np.inf
    for split in enumerate_balanced_partitions(prob, cap=cap):
        t_val = t_norm(prob, split, smoother)
        if t_val > best_t:
            best_t = t_val
            best_split = split
    if best_split is None:
        raise DisconnectedPair("no balanced connected split exists")
    return best_split


def _coarse_edges(a, v2a):
    rows = np.repeat(np.arange(a.n_rows, dtype=np.int64), np.diff(a.indptr))
    gi = v2a[rows]
    gj = v2a[a.indices]
    mask = gi < gj
    if not mask.any():
        return np.empty((0, 2), dtype=np.int64)
    pairs = np.stack([gi[mask], gj[mask]], axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[order]
    keep = np.ones(pairs.shape[0], dtype=bool)
    keep[1:] = np.any(pairs[1:] != pairs[:-1], axis=1)
    return pairs[keep]


def reshape_sweep(a, agg, smoother=Smoother("l1"), sweeps=1, pair_cap=DEFAULT_PAIR_CAP):
    """Reshape a maximal matching of neighbouring aggregate pairs per sweep.

    The matching is greedy over coarse edges sorted by (min id, max id), so
    the result is deterministic; the aggregate count never changes.
    Oversized pairs are skipped and logged.
    """
    current = agg
    for sweep in range(sweeps):
        v2a = current.vertex_to_agg.copy()
        edges = _coarse_edges(a, v2a)
        matched = np.zeros(current.n_coarse, dtype=bool)
        for gi, gj in edges:
            if matched[gi] or matched[gj]:
                continue
            matched[gi] = matched[gj] = True
            prob = extract_pair_problem(a, current, int(gi), int(gj))
            try:
                new_split = reshape_pair(prob, smoother, cap=pair_cap)
            except PairTooLarge:
                log.info("sweep %d: pair (%d,%d) of size %d skipped (cap %d)",
                         sweep, gi, gj, prob.size, pair_cap)
                continue
            old_t = t_norm(prob, prob.split, smoother) if _balanced(prob.split) else None
            new_t = t_norm(prob, new_split, smoother)
            log.debug("sweep %d: pair (%d,%d) sizes %d+%d -> %d+%d, |T|^2 %s -> %.6g",
                      sweep, gi, gj,
                      int((prob.split == 1).sum()), int((prob.split == 2).sum()),
                      int((new_split == 1).sum()), int((new_split == 2).sum()),
                      f"{old_t:.6g}" if old_t is not None else "n/a", new_t)
            v2a[prob.members[new_split == 1]] = gi
            v2a[prob.members[new_split == 2]] = gj
        current = renumber_by_min_member(current.n_fine, v2a)
    return current


def _balanced(split):
    return abs(int((split == 1).sum()) - int((split == 2).sum())) <= 1
