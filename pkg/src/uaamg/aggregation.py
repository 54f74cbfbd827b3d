"""Setup-phase partitioner: quasi-random scoring, distance-3 coarse-vertex
selection on the squared adjacency pattern, multi-pass aggregate formation
with a size cap, and deterministic aggregate numbering.

The whole pipeline is reproducible for a fixed seed and independent of the
worker thread count: randomness is a counter-based hash of
(seed, pass, vertex), score ties are broken by the smaller vertex index,
and a vertex claimed by two coarse vertices joins the higher-scored one.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .sparse import squared_adjacency_pattern

_UNLIMITED = 2 ** 62


class AggregationError(ValueError):
    pass


@dataclass(frozen=True)
class AggregationConfig:
    size_cap: int | None = None  # max vertices per aggregate, None = unlimited
    seed: int = 0
    max_passes: int = 20
    passes_per_level: int = 1  # 2 composes two aggregations per level (level skipping)

    def __post_init__(self):
        if self.size_cap is not None and self.size_cap < 1:
            raise AggregationError("size_cap must be >= 1 or None")
        if not 0 <= self.seed < 2 ** 64:
            raise AggregationError("seed must fit in an unsigned 64-bit integer")
        if self.max_passes < 1:
            raise AggregationError("max_passes must be >= 1")
        if self.passes_per_level not in (1, 2):
            raise AggregationError("passes_per_level must be 1 or 2")


class Aggregation:
    """Partition of one level's vertices into aggregates.

    vertex_to_agg maps every fine vertex to its aggregate; aggregates are
    numbered so that coarse_vertex_of_agg (the seed vertices) is strictly
    increasing. Implicitly encodes the piecewise-constant prolongator.
    """

    __slots__ = ("n_fine", "n_coarse", "vertex_to_agg", "coarse_vertex_of_agg",
                 "_members_ptr", "_members")

    def __init__(self, n_fine, vertex_to_agg, coarse_vertex_of_agg):
        self.n_fine = int(n_fine)
        self.vertex_to_agg = np.ascontiguousarray(vertex_to_agg, dtype=np.int64)
        self.coarse_vertex_of_agg = np.ascontiguousarray(coarse_vertex_of_agg, dtype=np.int64)
        self.n_coarse = int(self.coarse_vertex_of_agg.shape[0])
        self._members_ptr = None
        self._members = None
        if self.vertex_to_agg.shape[0] != self.n_fine:
            raise AggregationError("vertex_to_agg has wrong length")
        if self.n_fine and (self.vertex_to_agg.min() < 0 or self.vertex_to_agg.max() >= self.n_coarse):
            raise AggregationError("aggregate index out of range")

    @property
    def agg_sizes(self):
        return np.diff(self.members_csr()[0])

    def members_csr(self):
        """(ptr, members): members of aggregate a are members[ptr[a]:ptr[a+1]], ascending."""
        if self._members_ptr is None:
            order = np.argsort(self.vertex_to_agg, kind="stable")
            ptr = np.zeros(self.n_coarse + 1, dtype=np.int64)
            ptr[1:] = np.cumsum(np.bincount(self.vertex_to_agg, minlength=self.n_coarse))
            self._members_ptr, self._members = ptr, order.astype(np.int64)
        return self._members_ptr, self._members

    @property
    def coarsening_ratio(self):
        return self.n_fine / self.n_coarse

    def validate(self, a=None, size_cap=None):
        """Check partition invariants; with a matrix also check connectivity."""
        sizes = self.agg_sizes
        if np.any(sizes == 0):
            raise AggregationError("empty aggregate")
        if np.any(np.diff(self.coarse_vertex_of_agg) <= 0):
            raise AggregationError("coarse vertices not strictly increasing")
        if self.vertex_to_agg[self.coarse_vertex_of_agg].tolist() != list(range(self.n_coarse)):
            raise AggregationError("coarse vertex not a member of its aggregate")
        if size_cap is not None and sizes.max(initial=0) > size_cap:
            raise AggregationError(f"aggregate larger than cap {size_cap}")
        if a is not None:
            ptr, members = self.members_csr()
            for agg in range(self.n_coarse):
                group = members[ptr[agg]:ptr[agg + 1]]
                if not _connected_subset(a, group):
                    raise AggregationError(f"aggregate {agg} is not connected")

    def __repr__(self):
        return f"Aggregation({self.n_fine} -> {self.n_coarse}, ratio={self.coarsening_ratio:.2f})"


def _connected_subset(a, group):
    if group.shape[0] <= 1:
        return True
    local = {int(v): k for k, v in enumerate(group)}
    seen = np.zeros(group.shape[0], dtype=bool)
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        k = stack.pop()
        v = group[k]
        for p in range(a.indptr[v], a.indptr[v + 1]):
            nb = local.get(int(a.indices[p]))
            if nb is not None and not seen[nb]:
                seen[nb] = True
                count += 1
                stack.append(nb)
    return count == group.shape[0]


def singleton_aggregation(n):
    idx = np.arange(n, dtype=np.int64)
    return Aggregation(n, idx, idx)


def quasi_random_scores(a, seed, pass_idx=0):
    """Per-vertex score degree + ((i mod 12) + rand)/12, rand hashed from
    (seed, pass, vertex) so it is reproducible and thread-schedule free."""
    return kernels.quasi_random_scores(a.indptr, a.indices, np.uint64(seed), int(pass_idx))


def select_coarse_vertices(a2_pattern, scores, processed):
    """All unprocessed vertices whose score beats every unprocessed vertex at
    graph distance 1 or 2 (ties: smaller index wins). Pairwise distance >= 3."""
    mask = kernels.select_centers(a2_pattern.indptr, a2_pattern.indices,
                                  scores, processed)
    return np.flatnonzero(mask)


def aggregate_pass(a, a2_pattern, centers, scores, processed, vertex_to_agg,
                   size_cap, agg_base=0):
    """Form one aggregate around every center, updating processed/vertex_to_agg.

    Claimed vertices join the best claiming center; each aggregate admits
    members strongest-connection-first while staying connected and within
    the size cap. Returns the number of aggregates created (= len(centers)).
    """
    n = a.n_rows
    is_center = np.zeros(n, dtype=bool)
    is_center[centers] = True
    owner = kernels.claim_owners(a2_pattern.indptr, a2_pattern.indices,
                                 scores, processed, is_center)
    claimed = np.flatnonzero(owner >= 0)
    claimed = claimed[~is_center[claimed]]
    center_rank = np.empty(n, dtype=np.int64)
    center_rank[centers] = np.arange(centers.shape[0], dtype=np.int64)
    rank = center_rank[owner[claimed]]
    bucket_ptr = np.zeros(centers.shape[0] + 1, dtype=np.int64)
    bucket_ptr[1:] = np.cumsum(np.bincount(rank, minlength=centers.shape[0]))
    bucket_js = claimed[np.argsort(rank, kind="stable")]
    cap = _UNLIMITED if size_cap is None else int(size_cap)
    kernels.admit_members(a.indptr, a.indices, a.data,
                          centers.astype(np.int64), bucket_ptr, bucket_js,
                          cap, processed, vertex_to_agg, int(agg_base))
    return int(centers.shape[0])


def aggregate(a, config=AggregationConfig()):
    """Run multi-pass aggregation until every vertex is covered.

    Vertices still unprocessed after max_passes become singleton aggregates.
    The output is independent of the thread count for a fixed seed.
    """
    n = a.n_rows
    if n == 0:
        raise AggregationError("cannot aggregate an empty matrix")
    a2 = squared_adjacency_pattern(a)
    processed = np.zeros(n, dtype=bool)
    vertex_to_agg = np.full(n, -1, dtype=np.int64)
    all_centers = []
    for pass_idx in range(config.max_passes):
        if processed.all():
            break
        scores = quasi_random_scores(a, config.seed, pass_idx)
        centers = select_coarse_vertices(a2, scores, processed)
        if centers.shape[0] == 0:  # cannot happen: the global best always wins
            break
        aggregate_pass(a, a2, centers, scores, processed, vertex_to_agg,
                       config.size_cap, agg_base=len(all_centers))
        all_centers.extend(centers.tolist())
    leftover = np.flatnonzero(~processed)
    for v in leftover:
        vertex_to_agg[v] = len(all_centers)
        all_centers.append(int(v))
    centers_arr = np.asarray(all_centers, dtype=np.int64)
    order = np.argsort(centers_arr)
    new_id = np.empty(centers_arr.shape[0], dtype=np.int64)
    new_id[order] = np.arange(centers_arr.shape[0], dtype=np.int64)
    return Aggregation(n, new_id[vertex_to_agg], centers_arr[order])


def compose(first, second):
    """Compose aggregations of two successive coarsenings into one map.

    Numbering stays strictly increasing because both inputs are and the
    composition of increasing seed sequences is increasing.
    """
    if second.n_fine != first.n_coarse:
        raise AggregationError("aggregations do not chain")
    v2a = second.vertex_to_agg[first.vertex_to_agg]
    seeds = first.coarse_vertex_of_agg[second.coarse_vertex_of_agg]
    return Aggregation(first.n_fine, v2a, seeds)


def write_aggregation(agg, path):
    """Text format: header 'agg n_fine n_coarse', then one aggregate id per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"agg {agg.n_fine} {agg.n_coarse}\n")
        for v in agg.vertex_to_agg:
            fh.write(f"{v}\n")


def read_aggregation(path):
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "agg":
            raise AggregationError(f"{path}: expected header 'agg n_fine n_coarse'")
        n_fine, n_coarse = int(header[1]), int(header[2])
        v2a = np.array([int(fh.readline()) for _ in range(n_fine)], dtype=np.int64)
    if np.unique(v2a).shape[0] != n_coarse:
        raise AggregationError(f"{path}: expected {n_coarse} nonempty aggregates")
    seeds = _derive_seeds(v2a, n_coarse)
    return Aggregation(n_fine, v2a, seeds)


def _derive_seeds(v2a, n_coarse):
    # representative = smallest member; v2a must already be numbered by it
    seeds = np.full(n_coarse, -1, dtype=np.int64)
    for v in range(v2a.shape[0] - 1, -1, -1):
        seeds[v2a[v]] = v
    return seeds


def renumber_by_min_member(n_fine, group_of_vertex):
    """Build an Aggregation from a raw vertex->group map, renumbering groups
    by their smallest member (used after reshaping, where seeds may migrate)."""
    groups, v2a = np.unique(group_of_vertex, return_inverse=True)
    n_coarse = groups.shape[0]
    seeds = _derive_seeds(v2a, n_coarse)
    order = np.argsort(seeds)
    new_id = np.empty(n_coarse, dtype=np.int64)
    new_id[order] = np.arange(n_coarse, dtype=np.int64)
    return Aggregation(n_fine, new_id[v2a], seeds[order])
