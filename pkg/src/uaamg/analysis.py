"""Quality metrics: energy norm of the piecewise-constant l2 projection,
two-level convergence rates, and multi-level slice reports.

||Q||^2_A is the largest eigenvalue of the pencil (Q A Q, A), restricted to
the complement of the constant vector for singular problems. Below
dense_cap unknowns it is computed by a dense generalized eigensolve,
above by power iteration with the package's own multigrid as inner solver.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._dense import a_selfadjoint_norm, pencil_lambda_max
from .aggregation import AggregationConfig, compose
from .hierarchy import CoarseSolver, galerkin_coarse, setup
from .solvers import (CycleSpec, Smoother, npcg_solve, prolongate_add,
                      restrict, smoother_inverse_diag)

DENSE_CAP = 4096
POWER_TOL = 1e-5
POWER_MAX_ITERS = 500
POWER_SEED = 7


@dataclass
class TwoLevelReport:
    fine_level: int
    coarse_level: int
    coarsening_ratio: float
    q_energy_sq: float
    e_norm: float | None = None


def _dense_projector(agg):
    p = np.zeros((agg.n_fine, agg.n_coarse))
    p[np.arange(agg.n_fine), agg.vertex_to_agg] = 1.0
    return p / agg.agg_sizes @ p.T


def _q_apply_factory(a, agg):
    """Matrix-free Q A Q through the Galerkin coarse operator:
    Q A Q = P D^-1 A_c D^-1 P^T with D = diag(aggregate sizes)."""
    a_c = galerkin_coarse(a, agg)
    sizes = agg.agg_sizes.astype(np.float64)

    def q_a_q(v):
        rc = restrict(agg, v) / sizes
        rc = a_c.spmv(rc) / sizes
        return prolongate_add(agg, rc, np.zeros(agg.n_fine))

    def q(v):
        return prolongate_add(agg, restrict(agg, v) / sizes, np.zeros(agg.n_fine))

    return q, q_a_q


def _default_solver(a, singular, seed=101):
    h = setup(a, AggregationConfig(size_cap=5, seed=seed), singular=singular)
    spec = CycleSpec()
    sm = Smoother("l1")

    def solve(rhs, x0=None):
        x, _ = npcg_solve(h, spec, sm, rhs, tol=1e-9, max_iters=300, x0=x0)
        return x

    return solve


def q_energy_norm(a, agg, singular=False, dense_cap=DENSE_CAP, solver=None,
                  tol=POWER_TOL, max_iters=POWER_MAX_ITERS, seed=POWER_SEED):
    """Squared energy norm of the l2 projection onto the coarse space."""
    if agg.n_fine != a.n_rows:
        raise ValueError("aggregation does not match the matrix")
    if agg.n_coarse == agg.n_fine:
        return 1.0
    if a.n_rows <= dense_cap:
        q = _dense_projector(agg)
        dense = a.to_dense()
        return pencil_lambda_max(q @ dense @ q, dense, deflate_ones=singular)
    _, q_a_q = _q_apply_factory(a, agg)
    if solver is None:
        solver = _default_solver(a, singular)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.n_rows)
    if singular:
        v -= v.mean()
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        mv = q_a_q(v)
        lam_new = float(v @ mv) / float(v @ a.spmv(v))
        w = solver(mv, x0=lam_new * v)
        if singular:
            w -= w.mean()
        w /= np.linalg.norm(w)
        if lam != 0.0 and abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
        v = w
    return lam


def _two_level_error_dense(a, agg, smoother, singular):
    dense = a.to_dense()
    inv_m = smoother_inverse_diag(a, smoother)
    s = np.eye(a.n_rows) - inv_m[:, None] * dense
    a_c = galerkin_coarse(a, agg)
    coarse = CoarseSolver(a_c, singular)
    p = np.zeros((agg.n_fine, agg.n_coarse))
    p[np.arange(agg.n_fine), agg.vertex_to_agg] = 1.0
    # A-orthogonal projection onto range(P): P A_c^+ (P^T A)
    pi = p @ coarse.solve(p.T @ dense)
    e2 = s @ (np.eye(a.n_rows) - pi) @ s
    return a_selfadjoint_norm(e2, dense, singular)


def two_level_rate(a, agg, smoother=Smoother("l1"), singular=False,
                   dense_cap=DENSE_CAP, tol=POWER_TOL,
                   max_iters=POWER_MAX_ITERS, seed=POWER_SEED):
    """A-norm of the two-level error propagator S (I - Pi_A) S with exact
    coarse solve and one pre- plus one post-smoothing sweep."""
    if a.n_rows <= dense_cap:
        return _two_level_error_dense(a, agg, smoother, singular)
    inv_m = smoother_inverse_diag(a, smoother)
    a_c = galerkin_coarse(a, agg)
    coarse = CoarseSolver(a_c, singular)

    def s_apply(v):
        return v - inv_m * a.spmv(v)

    def e_apply(v):
        v = s_apply(v)
        v = v - prolongate_add(agg, coarse.solve(restrict(agg, a.spmv(v))),
                               np.zeros(agg.n_fine))
        return s_apply(v)

    rng = np.random.default_rng(seed)
    w = rng.standard_normal(a.n_rows)
    if singular:
        w -= w.mean()
    w /= np.linalg.norm(w)
    rho = 0.0
    for _ in range(max_iters):
        ew = e_apply(w)
        if singular:
            ew -= ew.mean()
        rho_new = float(w @ a.spmv(ew)) / float(w @ a.spmv(w))
        nrm = np.linalg.norm(ew)
        if nrm == 0.0:
            return 0.0
        w = ew / nrm
        if rho != 0.0 and abs(rho_new - rho) <= tol * abs(rho_new):
            rho = rho_new
            break
        rho = rho_new
    return max(rho, 0.0)


def hierarchy_report(h, dense_cap=DENSE_CAP, with_e_norm=True,
                     smoother=Smoother("l1")):
    """TwoLevelReport for every level pair (l, l'), l < l', mirroring the
    lower-triangular multi-level tables; aggregations are composed by map
    composition. e_norm is reported only on dense-path levels."""
    reports = []
    for fine in range(h.n_levels - 1):
        a = h.matrix(fine)
        solver = None
        if a.n_rows > dense_cap:
            sub = h.sub(fine)
            spec = CycleSpec()

            def solver(rhs, x0=None, _sub=sub, _spec=spec, _sm=smoother):
                x, _ = npcg_solve(_sub, _spec, _sm, rhs, tol=1e-9,
                                  max_iters=300, x0=x0)
                return x

        agg = None
        for coarse in range(fine + 1, h.n_levels):
            step = h.levels[coarse - 1].aggregation
            agg = step if agg is None else compose(agg, step)
            q_sq = q_energy_norm(a, agg, singular=h.singular,
                                 dense_cap=dense_cap, solver=solver)
            e_norm = None
            if with_e_norm and a.n_rows <= dense_cap:
                e_norm = two_level_rate(a, agg, smoother=smoother,
                                        singular=h.singular, dense_cap=dense_cap)
            reports.append(TwoLevelReport(fine, coarse, agg.coarsening_ratio,
                                          q_sq, e_norm))
    return reports


def reports_to_csv(reports, extra=None):
    """Long-form CSV rows `fine,coarse,ratio,q_energy_sq,e_norm`, optionally
    prefixed with constant context columns."""
    buf = io.StringIO()
    extra = extra or {}
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(extra) + ["fine", "coarse", "ratio", "q_energy_sq", "e_norm"])
    for r in reports:
        writer.writerow(list(extra.values()) +
                        [r.fine_level, r.coarse_level, repr(float(r.coarsening_ratio)),
                         repr(float(r.q_energy_sq)),
                         "" if r.e_norm is None else repr(float(r.e_norm))])
    return buf.getvalue()
