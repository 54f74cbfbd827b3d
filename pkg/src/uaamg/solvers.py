"""Solve phase: pointwise smoothers, aggregation-array grid transfers,
V-cycle / K-cycle (nonlinear AMLI), and flexible preconditioned CG.

All kernels accumulate in fixed orders, so results are independent of the
worker thread count. Singular (Neumann) systems are handled by mean
projection of right-hand sides and iterates.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


class NumericalError(RuntimeError):
    """Breakdown or incompatible data during the solve phase."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Smoother:
    kind: str = "l1"  # "l1" (parameter free) or "jacobi" (damped)
    omega: float = 2.0 / 3.0
    sweeps: int = 1

    def __post_init__(self):
        if self.kind not in ("l1", "jacobi"):
            raise ValueError(f"unknown smoother kind {self.kind!r}")
        if not 0 < self.omega <= 1:
            raise ValueError("damping must satisfy 0 < omega <= 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")


@dataclass(frozen=True)
class CycleSpec:
    kind: str = "kcycle"  # "kcycle" or "vcycle"
    inner_krylov_steps: int = 2
    pre_sweeps: int = 1
    post_sweeps: int = 1

    def __post_init__(self):
        if self.kind not in ("kcycle", "vcycle"):
            raise ValueError(f"unknown cycle kind {self.kind!r}")
        if self.inner_krylov_steps < 0:
            raise ValueError("inner_krylov_steps must be >= 0")


@dataclass
class SolveReport:
    iterations: int
    residual_history: list
    converged: bool
    timings: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_history": [float(r) for r in self.residual_history],
            "timings": dict(self.timings),
        }


def smoother_inverse_diag(a, smoother):
    """Per-row update factor: omega/a_ii for damped Jacobi, 1/(a_ii + d_ii)
    with d_ii = sum of off-diagonal magnitudes for the l1 variant."""
    if smoother.kind == "jacobi":
        m = a.diagonal()
        scale = smoother.omega
    else:
        m = kernels.l1_diag(a.indptr, a.indices, a.data)
        scale = 1.0
    if np.any(m <= 0):
        bad = int(np.flatnonzero(m <= 0)[0])
        raise NumericalError(f"non-positive smoother diagonal at row {bad}")
    return scale / m


def smooth(a, smoother, x, b, sweeps=None):
    """Apply pointwise-relaxation sweeps; returns the updated iterate."""
    if sweeps is None:
        sweeps = smoother.sweeps
    inv_m = smoother_inverse_diag(a, smoother)
    x = np.ascontiguousarray(x, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return kernels.smooth_sweeps(a.indptr, a.indices, a.data, inv_m, x, b, int(sweeps))


def prolongate_add(agg, e_coarse, x):
    """x_i + e_coarse[aggregate(i)] (piecewise-constant interpolation)."""
    e_coarse = np.asarray(e_coarse, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if e_coarse.shape != (agg.n_coarse,) or x.shape != (agg.n_fine,):
        raise ValueError("prolongation size mismatch")
    return kernels.prolongate_add(agg.vertex_to_agg, e_coarse, x)


def restrict(agg, r_fine):
    """Sum fine entries over each aggregate (transpose of prolongation)."""
    r_fine = np.asarray(r_fine, dtype=np.float64)
    if r_fine.shape != (agg.n_fine,):
        raise ValueError("restriction size mismatch")
    ptr, members = agg.members_csr()
    return kernels.restrict(ptr, members, r_fine)


def _project_mean(v):
    return v - v.mean()


def _check_compatible(b, where):
    norm = np.linalg.norm(b)
    if norm == 0.0:
        return b
    drift = abs(b.sum()) / (np.sqrt(b.shape[0]) * norm)
    if drift > 1e-10:
        raise NumericalError(
            f"right-hand side at {where} has a null-space component "
            f"(relative size {drift:.2e} > 1e-10)")
    return _project_mean(b)


def cycle(h, spec, smoother, level, b):
    """One multigrid cycle on A_level x = b from a zero initial guess.

    The K-cycle approximates each coarse problem with inner_krylov_steps
    flexible-CG iterations preconditioned by the cycle one level down;
    the coarsest level is always solved with the stored factorization.
    """
    b = np.asarray(b, dtype=np.float64)
    a = h.matrix(level)
    if b.shape != (a.n_rows,):
        raise ValueError("cycle right-hand side size mismatch")
    if h.singular:
        b = _check_compatible(b, f"level {level}")
    if level == h.n_levels - 1:
        x = h.coarsest_solver.solve(b)
        return _project_mean(x) if h.singular else x
    agg = h.levels[level].aggregation
    x = smooth(a, smoother, np.zeros(a.n_rows), b, spec.pre_sweeps)
    r = b - a.spmv(x)
    r_c = restrict(agg, r)
    if h.singular:
        r_c = _project_mean(r_c)
    exact_coarse = level + 1 == h.n_levels - 1
    if spec.kind == "vcycle" or spec.inner_krylov_steps == 0 or exact_coarse:
        e_c = cycle(h, spec, smoother, level + 1, r_c)
    else:
        e_c = _inner_fcg(h, spec, smoother, level + 1, r_c)
    x = prolongate_add(agg, e_c, x)
    x = smooth(a, smoother, x, b, spec.post_sweeps)
    return _project_mean(x) if h.singular else x


def _inner_fcg(h, spec, smoother, level, b):
    """Few flexible-CG steps on the coarse problem, K-cycle preconditioned."""
    a = h.matrix(level)
    x = np.zeros(a.n_rows)
    r = b.copy()
    b_norm = np.linalg.norm(b)
    p_prev = None
    ap_prev = None
    for _ in range(spec.inner_krylov_steps):
        if np.linalg.norm(r) <= 1e-14 * b_norm:
            break
        z = cycle(h, spec, smoother, level, r)
        if p_prev is None:
            p = z
        else:
            beta = -np.dot(z, ap_prev) / np.dot(p_prev, ap_prev)
            p = z + beta * p_prev
        ap = a.spmv(p)
        p_ap = np.dot(p, ap)
        if p_ap <= 0.0:
            break
        alpha = np.dot(p, r) / p_ap
        x = x + alpha * p
        r = r - alpha * ap
        if h.singular:
            r = _project_mean(r)
        p_prev, ap_prev = p, ap
    return x


def npcg_solve(h, cycle_spec, smoother, b, tol=1e-6, max_iters=200, x0=None):
    """Flexible (nonlinear) preconditioned CG with one cycle per application.

    Directions are A-orthogonalized against the previous direction only.
    Stops at relative l2 residual <= tol; two consecutive residual increases
    trigger a restart of the direction recurrence.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = h.matrix(0)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (a.n_rows,):
        raise ValueError("right-hand side size mismatch")
    if h.singular:
        b = _check_compatible(b, "the finest level")
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros(a.n_rows), SolveReport(0, [0.0], True)
    if x0 is None:
        x = np.zeros(a.n_rows)
        r = b.copy()
    else:
        x = np.asarray(x0, dtype=np.float64).copy()
        if h.singular:
            x = _project_mean(x)
        r = b - a.spmv(x)
    history = [np.linalg.norm(r) / b_norm]
    p_prev = None
    ap_prev = None
    consecutive_up = 0
    iterations = 0
    while history[-1] > tol and iterations < max_iters:
        z = cycle(h, cycle_spec, smoother, 0, r)
        if h.singular:
            z = _project_mean(z)
        if p_prev is None:
            p = z
        else:
            beta = -np.dot(z, ap_prev) / np.dot(p_prev, ap_prev)
            p = z + beta * p_prev
        ap = a.spmv(p)
        p_ap = np.dot(p, ap)
        if p_ap <= 0.0:
            report = SolveReport(iterations, history, False)
            raise NumericalError(
                f"conjugate-gradient breakdown at iteration {iterations + 1}: "
                f"p'Ap = {p_ap:.3e}", report=report)
        alpha = np.dot(p, r) / p_ap
        x = x + alpha * p
        r = r - alpha * ap
        if h.singular:
            r = _project_mean(r)
            x = _project_mean(x)
        rel = np.linalg.norm(r) / b_norm
        history.append(rel)
        iterations += 1
        if rel > history[-2]:
            consecutive_up += 1
        else:
            consecutive_up = 0
        if consecutive_up >= 2:
            p_prev, ap_prev = None, None
            consecutive_up = 0
        else:
            p_prev, ap_prev = p, ap
    return x, SolveReport(iterations, history, history[-1] <= tol)
