"""Dense helpers shared by the reshaping and analysis modules: pseudo-inverses,
energy-norm pencils with null-space deflation, local smoother operators."""

import numpy as np
import scipy.linalg


def eig_pinv(a, rel_tol=1e-12):
    """Pseudo-inverse of a symmetric PSD matrix via eigendecomposition.

    Eigenvalues below rel_tol * lambda_max are treated as null space.
    """
    vals, vecs = np.linalg.eigh((a + a.T) / 2.0)
    cut = rel_tol * max(float(vals[-1]), 0.0) if vals.shape[0] else 0.0
    inv = np.where(vals > cut, 1.0 / np.where(vals > cut, vals, 1.0), 0.0)
    return vecs @ (inv[:, None] * vecs.T)


def pencil_lambda_max(m, b, deflate_ones=False):
    """Largest eigenvalue of M v = lambda B v with B PSD.

    With deflate_ones the pencil is restricted to the complement of the
    constant vector by shifting B there (valid when M annihilates it).
    """
    m = (m + m.T) / 2.0
    b = (b + b.T) / 2.0
    n = b.shape[0]
    if deflate_ones:
        theta = max(np.trace(b) / n, 1.0)
        b = b + (theta / n) * np.ones((n, n))
    vals = scipy.linalg.eigh(m, b, eigvals_only=True)
    return float(vals[-1])


def a_selfadjoint_norm(e, a, singular):
    """A-norm of an A-self-adjoint PSD operator E (largest generalized
    eigenvalue of A E v = lambda A v, restricted to 1-perp when singular)."""
    return pencil_lambda_max(a @ e, a, deflate_ones=singular)


def smoother_error_matrix(a_hat, smoother):
    """Dense error propagator I - M^{-1} A for the named pointwise smoother."""
    diag = np.diag(a_hat)
    if smoother.kind == "jacobi":
        m = diag / smoother.omega
    else:
        m = diag + (np.abs(a_hat).sum(axis=1) - np.abs(diag))
    if np.any(m <= 0):
        raise ValueError("non-positive smoother diagonal in local problem")
    return np.eye(a_hat.shape[0]) - a_hat / m[:, None]
