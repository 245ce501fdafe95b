"""Small complex linear-algebra helpers used by the detectors.

Everything here operates on dense complex128 arrays; the systems involved
are tiny (at most 16x16), so clarity wins over blocked algorithms.
"""
from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError

# Pivot magnitude below which a Hermitian factorization is declared singular.
PIVOT_TOL = 1e-14


def gram(h: np.ndarray) -> np.ndarray:
    """Return H^H H for a complex matrix H.

    The result is symmetrized as (A + A^H)/2 so the stored matrix is exactly
    Hermitian entrywise (the conjugate pairs are bitwise conjugates and the
    diagonal has exactly zero imaginary part), which the Cholesky path relies
    on.
    """
    h = np.asarray(h, dtype=np.complex128)
    a = h.conj().T @ h
    return 0.5 * (a + a.conj().T)


def cholesky_factor(a: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^H = A for Hermitian positive definite A.

    Raises SingularMatrixError when a pivot magnitude falls below PIVOT_TOL,
    which covers both rank deficiency and loss of positive definiteness.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    low = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        pivot = (a[k, k] - low[k, :k] @ low[k, :k].conj()).real
        if abs(pivot) < PIVOT_TOL or pivot <= 0.0:
            raise SingularMatrixError(f"pivot {pivot:.3e} at column {k}")
        low[k, k] = np.sqrt(pivot)
        if k + 1 < n:
            col = a[k + 1 :, k] - low[k + 1 :, :k] @ low[k, :k].conj()
            low[k + 1 :, k] = col / low[k, k]
    return low


def hermitian_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for Hermitian positive definite A via Cholesky.

    B may be a vector or a matrix; the result matches its shape.
    """
    low = cholesky_factor(a)
    b = np.asarray(b, dtype=np.complex128)
    vector = b.ndim == 1
    rhs = b[:, None] if vector else b
    n = low.shape[0]
    if rhs.shape[0] != n:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, expected {n}")
    # forward substitution L z = B, then back substitution L^H x = z
    z = np.zeros_like(rhs)
    for k in range(n):
        z[k] = (rhs[k] - low[k, :k] @ z[:k]) / low[k, k]
    x = np.zeros_like(rhs)
    lh = low.conj().T
    for k in range(n - 1, -1, -1):
        x[k] = (z[k] - lh[k, k + 1 :] @ x[k + 1 :]) / lh[k, k]
    return x[:, 0] if vector else x


def max_log(a: float, b: float) -> float:
    """Max-log surrogate for log(e^a + e^b): simply max(a, b)."""
    return a if a >= b else b
