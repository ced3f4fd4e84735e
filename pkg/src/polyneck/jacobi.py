"""Cyclic Jacobi eigenvalue iteration for small real symmetric matrices.

Works on a single matrix or on a stack of shape (..., k, k); every matrix in
the stack is rotated with its own angles, so grid scans over a parameter can
be diagonalized in one pass.
"""

from __future__ import annotations

import numpy as np

from polyneck.errors import InvalidParameter

SYMMETRY_TOL = 1e-12


def _check_symmetric(a: np.ndarray) -> None:
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InvalidParameter(f"expected square matrices, got shape {a.shape}")
    scale = np.maximum(np.abs(a).max(axis=(-2, -1)), 1.0)
    asym = np.abs(a - np.swapaxes(a, -1, -2)).max(axis=(-2, -1))
    if np.any(asym > SYMMETRY_TOL * scale):
        raise InvalidParameter("matrix is not symmetric")


def _off_norm(a: np.ndarray) -> np.ndarray:
    k = a.shape[-1]
    mask = ~np.eye(k, dtype=bool)
    return np.linalg.norm(np.where(mask, a, 0.0), axis=(-2, -1))


def jacobi_eigenvalues(S, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues (ascending along the last axis) of symmetric ``S``.

    Sweeps stop once the off-diagonal Frobenius norm of every matrix is below
    ``tol`` times its full Frobenius norm.
    """
    a = np.array(S, dtype=float, copy=True)
    _check_symmetric(a)
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    k = a.shape[-1]
    if k == 1:
        return a[..., 0, :].copy()

    target = tol * np.linalg.norm(a, axis=(-2, -1))
    for _ in range(max_sweeps):
        if np.all(_off_norm(a) <= target):
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[..., p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                # |theta| -> inf gives t -> 0, which is the correct limit
                with np.errstate(over="ignore"):
                    theta = (a[..., q, q] - a[..., p, p]) / (2.0 * safe)
                    t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                cc = c[..., None]
                ss = s[..., None]
                col_p = a[..., :, p].copy()
                col_q = a[..., :, q].copy()
                a[..., :, p] = cc * col_p - ss * col_q
                a[..., :, q] = ss * col_p + cc * col_q
                row_p = a[..., p, :].copy()
                row_q = a[..., q, :].copy()
                a[..., p, :] = cc * row_p - ss * row_q
                a[..., q, :] = ss * row_p + cc * row_q
                a[..., p, q] = 0.0
                a[..., q, p] = 0.0
    return np.sort(np.diagonal(a, axis1=-2, axis2=-1), axis=-1)


def smallest_eigenvalue(S, tol: float = 1e-15) -> float:
    """Smallest eigenvalue of one symmetric matrix.

    >>> round(smallest_eigenvalue([[1.0, 0.75**0.5], [0.75**0.5, 1.0]]), 6)
    0.133975
    """
    a = np.asarray(S, dtype=float)
    if a.ndim != 2:
        raise InvalidParameter("smallest_eigenvalue takes a single matrix")
    return float(jacobi_eigenvalues(a, tol=tol)[0])
