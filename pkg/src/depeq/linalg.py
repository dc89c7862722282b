"""Exact and floating-point kernels of small dense matrices."""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np
import scipy.linalg


def _integer_rows(A) -> list[list[int]]:
    rows = []
    for row in A:
        row = [Fraction(v) for v in row]
        m = lcm(*(v.denominator for v in row)) if row else 1
        rows.append([int(v * m) for v in row])
    return rows


def echelon(A) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of a rational matrix.

    Returns integer rows (zero rows dropped) and the pivot columns."""
    M = _integer_rows(A)
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        for i in range(r + 1, len(M)):
            f = M[i][c]
            # Bareiss step keeps entries integral
            M[i] = [(piv * M[i][j] - f * M[r][j]) // prev for j in range(ncols)]
        prev = piv
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank_exact(A) -> int:
    return len(echelon(A)[1])


def nullspace_exact(A, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel; one vector per free column, with a 1 there."""
    if ncols is None:
        ncols = len(A[0])
    E, pivots = echelon(A) if len(A) else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            s = sum(E[r][j] * v[j] for j in range(c + 1, ncols))
            v[c] = -s / E[r][c]
        basis.append(v)
    return basis


def matvec_exact(A, v) -> list:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def nullspace_float(A: np.ndarray, rtol: float = 1e-10) -> tuple[np.ndarray, int]:
    """Kernel via column-pivoted QR; returns (basis as columns, numeric rank).

    A diagonal entry of R counts toward the rank if it exceeds
    ``rtol`` times the largest absolute matrix entry."""
    A = np.asarray(A)
    m, n = A.shape
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0:
        return np.eye(n, dtype=A.dtype), 0
    Q, R, perm = scipy.linalg.qr(A, pivoting=True, mode="economic")
    diag = np.abs(np.diag(R))
    r = int(np.sum(diag > rtol * scale))
    if r == n:
        return np.zeros((n, 0), dtype=A.dtype), r
    R11 = R[:r, :r]
    R12 = R[:r, r:]
    X = -scipy.linalg.solve_triangular(R11, R12) if r else np.zeros((0, n - r), dtype=A.dtype)
    B = np.zeros((n, n - r), dtype=np.result_type(A.dtype, X.dtype))
    B[perm[:r], :] = X
    B[perm[r:], :] = np.eye(n - r)
    # orthonormalize for well-conditioned downstream use
    Qb, _ = np.linalg.qr(B)
    return Qb, r


def rank_float(A: np.ndarray, rtol: float = 1e-10) -> int:
    return nullspace_float(A, rtol)[1]


def singular_values(A: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
