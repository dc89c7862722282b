"""Exact rational linear programming: two-phase primal simplex with Bland's rule.

Solves ``min c.x  s.t.  A x = b, x >= 0`` over ``Fraction``.  Problem sizes in
this package are a few rows by a few dozen columns, so a dense tableau is
fine.  Every result carries a dual vector: Farkas multipliers ``y`` with
``y.A <= 0`` and ``y.b > 0`` when infeasible, optimal duals otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class LPError(ArithmeticError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list | None
    value: Fraction | None
    dual: list | None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(T, r, j):
    piv = T[r][j]
    row = [v / piv for v in T[r]]
    T[r] = row
    for i in range(len(T)):
        if i != r and T[i][j]:
            f = T[i][j]
            Ti = T[i]
            T[i] = [a - f * b for a, b in zip(Ti, row)]


def _reduced_costs(T, basis, cost, ncols):
    rc = list(cost[:ncols])
    for r, bj in enumerate(basis):
        cb = cost[bj]
        if cb:
            Tr = T[r]
            for j in range(ncols):
                if Tr[j]:
                    rc[j] -= cb * Tr[j]
    return rc


def _run(T, basis, cost, allowed, ncols, max_iter=10000):
    rhs = ncols
    for _ in range(max_iter):
        rc = _reduced_costs(T, basis, cost, ncols)
        enter = next((j for j in allowed if rc[j] < 0), None)
        if enter is None:
            return "optimal", rc
        best, leave = None, None
        for r in range(len(T)):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][rhs] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            return "unbounded", rc
        _pivot(T, leave, enter)
        basis[leave] = enter
    raise LPError("simplex iteration limit reached")


def simplex_min(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    m = len(A)
    n = len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    flip = [(-1 if bi < 0 else 1) for bi in b]
    ncols = n + m
    T = []
    for i in range(m):
        row = [flip[i] * v for v in A[i]] + [Fraction(int(k == i)) for k in range(m)] + [flip[i] * b[i]]
        T.append(row)
    basis = [n + i for i in range(m)]
    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    status, rc = _run(T, basis, cost1, range(ncols), ncols)
    phase1 = sum((T[r][ncols] for r, bj in enumerate(basis) if bj >= n), Fraction(0))
    if phase1 > 0:
        y = [flip[i] * (1 - rc[n + i]) for i in range(m)]
        return LPResult("infeasible", None, None, y)
    # drive artificial variables out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            j = next((j for j in range(n) if T[r][j] != 0), None)
            if j is None:
                continue
            _pivot(T, r, j)
            basis[r] = j
        keep.append(r)
    T = [T[r] for r in keep]
    basis = [basis[r] for r in keep]
    cost2 = c + [Fraction(0)] * m
    status, rc = _run(T, basis, cost2, range(n), ncols)
    x = [Fraction(0)] * n
    for r, bj in enumerate(basis):
        if bj < n:
            x[bj] = T[r][ncols]
    if status == "unbounded":
        return LPResult("unbounded", x, None, None)
    y = [-flip[i] * rc[n + i] for i in range(m)]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", x, value, y)
