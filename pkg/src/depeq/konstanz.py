"""Konstanz matrices: construction, kernels, sampling, minors and rank-drop points.

``K_X(x)`` has one block of ``d_i`` rows per player and one column per cell
``j`` (flat order).  Block ``i``, row ``k`` holds ``x_i - X^(i)_j`` where
``j_i == k`` and zero elsewhere, so ``K_X(x) P`` stacks the vectors
``M_i(P) (x_i, -1)^T``.  Maximal minors are listed by column subsets in
lexicographic order; the list index is a stable minor ID.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .game import Game, GameFormat, ProbTensor, to_rational
from .linalg import matvec_exact, nullspace_exact, nullspace_float, rank_exact, singular_values
from .poly import MultiPoly, resultant_univariate, upoly_gcd


class CombinatorialBlowup(ValueError):
    pass


class EmptyFiber(ValueError):
    pass


def payoff_vars(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass
class KonstanzMatrix:
    game: Game
    x: tuple
    rows: list  # list of lists, entries numbers or MultiPoly
    row_blocks: list  # (player, strategy) per row

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def numeric(self, dtype=float) -> np.ndarray:
        return np.array([[dtype(v) for v in row] for row in self.rows], dtype=dtype)

    def apply(self, P: ProbTensor) -> list:
        return [sum((a * p for a, p in zip(row, P.entries) if a != 0), 0) for row in self.rows]

    def pattern(self) -> list[list[str]]:
        """Human-readable entries, e.g. ``x1-a12`` or ``0``."""
        f = self.game.format
        names = Game.payoff_names(f)
        out = []
        for (i, k), row in zip(self.row_blocks, self.rows):
            out.append([
                f"x{i + 1}-{names[i][j]}" if f.unflatten(j)[i] == k else "0"
                for j in range(f.total_cells)
            ])
        return out


def build_konstanz(g: Game, x: Sequence | None = None) -> KonstanzMatrix:
    """``K_X(x)`` at a numeric point, or symbolically in ``x1..xn`` when ``x`` is None."""
    f = g.format
    if x is None:
        variables = payoff_vars(f.n)
        if g.is_symbolic:
            pv = next(v for t in g.payoffs for v in t if isinstance(v, MultiPoly)).vars
            variables = tuple(variables) + tuple(v for v in pv if v not in variables)
        x = tuple(MultiPoly.var(v, variables) for v in payoff_vars(f.n))
        payoffs = [[v.with_vars(variables) if isinstance(v, MultiPoly) else MultiPoly.constant(v, variables)
                    for v in t] for t in g.payoffs]
    else:
        if len(x) != f.n:
            raise ValueError(f"payoff point needs {f.n} coordinates")
        x = tuple(v if isinstance(v, (float, complex, MultiPoly)) else to_rational(v) for v in x)
        payoffs = g.payoffs
    rows, blocks = [], []
    for i, d in enumerate(f.dims):
        for k in range(d):
            row = [0] * f.total_cells
            for j in f.slices[i][k]:
                row[j] = x[i] - payoffs[i][j]
            rows.append(row)
            blocks.append((i, k))
    return KonstanzMatrix(g, tuple(x), rows, blocks)


def konstanz_float_batch(g: Game, points: np.ndarray) -> np.ndarray:
    """Stack of float Konstanz matrices, shape ``(len(points), sum d, prod d)``."""
    f = g.format
    points = np.atleast_2d(np.asarray(points))
    X = g.float_payoffs()
    out = np.zeros((points.shape[0], f.total_strategies, f.total_cells), dtype=points.dtype)
    r = 0
    for i, d in enumerate(f.dims):
        for k in range(d):
            cols = list(f.slices[i][k])
            out[:, r, cols] = points[:, i:i + 1] - X[i, cols][None, :]
            r += 1
    return out


@dataclass
class KernelBasis:
    x: tuple
    basis: list  # exact: lists of Fractions; float: numpy columns as lists
    rank: int
    tol: float | None
    exact: bool

    @property
    def dim(self) -> int:
        return len(self.basis)


def _is_exact_point(x) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in x)


def kernel_at(g: Game, x: Sequence, tol: float | None = None) -> KernelBasis:
    """Kernel of ``K_X(x)``: exact elimination for rational ``x`` (unless a float
    tolerance is requested), column-pivoted QR otherwise."""
    K = build_konstanz(g, x)
    if _is_exact_point(K.x) and tol is None and all(isinstance(v, (int, Fraction)) for t in g.payoffs for v in t):
        basis = nullspace_exact(K.rows, g.format.total_cells)
        return KernelBasis(K.x, basis, g.format.total_cells - len(basis), None, True)
    tol = 1e-10 if tol is None else tol
    A = K.numeric(complex if any(isinstance(v, complex) for v in K.x) else float)
    B, r = nullspace_float(A, tol)
    return KernelBasis(K.x, [list(B[:, j]) for j in range(B.shape[1])], r, tol, False)


def sample_spohn_point(g: Game, x: Sequence, tol: float | None = None, positive: bool = False) -> ProbTensor | None:
    """A kernel vector of ``K_X(x)`` scaled to total mass one, or None (empty).

    With ``positive=True`` a strictly positive kernel vector is sought first
    (max-min LP); otherwise the first basis vector with nonzero mass is used."""
    kb = kernel_at(g, x, tol)
    if kb.dim == 0:
        return None
    if positive:
        from .region import region_membership

        res = region_membership(g, kb.x, 0)
        if res.inside and res.t_star > 0 and res.certificate is not None:
            return res.certificate
    for v in kb.basis:
        s = sum(v)
        if (s != 0) if kb.exact else abs(s) > 1e-12 * max(1.0, max(abs(t) for t in v)):
            return ProbTensor(g.format, [t / s for t in v])
    return None


# -- symbolic maximal minors ---------------------------------------------------

def _sparse_det(columns: list[list[tuple[int, object]]], nrows: int, one):
    """Determinant of a square matrix given column-wise as (row, entry) lists."""
    total = None
    used = [False] * nrows
    chosen: list[int] = []

    def rec(c, acc):
        nonlocal total
        if c == len(columns):
            inv = sum(1 for a in range(len(chosen)) for b in range(a + 1, len(chosen)) if chosen[a] > chosen[b])
            term = acc if inv % 2 == 0 else -acc
            total = term if total is None else total + term
            return
        for r, entry in columns[c]:
            if not used[r]:
                used[r] = True
                chosen.append(r)
                rec(c + 1, acc * entry)
                chosen.pop()
                used[r] = False

    rec(0, one)
    return total if total is not None else one * 0


def konstanz_columns_symbolic(g: Game, charts: Sequence[str] | None = None) -> tuple[list, tuple[str, ...]]:
    """Column-wise sparse symbolic Konstanz matrix.

    ``charts[i]`` is ``"affine"`` (entries ``x_i - X``) or ``"infinity"``
    (the limit ``w_i = 0`` of the homogeneous form, entries 1)."""
    f = g.format
    variables = payoff_vars(f.n)
    charts = charts or ["affine"] * f.n
    xs = MultiPoly.gens(variables)
    one = MultiPoly.constant(1, variables)
    offsets = list(itertools.accumulate((0,) + f.dims[:-1]))
    cols = []
    for j, idx in enumerate(f.indices()):
        col = []
        for i in range(f.n):
            r = offsets[i] + idx[i]
            if charts[i] == "infinity":
                col.append((r, one))
            else:
                col.append((r, xs[i] - g.payoffs[i][j]))
        cols.append(col)
    return cols, variables


@dataclass
class MinorInfo:
    id: int
    columns: tuple[int, ...]
    poly: MultiPoly
    linear_factors: list = field(default_factory=list)
    residual: MultiPoly | None = None

    @property
    def is_zero(self) -> bool:
        return not self.poly.terms

    @property
    def degree(self) -> int:
        return self.poly.total_degree()


def maximal_minors_symbolic(g: Game, bound: int = 16, charts: Sequence[str] | None = None) -> list[MultiPoly]:
    f = g.format
    if f.total_cells > bound:
        raise CombinatorialBlowup(f"{f.total_cells} columns exceed the bound {bound}")
    cols, variables = konstanz_columns_symbolic(g, charts)
    r = f.total_strategies
    one = MultiPoly.constant(1, variables)
    out = []
    for subset in itertools.combinations(range(f.total_cells), r):
        out.append(_sparse_det([cols[j] for j in subset], r, one))
    return out


def linear_factor_candidates(g: Game) -> list[MultiPoly]:
    variables = payoff_vars(g.n)
    xs = MultiPoly.gens(variables)
    out = []
    for i in range(g.n):
        for v in sorted(set(g.payoffs[i])):
            out.append(xs[i] - v)
    return out


def peel_linear_factors(p: MultiPoly, candidates: Sequence[MultiPoly]) -> tuple[list, MultiPoly]:
    """Divide out every candidate linear factor (with multiplicity)."""
    found = []
    if not p.terms:
        return found, p
    for c in candidates:
        while p.total_degree() >= 1:
            q, r = p.divmod(c)
            if r.terms:
                break
            found.append(c)
            p = q
    return found, p


def minor_census(g: Game, bound: int = 16) -> list[MinorInfo]:
    minors = maximal_minors_symbolic(g, bound)
    cands = linear_factor_candidates(g)
    r = g.format.total_strategies
    out = []
    for mid, (cols, m) in enumerate(zip(itertools.combinations(range(g.format.total_cells), r), minors)):
        lin, res = peel_linear_factors(m, cands)
        out.append(MinorInfo(mid, cols, m, lin, res))
    return out


# -- rank-drop points for 3x2 games ------------------------------------------

@dataclass
class RankDropPoint:
    x1: complex | None  # None means the point at infinity in that factor
    x2: complex | None
    rank: int
    residual: float

    @property
    def affine(self) -> bool:
        return self.x1 is not None and self.x2 is not None

    @property
    def is_real(self) -> bool:
        return all(v is None or abs(v.imag) < 1e-9 for v in (self.x1, self.x2))


class RankDropError(ArithmeticError):
    pass


def _nonzero_cores(g: Game, charts) -> list[MultiPoly]:
    minors = maximal_minors_symbolic(g, charts=charts)
    cands = linear_factor_candidates(g)
    cores = []
    for m in minors:
        if not m.terms:
            continue
        _, core = peel_linear_factors(m, cands)
        cores.append(core)
    return cores


def _univariate_gcd_of(polys: list[MultiPoly], var: str) -> list:
    g = []
    for p in polys:
        g = upoly_gcd(g, p.univariate_coeffs(var)) if g else upoly_gcd(p.univariate_coeffs(var), [])
    return g


def _roots(coeffs: list, dps: int = 60) -> list[complex]:
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    with mpmath.workdps(dps):
        cs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(coeffs)]
        rts = mpmath.polyroots(cs, maxsteps=400, extraprec=4 * dps)
        return [complex(r) for r in rts]


def _konstanz_rank_at(g: Game, x1, x2, tol=1e-9) -> tuple[int, float]:
    K = konstanz_float_batch(g, np.array([[x1, x2]], dtype=complex))[0]
    s = singular_values(K)
    rank = int(np.sum(s > tol * s[0]))
    return rank, float(s[-1] / s[0])


def _affine_rank_drops(g: Game) -> list[RankDropPoint]:
    cores = _nonzero_cores(g, None)
    base = cores[0]
    univ = {}
    for elim, keep in (("x2", "x1"), ("x1", "x2")):
        polys = []
        for c in cores[1:]:
            r = resultant_univariate(base, c, elim)
            if r.terms:
                polys.append(r)
        if not polys:
            raise RankDropError("all resultants vanish: minors share a common factor")
        univ[keep] = _univariate_gcd_of(polys, keep)
    r1, r2 = _roots(univ["x1"]), _roots(univ["x2"])
    if len(r1) != len(r2):
        raise RankDropError("coordinate projections of the rank-drop locus disagree")
    if len(set(np.round(r1, 8))) != len(r1) or len(set(np.round(r2, 8))) != len(r2):
        raise RankDropError("two rank-drop points share a coordinate (non-generic game)")
    pts = []
    remaining = list(r2)
    for a in r1:
        def badness(b):
            vals = [abs(complex(c.eval({"x1": a, "x2": b}))) for c in cores]
            scale = sum(abs(complex(v)) for v in cores[0].terms.values()) * (1 + abs(a) + abs(b)) ** 4
            return max(vals) / scale

        b = min(remaining, key=badness)
        remaining.remove(b)
        rank, ratio = _konstanz_rank_at(g, a, b)
        pts.append(RankDropPoint(a, b, rank, ratio))
    return pts


def _chart_rank_drops(g: Game, charts, free: str) -> list:
    cores = _nonzero_cores(g, charts)
    if not cores:
        raise RankDropError("Konstanz matrix is rank-deficient along a whole line at infinity")
    g_ = _univariate_gcd_of(cores, free)
    return _roots(g_)


def rank_drop_points_32(g: Game) -> list[RankDropPoint]:
    """Points of P^1 x P^1 where the 5x6 Konstanz matrix has rank below five."""
    if g.dims != (3, 2):
        raise ValueError("rank_drop_points_32 needs a 3x2 game")
    pts = _affine_rank_drops(g)
    for x2 in _chart_rank_drops(g, ["infinity", "affine"], "x2"):
        pts.append(RankDropPoint(None, x2, -1, 0.0))
    for x1 in _chart_rank_drops(g, ["affine", "infinity"], "x1"):
        pts.append(RankDropPoint(x1, None, -1, 0.0))
    cols, _ = konstanz_columns_symbolic(g, ["infinity", "infinity"])
    const = [[0] * 6 for _ in range(5)]
    for j, col in enumerate(cols):
        for r, e in col:
            const[r][j] = e.constant_value()
    rk = rank_exact(const)
    if rk < 5:
        pts.append(RankDropPoint(None, None, rk, 0.0))
    return pts
