"""Conditional independence: CI quadrics, Spohn CI residuals and the one-edge model.

Statements ``A _|_ B | C`` use 1-based player indices, as in ``"1_|_23"`` or
``"2_|_3|1"``.  The quadrics of a statement are the 2x2 minors of the
matrices obtained by marginalizing out the remaining players and, for each
state of ``C``, flattening ``A`` against ``B``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .game import FormatMismatch, Game, GameFormat, ProbTensor
from .poly import MultiPoly, resultant_univariate
from .spohn import NonGeneric, SpohnMatrixSet, dependency_residual, nash_points


class InvalidStatement(ValueError):
    pass


@dataclass(frozen=True)
class CIStatement:
    A: frozenset
    B: frozenset
    C: frozenset = frozenset()

    def __post_init__(self):
        if not self.A or not self.B:
            raise InvalidStatement("A and B must be nonempty")
        if self.A & self.B or self.A & self.C or self.B & self.C:
            raise InvalidStatement("A, B, C must be pairwise disjoint")
        if min(self.A | self.B | self.C) < 1:
            raise InvalidStatement("players are numbered from 1")

    def __str__(self):
        s = "".join(map(str, sorted(self.A))) + "_|_" + "".join(map(str, sorted(self.B)))
        return s + ("|" + "".join(map(str, sorted(self.C))) if self.C else "")

    def check_format(self, f: GameFormat):
        if max(self.A | self.B | self.C) > f.n:
            raise InvalidStatement(f"statement {self} mentions a player beyond {f.n}")


_STMT_RE = re.compile(r"^\s*(\d+)\s*_\|_\s*(\d+)\s*(?:\|\s*(\d*)\s*)?$")


def parse_statement(text: str) -> CIStatement:
    m = _STMT_RE.match(text)
    if not m:
        raise InvalidStatement(f"cannot parse CI statement {text!r}; expected e.g. 1_|_23 or 2_|_3|1")
    A, B, C = (frozenset(int(ch) for ch in (g or "")) for g in m.groups())
    return CIStatement(A, B, C)


def parse_statements(text: str) -> list[CIStatement]:
    return [parse_statement(s) for s in text.split(";") if s.strip()]


def _states(f: GameFormat, players: Sequence[int]):
    return list(itertools.product(*(range(f.dims[i]) for i in players)))


def flattenings(stmt: CIStatement, f: GameFormat, entries: Sequence) -> list[list[list]]:
    """One marginal ``A x B`` matrix per state of ``C``."""
    stmt.check_format(f)
    A, B, C = (sorted(i - 1 for i in s) for s in (stmt.A, stmt.B, stmt.C))
    rest = [i for i in range(f.n) if i not in A + B + C]
    out = []
    for c in _states(f, C):
        mat = []
        for a in _states(f, A):
            row = []
            for b in _states(f, B):
                total = None
                for r in _states(f, rest):
                    idx = [0] * f.n
                    for players, vals in ((A, a), (B, b), (C, c), (rest, r)):
                        for i, v in zip(players, vals):
                            idx[i] = v
                    e = entries[f.flatten(idx)]
                    total = e if total is None else total + e
                row.append(total)
            mat.append(row)
        out.append(mat)
    return out


def _minors2(mat) -> list:
    out = []
    for r1, r2 in itertools.combinations(range(len(mat)), 2):
        for c1, c2 in itertools.combinations(range(len(mat[0])), 2):
            out.append(mat[r1][c1] * mat[r2][c2] - mat[r1][c2] * mat[r2][c1])
    return out


@dataclass
class CIQuadricSet:
    statement: CIStatement
    format: GameFormat
    quadrics: list

    def __len__(self):
        return len(self.quadrics)


def ci_quadrics(stmt: CIStatement, f: GameFormat | Sequence[int]) -> CIQuadricSet:
    f = f if isinstance(f, GameFormat) else GameFormat(tuple(f))
    P = ProbTensor.symbolic(f.dims)
    qs = [q for mat in flattenings(stmt, f, P.entries) for q in _minors2(mat)]
    return CIQuadricSet(stmt, f, qs)


def ci_residual(P: ProbTensor, stmts: Sequence[CIStatement]) -> list:
    out = []
    for s in stmts:
        for mat in flattenings(s, P.format, P.entries):
            out.extend(_minors2(mat))
    return out


def is_ci_equilibrium(g: Game, P: ProbTensor, stmts: Sequence[CIStatement], tol: float = 1e-9) -> bool:
    if not P.in_open_simplex():
        return False
    res = list(ci_residual(P, stmts)) + list(dependency_residual(g, P))
    if P.exact:
        return all(r == 0 for r in res)
    return max((abs(float(r)) for r in res), default=0.0) <= tol


# -- the one-edge network (player 1 independent of players 2, 3) -----------------

SIGMA_VARS = ("s1", "s2")
TAU_VARS = ("t11", "t12", "t21", "t22")


def _check_222(g: Game):
    if g.dims != (2, 2, 2):
        raise FormatMismatch("the one-edge model is implemented for three binary players")


def one_edge_tensor(sigma: Sequence, tau: Sequence) -> ProbTensor:
    """``p_ijk = sigma_i tau_jk`` with ``tau`` flat ``(t11, t12, t21, t22)``."""
    return ProbTensor((2, 2, 2), [s * t for s in sigma for t in tau])


def one_edge_matrices(g: Game, sigma: Sequence, tau: Sequence) -> SpohnMatrixSet:
    """Spohn matrices on ``p = sigma (x) tau`` with common factors removed.

    Row ``i`` of ``M_1`` loses ``sigma_i`` and its first column loses
    ``tau_++``; the first columns of ``M_2`` and ``M_3`` lose ``sigma_+``."""
    _check_222(g)
    if not isinstance(sigma[0], MultiPoly) and (min(sigma) <= 0 or min(tau) <= 0):
        raise ValueError("sigma and tau must be positive")
    a, b, c = g.payoffs
    f = g.format
    s, t = list(sigma), list(tau)

    def T(j, k):
        return t[2 * j + k]

    M1 = tuple(
        (1, sum((a[f.flatten((i, j, k))] * T(j, k) for j in range(2) for k in range(2)), 0 * t[0]))
        for i in range(2)
    )
    M2 = tuple(
        (T(j, 0) + T(j, 1),
         sum((b[f.flatten((i, j, k))] * s[i] * T(j, k) for i in range(2) for k in range(2)), 0 * t[0]))
        for j in range(2)
    )
    M3 = tuple(
        (T(0, k) + T(1, k),
         sum((c[f.flatten((i, j, k))] * s[i] * T(j, k) for i in range(2) for j in range(2)), 0 * t[0]))
        for k in range(2)
    )
    return SpohnMatrixSet((M1, M2, M3))


def one_edge_linear_forms(g: Game) -> list[MultiPoly]:
    """``sigma_i * det(reduced M_1)`` written as linear forms in the p variables."""
    _check_222(g)
    P = ProbTensor.symbolic((2, 2, 2))
    a = g.payoffs[0]
    f = g.format
    forms = []
    for i in range(2):
        terms = MultiPoly.zero(P.entries[0].vars)
        for j in range(2):
            for k in range(2):
                terms = terms + P.entries[f.flatten((i, j, k))].scale(a[f.flatten((1, j, k))] - a[f.flatten((0, j, k))])
        forms.append(terms)
    return forms


@dataclass
class OneEdgePoint:
    sigma: tuple
    tau: tuple
    tensor: ProbTensor
    residual: float

    @property
    def positive(self) -> bool:
        return all(v > 0 for v in self.tensor.entries)


def sample_one_edge_points(g: Game, sigma_values: Sequence, dps: int = 40) -> list[OneEdgePoint]:
    """Real points of the one-edge Spohn CI curve over a sweep of ``sigma_1``.

    For fixed ``sigma = (s, 1 - s)`` the reduced ``det M_1`` is linear in
    ``tau``; it is solved for one coordinate, ``tau_22 = 1`` dehomogenizes,
    and the two remaining quadrics are intersected by a resultant."""
    _check_222(g)
    out = []
    for s in sigma_values:
        s = Fraction(s)
        sigma = (s, 1 - s)
        taus = _solve_tau(g, sigma, dps)
        for tau in taus:
            P = one_edge_tensor([float(v) for v in sigma], tau)
            total = sum(P.entries)
            if abs(total) < 1e-12:
                continue
            P = ProbTensor(P.format, [v / total for v in P.entries])
            res = max(abs(float(r)) for r in dependency_residual(g, P))
            out.append(OneEdgePoint(tuple(float(v) for v in sigma), tuple(v / total for v in tau), P, res))
    return out


def _solve_tau(g: Game, sigma, dps) -> list[tuple]:
    tv = TAU_VARS
    gens = MultiPoly.gens(tv)
    S = one_edge_matrices(g, [MultiPoly.constant(v, tv) for v in sigma], gens)
    lin, q2, q3 = S.det(0), S.det(1), S.det(2)
    t11, t12, t21, t22 = gens
    one = MultiPoly.constant(1, tv)
    # pick a coordinate with a nonzero coefficient in the linear form to eliminate
    coeff = {v: lin.diff(v) for v in ("t11", "t12", "t21")}
    elim = next((v for v in ("t21", "t12", "t11") if coeff[v].terms), None)
    if elim is None:
        raise NonGeneric("the reduced det M_1 does not involve tau")
    free = [v for v in ("t11", "t12", "t21") if v != elim]
    sub_expr = (lin - gens[tv.index(elim)] * coeff[elim]).scale(-1) * (Fraction(1) / coeff[elim].constant_value())
    mapping = {v: MultiPoly.var(v, tv) for v in tv}
    mapping[elim] = sub_expr
    mapping["t22"] = one
    r2 = q2.subs(mapping, tv).subs({**{v: MultiPoly.var(v, free) for v in free}, elim: 0, "t22": 1}, free)
    r3 = q3.subs(mapping, tv).subs({**{v: MultiPoly.var(v, free) for v in free}, elim: 0, "t22": 1}, free)
    u, w = free
    if r2.degree(w) < 1 or r3.degree(w) < 1:
        return []
    res = resultant_univariate(r2, r3, w)
    coeffs = [Fraction(c) for c in res.univariate_coeffs(u)] if res.terms else []
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        return []
    mpmath.mp.dps = dps
    roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(coeffs)],
                             maxsteps=200, extraprec=2 * dps)
    out = []
    for x in roots:
        x = complex(x)
        if abs(x.imag) > 1e-9 * max(1.0, abs(x)):
            continue
        x = x.real
        ys = []
        for q in (r2, r3):
            cs = q.coeffs_in(w)
            poly = [float(cs[k].eval_float({u: x})) if k in cs else 0.0 for k in range(q.degree(w) + 1)]
            ys.extend(np.roots(poly[::-1]))
        ys = [y.real for y in ys if abs(y.imag) < 1e-7 * max(1.0, abs(y))]
        if not ys:
            continue
        y = min(ys, key=lambda y: abs(r2.eval_float({u: x, w: y})) + abs(r3.eval_float({u: x, w: y})))
        vals = {u: x, w: y, "t22": 1.0}
        vals[elim] = sub_expr.eval_float({**vals, elim: 0.0})
        out.append(tuple(float(vals[v]) for v in tv))
    return out


# -- Nash points of the full-independence model ------------------------------------

def full_independence_nash_count(g: Game, n: int | None = None) -> int:
    """Number of complex Nash points of a generic binary game with 2 or 3 players.

    Raises :class:`NonGeneric` when the elimination degenerates."""
    n = g.n if n is None else n
    if g.dims != (2,) * n or n not in (2, 3):
        raise FormatMismatch("full-independence Nash counts are implemented for 2 or 3 binary players")
    return len(nash_points(g))
