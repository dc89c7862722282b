"""Spohn matrices, dependency-equilibrium tests and Nash points of small formats.

Row ``k`` of the Spohn matrix ``M_i(P)`` is ``(p_{+..k..+}, sum_j X^(i)_{..k..} p_{..k..})``.
A tensor in the open simplex is a dependency equilibrium iff every ``M_i``
has rank one, i.e. all 2x2 minors vanish.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .game import (
    FormatMismatch,
    Game,
    GameFormat,
    ProbTensor,
    conditional_numerator,
    marginal,
)
from .poly import MultiPoly, resultant_univariate


class NotInSimplex(ValueError):
    pass


class DegeneratePayoffs(ValueError):
    pass


class NonGeneric(ArithmeticError):
    """The closed-form Nash solver hit a degenerate (non-generic) game."""


class NotImplementedFormat(NotImplementedError):
    pass


@dataclass(frozen=True)
class SpohnMatrixSet:
    matrices: tuple  # matrices[i][k] == (marginal, numerator)

    def __getitem__(self, i):
        return self.matrices[i]

    def __len__(self):
        return len(self.matrices)

    def minor(self, i: int, k: int, l: int):
        (a, b), (c, d) = self.matrices[i][k], self.matrices[i][l]
        return a * d - b * c

    def minors(self, i: int) -> list:
        d = len(self.matrices[i])
        return [self.minor(i, k, l) for k, l in itertools.combinations(range(d), 2)]

    def det(self, i: int):
        if len(self.matrices[i]) != 2:
            raise ValueError("determinant only defined for two-strategy players")
        return self.minor(i, 0, 1)


def build_spohn_matrices(g: Game, P: ProbTensor) -> SpohnMatrixSet:
    if P.format != g.format:
        raise FormatMismatch(f"tensor format {P.format.dims} does not match game format {g.dims}")
    mats = []
    for i, d in enumerate(g.dims):
        mats.append(tuple((marginal(P, i, k), conditional_numerator(P, g, i, k)) for k in range(d)))
    return SpohnMatrixSet(tuple(mats))


def augmented_spohn_matrix(g: Game, P: ProbTensor, i: int) -> list:
    """``M_i`` with its column-sum row ``(p_{+...+}, P.X^(i))`` prepended."""
    M = build_spohn_matrices(g, P)[i]
    top = (sum((r[0] for r in M[1:]), M[0][0]), sum((r[1] for r in M[1:]), M[0][1]))
    return [top] + list(M)


def dependency_residual(g: Game, P: ProbTensor) -> list:
    """All 2x2 minors of all Spohn matrices, player by player, row pairs in lex order."""
    S = build_spohn_matrices(g, P)
    out = []
    for i in range(g.n):
        out.extend(S.minors(i))
    return out


class DECheck(NamedTuple):
    holds: bool
    residuals: list
    scale: float

    def __bool__(self):
        return self.holds


def is_dependency_equilibrium(g: Game, P: ProbTensor, tol: float | None = None) -> DECheck:
    """Rank-one test of all Spohn matrices for ``P`` in the open simplex.

    Exact tensors are tested with tolerance zero.  Float tensors compare
    ``max |minor| / scale**2`` against ``tol`` (default 1e-9), where ``scale``
    is the largest absolute Spohn-matrix entry."""
    if not P.in_open_simplex():
        raise NotInSimplex("tensor is not a positive normalized distribution")
    S = build_spohn_matrices(g, P)
    res = dependency_residual(g, P)
    if P.exact and g_exact(g) and tol is None:
        return DECheck(all(r == 0 for r in res), res, 1.0)
    tol = 1e-9 if tol is None else tol
    scale = max(abs(float(v)) for M in S.matrices for row in M for v in row) or 1.0
    worst = max((abs(float(r)) for r in res), default=0.0) / scale**2
    return DECheck(worst <= tol, res, scale)


def g_exact(g: Game) -> bool:
    return all(isinstance(v, (int, Fraction)) for t in g.payoffs for v in t)


def is_balanced_format(f: GameFormat | Sequence[int]) -> bool:
    dims = f.dims if isinstance(f, GameFormat) else tuple(f)
    n, total = len(dims), sum(dims)
    return all(d <= total - d - n + 2 for d in dims)


@dataclass
class NashPoint:
    format: GameFormat
    factors: tuple  # per-player probability vectors
    tensor: ProbTensor | None
    in_simplex: bool
    projective: tuple | None = None  # unnormalized rank-one tensor, when available
    is_real: bool = True
    residual: float = 0.0
    notes: list = field(default_factory=list)


def nash_point_22(g: Game) -> NashPoint:
    """The rank-one point of the Spohn curve of a 2x2 game.

    ``N = (b22-b21, b11-b12)^T (a22-a12, a11-a21)``.  When the two sign
    conditions hold it is scaled into the simplex; otherwise the projective
    matrix is returned with ``in_simplex=False``."""
    if g.dims != (2, 2):
        raise FormatMismatch("nash_point_22 needs a 2x2 game")
    (a11, a12, a21, a22), (b11, b12, b21, b22) = g.payoffs
    u = (b22 - b21, b11 - b12)  # player 1 (rows)
    v = (a22 - a12, a11 - a21)  # player 2 (columns)
    if u == (0, 0) or v == (0, 0):
        raise DegeneratePayoffs("a row or column of payoff differences vanishes")
    N = (u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    su, sv = u[0] + u[1], v[0] + v[1]
    factors = (
        tuple(Fraction(x) / su for x in u) if su else tuple(u),
        tuple(Fraction(x) / sv for x in v) if sv else tuple(v),
    )
    inside = sign_condition(g)
    tensor = None
    if su and sv:
        tensor = ProbTensor(g.format, [Fraction(x) / (su * sv) for x in N])
    return NashPoint(g.format, factors, tensor, inside, projective=N)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_condition(g: Game) -> bool:
    """Both sign equalities hold with nonzero signs (totally mixed Nash point exists)."""
    (a11, a12, a21, a22), (b11, b12, b21, b22) = g.payoffs
    sa, sb = _sign(a11 - a21), _sign(b11 - b12)
    return sa != 0 and sb != 0 and sa == _sign(a22 - a12) and sb == _sign(b22 - b21)


# -- three binary players ---------------------------------------------------

SEGRE_VARS = ("alpha", "beta", "gamma")


def segre_tensor_222(variables=SEGRE_VARS) -> ProbTensor:
    al, be, ga = (MultiPoly.var(v, variables) for v in SEGRE_VARS)
    one = MultiPoly.constant(1, variables)
    return ProbTensor.product([(al, one - al), (be, one - be), (ga, one - ga)])


def _strip_factors(p: MultiPoly, candidates: Sequence[MultiPoly]) -> tuple[MultiPoly, list]:
    removed = []
    changed = True
    while changed and not p.is_constant():
        changed = False
        for c in candidates:
            q, r = p.divmod(c)
            if not r.terms:
                p = q
                removed.append(c)
                changed = True
    return p, removed


def nash_equations_222(g: Game) -> tuple[list[MultiPoly], list[list[MultiPoly]]]:
    """The three multilinear Nash equations in (alpha, beta, gamma).

    Substitutes the Segre parametrization into ``det M_i`` and strips every
    factor among ``alpha, 1-alpha, beta, ...`` that divides exactly."""
    if g.dims != (2, 2, 2):
        raise FormatMismatch("nash_equations_222 needs a 2x2x2 game")
    P = segre_tensor_222()
    S = build_spohn_matrices(g, P)
    gens = MultiPoly.gens(SEGRE_VARS)
    one = MultiPoly.constant(1, SEGRE_VARS)
    candidates = [c for v in gens for c in (v, one - v)]
    eqs, removed = [], []
    for i in range(3):
        d = S.det(i)
        if not d.terms:
            raise NonGeneric(f"det M_{i + 1} vanishes identically on the Segre variety")
        e, rem = _strip_factors(d, candidates)
        if e.degree(SEGRE_VARS[i]) > 0 or any(e.degree(v) > 1 for v in SEGRE_VARS):
            raise NonGeneric(f"equation {i + 1} is not multilinear in the other two variables")
        eqs.append(e)
        removed.append(rem)
    return eqs, removed


def nash_points_222(g: Game) -> list[NashPoint]:
    """Both (complex) Nash points of a generic 2x2x2 game.

    Eliminates beta, then gamma, by resultants down to a quadratic in alpha
    and back-substitutes.  Raises :class:`NonGeneric` if the quadratic
    degenerates."""
    eqs, _ = nash_equations_222(g)
    e1, e2, e3 = eqs  # e1(beta,gamma), e2(alpha,gamma), e3(alpha,beta)
    for e, v in ((e1, "beta"), (e3, "beta"), (e2, "gamma")):
        if e.degree(v) < 1:
            raise NonGeneric(f"an equation does not involve {v}")
    r = resultant_univariate(e1.with_vars(SEGRE_VARS), e3, "beta").with_vars(SEGRE_VARS)
    if r.degree("gamma") < 1:
        raise NonGeneric("intermediate resultant lost gamma")
    q = resultant_univariate(r, e2, "gamma").with_vars(SEGRE_VARS)
    coeffs = q.univariate_coeffs("alpha") if q.terms else []
    if len(coeffs) != 3 or coeffs[2] == 0:
        raise NonGeneric(f"final polynomial in alpha has degree {len(coeffs) - 1}, expected 2")
    c0, c1, c2 = (Fraction(c) for c in coeffs)
    disc = c1 * c1 - 4 * c2 * c0
    sq = cmath.sqrt(float(disc))
    roots = [(-float(c1) + sq) / (2 * float(c2)), (-float(c1) - sq) / (2 * float(c2))]
    points = []
    for al in roots:
        be = None if _vanishes_at(e3, "beta", (c0, c1, c2), al) else _solve_linear(e3, "beta", {"alpha": al})
        ga = None if _vanishes_at(e2, "gamma", (c0, c1, c2), al) else _solve_linear(e2, "gamma", {"alpha": al})
        if be is None and ga is None:
            raise NonGeneric("back-substitution failed")
        if be is None:
            be = _solve_linear(e1, "beta", {"gamma": ga})
        if ga is None:
            ga = _solve_linear(e1, "gamma", {"beta": be})
        if be is None or ga is None:
            raise NonGeneric("back-substitution failed")
        vals = {"alpha": al, "beta": be, "gamma": ga}
        resid = max(abs(complex(e.eval(vals))) for e in eqs)
        real = all(abs(complex(v).imag) < 1e-12 * max(1.0, abs(v)) for v in vals.values())
        if real:
            al, be, ga = (complex(v).real for v in (al, be, ga))
        factors = ((al, 1 - al), (be, 1 - be), (ga, 1 - ga))
        inside = real and all(0 < t < 1 for t in (al, be, ga))
        tensor = ProbTensor.product(factors)
        points.append(NashPoint(g.format, factors, tensor, inside, is_real=real, residual=resid))
    return points


def _vanishes_at(e: MultiPoly, var: str, quad, al) -> bool:
    """Whether ``e`` leaves ``var`` undetermined at the root ``al`` of ``quad``.

    Both coefficients of ``e`` in ``var`` are linear in alpha, so this is
    decided exactly.  Raises :class:`NonGeneric` when only the leading one
    vanishes, i.e. the root belongs to a point at infinity."""
    cs = e.coeffs_in(var)

    def lin(k):
        c = cs.get(k)
        if c is None or not c.terms:
            return [Fraction(0)]
        return [Fraction(v) for v in c.with_vars(SEGRE_VARS).univariate_coeffs("alpha")]

    def at(coeffs, r):
        return sum(c * r**k for k, c in enumerate(coeffs))

    a, b = lin(1), lin(0)
    if not any(a):
        return True
    if len(a) < 2 or a[1] == 0:
        return False
    r = -a[0] / a[1]
    c0, c1, c2 = quad
    if c2 * r * r + c1 * r + c0 != 0:
        return False
    other = -Fraction(c1) / c2 - r
    if abs(complex(al) - float(r)) > abs(complex(al) - float(other)):
        return False
    if at(b, r) != 0:
        raise NonGeneric(f"the root alpha = {r} gives a Nash point at infinity")
    return True


def _solve_linear(e: MultiPoly, var: str, values: dict):
    cs = e.coeffs_in(var)
    a = cs.get(1)
    b = cs.get(0)
    av = complex(a.eval(values)) if a is not None else 0
    bv = complex(b.eval(values)) if b is not None else 0
    if abs(av) < 1e-14:
        return None
    return -bv / av


def _positive_indifferent_mixture(A) -> tuple | None:
    """A strictly positive ``q`` with ``sum q = 1`` and ``A q`` constant, or None.

    Maximizes ``min q`` exactly: with ``q = t + s`` (``s >= 0``) and the common
    value ``v = vp - vm``, minimizes ``sum s`` as in the payoff-region LP."""
    from .lp import simplex_min

    m, k = len(A), len(A[0])
    # columns: s_1..s_k, t+, t-, v+, v-
    rows, rhs = [], []
    for r in range(m):
        rs = sum(A[r])
        rows.append(list(A[r]) + [rs, -rs, -1, 1])
        rhs.append(0)
    rows.append([1] * k + [k, -k, 0, 0])
    rhs.append(1)
    res = simplex_min(rows, rhs, [0] * k + [-1, 1, 0, 0])
    if res.status != "optimal":
        return None
    t = res.x[k] - res.x[k + 1]
    if t <= 0:
        return None
    return tuple(t + v for v in res.x[:k])


def totally_mixed_nash_2p(g: Game) -> list[NashPoint]:
    """Totally mixed Nash equilibria of a two-player game (exact).

    Each player's mixture must make the opponent indifferent; these are linear
    conditions, so positivity is decided by an exact LP.  Returns one
    equilibrium (the max-min one) or an empty list."""
    if g.n != 2:
        raise FormatMismatch("totally_mixed_nash_2p needs a two-player game")
    d1, d2 = g.dims
    A = [[g.payoffs[0][i * d2 + j] for j in range(d2)] for i in range(d1)]
    Bt = [[g.payoffs[1][i * d2 + j] for i in range(d1)] for j in range(d2)]
    q = _positive_indifferent_mixture(A)
    p = _positive_indifferent_mixture(Bt)
    if q is None or p is None:
        return []
    tensor = ProbTensor.product([p, q])
    return [NashPoint(g.format, (p, q), tensor, True)]


def nash_points(g: Game) -> list[NashPoint]:
    if g.dims == (2, 2):
        return [nash_point_22(g)]
    if g.dims == (2, 2, 2):
        return nash_points_222(g)
    raise NotImplementedFormat(f"Nash solving is implemented for (2,2) and (2,2,2), not {g.dims}")
