"""Two-player binary games: Spohn cubic, discriminant, j-invariant, landmarks, arcs.

Payoffs are ``a = X^(1)`` and ``b = X^(2)`` indexed ``a11, a12, a21, a22``.
The Spohn curve lives in P^3 with coordinates ``p11, p12, p21, p22``; its
planar model eliminates ``p22`` and uses ``x = p11, y = p12, z = p21``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .game import FormatMismatch, Game, ProbTensor
from .invariants import FAMILY_VARS, restricted_discriminant, restricted_S
from .konstanz import konstanz_float_batch
from .poly import MultiPoly, resultant_univariate
from .spohn import NonGeneric, build_spohn_matrices, nash_point_22, sign_condition

PAYOFF_VARS = ("a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22")
CUBIC_XYZ = ("x", "y", "z")
CELL_LABELS = ("11", "12", "21", "22")

# the eight linear factors that divide D(a,b) squared
SQUARED_FACTORS = (
    ("a11", "a12"), ("a11", "a21"), ("a12", "a22"), ("a21", "a22"),
    ("b11", "b12"), ("b11", "b21"), ("b12", "b22"), ("b21", "b22"),
)


class SingularCurve(ArithmeticError):
    """D(a,b) = 0; ``factors`` names the vanishing factors of D."""

    def __init__(self, factors: Sequence[str]):
        super().__init__("Spohn cubic is singular; vanishing factors: " + ", ".join(factors))
        self.factors = tuple(factors)


def _require_22(g: Game):
    if g.dims != (2, 2):
        raise FormatMismatch(f"expected a 2x2 game, got format {g.dims}")


def _ab(g: Game):
    (a11, a12, a21, a22), (b11, b12, b21, b22) = g.payoffs
    return a11, a12, a21, a22, b11, b12, b21, b22


def _c_from_payoffs(a11, a12, a21, a22, b11, b12, b21, b22) -> tuple:
    return (
        (a11 - a22) * (b11 - b12),
        (a11 - a21) * (b22 - b11),
        (a12 - a22) * (b11 - b12),
        (a11 - a21) * (b22 - b21),
        (a12 - a22) * (b21 - b12),
        (a12 - a21) * (b22 - b21),
        (a12 - a21) * (b22 - b11) + (a11 - a22) * (b21 - b12),
    )


# -- Spohn cubic ----------------------------------------------------------------

@dataclass(frozen=True)
class SpohnCubic:
    """``c1 x^2y + c2 x^2z + c3 xy^2 + c4 xz^2 + c5 y^2z + c6 yz^2 + c7 xyz``."""

    c: tuple

    def __getitem__(self, k):
        return self.c[k]

    def linear_relation(self):
        c1, c2, c3, c4, c5, c6, c7 = self.c
        return c1 + c2 - c3 - c4 + c5 + c6 - c7

    def cubic_relation(self):
        c1, c2, c3, c4, c5, c6, c7 = self.c
        return (c2 * c4 * c5 - c3 * c4 * c5 - c2 * c3 * c6 + c4 * c5 * c6 + c3 * c4 * c7
                - c4 * c5 * c7 - c4 * c4 * c5 + c4 * c5 * c5)

    def relations(self) -> tuple:
        return self.linear_relation(), self.cubic_relation()

    def as_poly(self, variables=CUBIC_XYZ) -> MultiPoly:
        """The cubic as a polynomial in x, y, z (numeric coefficients only)."""
        exps = ((2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 0, 2), (0, 2, 1), (0, 1, 2), (1, 1, 1))
        return MultiPoly(variables, {e: v for e, v in zip(exps, self.c) if v})

    def __call__(self, x, y, z):
        c1, c2, c3, c4, c5, c6, c7 = self.c
        return (c1 * x * x * y + c2 * x * x * z + c3 * x * y * y + c4 * x * z * z
                + c5 * y * y * z + c6 * y * z * z + c7 * x * y * z)


def spohn_cubic(g: Game) -> SpohnCubic:
    _require_22(g)
    return SpohnCubic(_c_from_payoffs(*_ab(g)))


def eliminant_cubic(g: Game) -> MultiPoly:
    """Eliminate ``p22`` from ``det M_1`` and ``det M_2`` with a resultant.

    Both quadrics are linear in ``p22``, so the resultant is a cubic in
    ``p11, p12, p21``, returned in the variables x, y, z."""
    _require_22(g)
    pv = ("p11", "p12", "p21", "p22")
    P = ProbTensor.symbolic((2, 2), pv)
    S = build_spohn_matrices(g, P)
    f1, f2 = S.det(0), S.det(1)
    r = resultant_univariate(f1, f2, "p22")
    return MultiPoly(CUBIC_XYZ, {e[:3]: c for e, c in r.with_vars(pv).terms.items()})


def spohn_quadrics(g: Game, variables=("p11", "p12", "p21", "p22")) -> tuple[MultiPoly, MultiPoly]:
    _require_22(g)
    S = build_spohn_matrices(g, ProbTensor.symbolic((2, 2), variables))
    return S.det(0), S.det(1)


# -- discriminant and Aronhold invariant in the payoffs ------------------------

def _gens(variables):
    return dict(zip(variables, MultiPoly.gens(variables)))


def _symbolic_c(variables, zero_last: bool) -> list[MultiPoly]:
    g = _gens(variables)
    z = MultiPoly.zero(variables)
    vals = [g.get(v, z) for v in PAYOFF_VARS]
    if zero_last:
        vals[3] = vals[7] = z
    return list(_c_from_payoffs(*vals))


def _retranslate(p_red: MultiPoly) -> MultiPoly:
    """Substitute ``a_k -> a_k - a22`` and ``b_k -> b_k - b22`` into a
    polynomial of the six reduced variables.

    The a-part and b-part of each term expand independently, so terms are
    grouped by a-exponent and the full polynomial is assembled as a sum of
    products in disjoint variable sets."""
    red_a = ("a11", "a12", "a21")
    red_b = ("b11", "b12", "b21")
    va, vb = ("a11", "a12", "a21", "a22"), ("b11", "b12", "b21", "b22")
    ga, gb = _gens(va), _gens(vb)
    shifted_a = [ga[v] - ga["a22"] for v in red_a]
    shifted_b = [gb[v] - gb["b22"] for v in red_b]

    def power_product(base, e, cache):
        if e not in cache:
            out = MultiPoly.constant(1, base[0].vars)
            for q, k in zip(base, e):
                if k:
                    out = out * q ** k
            cache[e] = out
        return cache[e]

    cache_a, cache_b = {}, {}
    grouped: dict = {}
    for e, c in p_red.with_vars(red_a + red_b).terms.items():
        ea, eb = e[:3], e[3:]
        q = power_product(shifted_b, eb, cache_b).scale(c)
        grouped[ea] = grouped[ea] + q if ea in grouped else q
    out: dict = {}
    for ea, qb in grouped.items():
        pa = power_product(shifted_a, ea, cache_a)
        for ka, ca in pa.terms.items():
            for kb, cb in qb.terms.items():
                key = ka + kb
                s = out.get(key, 0) + ca * cb
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return MultiPoly(PAYOFF_VARS, out)


@lru_cache(maxsize=None)
def _reduced(which: str) -> MultiPoly:
    red = ("a11", "a12", "a21", "b11", "b12", "b21")
    base = restricted_discriminant() if which == "D" else restricted_S()
    return base.subs(dict(zip(FAMILY_VARS, _symbolic_c(red, True))), red)


@lru_cache(maxsize=None)
def discriminant_in_payoffs() -> tuple[MultiPoly, MultiPoly]:
    """``(D(a,b), E(a,b))`` with ``D = prod(squared factors) * E``.

    The cubic's coefficients depend only on differences of payoffs, so D is
    computed with ``a22 = b22 = 0`` and translated back.  Raises
    :class:`~depeq.poly.NonExactDivision` if a factor fails to divide."""
    D = _retranslate(_reduced("D"))
    g = _gens(PAYOFF_VARS)
    E = D
    for u, v in SQUARED_FACTORS:
        lin = g[u] - g[v]
        E = E.exact_div(lin).exact_div(lin)
    return D, E


@lru_cache(maxsize=None)
def aronhold_in_payoffs() -> MultiPoly:
    """``I(a,b)``: the Aronhold invariant of the Spohn cubic."""
    return _retranslate(_reduced("S"))


# -- numeric invariants of a single game --------------------------------------

def cubic_discriminant(c: Sequence):
    return restricted_discriminant().eval(dict(zip(FAMILY_VARS, c)))


def cubic_aronhold(c: Sequence):
    return restricted_S().eval(dict(zip(FAMILY_VARS, c)))


def payoff_discriminant(g: Game):
    """D(a,b) at the payoffs of ``g``."""
    return cubic_discriminant(spohn_cubic(g).c)


def vanishing_factors(g: Game) -> list[str]:
    vals = dict(zip(PAYOFF_VARS, _ab(g)))
    out = [f"({u}-{v})^2" for u, v in SQUARED_FACTORS if vals[u] == vals[v]]
    if not out and payoff_discriminant(g) == 0:
        out.append("E")
    return out


def j_invariant(g: Game):
    """``I(a,b)^3 / D(a,b)`` (exact for rational payoffs).

    Raises :class:`SingularCurve` when D vanishes."""
    _require_22(g)
    c = spohn_cubic(g).c
    D = cubic_discriminant(c)
    if D == 0:
        raise SingularCurve(vanishing_factors(g) or ["D"])
    I = cubic_aronhold(c)
    if isinstance(D, float) or isinstance(I, float):
        return I ** 3 / D
    return Fraction(I) ** 3 / D


def is_generic(g: Game) -> bool:
    _require_22(g)
    a, b = g.payoffs
    return len(set(a)) == 4 and len(set(b)) == 4 and payoff_discriminant(g) != 0


# -- landmarks -------------------------------------------------------------------

@dataclass
class Landmarks22:
    N: tuple
    D: dict  # "11" -> flat 2x2 tuple (p11, p12, p21, p22)
    F: dict

    def all_points(self) -> dict:
        out = {"N": self.N}
        out.update({"D" + k: v for k, v in self.D.items()})
        out.update({"F" + k: v for k, v in self.F.items()})
        return out

    def to_json(self) -> dict:
        from .game import fmt_rational
        return {k: [fmt_rational(v) for v in p] for k, p in self.all_points().items()}


class RepeatedPayoffs(ValueError):
    pass


def landmarks(g: Game) -> Landmarks22:
    _require_22(g)
    a, b = g.payoffs
    if len(set(a)) < 4 or len(set(b)) < 4:
        raise RepeatedPayoffs("landmarks need pairwise distinct entries in each payoff matrix")
    a11, a12, a21, a22, b11, b12, b21, b22 = _ab(g)
    D = {
        "11": (0, (a11 - a21) * (b22 - b11), (a22 - a11) * (b11 - b12), (a11 - a21) * (b11 - b12)),
        "12": ((a22 - a12) * (b12 - b21), 0, (a22 - a12) * (b11 - b12), (a12 - a21) * (b11 - b12)),
        "21": ((a21 - a12) * (b21 - b22), (a11 - a21) * (b21 - b22), 0, (a11 - a21) * (b12 - b21)),
        "22": ((a22 - a12) * (b21 - b22), (a11 - a22) * (b21 - b22), (a12 - a22) * (b11 - b22), 0),
    }
    F = {
        "11": (0, (a12 - a21) * (b21 - b22), (a12 - a22) * (b21 - b12), (a12 - a21) * (b12 - b21)),
        "12": ((a11 - a22) * (b21 - b22), 0, (a11 - a22) * (b22 - b11), (a11 - a21) * (b11 - b22)),
        "21": ((a12 - a22) * (b11 - b22), (a11 - a22) * (b22 - b11), 0, (a11 - a22) * (b11 - b12)),
        "22": ((a12 - a21) * (b12 - b21), (a11 - a21) * (b21 - b12), (a12 - a21) * (b11 - b12), 0),
    }
    return Landmarks22(tuple(nash_point_22(g).projective), D, F)


def quadric_values(g: Game, p: Sequence) -> tuple:
    """``(f1(p), f2(p))`` for a point of P^3 in flat order."""
    (a11, a12, a21, a22), (b11, b12, b21, b22) = g.payoffs
    p11, p12, p21, p22 = p
    f1 = (a21 - a11) * p11 * p21 + (a22 - a11) * p11 * p22 + (a21 - a12) * p12 * p21 + (a22 - a12) * p12 * p22
    f2 = (b12 - b11) * p11 * p12 + (b22 - b11) * p11 * p22 + (b12 - b21) * p12 * p21 + (b22 - b21) * p21 * p22
    return f1, f2


def tangent_residuals(g: Game, E_index: int, q: Sequence) -> tuple:
    """Gradients of f1, f2 at the coordinate point ``E_index`` applied to ``q``.

    Both vanish iff ``q`` lies on the tangent line of the curve at that point."""
    e = [0, 0, 0, 0]
    e[E_index] = 1
    out = []
    for which in range(2):
        grad = []
        for k in range(4):
            hi = list(e)
            hi[k] += 1
            lo = list(e)
            lo[k] -= 1
            # exact central difference of a quadratic form
            grad.append(Fraction(quadric_values(g, hi)[which] - quadric_values(g, lo)[which], 2))
        out.append(sum(gk * qk for gk, qk in zip(grad, q)))
    return tuple(out)


# -- degree of the Spohn curve by plane sections --------------------------------

@dataclass
class PlaneSection:
    plane: tuple
    quartic: list  # univariate coefficients in p11, lowest degree first
    points: list  # complex points (p11, p12, p21, p22) with p21 = 1
    max_residual: float

    @property
    def degree(self) -> int:
        return len(self.quartic) - 1


def plane_section(g: Game, rng: np.random.Generator, bound: int = 50) -> PlaneSection:
    """Intersect the Spohn curve with a random plane ``r . p = 0``.

    Solves the plane for ``p22``, sets ``p21 = 1`` and eliminates ``p12`` by a
    resultant, leaving a univariate polynomial in ``p11`` whose degree is the
    number of intersection points counted with multiplicity."""
    import mpmath

    _require_22(g)
    pv = ("p11", "p12", "p21", "p22")
    f1, f2 = spohn_quadrics(g, pv)
    while True:
        r = tuple(int(v) for v in rng.integers(-bound, bound + 1, size=4))
        if r[3] != 0 and all(r):
            break
    gens = _gens(("p11", "p12"))
    p11, p12 = gens["p11"], gens["p12"]
    one = MultiPoly.constant(1, ("p11", "p12"))
    p22 = (p11.scale(r[0]) + p12.scale(r[1]) + one.scale(r[2])).scale(Fraction(-1, r[3]))
    sub = {"p11": p11, "p12": p12, "p21": one, "p22": p22}
    q1, q2 = f1.subs(sub, ("p11", "p12")), f2.subs(sub, ("p11", "p12"))
    res = resultant_univariate(q1, q2, "p12")
    coeffs = res.univariate_coeffs("p11")
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    mpmath.mp.dps = 50
    roots = mpmath.polyroots([mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator for c in reversed(coeffs)],
                             maxsteps=200, extraprec=200)
    points, worst = [], 0.0
    for x in roots:
        x = complex(x)
        y = _common_root(q1, q2, x)
        p = (x, y, 1.0, complex(p22.eval_float({"p11": x, "p12": y})))
        scale = max(1.0, max(abs(v) for v in p)) ** 2
        resid = max(abs(complex(v)) for v in quadric_values(g, p)) / scale
        worst = max(worst, resid)
        points.append(p)
    return PlaneSection(r, coeffs, points, worst)


def _common_root(q1: MultiPoly, q2: MultiPoly, x: complex) -> complex:
    """The common root in ``p12`` of two quadratics specialized at ``p11 = x``."""
    cand = []
    for q in (q1, q2):
        cs = q.coeffs_in("p12")
        coeffs = [complex(cs[k].eval_float({"p11": x})) if k in cs else 0j for k in range(3)]
        while len(coeffs) > 1 and abs(coeffs[-1]) < 1e-14:
            coeffs.pop()
        if len(coeffs) > 1:
            cand.extend(complex(v) for v in np.roots(coeffs[::-1]))

    def resid(y):
        return sum(abs(complex(q.eval_float({"p11": x, "p12": y}))) for q in (q1, q2))

    return min(cand, key=resid) if cand else 0j


# -- arc tracing -----------------------------------------------------------------

@dataclass
class Arc:
    endpoints: tuple  # e.g. ("E11", "F21")
    kernels: tuple  # normalized kernel vectors at the two endpoints
    polyline: np.ndarray  # (m, 2) payoff-plane samples along the arc

    @property
    def kind(self) -> str:
        return "".join(sorted(e[0] for e in self.endpoints))


@dataclass
class ArcReport:
    component_count: int
    arcs: list
    sign_condition_holds: bool
    resolution: int
    inconclusive: bool = False
    reason: str = ""
    bbox: tuple = ()
    curve_segments: list = field(default_factory=list)  # all traced segments of det K = 0

    @property
    def endpoint_types(self) -> list[str]:
        return [a.kind for a in self.arcs]

    def to_json(self) -> dict:
        return {
            "component_count": self.component_count,
            "sign_condition_holds": self.sign_condition_holds,
            "inconclusive": self.inconclusive,
            "reason": self.reason,
            "resolution": self.resolution,
            "arcs": [{"endpoints": list(a.endpoints), "type": a.kind,
                      "samples": len(a.polyline)} for a in self.arcs],
        }


def _det_field(g: Game):
    def f(x1, x2):
        x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
        pts = np.stack([np.ravel(x1), np.ravel(x2)], axis=1)
        return np.linalg.det(konstanz_float_batch(g, pts)).reshape(np.shape(x1))
    return f


def _kernels(g: Game, pts: np.ndarray) -> np.ndarray:
    """Unit null vectors (smallest right singular vectors) at each point."""
    K = konstanz_float_batch(g, np.asarray(pts, dtype=float))
    _, _, vh = np.linalg.svd(K)
    return vh[:, -1, :]


def _positive(v: np.ndarray) -> np.ndarray:
    return np.all(v > 0, axis=-1) | np.all(v < 0, axis=-1)


def payoff_bbox(g: Game, inflate: float = 0.05) -> tuple:
    X = g.float_payoffs()
    lo, hi = X.min(axis=1), X.max(axis=1)
    span = np.where(hi > lo, hi - lo, 1.0)
    lo, hi = lo - inflate * span, hi + inflate * span
    return (float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))


class _Tracer:
    """Marching squares on det K_X over a lattice of ``res * refine`` cells,
    evaluated only inside coarse blocks that the curve can cross."""

    def __init__(self, g: Game, res: int, refine: int):
        self.g = g
        self.res, self.refine = res, refine
        self.M = res * refine
        self.bbox = payoff_bbox(g)
        x0, x1, y0, y1 = self.bbox
        self.hx, self.hy = (x1 - x0) / self.M, (y1 - y0) / self.M
        self.f = _det_field(g)

    def xy(self, I, J):
        x0, _, y0, _ = self.bbox
        return np.broadcast_arrays(x0 + np.asarray(I) * self.hx, y0 + np.asarray(J) * self.hy)

    def trace(self):
        res, R = self.res, self.refine
        I = np.arange(res + 1) * R
        X, Y = self.xy(I[:, None], I[None, :])
        F = self.f(X, Y)
        s = F >= 0
        mixed = (s[:-1, :-1] != s[1:, :-1]) | (s[:-1, :-1] != s[:-1, 1:]) | (s[:-1, :-1] != s[1:, 1:])
        todo = [tuple(b) for b in np.argwhere(mixed)]
        done = set()
        nodes: dict = {}
        segments: list = []
        while todo:
            blk = todo.pop()
            if blk in done or not (0 <= blk[0] < res and 0 <= blk[1] < res):
                continue
            done.add(blk)
            for nb in self._block(blk, nodes, segments):
                if nb not in done:
                    todo.append(nb)
        return nodes, segments

    def _block(self, blk, nodes, segments):
        R, M = self.refine, self.M
        bi, bj = blk
        I = bi * R + np.arange(R + 1)
        J = bj * R + np.arange(R + 1)
        X, Y = self.xy(I[:, None], J[None, :])
        V = self.f(X, Y)
        S = V >= 0
        neighbours = []
        # crossings on the block boundary mean the curve continues next door
        if np.any(S[0, :-1] != S[0, 1:]):
            neighbours.append((bi - 1, bj))
        if np.any(S[-1, :-1] != S[-1, 1:]):
            neighbours.append((bi + 1, bj))
        if np.any(S[:-1, 0] != S[1:, 0]):
            neighbours.append((bi, bj - 1))
        if np.any(S[:-1, -1] != S[1:, -1]):
            neighbours.append((bi, bj + 1))

        def edge_point(i, j, horizontal):
            # edge from local node (i, j) to (i+1, j) or (i, j+1)
            gi, gj = I[i], J[j]
            key = ((gi * (M + 1) + gj) << 1) | (0 if horizontal else 1)
            if key not in nodes:
                va = V[i, j]
                vb = V[i + 1, j] if horizontal else V[i, j + 1]
                t = va / (va - vb) if va != vb else 0.5
                t = min(max(t, 0.0), 1.0)
                xa, ya = X[i, j], Y[i, j]
                if horizontal:
                    nodes[key] = (xa + t * self.hx, ya)
                else:
                    nodes[key] = (xa, ya + t * self.hy)
            return key

        c00, c10, c01, c11 = S[:-1, :-1], S[1:, :-1], S[:-1, 1:], S[1:, 1:]
        active = (c00 != c10) | (c00 != c01) | (c00 != c11)
        for i, j in np.argwhere(active):
            e = {}
            if S[i, j] != S[i + 1, j]:
                e["b"] = edge_point(i, j, True)
            if S[i, j + 1] != S[i + 1, j + 1]:
                e["t"] = edge_point(i, j + 1, True)
            if S[i, j] != S[i, j + 1]:
                e["l"] = edge_point(i, j, False)
            if S[i + 1, j] != S[i + 1, j + 1]:
                e["r"] = edge_point(i + 1, j, False)
            if len(e) == 2:
                a, b = e.values()
                segments.append((a, b))
            elif len(e) == 4:
                xc, yc = self.xy(I[i] + 0.5, J[j] + 0.5)
                centre = self.f(np.array([xc]), np.array([yc]))[0] >= 0
                if centre == S[i, j]:
                    segments.append((e["b"], e["r"]))
                    segments.append((e["t"], e["l"]))
                else:
                    segments.append((e["b"], e["l"]))
                    segments.append((e["r"], e["t"]))
        return neighbours


def _project(f, p, h):
    """A few Newton steps moving ``p`` onto ``f = 0`` along the gradient."""
    x, y = p
    for _ in range(4):
        v = f(np.array([x]), np.array([y]))[0]
        gx = (f(np.array([x + h]), np.array([y]))[0] - f(np.array([x - h]), np.array([y]))[0]) / (2 * h)
        gy = (f(np.array([x]), np.array([y + h]))[0] - f(np.array([x]), np.array([y - h]))[0]) / (2 * h)
        n2 = gx * gx + gy * gy
        if n2 == 0:
            break
        x, y = x - v * gx / n2, y - v * gy / n2
    return x, y


def _normalized(v: np.ndarray) -> np.ndarray:
    return v / v.sum()


def _refine_end(g: Game, f, inside, outside, scale, steps=80):
    """Bisect between a positive and a non-positive curve point."""
    a, b = np.array(inside, float), np.array(outside, float)
    h = 1e-7 * scale
    for _ in range(steps):
        if np.hypot(*(a - b)) < 1e-13 * scale:
            break
        m = _project(f, (a + b) / 2, h)
        if np.hypot(*(np.array(m) - (a + b) / 2)) > np.hypot(*(a - b)):
            m = (a + b) / 2  # projection jumped off the local branch
        v = _kernels(g, np.array([m]))[0]
        if _positive(v):
            a = np.array(m)
        else:
            b = np.array(m)
    return a, np.abs(_normalized(_kernels(g, np.array([a]))[0]))


def classify_endpoint(kernel: np.ndarray, threshold: float = 1e-6) -> str | None:
    """``E_ij`` for three vanishing entries, ``F_ij`` for exactly one."""
    kernel = np.abs(kernel) / np.abs(kernel).sum()
    small = kernel < threshold
    if small.sum() == 3:
        return "E" + CELL_LABELS[int(np.argmax(kernel))]
    if small.sum() == 1:
        return "F" + CELL_LABELS[int(np.argmin(kernel))]
    return None


def classify_arcs(g: Game, resolution: int = 256, refine: int = 16, check_generic: bool = True) -> ArcReport:
    """Connected components of the dependency-equilibrium curve of a 2x2 game.

    Traces ``det K_X(x) = 0`` over the inflated payoff bounding box, keeps
    segments whose kernel is strictly positive, merges them into components
    and classifies both ends of each component by the kernel limit.  With
    ``check_generic=False`` an end matching neither landmark type is labeled
    ``B`` followed by its vanishing cells, e.g. ``B1122``."""
    _require_22(g)
    if check_generic and not is_generic(g):
        raise NonGeneric("classify_arcs needs distinct entries per matrix and D(a,b) != 0")
    tracer = _Tracer(g, resolution, refine)
    nodes, segments = tracer.trace()
    sc = sign_condition(g)
    x0, x1, y0, y1 = tracer.bbox
    scale = max(x1 - x0, y1 - y0)
    report = ArcReport(0, [], sc, resolution, bbox=tracer.bbox)
    report.curve_segments = [(nodes[a], nodes[b]) for a, b in segments]
    if not segments:
        return report
    pts = {k: np.array(v) for k, v in nodes.items()}
    mids = np.array([(pts[a] + pts[b]) / 2 for a, b in segments])
    pos = _positive(_kernels(g, mids))

    parent = list(range(len(segments)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    incident: dict = {}
    for s, (a, b) in enumerate(segments):
        incident.setdefault(a, []).append(s)
        incident.setdefault(b, []).append(s)
    for node, segs in incident.items():
        ps = [s for s in segs if pos[s]]
        for s in ps[1:]:
            parent[find(s)] = find(ps[0])

    comps: dict = {}
    for s in range(len(segments)):
        if pos[s]:
            comps.setdefault(find(s), []).append(s)
    f = tracer.f
    for segs in sorted(comps.values(), key=lambda c: min(c)):
        segset = set(segs)
        ends = []
        for s in segs:
            for node in segments[s]:
                if sum(1 for t in incident[node] if t in segset) == 1:
                    ends.append((s, node))
        if len(ends) != 2:
            report.inconclusive = True
            report.reason = f"component with {len(ends)} ends"
            continue
        labels, kernels = [], []
        for s, node in ends:
            others = [t for t in incident[node] if t not in segset]
            if len(others) != 1:
                report.inconclusive = True
                report.reason = "curve leaves the traced window or branches at an arc end"
                break
            _, k = _refine_end(g, f, mids[s], mids[others[0]], scale)
            lab = classify_endpoint(k)
            if lab is None and not check_generic:
                # degenerate games can end on faces of other dimensions
                lab = "B" + "".join(c for c, v in zip(CELL_LABELS, np.abs(k) / np.abs(k).sum()) if v < 1e-6)
            if lab is None:
                report.inconclusive = True
                report.reason = f"endpoint kernel {np.round(k, 8).tolist()} matches no landmark"
                break
            labels.append(lab)
            kernels.append(k)
        else:
            poly = _walk(segments, segset, incident, ends[0][1], nodes)
            report.arcs.append(Arc(tuple(labels), tuple(kernels), poly))
    report.component_count = len(report.arcs)
    if report.inconclusive:
        report.component_count = len(comps)
    return report


def _walk(segments, segset, incident, start, nodes) -> np.ndarray:
    out = [nodes[start]]
    node, used = start, set()
    while True:
        nxt = [s for s in incident[node] if s in segset and s not in used]
        if not nxt:
            break
        s = nxt[0]
        used.add(s)
        a, b = segments[s]
        node = b if a == node else a
        out.append(nodes[node])
    return np.array(out)


def classify_arcs_robust(g: Game, resolution: int = 256, attempts: int = 2) -> ArcReport:
    """``classify_arcs``; an inconclusive trace is retried at 4x resolution."""
    rep = classify_arcs(g, resolution)
    for _ in range(attempts - 1):
        if not rep.inconclusive:
            break
        resolution *= 4
        rep = classify_arcs(g, resolution, check_generic=False)
    return rep


# -- the ordering harness --------------------------------------------------------

def ordering_pairs():
    """All pairs of strict orderings of the four a-entries and the four b-entries."""
    perms = list(itertools.permutations(range(4)))
    return [(pa, pb) for pa in perms for pb in perms]


def ordering_representative(rank_a: Sequence[int], rank_b: Sequence[int], seed: int, max_tries: int = 50) -> Game:
    """A generic integer game whose entry ``k`` of ``a`` (``b``) has rank
    ``rank_a[k]`` (``rank_b[k]``) among the four entries."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        va = sorted(int(v) for v in rng.choice(np.arange(1, 41), size=4, replace=False))
        vb = sorted(int(v) for v in rng.choice(np.arange(1, 41), size=4, replace=False))
        g = Game((2, 2), [[va[r] for r in rank_a], [vb[r] for r in rank_b]])
        if payoff_discriminant(g) != 0:
            return g
    raise NonGeneric("no generic representative found for this ordering pair")


def _harness_job(args):
    idx, pa, pb, seed, resolution = args
    g = ordering_representative(pa, pb, seed + idx)
    rep = classify_arcs_robust(g, resolution)
    return idx, g.payoffs, rep.component_count, rep.endpoint_types, rep.sign_condition_holds, rep.inconclusive, rep.reason


def ordering_harness(seed: int = 0, resolution: int = 256, processes: int | None = None, limit: int | None = None) -> list:
    """Classify arcs for one representative of every ordering pair.

    Returns tuples ``(index, payoffs, count, types, sign_condition, inconclusive, reason)``
    sorted by index."""
    pairs = ordering_pairs()
    if limit is not None:
        pairs = pairs[:limit]
    jobs = [(k, pa, pb, seed, resolution) for k, (pa, pb) in enumerate(pairs)]
    if processes == 1:
        out = [_harness_job(j) for j in jobs]
    else:
        import multiprocessing as mp
        with mp.get_context("fork").Pool(processes) as pool:
            out = pool.map(_harness_job, jobs, chunksize=8)
    return sorted(out)
