"""The payoff region: images of dependency equilibria under the payoff map.

A point ``x`` lies in the region iff ``ker K_X(x)`` meets the open simplex.
Membership is decided by the max-min LP

    maximize t  subject to  K_X(x) P = 0,  sum(P) = 1,  P >= t

solved exactly.  With ``P = t + s`` and ``t = (1 - sum s) / N`` this becomes
``min sum(s)`` over ``s >= 0`` with ``(K - K1 1^T / N) s = -K1 / N``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.ndimage
import scipy.optimize
import scipy.spatial

from .game import Game, ProbTensor, to_rational
from .game import payoff_map as _payoff_map
from .konstanz import (
    build_konstanz,
    konstanz_float_batch,
    linear_factor_candidates,
    maximal_minors_symbolic,
    payoff_vars,
    peel_linear_factors,
)
from .lp import LPError, simplex_min
from .poly import MultiPoly

OUTSIDE, INSIDE, UNCERTAIN = 0, 1, 2
STATUS_NAMES = {OUTSIDE: "outside", INSIDE: "inside", UNCERTAIN: "boundary-uncertain"}


def payoff_map(g: Game, P: ProbTensor) -> tuple:
    return _payoff_map(g, P)


# -- payoff polytope ---------------------------------------------------------------

def payoff_points(g: Game) -> list[tuple]:
    """The images ``(X^(1)_j, ..., X^(n)_j)`` of the cell indicators."""
    return [tuple(g.payoffs[i][j] for i in range(g.n)) for j in range(g.format.total_cells)]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points) -> list[tuple]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def payoff_polytope(g: Game) -> list[tuple]:
    """Vertices of the convex hull of the payoff points.

    Exact counter-clockwise vertex list for two players; for more players the
    vertex set from Qhull (unordered), or all distinct points if degenerate."""
    pts = payoff_points(g)
    if g.n == 2:
        return _hull_2d(pts)
    uniq = sorted(set(pts))
    try:
        hull = scipy.spatial.ConvexHull(np.array(uniq, dtype=float))
    except scipy.spatial.QhullError:
        return uniq
    return [uniq[k] for k in sorted(hull.vertices)]


def bounding_box(g: Game) -> tuple:
    """``((lo_1, hi_1), ..., (lo_n, hi_n))`` of the payoff polytope, exact."""
    pts = payoff_points(g)
    return tuple((min(p[i] for p in pts), max(p[i] for p in pts)) for i in range(g.n))


# -- membership --------------------------------------------------------------------

@dataclass
class Membership:
    inside: bool
    t_star: Fraction | None  # None when the fiber is empty
    certificate: ProbTensor | None  # optimal P (present whenever the fiber is nonempty)
    witness: list | None  # Farkas multipliers (empty fiber) or optimal duals
    eps: Fraction = Fraction(0)

    def __bool__(self):
        return self.inside


def _lp_data(K_rows, N):
    k1 = [sum(row, Fraction(0)) for row in K_rows]
    A = [[Fraction(v) - k / N for v in row] for row, k in zip(K_rows, k1)]
    b = [-k / N for k in k1]
    return A, b


def max_min_lp(g: Game, x: Sequence):
    """Exact optimum of the max-min LP at a rational point ``x``.

    Returns ``(t_star or None, P or None, dual)``."""
    x = tuple(to_rational(v) for v in x)
    K = build_konstanz(g, x)
    rows = [[Fraction(v) for v in row] for row in K.rows]
    N = g.format.total_cells
    A, b = _lp_data(rows, N)
    res = simplex_min(A, b, [1] * N)
    if res.status == "infeasible":
        return None, None, res.dual
    if res.status != "optimal":
        raise LPError("max-min LP reported unbounded, which is impossible by construction")
    s = res.x
    t = (1 - sum(s, Fraction(0))) / N
    P = ProbTensor(g.format, [t + v for v in s])
    return t, P, res.dual


def _is_inside(t, eps) -> bool:
    if t is None:
        return False
    return t > eps if eps > 0 else t >= 0


def region_membership(g: Game, x: Sequence, eps=Fraction(1, 10**9)) -> Membership:
    """INSIDE iff the max-min LP optimum exceeds ``eps``; ``eps = 0`` tests
    the closed fiber (``t* >= 0``)."""
    eps = to_rational(eps)
    t, P, y = max_min_lp(g, x)
    return Membership(_is_inside(t, eps), t, P, y, eps)


def verify_certificate(g: Game, x: Sequence, m: Membership) -> bool:
    """Exact re-check of an INSIDE certificate: ``K P = 0``, ``sum P = 1``, ``min P >= eps``."""
    if m.certificate is None:
        return False
    P = m.certificate
    K = build_konstanz(g, tuple(to_rational(v) for v in x))
    return (all(v == 0 for v in K.apply(P)) and sum(P.entries) == 1
            and min(P.entries) >= m.eps and P.exact)


def region_membership_numeric(g: Game, x: Sequence, eps: float = 1e-9, tol: float = 1e-8) -> tuple[bool, float]:
    """Float membership with a rank-revealing kernel.

    Meant for irrational points such as rank-drop points, where the fiber
    jumps in dimension and any rational approximation loses it.  Solves the
    max-min LP over the numerical kernel basis ``B``: maximize t with
    ``1.Bw = 1`` and ``Bw >= t``.  Returns ``(inside, t_star)``."""
    from .konstanz import kernel_at

    kb = kernel_at(g, tuple(float(v) for v in x), tol)
    if kb.dim == 0:
        return False, -np.inf
    B = np.real(np.array(kb.basis).T)
    N, k = B.shape
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-B, np.ones((N, 1))])
    A_eq = np.append(B.sum(axis=0), 0.0)[None, :]
    res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=np.zeros(N), A_eq=A_eq, b_eq=[1.0],
                                 bounds=[(None, None)] * k + [(None, 1.0)], method="highs")
    if res.status != 0:
        return False, -np.inf
    t = -res.fun
    return t > eps, t


# -- float evaluation for rasters ------------------------------------------------

def _cofactor_kernels(K: np.ndarray) -> np.ndarray:
    """Kernel of ``r x (r+1)`` matrices via signed maximal minors."""
    m, r, N = K.shape
    out = np.empty((m, N))
    for j in range(N):
        cols = [c for c in range(N) if c != j]
        out[:, j] = (-1) ** j * np.linalg.det(K[:, :, cols])
    return out


def max_min_float(g: Game, points: np.ndarray) -> np.ndarray:
    """Float max-min LP optimum at each point; ``-inf`` marks an empty fiber."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    f = g.format
    N, r = f.total_cells, f.total_strategies
    K = konstanz_float_batch(g, points)
    if N == r + 1:
        k = _cofactor_kernels(K)
        s = k.sum(axis=1)
        scale = np.abs(k).max(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = k.min(axis=1) / s
            t_neg = k.max(axis=1) / s
        t = np.where(s > 0, t, t_neg)
        # sum of the kernel vector ~ 0: no normalizable kernel vector
        t = np.where(np.abs(s) > 1e-12 * np.maximum(scale, 1e-300), t, -np.inf)
        # all cofactors ~ 0: K drops rank and the kernel is wider than one line
        norm = np.abs(K).max(axis=(1, 2)) ** r
        wide = np.flatnonzero(scale <= 1e-10 * np.maximum(norm, 1e-300))
        if len(wide):
            t[wide] = _max_min_linprog(K[wide])
        return t
    if N == r:
        return np.full(len(points), -np.inf)
    return _max_min_linprog(K)


def _max_min_linprog(K: np.ndarray) -> np.ndarray:
    m, r, N = K.shape
    out = np.empty(m)
    c = np.zeros(N + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-np.eye(N), np.ones((N, 1))])
    b_ub = np.zeros(N)
    for idx in range(m):
        A_eq = np.vstack([np.hstack([K[idx], np.zeros((r, 1))]), np.append(np.ones(N), 0.0)])
        b_eq = np.append(np.zeros(r), 1.0)
        res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                                     bounds=[(None, None)] * (N + 1), method="highs")
        out[idx] = -res.fun if res.status == 0 else -np.inf
    return out


# -- sign vectors ----------------------------------------------------------------

@lru_cache(maxsize=64)
def _minors_cached(g: Game) -> tuple:
    ms = maximal_minors_symbolic(g)
    return tuple(m for m in ms if m.terms)


def nonzero_minors(g: Game) -> tuple:
    return _minors_cached(g)


@dataclass(frozen=True)
class SignVector:
    signs: tuple  # entries in {-1, 0, 1}, one per nonzero maximal minor

    def __len__(self):
        return len(self.signs)

    def __str__(self):
        return "".join("-0+"[s + 1] for s in self.signs)

    @property
    def has_zero(self) -> bool:
        return 0 in self.signs

    @property
    def oriented(self) -> tuple:
        """Signs up to a global flip (first nonzero sign made positive).

        A chirotope and its negative define the same oriented matroid."""
        first = next((s for s in self.signs if s), 1)
        return tuple(s * first for s in self.signs)


def sign_vector_at(g: Game, x: Sequence) -> SignVector:
    x = tuple(to_rational(v) for v in x)
    assign = dict(zip(payoff_vars(g.n), x))
    vals = [m.eval(assign) for m in nonzero_minors(g)]
    return SignVector(tuple((v > 0) - (v < 0) for v in vals))


# -- boundary candidates -----------------------------------------------------------

@dataclass(frozen=True)
class BoundaryCandidate:
    poly: MultiPoly
    kind: str  # "linear" or "residual factor"

    @property
    def degree(self) -> int:
        return self.poly.total_degree()


def _canonical(p: MultiPoly) -> MultiPoly:
    p = p.primitive()
    if p.leading_term()[1] < 0:
        p = -p
    return p


def boundary_candidates(g: Game) -> list[BoundaryCandidate]:
    """Linear factors ``x_i - X^(i)_j`` peeled from the nonzero maximal minors,
    plus the remaining non-constant cofactors, deduplicated up to scalars."""
    cands = linear_factor_candidates(g)
    seen, out = set(), []
    for m in nonzero_minors(g):
        lin, rest = peel_linear_factors(m, cands)
        parts = [(l, "linear") for l in lin]
        if rest.total_degree() >= 1:
            parts.append((rest, "residual factor"))
        for p, kind in parts:
            p = _canonical(p)
            if p not in seen:
                seen.add(p)
                out.append(BoundaryCandidate(p, kind))
    return out


# -- rasterization -----------------------------------------------------------------

@dataclass
class RegionRaster:
    game: Game
    bbox: tuple  # exact ((lo, hi), ...) per coordinate
    resolution: int
    eps: Fraction
    status: np.ndarray  # int8 per cell
    t_star: np.ndarray  # float optimum at cell centres
    exact_resolved: int = 0
    _certs: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.bbox)

    def cell_center(self, idx: Sequence[int]) -> tuple:
        return tuple(lo + (Fraction(2 * int(k) + 1, 2 * self.resolution)) * (hi - lo)
                     for k, (lo, hi) in zip(idx, self.bbox))

    def components(self, status: int = INSIDE) -> int:
        _, count = scipy.ndimage.label(self.status == status)
        return int(count)

    def labels(self) -> np.ndarray:
        return scipy.ndimage.label(self.status == INSIDE)[0]

    def count(self, status: int) -> int:
        return int(np.sum(self.status == status))

    def certificate(self, idx: Sequence[int]) -> Membership:
        """Exact LP certificate for the cell centre (computed on demand)."""
        idx = tuple(int(k) for k in idx)
        if idx not in self._certs:
            self._certs[idx] = region_membership(self.game, self.cell_center(idx), self.eps)
        return self._certs[idx]

    def sign_vector(self, idx: Sequence[int]) -> SignVector:
        return sign_vector_at(self.game, self.cell_center(idx))

    def to_csv(self) -> str:
        head = ",".join(f"x{i + 1}" for i in range(self.n)) + ",status,t_star"
        lines = [head]
        for idx in itertools.product(range(self.resolution), repeat=self.n):
            c = self.cell_center(idx)
            t = self.t_star[idx]
            ts = "-inf" if not np.isfinite(t) else repr(float(t))
            lines.append(",".join(repr(float(v)) for v in c) + f",{STATUS_NAMES[int(self.status[idx])]},{ts}")
        return "\n".join(lines) + "\n"


def _grid(bbox, resolution, offset):
    axes = [np.array([float(lo + (Fraction(2 * k + offset, 2 * resolution)) * (hi - lo))
                      for k in range(resolution + (1 if offset == 0 else 0))]) for lo, hi in bbox]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1), tuple(len(a) for a in axes)


def _det_sign_change_cells(g: Game, bbox, resolution) -> np.ndarray:
    """Cells of a square format crossed by ``det K = 0`` with a positive kernel nearby."""
    nodes, shape = _grid(bbox, resolution, 0)
    det = np.linalg.det(konstanz_float_batch(g, nodes)).reshape(shape) >= 0
    n = len(shape)
    cell = tuple(slice(0, s - 1) for s in shape)
    ref = det[cell]
    mixed = np.zeros(ref.shape, dtype=bool)
    for corner in itertools.product((0, 1), repeat=n):
        sl = tuple(slice(c, c + s - 1) for c, s in zip(corner, shape))
        mixed |= det[sl] != ref
    out = np.zeros(ref.shape, dtype=bool)
    idxs = np.argwhere(mixed)
    if len(idxs):
        centres, _ = _grid(bbox, resolution, 1)
        flat = np.ravel_multi_index(idxs.T, ref.shape)
        _, _, vh = np.linalg.svd(konstanz_float_batch(g, centres[flat]))
        v = vh[:, -1, :]
        pos = np.all(v > 0, axis=1) | np.all(v < 0, axis=1)
        out[tuple(idxs[pos].T)] = True
    return out


def rasterize_region(g: Game, resolution: int = 256, eps=Fraction(1, 10**9), bbox=None) -> RegionRaster:
    """Classify every cell of a ``resolution^n`` grid over the payoff bounding box.

    A cell is INSIDE or OUTSIDE when its centre and all corners agree, and
    boundary-uncertain otherwise.  Float optima within ``10 eps`` of zero are
    re-solved exactly at the cell centre.  For square formats, where fibers
    are generically empty, cells crossed by ``det K = 0`` with a positive
    kernel are marked boundary-uncertain."""
    if g.n not in (2, 3):
        raise ValueError("rasterization supports two or three players")
    eps = to_rational(eps)
    bbox = bounding_box(g) if bbox is None else tuple((to_rational(a), to_rational(b)) for a, b in bbox)
    bbox = tuple((lo, hi) if hi > lo else (lo - 1, hi + 1) for lo, hi in bbox)
    f = g.format
    shape = (resolution,) * g.n
    if f.total_cells == f.total_strategies:
        status = np.where(_det_sign_change_cells(g, bbox, resolution), UNCERTAIN, OUTSIDE).astype(np.int8)
        return RegionRaster(g, bbox, resolution, eps, status, np.full(shape, -np.inf))
    feps = float(eps)
    centres, _ = _grid(bbox, resolution, 1)
    tc = max_min_float(g, centres)
    nodes, nshape = _grid(bbox, resolution, 0)
    tn = max_min_float(g, nodes).reshape(nshape)
    resolved = 0
    near = np.flatnonzero(np.isfinite(tc) & (np.abs(tc) <= 10 * max(feps, 1e-12)))
    inside_c = tc > feps if feps > 0 else tc >= 0
    for k in near:
        idx = np.unravel_index(k, shape)
        t, _, _ = max_min_lp(g, RegionRaster(g, bbox, resolution, eps, None, None).cell_center(idx))
        inside_c[k] = _is_inside(t, eps)
        tc[k] = float(t) if t is not None else -np.inf
        resolved += 1
    inside_c = inside_c.reshape(shape)
    inside_n = tn > feps if feps > 0 else tn >= 0
    agree = np.ones(shape, dtype=bool)
    for corner in itertools.product((0, 1), repeat=g.n):
        sl = tuple(slice(c, c + resolution) for c in corner)
        agree &= inside_n[sl] == inside_c
    status = np.where(agree, np.where(inside_c, INSIDE, OUTSIDE), UNCERTAIN).astype(np.int8)
    return RegionRaster(g, bbox, resolution, eps, status, tc.reshape(shape), resolved)


# -- Pareto optimality -------------------------------------------------------------

@dataclass
class ParetoResult:
    optimal: bool
    conclusive: bool
    dominating: tuple | None = None

    def __bool__(self):
        return self.optimal


def pareto_optimal(g: Game, x: Sequence, ray_samples: int = 8, seed: int = 0,
                   deltas: Sequence = tuple(Fraction(1, 10**k) for k in range(1, 9))) -> ParetoResult:
    """Search for a point of the region's closure that dominates ``x``.

    Probes ``x + delta * u`` for the coordinate directions and
    ``ray_samples`` random positive directions, with ``delta`` (relative to
    the bounding-box size) on a decreasing schedule."""
    x = tuple(to_rational(v) for v in x)
    if not region_membership(g, x, 0):
        return ParetoResult(False, False)
    bbox = bounding_box(g)
    size = max((hi - lo for lo, hi in bbox), default=Fraction(1)) or Fraction(1)
    n = g.n
    dirs = [tuple(Fraction(int(i == k)) for i in range(n)) for k in range(n)]
    rng = np.random.default_rng(seed)
    for _ in range(ray_samples):
        w = rng.integers(1, 10, size=n)
        dirs.append(tuple(Fraction(int(v), int(w.sum())) for v in w))
    for d in deltas:
        for u in dirs:
            y = tuple(xi + d * size * ui for xi, ui in zip(x, u))
            if region_membership(g, y, 0):
                return ParetoResult(False, True, y)
    return ParetoResult(True, True)
