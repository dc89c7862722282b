from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depeq.fixtures import load_fixture
from depeq.game import Game, ProbTensor
from depeq.konstanz import build_konstanz, sample_spohn_point
from depeq.region import (
    INSIDE,
    OUTSIDE,
    UNCERTAIN,
    _lp_data,
    boundary_candidates,
    max_min_float,
    nonzero_minors,
    pareto_optimal,
    payoff_map,
    payoff_polytope,
    rasterize_region,
    region_membership,
    region_membership_numeric,
    sign_vector_at,
    verify_certificate,
)
from depeq.konstanz import payoff_vars
from depeq.spohn import is_dependency_equilibrium

from .conftest import distinct_game, game_through

F = Fraction
ex23 = load_fixture("ex23")
bach = load_fixture("bach")
SPECIAL = (22.9902299164, 16.2987107576)
EMPTY = Game((3, 2), [[10, 11, 0, 1, 0, 1], [1, 2, 3, 4, 5, 6]])


def test_payoff_map_examples():
    N = ProbTensor((2, 2), [F(6, 25), F(9, 25), F(4, 25), F(6, 25)])
    assert payoff_map(bach, N) == (F(6, 5), F(6, 5))
    assert payoff_map(ex23, ProbTensor.indicator((3, 2), (0, 0))) == (0, 6)
    assert payoff_map(Game((2, 2), [[0] * 4, [0] * 4]), ProbTensor.uniform((2, 2))) == (0, 0)


def test_payoff_polytopes():
    hull = payoff_polytope(ex23)
    a, b = ex23.payoffs
    cells = {(a[k], b[k]) for k in range(6) if k != 3}
    assert set(hull) == cells and len(hull) == 5
    assert set(payoff_polytope(bach)) == {(0, 0), (2, 3), (3, 2)}
    assert payoff_polytope(Game((2, 2), [[1] * 4, [1] * 4])) == [(1, 1)]


def test_outside_hull_is_outside():
    for x in ((-1, 3), (40, 40), (0, 50)):
        m = region_membership(ex23, x)
        assert not m.inside and (m.t_star is None or m.t_star < 0)


def farkas_ok(g, x, y):
    rows = [[F(v) for v in r] for r in build_konstanz(g, x).rows]
    A, b = _lp_data(rows, g.format.total_cells)
    yA = [sum(yi * A[i][j] for i, yi in enumerate(y)) for j in range(len(A[0]))]
    return all(v <= 0 for v in yA) and sum(yi * bi for yi, bi in zip(y, b)) > 0


def test_empty_fiber_has_farkas_witness():
    # a 2x2 Konstanz matrix is invertible off its determinant curve
    g = load_fixture("bach_perturbed")
    x = (F(1, 3), F(5, 7))
    m = region_membership(g, x)
    assert m.t_star is None and farkas_ok(g, x, m.witness)


def test_optimal_duals_certify_value(rng):
    for _ in range(10):
        x = tuple(F(int(v), 3) for v in rng.integers(0, 100, 2))
        m = region_membership(ex23, x)
        if m.t_star is None:
            assert farkas_ok(ex23, x, m.witness)
            continue
        rows = [[F(v) for v in r] for r in build_konstanz(ex23, x).rows]
        A, b = _lp_data(rows, 6)
        y = m.witness
        # dual feasibility y.A <= 1 and strong duality b.y = sum s = 1 - N t*
        assert all(sum(yi * A[i][j] for i, yi in enumerate(y)) <= 1 for j in range(6))
        assert sum(yi * bi for yi, bi in zip(y, b)) == 1 - 6 * m.t_star


def test_special_point_inside():
    inside, t = region_membership_numeric(ex23, SPECIAL)
    assert inside and t > 1e-3
    # nearby rational points lose the jump in fiber dimension
    assert not region_membership(ex23, tuple(F(v).limit_denominator(10**6) for v in SPECIAL))


def test_sampled_points_round_trip(rng):
    done = 0
    for dims in ((3, 2), (2, 2, 2), (3, 3)):
        for _ in range(4):
            g, x = game_through(dims, rng)
            m = region_membership(g, x)
            assert m.inside
            assert verify_certificate(g, x, m)
            assert is_dependency_equilibrium(g, m.certificate).holds
            done += 1
    assert done == 12


@settings(max_examples=25)
@given(st.integers(0, 30), st.integers(0, 42))
def test_lp_soundness(x1, x2):
    x = (F(x1), F(x2))
    m = region_membership(ex23, x, F(1, 10**6))
    if m.inside:
        assert verify_certificate(ex23, x, m)
        assert min(m.certificate.entries) > 0
        assert is_dependency_equilibrium(ex23, m.certificate).holds


def test_float_prepass_agrees_with_exact(rng):
    pts = rng.uniform([0, 0], [30, 42], (40, 2))
    tf = max_min_float(ex23, pts)
    for p, t in zip(pts, tf):
        m = region_membership(ex23, tuple(F(v) for v in p), 0)
        if m.t_star is None:
            assert t == -np.inf
        else:
            assert abs(float(m.t_star) - t) < 1e-9


def test_sign_vectors_and_strata(rng):
    mins = nonzero_minors(ex23)
    assert len(sign_vector_at(ex23, (1, 2))) == len(mins) == 6
    assert sign_vector_at(ex23, (13, 7)).has_zero
    groups = {}
    while sum(len(v) for v in groups.values()) < 400:
        x = tuple(F(int(v), 7) for v in rng.integers(0, [210, 294]))
        sv = sign_vector_at(ex23, x)
        if sv.has_zero:
            continue
        groups.setdefault(sv.oriented, []).append(x)
    pairs = 0
    for pts in groups.values():
        for a, b in zip(pts, pts[1:]):
            assert bool(region_membership(ex23, a, 0)) == bool(region_membership(ex23, b, 0))
            pairs += 1
            if pairs >= 100:
                return
    assert pairs >= 100


def test_two_triangles_share_a_chamber():
    R = rasterize_region(ex23, 128, F(1, 10**6))
    lab = R.labels()
    assert lab.max() == 2
    svs = []
    for k in (1, 2):
        cells = np.argwhere(lab == k)
        idx = cells[len(cells) // 2]
        svs.append(sign_vector_at(ex23, R.cell_center(tuple(idx))).oriented)
    assert svs[0] == svs[1]


def test_raster_ex23_components():
    R = rasterize_region(ex23, 512, F(1, 10**6))
    assert R.components() == 2
    cells = np.argwhere(R.status == INSIDE)
    for idx in cells[:: max(1, len(cells) // 5)]:
        m = R.certificate(tuple(idx))
        assert m.inside and verify_certificate(ex23, R.cell_center(tuple(idx)), m)


def test_raster_csv_header():
    R = rasterize_region(ex23, 8)
    lines = R.to_csv().splitlines()
    assert lines[0] == "x1,x2,status,t_star" and len(lines) == 65


def test_bach_perturbed_is_an_arc():
    R = rasterize_region(load_fixture("bach_perturbed"), 128)
    assert R.count(INSIDE) == 0 and R.count(UNCERTAIN) > 0


def test_empty_region():
    R = rasterize_region(EMPTY, 64)
    assert R.count(INSIDE) == 0 and R.components() == 0


def test_three_player_raster(rng):
    g, x = game_through((2, 2, 2), rng)
    R = rasterize_region(g, 12)
    assert R.status.shape == (12, 12, 12)
    assert R.count(INSIDE) > 0


def test_full_dimensional_near_inside(rng):
    R = rasterize_region(ex23, 64)
    cells = np.argwhere(R.status == INSIDE)
    x = R.cell_center(tuple(cells[len(cells) // 2]))
    assert region_membership(ex23, x)
    for _ in range(10):
        d = rng.normal(size=2)
        y = tuple(xi + F(float(di)).limit_denominator(1000) / 10**4 for xi, di in zip(x, d))
        assert region_membership(ex23, y)


def boundary_point_along(g, x, u):
    lo, hi = F(0), F(1)
    while region_membership(g, tuple(xi + hi * ui for xi, ui in zip(x, u)), 0):
        hi *= 2
    for _ in range(60):
        mid = (lo + hi) / 2
        if region_membership(g, tuple(xi + mid * ui for xi, ui in zip(x, u)), 0):
            lo = mid
        else:
            hi = mid
    return tuple(xi + lo * ui for xi, ui in zip(x, u))


def test_pareto():
    R = rasterize_region(ex23, 64)
    cells = np.argwhere(R.status == INSIDE)
    centres = [R.cell_center(tuple(c)) for c in cells]
    best = max(centres, key=lambda c: c[0] + c[1])
    p = boundary_point_along(ex23, best, (1, 1))
    assert pareto_optimal(ex23, p).optimal
    vals = [abs(float(m.eval(dict(zip(payoff_vars(2), p))))) for m in nonzero_minors(ex23)]
    assert min(vals) < 1e-9 * max(vals)
    interior = centres[len(centres) // 2]
    res = pareto_optimal(ex23, interior)
    assert not res.optimal and res.dominating is not None


def test_boundary_candidates():
    xs = payoff_vars(2)
    from depeq.poly import parse_poly

    cands = {bc.poly for bc in boundary_candidates(ex23)}
    for text in ("9*x1^2*x2 - 2*x1*x2^2 - 162*x1^2 - 189*x1*x2 + 30*x2^2 + 3906*x1 - 540*x2 + 2160",
                 "x1 - 13", "x1 - 24"):
        p = parse_poly(text, xs).primitive()
        assert p in cands or -p in cands


def test_boundary_candidate_degrees(rng):
    for dims in ((2, 2), (3, 2), (3, 3), (2, 2, 2)):
        bound = sum(dims) - len(dims) + 1
        assert all(bc.degree <= bound for bc in boundary_candidates(distinct_game(dims, rng)))
    cands = boundary_candidates(distinct_game((2, 2, 2), rng))
    assert len(cands) == 28 and all(bc.degree == 4 for bc in cands)
