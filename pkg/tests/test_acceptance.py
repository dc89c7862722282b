"""Acceptance criteria 1-11.  Each test prints one PASS/FAIL line."""

import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from depeq.curve22 import (
    SQUARED_FACTORS,
    PAYOFF_VARS,
    aronhold_in_payoffs,
    classify_arcs,
    discriminant_in_payoffs,
    j_invariant,
    ordering_harness,
    plane_section,
    spohn_cubic,
)
from depeq.fixtures import load_fixture
from depeq.game import Game, ProbTensor, conditional_expected_payoff, expected_payoff, marginal
from depeq.invariants import restricted_discriminant
from depeq.konstanz import (
    build_konstanz,
    kernel_at,
    minor_census,
    payoff_vars,
    rank_drop_points_32,
    sample_spohn_point,
)
from depeq.poly import MultiPoly, parse_poly
from depeq.region import (
    boundary_candidates,
    rasterize_region,
    region_membership,
    verify_certificate,
)
from depeq.spohn import (
    build_spohn_matrices,
    dependency_residual,
    nash_point_22,
    nash_points_222,
    totally_mixed_nash_2p,
)

from .conftest import distinct_game, game_through

F = Fraction


@pytest.fixture
def verdict(capsys):
    def report(n, checks):
        failed = [name for name, ok in checks if not ok]
        line = f"criterion {n:2d}: {'PASS' if not failed else 'FAIL'}"
        if failed:
            line += "  (" + "; ".join(failed) + ")"
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line
    return report


def test_criterion_01_bach(verdict):
    g = load_fixture("bach")
    best = float("inf")
    for _ in range(20):
        t = time.perf_counter()
        N = nash_point_22(g)
        res = dependency_residual(g, N.tensor)
        best = min(best, time.perf_counter() - t)
    verdict(1, [
        ("nash tuple", tuple(N.tensor.entries) == (F(6, 25), F(9, 25), F(4, 25), F(6, 25))),
        ("residual exactly zero", all(r == 0 for r in res)),
        (f"time {best * 1e3:.3f} ms < 1 ms", best < 1e-3),
    ])


def test_criterion_02_disconnected(verdict):
    g = load_fixture("disconnected")
    t = time.perf_counter()
    j = j_invariant(g)
    rep = classify_arcs(g)
    N = nash_point_22(g)
    dt = time.perf_counter() - t
    lam = F(N.projective[0], -1)
    verdict(2, [
        ("j", j == F(-(7**3) * 103**3, 2**8 * 3**2 * 47)),
        ("two components", rep.component_count == 2 and not rep.inconclusive),
        ("endpoints", sorted(tuple(sorted(a.endpoints)) for a in rep.arcs) == [("E11", "F21"), ("E22", "F12")]),
        ("N up to scale", tuple(v / lam for v in N.projective) == (-1, 2, 1, -2)),
        ("N not in simplex", not N.in_simplex),
        (f"time {dt:.2f} s < 5 s", dt < 5),
    ])


def test_criterion_03_term_counts(verdict):
    t = time.perf_counter()
    R = restricted_discriminant()
    lead_exp, lead_coeff = R.leading_term()
    D, E = discriminant_in_payoffs()
    I = aronhold_in_payoffs()
    gens = dict(zip(PAYOFF_VARS, MultiPoly.gens(PAYOFF_VARS)))
    prod = E
    divisible = True
    for u, v in SQUARED_FACTORS:
        lin = gens[u] - gens[v]
        q, r = D.divmod(lin * lin)
        divisible &= not r.terms
        prod = prod * lin * lin
    dt = time.perf_counter() - t
    verdict(3, [
        ("restricted Disc has 127 terms", len(R) == 127),
        ("leading term 16 c1^5 c4^2 c5^2 c6^3", lead_exp == (5, 0, 0, 2, 2, 3, 0) and lead_coeff == 16),
        ("E: 587 terms of degree 8", len(E) == 587 and {sum(e) for e in E.terms} == {8}),
        ("I: 633 terms of degree 8", len(I) == 633 and {sum(e) for e in I.terms} == {8}),
        ("each squared factor divides D", divisible),
        ("D = factors * E", prod == D),
        (f"time {dt:.1f} s < 60 s", dt < 60),
    ])


def test_criterion_04_cubic_relations(verdict):
    rng = np.random.default_rng(4)
    ok = True
    for _ in range(100):
        g = Game.random((2, 2), rng, -50, 50, denominator=int(rng.integers(1, 12)))
        ok &= spohn_cubic(g).relations() == (0, 0)
    verdict(4, [("both relations vanish on 100 rational games", ok)])


def test_criterion_05_ex23(verdict):
    g = load_fixture("ex23")
    t = time.perf_counter()
    pts = rank_drop_points_32(g)
    hits = [p for p in pts if p.affine and abs(p.x1 - 22.9902299164) < 1e-6 and abs(p.x2 - 16.2987107576) < 1e-6]
    cands = {bc.poly for bc in boundary_candidates(g)}
    xs = payoff_vars(2)

    def has(text):
        p = parse_poly(text, xs).primitive()
        return p in cands or -p in cands

    R = rasterize_region(g, 512, F(1, 10**6))
    dt = time.perf_counter() - t
    verdict(5, [
        ("six rank-drop points", len(pts) == 6),
        ("five affine", sum(p.affine for p in pts) == 5),
        ("special point", len(hits) == 1),
        ("first cubic", has("9*x1^2*x2 - 2*x1*x2^2 - 162*x1^2 - 189*x1*x2 + 30*x2^2 + 3906*x1 - 540*x2 + 2160")),
        ("second cubic", has("72*x1^2*x2 - 19*x1*x2^2 - 1512*x1^2 - 1614*x1*x2 + 390*x2^2 + 36288*x1 - 2340*x2")),
        ("x1 - 13", has("x1 - 13")),
        ("x1 - 24", has("x1 - 24")),
        (f"components {R.components()} == 2", R.components() == 2),
        (f"time {dt:.1f} s < 60 s", dt < 60),
    ])


def test_criterion_06_plane_section(verdict):
    rng = np.random.default_rng(6)
    g = distinct_game((2, 2), rng, 50)
    sec = plane_section(g, rng)
    verdict(6, [
        ("quartic", sec.degree == 4),
        ("four roots", len(sec.points) == 4),
        (f"root residual {sec.max_residual:.1e} < 1e-8", sec.max_residual < 1e-8),
    ])


def test_criterion_07_ordering_harness(verdict):
    t = time.perf_counter()
    rows = ordering_harness(seed=0, resolution=256)
    dt = time.perf_counter() - t
    counts_ok = all(r[2] in (0, 1, 2) for r in rows)
    sc_ok = all(r[2] == 1 for r in rows if r[4])
    ef_ok = all(all(k == "EF" for k in r[3]) for r in rows if not r[4])
    inconclusive = [r[0] for r in rows if r[5]]
    summary = Counter((r[4], r[2], tuple(r[3])) for r in rows)
    verdict(7, [
        ("576 ordering pairs", len(rows) == 576),
        ("component counts in {0,1,2}", counts_ok),
        ("sign condition gives exactly one arc", sc_ok),
        ("otherwise all arcs EF", ef_ok),
        (f"no inconclusive cases {inconclusive}", not inconclusive),
        (f"time {dt:.0f} s < 600 s", dt < 600),
    ])
    print(dict(summary))


def test_criterion_08_conditional_payoffs(verdict):
    rng = np.random.default_rng(8)
    ok, n = True, 0
    for dims in ((2, 2), (3, 2), (2, 2, 2)):
        got = 0
        while got < 17 if dims != (2, 2, 2) else got < 16:
            if dims == (2, 2):
                g, x = game_through(dims, rng)
            else:
                g = distinct_game(dims, rng, 100)
                x = [F(int(v), 3) for v in rng.integers(-300, 300, g.n)]
            P = sample_spohn_point(g, x, positive=True)
            if P is None or any(marginal(P, i, k) == 0 for i in range(g.n) for k in range(g.dims[i])):
                continue
            for i in range(g.n):
                e = expected_payoff(P, g, i)
                ok &= all(conditional_expected_payoff(P, g, i, k) == e for k in range(g.dims[i]))
            got += 1
            n += 1
    verdict(8, [(f"{n} sampled points", n == 50), ("conditional payoffs equal expected payoffs", ok)])


def test_criterion_09_konstanz(verdict):
    rng = np.random.default_rng(9)
    stack_ok = True
    for dims in ((2, 2), (3, 2), (3, 3), (2, 2, 2), (2, 2, 2, 2)):
        g = Game.random(dims, rng, -20, 20, denominator=3)
        for _ in range(100):
            P = ProbTensor(dims, [F(int(v), int(d)) for v, d in zip(rng.integers(1, 50, g.format.total_cells),
                                                                   rng.integers(1, 9, g.format.total_cells))])
            x = [F(int(v), int(d)) for v, d in zip(rng.integers(-40, 40, g.n), rng.integers(1, 9, g.n))]
            KP = build_konstanz(g, x).apply(P)
            S = build_spohn_matrices(g, P)
            want = [m * x[i] - num for i in range(g.n) for m, num in S[i]]
            stack_ok &= KP == want
    dims_ok = []
    for dims in ((3, 2), (3, 3), (2, 2, 2), (2, 2, 2, 2)):
        g = distinct_game(dims, rng)
        x = [F(int(v), 7) for v in rng.integers(-999, 999, g.n)]
        dims_ok.append((dims, kernel_at(g, x).dim == int(np.prod(dims)) - sum(dims)))
    verdict(9, [("stacking identity, 500 pairs", stack_ok)]
            + [(f"generic kernel dim {d}", ok) for d, ok in dims_ok])


def test_criterion_10_minor_structure(verdict):
    rng = np.random.default_rng(10)
    t = time.perf_counter()
    c33 = minor_census(distinct_game((3, 3), rng))
    zero = sum(m.is_zero for m in c33)
    quint = sum(1 for m in c33 if not m.is_zero and m.degree == 5 and not m.linear_factors)
    prods = sum(1 for m in c33 if len(m.linear_factors) == 2 and m.residual.total_degree() == 3
                and sorted(p.used_vars() for p in m.linear_factors) == [("x1",), ("x2",)])
    c222 = minor_census(distinct_game((2, 2, 2), rng))
    deg_ok = True
    for dims in ((2, 2), (3, 2), (3, 3), (2, 2, 2)):
        bound = sum(dims) - len(dims) + 1
        deg_ok &= all(m.is_zero or m.degree <= bound for m in minor_census(distinct_game(dims, rng)))
    dt = time.perf_counter() - t
    verdict(10, [
        (f"(3,3): {zero} zero / {quint} quintics / {prods} products", (zero, quint, prods) == (6, 6, 72)),
        ("(2,2,2): 28 quartics", len(c222) == 28 and all(m.degree == 4 for m in c222)),
        ("degree bound", deg_ok),
        (f"time {dt:.1f} s < 120 s", dt < 120),
    ])


def test_criterion_11_nash_counts(verdict):
    rng = np.random.default_rng(11)
    counts = [len(nash_points_222(distinct_game((2, 2, 2), rng, 100))) for _ in range(20)]
    g = load_fixture("centipede")
    found = None
    for x1 in range(0, 13):
        for x2 in range(0, 17):
            x = (F(x1, 4), F(x2, 4))
            m = region_membership(g, x)
            if m.inside:
                found = (x, m)
                break
        if found:
            break
    verdict(11, [
        ("20 generic 2x2x2 games have 2 Nash points", counts == [2] * 20),
        ("centipede: no totally mixed Nash", totally_mixed_nash_2p(g) == []),
        ("centipede: INSIDE certificate on the grid", found is not None and verify_certificate(g, *found)),
    ])
