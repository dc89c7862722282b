from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from depeq.ci import (
    SIGMA_VARS,
    TAU_VARS,
    CIStatement,
    InvalidStatement,
    ci_quadrics,
    ci_residual,
    full_independence_nash_count,
    is_ci_equilibrium,
    one_edge_linear_forms,
    one_edge_matrices,
    one_edge_tensor,
    parse_statement,
    parse_statements,
    sample_one_edge_points,
)
from depeq.game import Game, ProbTensor
from depeq.poly import MultiPoly
from depeq.spohn import NonGeneric, build_spohn_matrices, is_dependency_equilibrium

from .conftest import distinct_game, games, positive_rationals, tensors

F = Fraction
VARS = ("p111", "p112", "p121", "p122", "p211", "p212", "p221", "p222")


def test_parse():
    s = parse_statement("1_|_23")
    assert s.A == {1} and s.B == {2, 3} and not s.C
    assert str(parse_statement("2_|_3|1")) == "2_|_3|1"
    assert [str(t) for t in parse_statements("1_|_23; 2_|_3")] == ["1_|_23", "2_|_3"]
    for bad in ("1_|_1", "12", "_|_3", "0_|_2"):
        with pytest.raises(InvalidStatement):
            parse_statement(bad)
    with pytest.raises(InvalidStatement):
        parse_statement("1_|_4").check_format(Game.random((2, 2, 2), np.random.default_rng(0)).format)


def test_quadric_2_indep_3():
    q = ci_quadrics(parse_statement("2_|_3"), (2, 2, 2))
    assert len(q) == 1
    p = dict(zip(VARS, MultiPoly.gens(VARS)))
    plus = lambda j, k: p[f"p1{j}{k}"] + p[f"p2{j}{k}"]
    assert q.quadrics[0].with_vars(VARS) == plus(1, 1) * plus(2, 2) - plus(1, 2) * plus(2, 1)


def test_quadrics_1_indep_23():
    q = ci_quadrics(parse_statement("1_|_23"), (2, 2, 2))
    assert len(q) == 6 and all(m.total_degree() == 2 for m in q.quadrics)
    p = dict(zip(VARS, MultiPoly.gens(VARS)))
    want = {p["p111"] * p["p212"] - p["p112"] * p["p211"], p["p121"] * p["p222"] - p["p122"] * p["p221"]}
    got = {m.with_vars(VARS) for m in q.quadrics}
    assert want <= got


def test_conditional_statement_count():
    # 1 _|_ 2 | 3 over binary players: one quadric per state of player 3
    assert len(ci_quadrics(parse_statement("1_|_2|3"), (2, 2, 2))) == 2
    assert len(ci_quadrics(parse_statement("1_|_2"), (3, 2, 2))) == 3


@given(st.lists(st.lists(positive_rationals, min_size=2, max_size=2), min_size=3, max_size=3))
def test_product_tensors_satisfy_everything(factors):
    P = ProbTensor.product([[v / sum(f) for v in f] for f in factors])
    stmts = parse_statements("1_|_23;2_|_3;1_|_2|3;2_|_13;3_|_12")
    assert all(r == 0 for r in ci_residual(P, stmts))


@given(st.lists(positive_rationals, min_size=2, max_size=2), st.lists(positive_rationals, min_size=4, max_size=4))
def test_one_edge_tensor_satisfies_1_indep_23(sigma, tau):
    P = one_edge_tensor(sigma, tau)
    assert all(r == 0 for r in ci_residual(P, [parse_statement("1_|_23")]))


def test_random_tensor_violates(rng):
    P = ProbTensor((2, 2, 2), [F(int(v)) for v in rng.integers(1, 50, 8)]).normalize()
    assert any(r != 0 for r in ci_residual(P, [parse_statement("1_|_23")]))


def test_reduced_matrices_match_substitution(rng):
    g = distinct_game((2, 2, 2), rng, 50)
    vs = SIGMA_VARS + TAU_VARS
    s1, s2, t11, t12, t21, t22 = MultiPoly.gens(vs)
    sigma, tau = (s1, s2), (t11, t12, t21, t22)
    full = build_spohn_matrices(g, one_edge_tensor(sigma, tau))
    red = one_edge_matrices(g, sigma, tau)
    tpp = t11 + t12 + t21 + t22
    for i in range(2):
        assert full[0][i][0] == sigma[i] * tpp * red[0][i][0]
        assert full[0][i][1] == sigma[i] * red[0][i][1]
    for M in (1, 2):
        for r in range(2):
            assert full[M][r][0] == (s1 + s2) * red[M][r][0]
            assert full[M][r][1] == red[M][r][1]
    d1 = red.det(0)
    assert d1.total_degree() == 1 and set(d1.used_vars()) <= set(TAU_VARS)


def test_constant_payoffs_reduced_dets_vanish():
    g = Game((2, 2, 2), [[3] * 8, [3] * 8, [3] * 8])
    vs = SIGMA_VARS + TAU_VARS
    gens = MultiPoly.gens(vs)
    red = one_edge_matrices(g, gens[:2], gens[2:])
    assert all(red.det(i).is_zero() for i in range(3))


def test_nonpositive_parameters_rejected(rng):
    with pytest.raises(ValueError):
        one_edge_matrices(distinct_game((2, 2, 2), rng), (F(1, 2), F(-1, 2)), (1, 1, 1, 1))


def test_sampled_one_edge_points(rng):
    found = 0
    for _ in range(6):
        g = distinct_game((2, 2, 2), rng, 20)
        pts = sample_one_edge_points(g, [F(k, 10) for k in range(1, 10)])
        L = one_edge_linear_forms(g)
        for p in pts:
            vals = dict(zip(L[0].vars, p.tensor.entries))
            scale = max(abs(float(v)) for v in g.payoffs[0])
            assert abs(float(L[0].eval_float(vals))) < 1e-7 * scale
            assert abs(float(L[1].eval_float(vals))) < 1e-7 * scale
            assert max(abs(float(r)) for r in ci_residual(p.tensor, [parse_statement("1_|_23")])) < 1e-9
            assert p.residual < 1e-7 * scale**2
            if p.positive:
                assert is_ci_equilibrium(g, p.tensor, [parse_statement("1_|_23")], tol=1e-7)
                assert is_dependency_equilibrium(g, p.tensor, 1e-7).holds
                found += 1
    assert found > 0


def test_full_independence_counts(rng):
    for _ in range(5):
        assert full_independence_nash_count(distinct_game((2, 2), rng)) == 1
        assert full_independence_nash_count(distinct_game((2, 2, 2), rng)) == 2


def test_degenerate_count_reported():
    # payoffs of player 3 ignore players 1 and 2, so the final quadratic collapses
    t = [1, 2, 1, 2, 1, 2, 1, 2]
    g = Game((2, 2, 2), [[1, 5, 2, 7, 3, 0, 4, 9], [2, 0, 1, 4, 6, 3, 5, 8], t])
    with pytest.raises(NonGeneric):
        full_independence_nash_count(g)
