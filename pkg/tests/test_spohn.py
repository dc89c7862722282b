from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from depeq.fixtures import load_fixture
from depeq.game import Game, ProbTensor, conditional_expected_payoff, expected_payoff, marginal
from depeq.konstanz import sample_spohn_point
from depeq.poly import MultiPoly
from depeq.spohn import (
    DegeneratePayoffs,
    NonGeneric,
    NotImplementedFormat,
    NotInSimplex,
    augmented_spohn_matrix,
    build_spohn_matrices,
    dependency_residual,
    is_balanced_format,
    is_dependency_equilibrium,
    nash_point_22,
    nash_points,
    nash_points_222,
    totally_mixed_nash_2p,
)

from .conftest import game_through, games, tensors

F = Fraction
bach = load_fixture("bach")
NASH = ProbTensor((2, 2), [F(6, 25), F(9, 25), F(4, 25), F(6, 25)])


def test_bach_matrix_symbolic():
    P = ProbTensor.symbolic((2, 2))
    p11, p12, p21, p22 = P.entries
    M1 = build_spohn_matrices(bach, P)[0]
    assert M1 == ((p11 + p12, p11.scale(3)), (p21 + p22, p22.scale(2)))


def test_symbolic_det_m1():
    vs = ("a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22", "p11", "p12", "p21", "p22")
    g = Game.symbolic((2, 2), vs)
    P = ProbTensor.symbolic((2, 2), vs)
    f1 = build_spohn_matrices(g, P).det(0)
    a = {n: MultiPoly.var(n, vs) for n in ("a11", "a12", "a21", "a22")}
    p = {n: MultiPoly.var(n, vs) for n in ("p11", "p12", "p21", "p22")}
    want = ((a["a21"] - a["a11"]) * p["p11"] * p["p21"] + (a["a22"] - a["a11"]) * p["p11"] * p["p22"]
            + (a["a21"] - a["a12"]) * p["p12"] * p["p21"] + (a["a22"] - a["a12"]) * p["p12"] * p["p22"])
    assert f1 == want


@given(tensors((3, 2)), st.integers(-5, 5))
def test_constant_payoffs_have_proportional_columns(P, c):
    g = Game((3, 2), [[c] * 6, [c] * 6])
    assert all(r == 0 for r in dependency_residual(g, P))
    assert is_dependency_equilibrium(g, P).holds


def test_bach_nash_residual_and_check():
    assert all(r == 0 for r in dependency_residual(bach, NASH))
    assert is_dependency_equilibrium(bach, NASH).holds


def test_bach_uniform_is_not_de():
    U = ProbTensor.uniform((2, 2))
    r = is_dependency_equilibrium(bach, U)
    assert not r.holds
    # the displayed f_1 with a = (3, 0, 0, 2) at p = 1/4
    assert r.residuals[0] == F((0 - 3) + (2 - 3) + (0 - 0) + (2 - 0), 16)


def test_not_in_simplex():
    with pytest.raises(NotInSimplex):
        is_dependency_equilibrium(bach, ProbTensor((2, 2), [F(1, 2), F(1, 2), 0, 0]))
    with pytest.raises(NotInSimplex):
        is_dependency_equilibrium(bach, ProbTensor((2, 2), [1, 1, 1, 1]))


def test_random_tensor_is_not_de(rng):
    g = Game.random((2, 3), rng)
    P = ProbTensor((2, 3), [F(int(v)) for v in rng.integers(1, 30, 6)]).normalize()
    assert any(r != 0 for r in dependency_residual(g, P))


def test_centipede_component_point():
    g = load_fixture("centipede")
    # p31 = p32, p21 = 2 p22 and the quadric solved for p11 at p12 = p22 = p32 = 1
    P = ProbTensor((3, 2), [F(3, 5), 1, 2, 1, 1, 1]).normalize()
    assert P.in_open_simplex()
    assert is_dependency_equilibrium(g, P).holds


def test_nash_point_22_examples():
    N = nash_point_22(bach)
    assert tuple(N.tensor.entries) == tuple(NASH.entries) and N.in_simplex
    D = nash_point_22(load_fixture("disconnected"))
    lam = F(D.projective[0], -1)
    assert tuple(v / lam for v in D.projective) == (-1, 2, 1, -2) and not D.in_simplex
    g = Game((2, 2), [[1, 0, 0, 1], [1, 0, 0, 1]])
    assert tuple(nash_point_22(g).tensor.entries) == (F(1, 4),) * 4
    with pytest.raises(DegeneratePayoffs):
        nash_point_22(Game((2, 2), [[1, 1, 1, 1], [1, 0, 0, 1]]))


def test_nash_222_generic_two_solutions(rng):
    for _ in range(10):
        g = Game.random((2, 2, 2), rng)
        pts = nash_points_222(g)
        assert len(pts) == 2
        assert all(p.residual < 1e-9 for p in pts)


def test_nash_222_equal_payoffs_back_substitution(rng):
    t = [int(v) for v in rng.integers(-9, 10, 8)]
    g = Game((2, 2, 2), [t, t, t])
    for p in nash_points_222(g):
        res = dependency_residual(g, p.tensor)
        assert max(abs(complex(r)) for r in res) < 1e-10


def test_nash_222_degenerate_reported():
    with pytest.raises(NonGeneric):
        nash_points_222(Game((2, 2, 2), [[1] * 8, [1] * 8, [1] * 8]))


def test_nash_count_two_players_is_one(rng):
    assert len(nash_points(Game.random((2, 2), rng))) == 1
    with pytest.raises(NotImplementedFormat):
        nash_points(Game.random((3, 3), rng))


def test_balanced_formats():
    assert is_balanced_format((2, 2))
    assert not is_balanced_format((3, 2))
    assert is_balanced_format((2, 2, 2))


def test_totally_mixed_nash_two_players():
    (N,) = totally_mixed_nash_2p(bach)
    assert tuple(N.tensor.entries) == tuple(NASH.entries)
    assert totally_mixed_nash_2p(load_fixture("centipede")) == []


@given(games((2, 2, 2)))
def test_nash_points_are_rank_one_and_on_variety(g):
    try:
        pts = nash_points_222(g)
    except NonGeneric:
        return
    for p in pts:
        assert p.residual < 1e-6 * (1 + max(abs(v) for t in g.payoffs for v in t)) ** 3


def test_nash_222_point_at_infinity():
    # alpha = 2/3 kills the gamma coefficient of the second equation but not its constant
    g = Game((2, 2, 2), [[0, 0, 0, 0, -6, 15, 6, -15], [0, 0, 0, -9, 0, 0, -3, 15], [0, -10, 0, -3, 0, 12, 0, 14]])
    with pytest.raises(NonGeneric, match="infinity"):
        nash_points_222(g)


@given(games((3, 2)), tensors((3, 2)), st.lists(st.integers(1, 5).map(lambda v: v * (-1) ** v), min_size=2, max_size=2),
       st.lists(st.integers(-5, 5), min_size=2, max_size=2))
def test_affine_payoff_invariance(g, P, lam, c):
    h = g.transformed(lam, c)
    S, T = build_spohn_matrices(g, P), build_spohn_matrices(h, P)
    for i in range(2):
        assert T.minors(i) == [lam[i] * m for m in S.minors(i)]
    assert is_dependency_equilibrium(g, P).holds == is_dependency_equilibrium(h, P).holds


@given(games((3, 2)), tensors((3, 2)), st.permutations([0, 1, 2]))
def test_strategy_relabeling(g, P, perm):
    f = g.format

    def relabel(vals):
        out = [None] * 6
        for idx in f.indices():
            out[f.flatten((perm[idx[0]], idx[1]))] = vals[f.flatten(idx)]
        return out

    h = Game(f, [relabel(t) for t in g.payoffs])
    Q = ProbTensor(f, relabel(P.entries))
    S, T = build_spohn_matrices(g, P), build_spohn_matrices(h, Q)
    assert [T[0][perm[k]] for k in range(3)] == list(S[0])
    assert T[1] == S[1]
    assert is_dependency_equilibrium(g, P).holds == is_dependency_equilibrium(h, Q).holds


def test_augmented_row_identity(rng):
    for dims in ((2, 2), (3, 2), (2, 2, 2)):
        checked = 0
        for _ in range(200):
            g, x = game_through(dims, rng)
            P = sample_spohn_point(g, x)
            if P is None or any(marginal(P, i, k) == 0 for i in range(g.n) for k in range(g.dims[i])):
                continue
            for i in range(g.n):
                A = augmented_spohn_matrix(g, P, i)
                for k in range(1, len(A)):
                    assert A[0][0] * A[k][1] - A[0][1] * A[k][0] == 0
                    assert conditional_expected_payoff(P, g, i, k - 1) == expected_payoff(P, g, i)
            checked += 1
            if checked == 5:
                break
        assert checked == 5, dims
