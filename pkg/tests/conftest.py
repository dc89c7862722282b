from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from depeq.game import Game, ProbTensor

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

small_rationals = st.fractions(min_value=-20, max_value=20, max_denominator=7)
positive_rationals = st.fractions(min_value=Fraction(1, 9), max_value=10, max_denominator=9)


def games(dims):
    n_cells = int(np.prod(dims))
    tab = st.lists(st.integers(-15, 15), min_size=n_cells, max_size=n_cells)
    return st.lists(tab, min_size=len(dims), max_size=len(dims)).map(lambda ps: Game(dims, ps))


def tensors(dims):
    n_cells = int(np.prod(dims))
    return st.lists(positive_rationals, min_size=n_cells, max_size=n_cells).map(
        lambda es: ProbTensor(dims, es).normalize()
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def game_through(dims, rng, x=None):
    """A random integer-ish game with ``ker K_X(x)`` containing a random positive P.

    One payoff per (player, strategy) slice is adjusted so that every
    conditional payoff equals ``x_i``; returns ``(game, x)``."""
    n_cells = int(np.prod(dims))
    P = [Fraction(int(v)) for v in rng.integers(1, 9, n_cells)]
    if x is None:
        x = [Fraction(int(v), 2) for v in rng.integers(-20, 20, len(dims))]
    g = Game.random(dims, rng, -10, 10)
    pays = [list(t) for t in g.payoffs]
    f = g.format
    for i in range(f.n):
        for k in range(f.dims[i]):
            cells = f.slices[i][k]
            rest = sum(P[c] * (x[i] - pays[i][c]) for c in cells[1:])
            # P[c0] * (x_i - X_c0) + rest = 0
            pays[i][cells[0]] = x[i] + rest / P[cells[0]]
    return Game(dims, pays), x


def distinct_game(dims, rng, span=1000):
    """Integer game whose payoff tables have pairwise distinct entries."""
    n_cells = int(np.prod(dims))
    return Game(dims, [[int(v) for v in rng.choice(np.arange(-span, span), n_cells, replace=False)] for _ in dims])
