"""Games in normal form, probability tensors, and (conditional) expected payoffs.

Tensors are stored flat with the last player's index varying fastest, so the
flat position of ``(j_1, ..., j_n)`` matches numpy's C order and the column
order of the Konstanz matrix (``p_111, p_112, p_121, ...``).  Indices are
0-based in code; names such as ``a12`` or ``p211`` are 1-based.

Entries may be ``int``/``Fraction`` (exact), ``float`` (numeric) or
:class:`~depeq.poly.MultiPoly` (symbolic); the arithmetic below only uses
``+`` and ``*`` so all three flow through the same code.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .poly import MultiPoly

PLAYER_LETTERS = "abcdefgh"


class FormatMismatch(ValueError):
    pass


class ZeroMarginal(ZeroDivisionError):
    """Conditional payoff requested for a strategy with zero marginal probability."""


def _flat(obj) -> list:
    if isinstance(obj, np.ndarray):
        return [v.item() if isinstance(v, np.generic) else v for v in obj.reshape(-1)]
    out = []
    for v in obj:
        if isinstance(v, (list, tuple, np.ndarray)):
            out.extend(_flat(v))
        else:
            out.append(v)
    return out


def to_rational(v):
    """Parse ints, Fractions and ``"p/q"`` strings exactly; floats convert exactly too."""
    if isinstance(v, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, str):
        f = Fraction(v.strip())
    else:
        f = Fraction(v)
    return f.numerator if f.denominator == 1 else f


def fmt_rational(v) -> str:
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class GameFormat:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1:
            raise ValueError("a game needs at least one player")
        if any(d < 2 for d in dims):
            raise ValueError(f"every player needs at least two strategies, got {dims}")

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_cells(self) -> int:
        return math.prod(self.dims)

    @property
    def total_strategies(self) -> int:
        return sum(self.dims)

    @property
    def kernel_dim(self) -> int:
        """Expected dimension of the generic Konstanz kernel."""
        return self.total_cells - self.total_strategies

    @cached_property
    def strides(self) -> tuple[int, ...]:
        s = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            s[i] = s[i + 1] * self.dims[i + 1]
        return tuple(s)

    def flatten(self, idx: Sequence[int]) -> int:
        if len(idx) != self.n or any(not 0 <= j < d for j, d in zip(idx, self.dims)):
            raise IndexError(f"multi-index {tuple(idx)} out of range for {self.dims}")
        return sum(j * s for j, s in zip(idx, self.strides))

    def unflatten(self, pos: int) -> tuple[int, ...]:
        if not 0 <= pos < self.total_cells:
            raise IndexError(pos)
        out = []
        for s, d in zip(self.strides, self.dims):
            out.append(pos // s)
            pos %= s
        return tuple(out)

    def indices(self):
        """All multi-indices in flat order."""
        return itertools.product(*(range(d) for d in self.dims))

    def cell_label(self, idx: Sequence[int]) -> str:
        return "".join(str(j + 1) for j in idx)

    def cells_with(self, player: int, strategy: int) -> list[int]:
        """Flat positions of cells where ``player`` plays ``strategy`` (both 0-based)."""
        return [self.flatten(idx) for idx in self.indices() if idx[player] == strategy]

    @cached_property
    def slices(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``slices[i][k]`` = flat positions with player i at strategy k."""
        out = []
        for i, d in enumerate(self.dims):
            rows = [[] for _ in range(d)]
            for pos, idx in enumerate(self.indices()):
                rows[idx[i]].append(pos)
            out.append(tuple(tuple(r) for r in rows))
        return tuple(out)


class Game:
    """Payoff tensors ``X^(1..n)`` of a common format, stored flat."""

    def __init__(self, dims: Sequence[int] | GameFormat, payoffs: Sequence[Sequence]):
        self.format = dims if isinstance(dims, GameFormat) else GameFormat(tuple(dims))
        f = self.format
        if len(payoffs) != f.n:
            raise FormatMismatch(f"expected {f.n} payoff tensors, got {len(payoffs)}")
        tabs = []
        for i, p in enumerate(payoffs):
            flat = _flat(p)
            if len(flat) != f.total_cells:
                raise FormatMismatch(
                    f"payoff tensor {i + 1} has {len(flat)} entries, format {f.dims} needs {f.total_cells}"
                )
            tabs.append(tuple(v if isinstance(v, (MultiPoly, float)) else to_rational(v) for v in flat))
        self.payoffs = tuple(tabs)

    @property
    def n(self) -> int:
        return self.format.n

    @property
    def dims(self) -> tuple[int, ...]:
        return self.format.dims

    def payoff(self, i: int, idx: Sequence[int]):
        return self.payoffs[i][self.format.flatten(idx)]

    def array(self, i: int) -> np.ndarray:
        """Float array of player i's payoffs, shaped by the format."""
        return np.array([float(v) for v in self.payoffs[i]]).reshape(self.dims)

    def float_payoffs(self) -> np.ndarray:
        """``(n, total_cells)`` float matrix."""
        return np.array([[float(v) for v in t] for t in self.payoffs])

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(v, MultiPoly) for t in self.payoffs for v in t)

    def transformed(self, scale: Sequence, shift: Sequence) -> "Game":
        """Apply ``X^(i) -> scale[i] * X^(i) + shift[i]``."""
        return Game(
            self.format,
            [[s * v + c for v in t] for t, s, c in zip(self.payoffs, scale, shift)],
        )

    def __eq__(self, other):
        return isinstance(other, Game) and self.format == other.format and self.payoffs == other.payoffs

    def __hash__(self):
        return hash((self.format, self.payoffs))

    def __repr__(self):
        return f"Game(dims={self.dims})"

    # -- symbolic and random constructors -----------------------------
    @staticmethod
    def payoff_names(f: GameFormat) -> list[list[str]]:
        return [[PLAYER_LETTERS[i] + f.cell_label(idx) for idx in f.indices()] for i in range(f.n)]

    @classmethod
    def symbolic(cls, dims: Sequence[int], variables: Sequence[str] | None = None) -> "Game":
        """Game whose payoffs are the indeterminates ``a11, a12, ..., b11, ...``."""
        f = GameFormat(tuple(dims))
        names = cls.payoff_names(f)
        flat = [v for row in names for v in row]
        variables = tuple(variables) if variables is not None else tuple(flat)
        return cls(f, [[MultiPoly.var(v, variables) for v in row] for row in names])

    @classmethod
    def random(cls, dims: Sequence[int], rng: np.random.Generator, low: int = -20, high: int = 20,
               denominator: int = 1) -> "Game":
        f = GameFormat(tuple(dims))
        return cls(
            f,
            [
                [Fraction(int(rng.integers(low * denominator, high * denominator + 1)), denominator)
                 for _ in range(f.total_cells)]
                for _ in range(f.n)
            ],
        )

    # -- JSON ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "payoffs": [
                {"player": i + 1, "entries": [fmt_rational(v) for v in t]}
                for i, t in enumerate(self.payoffs)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "Game":
        if "dims" not in data or "payoffs" not in data:
            raise ValueError("game JSON needs 'dims' and 'payoffs'")
        f = GameFormat(tuple(data["dims"]))
        tabs = [None] * f.n
        for entry in data["payoffs"]:
            i = int(entry["player"]) - 1
            if not 0 <= i < f.n:
                raise FormatMismatch(f"player {entry['player']} out of range for {f.n} players")
            if tabs[i] is not None:
                raise FormatMismatch(f"player {i + 1} listed twice")
            tabs[i] = [to_rational(v) for v in entry["entries"]]
        if any(t is None for t in tabs):
            raise FormatMismatch("missing payoff tensor")
        return cls(f, tabs)

    @classmethod
    def load(cls, path) -> "Game":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())


class ProbTensor:
    """A tensor ``P`` over a game format; may or may not lie in the open simplex."""

    def __init__(self, dims: Sequence[int] | GameFormat, entries: Sequence):
        self.format = dims if isinstance(dims, GameFormat) else GameFormat(tuple(dims))
        arr = _flat(entries)
        entries = tuple(
            v if isinstance(v, (MultiPoly, float, complex)) else
            (float(v) if isinstance(v, np.floating) else to_rational(v))
            for v in arr
        )
        if len(entries) != self.format.total_cells:
            raise FormatMismatch(
                f"tensor has {len(entries)} entries, format {self.format.dims} needs {self.format.total_cells}"
            )
        self.entries = entries

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.entries)

    @property
    def is_numeric(self) -> bool:
        return not any(isinstance(v, MultiPoly) for v in self.entries)

    def total(self):
        return sum(self.entries[1:], self.entries[0])

    @property
    def normalized(self) -> bool:
        if not self.is_numeric or any(isinstance(v, complex) for v in self.entries):
            return False
        s = self.total()
        return s == 1 if self.exact else abs(s - 1) <= 1e-12

    def in_open_simplex(self) -> bool:
        return self.normalized and all(v > 0 for v in self.entries)

    def normalize(self) -> "ProbTensor":
        s = self.total()
        if not s:
            raise ZeroDivisionError("tensor sums to zero")
        if self.exact:
            return ProbTensor(self.format, [Fraction(v) / s for v in self.entries])
        return ProbTensor(self.format, [v / s for v in self.entries])

    def __getitem__(self, idx):
        return self.entries[self.format.flatten(idx)]

    def array(self) -> np.ndarray:
        return np.array([complex(v) if isinstance(v, complex) else float(v) for v in self.entries])

    def __eq__(self, other):
        return isinstance(other, ProbTensor) and self.format == other.format and self.entries == other.entries

    def __repr__(self):
        return f"ProbTensor({self.format.dims}, [{', '.join(map(str, self.entries))}])"

    @classmethod
    def uniform(cls, dims: Sequence[int]) -> "ProbTensor":
        f = GameFormat(tuple(dims))
        return cls(f, [Fraction(1, f.total_cells)] * f.total_cells)

    @classmethod
    def indicator(cls, dims: Sequence[int], idx: Sequence[int]) -> "ProbTensor":
        f = GameFormat(tuple(dims))
        e = [0] * f.total_cells
        e[f.flatten(idx)] = 1
        return cls(f, e)

    @classmethod
    def product(cls, factors: Sequence[Sequence]) -> "ProbTensor":
        """Rank-one tensor with entries ``pi1[j1] * ... * pin[jn]``."""
        f = GameFormat(tuple(len(v) for v in factors))
        out = []
        for idx in f.indices():
            t = factors[0][idx[0]]
            for v, j in zip(factors[1:], idx[1:]):
                t = t * v[j]
            out.append(t)
        return cls(f, out)

    @classmethod
    def symbolic(cls, dims: Sequence[int], variables: Sequence[str] | None = None) -> "ProbTensor":
        f = GameFormat(tuple(dims))
        names = ["p" + f.cell_label(idx) for idx in f.indices()]
        variables = tuple(variables) if variables is not None else tuple(names)
        return cls(f, [MultiPoly.var(v, variables) for v in names])

    def to_json(self) -> dict:
        return {"dims": list(self.format.dims), "entries": [fmt_rational(v) for v in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "ProbTensor":
        return cls(tuple(data["dims"]), [to_rational(v) for v in data["entries"]])


def _check(P: ProbTensor, g: Game):
    if P.format != g.format:
        raise FormatMismatch(f"tensor format {P.format.dims} does not match game format {g.format.dims}")


def _dot(xs, ys):
    it = iter(zip(xs, ys))
    x, y = next(it)
    s = x * y
    for x, y in it:
        s = s + x * y
    return s


def _sum(xs):
    it = iter(xs)
    s = next(it)
    for x in it:
        s = s + x
    return s


def expected_payoff(P: ProbTensor, g: Game, i: int):
    """Dot product of ``P`` with player ``i``'s payoff tensor (``i`` is 0-based)."""
    _check(P, g)
    if not 0 <= i < g.n:
        raise IndexError(f"player index {i} out of range")
    return _dot(P.entries, g.payoffs[i])


def marginal(P: ProbTensor, i: int, k: int):
    """Probability that player ``i`` plays strategy ``k`` (both 0-based)."""
    if not 0 <= i < P.format.n or not 0 <= k < P.format.dims[i]:
        raise IndexError(f"strategy {k} of player {i} out of range for {P.format.dims}")
    return _sum(P.entries[pos] for pos in P.format.slices[i][k])


def conditional_numerator(P: ProbTensor, g: Game, i: int, k: int):
    _check(P, g)
    cells = P.format.slices[i][k]
    return _dot((P.entries[pos] for pos in cells), (g.payoffs[i][pos] for pos in cells))


def conditional_expected_payoff(P: ProbTensor, g: Game, i: int, k: int):
    den = marginal(P, i, k)
    if den == 0:
        raise ZeroMarginal(f"player {i + 1} plays strategy {k + 1} with probability zero")
    num = conditional_numerator(P, g, i, k)
    if isinstance(num, int) and isinstance(den, int):
        return Fraction(num, den)
    return num / den


def payoff_map(g: Game, P: ProbTensor) -> tuple:
    """Vector of expected payoffs of all players."""
    return tuple(expected_payoff(P, g, i) for i in range(g.n))
