"""Dependency equilibria of finite normal-form games."""

from .game import Game, GameFormat, ProbTensor
from .poly import MultiPoly

__all__ = ["Game", "GameFormat", "MultiPoly", "ProbTensor"]
__version__ = "0.1.0"
