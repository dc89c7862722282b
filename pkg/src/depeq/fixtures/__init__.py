"""Versioned game fixtures shipped with the package."""

import json
from importlib import resources

from ..game import Game

NAMES = ("bach", "bach_perturbed", "centipede", "disconnected", "ex23")


def fixture_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")


def load_fixture(name: str) -> Game:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    return Game.from_json(json.loads(fixture_path(name).read_text()))
