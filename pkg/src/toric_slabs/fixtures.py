"""Built-in decompositions used by the CLI, the self-check and the tests."""

from __future__ import annotations

from .polytope import Decomposition, from_dict, validate

_FIXTURES = {
    # sigma = [-1, 1] split at the origin
    "interval": {
        "dim": 1,
        "vertices": [[-1], [0], [1]],
        "maximal_cells": [[0, 1], [1, 2]],
        "base_cell": 0,
    },
    # triangle (1,0), (0,1), (-1,-1) star-subdivided at the origin
    "local-p2": {
        "dim": 2,
        "vertices": [[1, 0], [0, 1], [-1, -1], [0, 0]],
        "maximal_cells": [[3, 0, 1], [3, 1, 2], [3, 2, 0]],
        "base_cell": 0,
    },
    # square conv(+-e1, +-e2) star-subdivided at the origin
    "star-square": {
        "dim": 2,
        "vertices": [[0, 0], [1, 0], [0, 1], [-1, 0], [0, -1]],
        "maximal_cells": [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]],
        "base_cell": 0,
    },
    "simplex": {
        "dim": 1,
        "vertices": [[0], [1]],
        "maximal_cells": [[0, 1]],
        "base_cell": 0,
    },
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture_document(name: str) -> dict:
    try:
        return _FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}") from None


def load_fixture(name: str) -> Decomposition:
    dec = from_dict(fixture_document(name), name=name)
    validate(dec).raise_if_failed()
    return dec
