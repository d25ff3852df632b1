import math

import numpy as np
import pytest

from metreal.fuzzy_core import fuzzy_set
from metreal.simplicial import from_tables


def build_one_skeletal(vertices, edges):
    """
    1-truncated simplicial fuzzy set from vertex memberships {v: m} and edges
    {name: (first vertex, second vertex, m)}. Every vertex v gets its
    degenerate edge 's' + v at the membership of v.
    """
    degenerate = {'s' + v: (v, v, m) for v, m in vertices.items()}
    all_edges = dict(edges)
    all_edges.update(degenerate)
    S0 = fuzzy_set(vertices)
    S1 = fuzzy_set({e: m for e, (_, _, m) in all_edges.items()})
    faces = {(1, 0): {e: v1 for e, (_, v1, _) in all_edges.items()},
             (1, 1): {e: v0 for e, (v0, _, _) in all_edges.items()}}
    degeneracies = {(0, 0): {v: 's' + v for v in vertices}}
    return from_tables(1, [S0, S1], faces, degeneracies)


@pytest.fixture
def one_skeletal():
    return build_one_skeletal


@pytest.fixture
def worked_fuzzy_set():
    return fuzzy_set({'x': 1 / 3, 'y': 1 / 3, 'z': 1 / 2, 'w': 1.0})


@pytest.fixture
def edge_fixture():
    """Vertices u, v at membership 1 joined by e at membership exp(-1)."""
    return build_one_skeletal({'u': 1.0, 'v': 1.0}, {'e': ('u', 'v', math.exp(-1))})


@pytest.fixture
def triangle_fixture():
    return build_one_skeletal({'A': 1.0, 'B': 1.0, 'C': 1.0},
                              {'AB': ('A', 'B', math.exp(-1)),
                               'BC': ('B', 'C', math.exp(-1)),
                               'AC': ('A', 'C', math.exp(-3))})


@pytest.fixture
def rng():
    return np.random.default_rng(0)
