"""Shared fixture graphs.

All edge lists are written out explicitly so edge indices in the tests
are predictable: edges are indexed in input order (build assigns
half-edge ids 2i, 2i+1 to edge i).
"""

import pytest

from spinmod.graphs import Graph


def make_theta():
    """Two weight-0 vertices joined by three parallel edges (genus 2)."""
    return Graph.build([(0, 0), (1, 0)], [(0, 1), (0, 1), (0, 1)])


def make_dumbbell():
    """Two weight-0 vertices, a loop at each, one bridge (genus 2).

    Edge indices: 0 = loop at vertex 0, 1 = loop at vertex 1, 2 = bridge.
    """
    return Graph.build([(0, 0), (1, 0)], [(0, 0), (1, 1), (0, 1)])


def make_weight_vertex(g, n=0):
    """Single vertex of weight g with n legs and no edges."""
    return Graph.build([(0, g)], [], [0] * n)


def make_one_loop_one_leg():
    """Weight-0 vertex with one loop and one leg (genus 1)."""
    return Graph.build([(0, 0)], [(0, 0)], [0])


def make_rose(k):
    """One weight-0 vertex with k loops (genus k)."""
    return Graph.build([(0, 0)], [(0, 0)] * k)


def make_two_loops():
    """One weight-0 vertex with two loops (genus 2, basic)."""
    return make_rose(2)


def make_loop_chain():
    """Cycle of length 2 with one loop at each vertex (genus 3)."""
    return Graph.build([(0, 0), (1, 0)], [(0, 1), (0, 1), (0, 0), (1, 1)])


@pytest.fixture
def theta():
    return make_theta()


@pytest.fixture
def dumbbell():
    return make_dumbbell()


@pytest.fixture
def one_loop_one_leg():
    return make_one_loop_one_leg()
