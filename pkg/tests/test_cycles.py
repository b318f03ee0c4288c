import itertools

import pytest

from spinmod.cycles import (EdgeSet, boundary, cycle_basis, enumerate_cyclic,
                            pbar_decompose)
from spinmod.errors import BudgetError, DomainError
from spinmod.graphs import Graph

from conftest import (make_dumbbell, make_loop_chain, make_one_loop_one_leg,
                      make_rose, make_theta, make_weight_vertex)


def brute_force_kernel(graph):
    """All edge subsets with empty boundary, by exhaustive search."""
    out = []
    for mask in range(2 ** graph.n_edges):
        f = EdgeSet(graph, mask)
        if not boundary(graph, f):
            out.append(mask)
    return sorted(out)


def test_boundary_theta(theta):
    assert boundary(theta, EdgeSet.from_indices(theta, [0])) == frozenset({0, 1})
    assert boundary(theta, EdgeSet.from_indices(theta, [0, 1])) == frozenset()


def test_boundary_loop(dumbbell):
    assert boundary(dumbbell, EdgeSet.from_indices(dumbbell, [0])) == frozenset()
    assert boundary(dumbbell, EdgeSet.from_indices(dumbbell, [2])) == frozenset({0, 1})


def test_boundary_linear():
    g = make_loop_chain()
    for m1, m2 in itertools.product(range(2 ** g.n_edges), repeat=2):
        b1 = boundary(g, EdgeSet(g, m1))
        b2 = boundary(g, EdgeSet(g, m2))
        b12 = boundary(g, EdgeSet(g, m1 ^ m2))
        assert b12 == b1 ^ b2


def test_cycle_basis_sizes():
    for g in [make_theta(), make_dumbbell(), make_rose(3), make_loop_chain(),
              make_weight_vertex(2), make_one_loop_one_leg()]:
        basis = cycle_basis(g)
        assert len(basis) == g.b1
        for b in basis:
            assert not boundary(g, b)


def test_cycle_basis_tree():
    tree = Graph.build([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
    assert cycle_basis(tree) == []


def test_cycle_basis_dumbbell(dumbbell):
    masks = sorted(b.mask for b in cycle_basis(dumbbell))
    assert masks == [0b001, 0b010]


def test_enumerate_cyclic_matches_brute_force():
    for g in [make_theta(), make_dumbbell(), make_rose(3), make_loop_chain(),
              make_one_loop_one_leg(),
              Graph.build([(0, 0), (1, 0), (2, 0)],
                          [(0, 1), (1, 2), (0, 2), (0, 1)])]:
        got = sorted(f.mask for f in enumerate_cyclic(g))
        assert got == brute_force_kernel(g)
        assert len(got) == 2 ** g.b1


def test_enumerate_cyclic_theta(theta):
    masks = sorted(f.mask for f in enumerate_cyclic(theta))
    assert masks == [0b000, 0b011, 0b101, 0b110]


def test_enumerate_cyclic_no_edges():
    g = make_weight_vertex(3)
    assert [f.mask for f in enumerate_cyclic(g)] == [0]


def test_enumerate_cyclic_cap():
    with pytest.raises(BudgetError):
        enumerate_cyclic(make_rose(4), cap=3)


def test_pbar_theta_two_edges(theta):
    dec = pbar_decompose(theta, EdgeSet.from_indices(theta, [0, 1]))
    assert len(dec) == 1
    assert dec.genera == (1,)
    assert dec.c_plus == 1


def test_pbar_theta_empty(theta):
    dec = pbar_decompose(theta, EdgeSet(theta, 0))
    assert len(dec) == 2
    assert dec.genera == (0, 0)
    assert dec.c_plus == 0
    assert all(c.n_legs == 3 for c in dec.components)


def test_pbar_dumbbell_loops(dumbbell):
    dec = pbar_decompose(dumbbell, EdgeSet.from_indices(dumbbell, [0, 1]))
    assert len(dec) == 2
    assert dec.genera == (1, 1)
    assert dec.c_plus == 2


def test_pbar_requires_cyclic(theta):
    with pytest.raises(DomainError):
        pbar_decompose(theta, EdgeSet.from_indices(theta, [0]))


def test_pbar_full_edge_set_cplus():
    for g in [make_theta(), make_dumbbell(), make_rose(3), make_loop_chain()]:
        cyc = [f for f in enumerate_cyclic(g)
               if f.mask == (1 << g.n_edges) - 1]
        if not cyc:
            continue
        dec = pbar_decompose(g, cyc[0])
        assert dec.c_plus == (1 if g.b1 > 0 else 0)


def test_b1_bookkeeping():
    # b1(G/P) = b1(G) - b1(P), checked through the decomposition genera:
    # sum over components of genus equals total weight plus b1(P).
    for g in [make_theta(), make_dumbbell(), make_rose(3), make_loop_chain()]:
        for p in enumerate_cyclic(g):
            dec = pbar_decompose(g, p)
            assert sum(dec.genera) == g.total_weight() + p.b1


def test_edge_set_ops(theta):
    a = EdgeSet.from_indices(theta, [0, 1])
    b = EdgeSet.from_indices(theta, [1, 2])
    assert (a ^ b).indices() == (0, 2)
    assert (a | b).indices() == (0, 1, 2)
    assert (a & b).indices() == (1,)
    assert a.complement().indices() == (2,)
    assert EdgeSet.from_hex(theta, a.hex()) == a
    assert 0 in a and 2 not in a


def test_edge_set_b1():
    g = make_dumbbell()
    assert EdgeSet(g, 0).b1 == 0
    assert EdgeSet.from_indices(g, [0]).b1 == 1
    assert EdgeSet.from_indices(g, [2]).b1 == 0
    assert EdgeSet.full(g).b1 == 2
    assert EdgeSet.from_indices(g, [0, 1]).b1 == 2
    assert not EdgeSet.from_indices(g, [0, 1]).spanned_connected()
    assert EdgeSet.full(g).spanned_connected()
