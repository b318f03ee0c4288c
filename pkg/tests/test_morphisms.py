import itertools
import random

from spinmod.cycles import EdgeSet, boundary, enumerate_cyclic
from spinmod.graphs import Graph, genus
from spinmod.morphisms import (automorphisms, brute_force_isomorphic,
                               canonical_key, compose, contract,
                               cyclic_canonical_key, order_test, push_cycle,
                               push_spin, push_vertex_set,
                               quotient_action_orders)
from spinmod.spin import SpinGraph, SpinStructure, enumerate_spin, trivial_spin

from conftest import (make_dumbbell, make_loop_chain, make_one_loop_one_leg,
                      make_rose, make_theta, make_weight_vertex)


def spin(graph, indices, signs):
    return SpinStructure(graph, EdgeSet.from_indices(graph, indices), signs)


# -- contractions ------------------------------------------------------------

def test_contract_theta_edge(theta):
    c = contract(theta, [0])
    assert len(c.target.vertices) == 1
    assert c.target.w(c.target.vertices[0]) == 0
    assert c.target.n_edges == 2
    assert all(c.target.edge_vertices(i)[0] == c.target.edge_vertices(i)[1]
               for i in range(2))


def test_contract_dumbbell_loop(dumbbell):
    c = contract(dumbbell, [0])
    v = c.vertex_map[0]
    assert c.target.w(v) == 1
    assert c.target.b1 == dumbbell.b1 - 1


def test_contract_everything():
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        c = contract(g, range(g.n_edges))
        assert len(c.target.vertices) == 1
        assert c.target.w(c.target.vertices[0]) == genus(g)
        assert c.target.n_edges == 0


def test_contract_identity(theta):
    c = contract(theta, [])
    assert c.target == theta
    assert c.edge_map == {i: i for i in range(3)}


def test_contract_preserves_legs():
    g = make_one_loop_one_leg()
    c = contract(g, [0])
    assert c.target.n_legs == 1
    assert c.target.w(0) == 1


def test_push_cycle_examples(theta, dumbbell):
    c = contract(theta, [2])
    p = EdgeSet.from_indices(theta, [0, 1])
    assert sorted(push_cycle(c, p).indices()) == [0, 1]
    assert push_cycle(contract(theta, [0, 1]), p).mask == 0
    c = contract(dumbbell, [2])
    assert len(push_cycle(c, EdgeSet.from_indices(dumbbell, [0, 1]))) == 2


def test_push_cycle_surjective():
    # every cyclic set downstairs is hit by one upstairs
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        for k in range(g.n_edges + 1):
            for f in itertools.combinations(range(g.n_edges), k):
                c = contract(g, f)
                image = {push_cycle(c, p).mask for p in enumerate_cyclic(g)}
                assert image == {q.mask for q in enumerate_cyclic(c.target)}


def test_push_spin_full_contraction(dumbbell):
    s = spin(dumbbell, [0, 1], (1, 0))
    c = contract(dumbbell, range(3))
    out = push_spin(c, s)
    assert out.P.mask == 0
    assert out.signs == (1,)
    assert out.parity == s.parity == 1


def test_push_spin_bridge(dumbbell):
    s = spin(dumbbell, [0, 1], (1, 0))
    c = contract(dumbbell, [2])
    out = push_spin(c, s)
    assert sorted(out.P.indices()) == [0, 1]
    assert out.signs == (1,)


def test_push_spin_identity(theta):
    s = spin(theta, [0, 1], (1,))
    out = push_spin(contract(theta, []), s)
    assert out.data() == s.data()


def test_push_spin_parity_preserved_everywhere():
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        for s in enumerate_spin(g):
            for k in range(g.n_edges + 1):
                for f in itertools.combinations(range(g.n_edges), k):
                    c = contract(g, f)
                    out = push_spin(c, s)
                    assert out.parity == s.parity
                    assert all(sg == 0 for sg, gg in
                               zip(out.signs, out.dec.genera) if gg == 0)


def test_functoriality_on_cycles_and_spins():
    rng = random.Random(7)
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        for _ in range(60):
            all_edges = list(range(g.n_edges))
            f1 = [i for i in all_edges if rng.random() < 0.4]
            c1 = contract(g, f1)
            rest = [c1.edge_map[i] for i in all_edges
                    if c1.edge_map[i] is not None]
            f2 = [j for j in rest if rng.random() < 0.4]
            c2 = contract(c1.target, f2)
            c12 = compose(c1, c2)
            assert c12.target == c2.target
            for p in enumerate_cyclic(g):
                assert push_cycle(c12, p).mask == \
                    push_cycle(c2, push_cycle(c1, p)).mask
            for s in enumerate_spin(g):
                a = push_spin(c12, s)
                b = push_spin(c2, push_spin(c1, s))
                assert a.data() == b.data()


def test_boundary_commutes_with_pushforward():
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        for k in range(g.n_edges + 1):
            for f in itertools.combinations(range(g.n_edges), k):
                c = contract(g, f)
                for i in range(g.n_edges):
                    e = EdgeSet.from_indices(g, [i])
                    j = c.edge_map[i]
                    img = EdgeSet(c.target, 0 if j is None else 1 << j)
                    assert boundary(c.target, img) == \
                        push_vertex_set(c, boundary(g, e))


def test_contraction_json(dumbbell):
    c = contract(dumbbell, [2])
    data = c.to_json_dict()
    assert data["F"] == "4"
    assert data["vertex_map"] == [[0, 0], [1, 0]] or \
        data["vertex_map"] == [(0, 0), (1, 0)]


# -- automorphisms ------------------------------------------------------------

def test_aut_theta_orders(theta):
    g = automorphisms(theta)
    assert g.order_ve == 12
    assert g.order == 12
    assert g.order_edge == 6


def test_aut_theta_spin_restricted(theta):
    s = spin(theta, [0, 1], (1,))
    g = automorphisms(theta, restrict="spin", spin=s)
    assert g.order_ve == 4


def test_aut_weight_vertex_trivial():
    g = automorphisms(make_weight_vertex(2, 2))
    assert g.order == 1


def test_aut_loop_flips():
    g = automorphisms(make_one_loop_one_leg())
    assert g.order == 2       # the loop flip
    assert g.order_ve == 1


def test_aut_dumbbell(dumbbell):
    g = automorphisms(dumbbell)
    assert g.order == 8       # vertex swap x two loop flips
    assert g.order_ve == 2


def test_aut_rose():
    g = automorphisms(make_rose(3))
    assert g.order == 48      # 3! loop permutations x 2^3 flips
    assert g.order_edge == 6


def test_aut_legs_pin_vertices():
    g = Graph.build([(0, 0), (1, 0)], [(0, 1), (0, 1), (0, 1)], [0])
    a = automorphisms(g)
    assert all(el.vertex_map[0] == 0 for el in a.elements)
    assert a.order_ve == 6


def test_generators_generate():
    for g in [make_theta(), make_dumbbell(), make_rose(3),
              make_weight_vertex(2, 1)]:
        group = automorphisms(g)
        gens = group.generators
        closed = {a.key() for a in group.elements
                  if all(h == k for h, k in a.half_map.items())}
        frontier = [a for a in group.elements if a.key() in closed]
        for a in gens:
            if a.key() not in closed:
                closed.add(a.key())
                frontier.append(a)
        while frontier:
            fresh = []
            for b in frontier:
                for a in gens:
                    c = a.compose(b)
                    if c.key() not in closed:
                        closed.add(c.key())
                        fresh.append(c)
            frontier = fresh
        assert len(closed) == group.order


def test_pbar_subgroup_is_product_of_component_groups():
    # the subgroup fixing the opened half-edges equals the direct product
    # of the component automorphism groups, computed independently
    from spinmod.cycles import pbar_decompose
    from spinmod.graphs import subgraph_on
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        for s in enumerate_spin(g):
            sub = automorphisms(g, restrict="pbar", spin=s)
            product = 1
            dec = s.dec
            for comp in dec.vertex_sets:
                piece = subgraph_on(dec.pbar, comp)
                product *= automorphisms(piece).order
            assert sub.order == product, (g, s)


def test_spin_orbits_match_keys():
    # partition of the spin structures by group action equals the
    # partition by canonical spin key
    for g in [make_theta(), make_dumbbell(), make_loop_chain()]:
        group = automorphisms(g)
        dec_cache = {}
        by_orbit = {}
        for s in enumerate_spin(g):
            orbit = min(a.act_spin(s, dec_cache).data()
                        for a in group.elements)
            by_orbit.setdefault(orbit, set()).add(s.data())
        by_key = {}
        for s in enumerate_spin(g):
            by_key.setdefault(canonical_key(SpinGraph(g, s)),
                              set()).add(s.data())
        assert sorted(by_orbit.values(), key=sorted) == \
            sorted(by_key.values(), key=sorted)


def test_induced_quotient_group_inside_full():
    # the induced action on the contracted graph is always contained in
    # the full sign-preserving automorphism group of the quotient; this
    # records empirically whether it can be a proper subgroup
    proper = []
    for g, n in [(1, 1), (2, 0)]:
        from spinmod.posets import enumerate_stable_graphs
        for graph in enumerate_stable_graphs(g, n):
            for s in enumerate_spin(graph):
                c = contract(graph, s.P)
                quotient = c.target
                sign_at = {}
                for i, vs in enumerate(s.dec.vertex_sets):
                    sign_at[c.vertex_map[min(vs)]] = s.signs[i]
                full = [a for a in automorphisms(quotient).elements
                        if all(sign_at[a.vertex_map[v]] == sign_at[v]
                               for v in quotient.vertices)]
                full_keys = {a.key() for a in full}
                fixing = automorphisms(graph, restrict="spin", spin=s)
                r_halves = [h for i in range(graph.n_edges) if i not in s.P
                            for h in graph.edges[i]]
                induced = set()
                for a in fixing.elements:
                    vmap = tuple(sorted(
                        (c.vertex_map[min(vs)],
                         c.vertex_map[min(a.vertex_map[v] for v in vs)])
                        for vs in s.dec.vertex_sets))
                    hmap = tuple(sorted(
                        [(h, a.half_map[h]) for h in r_halves]
                        + [(h, h) for h in quotient.legs]))
                    induced.add((vmap, hmap))
                assert induced <= full_keys
                assert len(full_keys) % len(induced) == 0
                if len(induced) < len(full_keys):
                    proper.append((canonical_key(graph), s.data()))
    # properness does occur at desk scale: it is real, not assumed away
    assert proper


def test_aut_factorization_on_fixtures():
    # order of the spin-preserving group = order of the component-wise
    # group x order of the induced action on the quotient (half-edge level)
    cases = []
    theta = make_theta()
    cases += [(theta, spin(theta, [0, 1], (s,))) for s in (0, 1)]
    dumbbell = make_dumbbell()
    cases += [(dumbbell, spin(dumbbell, [0, 1], sg))
              for sg in [(0, 0), (1, 0), (1, 1)]]
    cases += [(dumbbell, trivial_spin(dumbbell))]
    for g, s in cases:
        full = automorphisms(g, restrict="spin", spin=s)
        pbar = automorphisms(g, restrict="pbar", spin=s)
        q_h, _ = quotient_action_orders(g, s, full)
        assert full.order == pbar.order * q_h, (g, s)


# -- canonical keys -----------------------------------------------------------

def relabel(graph, vperm, seed=0):
    """Rebuild a graph with permuted vertex ids and shuffled edge order."""
    rng = random.Random(seed)
    edges = [tuple(vperm[x] for x in graph.edge_vertices(i))
             for i in range(graph.n_edges)]
    rng.shuffle(edges)
    legs = [vperm[graph.endpoint[h]] for h in graph.legs]
    return Graph.build([(vperm[v], graph.w(v)) for v in graph.vertices],
                       edges, legs)


def test_canonical_key_relabeling(theta, dumbbell):
    for g in [theta, dumbbell, make_loop_chain(), make_one_loop_one_leg()]:
        perm = {v: 10 - v for v in g.vertices}
        assert canonical_key(relabel(g, perm, seed=3)) == canonical_key(g)


def test_canonical_key_distinguishes(theta, dumbbell):
    assert canonical_key(theta) != canonical_key(dumbbell)
    assert canonical_key(make_rose(2)) != canonical_key(make_rose(3))
    legged = Graph.build([(0, 0), (1, 0)], [(0, 1)] * 3, [0])
    other = Graph.build([(0, 0), (1, 0)], [(0, 1)] * 3, [1])
    assert canonical_key(legged) == canonical_key(other)  # swap isomorphism
    two = Graph.build([(0, 0), (1, 0)], [(0, 1)] * 3, [0, 0])
    split = Graph.build([(0, 0), (1, 0)], [(0, 1)] * 3, [0, 1])
    assert canonical_key(two) != canonical_key(split)


def test_canonical_key_brute_force_agreement():
    rng = random.Random(11)
    pool = []
    for _ in range(40):
        n = rng.randint(1, 4)
        verts = [(i, rng.randint(0, 2)) for i in range(n)]
        edges = [(rng.randrange(n), rng.randrange(n))
                 for _ in range(rng.randint(0, 5))]
        legs = [rng.randrange(n) for _ in range(rng.randint(0, 2))]
        pool.append(Graph.build(verts, edges, legs))
    for g1, g2 in itertools.combinations(pool, 2):
        assert (canonical_key(g1) == canonical_key(g2)) == \
            brute_force_isomorphic(g1, g2), (g1, g2)


def test_spin_key_theta(theta):
    a = SpinGraph(theta, spin(theta, [0, 1], (0,)))
    b = SpinGraph(theta, spin(theta, [0, 2], (0,)))
    c = SpinGraph(theta, spin(theta, [0, 1], (1,)))
    assert canonical_key(a) == canonical_key(b)
    assert canonical_key(a) != canonical_key(c)


def test_spin_key_across_relabeling(dumbbell):
    g2 = relabel(dumbbell, {0: 5, 1: 2}, seed=9)
    # loops of g2: find edge indices that are loops
    loops = [i for i in range(g2.n_edges)
             if g2.edge_vertices(i)[0] == g2.edge_vertices(i)[1]]
    s1 = SpinGraph(dumbbell, spin(dumbbell, [0, 1], (1, 1)))
    s2 = SpinGraph(g2, spin(g2, loops, (1, 1)))
    assert canonical_key(s1) == canonical_key(s2)


def test_cyclic_key(theta):
    k1 = cyclic_canonical_key(theta, EdgeSet.from_indices(theta, [0, 1]))
    k2 = cyclic_canonical_key(theta, EdgeSet.from_indices(theta, [1, 2]))
    k3 = cyclic_canonical_key(theta, EdgeSet(theta, 0))
    assert k1 == k2 != k3


# -- order testing -------------------------------------------------------------

def test_edge_set_json(theta):
    from spinmod.morphisms import edge_set_json
    data = edge_set_json(EdgeSet.from_indices(theta, [0, 2]))
    assert data["mask"] == "5"
    assert data["carrier"] == canonical_key(theta)


def test_partition_by_parity(theta):
    from spinmod.spin import partition_by_parity
    even, odd = partition_by_parity(enumerate_spin(theta))
    assert len(even) == 4 and len(odd) == 3


def test_order_test_full_contraction(theta):
    upper = SpinGraph(theta, spin(theta, [0, 1], (1,)))
    gw = make_weight_vertex(2)
    lower = SpinGraph(gw, SpinStructure(gw, EdgeSet(gw, 0), (1,)))
    witness = order_test(upper, lower)
    assert witness is not None
    assert len(witness.contracted) == 3


def test_order_test_reflexive(dumbbell):
    sg = SpinGraph(dumbbell, spin(dumbbell, [0, 1], (1, 0)))
    witness = order_test(sg, sg)
    assert witness is not None
    assert witness.contracted.mask == 0


def test_order_test_parity_obstruction(theta):
    even = SpinGraph(theta, spin(theta, [0, 1], (0,)))
    gw = make_weight_vertex(2)
    odd = SpinGraph(gw, SpinStructure(gw, EdgeSet(gw, 0), (1,)))
    assert order_test(even, odd) is None
