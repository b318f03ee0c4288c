"""Contractions, automorphism groups, pushforwards and canonical keys.

Morphisms act on vertices and half-edges.  Automorphism groups are
materialized as full element lists (desk scale), and three action orders
are exposed: on half-edges, on vertices and edges jointly, and on edges
alone.  Canonical keys are iso-invariant digests computed by color
refinement with individualization, cross-checked in the test suite
against brute-force isomorphism search.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict
from itertools import combinations, permutations, product

from .cycles import EdgeSet, boundary, is_cyclic, pbar_decompose
from .errors import BudgetError, DomainError, InputError
from .graphs import Graph
from .spin import SpinGraph, SpinStructure

AUT_HALF_EDGE_CAP = 40


# -- contractions -----------------------------------------------------------

class Contraction:
    """Contraction of an edge subset, with the induced vertex and edge maps.

    Target vertices are named by the smallest source vertex they absorb,
    and target weights are the genera of the contracted preimages.  Edges
    and legs keep their half-edge ids, so edge sets push forward by index
    translation.
    """

    def __init__(self, source, contracted):
        if contracted.graph != source:
            raise InputError("edge set lives over a different graph")
        self.source = source
        self.contracted = contracted

        parent = {v: v for v in source.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in contracted:
            u, v = source.edge_vertices(i)
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[min(ru, rv)] = max(ru, rv)
        classes = defaultdict(list)
        for v in source.vertices:
            classes[find(v)].append(v)
        rep = {}
        for members in classes.values():
            r = min(members)
            for v in members:
                rep[v] = r
        self.vertex_map = rep

        # target weight = total weight + first Betti number of the
        # contracted piece over each class
        f_count = defaultdict(int)
        for i in contracted:
            u, _ = source.edge_vertices(i)
            f_count[rep[u]] += 1
        weight = {}
        for members in classes.values():
            r = min(members)
            weight[r] = (sum(source.w(v) for v in members)
                         + f_count[r] - len(members) + 1)

        dropped = set()
        for i in contracted:
            dropped.update(source.edges[i])
        endpoint = {h: rep[v] for h, v in source.endpoint.items()
                    if h not in dropped}
        involution = {h: source.involution[h] for h in endpoint}
        self.target = Graph(weight, endpoint, involution, source.legs,
                            source.exceptional & set(weight))

        new_index = self.target.edge_index
        self.edge_map = {}
        for i in range(source.n_edges):
            pair = source.edges[i]
            self.edge_map[i] = new_index.get(pair)

        assert self.target.b1 == source.b1 - contracted.b1
        assert self.target.genus == source.genus

    def to_json_dict(self):
        return {"F": self.contracted.hex(),
                "vertex_map": sorted(self.vertex_map.items())}

    def __repr__(self):
        return (f"Contraction(F={sorted(self.contracted.indices())}, "
                f"target={self.target!r})")


def contract(graph, edge_set):
    """Contract an edge subset; identity when the set is empty."""
    if not isinstance(edge_set, EdgeSet):
        edge_set = EdgeSet.from_indices(graph, edge_set)
    return Contraction(graph, edge_set)


def compose(first, second):
    """The contraction of the union, equal to applying ``first`` then
    ``second``; requires ``second.source == first.target``."""
    if second.source != first.target:
        raise InputError("contractions do not compose")
    mask = first.contracted.mask
    for i, j in first.edge_map.items():
        if j is not None and j in second.contracted:
            mask |= 1 << i
    return Contraction(first.source, EdgeSet(first.source, mask))


def push_vertex_set(contraction, vertex_set):
    """GF(2) pushforward of a vertex vector (image with multiplicity
    mod 2)."""
    out = set()
    for v in vertex_set:
        out.symmetric_difference_update({contraction.vertex_map[v]})
    return frozenset(out)


def push_cycle(contraction, cyclic_set):
    """Image of a cyclic edge set: drop the contracted edges, reindex the
    rest."""
    if not is_cyclic(contraction.source, cyclic_set):
        raise DomainError("pushforward requires a cyclic edge set")
    mask = 0
    for i in cyclic_set:
        j = contraction.edge_map[i]
        if j is not None:
            mask |= 1 << j
    out = EdgeSet(contraction.target, mask)
    assert not boundary(contraction.target, out)
    return out


def push_spin(contraction, spin):
    """Pushforward of a spin structure: the image cyclic set with signs
    summed over merged components.  Parity is preserved."""
    p_out = push_cycle(contraction, spin.P)
    dec_out = pbar_decompose(contraction.target, p_out)
    signs = [0] * len(dec_out)
    for i, vs in enumerate(spin.dec.vertex_sets):
        image = {contraction.vertex_map[v] for v in vs}
        j = dec_out.component_of(min(image))
        assert image <= dec_out.vertex_sets[j]
        signs[j] ^= spin.signs[i]
    out = SpinStructure(contraction.target, p_out, tuple(signs), _dec=dec_out)
    assert out.parity == spin.parity
    return out


# -- automorphisms ----------------------------------------------------------

def _initial_colors(graph):
    raw = {v: (graph.w(v), graph.deg(v), graph.loops(v),
               graph.leg_positions(v)) for v in graph.vertices}
    ranks = {c: i for i, c in enumerate(sorted(set(raw.values())))}
    return {v: ranks[raw[v]] for v in graph.vertices}


def _neighbor_lists(graph):
    adj = {v: [] for v in graph.vertices}
    for (u, v), m in graph.multiplicity.items():
        if u != v:
            adj[u].append((v, m))
            adj[v].append((u, m))
    return adj


def _refine_colors(graph, colors, adj):
    while True:
        sig = {v: (colors[v], tuple(sorted((colors[u], m) for u, m in adj[v])))
               for v in graph.vertices}
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in graph.vertices}
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def _encode(graph, pos):
    mult = defaultdict(int)
    for i in range(graph.n_edges):
        u, v = graph.edge_vertices(i)
        a, b = sorted((pos[u], pos[v]))
        mult[(a, b)] += 1
    order = sorted(graph.vertices, key=pos.get)
    return (
        len(graph.vertices), graph.n_edges,
        tuple(graph.w(v) for v in order),
        tuple(pos[graph.endpoint[h]] for h in graph.legs),
        tuple(sorted((a, b, m) for (a, b), m in mult.items())),
    )


def canonical_form(graph):
    """Canonical certificate and a labeling realizing it.

    Returns ``(cert, pos)`` where ``pos`` maps vertices to canonical
    positions; equal certificates characterize isomorphic graphs.
    """
    cached = graph.__dict__.get("_canonical_form")
    if cached is not None:
        return cached
    adj = _neighbor_lists(graph)
    base = _refine_colors(graph, _initial_colors(graph), adj)
    best = [None, None]

    def rec(colors):
        classes = defaultdict(list)
        for v, c in colors.items():
            classes[c].append(v)
        split = [c for c in sorted(classes) if len(classes[c]) > 1]
        if not split:
            pos = {v: i for i, (_, v) in enumerate(
                sorted((c, v) for v, c in colors.items()))}
            cert = _encode(graph, pos)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, pos
            return
        for v in sorted(classes[split[0]]):
            forced = {u: (c, 0 if u == v else 1)
                      for u, c in colors.items()}
            ranks = {s: i for i, s in enumerate(sorted(set(forced.values())))}
            rec(_refine_colors(graph, {u: ranks[forced[u]]
                                       for u in graph.vertices}, adj))

    rec(base)
    result = (best[0], best[1])
    graph.__dict__["_canonical_form"] = result
    return result


class Aut:
    """A single automorphism: a weight-preserving map on vertices and
    half-edges commuting with the involution and fixing every leg."""

    def __init__(self, graph, vertex_map, half_map):
        self.graph = graph
        self.vertex_map = vertex_map
        self.half_map = half_map

    def key(self):
        return (tuple(sorted(self.vertex_map.items())),
                tuple(sorted(self.half_map.items())))

    @property
    def edge_perm(self):
        perm = getattr(self, "_edge_perm", None)
        if perm is None:
            idx = self.graph.edge_index
            perm = tuple(
                idx[tuple(sorted((self.half_map[h], self.half_map[k])))]
                for h, k in self.graph.edges)
            self._edge_perm = perm
        return perm

    def ve_key(self):
        return (tuple(sorted(self.vertex_map.items())), self.edge_perm)

    def act_mask(self, mask):
        out = 0
        for i in range(self.graph.n_edges):
            if mask >> i & 1:
                out |= 1 << self.edge_perm[i]
        return out

    def compose(self, other):
        """The automorphism applying ``other`` first, then this one."""
        return Aut(self.graph,
                   {v: self.vertex_map[u]
                    for v, u in other.vertex_map.items()},
                   {h: self.half_map[k]
                    for h, k in other.half_map.items()})

    def act_spin(self, spin, _dec_cache=None):
        """Image of a spin structure under this automorphism."""
        mask = self.act_mask(spin.P.mask)
        p_out = EdgeSet(self.graph, mask)
        if _dec_cache is not None:
            dec = _dec_cache.setdefault(mask, pbar_decompose(self.graph, p_out))
        else:
            dec = pbar_decompose(self.graph, p_out)
        signs = [0] * len(dec)
        for i, vs in enumerate(spin.dec.vertex_sets):
            image = {self.vertex_map[v] for v in vs}
            j = dec.component_of(min(image))
            assert image == dec.vertex_sets[j]
            signs[j] = spin.signs[i]
        return SpinStructure(self.graph, p_out, tuple(signs), _dec=dec)

    def __repr__(self):
        return f"Aut(v={self.vertex_map})"


class AutGroup:
    """Fully materialized automorphism group of a graph (optionally
    restricted), with its three action orders."""

    def __init__(self, graph, elements):
        self.graph = graph
        self.elements = tuple(elements)

    @property
    def order(self):
        """Order as a group of maps on vertices and half-edges."""
        return len(self.elements)

    @property
    def order_ve(self):
        """Order of the induced action on vertices and edges jointly."""
        return len({a.ve_key() for a in self.elements})

    @property
    def order_edge(self):
        """Order of the induced action on edges alone."""
        return len({a.edge_perm for a in self.elements})

    @property
    def generators(self):
        """A generating subset, found greedily by closure (empty for the
        trivial group)."""
        cached = getattr(self, "_generators", None)
        if cached is not None:
            return cached
        gens = []
        ident = next(a for a in self.elements
                     if all(h == k for h, k in a.half_map.items()))
        closed = {ident.key(): ident}
        for a in sorted(self.elements, key=lambda x: x.key()):
            if a.key() in closed:
                continue
            gens.append(a)
            frontier = list(closed.values())
            closed[a.key()] = a
            frontier.append(a)
            while frontier:
                fresh = []
                for b in frontier:
                    for g in gens:
                        for c in (g.compose(b), b.compose(g)):
                            if c.key() not in closed:
                                closed[c.key()] = c
                                fresh.append(c)
                frontier = fresh
        self._generators = tuple(gens)
        return self._generators

    def orbits(self, items, act):
        """Orbit partition of ``items`` under ``act(element, item)``."""
        remaining = list(items)
        seen = set()
        out = []
        for x in remaining:
            if x in seen:
                continue
            orbit = {act(a, x) for a in self.elements}
            assert x in orbit
            seen |= orbit
            out.append(sorted(orbit))
        return out


def _vertex_bijections(graph, colors):
    mult = graph.multiplicity

    def m(u, v):
        return mult.get((u, v) if u <= v else (v, u), 0)

    verts = sorted(graph.vertices, key=lambda v: (colors[v], v))
    candidates = {v: sorted(u for u in graph.vertices
                            if colors[u] == colors[v]) for v in verts}
    mapping = {}
    used = set()
    out = []

    def bt(i):
        if i == len(verts):
            out.append(dict(mapping))
            return
        v = verts[i]
        for u in candidates[v]:
            if u in used:
                continue
            if any(m(v, t) != m(u, mapping[t]) for t in mapping):
                continue
            mapping[v] = u
            used.add(u)
            bt(i + 1)
            del mapping[v]
            used.discard(u)

    bt(0)
    return out


def _half_edge_extensions(graph, vmap):
    """All half-edge maps extending a compatible vertex bijection."""
    edges_by_pair = defaultdict(list)
    loops_by_vertex = defaultdict(list)
    for i in range(graph.n_edges):
        u, v = graph.edge_vertices(i)
        if u == v:
            loops_by_vertex[u].append(i)
        else:
            edges_by_pair[(u, v)].append(i)
    edges_by_pair = dict(edges_by_pair)
    loops_by_vertex = dict(loops_by_vertex)

    groups = []
    for (u, v), es in sorted(edges_by_pair.items()):
        iu, iv = vmap[u], vmap[v]
        targets = edges_by_pair[(iu, iv) if iu <= iv else (iv, iu)]
        options = []
        for perm in permutations(targets):
            frag = {}
            for e_idx, f_idx in zip(es, perm):
                h, k = graph.edges[e_idx]
                a, b = graph.edges[f_idx]
                if graph.endpoint[a] == vmap[graph.endpoint[h]]:
                    frag[h], frag[k] = a, b
                else:
                    frag[h], frag[k] = b, a
            options.append(frag)
        groups.append(options)
    for v, ls in sorted(loops_by_vertex.items()):
        targets = loops_by_vertex[vmap[v]]
        options = []
        for perm in permutations(targets):
            for flips in product((0, 1), repeat=len(ls)):
                frag = {}
                for l_idx, f_idx, flip in zip(ls, perm, flips):
                    h, k = graph.edges[l_idx]
                    a, b = graph.edges[f_idx]
                    frag[h], frag[k] = (b, a) if flip else (a, b)
                options.append(frag)
        groups.append(options)

    identity_legs = {h: h for h in graph.legs}
    for combo in product(*groups):
        half_map = dict(identity_legs)
        for frag in combo:
            half_map.update(frag)
        yield half_map


def _full_group(graph, cap):
    cached = graph.__dict__.get("_aut_group")
    if cached is not None:
        return cached
    if len(graph.half_edges) > cap:
        raise BudgetError(
            f"automorphism search capped at {cap} half-edges, graph has "
            f"{len(graph.half_edges)}")
    adj = _neighbor_lists(graph)
    colors = _refine_colors(graph, _initial_colors(graph), adj)
    elements = []
    for vmap in _vertex_bijections(graph, colors):
        for half_map in _half_edge_extensions(graph, vmap):
            elements.append(Aut(graph, vmap, half_map))
    group = AutGroup(graph, elements)
    graph.__dict__["_aut_group"] = group
    return group


def automorphisms(graph, restrict=None, spin=None, cap=AUT_HALF_EDGE_CAP):
    """The automorphism group, optionally restricted.

    ``restrict="spin"`` keeps the elements fixing the given spin
    structure.  ``restrict="pbar"`` keeps those fixing every half-edge
    outside the spin structure's cyclic set and mapping each component of
    the opened graph to itself (the product of the component groups).
    """
    group = _full_group(graph, cap)
    if restrict is None:
        return group
    if spin is None or spin.graph != graph:
        raise InputError("restricted groups need a spin structure over the "
                         "same graph")
    if restrict == "spin":
        dec_cache = {}
        kept = [a for a in group.elements
                if a.act_spin(spin, dec_cache) == spin]
        return AutGroup(graph, kept)
    if restrict == "pbar":
        outside = [h for i in range(graph.n_edges) if i not in spin.P
                   for h in graph.edges[i]]
        kept = []
        for a in group.elements:
            if any(a.half_map[h] != h for h in outside):
                continue
            if all({a.vertex_map[v] for v in vs} == set(vs)
                   for vs in spin.dec.vertex_sets):
                kept.append(a)
        return AutGroup(graph, kept)
    raise InputError(f"unknown restriction {restrict!r}")


def quotient_action_orders(graph, spin, group):
    """Orders of the action induced on the contracted graph by a group of
    spin-preserving automorphisms.

    Elements act on the vertices of the quotient (the components of the
    opened graph) and on its half-edges (those outside the cyclic set).
    Returns ``(half_edge_order, ve_order)``.
    """
    outside = [h for i in range(graph.n_edges) if i not in spin.P
               for h in graph.edges[i]]
    comp_index = {vs: i for i, vs in enumerate(spin.dec.vertex_sets)}
    seen_h = set()
    seen_ve = set()
    for a in group.elements:
        comp_perm = tuple(
            comp_index[frozenset(a.vertex_map[v] for v in vs)]
            for vs in spin.dec.vertex_sets)
        h_action = tuple(a.half_map[h] for h in outside)
        edge_action = tuple(
            tuple(sorted((a.half_map[h], a.half_map[k])))
            for i in range(graph.n_edges) if i not in spin.P
            for (h, k) in [graph.edges[i]])
        seen_h.add((comp_perm, h_action))
        seen_ve.add((comp_perm, edge_action))
    return len(seen_h), len(seen_ve)


# -- canonical keys ---------------------------------------------------------

def _digest(parts):
    h = hashlib.sha256()
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"|")
    return h.hexdigest()


def _spin_encoding(graph, pos, aut, spin):
    per_pair = defaultdict(int)
    for i in spin.P:
        j = aut.edge_perm[i]
        u, v = graph.edge_vertices(j)
        per_pair[tuple(sorted((pos[u], pos[v])))] += 1
    comps = []
    for vs, s in zip(spin.dec.vertex_sets, spin.signs):
        image = tuple(sorted(pos[aut.vertex_map[v]] for v in vs))
        comps.append((image, s))
    return (tuple(sorted(per_pair.items())), tuple(sorted(comps)))


def _cyclic_encoding(graph, pos, aut, cyclic_set):
    per_pair = defaultdict(int)
    for i in cyclic_set:
        j = aut.edge_perm[i]
        u, v = graph.edge_vertices(j)
        per_pair[tuple(sorted((pos[u], pos[v])))] += 1
    return tuple(sorted(per_pair.items()))


def canonical_key(obj, cap=AUT_HALF_EDGE_CAP):
    """Deterministic iso-invariant key, as lowercase hex.

    Accepts a graph or a spin graph; spin keys agree exactly when the
    spin graphs are isomorphic (same underlying graph class, spin
    structures related by an isomorphism)."""
    if isinstance(obj, Graph):
        cert, _ = canonical_form(obj)
        return _digest([cert])
    if isinstance(obj, SpinGraph):
        graph, spin = obj.graph, obj.spin
        cert, pos = canonical_form(graph)
        group = _full_group(graph, cap)
        best = min(_spin_encoding(graph, pos, a, spin)
                   for a in group.elements)
        return _digest([cert, best])
    raise InputError(f"cannot key objects of type {type(obj).__name__}")


def edge_set_json(edge_set):
    """Edge set as hex bitmask alongside its carrier's canonical key."""
    return {"mask": edge_set.hex(), "carrier": canonical_key(edge_set.graph)}


def cyclic_canonical_key(graph, cyclic_set, cap=AUT_HALF_EDGE_CAP):
    """Key of a (graph, cyclic set) pair up to isomorphism."""
    if not is_cyclic(graph, cyclic_set):
        raise DomainError("key requires a cyclic edge set")
    cert, pos = canonical_form(graph)
    group = _full_group(graph, cap)
    best = min(_cyclic_encoding(graph, pos, a, cyclic_set)
               for a in group.elements)
    return _digest([cert, best])


def brute_force_isomorphic(g1, g2):
    """Isomorphism test by exhaustive search over vertex bijections,
    for cross-checking canonical keys on small graphs."""
    if (len(g1.vertices) != len(g2.vertices) or g1.n_edges != g2.n_edges
            or g1.n_legs != g2.n_legs):
        return False
    m1, m2 = g1.multiplicity, g2.multiplicity
    legs1 = [g1.endpoint[h] for h in g1.legs]
    legs2 = [g2.endpoint[h] for h in g2.legs]
    for perm in permutations(g2.vertices):
        vmap = dict(zip(sorted(g1.vertices), perm))
        if any(g1.w(v) != g2.w(vmap[v]) for v in g1.vertices):
            continue
        if any(vmap[u] != w for u, w in zip(legs1, legs2)):
            continue
        ok = True
        for (u, v), m in m1.items():
            a, b = sorted((vmap[u], vmap[v]))
            if m2.get((a, b), 0) != m:
                ok = False
                break
        if ok and sum(m1.values()) == sum(m2.values()):
            return True
    return False


# -- order testing ----------------------------------------------------------

def order_test(upper, lower):
    """Witness contraction showing ``upper >= lower`` in the spin-graph
    order, or ``None``.

    Searches edge subsets of the right size in canonical order and
    compares pushforwards by canonical key.
    """
    ga, gb = upper.graph, lower.graph
    if ga.genus != gb.genus or ga.n_legs != gb.n_legs:
        return None
    k = ga.n_edges - gb.n_edges
    if k < 0:
        return None
    key_b = canonical_key(lower)
    graph_key_b = canonical_key(gb)
    for subset in combinations(range(ga.n_edges), k):
        c = contract(ga, EdgeSet.from_indices(ga, subset))
        if canonical_key(c.target) != graph_key_b:
            continue
        pushed = push_spin(c, upper.spin)
        if canonical_key(SpinGraph(c.target, pushed)) == key_b:
            return c
    return None
