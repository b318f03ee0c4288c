"""Weighted multigraphs with legs, stored as half-edge structures.

A graph is a set of vertices with non-negative integer weights, a set of
half-edges with an involution and an endpoint map, and a global order on
the legs (the half-edges fixed by the involution).  Edges are unordered
pairs of half-edges swapped by the involution; loops and parallel edges
are allowed, and graphs may be disconnected.

Every graph carries a stable edge indexing: edges are sorted by their
smaller half-edge id, and bitmask-based edge sets elsewhere in the
package refer to these indices.
"""

from __future__ import annotations

import json
from functools import cached_property

from .errors import InputError


class Graph:
    """Immutable half-edge multigraph with vertex weights and ordered legs.

    Construct either directly from the half-edge data or through
    :meth:`build`, which assigns half-edge ids from an edge list.
    """

    def __init__(self, vertex_weights, endpoint, involution, legs,
                 exceptional=()):
        weight = {int(v): int(w) for v, w in dict(vertex_weights).items()}
        if not weight:
            raise InputError("a graph needs at least one vertex")
        if any(w < 0 for w in weight.values()):
            raise InputError("vertex weights must be non-negative")
        endpoint = {int(h): int(v) for h, v in dict(endpoint).items()}
        involution = {int(h): int(k) for h, k in dict(involution).items()}
        hset = set(endpoint)
        if set(involution) != hset:
            raise InputError("involution must be defined on all half-edges")
        for h, k in involution.items():
            if k not in hset or involution[k] != h:
                raise InputError("involution is not a self-inverse permutation")
        for h, v in endpoint.items():
            if v not in weight:
                raise InputError(f"half-edge {h} ends at unknown vertex {v}")
        legs = tuple(int(h) for h in legs)
        fixed = {h for h in hset if involution[h] == h}
        if set(legs) != fixed or len(legs) != len(fixed):
            raise InputError("legs must list each involution fixed point once")

        self.weight = weight
        self.endpoint = endpoint
        self.involution = involution
        self.legs = legs
        self.exceptional = frozenset(exceptional)
        self.vertices = tuple(sorted(weight))
        self.half_edges = tuple(sorted(endpoint))
        # Stable edge indexing: pairs (h, h') with h < h', sorted by h.
        self.edges = tuple(sorted(
            (h, k) for h, k in involution.items() if h < k))

    @classmethod
    def build(cls, vertices, edges, legs=(), exceptional=()):
        """Build a graph from an edge list.

        ``vertices`` is an iterable of ``(id, weight)`` pairs, ``edges`` an
        iterable of vertex pairs (loops as ``(v, v)``), ``legs`` an ordered
        iterable of vertex ids.  Half-edge ids are assigned densely: edge
        ``i`` gets half-edges ``2i`` and ``2i+1``, legs follow.
        """
        weight = dict(vertices)
        endpoint, involution = {}, {}
        h = 0
        for u, v in edges:
            endpoint[h], endpoint[h + 1] = u, v
            involution[h], involution[h + 1] = h + 1, h
            h += 2
        leg_ids = []
        for v in legs:
            endpoint[h] = v
            involution[h] = h
            leg_ids.append(h)
            h += 1
        return cls(weight, endpoint, involution, leg_ids, exceptional)

    # -- basic accessors -------------------------------------------------

    def w(self, v):
        return self.weight[v]

    @cached_property
    def _incidence(self):
        inc = {v: [] for v in self.vertices}
        for h, v in self.endpoint.items():
            inc[v].append(h)
        return {v: tuple(sorted(hs)) for v, hs in inc.items()}

    @cached_property
    def _leg_set(self):
        return frozenset(self.legs)

    def half_edges_at(self, v):
        return self._incidence[v]

    def deg(self, v):
        """Number of non-leg half-edges at ``v`` (a loop counts twice)."""
        return sum(1 for h in self._incidence[v] if h not in self._leg_set)

    def ell(self, v):
        """Number of legs ending at ``v``."""
        return sum(1 for h in self._incidence[v] if h in self._leg_set)

    def loops(self, v):
        return sum(1 for h, k in self.edges
                   if self.endpoint[h] == v and self.endpoint[k] == v)

    def leg_positions(self, v):
        """Indices in the global leg order of the legs ending at ``v``."""
        return tuple(i for i, h in enumerate(self.legs)
                     if self.endpoint[h] == v)

    def edge_vertices(self, i):
        """Endpoints of edge ``i`` as a sorted vertex pair."""
        h, k = self.edges[i]
        u, v = self.endpoint[h], self.endpoint[k]
        return (u, v) if u <= v else (v, u)

    @cached_property
    def edge_index(self):
        return {pair: i for i, pair in enumerate(self.edges)}

    @cached_property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def n_legs(self):
        return len(self.legs)

    @cached_property
    def multiplicity(self):
        """Map from sorted vertex pair to the number of parallel edges."""
        mult = {}
        for i in range(self.n_edges):
            pair = self.edge_vertices(i)
            mult[pair] = mult.get(pair, 0) + 1
        return mult

    # -- global invariants -----------------------------------------------

    @cached_property
    def components(self):
        """Connected components as sorted tuples of vertex ids.

        Isolated vertices form their own components; legs do not connect
        anything.
        """
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(self.n_edges):
            u, v = self.edge_vertices(i)
            parent[find(u)] = find(v)
        groups = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        return tuple(sorted(tuple(sorted(g)) for g in groups.values()))

    @cached_property
    def c(self):
        return len(self.components)

    @cached_property
    def is_connected(self):
        return self.c == 1

    @cached_property
    def b1(self):
        return self.n_edges - len(self.vertices) + self.c

    @cached_property
    def genus(self):
        return sum(self.weight.values()) + self.b1

    def total_weight(self):
        return sum(self.weight.values())

    # -- structural identity ----------------------------------------------

    def _ident(self):
        return (tuple(sorted(self.weight.items())),
                tuple(sorted(self.endpoint.items())),
                tuple(sorted(self.involution.items())),
                self.legs)

    def __eq__(self, other):
        return isinstance(other, Graph) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return (f"Graph(|V|={len(self.vertices)}, |E|={self.n_edges}, "
                f"|L|={self.n_legs}, g={self.genus})")

    # -- serialization ----------------------------------------------------

    def to_json_dict(self, half_edges=False):
        data = {
            "vertices": [{"id": v, "weight": self.weight[v]}
                         for v in self.vertices],
            "edges": [list(self.edge_vertices(i)) for i in range(self.n_edges)],
            "legs": [self.endpoint[h] for h in self.legs],
        }
        if half_edges:
            data["half_edges"] = {
                "endpoint": {str(h): self.endpoint[h] for h in self.half_edges},
                "involution": {str(h): self.involution[h] for h in self.half_edges},
                "legs": list(self.legs),
            }
        if self.exceptional:
            data["exceptional"] = sorted(self.exceptional)
        return data

    def to_json(self, half_edges=False):
        return json.dumps(self.to_json_dict(half_edges), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data):
        try:
            vertices = [(v["id"], v["weight"]) for v in data["vertices"]]
            exceptional = data.get("exceptional", ())
            if "half_edges" in data:
                block = data["half_edges"]
                endpoint = {int(h): v for h, v in block["endpoint"].items()}
                involution = {int(h): k for h, k in block["involution"].items()}
                return cls(vertices, endpoint, involution, block["legs"],
                           exceptional)
            return cls.build(vertices, [tuple(e) for e in data["edges"]],
                             data.get("legs", ()), exceptional)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON at offset {exc.pos}: {exc.msg}") from exc
        return cls.from_json_dict(data)

    def to_dot(self, name="G"):
        """DOT rendering with weight labels and one stub per leg."""
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            shape = ', shape=doublecircle' if v in self.exceptional else ''
            lines.append(f'  v{v} [label="{v} (w={self.weight[v]})"{shape}];')
        for i in range(self.n_edges):
            u, v = self.edge_vertices(i)
            lines.append(f'  v{u} -- v{v} [label="e{i}"];')
        for pos, h in enumerate(self.legs):
            lines.append(f'  leg{pos} [shape=none, label="leg {pos}"];')
            lines.append(f'  v{self.endpoint[h]} -- leg{pos} [style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class Divisor:
    """Integer-valued divisor on the vertices of a graph."""

    def __init__(self, graph, values):
        self.graph = graph
        self.values = {v: int(values.get(v, 0)) for v in graph.vertices}

    @property
    def degree(self):
        return sum(self.values.values())

    def __getitem__(self, v):
        return self.values[v]

    def __eq__(self, other):
        return (isinstance(other, Divisor) and self.graph == other.graph
                and self.values == other.values)

    def __repr__(self):
        return f"Divisor({self.values})"


# -- single-graph operations ----------------------------------------------

def genus(graph):
    """Total vertex weight plus first Betti number (components counted)."""
    return graph.genus


def is_stable(graph, semistable=False):
    """Connected, and ``2w(v) - 2 + deg(v) + ell(v)`` positive at every
    vertex (non-negative for the semistable variant)."""
    if not graph.is_connected:
        return False
    for v in graph.vertices:
        val = 2 * graph.w(v) - 2 + graph.deg(v) + graph.ell(v)
        if val < 0 or (val == 0 and not semistable):
            return False
    return True


def canonical_divisor(graph):
    """The divisor with value ``2w(v) - 2 + deg(v)`` at each vertex; its
    degree is ``2g - 2c``."""
    return Divisor(graph, {v: 2 * graph.w(v) - 2 + graph.deg(v)
                           for v in graph.vertices})


def _check_edge_subset(graph, edge_indices):
    idx = sorted(set(int(i) for i in edge_indices))
    if idx and (idx[0] < 0 or idx[-1] >= graph.n_edges):
        raise InputError(f"edge index out of range for graph with "
                         f"{graph.n_edges} edges: {idx}")
    return idx


def remove_edges(graph, edge_indices, open=False):
    """Remove the given edges; with ``open=True`` each removed edge leaves
    two new legs at its former endpoints.

    New legs are appended to the leg order sorted by removed-edge index,
    then by half-edge id, so the result is reproducible.
    """
    removed = _check_edge_subset(graph, edge_indices)
    involution = dict(graph.involution)
    legs = list(graph.legs)
    drop = set()
    for i in removed:
        h, k = graph.edges[i]
        if open:
            involution[h] = h
            involution[k] = k
            legs.extend(sorted((h, k)))
        else:
            drop.update((h, k))
    endpoint = {h: v for h, v in graph.endpoint.items() if h not in drop}
    for h in drop:
        del involution[h]
    return Graph(graph.weight, endpoint, involution, legs, graph.exceptional)


def blow_up(graph, edge_indices):
    """Insert a weight-0 exceptional vertex in the interior of each given
    edge; all other ids are preserved."""
    chosen = _check_edge_subset(graph, edge_indices)
    weight = dict(graph.weight)
    endpoint = dict(graph.endpoint)
    involution = dict(graph.involution)
    exceptional = set(graph.exceptional)
    next_v = max(graph.vertices) + 1
    next_h = max(graph.half_edges) + 1 if graph.half_edges else 0
    for i in chosen:
        h, k = graph.edges[i]
        mid = next_v
        next_v += 1
        weight[mid] = 0
        exceptional.add(mid)
        a, b = next_h, next_h + 1
        next_h += 2
        endpoint[a] = mid
        endpoint[b] = mid
        # split edge {h,k} into {h,a} and {b,k} through the new vertex
        involution[h], involution[a] = a, h
        involution[k], involution[b] = b, k
    return Graph(weight, endpoint, involution, graph.legs, exceptional)


class GraphClass:
    """Result of :func:`classify`."""

    def __init__(self, eulerian, three_regular, basic, vertex_classes):
        self.eulerian = eulerian
        self.three_regular = three_regular
        self.basic = basic
        self.vertex_classes = vertex_classes

    def __repr__(self):
        return (f"GraphClass(eulerian={self.eulerian}, "
                f"three_regular={self.three_regular}, basic={self.basic})")


def classify(graph):
    """Degree-parity, 3-regularity and basicness flags for a graph.

    ``eulerian`` records only the parity condition (every vertex of even
    edge-degree, legs not counted); connectivity is checked separately
    where needed.  ``basic`` asks for a connected stable graph of genus at
    least 2 with edges, even degrees, all weights at most 1, and
    ``w + deg + ell <= 4`` everywhere with equality only at vertices
    carrying a loop.  Vertex classes ``(w(v), loop(v) + w(v))`` are
    reported for basic graphs only.
    """
    eulerian = all(graph.deg(v) % 2 == 0 for v in graph.vertices)
    three_regular = (graph.total_weight() == 0 and
                     all(graph.deg(v) + graph.ell(v) == 3
                         for v in graph.vertices))
    basic = (graph.genus >= 2 and graph.n_edges > 0 and eulerian
             and is_stable(graph)
             and all(graph.w(v) <= 1 for v in graph.vertices))
    if basic:
        for v in graph.vertices:
            total = graph.w(v) + graph.deg(v) + graph.ell(v)
            if total > 4 or (total == 4 and graph.loops(v) == 0):
                basic = False
                break
    vertex_classes = None
    if basic:
        vertex_classes = {v: (graph.w(v), graph.loops(v) + graph.w(v))
                          for v in graph.vertices}
    return GraphClass(eulerian, three_regular, basic, vertex_classes)


def subgraph_on(graph, vertex_set):
    """The induced subgraph on a union of components of ``graph``.

    Only valid when no edge or leg leaves ``vertex_set``; used to take the
    pieces of a disconnected graph apart while preserving all ids.
    """
    vs = set(vertex_set)
    weight = {v: graph.weight[v] for v in vs}
    endpoint = {h: v for h, v in graph.endpoint.items() if v in vs}
    for h in endpoint:
        if graph.endpoint[graph.involution[h]] not in vs:
            raise InputError("vertex set is not a union of components")
    involution = {h: graph.involution[h] for h in endpoint}
    legs = [h for h in graph.legs if h in endpoint]
    return Graph(weight, endpoint, involution, legs,
                 graph.exceptional & vs)
