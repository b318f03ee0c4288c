"""GF(2) edge and vertex spaces, the boundary map, and cycle spaces.

Edge sets are bitmasks over a fixed graph's edge indexing; the carrier
graph is part of the value.  The cycle space is the kernel of the
boundary map, computed from a spanning forest, and its elements are
exactly the edge sets spanning subgraphs with all vertex degrees even.
"""

from __future__ import annotations

from functools import cached_property

from .errors import BudgetError, DomainError, InputError
from .graphs import remove_edges, subgraph_on

B1_CAP = 24


class EdgeSet:
    """Subset of a graph's edges, stored as a bitmask over edge indices."""

    def __init__(self, graph, mask=0):
        if mask < 0 or mask >> graph.n_edges:
            raise InputError(f"mask {mask:#x} out of range for {graph.n_edges} edges")
        self.graph = graph
        self.mask = mask

    @classmethod
    def from_indices(cls, graph, indices):
        mask = 0
        for i in indices:
            if not 0 <= i < graph.n_edges:
                raise InputError(f"edge index {i} out of range")
            mask |= 1 << i
        return cls(graph, mask)

    @classmethod
    def full(cls, graph):
        return cls(graph, (1 << graph.n_edges) - 1)

    @classmethod
    def from_hex(cls, graph, text):
        return cls(graph, int(text, 16))

    def indices(self):
        return tuple(i for i in range(self.graph.n_edges) if self.mask >> i & 1)

    def __iter__(self):
        return iter(self.indices())

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, i):
        return bool(self.mask >> i & 1)

    def __xor__(self, other):
        self._check(other)
        return EdgeSet(self.graph, self.mask ^ other.mask)

    def __or__(self, other):
        self._check(other)
        return EdgeSet(self.graph, self.mask | other.mask)

    def __and__(self, other):
        self._check(other)
        return EdgeSet(self.graph, self.mask & other.mask)

    def complement(self):
        return EdgeSet(self.graph, self.mask ^ (1 << self.graph.n_edges) - 1)

    def _check(self, other):
        if self.graph != other.graph:
            raise InputError("edge sets live over different graphs")

    def __eq__(self, other):
        return (isinstance(other, EdgeSet) and self.graph == other.graph
                and self.mask == other.mask)

    def __hash__(self):
        return hash((id(self.graph), self.mask))

    def hex(self):
        return format(self.mask, "x")

    def __repr__(self):
        return f"EdgeSet({sorted(self.indices())})"

    @cached_property
    def b1(self):
        """First Betti number of the spanned subgraph (support vertices only)."""
        idx = self.indices()
        if not idx:
            return 0
        verts = set()
        for i in idx:
            verts.update(self.graph.edge_vertices(i))
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comp = len(verts)
        for i in idx:
            u, v = self.graph.edge_vertices(i)
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                comp -= 1
        return len(idx) - len(verts) + comp

    def spanned_connected(self):
        """True when the spanned subgraph is connected (empty set: False)."""
        idx = self.indices()
        if not idx:
            return False
        verts = set()
        for i in idx:
            verts.update(self.graph.edge_vertices(i))
        return self.b1 == len(idx) - len(verts) + 1


def boundary(graph, edge_set):
    """GF(2) boundary: the set of vertices of odd degree in the spanned
    subgraph.  Loops contribute nothing."""
    odd = set()
    for i in edge_set:
        u, v = graph.edge_vertices(i)
        if u == v:
            continue
        odd.symmetric_difference_update((u, v))
    return frozenset(odd)


def is_cyclic(graph, edge_set):
    return not boundary(graph, edge_set)


def cycle_basis(graph):
    """A deterministic GF(2) basis of the cycle space.

    Built from a DFS spanning forest rooted at the smallest vertex of each
    component, exploring edges in index order; each non-forest edge
    contributes its fundamental cycle.
    """
    adj = {v: [] for v in graph.vertices}
    for i in range(graph.n_edges):
        u, v = graph.edge_vertices(i)
        adj[u].append((i, v))
        if u != v:
            adj[v].append((i, u))
    for v in adj:
        adj[v].sort()

    seen = set()
    tree_edge = set()
    # path_mask[v]: edge set of the forest path from the root to v
    path_mask = {}
    for root in graph.vertices:
        if root in seen:
            continue
        seen.add(root)
        path_mask[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for i, v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    tree_edge.add(i)
                    path_mask[v] = path_mask[u] | 1 << i
                    stack.append(v)

    basis = []
    for i in range(graph.n_edges):
        if i in tree_edge:
            continue
        u, v = graph.edge_vertices(i)
        mask = (1 << i) | path_mask[u] ^ path_mask[v]
        basis.append(EdgeSet(graph, mask))
    assert len(basis) == graph.b1
    return basis


def enumerate_cyclic(graph, cap=B1_CAP):
    """All ``2^{b1}`` elements of the cycle space, sorted by bitmask.

    Every element is re-checked against the even-degree criterion, so the
    span construction and the boundary kernel act as independent
    definitions of the same space.
    """
    if graph.b1 > cap:
        raise BudgetError(f"cycle space of size 2^{graph.b1} exceeds the "
                          f"cap 2^{cap}")
    basis = cycle_basis(graph)
    masks = {0}
    for b in basis:
        masks |= {m ^ b.mask for m in masks}
    out = [EdgeSet(graph, m) for m in sorted(masks)]
    for f in out:
        if boundary(graph, f):
            raise AssertionError(f"span member {f} fails the even-degree "
                                 f"criterion")
    return out


class PbarDecomposition:
    """The graph obtained by opening all edges outside a cyclic set, split
    into connected components.

    Components are ordered by their smallest vertex; this ordering is what
    sign vectors of spin structures refer to.
    """

    def __init__(self, graph, cyclic_set):
        if not is_cyclic(graph, cyclic_set):
            raise DomainError("decomposition requires a cyclic edge set")
        self.graph = graph
        self.cyclic_set = cyclic_set
        removed = [i for i in range(graph.n_edges) if i not in cyclic_set]
        self.pbar = remove_edges(graph, removed, open=True)
        comps = self.pbar.components
        self.vertex_sets = tuple(frozenset(c) for c in comps)
        self.components = tuple(subgraph_on(self.pbar, c) for c in comps)
        self.genera = tuple(g.genus for g in self.components)

    @property
    def c_plus(self):
        return sum(1 for g in self.genera if g > 0)

    def __len__(self):
        return len(self.components)

    def component_of(self, vertex):
        for i, vs in enumerate(self.vertex_sets):
            if vertex in vs:
                return i
        raise InputError(f"vertex {vertex} not in graph")


def pbar_decompose(graph, cyclic_set):
    """Open all edges outside ``cyclic_set`` and split into components."""
    return PbarDecomposition(graph, cyclic_set)
