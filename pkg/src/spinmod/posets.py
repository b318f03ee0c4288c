"""Isomorphism-free enumeration of stable graphs, cyclic pairs and spin
graphs of fixed genus and leg count, with their graded poset structure.

Enumeration seeds all 3-regular classes by degree-sequence backtracking
with canonical-key dedup, then closes downward under single-edge
contractions.  An independent direct generator (vertex counts, weight
compositions, multigraph fill) cross-checks the closure on small cases.
"""

from __future__ import annotations

import os
from collections import Counter, defaultdict
from itertools import combinations_with_replacement, product

from .cycles import enumerate_cyclic
from .errors import BudgetError, VerificationError
from .graphs import Graph, is_stable
from .morphisms import (automorphisms, canonical_key, contract,
                        cyclic_canonical_key, push_cycle, push_spin)
from .spin import SpinGraph, enumerate_spin

BUDGET_ENV = "SPINMOD_BUDGET"


def max_rank(g, n):
    return 3 * g - 3 + n


def check_budget(g, n, budget_edges=None):
    """Desk-scale guard: leg-free graphs up to genus 4, legged up to
    genus 3, unless an explicit edge budget (argument or environment
    variable) says otherwise."""
    if budget_edges is None and os.environ.get(BUDGET_ENV):
        budget_edges = int(os.environ[BUDGET_ENV])
    if budget_edges is not None:
        if max_rank(g, n) > budget_edges:
            raise BudgetError(
                f"enumeration at ({g},{n}) needs {max_rank(g, n)} edges, "
                f"budget allows {budget_edges}")
        return
    if (n == 0 and g > 4) or (n > 0 and g > 3):
        raise BudgetError(f"enumeration at ({g},{n}) exceeds the default "
                          f"desk-scale budget")


def _multigraphs_with_degrees(deg):
    """All edge multisets realizing the degree sequence, each exactly once
    (edges at the smallest open vertex are chosen with non-decreasing
    partners)."""
    k = len(deg)
    rem = list(deg)
    edges = []
    out = []

    def rec(cur, min_j):
        i = next((x for x in range(k) if rem[x] > 0), None)
        if i is None:
            out.append(list(edges))
            return
        lo = min_j if i == cur else i
        for j in range(lo, k):
            if j == i:
                if rem[i] < 2:
                    continue
                rem[i] -= 2
            else:
                if rem[i] < 1 or rem[j] < 1:
                    continue
                rem[i] -= 1
                rem[j] -= 1
            edges.append((i, j))
            rec(i, j)
            edges.pop()
            if j == i:
                rem[i] += 2
            else:
                rem[i] += 1
                rem[j] += 1

    rec(-1, 0)
    return out


def three_regular_graphs(g, n):
    """All 3-regular classes: weightless, every vertex of total degree 3
    counting legs."""
    k = 2 * g - 2 + n
    if k <= 0:
        return []
    found = {}
    for assign in product(range(k), repeat=n):
        ell = Counter(assign)
        deg = [3 - ell.get(v, 0) for v in range(k)]
        if any(d < 0 for d in deg):
            continue
        for edges in _multigraphs_with_degrees(deg):
            graph = Graph.build([(v, 0) for v in range(k)], edges, assign)
            if not graph.is_connected:
                continue
            key = canonical_key(graph)
            found.setdefault(key, graph)
    return [found[key] for key in sorted(found)]


def enumerate_stable_graphs(g, n, budget_edges=None):
    """All stable classes of genus g with n legs, by downward closure of
    the 3-regular seeds under single-edge contractions.

    Returns representatives sorted by canonical key; empty when no stable
    graph exists.
    """
    if 2 * g - 2 + n <= 0:
        return []
    check_budget(g, n, budget_edges)
    reps = {canonical_key(s): s for s in three_regular_graphs(g, n)}
    frontier = list(reps.values())
    while frontier:
        fresh = []
        for graph in frontier:
            for i in range(graph.n_edges):
                target = contract(graph, [i]).target
                key = canonical_key(target)
                if key not in reps:
                    assert is_stable(target)
                    reps[key] = target
                    fresh.append(target)
        frontier = fresh
    return [reps[key] for key in sorted(reps)]


def stable_graphs_direct(g, n, budget_edges=None):
    """Independent generator: all vertex counts, weight compositions and
    edge multisets, filtered by stability.  Exponential; used to
    cross-check the closure on the smallest cases."""
    if 2 * g - 2 + n <= 0:
        return []
    check_budget(g, n, budget_edges)
    found = {}
    for k in range(1, 2 * g - 2 + n + 1):
        pairs = [(i, j) for i in range(k) for j in range(i, k)]
        for weights in product(range(g + 1), repeat=k):
            total = sum(weights)
            if total > g:
                continue
            n_edges = g - total + k - 1
            if n_edges < 0:
                continue
            for legs in product(range(k), repeat=n):
                for edges in combinations_with_replacement(pairs, n_edges):
                    graph = Graph.build(list(enumerate(weights)), edges, legs)
                    if not is_stable(graph):
                        continue
                    found.setdefault(canonical_key(graph), graph)
    return [found[key] for key in sorted(found)]


class PosetNode:
    """One isomorphism class in a moduli poset."""

    def __init__(self, key, rank, rep, parity=None):
        self.key = key
        self.rank = rank
        self.rep = rep
        self.parity = parity

    def __repr__(self):
        tag = "" if self.parity is None else f", parity={self.parity}"
        return f"PosetNode(rank={self.rank}{tag}, key={self.key[:8]})"


class Poset:
    """Graded poset with covers between consecutive ranks."""

    def __init__(self, kind, g, n, nodes, covers):
        self.kind = kind
        self.g = g
        self.n = n
        self.nodes = tuple(nodes)
        self.covers = tuple(sorted(set(covers)))
        self.index = {node.key: i for i, node in enumerate(self.nodes)}

    def __len__(self):
        return len(self.nodes)

    @property
    def lower_of(self):
        below = defaultdict(set)
        for u, l in self.covers:
            below[u].add(l)
        return below

    def descendants(self, i):
        """Everything reachable downward from node i, including i."""
        below = self.lower_of
        seen = {i}
        stack = [i]
        while stack:
            x = stack.pop()
            for y in below[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def leq(self, i, j):
        """True when node j lies below node i in the order."""
        return j in self.descendants(i)

    def components(self):
        parent = list(range(len(self.nodes)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, l in self.covers:
            parent[find(u)] = find(l)
        groups = defaultdict(list)
        for i in range(len(self.nodes)):
            groups[find(i)].append(i)
        return sorted(sorted(g) for g in groups.values())

    def rank_histogram(self):
        hist = Counter(node.rank for node in self.nodes)
        return {r: hist[r] for r in sorted(hist)}

    def to_json_dict(self, with_reps=False):
        nodes = []
        for node in self.nodes:
            entry = {"key": node.key, "rank": node.rank}
            if node.parity is not None:
                entry["parity"] = node.parity
            if with_reps:
                entry.update(_rep_json(self.kind, node.rep))
            nodes.append(entry)
        return {"kind": self.kind, "g": self.g, "n": self.n,
                "nodes": nodes, "covers": [list(c) for c in self.covers]}

    def to_dot(self):
        lines = [f"digraph {self.kind}_poset {{", "  rankdir=BT;"]
        for i, node in enumerate(self.nodes):
            color = {0: "blue", 1: "red", None: "black"}[node.parity]
            lines.append(
                f'  n{i} [label="r{node.rank}\\n{node.key[:8]}", '
                f'color={color}];')
        for u, l in self.covers:
            lines.append(f"  n{l} -> n{u};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _rep_json(kind, rep):
    if kind == "graphs":
        return {"graph": rep.to_json_dict()}
    if kind == "cyclic":
        graph, cyc = rep
        return {"graph": graph.to_json_dict(), "P": cyc.hex()}
    return {"graph": rep.graph.to_json_dict(),
            "spin": rep.spin.to_json_dict()}


def build_graph_poset(g, n, budget_edges=None, _classes=None):
    classes = (_classes if _classes is not None
               else enumerate_stable_graphs(g, n, budget_edges))
    nodes = [PosetNode(canonical_key(rep), rep.n_edges, rep)
             for rep in classes]
    nodes.sort(key=lambda nd: (nd.rank, nd.key))
    index = {nd.key: i for i, nd in enumerate(nodes)}
    covers = []
    for i, nd in enumerate(nodes):
        for e in range(nd.rep.n_edges):
            target = contract(nd.rep, [e]).target
            covers.append((i, index[canonical_key(target)]))
    return Poset("graphs", g, n, nodes, covers)


def build_cyclic_poset(g, n, budget_edges=None, _classes=None):
    classes = (_classes if _classes is not None
               else enumerate_stable_graphs(g, n, budget_edges))
    nodes = []
    for rep in classes:
        group = automorphisms(rep)
        orbits = {}
        for p in enumerate_cyclic(rep):
            orbit = sorted(a.act_mask(p.mask) for a in group.elements)
            orbits.setdefault(orbit[0], p)
        for p in orbits.values():
            nodes.append(PosetNode(cyclic_canonical_key(rep, p),
                                   rep.n_edges, (rep, p)))
    nodes.sort(key=lambda nd: (nd.rank, nd.key))
    index = {nd.key: i for i, nd in enumerate(nodes)}
    covers = []
    for i, nd in enumerate(nodes):
        rep, p = nd.rep
        for e in range(rep.n_edges):
            c = contract(rep, [e])
            key = cyclic_canonical_key(c.target, push_cycle(c, p))
            covers.append((i, index[key]))
    return Poset("cyclic", g, n, nodes, covers)


def build_spin_poset(g, n, budget_edges=None, _classes=None):
    classes = (_classes if _classes is not None
               else enumerate_stable_graphs(g, n, budget_edges))
    nodes = []
    for rep in classes:
        group = automorphisms(rep)
        dec_cache = {}
        orbits = {}
        for s in enumerate_spin(rep):
            orbit = sorted(a.act_spin(s, dec_cache).data()
                           for a in group.elements)
            orbits.setdefault(orbit[0], s)
        for s in orbits.values():
            nodes.append(PosetNode(canonical_key(SpinGraph(rep, s)),
                                   rep.n_edges, SpinGraph(rep, s),
                                   parity=s.parity))
    nodes.sort(key=lambda nd: (nd.rank, nd.key))
    index = {nd.key: i for i, nd in enumerate(nodes)}
    covers = []
    for i, nd in enumerate(nodes):
        sg = nd.rep
        for e in range(sg.graph.n_edges):
            c = contract(sg.graph, [e])
            pushed = push_spin(c, sg.spin)
            key = canonical_key(SpinGraph(c.target, pushed))
            covers.append((i, index[key]))
    return Poset("spin", g, n, nodes, covers)


def poset_stats(poset):
    """Connectivity, gradedness, rank histogram and minimum checks.

    For spin posets: two components matching the parity classes when the
    genus is positive, one otherwise, each containing its unique rank-0
    node.  Raises :class:`VerificationError` with a witness on any
    violated claim.
    """
    comps = poset.components()
    hist = poset.rank_histogram()

    for u, l in poset.covers:
        if poset.nodes[u].rank != poset.nodes[l].rank + 1:
            raise VerificationError(
                "cover between non-consecutive ranks",
                (poset.nodes[u].key, poset.nodes[l].key))
    if poset.nodes:
        ranks = sorted(hist)
        if ranks[0] != 0 or ranks[-1] != max_rank(poset.g, poset.n):
            raise VerificationError(
                f"rank range {ranks[0]}..{ranks[-1]} differs from "
                f"0..{max_rank(poset.g, poset.n)}")

    report = {"kind": poset.kind, "g": poset.g, "n": poset.n,
              "nodes": len(poset.nodes), "covers": len(poset.covers),
              "components": len(comps), "graded": True,
              "rank_histogram": hist}

    if poset.kind == "spin":
        expected = 2 if poset.g > 0 else 1
        if len(comps) != expected:
            raise VerificationError(
                f"spin poset has {len(comps)} components, expected "
                f"{expected}", tuple(poset.nodes[c[0]].key for c in comps))
        parities = []
        for comp in comps:
            pset = {poset.nodes[i].parity for i in comp}
            if len(pset) != 1:
                raise VerificationError(
                    "component mixes parities",
                    tuple(poset.nodes[i].key for i in comp[:2]))
            parities.append(pset.pop())
            mins = [i for i in comp if poset.nodes[i].rank == 0]
            if len(mins) != 1:
                raise VerificationError(
                    f"component has {len(mins)} rank-0 nodes",
                    tuple(poset.nodes[i].key for i in comp[:2]))
            bottom = poset.nodes[mins[0]].rep
            if bottom.graph.n_edges or bottom.spin.P.mask:
                raise VerificationError(
                    "rank-0 node is not the edgeless spin graph",
                    (poset.nodes[mins[0]].key,))
        report["per_parity_components"] = sorted(
            (p, 1) for p in parities) if poset.g > 0 else [(0, 1)]
        report["parity_split"] = {
            p: sum(1 for nd in poset.nodes if nd.parity == p)
            for p in (0, 1)}
    else:
        if len(comps) != 1:
            raise VerificationError(
                f"{poset.kind} poset is disconnected "
                f"({len(comps)} components)")
    return report
