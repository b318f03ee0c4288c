"""Spin structures on graphs: enumeration, counting identities, theta
divisors, stratum counts, and the refinement construction.

A spin structure is a cyclic edge set together with a sign on each
connected component of the graph obtained by opening the complementary
edges; signs vanish on genus-0 components.  The parity of the sign sum
is invariant under pushforward and splits everything in two.
"""

from __future__ import annotations

from itertools import combinations, product
from math import prod

from .cycles import (B1_CAP, EdgeSet, enumerate_cyclic, pbar_decompose)
from .errors import DomainError, InputError, VerificationError
from .graphs import Divisor, Graph, canonical_divisor, classify, is_stable


class SpinStructure:
    """A cyclic edge set plus a sign per component of the opened graph.

    Signs are indexed by the component order of the decomposition
    (components sorted by smallest vertex).
    """

    def __init__(self, graph, cyclic_set, signs, _dec=None):
        if cyclic_set.graph != graph:
            raise InputError("cyclic set lives over a different graph")
        self.graph = graph
        self.P = cyclic_set
        self.dec = _dec if _dec is not None else pbar_decompose(graph, cyclic_set)
        signs = tuple(int(s) for s in signs)
        if len(signs) != len(self.dec):
            raise DomainError(
                f"expected {len(self.dec)} signs, got {len(signs)}")
        if any(s not in (0, 1) for s in signs):
            raise InputError("signs must be 0 or 1")
        for s, g in zip(signs, self.dec.genera):
            if s and g == 0:
                raise DomainError("sign must vanish on genus-0 components")
        self.signs = signs
        self.parity = sum(signs) & 1

    def sign_at_vertex(self, v):
        return self.signs[self.dec.component_of(v)]

    def validate(self):
        """Recompute the stored parity and component constraints."""
        assert self.parity == sum(self.signs) & 1
        for s, g in zip(self.signs, self.dec.genera):
            assert not (s and g == 0)

    def data(self):
        """Hashable (mask, signs) pair for orbit computations."""
        return (self.P.mask, self.signs)

    def __eq__(self, other):
        return (isinstance(other, SpinStructure)
                and self.graph == other.graph and self.data() == other.data())

    def __hash__(self):
        return hash((id(self.graph), self.data()))

    def __repr__(self):
        return f"SpinStructure(P={sorted(self.P.indices())}, s={self.signs})"

    def to_json_dict(self):
        return {
            "P": self.P.hex(),
            "sign": [{"component": i, "s": s} for i, s in enumerate(self.signs)],
            "parity": self.parity,
        }

    @classmethod
    def from_json_dict(cls, graph, data):
        try:
            mask = int(data["P"], 16)
            entries = sorted(data["sign"], key=lambda e: e["component"])
            signs = [e["s"] for e in entries]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed spin structure JSON: {exc}") from exc
        spin = cls(graph, EdgeSet(graph, mask), signs)
        if "parity" in data and int(data["parity"]) != spin.parity:
            raise InputError("stored parity disagrees with the sign sum")
        return spin


class SpinGraph:
    """A graph together with a spin structure on it."""

    def __init__(self, graph, spin):
        if spin.graph != graph:
            raise InputError("spin structure lives over a different graph")
        self.graph = graph
        self.spin = spin

    @property
    def parity(self):
        return self.spin.parity

    @property
    def genus(self):
        return self.graph.genus

    def __eq__(self, other):
        return (isinstance(other, SpinGraph) and self.graph == other.graph
                and self.spin == other.spin)

    def __hash__(self):
        return hash((self.graph, self.spin.data()))

    def __repr__(self):
        return f"SpinGraph({self.graph!r}, {self.spin!r})"


def trivial_spin(graph):
    """The all-zero spin structure (0, s_0)."""
    return SpinStructure(graph, EdgeSet(graph, 0), (0,) * len(
        pbar_decompose(graph, EdgeSet(graph, 0))))


def spin_structures_over(graph, cyclic_set, _dec=None):
    """All sign assignments over a fixed cyclic set, in sign order."""
    dec = _dec if _dec is not None else pbar_decompose(graph, cyclic_set)
    free = [i for i, g in enumerate(dec.genera) if g > 0]
    out = []
    for bits in product((0, 1), repeat=len(free)):
        signs = [0] * len(dec)
        for i, b in zip(free, bits):
            signs[i] = b
        out.append(SpinStructure(graph, cyclic_set, tuple(signs), _dec=dec))
    return out


def enumerate_spin(graph, cap=B1_CAP):
    """All spin structures on the graph, sorted by (mask, signs)."""
    out = []
    for p in enumerate_cyclic(graph, cap=cap):
        out.extend(spin_structures_over(graph, p))
    out.sort(key=lambda s: s.data())
    return out


def partition_by_parity(structures):
    """Split a list of spin structures into (even, odd)."""
    even = [s for s in structures if s.parity == 0]
    odd = [s for s in structures if s.parity == 1]
    return even, odd


def spin_count_check(graph, cap=B1_CAP):
    """Cross-check the closed count of spin structures against direct
    enumeration, including the parity split and the lower bound.

    Returns a report dict; raises :class:`VerificationError` on any
    mismatch, naming the offending graph and cyclic set.
    """
    def witness(p=None):
        from .morphisms import canonical_key
        key = canonical_key(graph)
        return (key,) if p is None else (key, f"P={p.hex()}")

    weightless = graph.total_weight() == 0
    per_cyclic = []
    total = even = odd = 0
    tight_expected = weightless
    for p in enumerate_cyclic(graph, cap=cap):
        dec = pbar_decompose(graph, p)
        structures = spin_structures_over(graph, p, _dec=dec)
        n_even = sum(1 for s in structures if s.parity == 0)
        n_odd = len(structures) - n_even
        if len(structures) != 2 ** dec.c_plus:
            raise VerificationError(
                f"count over P is {len(structures)}, formula gives "
                f"2^{dec.c_plus}", witness(p))
        if p.mask == 0 and weightless:
            expect = (1, 0)
        else:
            expect = (2 ** (dec.c_plus - 1), 2 ** (dec.c_plus - 1))
        if (n_even, n_odd) != expect:
            raise VerificationError(
                f"parity split ({n_even}, {n_odd}) differs from {expect}",
                witness(p))
        if p.mask != 0 and dec.c_plus != 1:
            tight_expected = False
        per_cyclic.append({"P": p.hex(), "c_plus": dec.c_plus,
                           "count": len(structures),
                           "even": n_even, "odd": n_odd})
        total += len(structures)
        even += n_even
        odd += n_odd

    lower_bound = 2 ** (graph.b1 + 1) - 1
    if total < lower_bound:
        raise VerificationError(
            f"total {total} is below the lower bound {lower_bound}", witness())
    if (total == lower_bound) != tight_expected:
        raise VerificationError(
            f"bound tightness mismatch: total={total}, bound={lower_bound}, "
            f"characterization predicts tight={tight_expected}", witness())
    return {
        "total": total, "even": even, "odd": odd,
        "lower_bound": lower_bound, "bound_tight": total == lower_bound,
        "per_cyclic": per_cyclic,
    }


class ThetaDivisor:
    """Half-canonical divisor on the opened graph, extended to the
    tropical side by a unit at the midpoint of every complementary edge."""

    def __init__(self, graph, cyclic_set, vertex_divisor, midpoint_edges):
        self.graph = graph
        self.cyclic_set = cyclic_set
        self.vertex_divisor = vertex_divisor
        self.midpoint_edges = midpoint_edges

    @property
    def degree(self):
        return self.vertex_divisor.degree + len(self.midpoint_edges)

    def value(self, point):
        """Value at ``("vertex", v)`` or ``("midpoint", edge_index)``."""
        kind, x = point
        if kind == "vertex":
            return self.vertex_divisor[x]
        if kind == "midpoint":
            return 1 if x in self.midpoint_edges else 0
        raise InputError(f"unknown point kind {kind!r}")


def theta_divisors(graph, cyclic_set):
    """The divisor ``w(v) - 1 + deg(v)/2`` on the opened graph, plus its
    tropical extension.  Twice the vertex divisor is the canonical divisor
    of the opened graph, and the total degree is ``g - c``."""
    dec = pbar_decompose(graph, cyclic_set)
    pbar = dec.pbar
    values = {}
    for v in pbar.vertices:
        d = pbar.deg(v)
        assert d % 2 == 0
        values[v] = pbar.w(v) - 1 + d // 2
    div = Divisor(pbar, values)
    k = canonical_divisor(pbar)
    for v in pbar.vertices:
        if 2 * div[v] != k[v]:
            raise VerificationError(
                f"doubled theta value {2 * div[v]} differs from the "
                f"canonical divisor value {k[v]} at vertex {v}")
    midpoints = tuple(i for i in range(graph.n_edges) if i not in cyclic_set)
    theta = ThetaDivisor(graph, cyclic_set, div, midpoints)
    if theta.degree != graph.genus - graph.c:
        raise VerificationError(
            f"theta degree {theta.degree} differs from g - c = "
            f"{graph.genus - graph.c}")
    return theta


class StratumCount:
    """Point counts and lengths of the boundary strata over one graph."""

    def __init__(self, graph, rows, grand_total):
        self.graph = graph
        self.rows = rows
        self.grand_total = grand_total


def stratum_counts(graph, cap=B1_CAP):
    """Per cyclic set: ``2^{b1(P) + 2|w|}`` points of length
    ``2^{b - b1(P)}`` each; the grand total must be ``2^{2g}``.

    When the spanned subgraph of P is connected with positive Betti
    number, the points split evenly between the two parities.
    """
    if not is_stable(graph):
        raise DomainError("stratum counts are defined for stable graphs")
    b = graph.b1
    w_total = graph.total_weight()
    g = graph.genus
    rows = []
    grand = 0
    for p in enumerate_cyclic(graph, cap=cap):
        points = 2 ** (p.b1 + 2 * w_total)
        length = 2 ** (b - p.b1)
        total = points * length
        if total != 2 ** (b + 2 * w_total):
            raise VerificationError(
                f"stratum total {total} differs from 2^(b + 2|w|)",
                (f"P={p.hex()}",))
        split = None
        if p.b1 != 0 and p.spanned_connected():
            split = (points // 2, points // 2)
        rows.append({"P": p.hex(), "b1_P": p.b1, "points": points,
                     "length": length, "total": total, "parity_split": split})
        grand += total
    if grand != 2 ** (2 * g):
        raise VerificationError(
            f"grand total {grand} differs from 2^(2g) = {2 ** (2 * g)}")
    return StratumCount(graph, rows, grand)


def h0_general(spin_graph):
    """Number of independent sections on a general spin curve with this
    combinatorial type: the integer sum of the signs."""
    if not is_stable(spin_graph.graph):
        raise DomainError("h0 is defined over stable spin graphs")
    return sum(spin_graph.spin.signs)


def g_collections(graph):
    """Index sets of the ramification-point choices on a basic graph.

    Each positive-genus vertex contributes two choices if weightless and
    four if of weight one; the product counts the odd theta
    characteristics when there are at least two vertices.
    """
    cls = classify(graph)
    if not cls.basic:
        raise DomainError("collections are defined for basic graphs only")
    index_sets = {}
    for v in graph.vertices:
        if graph.w(v) + graph.loops(v) == 0:
            continue
        index_sets[v] = (1, 2) if graph.w(v) == 0 else (1, 2, 3, 4)
    return {"index_sets": index_sets,
            "count": prod(len(s) for s in index_sets.values())}


# -- refinement of non-basic Eulerian graphs --------------------------------

def _split_vertex(graph, v, to_new, w_new, leg_positions_new):
    """Split ``v`` in two: a fresh vertex takes the half-edges in
    ``to_new``, weight ``w_new`` and the listed legs, and a new edge joins
    it to ``v``.  Returns the split graph; contracting the last edge gives
    back ``graph``."""
    weight = dict(graph.weight)
    new_v = max(graph.vertices) + 1
    weight[v] -= w_new
    weight[new_v] = w_new
    endpoint = dict(graph.endpoint)
    for h in to_new:
        endpoint[h] = new_v
    for pos in leg_positions_new:
        endpoint[graph.legs[pos]] = new_v
    a = max(graph.half_edges) + 1
    b = a + 1
    endpoint[a], endpoint[b] = v, new_v
    involution = dict(graph.involution)
    involution[a], involution[b] = b, a
    return Graph(weight, endpoint, involution, graph.legs,
                 graph.exceptional), new_v, (a, b)


def _refinement_candidates(graph, v):
    """Vertex splits at ``v``, in a fixed canonical order."""
    legs = set(graph.legs)
    hs = sorted(h for h in graph.half_edges_at(v) if h not in legs)
    leg_pos = graph.leg_positions(v)
    for h1, h2 in combinations(hs, 2):
        rest = [h for h in hs if h not in (h1, h2)]
        for pick in range(2 ** len(rest)):
            to_new = [h2] + [h for j, h in enumerate(rest) if pick >> j & 1]
            for w_new in range(graph.w(v) + 1):
                for lp in range(2 ** len(leg_pos)):
                    moved = [p for j, p in enumerate(leg_pos) if lp >> j & 1]
                    yield to_new, w_new, moved


def refine_nonbasic(graph, sign):
    """Split one vertex of a non-basic Eulerian stable graph so that the
    given full spin structure lifts uniquely.

    Returns ``(refined_spin_graph, witness)`` where the witness contracts
    the new edge back onto the input graph.  The refined graph has one
    more edge, the same Betti number, pushes forward to the input spin
    structure under every contraction onto it, carries no other spin
    structure doing so, and every automorphism of it preserves the lifted
    structure.  All candidates are tried in canonical order and verified
    against those postconditions; the first success wins.
    """
    from . import morphisms  # deferred: morphisms builds on this module

    cls = classify(graph)
    if cls.basic:
        raise DomainError("refinement applies to non-basic graphs")
    if not (is_stable(graph) and cls.eulerian and graph.genus >= 2
            and graph.n_edges > 0):
        raise DomainError("refinement needs a stable Eulerian graph of "
                          "genus at least 2 with edges")
    if sign not in (0, 1):
        raise InputError("sign must be 0 or 1")

    target = SpinGraph(graph, SpinStructure(
        graph, EdgeSet.full(graph), (sign,)))
    target_key = morphisms.canonical_key(target)
    graph_key = morphisms.canonical_key(graph)

    tried = 0
    for v in sorted(graph.vertices):
        for to_new, w_new, moved in _refinement_candidates(graph, v):
            tried += 1
            split, new_v, _ = _split_vertex(graph, v, to_new, w_new, moved)
            if not split.is_connected or not is_stable(split):
                continue
            result = _verify_refinement(split, graph, graph_key, target_key,
                                        sign, morphisms)
            if result is not None:
                return result
    raise VerificationError(
        f"no refinement found after {tried} candidates", (graph_key,))


def _verify_refinement(split, graph, graph_key, target_key, sign, morphisms):
    new_edge = split.n_edges - 1  # the joining edge has the largest half-edges
    odd = [v for v in split.vertices if split.deg(v) % 2]
    if odd:
        if len(odd) != 2:
            return None
        p_mask = ((1 << split.n_edges) - 1) ^ (1 << new_edge)
    else:
        p_mask = (1 << split.n_edges) - 1
    p_set = EdgeSet(split, p_mask)
    dec = pbar_decompose(split, p_set)
    free = [i for i, g in enumerate(dec.genera) if g > 0]

    back = morphisms.contract(split, EdgeSet.from_indices(split, [new_edge]))
    if morphisms.canonical_key(back.target) != graph_key:
        return None

    for bits in product((0, 1), repeat=len(free)):
        signs = [0] * len(dec)
        for i, b in zip(free, bits):
            signs[i] = b
        if sum(signs) & 1 != sign:
            continue
        candidate = SpinStructure(split, p_set, tuple(signs), _dec=dec)
        if _refinement_postconditions(split, candidate, graph, graph_key,
                                      target_key, back, morphisms):
            return SpinGraph(split, candidate), back
    return None


def _refinement_postconditions(split, candidate, graph, graph_key,
                               target_key, back, morphisms):
    if split.n_edges != graph.n_edges + 1 or split.b1 != graph.b1:
        return None
    # every contraction of the split graph onto the input must push the
    # candidate onto the target structure, and no other structure may
    # push onto it under any such contraction
    contractions_to_graph = []
    for f in range(split.n_edges):
        c = morphisms.contract(split, EdgeSet.from_indices(split, [f]))
        if morphisms.canonical_key(c.target) == graph_key:
            contractions_to_graph.append(c)
    if not contractions_to_graph:
        return None
    for c in contractions_to_graph:
        pushed = morphisms.push_spin(c, candidate)
        if morphisms.canonical_key(
                SpinGraph(c.target, pushed)) != target_key:
            return None
    lifts = set()
    for other in enumerate_spin(split):
        for c in contractions_to_graph:
            pushed = morphisms.push_spin(c, other)
            if morphisms.canonical_key(
                    SpinGraph(c.target, pushed)) == target_key:
                lifts.add(other.data())
                break
    if lifts != {candidate.data()}:
        return None
    full = morphisms.automorphisms(split)
    fixing = morphisms.automorphisms(split, restrict="spin", spin=candidate)
    if full.order != fixing.order:
        return None
    return True
