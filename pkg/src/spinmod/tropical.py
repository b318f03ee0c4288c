"""Tropical and extended tropical spin curves, the cone-complex cells of
their moduli, the length-doubling forgetful map with its fibers, and
symbolic one-parameter families given by edge valuations.

Edge lengths are exact non-negative rationals extended by a single
infinity symbol; no floating point is used anywhere, so halving and
doubling round-trip exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .cycles import EdgeSet
from .errors import DomainError, InputError, VerificationError
from .graphs import Graph, is_stable
from .morphisms import automorphisms, contract, order_test, push_spin
from .posets import build_spin_poset, max_rank, poset_stats
from .spin import SpinGraph, SpinStructure, enumerate_spin


class _Infinity:
    """The single point at infinity of the extended non-negative reals."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("spinmod-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def as_length(value, positive=False):
    """Coerce to an extended non-negative rational (exact)."""
    if value is INF:
        return INF
    if isinstance(value, float):
        raise InputError("lengths must be exact rationals, not floats")
    x = Fraction(value)
    if x < 0 or (positive and x == 0):
        kind = "positive" if positive else "non-negative"
        raise InputError(f"lengths must be {kind}, got {x}")
    return x

def double(x):
    return INF if x is INF else 2 * x


def halve(x):
    return INF if x is INF else x / 2


def length_to_json(x):
    if x is INF:
        return "inf"
    return {"num": x.numerator, "den": x.denominator}


def length_from_json(obj):
    if obj == "inf":
        return INF
    try:
        return as_length(Fraction(obj["num"], obj["den"]))
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"malformed length entry {obj!r}: {exc}") from exc


class TropicalCurve:
    """A graph with an extended length per edge."""

    def __init__(self, graph, lengths):
        lengths = tuple(as_length(x) for x in lengths)
        if len(lengths) != graph.n_edges:
            raise InputError(f"expected {graph.n_edges} lengths, got "
                             f"{len(lengths)}")
        self.graph = graph
        self.lengths = lengths

    @property
    def finite(self):
        return all(x is not INF for x in self.lengths)

    @property
    def stable(self):
        return is_stable(self.graph)

    @property
    def genus(self):
        return self.graph.genus

    def __eq__(self, other):
        return (isinstance(other, TropicalCurve)
                and self.graph == other.graph
                and self.lengths == other.lengths)

    def __hash__(self):
        return hash((self.graph, self.lengths))

    def __repr__(self):
        return f"TropicalCurve(g={self.genus}, lengths={self.lengths})"

    def to_json_dict(self):
        return {"graph": self.graph.to_json_dict(),
                "lengths": [length_to_json(x) for x in self.lengths]}


class SpinTropicalCurve:
    """A tropical curve with a spin structure on its graph."""

    def __init__(self, curve, spin):
        if spin.graph != curve.graph:
            raise InputError("spin structure lives over a different graph")
        self.curve = curve
        self.spin = spin

    @property
    def graph(self):
        return self.curve.graph

    @property
    def parity(self):
        return self.spin.parity

    def __eq__(self, other):
        return (isinstance(other, SpinTropicalCurve)
                and self.curve == other.curve
                and self.spin.data() == other.spin.data())

    def __repr__(self):
        return f"SpinTropicalCurve({self.curve!r}, {self.spin!r})"

    def to_json_dict(self):
        out = self.curve.to_json_dict()
        out["spin"] = self.spin.to_json_dict()
        return out


def curve_automorphisms(curve):
    """Length-preserving automorphisms: the stabilizer of the length
    vector inside the graph's automorphism group."""
    group = automorphisms(curve.graph)
    kept = [a for a in group.elements
            if all(curve.lengths[a.edge_perm[i]] == curve.lengths[i]
                   for i in range(curve.graph.n_edges))]
    return type(group)(curve.graph, kept)


def pi_trop(spin_curve):
    """Forget the spin structure, doubling the length of every edge
    outside its cyclic set."""
    curve = spin_curve.curve
    p = spin_curve.spin.P
    lengths = [x if i in p else double(x)
               for i, x in enumerate(curve.lengths)]
    return TropicalCurve(curve.graph, lengths)


def pi_trop_fiber(curve):
    """Representatives of the spin tropical curves mapping to the given
    curve: one per orbit of the spin structures under the curve's
    automorphisms, with lengths halved outside the cyclic set.

    Every representative maps back to the input under :func:`pi_trop`.
    """
    if not curve.stable:
        raise DomainError("fibers are taken over stable curves")
    group = curve_automorphisms(curve)
    dec_cache = {}
    orbits = {}
    for s in enumerate_spin(curve.graph):
        orbit = sorted(a.act_spin(s, dec_cache).data()
                       for a in group.elements)
        orbits.setdefault(orbit[0], s)
    reps = []
    for s in orbits.values():
        lengths = [x if i in s.P else halve(x)
                   for i, x in enumerate(curve.lengths)]
        rep = SpinTropicalCurve(TropicalCurve(curve.graph, lengths), s)
        assert pi_trop(rep) == curve
        reps.append(rep)
    return reps


# -- the cone complex --------------------------------------------------------

class ConeCell:
    """A cell of the moduli cone complex: one spin class, its dimension,
    the order of the induced action on the cone coordinates, and the
    higher cells whose closures contain it."""

    def __init__(self, key, dim, parity, aut_edge_order, rep):
        self.key = key
        self.dim = dim
        self.parity = parity
        self.aut_edge_order = aut_edge_order
        self.rep = rep
        self.face_of = ()

    def __repr__(self):
        return (f"ConeCell(dim={self.dim}, parity={self.parity}, "
                f"key={self.key[:8]})")


def build_cone_complex(g, n, budget_edges=None, poset=None):
    """One cell per spin class; faces follow the poset order.

    Returns ``(cells, report)`` where the report includes the purity and
    connectivity checks (both verified here, with witnesses on failure).
    """
    if poset is None:
        poset = build_spin_poset(g, n, budget_edges)
    stats = poset_stats(poset)
    cells = []
    for nd in poset.nodes:
        group = automorphisms(nd.rep.graph, restrict="spin", spin=nd.rep.spin)
        cells.append(ConeCell(nd.key, nd.rank, nd.parity,
                              group.order_edge, nd.rep))
    ancestors = {i: set() for i in range(len(poset.nodes))}
    for i in range(len(poset.nodes)):
        for j in poset.descendants(i):
            if j != i:
                ancestors[j].add(i)
    top = max_rank(g, n)
    for j, cell in enumerate(cells):
        cell.face_of = tuple(sorted(ancestors[j]))
        if cell.dim != top and not any(cells[i].dim == top
                                       for i in cell.face_of):
            raise VerificationError(
                "cell is not a face of any top-dimensional cell",
                (cell.key,))
    report = {"cells": len(cells), "dimension": top,
              "pure": True, "components": stats["components"],
              "by_parity": {p: sum(1 for c in cells if c.parity == p)
                            for p in (0, 1)}}
    return cells, report


def cells_to_csv(cells):
    lines = ["key,dim,parity,aut_edge_order"]
    for c in cells:
        lines.append(f"{c.key},{c.dim},{c.parity},{c.aut_edge_order}")
    return "\n".join(lines) + "\n"


def cells_to_dot(cells):
    lines = ["digraph face_lattice {", "  rankdir=BT;"]
    for i, c in enumerate(cells):
        color = "blue" if c.parity == 0 else "red"
        lines.append(f'  c{i} [label="d{c.dim}\\n{c.key[:8]}", color={color}];')
    for i, c in enumerate(cells):
        for j in c.face_of:
            if cells[j].dim == c.dim + 1:
                lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- symbolic one-parameter families -----------------------------------------

class FamilyDescriptor:
    """A spin graph with a positive extended valuation per edge: the
    combinatorial shadow of a one-parameter family whose special fiber
    has the given spin structure.

    Edges of infinite valuation are the nodes persisting in the generic
    fiber.
    """

    def __init__(self, spin_graph, val):
        val = tuple(as_length(x, positive=True) for x in val)
        if len(val) != spin_graph.graph.n_edges:
            raise InputError(f"expected {spin_graph.graph.n_edges} "
                             f"valuations, got {len(val)}")
        self.spin_graph = spin_graph
        self.val = val

    @property
    def graph(self):
        return self.spin_graph.graph

    def to_json_dict(self):
        return {"graph": self.graph.to_json_dict(),
                "spin": self.spin_graph.spin.to_json_dict(),
                "val": [length_to_json(x) for x in self.val]}

    @classmethod
    def from_json_dict(cls, data):
        try:
            graph = Graph.from_json_dict(data["graph"])
            spin = SpinStructure.from_json_dict(graph, data["spin"])
            val = [length_from_json(x) for x in data["val"]]
        except KeyError as exc:
            raise InputError(f"family descriptor missing field {exc}") from exc
        return cls(SpinGraph(graph, spin), val)


def trop_family(family):
    """Tropicalize: read the valuations as edge lengths of an extended
    spin tropical curve with the family's spin structure."""
    return SpinTropicalCurve(
        TropicalCurve(family.graph, family.val), family.spin_graph.spin)


def family_stable_model(family):
    """Tropical curve of the family's stable model: valuations double
    exactly on the edges outside the cyclic set (the blown-up nodes)."""
    p = family.spin_graph.spin.P
    lengths = [x if i in p else double(x) for i, x in enumerate(family.val)]
    return TropicalCurve(family.graph, lengths)


def diagram_check(family):
    """Tropicalizing then forgetting equals taking the stable model then
    tropicalizing.  True by construction; kept as a tautology guard."""
    return pi_trop(trop_family(family)) == family_stable_model(family)


def family_generic_fiber(family):
    """Spin graph of the generic fiber: contract the edges of finite
    valuation and push the spin structure forward.

    Returns a dict with the generic spin graph, the dual contraction, and
    an independently searched witness that the special class dominates
    the generic one in the spin order.
    """
    finite = [i for i, x in enumerate(family.val) if x is not INF]
    c = contract(family.graph, EdgeSet.from_indices(family.graph, finite))
    pushed = push_spin(c, family.spin_graph.spin)
    generic = SpinGraph(c.target, pushed)
    witness = order_test(family.spin_graph, generic)
    assert witness is not None
    return {"generic": generic, "contraction": c, "witness": witness}
