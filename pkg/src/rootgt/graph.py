"""Concrete graphs with partial node labelling and partial rootedness.

A node carries a label (a string, or ``None`` when undefined) and a
rootedness flag (``1``, ``0`` or ``None`` when undefined).  Edges always carry
a label.  Node ids and edge ids are non-negative integers; the two id spaces
are independent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional

Label = Optional[str]
Rootedness = Optional[int]


class GraphError(ValueError):
    """Raised when graph data breaks a structural invariant."""


class Edge(NamedTuple):
    src: int
    tgt: int
    label: str


@dataclass(frozen=True)
class LabelAlphabet:
    """Finite node and edge label sets with their non-terminal subsets."""

    node_labels: frozenset = frozenset()
    edge_labels: frozenset = frozenset()
    nonterminal_nodes: frozenset = frozenset()
    nonterminal_edges: frozenset = frozenset()

    def __post_init__(self):
        for name in ("node_labels", "edge_labels", "nonterminal_nodes", "nonterminal_edges"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if not self.nonterminal_nodes <= self.node_labels:
            raise GraphError("non-terminal node labels must belong to the node alphabet")
        if not self.nonterminal_edges <= self.edge_labels:
            raise GraphError("non-terminal edge labels must belong to the edge alphabet")

    def union(self, other: "LabelAlphabet") -> "LabelAlphabet":
        return LabelAlphabet(
            self.node_labels | other.node_labels,
            self.edge_labels | other.edge_labels,
            self.nonterminal_nodes | other.nonterminal_nodes,
            self.nonterminal_edges | other.nonterminal_edges,
        )


class _Store:
    """Shared read-only view over the dict-based layout.

    Both the immutable :class:`Graph` and the mutable
    :class:`rootgt.hostgraph.HostGraph` use this layout, so the matcher can
    run unchanged on either of them.
    """

    __slots__ = ("_lab", "_root", "_src", "_tgt", "_elab", "_out", "_in", "_next_node", "_next_edge")

    # -- nodes -------------------------------------------------------------
    @property
    def nodes(self) -> tuple:
        return tuple(sorted(self._lab))

    @property
    def edges(self) -> tuple:
        return tuple(sorted(self._src))

    def has_node(self, v: int) -> bool:
        return v in self._lab

    def has_edge(self, e: int) -> bool:
        return e in self._src

    def label(self, v: int) -> Label:
        return self._lab[v]

    def rootedness(self, v: int) -> Rootedness:
        return self._root[v]

    def is_root(self, v: int) -> bool:
        return self._root[v] == 1

    # -- edges -------------------------------------------------------------
    def source(self, e: int) -> int:
        return self._src[e]

    def target(self, e: int) -> int:
        return self._tgt[e]

    def edge_label(self, e: int) -> str:
        return self._elab[e]

    def edge(self, e: int) -> Edge:
        return Edge(self._src[e], self._tgt[e], self._elab[e])

    def out_edges(self, v: int) -> tuple:
        return tuple(self._out[v])

    def in_edges(self, v: int) -> tuple:
        return tuple(self._in[v])

    def indegree(self, v: int) -> int:
        return len(self._in[v])

    def outdegree(self, v: int) -> int:
        return len(self._out[v])

    # -- sizes -------------------------------------------------------------
    @property
    def node_count(self) -> int:
        return len(self._lab)

    @property
    def edge_count(self) -> int:
        return len(self._src)

    @property
    def size(self) -> int:
        """``|V| + |E|``."""
        return len(self._lab) + len(self._src)

    @property
    def next_node_id(self) -> int:
        return self._next_node

    @property
    def next_edge_id(self) -> int:
        return self._next_edge

    def root_nodes(self) -> tuple:
        return tuple(v for v in sorted(self._root) if self._root[v] == 1)

    def is_totally_labelled(self) -> bool:
        return all(lab is not None for lab in self._lab.values())

    def is_totally_rooted(self) -> bool:
        return all(r is not None for r in self._root.values())

    def is_tlrg(self) -> bool:
        return self.is_totally_labelled() and self.is_totally_rooted()

    def node_items(self) -> Iterator[tuple]:
        """Yield ``(id, label, rootedness)`` in ascending id order."""
        for v in sorted(self._lab):
            yield v, self._lab[v], self._root[v]

    def edge_items(self) -> Iterator[tuple]:
        """Yield ``(id, src, tgt, label)`` in ascending id order."""
        for e in sorted(self._src):
            yield e, self._src[e], self._tgt[e], self._elab[e]


class Graph(_Store):
    """An immutable concrete graph.

    ``nodes`` is an iterable of ``(id, label, rootedness)`` triples and
    ``edges`` an iterable of ``(id, src, tgt, label)`` quadruples.  Equality
    and hashing compare the concrete ids and attributes; use
    :func:`find_isomorphism` to compare up to renaming.
    """

    __slots__ = ("name", "_hash", "_cache")

    def __init__(
        self,
        nodes: Iterable = (),
        edges: Iterable = (),
        *,
        name: str = "g",
        next_node_id: Optional[int] = None,
        next_edge_id: Optional[int] = None,
        check: bool = True,
    ):
        lab, root = {}, {}
        for v, label, rooted in nodes:
            if v in lab:
                raise GraphError(f"duplicate node id {v}")
            lab[v] = label
            root[v] = None if rooted is None else int(rooted)
        src, tgt, elab = {}, {}, {}
        out = {v: {} for v in lab}
        inc = {v: {} for v in lab}
        for e, s, t, label in edges:
            if e in src:
                raise GraphError(f"duplicate edge id {e}")
            src[e], tgt[e], elab[e] = s, t, label
            if s in out:
                out[s][e] = None
            if t in inc:
                inc[t][e] = None
        self._lab, self._root = lab, root
        self._src, self._tgt, self._elab = src, tgt, elab
        self._out, self._in = out, inc
        self.name = name
        self._hash = None
        self._cache = {}
        self._next_node = max(max(lab, default=-1) + 1, next_node_id or 0)
        self._next_edge = max(max(src, default=-1) + 1, next_edge_id or 0)
        if check:
            problems = validate_graph(self)
            if problems:
                raise GraphError("; ".join(str(p) for p in problems))

    @classmethod
    def _from_store(cls, store: _Store, name: str = "g") -> "Graph":
        return cls(
            ((v, store._lab[v], store._root[v]) for v in store._lab),
            ((e, store._src[e], store._tgt[e], store._elab[e]) for e in store._src),
            name=name,
            next_node_id=store._next_node,
            next_edge_id=store._next_edge,
            check=False,
        )

    # value semantics -------------------------------------------------------
    def _key(self):
        return (
            tuple(sorted(self._lab.items(), key=lambda kv: kv[0])),
            tuple(sorted(self._root.items())),
            tuple((e, self._src[e], self._tgt[e], self._elab[e]) for e in sorted(self._src)),
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"Graph(name={self.name!r}, nodes={self.node_count}, edges={self.edge_count})"

    # derived graphs --------------------------------------------------------
    def renamed(self, name: str) -> "Graph":
        return Graph._from_store(self, name)

    def restrict(self, nodes: Iterable[int], edges: Iterable[int] = ()) -> "Graph":
        """The subgraph induced by the given node and edge ids (edges must stay attached)."""
        keep = set(nodes)
        return Graph(
            ((v, self._lab[v], self._root[v]) for v in sorted(keep)),
            ((e, self._src[e], self._tgt[e], self._elab[e]) for e in sorted(set(edges))),
            name=self.name,
        )

    def relabelled(self, labels: Mapping[int, Label] = None, roots: Mapping[int, Rootedness] = None) -> "Graph":
        labels = labels or {}
        roots = roots or {}
        return Graph(
            ((v, labels.get(v, lab), roots.get(v, self._root[v])) for v, lab in self._lab.items()),
            self.edge_items(),
            name=self.name,
            check=False,
        )

    def unrooted_plain(self, node_label: str = "□", edge_label: str = "□") -> "Graph":
        """Every node unrooted and every item carrying one fixed label."""
        return Graph(
            ((v, node_label, 0) for v in self._lab),
            ((e, s, t, edge_label) for e, s, t, _ in self.edge_items()),
            name=self.name,
        )

    def renumbered(self, node_map: Mapping[int, int], edge_map: Mapping[int, int]) -> "Graph":
        return Graph(
            ((node_map[v], lab, r) for v, lab, r in self.node_items()),
            ((edge_map[e], node_map[s], node_map[t], lab) for e, s, t, lab in self.edge_items()),
            name=self.name,
        )

    def canonical_ids(self) -> "Graph":
        """Renumber nodes and edges to ``1..n`` preserving their relative order."""
        nm = {v: i + 1 for i, v in enumerate(sorted(self._lab))}
        em = {e: i + 1 for i, e in enumerate(sorted(self._src))}
        return self.renumbered(nm, em)


def disjoint_union(g: Graph, h: Graph) -> tuple:
    """Return the disjoint union and the id maps used for ``h``."""
    noff, eoff = g.next_node_id, g.next_edge_id
    nm = {v: v + noff for v in h._lab}
    em = {e: e + eoff for e in h._src}
    union = Graph(
        list(g.node_items()) + [(nm[v], lab, r) for v, lab, r in h.node_items()],
        list(g.edge_items()) + [(em[e], nm[s], nm[t], lab) for e, s, t, lab in h.edge_items()],
        check=False,
    )
    return union, nm, em


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    item: object
    detail: str = ""

    def __str__(self):
        return f"{self.kind}: {self.item}" + (f" ({self.detail})" if self.detail else "")


def validate_graph(g: _Store, alphabet: Optional[LabelAlphabet] = None) -> list:
    """Report every broken structural invariant; an empty list means ok."""
    problems = []
    for e in sorted(g._src):
        if g._src[e] not in g._lab:
            problems.append(Violation("dangling source", e))
        if g._tgt[e] not in g._lab:
            problems.append(Violation("dangling target", e))
        if g._elab.get(e) is None:
            problems.append(Violation("missing edge label", e))
    for v in sorted(g._root):
        if g._root[v] not in (None, 0, 1):
            problems.append(Violation("bad rootedness", v))
    if alphabet is not None:
        for v in sorted(g._lab):
            lab = g._lab[v]
            if lab is not None and lab not in alphabet.node_labels:
                problems.append(Violation("unknown label", v, repr(lab)))
        for e in sorted(g._elab):
            if g._elab[e] is not None and g._elab[e] not in alphabet.edge_labels:
                problems.append(Violation("unknown edge label", e, repr(g._elab[e])))
    return problems


def alphabet_of(*graphs: _Store) -> LabelAlphabet:
    """The smallest alphabet over which all the given graphs are defined."""
    nl, el = set(), set()
    for g in graphs:
        nl.update(lab for lab in g._lab.values() if lab is not None)
        el.update(g._elab.values())
    return LabelAlphabet(frozenset(nl), frozenset(el))


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True, eq=False)
class Morphism:
    source: Graph
    target: Graph
    nmap: dict = field(default_factory=dict)
    emap: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.nmap == other.nmap
            and self.emap == other.emap
        )

    def __hash__(self):
        return hash((tuple(sorted(self.nmap.items())), tuple(sorted(self.emap.items()))))

    def key(self) -> tuple:
        return tuple(sorted(self.nmap.items())), tuple(sorted(self.emap.items()))

    def compose(self, first: "Morphism") -> "Morphism":
        """``self ∘ first``."""
        return Morphism(
            first.source,
            self.target,
            {v: self.nmap[w] for v, w in first.nmap.items()},
            {e: self.emap[f] for e, f in first.emap.items()},
        )

    def inverse(self) -> "Morphism":
        return Morphism(
            self.target,
            self.source,
            {w: v for v, w in self.nmap.items()},
            {f: e for e, f in self.emap.items()},
        )

    @classmethod
    def identity(cls, g: Graph) -> "Morphism":
        return cls(g, g, {v: v for v in g.nodes}, {e: e for e in g.edges})


def is_morphism(m: Morphism) -> bool:
    """Sources, targets, edge labels, and defined node labels/rootedness are preserved."""
    g, h = m.source, m.target
    if set(m.nmap) != set(g._lab) or set(m.emap) != set(g._src):
        return False
    for v, w in m.nmap.items():
        if w not in h._lab:
            return False
        if g._lab[v] is not None and h._lab[w] != g._lab[v]:
            return False
        if g._root[v] is not None and h._root[w] != g._root[v]:
            return False
    for e, f in m.emap.items():
        if f not in h._src:
            return False
        if h._src[f] != m.nmap[g._src[e]] or h._tgt[f] != m.nmap[g._tgt[e]]:
            return False
        if h._elab[f] != g._elab[e]:
            return False
    return True


def is_injective(m: Morphism) -> bool:
    return len(set(m.nmap.values())) == len(m.nmap) and len(set(m.emap.values())) == len(m.emap)


def is_surjective(m: Morphism) -> bool:
    return set(m.nmap.values()) == set(m.target._lab) and set(m.emap.values()) == set(m.target._src)


def is_isomorphism(m: Morphism) -> bool:
    return is_morphism(m) and is_injective(m) and is_surjective(m) and is_morphism(m.inverse())


def is_subgraph(h: _Store, g: _Store) -> bool:
    """Component-wise inclusion, with ``l_H ⊆ l_G`` and ``p_H ⊆ p_G`` as partial maps."""
    for v, lab in h._lab.items():
        if v not in g._lab:
            return False
        if lab is not None and g._lab[v] != lab:
            return False
        if h._root[v] is not None and g._root[v] != h._root[v]:
            return False
    for e in h._src:
        if e not in g._src:
            return False
        if (h._src[e], h._tgt[e], h._elab[e]) != (g._src[e], g._tgt[e], g._elab[e]):
            return False
    return True


def morphisms(g: Graph, h: Graph, *, injective: bool = False) -> list:
    """All morphisms ``g → h`` (injective ones only if requested)."""
    from ._search import search

    found = [Morphism(g, h, dict(nm), dict(em)) for nm, em in search(g, h, injective=injective)]
    found.sort(key=Morphism.key)
    return found


# ---------------------------------------------------------------------------
# isomorphism


def _label_key(lab):
    return (lab is not None, lab or "")


def _root_key(r):
    return -1 if r is None else r


def refine_colours(g: _Store, marks: Optional[Mapping[int, object]] = None) -> dict:
    """Canonical colour refinement keyed on label, rootedness, degrees and marks.

    The resulting colours are integers assigned from sorted signatures, so
    isomorphic graphs (respecting marks) receive identical colour multisets.
    """
    marks = marks or {}
    sig = {
        v: (
            _label_key(g._lab[v]),
            _root_key(g._root[v]),
            repr(marks.get(v, "")),
            len(g._in[v]),
            len(g._out[v]),
        )
        for v in g._lab
    }
    colours = _compress(sig)
    classes = len(set(colours.values()))
    for _ in range(len(colours)):
        sig = {}
        for v in g._lab:
            outs = sorted((g._elab[e], colours[g._tgt[e]]) for e in g._out[v])
            ins = sorted((g._elab[e], colours[g._src[e]]) for e in g._in[v])
            sig[v] = (colours[v], tuple(outs), tuple(ins))
        new = _compress(sig)
        n = len(set(new.values()))
        colours = new
        if n == classes:
            break
        classes = n
    return colours


def _compress(sig: dict) -> dict:
    order = {s: i for i, s in enumerate(sorted(set(sig.values())))}
    return {v: order[s] for v, s in sig.items()}


def iso_key(g: _Store, marks: Optional[Mapping[int, object]] = None) -> tuple:
    """A hashable isomorphism invariant (equal for isomorphic graphs)."""
    colours = refine_colours(g, marks)
    edge_sig = Counter(
        (g._elab[e], colours[g._src[e]], colours[g._tgt[e]]) for e in g._src
    )
    return (
        len(g._lab),
        len(g._src),
        tuple(sorted(Counter(colours.values()).items())),
        tuple(sorted(edge_sig.items())),
    )


def find_isomorphism(
    g: Graph,
    h: Graph,
    marks_g: Optional[Mapping[int, object]] = None,
    marks_h: Optional[Mapping[int, object]] = None,
) -> Optional[Morphism]:
    """Return an isomorphism ``g → h`` or ``None``.

    Optional node marks must be preserved as well; they let callers ask for
    isomorphisms that fix designated nodes.
    """
    for nm, em in isomorphisms(g, h, marks_g, marks_h, limit=1):
        return Morphism(g, h, nm, em)
    return None


def isomorphisms(g, h, marks_g=None, marks_h=None, *, limit=None, fixed=None) -> Iterator[tuple]:
    """Yield ``(nmap, emap)`` pairs of isomorphisms ``g → h``."""
    from ._search import search

    if len(g._lab) != len(h._lab) or len(g._src) != len(h._src):
        return
    cg = refine_colours(g, marks_g)
    ch = refine_colours(h, marks_h)
    if Counter(cg.values()) != Counter(ch.values()):
        return
    if Counter(g._elab.values()) != Counter(h._elab.values()):
        return
    count = 0
    for nm, em in search(g, h, injective=True, strict=True, colours=(cg, ch), fixed=fixed):
        yield dict(nm), dict(em)
        count += 1
        if limit is not None and count >= limit:
            return


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


class IsoSet:
    """A set of graphs keyed by isomorphism class."""

    def __init__(self, marks_of=None):
        self._buckets: dict = {}
        self._marks_of = marks_of
        self._items: list = []

    def _marks(self, item):
        return self._marks_of(item) if self._marks_of else None

    def find(self, g: Graph, marks=None):
        """Return the stored representative isomorphic to ``g`` (or ``None``)."""
        key = iso_key(g, marks)
        for rep, rep_marks, payload in self._buckets.get(key, ()):
            if next(isomorphisms(rep, g, rep_marks, marks, limit=1), None) is not None:
                return payload
        return None

    def add(self, g: Graph, marks=None, payload=None) -> bool:
        """Insert ``g``; return ``False`` if an isomorphic copy was present."""
        key = iso_key(g, marks)
        bucket = self._buckets.setdefault(key, [])
        for rep, rep_marks, _ in bucket:
            if next(isomorphisms(rep, g, rep_marks, marks, limit=1), None) is not None:
                return False
        bucket.append((g, marks, g if payload is None else payload))
        self._items.append(g if payload is None else payload)
        return True

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items)


# ---------------------------------------------------------------------------
# structural queries


def degrees(g: _Store, v: int) -> tuple:
    """``(indeg, outdeg, deg)``; a loop counts once in each direction."""
    i, o = len(g._in[v]), len(g._out[v])
    return i, o, i + o


def children(g: _Store, v: int) -> set:
    return {g._tgt[e] for e in g._out[v]}


def parents(g: _Store, v: int) -> set:
    return {g._src[e] for e in g._in[v]}


def neighbourhood(g: _Store, v: int) -> set:
    return children(g, v) | parents(g, v)


def component_node_sets(g: _Store) -> list:
    """Node sets of the connected components, ordered by smallest id."""
    seen, comps = set(), []
    for start in sorted(g._lab):
        if start in seen:
            continue
        comp, stack = set(), [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.add(v)
            for w in neighbourhood(g, v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def connected_components(g: Graph) -> list:
    comps = []
    for nodes in component_node_sets(g):
        edges = [e for e in g._src if g._src[e] in nodes]
        comps.append(g.restrict(nodes, edges))
    return comps


def is_acyclic(g: _Store) -> bool:
    """True iff there is no directed cycle (loops count as cycles)."""
    indeg = {v: len(g._in[v]) for v in g._lab}
    ready = [v for v, d in indeg.items() if d == 0]
    removed = 0
    while ready:
        v = ready.pop()
        removed += 1
        for e in g._out[v]:
            w = g._tgt[e]
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return removed == len(g._lab)


def has_undirected_cycle(g: _Store) -> bool:
    """True iff the underlying undirected multigraph has a cycle (loops and parallel edges count)."""
    parent = {v: v for v in g._lab}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g._src:
        a, b = find(g._src[e]), find(g._tgt[e])
        if a == b:
            return True
        parent[a] = b
    return False
