"""Encodings of partially labelled (and rooted) graphs as totally labelled ones.

Label encoding: every node is relabelled with a fresh sentinel and each
labelled node gains a self-loop carrying its former label.  Rootedness is
left untouched.  Loop ids live in a band above the graph's edge ids
(``band + node id``), so encoding is deterministic and decoding recovers ids.

Rooted encoding: each node whose label and rootedness are both defined gains
one loop carrying a marker for the pair ``(label, rootedness)``; the encoded
graph is unrooted (rootedness 0 everywhere) and all nodes carry the
sentinel.  Nodes with an undefined label or rootedness (interface nodes that
get rewritten) carry no marker loop, so the rule deletes the old marker and
adds the new one.  For the tree recognition alphabet the markers are ``R``
(□, root), ``N`` (□, non-root) and ``M`` (△, non-root), and the edge label
□ is renamed to △, reproducing the hand-drawn encoded rules e0, e1, e2.
"""

from __future__ import annotations

import re
from typing import Mapping, Optional

from .graph import Graph, LabelAlphabet, Morphism
from .rules import GTSystem, Rule

SENTINEL = "□"

TREE_MARKERS = {("□", 1): "R", ("□", 0): "N", ("△", 0): "M", ("△", 1): "MR"}
TREE_EDGE_MAP = {"□": "△"}


class EncodingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# label encoding


def _band(*graphs) -> int:
    return max(g.next_edge_id for g in graphs)


def encode_graph(g: Graph, *, sentinel: str = SENTINEL, band: Optional[int] = None) -> Graph:
    """Move node labels onto self-loops and give every node the sentinel label."""
    if band is None:
        band = _band(g)
    labels = {lab for _, lab, _ in g.node_items() if lab is not None}
    if sentinel in labels or any(g.edge_label(e) == sentinel for e in g.edges):
        raise EncodingError(f"sentinel {sentinel!r} already occurs in the graph")
    edges = list(g.edge_items())
    edges += [(band + v, v, v, lab) for v, lab, _ in g.node_items() if lab is not None]
    return Graph(((v, sentinel, r) for v, _, r in g.node_items()), edges, name=g.name, check=False)


def encode_morphism(m: Morphism, *, sentinel: str = SENTINEL) -> Morphism:
    src, tgt = m.source, m.target
    bs, bt = _band(src), _band(tgt)
    emap = dict(m.emap)
    for v, lab, _ in src.node_items():
        if lab is not None:
            emap[bs + v] = bt + m.nmap[v]
    return Morphism(encode_graph(src, sentinel=sentinel), encode_graph(tgt, sentinel=sentinel), dict(m.nmap), emap)


def decode_graph(eg: Graph, node_labels, *, sentinel: str = SENTINEL) -> Graph:
    """Inverse of :func:`encode_graph` on its range; raises :class:`EncodingError` otherwise."""
    node_labels = frozenset(node_labels)
    labels: dict = {}
    edges = []
    loop_ids: dict = {}
    for e, s, t, lab in eg.edge_items():
        if lab in node_labels:
            if s != t:
                raise EncodingError(f"edge {e} carries node label {lab!r} but is not a loop")
            if s in labels:
                raise EncodingError(f"node {s} has more than one label loop")
            labels[s] = lab
            loop_ids[s] = e
        else:
            edges.append((e, s, t, lab))
    nodes = []
    for v, lab, r in eg.node_items():
        if lab != sentinel:
            raise EncodingError(f"node {v} is not labelled with the sentinel")
        nodes.append((v, labels.get(v), r))
    return Graph(nodes, edges, name=eg.name, check=False)


def decode_morphism(em: Morphism, node_labels, *, sentinel: str = SENTINEL) -> Morphism:
    src = decode_graph(em.source, node_labels, sentinel=sentinel)
    tgt = decode_graph(em.target, node_labels, sentinel=sentinel)
    emap = {e: em.emap[e] for e in src.edges}
    return Morphism(src, tgt, dict(em.nmap), emap)


def encode_rule(r: Rule, *, sentinel: str = SENTINEL) -> Rule:
    band = _band(r.lhs, r.interface, r.rhs)
    parts = [encode_graph(g, sentinel=sentinel, band=band) for g in (r.lhs, r.interface, r.rhs)]
    return Rule(r.name, *parts)


def encode_system(t: GTSystem, *, sentinel: str = SENTINEL) -> GTSystem:
    a = t.alphabet
    if a.node_labels & a.edge_labels:
        raise EncodingError("node and edge alphabets must be disjoint")
    if sentinel in a.node_labels | a.edge_labels:
        raise EncodingError(f"sentinel {sentinel!r} must be fresh")
    rules = tuple(encode_rule(r, sentinel=sentinel) for r in t.rules)
    return GTSystem(rules, LabelAlphabet({sentinel}, a.node_labels | a.edge_labels))


# ---------------------------------------------------------------------------
# rooted encoding


def default_markers(alphabet: LabelAlphabet) -> tuple:
    """Marker table and edge renaming for a rooted alphabet."""
    if alphabet.node_labels <= {"□", "△"} and alphabet.edge_labels <= {"□"}:
        return dict(TREE_MARKERS), dict(TREE_EDGE_MAP)
    markers = {(lab, r): f"{lab}:{r}" for lab in sorted(alphabet.node_labels) for r in (0, 1)}
    edge_map = {lab: (lab + "'" if lab == SENTINEL else lab) for lab in sorted(alphabet.edge_labels)}
    return markers, edge_map


def encode_rooted_graph(
    g: Graph, markers: Mapping, edge_map: Mapping, *, sentinel: str = SENTINEL, band: Optional[int] = None
) -> Graph:
    if band is None:
        band = _band(g)
    edges = [(e, s, t, edge_map.get(lab, lab)) for e, s, t, lab in g.edge_items()]
    for v, lab, r in g.node_items():
        if lab is not None and r is not None:
            try:
                edges.append((band + v, v, v, markers[(lab, r)]))
            except KeyError:
                raise EncodingError(f"no marker for label {lab!r} with rootedness {r}") from None
    return Graph(((v, sentinel, 0) for v in g.nodes), edges, name=g.name, check=False)


def decode_rooted_graph(eg: Graph, markers: Mapping, edge_map: Mapping, *, sentinel: str = SENTINEL) -> Graph:
    back = {m: pair for pair, m in markers.items()}
    edge_back = {new: old for old, new in edge_map.items()}
    attrs: dict = {}
    edges = []
    for e, s, t, lab in eg.edge_items():
        if lab in back:
            if s != t:
                raise EncodingError(f"marker edge {e} is not a loop")
            if s in attrs:
                raise EncodingError(f"node {s} has more than one marker loop")
            attrs[s] = back[lab]
        else:
            edges.append((e, s, t, edge_back.get(lab, lab)))
    nodes = []
    for v, lab, r in eg.node_items():
        if lab != sentinel:
            raise EncodingError(f"node {v} is not labelled with the sentinel")
        nodes.append((v, *attrs.get(v, (None, None))))
    return Graph(nodes, edges, name=eg.name, check=False)


def encode_rooted_rule(r: Rule, markers: Mapping, edge_map: Mapping, *, sentinel: str = SENTINEL) -> Rule:
    band = _band(r.lhs, r.interface, r.rhs)
    parts = [encode_rooted_graph(g, markers, edge_map, sentinel=sentinel, band=band) for g in (r.lhs, r.interface, r.rhs)]
    name = "e" + r.name[1:] if re.fullmatch(r"r\d+", r.name) else r.name
    return Rule(name, *parts)


def encode_rooted_system(
    t: GTSystem, markers: Optional[Mapping] = None, edge_map: Optional[Mapping] = None, *, sentinel: str = SENTINEL
) -> tuple:
    """Return ``(encoded system, markers, edge_map)``.

    Rejects systems whose edge labels clash with the marker symbols.
    """
    dm, de = default_markers(t.alphabet)
    markers = dict(markers or dm)
    edge_map = dict(edge_map or de)
    mapped_edges = {edge_map.get(lab, lab) for lab in t.alphabet.edge_labels}
    clash = mapped_edges & set(markers.values())
    if clash:
        raise EncodingError(f"edge labels {sorted(clash)} collide with root markers")
    if sentinel in mapped_edges:
        raise EncodingError(f"edge label {sentinel!r} collides with the sentinel")
    rules = tuple(encode_rooted_rule(r, markers, edge_map, sentinel=sentinel) for r in t.rules)
    alphabet = LabelAlphabet({sentinel}, mapped_edges | set(markers.values()))
    return GTSystem(rules, alphabet), markers, edge_map
