"""A mutable, indexed host graph for in-place derivations.

The immutable :class:`~rootgt.graph.Graph` is the public value type.  Long
derivations (tree recognition, benchmarks) would pay a full copy per step if
every intermediate graph were materialised, so they run on a ``HostGraph``
which keeps the same dict layout plus a root index, and updates all of it in
constant time per touched item.
"""

from __future__ import annotations

from .graph import Graph, _Store


class HostGraph(_Store):
    __slots__ = ("roots",)

    def __init__(self, g: _Store = None):
        if g is None:
            self._lab, self._root = {}, {}
            self._src, self._tgt, self._elab = {}, {}, {}
            self._out, self._in = {}, {}
            self._next_node = self._next_edge = 0
            self.roots = set()
            return
        self._lab = dict(g._lab)
        self._root = dict(g._root)
        self._src, self._tgt, self._elab = dict(g._src), dict(g._tgt), dict(g._elab)
        self._out = {v: dict(es) for v, es in g._out.items()}
        self._in = {v: dict(es) for v, es in g._in.items()}
        self._next_node, self._next_edge = g._next_node, g._next_edge
        self.roots = {v for v, r in self._root.items() if r == 1}

    def freeze(self, name: str = "g") -> Graph:
        return Graph._from_store(self, name)

    # mutation ----------------------------------------------------------------
    def add_node(self, label, rooted) -> int:
        v = self._next_node
        self._next_node += 1
        self._lab[v] = label
        self._root[v] = rooted
        self._out[v] = {}
        self._in[v] = {}
        if rooted == 1:
            self.roots.add(v)
        return v

    def add_edge(self, s: int, t: int, label: str) -> int:
        e = self._next_edge
        self._next_edge += 1
        self._src[e], self._tgt[e], self._elab[e] = s, t, label
        self._out[s][e] = None
        self._in[t][e] = None
        return e

    def remove_edge(self, e: int) -> None:
        del self._out[self._src.pop(e)][e]
        del self._in[self._tgt.pop(e)][e]
        del self._elab[e]

    def remove_node(self, v: int) -> None:
        if self._out[v] or self._in[v]:
            raise ValueError(f"node {v} still has incident edges")
        del self._lab[v], self._root[v], self._out[v], self._in[v]
        self.roots.discard(v)

    def set_label(self, v: int, label) -> None:
        self._lab[v] = label

    def set_rootedness(self, v: int, rooted) -> None:
        self._root[v] = rooted
        if rooted == 1:
            self.roots.add(v)
        else:
            self.roots.discard(v)

    def root_nodes(self) -> tuple:
        return tuple(sorted(self.roots))
