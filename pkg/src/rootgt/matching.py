"""Finding injective matches of left-hand sides and checking applicability."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from ._search import search
from .graph import Graph, Morphism, component_node_sets
from .rules import Rule


@dataclass(frozen=True)
class Match:
    morphism: Morphism
    rule: Optional[str] = None

    @property
    def nmap(self) -> dict:
        return self.morphism.nmap

    @property
    def emap(self) -> dict:
        return self.morphism.emap


class NotFastError(ValueError):
    """The pattern has a connected component without a root node."""


def is_fast_pattern(lhs) -> bool:
    cache = getattr(lhs, "_cache", None)
    if cache is not None and "fast" in cache:
        return cache["fast"]
    fast = all(any(lhs._root[v] == 1 for v in comp) for comp in component_node_sets(lhs))
    if cache is not None:
        cache["fast"] = fast
    return fast


def _order_key(nm, em, lhs) -> tuple:
    return tuple(nm[v] for v in lhs.nodes), tuple(em[e] for e in lhs.edges)


def find_matches(lhs: Graph, host: Graph, rule: Optional[str] = None) -> list:
    """All injective morphisms ``lhs → host`` in lexicographic order of images."""
    found = [(_order_key(nm, em, lhs), dict(nm), dict(em)) for nm, em in search(lhs, host, injective=True)]
    found.sort(key=lambda t: t[0])
    return [Match(Morphism(lhs, host, nm, em), rule) for _, nm, em in found]


def _root_anchors(h, p, v):
    roots = getattr(h, "roots", None)
    if roots is None:
        return h.root_nodes()
    return sorted(roots) if len(roots) > 1 else tuple(roots)


def iter_matches_fast(lhs, host, *, counter=None, accept=None, degree_checks=()) -> Iterator[tuple]:
    """Lazily enumerate ``(nmap, emap)`` pairs, anchoring every component at a host root.

    The yielded dicts are live; copy them to keep them.
    """
    if not is_fast_pattern(lhs):
        raise NotFastError("every connected component of the pattern needs a root node")
    return search(
        lhs,
        host,
        injective=True,
        anchors=_root_anchors,
        prefer_roots=True,
        counter=counter,
        accept=accept,
        degree_checks=degree_checks,
    )


def find_matches_fast(lhs: Graph, host: Graph, rule: Optional[str] = None, counter: Optional[list] = None) -> list:
    """Same result set as :func:`find_matches`, exploring only around host roots."""
    found = [
        (_order_key(nm, em, lhs), dict(nm), dict(em)) for nm, em in iter_matches_fast(lhs, host, counter=counter)
    ]
    found.sort(key=lambda t: t[0])
    return [Match(Morphism(lhs, host, nm, em), rule) for _, nm, em in found]


def dangling_checks(rule: Rule) -> tuple:
    """``(v, indeg, outdeg)`` for each deleted node, the degree form used by :func:`dangling_ok`."""
    lhs = rule.lhs
    return tuple((v, len(lhs._in[v]), len(lhs._out[v])) for v in rule.deleted_nodes)


def dangling_ok(rule: Rule, nmap: dict, host) -> bool:
    """Degree form of the dangling condition for an injective match.

    A deleted node's incident host edges all lie in the match image iff its
    host in/out degrees equal its degrees in ``L``.
    """
    lhs = rule.lhs
    hin, hout = host._in, host._out
    for v in rule.deleted_nodes:
        w = nmap[v]
        if len(hin[w]) != len(lhs._in[v]) or len(hout[w]) != len(lhs._out[v]):
            return False
    return True


def satisfies_dangling(rule: Rule, match) -> bool:
    """No host edge outside ``g(L)`` touches a node of ``g(L∖K)``."""
    m = match.morphism if isinstance(match, Match) else match
    host = m.target
    image = set(m.emap.values())
    for v in rule.deleted_nodes:
        w = m.nmap[v]
        for e in list(host._in[w]) + list(host._out[w]):
            if e not in image:
                return False
    return True


def applicable_matches(rule: Rule, host: Graph) -> list:
    """Matches of ``rule`` in ``host`` that also satisfy the dangling condition."""
    return [m for m in find_matches(rule.lhs, host, rule.name) if dangling_ok(rule, m.nmap, host)]
