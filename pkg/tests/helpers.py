"""Builders and random generators shared by the test modules."""

from __future__ import annotations

import random

from rootgt import Graph, GTSystem, Rule
from rootgt.graph import IsoSet

BOX, TRI = "□", "△"
NODE_LABELS = ("a", "b")
EDGE_LABELS = ("x", "y")


def g(nodes, edges=(), name="g"):
    """Shorthand: nodes as ``(id, label, root)``, edges as ``(id, src, tgt, label)``."""
    return Graph(nodes, edges, name=name)


def boxes(layout: dict, edges, name="g"):
    """``layout`` maps node id to ``"□"``, ``"□*"`` (rooted) or ``"△"``; edges are ``(src, tgt)`` pairs."""
    nodes = [(v, s.rstrip("*"), int(s.endswith("*"))) for v, s in layout.items()]
    return Graph(nodes, [(i, s, t, BOX) for i, (s, t) in enumerate(edges, 1)], name=name)


def iso_set(graphs) -> IsoSet:
    out = IsoSet()
    for h in graphs:
        out.add(h)
    return out


def same_iso_classes(a, b) -> bool:
    sa, sb = iso_set(a), iso_set(b)
    return len(sa) == len(sb) and all(sb.find(h) is not None for h in sa)


# ---------------------------------------------------------------------------
# random rules and hosts


def _maybe(rng, value, p):
    return value if rng.random() < p else None


def random_rule(rng: random.Random, *, max_nodes=4, partial=True, root_p=0.3, name="r") -> Rule:
    """A random rule with at most ``max_nodes`` nodes per side.

    With ``partial`` the interface may leave labels and rootedness undefined.
    """
    k = rng.randint(0, min(3, max_nodes))
    lx = rng.randint(0, max_nodes - k)
    rx = rng.randint(0, max_nodes - k)
    k_nodes = []
    for v in range(1, k + 1):
        lab = _maybe(rng, rng.choice(NODE_LABELS), 0.6) if partial else rng.choice(NODE_LABELS)
        root = _maybe(rng, int(rng.random() < root_p), 0.6) if partial else int(rng.random() < root_p)
        k_nodes.append((v, lab, root))

    def complete(nodes):
        return [
            (v, lab if lab is not None else rng.choice(NODE_LABELS), r if r is not None else int(rng.random() < root_p))
            for v, lab, r in nodes
        ]

    l_only = [(v, rng.choice(NODE_LABELS), int(rng.random() < root_p)) for v in range(k + 1, k + lx + 1)]
    r_only = [(v, rng.choice(NODE_LABELS), int(rng.random() < root_p)) for v in range(k + lx + 1, k + lx + rx + 1)]
    l_nodes = complete(k_nodes) + l_only
    r_nodes = complete(k_nodes) + r_only

    eid = 1
    k_edges = []
    if k:
        for _ in range(rng.randint(0, 2)):
            k_edges.append((eid, rng.randint(1, k), rng.randint(1, k), rng.choice(EDGE_LABELS)))
            eid += 1

    def extra(nodes, count):
        nonlocal eid
        ids = [v for v, _, _ in nodes]
        out = []
        for _ in range(count):
            out.append((eid, rng.choice(ids), rng.choice(ids), rng.choice(EDGE_LABELS)))
            eid += 1
        return out

    l_edges = k_edges + (extra(l_nodes, rng.randint(0, 3)) if l_nodes else [])
    r_edges = k_edges + (extra(r_nodes, rng.randint(0, 3)) if r_nodes else [])
    return Rule(name, Graph(l_nodes, l_edges, name="L"), Graph(k_nodes, k_edges, name="K"), Graph(r_nodes, r_edges, name="R"))


def random_graph(rng: random.Random, n_max=8, *, root_p=0.3, e_max=10) -> Graph:
    n = rng.randint(0, n_max)
    nodes = [(v, rng.choice(NODE_LABELS), int(rng.random() < root_p)) for v in range(n)]
    edges = []
    if n:
        for i in range(rng.randint(0, e_max)):
            edges.append((i, rng.randrange(n), rng.randrange(n), rng.choice(EDGE_LABELS)))
    return Graph(nodes, edges)


def host_containing(rng: random.Random, pattern: Graph, n_max=8, *, extra_edges=3, root_p=0.3) -> Graph:
    """A random graph with at most ``n_max`` nodes that contains a copy of ``pattern``."""
    ids = {v: i for i, v in enumerate(rng.sample(pattern.nodes, len(pattern.nodes)))}
    nodes = [(ids[v], lab, r) for v, lab, r in pattern.node_items()]
    n = len(nodes)
    for v in range(n, rng.randint(n, max(n, n_max))):
        nodes.append((v, rng.choice(NODE_LABELS), int(rng.random() < root_p)))
    edges = [(i, ids[s], ids[t], lab) for i, (_, s, t, lab) in enumerate(pattern.edge_items())]
    if nodes:
        for _ in range(rng.randint(0, extra_edges)):
            edges.append((len(edges), rng.randrange(len(nodes)), rng.randrange(len(nodes)), rng.choice(EDGE_LABELS)))
    return Graph(nodes, edges)


def single(rule: Rule) -> GTSystem:
    return GTSystem((rule,))


# ---------------------------------------------------------------------------
# worked example graphs

# The two graphs of the morphism-counting example: G has a loop on 1 and an
# edge 2 -> 1; H has two parallel edges 1 -> 3, an edge 2 -> 3 and a loop on 3.
EX_G = g([(1, BOX, 0), (2, BOX, 0)], [(1, 1, 1, BOX), (2, 2, 1, BOX)], "G")
EX_H = g(
    [(1, BOX, 0), (2, BOX, 0), (3, BOX, 0)],
    [(1, 1, 3, BOX), (2, 1, 3, BOX), (3, 2, 3, BOX), (4, 3, 3, BOX)],
    "H",
)

# Reduction traces: (start graph, [(rule name, graph after the step), ...]).
_TREE = [(1, 2), (1, 3), (2, 4), (3, 5)]
TRACE_TREE = (
    boxes({1: "□", 2: "□*", 3: "□", 4: "□", 5: "□"}, _TREE, "tree"),
    [
        ("r2", boxes({1: "□", 2: "△", 3: "□", 4: "□*", 5: "□"}, _TREE)),
        ("r1", boxes({1: "□", 2: "□*", 3: "□", 5: "□"}, [(1, 2), (1, 3), (3, 5)])),
        ("r0", boxes({1: "□*", 3: "□", 5: "□"}, [(1, 3), (3, 5)])),
        ("r2", boxes({1: "△", 3: "□*", 5: "□"}, [(1, 3), (3, 5)])),
        ("r2", boxes({1: "△", 3: "△", 5: "□*"}, [(1, 3), (3, 5)])),
        ("r1", boxes({1: "△", 3: "□*"}, [(1, 3)])),
        ("r1", boxes({1: "□*"}, [])),
    ],
)
_CYCLE = [(1, 2), (2, 3), (3, 1)]
TRACE_CYCLE = (
    boxes({1: "□", 2: "□*", 3: "□"}, _CYCLE, "cycle"),
    [
        ("r2", boxes({1: "□", 2: "△", 3: "□*"}, _CYCLE)),
        ("r2", boxes({1: "□*", 2: "△", 3: "△"}, _CYCLE)),
    ],
)
_FOREST = [(1, 3), (2, 4)]
TRACE_FOREST = (
    boxes({1: "□*", 2: "□", 3: "□", 4: "□"}, _FOREST, "forest"),
    [
        ("r2", boxes({1: "△", 2: "□", 3: "□*", 4: "□"}, _FOREST)),
        ("r1", boxes({1: "□*", 2: "□", 4: "□"}, [(2, 4)])),
    ],
)
TRACES = {"tree": TRACE_TREE, "cycle": TRACE_CYCLE, "forest": TRACE_FOREST}


def encoded(layout: dict, edges, name="enc"):
    """Encoded tree graphs: ``layout`` maps node id to its marker, edges are △-labelled."""
    nodes = [(v, BOX, 0) for v in layout]
    es = [(i, s, t, TRI) for i, (s, t) in enumerate(edges, 1)]
    es += [(100 + v, v, v, m) for v, m in layout.items()]
    return Graph(nodes, es, name=name)


# The non-strongly joinable encoded pair: a root with two non-root children,
# rewritten by e2 towards either child.
EX_ENC_OVERLAP = encoded({1: "R", 2: "N", 3: "N"}, [(1, 2), (1, 3)])
EX_ENC_LEFT = encoded({1: "M", 2: "R", 3: "N"}, [(1, 2), (1, 3)])
EX_ENC_RIGHT = encoded({1: "M", 2: "N", 3: "R"}, [(1, 2), (1, 3)])


# ---------------------------------------------------------------------------
# critical-pair completeness oracle


def _extension(pair_step, host_step, into: dict, emap_into: dict) -> bool:
    """Extend the partial overlap->host map along one match; False on a clash."""
    for x, o in pair_step.match.nmap.items():
        w = host_step.match.nmap[x]
        if into.setdefault(o, w) != w:
            return False
    for x, o in pair_step.match.emap.items():
        f = host_step.match.emap[x]
        if emap_into.setdefault(o, f) != f:
            return False
    return True


def factors_through(pair, step1, step2) -> bool:
    """Is there an injective ``m: overlap -> host`` with ``m ∘ o1 = g1`` and ``m ∘ o2 = g2``?

    The overlap is covered by the two matches, so ``m`` is forced; the check
    is that the forced map is well defined and injective.
    """
    if (pair.rule1.name, pair.rule2.name) != (step1.rule.name, step2.rule.name):
        return False
    nm, em = {}, {}
    if not (_extension(pair.step1, step1, nm, em) and _extension(pair.step2, step2, nm, em)):
        return False
    if set(nm) != set(pair.overlap.nodes) or set(em) != set(pair.overlap.edges):
        return False
    return len(set(nm.values())) == len(nm) and len(set(em.values())) == len(em)


def covered_by_some_pair(pairs, step1, step2) -> bool:
    return any(factors_through(p, step1, step2) or factors_through(p, step2, step1) for p in pairs)
