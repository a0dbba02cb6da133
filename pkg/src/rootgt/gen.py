"""Generators for standard graph classes, random test graphs and the tree oracle.

All generated graphs use ``□`` for every node and edge label and leave every
node unrooted (rootedness 0).
"""

from __future__ import annotations

import random
from typing import Optional

from .graph import Graph

BOX = "□"


def _graph(n_nodes: int, edges, name: str) -> Graph:
    return Graph(
        ((v, BOX, 0) for v in range(n_nodes)),
        ((i, s, t, BOX) for i, (s, t) in enumerate(edges)),
        name=name,
        check=False,
    )


def gen_linked_list(n: int) -> Graph:
    """``0 → 1 → … → n-1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _graph(n, ((i, i + 1) for i in range(n - 1)), f"list{n}")


def gen_perfect_binary_tree(depth: int) -> Graph:
    """Heap-numbered tree with ``2**(depth+1) - 1`` nodes, edges point to children."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    n = 2 ** (depth + 1) - 1
    edges = [(i, c) for i in range(n) for c in (2 * i + 1, 2 * i + 2) if c < n]
    return _graph(n, edges, f"bintree{depth}")


def gen_grid(n: int, m: int) -> Graph:
    """Node ``(i, j)`` has id ``i*m + j``; edges go right and down."""
    if n < 1 or m < 1:
        raise ValueError("grid dimensions must be at least 1")
    edges = []
    for i in range(n):
        for j in range(m):
            v = i * m + j
            if j + 1 < m:
                edges.append((v, v + 1))
            if i + 1 < n:
                edges.append((v, v + m))
    return _graph(n * m, edges, f"grid{n}x{m}")


def gen_star(n: int) -> Graph:
    """Centre ``n`` with spokes ``0..n-1``; even spokes are children, odd spokes parents."""
    if n < 1:
        raise ValueError("n must be at least 1")
    edges = [(n, i) if i % 2 == 0 else (i, n) for i in range(n)]
    return _graph(n + 1, edges, f"star{n}")


def tree_oracle(g) -> bool:
    """Direct structural check: non-empty, connected, no undirected cycle, indegree ≤ 1.

    Deliberately self-contained so that it shares no code with the rewriting
    engine it is used to check.
    """
    nodes = list(g.nodes)
    if not nodes:
        return False
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    indeg = dict.fromkeys(nodes, 0)
    for e in g.edges:
        s, t = g.source(e), g.target(e)
        indeg[t] += 1
        if indeg[t] > 1:
            return False
        a, b = find(s), find(t)
        if a == b:
            return False
        parent[a] = b
    return len({find(v) for v in nodes}) == 1


# ---------------------------------------------------------------------------
# random graphs for testing


def random_tree(n: int, rng: random.Random, *, shuffle_ids: bool = True) -> Graph:
    """A uniformly-attached random tree on ``n`` nodes with edges towards children."""
    order = list(range(n))
    if shuffle_ids:
        rng.shuffle(order)
    edges = [(order[rng.randrange(i)], order[i]) for i in range(1, n)]
    if shuffle_ids:
        rng.shuffle(edges)
    return _graph(n, edges, f"tree{n}")


def perturb(g: Graph, rng: random.Random) -> Graph:
    """Apply one random structural change that usually destroys tree-ness."""
    nodes = list(g.nodes)
    edges = [(g.source(e), g.target(e)) for e in g.edges]
    kind = rng.choice(["extra", "reverse", "drop", "loop", "parallel", "isolated"])
    if kind == "extra" or (kind in ("reverse", "drop", "parallel") and not edges):
        edges.append((rng.choice(nodes), rng.choice(nodes)))
    elif kind == "reverse":
        i = rng.randrange(len(edges))
        s, t = edges[i]
        edges[i] = (t, s)
    elif kind == "drop":
        edges.pop(rng.randrange(len(edges)))
    elif kind == "loop":
        v = rng.choice(nodes)
        edges.append((v, v))
    elif kind == "parallel":
        edges.append(rng.choice(edges))
    else:
        nodes.append(max(nodes) + 1)
    return _graph(len(nodes), edges, g.name + "*")


def random_input_graph(rng: random.Random, max_nodes: int = 60, tree_fraction: float = 0.5) -> tuple:
    """Return ``(graph, built_as_tree)`` with one root planted on the lowest id."""
    n = rng.randint(1, max_nodes)
    g = random_tree(n, rng)
    built_tree = rng.random() < tree_fraction
    if not built_tree:
        for _ in range(rng.randint(1, 3)):
            g = perturb(g, rng)
    return plant_root(g), built_tree


def plant_root(g: Graph, node: Optional[int] = None) -> Graph:
    """Root ``node`` (default: the lowest id) and unroot every other node."""
    if not g.node_count:
        raise ValueError("cannot plant a root in the empty graph")
    target = min(g.nodes) if node is None else node
    return g.relabelled(roots={v: int(v == target) for v in g.nodes})
