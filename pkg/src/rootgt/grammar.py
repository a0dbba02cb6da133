"""Graph grammars, membership by inverse reduction, and tree recognition."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

from .gen import plant_root
from .graph import Graph, IsoSet, LabelAlphabet, alphabet_of
from .hostgraph import HostGraph
from .matching import dangling_checks, dangling_ok, iter_matches_fast
from .rewrite import invert_system, rewrite_in_place, steps_from
from .rules import GTSystem
from .textio import ParseError, parse_graph, parse_manifest, parse_rules, read_graph, read_rules

BOX = "□"
TRIANGLE = "△"


def _data_text(name: str) -> str:
    return resources.files("rootgt").joinpath("data", name).read_text(encoding="utf-8")


def load_builtin_rules(name: str) -> list:
    """Rules shipped with the package (``tree_recognition``, ``tree_grammar``, ``encoded_tree``, ``efd``)."""
    return parse_rules(_data_text(f"{name}.rule"), f"<builtin {name}>")


def load_builtin_graph(name: str) -> Graph:
    return parse_graph(_data_text(f"{name}.graph"), f"<builtin {name}>")


@dataclass(frozen=True)
class Grammar:
    system: GTSystem
    start: Graph
    nonterminal_nodes: frozenset = frozenset()
    nonterminal_edges: frozenset = frozenset()
    name: str = "grammar"
    tree_shortcut: bool = False

    @property
    def alphabet(self) -> LabelAlphabet:
        a = self.system.alphabet.union(alphabet_of(self.start))
        return LabelAlphabet(a.node_labels, a.edge_labels, self.nonterminal_nodes, self.nonterminal_edges)


class Membership(str, enum.Enum):
    YES = "member"
    NO = "not-a-member"
    BUDGET_EXCEEDED = "budget-exceeded"


def is_terminally_labelled(grammar: Grammar, g: Graph) -> bool:
    nodes_ok = all(g.label(v) not in grammar.nonterminal_nodes for v in g.nodes)
    return nodes_ok and all(g.edge_label(e) not in grammar.nonterminal_edges for e in g.edges)


@lru_cache(maxsize=None)
def tree_recognition_system() -> GTSystem:
    return GTSystem(tuple(load_builtin_rules("tree_recognition")), LabelAlphabet({BOX, TRIANGLE}, {BOX}))


@lru_cache(maxsize=None)
def tree_grammar() -> Grammar:
    system = GTSystem(tuple(load_builtin_rules("tree_grammar")), LabelAlphabet({BOX}, {BOX}))
    return Grammar(system, load_builtin_graph("tree_start"), name="TREE", tree_shortcut=True)


@lru_cache(maxsize=None)
def efd_grammar() -> Grammar:
    system = GTSystem(tuple(load_builtin_rules("efd")), LabelAlphabet({"•", BOX, "◇"}, {"t", "f", BOX}))
    return Grammar(system, load_builtin_graph("efd_start"), name="EFD")


def load_grammar(path) -> Grammar:
    """Load a grammar manifest; ``rules`` and ``start`` name files relative to it."""
    path = Path(path)
    entries = parse_manifest(path.read_text(encoding="utf-8"), str(path))
    for key in ("start", "rules"):
        if key not in entries:
            raise ParseError(str(path), 1, "grammar", f"missing key '{key}'")
    rules = []
    for item in filter(None, entries["rules"].split(",")):
        rules.extend(read_rules(path.parent / item))
    start = read_graph(path.parent / entries["start"])
    split = lambda key: frozenset(filter(None, entries.get(key, "").split(",")))  # noqa: E731
    system = GTSystem(tuple(rules))
    alphabet = system.alphabet.union(alphabet_of(start))
    nt_nodes, nt_edges = split("nonterminal-nodes"), split("nonterminal-edges")
    alphabet = LabelAlphabet(alphabet.node_labels | nt_nodes, alphabet.edge_labels | nt_edges, nt_nodes, nt_edges)
    return Grammar(GTSystem(tuple(rules), alphabet), start, nt_nodes, nt_edges, name=path.stem)


# ---------------------------------------------------------------------------
# tree recognition


def is_input_graph(g) -> bool:
    """All labels ``□``, rootedness total, exactly one root."""
    if not g.is_totally_rooted():
        return False
    if any(g.label(v) != BOX for v in g.nodes) or any(g.edge_label(e) != BOX for e in g.edges):
        return False
    return len(g.root_nodes()) == 1


@dataclass
class TreeRun:
    is_tree: bool
    steps: int
    final: Graph
    rule_counts: dict


def tree_reduction(g: Graph, *, rng: Optional[random.Random] = None, host: Optional[HostGraph] = None) -> TreeRun:
    """Reduce an input graph to normal form with the tree recognition rules.

    Without ``rng`` the first rule (in order r0, r1, r2) with an applicable
    match is taken, using root-anchored matching.  With ``rng`` a uniformly
    random applicable step is chosen instead.  ``host`` lets benchmark code
    pass a pre-built indexed copy of ``g``.
    """
    if not is_input_graph(g if host is None else host):
        raise ValueError("input graph must be all-□ with rootedness defined everywhere and exactly one root")
    hg = HostGraph(g) if host is None else host
    rules = tree_recognition_system().rules
    checks = {r.name: dangling_checks(r) for r in rules}
    counts = {r.name: 0 for r in rules}
    steps = 0
    while True:
        if rng is None:
            chosen = None
            for rule in rules:
                found = next(iter_matches_fast(rule.lhs, hg, degree_checks=checks[rule.name]), None)
                if found is not None:
                    chosen = (rule, found[0], found[1])
                    break
        else:
            options = []
            for rule in rules:
                for nm, em in iter_matches_fast(rule.lhs, hg):
                    if dangling_ok(rule, nm, hg):
                        options.append((rule, dict(nm), dict(em)))
            chosen = rng.choice(options) if options else None
        if chosen is None:
            break
        rule, nm, em = chosen
        rewrite_in_place(hg, rule, nm, em)
        counts[rule.name] += 1
        steps += 1
    final = hg.freeze(getattr(g, "name", "g"))
    single = final.node_count == 1 and final.edge_count == 0
    ok = single and final.label(final.nodes[0]) == BOX and final.rootedness(final.nodes[0]) == 1
    return TreeRun(ok, steps, final, counts)


def recognize_tree(g: Graph) -> bool:
    """Decide whether an input graph (all ``□``, one root) is a tree."""
    return tree_reduction(g).is_tree


# ---------------------------------------------------------------------------
# membership


def member(grammar: Grammar, g: Graph, budget: int = 10_000) -> Membership:
    """Search for a reduction of ``g`` to the start graph with the inverse rules.

    ``budget`` bounds the number of direct derivations constructed.  For the
    tree grammar, an all-□ unrooted non-empty graph is decided directly by the
    linear-time recogniser after rooting its lowest-id node.
    """
    if not is_terminally_labelled(grammar, g):
        return Membership.NO
    if grammar.tree_shortcut and g.node_count and all(
        g.label(v) == BOX and g.rootedness(v) == 0 for v in g.nodes
    ) and all(g.edge_label(e) == BOX for e in g.edges):
        return Membership.YES if recognize_tree(plant_root(g)) else Membership.NO
    inverse = invert_system(grammar.system)
    visited = IsoSet()
    visited.add(g)
    target = IsoSet()
    target.add(grammar.start)
    if target.find(g) is not None:
        return Membership.YES
    stack = [g]
    used = 0
    while stack:
        cur = stack.pop()
        steps = steps_from(inverse, cur)
        used += len(steps)
        for s in steps:
            if target.find(s.result) is not None:
                return Membership.YES
            if visited.add(s.result):
                stack.append(s.result)
        if used > budget and stack:
            return Membership.BUDGET_EXCEEDED
    return Membership.NO
