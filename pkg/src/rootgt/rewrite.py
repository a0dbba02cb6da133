"""Rule application, derivations, and rule/system comparisons."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .graph import (
    Graph,
    IsoSet,
    LabelAlphabet,
    Morphism,
    component_node_sets,
    is_injective,
    is_morphism,
    isomorphisms,
)
from .hostgraph import HostGraph
from .matching import Match, dangling_ok, find_matches, satisfies_dangling
from .rules import GTSystem, Rule, RuleError

__all__ = [
    "ApplicationError",
    "DerivationStep",
    "Derivation",
    "NormalForms",
    "RuleClass",
    "apply",
    "rewrite_in_place",
    "invert_rule",
    "invert_system",
    "invert_step",
    "steps_from",
    "successors",
    "derive",
    "normal_forms",
    "classify_rule",
    "normalize_rule",
    "rules_isomorphic",
    "systems_equivalent",
    "enumerate_graphs",
    "Rule",
    "GTSystem",
    "RuleError",
]


class ApplicationError(ValueError):
    """The match is not a valid injective, dangling-free match."""


@dataclass(frozen=True, eq=False)
class DerivationStep:
    rule: Rule
    host: Graph
    match: Morphism
    intermediate: Graph
    comatch: Morphism
    result: Graph
    track: dict = field(default_factory=dict)

    def describe(self) -> str:
        images = " ".join(f"{v}->{w}" for v, w in sorted(self.match.nmap.items()))
        return f"{self.rule.name} [{images}]"


def rewrite_in_place(hg: HostGraph, rule: Rule, nmap: dict, emap: dict, on_deleted: Callable = None) -> tuple:
    """Apply ``rule`` at the match in place; return the comatch maps.

    Follows the two-phase construction: delete the image of ``L∖K`` and clear
    labels/rootedness the interface leaves undefined (giving ``D``), then add
    ``R∖K`` with fresh ids in ascending id order and set the cleared
    attributes from ``R``.
    """
    for e in rule.deleted_edges:
        hg.remove_edge(emap[e])
    for v in rule.deleted_nodes:
        hg.remove_node(nmap[v])
    for v in rule.cleared_labels:
        hg.set_label(nmap[v], None)
    for v in rule.cleared_roots:
        hg.set_rootedness(nmap[v], None)
    if on_deleted is not None:
        on_deleted(hg)
    k = rule.interface
    rhs = rule.rhs
    co_n = {v: nmap[v] for v in k._lab}
    co_e = {e: emap[e] for e in k._src}
    for v in rule.added_nodes:
        co_n[v] = hg.add_node(rhs._lab[v], rhs._root[v])
    for e in rule.added_edges:
        co_e[e] = hg.add_edge(co_n[rhs._src[e]], co_n[rhs._tgt[e]], rhs._elab[e])
    for v in rule.cleared_labels:
        hg.set_label(co_n[v], rhs._lab[v])
    for v in rule.cleared_roots:
        hg.set_rootedness(co_n[v], rhs._root[v])
    return co_n, co_e


def apply(rule: Rule, match, host: Graph, *, check: bool = True) -> DerivationStep:
    """Apply ``rule`` to ``host`` at ``match`` (a :class:`Match` or :class:`Morphism`)."""
    m = match.morphism if isinstance(match, Match) else match
    if check:
        if m.source != rule.lhs or not is_morphism(Morphism(rule.lhs, host, m.nmap, m.emap)):
            raise ApplicationError(f"not a morphism from the left graph of {rule.name}")
        if not is_injective(m):
            raise ApplicationError("match is not injective")
        if not satisfies_dangling(rule, Morphism(rule.lhs, host, m.nmap, m.emap)):
            raise ApplicationError("match violates the dangling condition")
    hg = HostGraph(host)
    snapshot = []
    co_n, co_e = rewrite_in_place(hg, rule, m.nmap, m.emap, on_deleted=lambda h: snapshot.append(h.freeze(host.name)))
    d = snapshot[0]
    result = hg.freeze(host.name)
    track = {v: v for v in d._lab}
    return DerivationStep(
        rule=rule,
        host=host,
        match=Morphism(rule.lhs, host, dict(m.nmap), dict(m.emap)),
        intermediate=d,
        comatch=Morphism(rule.rhs, result, co_n, co_e),
        result=result,
        track=track,
    )


def invert_rule(rule: Rule) -> Rule:
    return rule.inverse()


def invert_system(system: GTSystem) -> GTSystem:
    return GTSystem(tuple(r.inverse() for r in system.rules), system.alphabet)


def invert_step(step: DerivationStep) -> DerivationStep:
    """The step ``H ⇒ G′`` by the inverse rule, using the comatch as match."""
    return apply(step.rule.inverse(), step.comatch, step.result)


# ---------------------------------------------------------------------------
# derivations


def steps_from(system, g: Graph) -> list:
    """Every direct derivation from ``g``: rule order, then match order."""
    steps = []
    for rule in system:
        for m in find_matches(rule.lhs, g, rule.name):
            if dangling_ok(rule, m.nmap, g):
                steps.append(apply(rule, m, g, check=False))
    return steps


def successors(system, g: Graph, *, dedupe: bool = True) -> list:
    """Direct derivations from ``g``; with ``dedupe`` one step per result iso class."""
    steps = steps_from(system, g)
    if not dedupe:
        return steps
    seen = IsoSet()
    out = []
    for s in steps:
        if seen.add(s.result):
            out.append(s)
    return out


@dataclass
class Derivation:
    start: Graph
    steps: list
    final: Graph
    normal_form: bool

    def __len__(self):
        return len(self.steps)


def derive(system, g: Graph, *, strategy: str = "greedy", seed: int = 0, max_steps: Optional[int] = None) -> Derivation:
    """Rewrite until no rule applies (or ``max_steps`` is reached).

    ``greedy`` takes the first rule in order and its first applicable match;
    ``random`` picks uniformly among all applicable steps.
    """
    rng = random.Random(seed)
    steps = []
    current = g
    while max_steps is None or len(steps) < max_steps:
        if strategy == "greedy":
            step = None
            for rule in system:
                for m in find_matches(rule.lhs, current, rule.name):
                    if dangling_ok(rule, m.nmap, current):
                        step = apply(rule, m, current, check=False)
                        break
                if step is not None:
                    break
        elif strategy == "random":
            options = steps_from(system, current)
            step = rng.choice(options) if options else None
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if step is None:
            return Derivation(g, steps, current, True)
        steps.append(step)
        current = step.result
    return Derivation(g, steps, current, not steps_from(system, current))


@dataclass
class NormalForms:
    graphs: list
    truncated: bool
    derivations: int

    @property
    def budget_exceeded(self) -> bool:
        return self.truncated


def normal_forms(system, g: Graph, max_steps: int = 10_000) -> NormalForms:
    """All normal forms reachable from ``g`` (up to isomorphism).

    Depth-first search over the derivation tree with an isomorphism-keyed
    visited set.  The budget counts direct derivations constructed; when it
    runs out the result is flagged as truncated.
    """
    visited = IsoSet()
    visited.add(g)
    forms = IsoSet()
    stack = [g]
    used = 0
    truncated = False
    while stack:
        cur = stack.pop()
        steps = steps_from(system, cur)
        used += len(steps)
        if not steps:
            forms.add(cur)
            continue
        if used > max_steps:
            truncated = True
            break
        for s in reversed(steps):
            if visited.add(s.result):
                stack.append(s.result)
    return NormalForms(list(forms), truncated, used)


# ---------------------------------------------------------------------------
# rule classes


@dataclass(frozen=True)
class RuleClass:
    fast: bool
    root_non_increasing: bool
    degree_non_increasing: bool


def classify_rule(rule: Rule, degree_bound: Optional[int] = None) -> RuleClass:
    """Evaluate the fast, root non-increasing and degree non-increasing conditions.

    ``degree_bound`` is the host degree bound ``N``; ``None`` leaves the
    degree of added nodes unconstrained.
    """
    lhs, k, rhs = rule.lhs, rule.interface, rule.rhs
    fast = all(any(lhs._root[v] == 1 for v in comp) for comp in component_node_sets(lhs))
    rni = len(lhs.root_nodes()) >= len(rhs.root_nodes())

    def deg(g, v):
        return len(g._in[v]) + len(g._out[v])

    dni = all(deg(lhs, v) >= deg(rhs, v) for v in k._lab)
    if degree_bound is not None:
        dni = dni and all(deg(rhs, v) <= degree_bound for v in rule.added_nodes)
    return RuleClass(fast, rni, dni)


def normalize_rule(rule: Rule) -> Rule:
    """Strip the interface down to its bare node set."""
    k = Graph(((v, None, None) for v in rule.interface.nodes), (), name=rule.interface.name)
    return Rule(rule.name, rule.lhs, k, rule.rhs)


# ---------------------------------------------------------------------------
# equivalences


def _interface_preserved(r1: Rule, r2: Rule, nm: dict, em: dict) -> bool:
    k1, k2 = r1.interface, r2.interface
    if len(k1._lab) != len(k2._lab) or len(k1._src) != len(k2._src):
        return False
    for v in k1._lab:
        w = nm[v]
        if w not in k2._lab or k2._lab[w] != k1._lab[v] or k2._root[w] != k1._root[v]:
            return False
    return all(em[e] in k2._src for e in k1._src)


def rules_isomorphic(r1: Rule, r2: Rule) -> bool:
    """Isomorphisms of the left and right graphs that agree on the interface."""
    for nm, em in isomorphisms(r1.lhs, r2.lhs):
        if not _interface_preserved(r1, r2, nm, em):
            continue
        fixed = {v: nm[v] for v in r1.interface._lab}
        for rn, re_ in isomorphisms(r1.rhs, r2.rhs, fixed=fixed):
            if all(re_[e] == em[e] for e in r1.interface._src):
                return True
    return False


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    mode: str
    bounded: bool = False
    witness: Optional[Graph] = None

    def __bool__(self):
        return self.equivalent


def _same_quotient(rs1, rs2) -> bool:
    return all(any(rules_isomorphic(a, b) for b in rs2) for a in rs1) and all(
        any(rules_isomorphic(b, a) for a in rs1) for b in rs2
    )


def enumerate_graphs(alphabet: LabelAlphabet, bound: int, *, rooted: bool = True) -> list:
    """All totally labelled (and rooted) graphs with ``|V| + |E| ≤ bound``, one per iso class."""
    node_kinds = [(lab, r) for lab in sorted(alphabet.node_labels) for r in ((0, 1) if rooted else (0,))]
    edge_labels = sorted(alphabet.edge_labels)
    seen = IsoSet()
    for n in range(bound + 1):
        for kinds in itertools.combinations_with_replacement(node_kinds, n):
            slots = [(s, t, lab) for s in range(n) for t in range(n) for lab in edge_labels]
            for m in range(bound - n + 1):
                for edges in itertools.combinations_with_replacement(slots, m):
                    g = Graph(
                        [(i, lab, r) for i, (lab, r) in enumerate(kinds)],
                        [(j, s, t, lab) for j, (s, t, lab) in enumerate(edges)],
                    )
                    seen.add(g)
    return list(seen)


def _successor_classes(system, g: Graph) -> IsoSet:
    out = IsoSet()
    for s in steps_from(system, g):
        out.add(s.result)
    return out


def _same_classes(a: IsoSet, b: IsoSet) -> bool:
    return len(a) == len(b) and all(b.find(g) is not None for g in a)


def systems_equivalent(t1: GTSystem, t2: GTSystem, mode: str = "iso", bound: int = 3) -> EquivalenceResult:
    """Compare two systems by rule isomorphism, normal-form isomorphism, or bounded steps.

    ``mode="stepwise"`` checks identical successor classes on every graph of
    total size at most ``bound``; a positive answer is only a bounded
    confirmation and is reported with ``bounded=True``.
    """
    if mode == "iso":
        return EquivalenceResult(_same_quotient(t1.rules, t2.rules), mode)
    if mode == "normalisation":
        n1 = [normalize_rule(r) for r in t1.rules]
        n2 = [normalize_rule(r) for r in t2.rules]
        return EquivalenceResult(_same_quotient(n1, n2), mode)
    if mode == "stepwise":
        alphabet = t1.alphabet.union(t2.alphabet)
        for g in enumerate_graphs(alphabet, bound):
            if not _same_classes(_successor_classes(t1, g), _successor_classes(t2, g)):
                return EquivalenceResult(False, mode, True, g)
        return EquivalenceResult(True, mode, True)
    raise ValueError(f"unknown mode {mode!r}")
