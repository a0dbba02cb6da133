"""Critical pairs, joinability, garbage predicates and confluence reports."""

from __future__ import annotations

import enum
import itertools
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .encoding import TREE_EDGE_MAP, TREE_MARKERS, EncodingError, decode_rooted_graph
from .gen import tree_oracle
from .graph import Graph, IsoSet, Morphism, has_undirected_cycle, is_acyclic, isomorphisms
from .matching import dangling_ok
from .rewrite import DerivationStep, apply, steps_from
from .rules import GTSystem, Rule

DEFAULT_JOIN_BUDGET = 200


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    NO_WITHIN_BUDGET = "no-within-budget"

    def __bool__(self):
        return self is Verdict.YES


# ---------------------------------------------------------------------------
# independence


def _embeds_into_d(pattern: Graph, m: Morphism, step: DerivationStep) -> bool:
    """Does ``m`` factor through the intermediate graph ``D`` of ``step``?

    Every image item must survive deletion and keep the label and rootedness
    the pattern requires; nodes whose attributes are cleared in ``D`` fail.
    """
    d = step.intermediate
    for v, w in m.nmap.items():
        if w not in d._lab:
            return False
        lab, r = pattern._lab[v], pattern._root[v]
        if lab is not None and d._lab[w] != lab:
            return False
        if r is not None and d._root[w] != r:
            return False
    return all(f in d._src for f in m.emap.values())


def parallelly_independent(step1: DerivationStep, step2: DerivationStep) -> bool:
    """Both matches survive the other step's deletion phase.

    For interfaces that are totally labelled this is the usual
    ``g1(L1) ∩ g2(L2) ⊆ g1(K1) ∩ g2(K2)``; when an interface node drops its
    label or rootedness the overlapping node additionally counts as used.
    """
    return _embeds_into_d(step1.rule.lhs, step1.match, step2) and _embeds_into_d(
        step2.rule.lhs, step2.match, step1
    )


def sequentially_independent(step1: DerivationStep, step2: DerivationStep) -> bool:
    """``step1: G1 ⇒ H`` followed by ``step2: H ⇒ G2``.

    The comatch of the first step must survive into ``D2`` and the second
    match must already exist in ``D1`` (as a subgraph of ``H``).
    """
    if not _embeds_into_d(step1.rule.rhs, step1.comatch, step2):
        return False
    d1 = step1.intermediate
    lhs2 = step2.rule.lhs
    h = step1.result
    for v, w in step2.match.nmap.items():
        if w not in d1._lab:
            return False
        lab, r = lhs2._lab[v], lhs2._root[v]
        # attributes cleared in D1 were (re)written by step 1
        if lab is not None and d1._lab[w] != lab:
            return False
        if r is not None and d1._root[w] != r:
            return False
    return all(f in d1._src and f in h._src for f in step2.match.emap.values())


# ---------------------------------------------------------------------------
# critical pairs


@dataclass
class CriticalPair:
    rule1: Rule
    rule2: Rule
    overlap: Graph
    step1: DerivationStep
    step2: DerivationStep
    persistent: frozenset
    joinable: Optional[Verdict] = None
    strongly_joinable: Optional[Verdict] = None
    garbage: Optional[bool] = None
    witness: Optional[tuple] = None

    @property
    def name(self) -> str:
        return f"{self.rule1.name}/{self.rule2.name}"


def _compatible(a: Graph, v, b: Graph, w) -> bool:
    return a._lab[v] == b._lab[w] and a._root[v] == b._root[w]


def _node_identifications(l1: Graph, l2: Graph):
    """Partial injective maps from ``L2`` nodes to compatible ``L1`` nodes."""
    n2 = l2.nodes
    n1 = l1.nodes
    phi: dict = {}
    used: set = set()

    def rec(i):
        if i == len(n2):
            yield dict(phi)
            return
        v = n2[i]
        yield from rec(i + 1)
        for w in n1:
            if w in used or not _compatible(l2, v, l1, w):
                continue
            phi[v] = w
            used.add(w)
            yield from rec(i + 1)
            used.discard(w)
            del phi[v]

    yield from rec(0)


def _edge_identifications(l1: Graph, l2: Graph, phi: dict):
    """Partial injective maps of ``L2`` edges onto ``L1`` edges consistent with ``phi``."""
    cands = []
    for e in l2.edges:
        s, t = l2._src[e], l2._tgt[e]
        if s in phi and t in phi:
            opts = [
                f
                for f in l1.edges
                if l1._src[f] == phi[s] and l1._tgt[f] == phi[t] and l1._elab[f] == l2._elab[e]
            ]
            if opts:
                cands.append((e, opts))
    chosen: dict = {}
    used: set = set()

    def rec(i):
        if i == len(cands):
            yield dict(chosen)
            return
        e, opts = cands[i]
        yield from rec(i + 1)
        for f in opts:
            if f in used:
                continue
            chosen[e] = f
            used.add(f)
            yield from rec(i + 1)
            used.discard(f)
            del chosen[e]

    yield from rec(0)


def _glue(l1: Graph, l2: Graph, phi: dict, psi: dict) -> tuple:
    """The overlap ``L1 ∪ L2`` with ``L2`` items glued along ``phi``/``psi``."""
    nodes = list(l1.node_items())
    edges = list(l1.edge_items())
    nmap2 = dict(phi)
    nid = l1.next_node_id
    for v, lab, r in l2.node_items():
        if v not in phi:
            nmap2[v] = nid
            nodes.append((nid, lab, r))
            nid += 1
    emap2 = dict(psi)
    eid = l1.next_edge_id
    for e, s, t, lab in l2.edge_items():
        if e not in psi:
            emap2[e] = eid
            edges.append((eid, nmap2[s], nmap2[t], lab))
            eid += 1
    overlap = Graph(nodes, edges, name="overlap", check=False)
    g1 = Morphism(l1, overlap, {v: v for v in l1.nodes}, {e: e for e in l1.edges})
    g2 = Morphism(l2, overlap, nmap2, emap2)
    return overlap, g1, g2


def _automorphisms(g: Graph) -> list:
    return list(isomorphisms(g, g))


def _pair_signature(overlap: Graph, g1: Morphism, g2: Morphism, tag1: str, tag2: str) -> frozenset:
    """Describe the overlap purely through match preimages.

    Overlap items are all covered by the two matches, so two pairs are
    isomorphic (commuting with the matches) exactly when these descriptions
    coincide.
    """
    ntag: dict = {}
    for tag, m in ((tag1, g1), (tag2, g2)):
        for v, w in m.nmap.items():
            ntag.setdefault(w, set()).add((tag, v))
    etag: dict = {}
    for tag, m in ((tag1, g1), (tag2, g2)):
        for e, f in m.emap.items():
            etag.setdefault(f, set()).add((tag, e))
    nodes = frozenset(frozenset(s) for s in ntag.values())
    edges = frozenset(
        (frozenset(ntag[overlap._src[f]]), frozenset(ntag[overlap._tgt[f]]), frozenset(s)) for f, s in etag.items()
    )
    return frozenset({("n", nodes), ("e", edges)})


def _persistent(step1: DerivationStep, step2: DerivationStep) -> frozenset:
    return frozenset(v for v in step1.host.nodes if v in step1.track and v in step2.track)


def critical_pairs(system, *, symmetric: bool = False, modulo_automorphisms: bool = False) -> list:
    """Enumerate the critical pairs of a system, one per isomorphism class.

    Every pair of rules ``(r1, r2)`` (``r1`` not after ``r2`` in rule order)
    is overlapped in all compatible ways: ``L2`` nodes and edges are glued
    injectively onto ``L1`` items with equal labels, rootedness and
    incidence.  A gluing is kept when both matches satisfy the dangling
    condition, the two steps are parallelly dependent, and (for a rule with
    itself) the matches differ.

    Pairs are identified up to isomorphism of the overlap commuting with the
    matches.  ``modulo_automorphisms`` additionally identifies pairs that
    differ by a symmetry of ``L1`` or ``L2``; ``symmetric`` keeps both
    orders ``(r1, r2)`` and ``(r2, r1)``.
    """
    rules = list(system)
    pairs = []
    for i, j in itertools.product(range(len(rules)), repeat=2):
        if not symmetric and j < i:
            continue
        r1, r2 = rules[i], rules[j]
        pairs.extend(_pairs_for(r1, r2, same=(i == j), symmetric=symmetric, mod_auto=modulo_automorphisms))
    return pairs


def _pairs_for(r1: Rule, r2: Rule, *, same: bool, symmetric: bool, mod_auto: bool) -> list:
    l1, l2 = r1.lhs, r2.lhs
    autos1 = _automorphisms(l1) if mod_auto else [({v: v for v in l1.nodes}, {e: e for e in l1.edges})]
    autos2 = _automorphisms(l2) if mod_auto else [({v: v for v in l2.nodes}, {e: e for e in l2.edges})]
    seen: set = set()
    out = []
    for phi in _node_identifications(l1, l2):
        if not phi:
            continue
        for psi in _edge_identifications(l1, l2, phi):
            overlap, g1, g2 = _glue(l1, l2, phi, psi)
            if same and g1.nmap == g2.nmap and g1.emap == g2.emap:
                continue
            if not dangling_ok(r1, g1.nmap, overlap) or not dangling_ok(r2, g2.nmap, overlap):
                continue
            sig = _pair_signature(overlap, g1, g2, "1", "2")
            variants = set()
            for (a1n, a1e), (a2n, a2e) in itertools.product(autos1, autos2):
                variants.add(_canon(sig, a1n, a1e, a2n, a2e))
            if same and not symmetric:
                swapped = _swap(sig)
                for (a1n, a1e), (a2n, a2e) in itertools.product(autos1, autos2):
                    variants.add(_canon(swapped, a1n, a1e, a2n, a2e))
            key = min(variants, key=repr)
            if key in seen:
                continue
            step1 = apply(r1, g1, overlap, check=False)
            step2 = apply(r2, g2, overlap, check=False)
            if parallelly_independent(step1, step2):
                continue
            seen.add(key)
            out.append(CriticalPair(r1, r2, overlap, step1, step2, _persistent(step1, step2)))
    return out


def _canon(sig, a1n, a1e, a2n, a2e):
    """Rename preimages by automorphisms; node and edge ids are kept apart by position."""

    def t(item_set, edge=False):
        res = []
        for tag, x in item_set:
            if tag == "1":
                res.append((tag, (a1e if edge else a1n).get(x, x)))
            else:
                res.append((tag, (a2e if edge else a2n).get(x, x)))
        return frozenset(res)

    out = set()
    for kind, body in sig:
        if kind == "n":
            out.add(("n", frozenset(t(s) for s in body)))
        else:
            out.add(("e", frozenset((t(a), t(b), t(c, True)) for a, b, c in body)))
    return frozenset(out)


def _swap(sig):
    def t(item_set):
        return frozenset(({"1": "2", "2": "1"}[tag], x) for tag, x in item_set)

    out = set()
    for kind, body in sig:
        if kind == "n":
            out.add(("n", frozenset(t(s) for s in body)))
        else:
            out.add(("e", frozenset((t(a), t(b), t(c)) for a, b, c in body)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# tracks and joinability


def track(step: DerivationStep) -> dict:
    return dict(step.track)


def track_seq(steps: Iterable[DerivationStep]) -> dict:
    """Compose per-step tracks as partial maps (identity on the first host if empty)."""
    steps = list(steps)
    if not steps:
        return {}
    tr = {v: v for v in steps[0].host.nodes}
    for s in steps:
        tr = {v: s.track[w] for v, w in tr.items() if w in s.track}
    return tr


def _explore(system, start: Graph, tr: dict, budget: int, marked: bool, persistent) -> tuple:
    """Breadth-first reachable graphs with their tracks from the overlap.

    Returns ``(states, exhausted)`` where ``exhausted`` means every reachable
    state was expanded within ``budget`` derivations.
    """
    seen = IsoSet()

    def marks(g, t):
        return {t[v]: ("p", v) for v in persistent if v in t} if marked else None

    seen.add(start, marks(start, tr), payload=(start, tr))
    queue = deque([(start, tr)])
    used = 0
    exhausted = True
    while queue:
        g, t = queue.popleft()
        steps = steps_from(system, g)
        if used + len(steps) > budget and steps:
            exhausted = False
            break
        used += len(steps)
        for s in steps:
            nt = {v: s.track[w] for v, w in t.items() if w in s.track}
            if seen.add(s.result, marks(s.result, nt), payload=(s.result, nt)):
                queue.append((s.result, nt))
    return list(seen), exhausted


def joinable(pair: CriticalPair, system, budget: int = DEFAULT_JOIN_BUDGET) -> Verdict:
    left, ex1 = _explore(system, pair.step1.result, pair.step1.track, budget, False, ())
    right, ex2 = _explore(system, pair.step2.result, pair.step2.track, budget, False, ())
    pool = IsoSet()
    for g, _ in left:
        pool.add(g)
    for g, t in right:
        if pool.find(g) is not None:
            return Verdict.YES
    return Verdict.NO if ex1 and ex2 else Verdict.NO_WITHIN_BUDGET


def strongly_joinable(pair: CriticalPair, system, budget: int = DEFAULT_JOIN_BUDGET) -> Verdict:
    """Joinable through a common graph in which every persistent node's tracks coincide."""
    pers = pair.persistent
    left, ex1 = _explore(system, pair.step1.result, pair.step1.track, budget, True, pers)
    right, ex2 = _explore(system, pair.step2.result, pair.step2.track, budget, True, pers)
    pool = IsoSet()
    for g, t in left:
        if all(v in t for v in pers):
            pool.add(g, {t[v]: ("p", v) for v in pers})
    for g, t in right:
        if all(v in t for v in pers) and pool.find(g, {t[v]: ("p", v) for v in pers}) is not None:
            return Verdict.YES
    return Verdict.NO if ex1 and ex2 else Verdict.NO_WITHIN_BUDGET


# ---------------------------------------------------------------------------
# garbage predicates


@dataclass(frozen=True)
class GarbagePredicate:
    """A set ``D`` of good graphs together with a membership test for its subgraph closure."""

    name: str
    member: Callable
    closure_member: Callable
    sampler: Optional[Callable] = None


def _forest_shape(g) -> bool:
    return all(len(g._in[v]) <= 1 for v in g._lab) and not has_undirected_cycle(g)


def _no_t_free_cycle(g) -> bool:
    keep = [e for e in g.edges if g.edge_label(e) != "t"]
    return is_acyclic(g.restrict(g.nodes, keep))


def _efd_member(g) -> bool:
    from .grammar import Membership, efd_grammar, member

    return member(efd_grammar(), g, budget=5_000) is Membership.YES


def _encoded_tree_member(g) -> bool:
    try:
        dec = decode_rooted_graph(g, TREE_MARKERS, TREE_EDGE_MAP)
    except EncodingError:
        return False
    if not dec.is_tlrg() or len(dec.root_nodes()) != 1:
        return False
    if any(dec.edge_label(e) != "□" for e in dec.edges):
        return False
    return tree_oracle(dec)


def _encoded_tree_closure(g) -> bool:
    markers = set(TREE_MARKERS.values())
    root_markers = {TREE_MARKERS[("□", 1)], TREE_MARKERS[("△", 1)]}
    roots = 0
    plain = []
    loops_at: dict = {}
    if any(g.label(v) != "□" or g.rootedness(v) != 0 for v in g.nodes):
        return False
    for e, s, t, lab in g.edge_items():
        if lab in markers:
            if s != t:
                return False
            loops_at[s] = loops_at.get(s, 0) + 1
            if loops_at[s] > 1:
                return False
            roots += lab in root_markers
        elif lab == "△":
            plain.append(e)
        else:
            return False
    if roots > 1:
        return False
    return _forest_shape(g.restrict(g.nodes, plain))


def _sample_trees(rng: random.Random, n_max: int = 8) -> Graph:
    from .gen import plant_root, random_tree

    return plant_root(random_tree(rng.randint(1, n_max), rng))


def _sample_encoded_trees(rng: random.Random) -> Graph:
    from .encoding import encode_rooted_graph

    return encode_rooted_graph(_sample_trees(rng), TREE_MARKERS, TREE_EDGE_MAP)


def _sample_efd(rng: random.Random, max_steps: int = 4) -> Graph:
    from .grammar import efd_grammar
    from .rewrite import steps_from as _steps

    gram = efd_grammar()
    g = gram.start
    for _ in range(rng.randint(0, max_steps)):
        options = _steps(gram.system, g)
        if not options:
            break
        g = rng.choice(options).result
    return g


PREDICATES = {
    "all-graphs": GarbagePredicate("all-graphs", lambda g: True, lambda g: True),
    "forests": GarbagePredicate("forests", tree_oracle, _forest_shape, _sample_trees),
    "acyclic": GarbagePredicate("acyclic", is_acyclic, is_acyclic),
    "t-edge-cycle": GarbagePredicate("t-edge-cycle", _efd_member, _no_t_free_cycle, _sample_efd),
    "encoded-input-tree": GarbagePredicate(
        "encoded-input-tree", _encoded_tree_member, _encoded_tree_closure, _sample_encoded_trees
    ),
}
PREDICATES["encoded-forest"] = PREDICATES["encoded-input-tree"]


def predicate(name: str) -> GarbagePredicate:
    try:
        return PREDICATES[name]
    except KeyError:
        raise KeyError(f"unknown predicate {name!r}; choose from {sorted(PREDICATES)}") from None


def non_garbage_pairs(system, d: GarbagePredicate, pairs: Optional[list] = None) -> list:
    """Critical pairs whose overlap lies in the subgraph closure of ``D``."""
    pairs = critical_pairs(system) if pairs is None else pairs
    out = []
    for p in pairs:
        p.garbage = not d.closure_member(p.overlap)
        if not p.garbage:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# sampling checks and the report


@dataclass
class SeparationReport:
    trials: int
    counterexample: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def check_weak_garbage_separation(system, d: GarbagePredicate, sampler=None, trials: int = 50, seed: int = 0):
    """Falsifier: sample ``G ∈ D`` and check that every successor stays in ``D``."""
    sampler = sampler or d.sampler
    if sampler is None:
        raise ValueError(f"predicate {d.name} has no sampler")
    rng = random.Random(seed)
    for _ in range(trials):
        g = sampler(rng)
        if not d.member(g):
            continue
        for s in steps_from(system, g):
            if not d.member(s.result):
                return SeparationReport(trials, (g, s))
    return SeparationReport(trials)


def check_termination_sample(system, d: GarbagePredicate, sampler=None, trials: int = 20, max_steps: int = 500, seed: int = 0):
    """Random derivations from sampled members of ``D`` must stop within ``max_steps``."""
    sampler = sampler or d.sampler
    rng = random.Random(seed)
    for _ in range(trials):
        g = sampler(rng)
        for _ in range(max_steps):
            options = steps_from(system, g)
            if not options:
                break
            g = rng.choice(options).result
        else:
            return False
    return True


LOCAL = "locally confluent modulo garbage"
GLOBAL = "confluent modulo garbage (evidence-based)"
NOT_LOCAL = "not locally confluent modulo garbage"
INCONCLUSIVE = "inconclusive"


@dataclass
class ConfluenceReport:
    predicate: str
    pairs: list
    conclusion: str
    local_conclusion: str
    justification: list = field(default_factory=list)

    @property
    def non_garbage(self) -> list:
        return [p for p in self.pairs if not p.garbage]

    def lines(self) -> list:
        out = [f"predicate: {self.predicate}", f"critical pairs: {len(self.pairs)}"]
        for i, p in enumerate(self.pairs, 1):
            out.append(
                f"pair {i}: {p.name} overlap={p.overlap.node_count}n/{p.overlap.edge_count}e "
                f"garbage={'yes' if p.garbage else 'no'} joinable={p.joinable.value} "
                f"strongly-joinable={p.strongly_joinable.value}"
            )
        out.extend(self.justification)
        out.append(f"conclusion: {self.conclusion}")
        return out


def _analyse(args):
    pair, system, budget = args
    return joinable(pair, system, budget), strongly_joinable(pair, system, budget)


def analyse_pairs(system, pairs: list, budget: int = DEFAULT_JOIN_BUDGET, jobs: int = 1) -> list:
    """Fill in joinability verdicts; ``jobs > 1`` spreads pairs over worker processes."""
    work = [(p, system, budget) for p in pairs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyse, work))
    else:
        results = [_analyse(w) for w in work]
    for p, (j, s) in zip(pairs, results):
        p.joinable, p.strongly_joinable = j, s
    return pairs


def confluence_mod_garbage_report(
    system,
    d: GarbagePredicate,
    budget: int = DEFAULT_JOIN_BUDGET,
    *,
    sample_trials: int = 0,
    seed: int = 0,
    jobs: int = 1,
) -> ConfluenceReport:
    """Critical-pair analysis restricted to non-garbage overlaps, with the strongest sound conclusion.

    With ``sample_trials > 0`` and a sampler on ``d``, termination and weak
    garbage separation are checked on samples; passing both upgrades the
    conclusion to confluence modulo garbage, flagged as evidence-based.
    """
    rules = list(system)
    if not rules:
        return ConfluenceReport(d.name, [], "confluent", "confluent", ["no rules: every graph is a normal form"])
    pairs = analyse_pairs(system, critical_pairs(system), budget, jobs)
    ng = non_garbage_pairs(system, d, pairs)
    why = [f"non-garbage pairs: {len(ng)} of {len(pairs)}"]
    if all(p.strongly_joinable is Verdict.YES for p in ng):
        local = LOCAL
        why.append("all non-garbage critical pairs are strongly joinable")
        conclusion = local
        if sample_trials and d.sampler is not None:
            term = check_termination_sample(system, d, trials=sample_trials, seed=seed)
            sep = check_weak_garbage_separation(system, d, trials=sample_trials, seed=seed)
            why.append(f"termination on samples: {'ok' if term else 'failed'}")
            why.append(f"weak garbage separation on samples: {'ok' if sep.ok else 'counterexample found'}")
            if term and sep.ok:
                conclusion = GLOBAL
    else:
        bad = [p for p in ng if p.joinable is Verdict.NO and d.member(p.overlap)]
        if bad:
            local = NOT_LOCAL
            why.append(f"pair {bad[0].name} is not joinable and its overlap is a member of D")
        else:
            local = INCONCLUSIVE
            weak = [p for p in ng if p.strongly_joinable is not Verdict.YES]
            why.append(f"{len(weak)} non-garbage pair(s) not shown strongly joinable")
        conclusion = local
    return ConfluenceReport(d.name, pairs, conclusion, local, why)
