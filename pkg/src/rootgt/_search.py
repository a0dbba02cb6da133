"""Backtracking morphism search shared by matching and isomorphism testing.

The pattern is compiled into a plan: per connected component an anchor node,
then nodes reached along pattern edges (so candidates come from the host's
adjacency of an already mapped node), and "closing" edges whose endpoints are
both mapped.  The generator yields the live ``(nmap, emap)`` dicts; callers
that keep a result must copy it.
"""

from __future__ import annotations

from typing import Callable, Iterator, Optional


class Plan:
    __slots__ = ("steps", "pattern")

    def __init__(self, pattern, prefer_roots: bool):
        self.pattern = pattern
        self.steps = _compile(pattern, prefer_roots)


def _compile(p, prefer_roots: bool) -> list:
    placed: set = set()
    planned_edges: set = set()
    steps = []
    remaining = set(p._lab)

    def closes_for(v):
        out = []
        for e in list(p._out[v]) + list(p._in[v]):
            if e in planned_edges:
                continue
            if p._src[e] in placed and p._tgt[e] in placed:
                planned_edges.add(e)
                out.append(e)
        return tuple(sorted(out))

    while remaining:
        roots = sorted(v for v in remaining if p._root[v] == 1)
        if prefer_roots and roots:
            start = roots[0]
        else:
            # most constrained first: rooted, then highest degree, then lowest id
            start = min(
                remaining,
                key=lambda v: (p._root[v] != 1, -(len(p._in[v]) + len(p._out[v])), v),
            )
        placed.add(start)
        remaining.discard(start)
        steps.append((start, None, None, None, closes_for(start)))
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for e in sorted(p._out[u]):
                    w = p._tgt[e]
                    if w in placed:
                        continue
                    placed.add(w)
                    remaining.discard(w)
                    planned_edges.add(e)
                    steps.append((w, e, u, True, closes_for(w)))
                    nxt.append(w)
                for e in sorted(p._in[u]):
                    w = p._src[e]
                    if w in placed:
                        continue
                    placed.add(w)
                    remaining.discard(w)
                    planned_edges.add(e)
                    steps.append((w, e, u, False, closes_for(w)))
                    nxt.append(w)
            frontier = nxt
    return steps


def plan_for(pattern, prefer_roots: bool = False) -> Plan:
    cache = getattr(pattern, "_cache", None)
    if cache is None:
        return Plan(pattern, prefer_roots)
    key = ("plan", prefer_roots)
    plan = cache.get(key)
    if plan is None:
        plan = cache[key] = Plan(pattern, prefer_roots)
    return plan


def search(
    p,
    h,
    *,
    injective: bool = True,
    strict: bool = False,
    colours: Optional[tuple] = None,
    fixed: Optional[dict] = None,
    anchors: Optional[Callable] = None,
    prefer_roots: bool = False,
    counter: Optional[list] = None,
    accept: Optional[Callable] = None,
    degree_checks: tuple = (),
) -> Iterator[tuple]:
    """Enumerate morphisms ``p → h``.

    ``strict`` compares labels and rootedness exactly (``None`` only matches
    ``None``); otherwise an undefined pattern attribute matches anything.
    ``anchors(h)`` supplies candidates for component anchors (defaults to all
    host nodes).  ``counter`` is a one-element list incremented per node
    assignment tried.  ``accept(nmap, emap)`` filters complete results before
    they are yielded.  ``degree_checks`` is a tuple of ``(v, indeg, outdeg)``
    that the image of ``v`` must have exactly; it is evaluated on complete
    results only, before ``accept``.
    """
    steps = plan_for(p, prefer_roots).steps
    n_steps = len(steps)
    plab, proot, psrc, ptgt, pelab = p._lab, p._root, p._src, p._tgt, p._elab
    hlab, hroot, hsrc, htgt, helab, hout, hin = h._lab, h._root, h._src, h._tgt, h._elab, h._out, h._in
    cp, ch = colours if colours else (None, None)
    fixed = fixed or {}
    nmap: dict = {}
    emap: dict = {}
    used_n: set = set()
    used_e: set = set()
    if counter is None:
        counter = [0]

    def node_ok(v, w):
        if injective and w in used_n:
            return False
        lab = plab[v]
        if strict:
            if hlab[w] != lab or hroot[w] != proot[v]:
                return False
        else:
            if lab is not None and hlab[w] != lab:
                return False
            r = proot[v]
            if r is not None and hroot[w] != r:
                return False
        if cp is not None and cp[v] != ch[w]:
            return False
        f = fixed.get(v)
        if f is not None and f != w:
            return False
        return True

    last = n_steps - 1

    def final_ok():
        for v, a, b in degree_checks:
            w = nmap[v]
            if len(hin[w]) != a or len(hout[w]) != b:
                return False
        return accept is None or accept(nmap, emap)

    def close(i, closes, j):
        if j == len(closes):
            if i == last:
                if final_ok():
                    yield nmap, emap
            else:
                yield from rec(i + 1)
            return
        e = closes[j]
        hs, ht = nmap[psrc[e]], nmap[ptgt[e]]
        lab = pelab[e]
        for f in list(hout[hs]):
            if htgt[f] != ht or helab[f] != lab:
                continue
            if injective and f in used_e:
                continue
            emap[e] = f
            used_e.add(f)
            yield from close(i, closes, j + 1)
            used_e.discard(f)
            del emap[e]

    def rec(i):
        v, e, frm, outward, closes = steps[i]
        at_leaf = i == last and not closes
        if e is None:
            if v in fixed:
                cands = (fixed[v],)
            elif anchors is not None:
                cands = anchors(h, p, v)
            else:
                cands = sorted(hlab)
            for w in cands:
                counter[0] += 1
                if w not in hlab or not node_ok(v, w):
                    continue
                nmap[v] = w
                used_n.add(w)
                if at_leaf:
                    if final_ok():
                        yield nmap, emap
                else:
                    yield from close(i, closes, 0)
                used_n.discard(w)
                del nmap[v]
            return
        lab = pelab[e]
        vlab, vroot = plab[v], proot[v]
        simple = not strict and cp is None and v not in fixed
        base = nmap[frm]
        for f in list(hout[base] if outward else hin[base]):
            if helab[f] != lab:
                continue
            if injective and f in used_e:
                continue
            w = htgt[f] if outward else hsrc[f]
            counter[0] += 1
            if simple:
                if injective and w in used_n:
                    continue
                if vlab is not None and hlab[w] != vlab:
                    continue
                if vroot is not None and hroot[w] != vroot:
                    continue
            elif not node_ok(v, w):
                continue
            if at_leaf and dc_v is not None:
                # the match is complete here, so the degree test can run
                # before touching the bookkeeping structures
                w2 = w if dc_v == v else nmap[dc_v]
                if len(hin[w2]) != dc_a or len(hout[w2]) != dc_b:
                    continue
            nmap[v] = w
            emap[e] = f
            used_n.add(w)
            used_e.add(f)
            if at_leaf:
                if final_ok():
                    yield nmap, emap
            else:
                yield from close(i, closes, 0)
            used_e.discard(f)
            used_n.discard(w)
            del emap[e]
            del nmap[v]

    dc_v = dc_a = dc_b = None
    if len(degree_checks) == 1:
        dc_v, dc_a, dc_b = degree_checks[0]

    if n_steps == 0:
        if accept is None or accept(nmap, emap):
            yield nmap, emap
        return
    yield from rec(0)
