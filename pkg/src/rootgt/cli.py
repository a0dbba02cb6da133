"""Command-line front end: ``rootgt <command> ...``.

Exit codes: 0 success, 1 negative answer (not a tree, not a member, not
confluent), 2 usage or parse error, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench as benchmod
from .confluence import (
    DEFAULT_JOIN_BUDGET,
    INCONCLUSIVE,
    NOT_LOCAL,
    PREDICATES,
    Verdict,
    analyse_pairs,
    confluence_mod_garbage_report,
    critical_pairs,
    non_garbage_pairs,
    predicate,
)
from .encoding import EncodingError, encode_graph, encode_rooted_graph, encode_rooted_system, encode_system
from .grammar import (
    Membership,
    efd_grammar,
    is_input_graph,
    load_builtin_rules,
    load_grammar,
    member,
    tree_grammar,
    tree_reduction,
)
from .graph import Graph, GraphError, validate_graph
from .matching import dangling_ok, find_matches
from .rewrite import apply, derive, invert_system, normal_forms
from .rules import GTSystem, RuleError
from .textio import ParseError, format_graph, format_rule, parse_graph, parse_rules

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def env_budget(default: int) -> int:
    raw = os.environ.get("GT_BUDGET")
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GT_BUDGET must be an integer, got {raw!r}") from None


def graph_record(g: Graph) -> dict:
    return {
        "name": g.name,
        "nodes": [[v, lab, r] for v, lab, r in g.node_items()],
        "edges": [[e, s, t, lab] for e, s, t, lab in g.edge_items()],
    }


class Output:
    """Line output or a JSON record stream, one object per line."""

    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def line(self, text: str = "", **record):
        if self.as_json:
            if record:
                self.stream.write(json.dumps(record, ensure_ascii=False) + "\n")
        else:
            self.stream.write(text + ("" if text.endswith("\n") else "\n"))


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def load_graph(path: str) -> Graph:
    return parse_graph(_read(path), path)


BUILTIN_SYSTEMS = ("tree_recognition", "tree_grammar", "encoded_tree", "efd")


def load_system(args) -> GTSystem:
    if getattr(args, "builtin", None):
        if args.builtin not in BUILTIN_SYSTEMS:
            raise UsageError(f"unknown builtin {args.builtin!r}; choose from {', '.join(BUILTIN_SYSTEMS)}")
        rules = load_builtin_rules(args.builtin)
    elif getattr(args, "rules", None):
        rules = parse_rules(_read(args.rules), args.rules)
    else:
        raise UsageError("give --rules FILE or --builtin NAME")
    if getattr(args, "name", None):
        rules = [r for r in rules if r.name == args.name]
        if not rules:
            raise UsageError(f"no rule named {args.name!r}")
    system = GTSystem(tuple(rules))
    return invert_system(system) if getattr(args, "inverse", False) else system


# ---------------------------------------------------------------------------
# commands


def cmd_match(args, out: Output) -> int:
    system = load_system(args)
    g = load_graph(args.graph)
    total = 0
    lines = []
    for rule in system:
        for m in find_matches(rule.lhs, g, rule.name):
            ok = dangling_ok(rule, m.nmap, g)
            if args.applicable and not ok:
                continue
            total += 1
            images = " ".join(f"{v}->{w}" for v, w in sorted(m.nmap.items()))
            lines.append((f"{rule.name} [{images}]" + ("" if ok else " dangling"), rule.name, m, ok))
    out.line(f"{total} matches" if total != 1 else "1 match", kind="summary", matches=total)
    for text, name, m, ok in lines:
        out.line(text, kind="match", rule=name, nodes=m.nmap, edges=m.emap, dangling_ok=ok)
    return OK


def cmd_apply(args, out: Output) -> int:
    system = load_system(args)
    g = load_graph(args.graph)
    options = [
        (rule, m) for rule in system for m in find_matches(rule.lhs, g, rule.name) if dangling_ok(rule, m.nmap, g)
    ]
    if not options:
        out.line("no applicable match", kind="result", applied=False)
        return NEGATIVE
    if not 0 <= args.index < len(options):
        raise UsageError(f"--index {args.index} out of range (0..{len(options) - 1})")
    rule, m = options[args.index]
    step = apply(rule, m, g, check=False)
    out.line(f"# {step.describe()}", kind="step", rule=rule.name, nodes=m.nmap)
    out.line(format_graph(step.result), kind="graph", graph=graph_record(step.result))
    return OK


def cmd_derive(args, out: Output) -> int:
    system = load_system(args)
    g = load_graph(args.graph)
    d = derive(system, g, strategy=args.strategy, seed=args.seed, max_steps=args.max_steps)
    for i, s in enumerate(d.steps, 1):
        out.line(f"step {i}: {s.describe()}", kind="step", index=i, rule=s.rule.name, nodes=s.match.nmap,
                 graph=graph_record(s.result))
        if not out.as_json:
            out.line(format_graph(s.result, f"step{i}").rstrip("\n"))
    status = "normal-form" if d.normal_form else "stopped"
    out.line(f"{status} after {len(d.steps)} steps", kind="summary", steps=len(d.steps), normal_form=d.normal_form)
    return OK if d.normal_form else BUDGET


def cmd_normal_forms(args, out: Output) -> int:
    system = load_system(args)
    g = load_graph(args.graph)
    nf = normal_forms(system, g, max_steps=env_budget(args.budget))
    out.line(f"{len(nf.graphs)} normal forms", kind="summary", count=len(nf.graphs), truncated=nf.truncated)
    for i, h in enumerate(nf.graphs, 1):
        out.line(format_graph(h, f"nf{i}").rstrip("\n"), kind="graph", graph=graph_record(h))
    if nf.truncated:
        out.line("budget-exceeded", kind="status", status="budget-exceeded")
        return BUDGET
    return OK


def cmd_member(args, out: Output) -> int:
    if args.grammar:
        gram = load_grammar(args.grammar)
    elif args.builtin == "tree":
        gram = tree_grammar()
    elif args.builtin == "efd":
        gram = efd_grammar()
    else:
        raise UsageError("give --grammar FILE or --builtin tree|efd")
    g = load_graph(args.graph)
    verdict = member(gram, g, budget=env_budget(args.budget))
    out.line(verdict.value, kind="membership", result=verdict.value)
    return {Membership.YES: OK, Membership.NO: NEGATIVE, Membership.BUDGET_EXCEEDED: BUDGET}[verdict]


def cmd_recognize_tree(args, out: Output) -> int:
    g = load_graph(args.graph)
    if not is_input_graph(g):
        raise UsageError(f"{args.graph}: input must be all-□ with rootedness everywhere and exactly one root")
    run = tree_reduction(g)
    verdict = "tree" if run.is_tree else "not-a-tree"
    out.line(verdict, kind="recognition", result=verdict, steps=run.steps, rules=run.rule_counts)
    if args.verbose and not out.as_json:
        out.line(f"# {run.steps} steps " + " ".join(f"{k}={v}" for k, v in run.rule_counts.items()))
    return OK if run.is_tree else NEGATIVE


def _pair_record(i, p) -> dict:
    return {
        "kind": "pair",
        "index": i,
        "rules": [p.rule1.name, p.rule2.name],
        "overlap": graph_record(p.overlap),
        "persistent": sorted(p.persistent),
        "garbage": p.garbage,
        "joinable": p.joinable.value if p.joinable else None,
        "strongly_joinable": p.strongly_joinable.value if p.strongly_joinable else None,
    }


def cmd_critical_pairs(args, out: Output) -> int:
    system = load_system(args)
    budget = env_budget(args.budget)
    pairs = critical_pairs(system)
    analyse_pairs(system, pairs, budget, jobs=args.jobs)
    d = predicate(args.predicate)
    non_garbage_pairs(system, d, pairs)
    out.line(f"{len(pairs)} critical pairs", kind="summary", pairs=len(pairs))
    witness_dir = Path(args.out_dir) if args.out_dir else None
    for i, p in enumerate(pairs, 1):
        rec = _pair_record(i, p)
        out.line(
            f"pair {i}: {p.name} garbage={'yes' if p.garbage else 'no'} joinable={p.joinable.value} "
            f"strongly-joinable={p.strongly_joinable.value}",
            **rec,
        )
        if not out.as_json:
            out.line(format_graph(p.overlap, f"overlap{i}").rstrip("\n"))
        if witness_dir is not None and p.joinable is not Verdict.YES:
            witness_dir.mkdir(parents=True, exist_ok=True)
            for tag, g in (("overlap", p.overlap), ("left", p.step1.result), ("right", p.step2.result)):
                (witness_dir / f"pair{i}_{tag}.graph").write_text(format_graph(g, f"pair{i}_{tag}"), encoding="utf-8")
    if any(p.joinable is Verdict.NO and not p.garbage for p in pairs):
        return NEGATIVE
    undecided = any(p.joinable is Verdict.NO_WITHIN_BUDGET for p in pairs)
    return BUDGET if undecided else OK


def cmd_confluence_report(args, out: Output) -> int:
    system = load_system(args)
    report = confluence_mod_garbage_report(
        system,
        predicate(args.predicate),
        env_budget(args.budget),
        sample_trials=args.samples,
        seed=args.seed,
        jobs=args.jobs,
    )
    if out.as_json:
        for i, p in enumerate(report.pairs, 1):
            out.line(**_pair_record(i, p))
        out.line(kind="conclusion", conclusion=report.conclusion, local=report.local_conclusion,
                 justification=report.justification)
    else:
        for text in report.lines():
            out.line(text)
    if report.local_conclusion == NOT_LOCAL:
        return NEGATIVE
    if report.local_conclusion == INCONCLUSIVE and any(
        p.strongly_joinable is Verdict.NO_WITHIN_BUDGET for p in report.non_garbage
    ):
        return BUDGET
    return OK


def cmd_encode(args, out: Output) -> int:
    if args.graph:
        g = load_graph(args.graph)
        if args.mode == "label":
            enc = encode_graph(g)
        else:
            from .encoding import default_markers
            from .graph import alphabet_of

            markers, edge_map = default_markers(alphabet_of(g))
            enc = encode_rooted_graph(g, markers, edge_map)
        out.line(format_graph(enc).rstrip("\n"), kind="graph", graph=graph_record(enc))
        return OK
    system = load_system(args)
    enc = encode_system(system) if args.mode == "label" else encode_rooted_system(system)[0]
    for r in enc:
        out.line(format_rule(r).rstrip("\n"), kind="rule", name=r.name, lhs=graph_record(r.lhs),
                 interface=graph_record(r.interface), rhs=graph_record(r.rhs))
    return OK


def cmd_bench(args, out: Output) -> int:
    classes = [c for c in args.classes.split(",") if c]
    for c in classes:
        if c not in benchmod.GENERATORS:
            raise UsageError(f"unknown class {c!r}; choose from {', '.join(sorted(benchmod.GENERATORS))}")
    sizes = benchmod.parse_sizes(args.sizes)
    progress = None
    if args.verbose:
        progress = lambda r: print(f"# {r.graph_class} n={r.nodes} trial={r.trial} {r.seconds:.4f}s", file=sys.stderr)  # noqa: E731
    records = benchmod.run_benchmark(classes, sizes, args.trials, progress=progress)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            benchmod.write_csv(records, fh)
    elif not out.as_json:
        out.line(benchmod.write_csv(records).rstrip("\n"))
    for cls in classes:
        pts = benchmod.medians(records, cls)
        if len(pts) < 2:
            continue
        fit = benchmod.fit_class(records, cls)
        out.line(f"{cls}: slope={fit.slope:.3f} r2={fit.r_squared:.3f}", kind="fit", graph_class=cls,
                 slope=fit.slope, r_squared=fit.r_squared, points=[list(p) for p in fit.points])
    if out.as_json:
        for r in records:
            out.line(kind="record", graph_class=r.graph_class, nodes=r.nodes, trial=r.trial, seconds=r.seconds,
                     steps=r.steps)
    return OK


def cmd_validate(args, out: Output) -> int:
    text = _read(args.file)
    if args.file.endswith(".rule") or text.lstrip().startswith("rule"):
        rules = parse_rules(text, args.file)
        out.line(f"ok: {len(rules)} rules", kind="validation", ok=True, rules=len(rules))
        return OK
    g = parse_graph(text, args.file, check=False)
    problems = validate_graph(g)
    if problems:
        for v in problems:
            out.line(f"{args.file}: {v}", kind="violation", message=str(v))
        return USAGE
    out.line(f"ok: {g.node_count} nodes, {g.edge_count} edges", kind="validation", ok=True,
             nodes=g.node_count, edges=g.edge_count)
    return OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON records, one per line")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")

    def rules_opts(p, name=True):
        p.add_argument("--rules", help="rule file")
        p.add_argument("--rule", dest="rules", help=argparse.SUPPRESS)
        p.add_argument("--builtin", help="shipped rule set: " + ", ".join(BUILTIN_SYSTEMS))
        p.add_argument("--inverse", action="store_true", help="use the inverse rules")
        if name:
            p.add_argument("--name", help="restrict to the rule with this name")

    parser = argparse.ArgumentParser(prog="rootgt", description="Rooted graph transformation toolkit.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("match", parents=[common], help="list matches of rule left sides")
    rules_opts(p)
    p.add_argument("--applicable", action="store_true", help="only matches satisfying the dangling condition")
    p.add_argument("graph")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("apply", parents=[common], help="apply one rule at one match")
    rules_opts(p)
    p.add_argument("--index", type=int, default=0, help="which applicable match, in match order")
    p.add_argument("graph")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("derive", parents=[common], help="rewrite to normal form, printing each step")
    rules_opts(p)
    p.add_argument("--strategy", choices=("greedy", "random"), default="greedy")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("graph")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("normal-forms", parents=[common], help="all reachable normal forms up to isomorphism")
    rules_opts(p)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("graph")
    p.set_defaults(func=cmd_normal_forms)

    p = sub.add_parser("member", parents=[common], help="grammar membership")
    p.add_argument("--grammar", help="grammar manifest file")
    p.add_argument("--builtin", choices=("tree", "efd"))
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("graph")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("recognize-tree", parents=[common], help="decide whether an input graph is a tree")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("graph")
    p.set_defaults(func=cmd_recognize_tree)

    for cmd, func, helptext in (
        ("critical-pairs", cmd_critical_pairs, "enumerate and analyse critical pairs"),
        ("confluence-report", cmd_confluence_report, "confluence modulo garbage report"),
    ):
        p = sub.add_parser(cmd, parents=[common], help=helptext)
        rules_opts(p, name=False)
        p.add_argument("--predicate", default="all-graphs", choices=sorted(PREDICATES))
        p.add_argument("--budget", type=int, default=DEFAULT_JOIN_BUDGET, help="derivations per joinability leg")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for joinability checks")
        if cmd == "critical-pairs":
            p.add_argument("--out-dir", help="write graph files for pairs not shown joinable")
        else:
            p.add_argument("--samples", type=int, default=0, help="sampling trials for termination/separation evidence")
        p.set_defaults(func=func)

    p = sub.add_parser("encode", parents=[common], help="encode a graph or rule set as totally labelled")
    rules_opts(p, name=False)
    p.add_argument("--mode", choices=("label", "rooted"), default="rooted")
    p.add_argument("graph", nargs="?")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("bench", parents=[common], help="tree recognition scaling benchmark")
    p.add_argument("--class", dest="classes", default="list,star", help="comma list of list,tree,grid,star")
    p.add_argument("--sizes", default="1000..10000:4", help="comma list or LO..HI[:COUNT]")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--out", help="CSV output file (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", parents=[common], help="check a graph or rule file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", 0)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except (UsageError, ParseError, GraphError, RuleError, EncodingError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"rootgt: error: {msg}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
