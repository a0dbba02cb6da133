"""Reading and writing the plain-text graph, rule and grammar formats.

Graph::

    graph <name> {
      node <id> [label=<sym>] [root=0|1]
      edge <id> <src> -> <tgt> label=<sym>
    }

A rule file holds one or more ``rule <name> { left {..} interface {..} right {..} }``
blocks.  A grammar manifest is ``grammar { key=value ... }``.  ``#`` starts
a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .graph import Graph, GraphError, validate_graph
from .rules import Rule, RuleError

_TOKEN = re.compile(r"->|[{}=]|[^\s{}=#]+")


class ParseError(ValueError):
    def __init__(self, source: str, line: int, production: str, message: str):
        self.source, self.line, self.production = source, line, production
        super().__init__(f"{source}:{line}: {message} (in {production})")


@dataclass
class _Tok:
    text: str
    line: int


def _tokenize(text: str) -> list:
    toks = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        toks.extend(_Tok(m.group(0), lineno) for m in _TOKEN.finditer(line))
    return toks


class _Parser:
    def __init__(self, text: str, source: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.source = source
        self.last_line = max((t.line for t in self.toks), default=1)

    def peek(self) -> Optional[str]:
        return self.toks[self.pos].text if self.pos < len(self.toks) else None

    def line(self) -> int:
        return self.toks[self.pos].line if self.pos < len(self.toks) else self.last_line

    def fail(self, production: str, message: str):
        raise ParseError(self.source, self.line(), production, message)

    def next(self, production: str) -> str:
        if self.pos >= len(self.toks):
            self.fail(production, "unexpected end of input")
        tok = self.toks[self.pos]
        self.pos += 1
        return tok.text

    def expect(self, text: str, production: str) -> None:
        got = self.peek()
        if got != text:
            self.fail(production, f"expected '{text}' but found {got!r}" if got else f"expected '{text}' at end of input")
        self.pos += 1

    def integer(self, production: str, what: str) -> int:
        tok = self.peek()
        if tok is None or not tok.isdigit():
            self.fail(production, f"expected decimal {what} but found {tok!r}")
        self.pos += 1
        return int(tok)

    def symbol(self, production: str) -> str:
        tok = self.peek()
        if tok is None or tok in "{}=" or tok == "->":
            self.fail(production, f"expected a label symbol but found {tok!r}")
        self.pos += 1
        return tok

    # productions -------------------------------------------------------------
    def body(self, production: str) -> tuple:
        self.expect("{", production)
        nodes, edges = [], []
        seen_nodes, seen_edges = set(), set()
        while True:
            tok = self.peek()
            if tok == "}":
                self.pos += 1
                return nodes, edges
            if tok == "node":
                start = self.line()
                self.pos += 1
                v = self.integer("node", "node id")
                if v in seen_nodes:
                    raise ParseError(self.source, start, "node", f"duplicate node id {v}")
                seen_nodes.add(v)
                label = rooted = None
                while self.peek() in ("label", "root"):
                    key = self.next("node")
                    self.expect("=", "node")
                    if key == "label":
                        label = self.symbol("node")
                    else:
                        val = self.next("node")
                        if val not in ("0", "1"):
                            line = self.toks[self.pos - 1].line
                            raise ParseError(self.source, line, "node", f"root must be 0 or 1, not {val!r}")
                        rooted = int(val)
                nodes.append((v, label, rooted))
            elif tok == "edge":
                start = self.line()
                self.pos += 1
                e = self.integer("edge", "edge id")
                if e in seen_edges:
                    raise ParseError(self.source, start, "edge", f"duplicate edge id {e}")
                seen_edges.add(e)
                s = self.integer("edge", "source id")
                self.expect("->", "edge")
                t = self.integer("edge", "target id")
                self.expect("label", "edge")
                self.expect("=", "edge")
                lab = self.symbol("edge")
                edges.append((e, s, t, lab))
            elif tok is None:
                self.fail(production, "unterminated block, expected '}'")
            else:
                self.fail(production, f"expected 'node', 'edge' or '}}' but found {tok!r}")

    def graph(self, check: bool = True) -> Graph:
        self.expect("graph", "graph")
        name = self.symbol("graph")
        nodes, edges = self.body("graph")
        return Graph(nodes, edges, name=name, check=check)

    def rule(self) -> Rule:
        line = self.line()
        self.expect("rule", "rule")
        name = self.symbol("rule")
        self.expect("{", "rule")
        parts = {}
        for section in ("left", "interface", "right"):
            self.expect(section, "rule")
            nodes, edges = self.body(section)
            parts[section] = Graph(nodes, edges, name=f"{name}.{section}", check=False)
        self.expect("}", "rule")
        for section, g in parts.items():
            problems = validate_graph(g)
            if problems:
                raise ParseError(self.source, line, section, "; ".join(map(str, problems)))
        k = parts["interface"]
        for side in ("left", "right"):
            g = parts[side]
            missing = [v for v in k.nodes if v not in g._lab] + [e for e in k.edges if e not in g._src]
            if missing:
                raise ParseError(self.source, line, "rule", f"interface ids {missing} missing from {side}")
        try:
            return Rule(name, parts["left"], parts["interface"], parts["right"])
        except (RuleError, GraphError) as exc:
            raise ParseError(self.source, line, "rule", str(exc)) from None

    def end(self, production: str) -> None:
        if self.peek() is not None:
            self.fail(production, f"unexpected trailing token {self.peek()!r}")


def parse_graph(text: str, source: str = "<string>", *, check: bool = True) -> Graph:
    """Parse one graph; ``check=False`` keeps structurally broken graphs for validation."""
    p = _Parser(text, source)
    try:
        g = p.graph(check)
    except GraphError as exc:
        raise ParseError(source, p.line(), "graph", str(exc)) from None
    p.end("graph")
    return g


def parse_rules(text: str, source: str = "<string>") -> list:
    p = _Parser(text, source)
    rules = [p.rule()]
    while p.peek() == "rule":
        rules.append(p.rule())
    p.end("rule")
    return rules


def parse_rule(text: str, source: str = "<string>") -> Rule:
    rules = parse_rules(text, source)
    if len(rules) != 1:
        raise ParseError(source, 1, "rule", f"expected exactly one rule, found {len(rules)}")
    return rules[0]


def parse_manifest(text: str, source: str = "<string>") -> dict:
    """Parse ``grammar { key=value ... }``; list values are comma-separated."""
    p = _Parser(text, source)
    p.expect("grammar", "grammar")
    p.expect("{", "grammar")
    entries = {}
    while p.peek() != "}":
        if p.peek() is None:
            p.fail("grammar", "unterminated block, expected '}'")
        key = p.symbol("grammar")
        p.expect("=", "grammar")
        value = p.peek()
        if value is None or value in "{}=":
            entries[key] = ""
        else:
            entries[key] = p.next("grammar")
    p.expect("}", "grammar")
    p.end("grammar")
    return entries


def _body_lines(g: Graph, indent: str) -> list:
    lines = []
    for v, lab, r in g.node_items():
        parts = [f"node {v}"]
        if lab is not None:
            parts.append(f"label={lab}")
        if r is not None:
            parts.append(f"root={r}")
        lines.append(indent + " ".join(parts))
    for e, s, t, lab in g.edge_items():
        lines.append(f"{indent}edge {e} {s} -> {t} label={lab}")
    return lines


def format_graph(g: Graph, name: Optional[str] = None) -> str:
    lines = [f"graph {name or g.name} {{"] + _body_lines(g, "  ") + ["}"]
    return "\n".join(lines) + "\n"


def format_rule(r: Rule) -> str:
    lines = [f"rule {r.name} {{"]
    for section, g in (("left", r.lhs), ("interface", r.interface), ("right", r.rhs)):
        lines.append(f"  {section} {{")
        lines.extend(_body_lines(g, "    "))
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_graph(path, *, check: bool = True) -> Graph:
    path = Path(path)
    return parse_graph(path.read_text(encoding="utf-8"), str(path), check=check)


def read_rules(path) -> list:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), str(path))
