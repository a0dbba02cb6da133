"""Rules ``⟨L ← K → R⟩`` and graph transformation systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import Graph, LabelAlphabet, alphabet_of, is_subgraph


class RuleError(ValueError):
    pass


class Rule:
    """A rule with inclusions ``K ⊆ L`` and ``K ⊆ R`` expressed by shared ids.

    ``L`` and ``R`` must be totally labelled and totally rooted; ``K`` may
    leave labels and rootedness undefined, which marks nodes whose label or
    rootedness is rewritten.
    """

    __slots__ = (
        "name", "lhs", "interface", "rhs",
        "deleted_nodes", "deleted_edges", "added_nodes", "added_edges",
        "cleared_labels", "cleared_roots",
    )

    def __init__(self, name: str, lhs: Graph, interface: Graph, rhs: Graph, *, check: bool = True):
        self.name = name
        self.lhs, self.interface, self.rhs = lhs, interface, rhs
        if check:
            self._check()
        k = interface
        self.deleted_nodes = tuple(v for v in lhs.nodes if v not in k._lab)
        self.deleted_edges = tuple(e for e in lhs.edges if e not in k._src)
        self.added_nodes = tuple(v for v in rhs.nodes if v not in k._lab)
        self.added_edges = tuple(e for e in rhs.edges if e not in k._src)
        self.cleared_labels = tuple(v for v in k.nodes if k._lab[v] is None)
        self.cleared_roots = tuple(v for v in k.nodes if k._root[v] is None)

    def _check(self):
        for side, g in (("left", self.lhs), ("right", self.rhs)):
            if not g.is_totally_labelled():
                raise RuleError(f"rule {self.name}: {side} graph must be totally labelled")
            if not g.is_totally_rooted():
                raise RuleError(f"rule {self.name}: {side} graph must be totally rooted")
        if not is_subgraph(self.interface, self.lhs):
            raise RuleError(f"rule {self.name}: interface is not a subgraph of the left graph")
        if not is_subgraph(self.interface, self.rhs):
            raise RuleError(f"rule {self.name}: interface is not a subgraph of the right graph")

    @property
    def size(self) -> int:
        """``|r| = max(|L|, |R|)``."""
        return max(self.lhs.size, self.rhs.size)

    def inverse(self, name: Optional[str] = None) -> "Rule":
        if name is None:
            name = self.name[:-3] if self.name.endswith("^-1") else self.name + "^-1"
        return Rule(name, self.rhs, self.interface, self.lhs, check=False)

    def renamed(self, name: str) -> "Rule":
        return Rule(name, self.lhs, self.interface, self.rhs, check=False)

    def __eq__(self, other):
        if not isinstance(other, Rule):
            return NotImplemented
        return (self.lhs, self.interface, self.rhs) == (other.lhs, other.interface, other.rhs)

    def __hash__(self):
        return hash((self.lhs, self.interface, self.rhs))

    def __repr__(self):
        return f"Rule({self.name!r}, |L|={self.lhs.size}, |K|={self.interface.size}, |R|={self.rhs.size})"


@dataclass(frozen=True)
class GTSystem:
    """A label alphabet with an ordered list of rules."""

    rules: tuple
    alphabet: LabelAlphabet = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.alphabet is None:
            graphs = [g for r in self.rules for g in (r.lhs, r.interface, r.rhs)]
            object.__setattr__(self, "alphabet", alphabet_of(*graphs))

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)
