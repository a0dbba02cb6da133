import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_graph, random_rule
from rootgt import ParseError, format_graph, format_rule, parse_graph, parse_rule, parse_rules
from rootgt.grammar import load_builtin_rules

SAMPLE = """
# a comment
graph demo {
  node 1 label=□ root=1
  node 2 label=△ root=0   # trailing comment
  edge 1 1 -> 2 label=□
}
"""


def test_parse_sample():
    g = parse_graph(SAMPLE)
    assert g.name == "demo"
    assert g.nodes == (1, 2) or list(g.nodes) == [1, 2]
    assert g.rootedness(1) == 1 and g.label(2) == "△"
    assert (g.source(1), g.target(1), g.edge_label(1)) == (1, 2, "□")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_graph_round_trip_is_exact(seed):
    g = random_graph(random.Random(seed))
    text = format_graph(g)
    back = parse_graph(text)
    assert back == g
    assert format_graph(back) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_rule_round_trip_keeps_partial_interface(seed):
    r = random_rule(random.Random(seed))
    back = parse_rule(format_rule(r))
    assert (back.lhs, back.interface, back.rhs) == (r.lhs, r.interface, r.rhs)


def test_unlabelled_interface_node_round_trips():
    r = load_builtin_rules("tree_recognition")[2]
    assert parse_rules(format_rule(r))[0] == r


@pytest.mark.parametrize(
    "text, line, production",
    [
        ("graph g {\n  node 1 label=a root=2\n}", 2, "node"),
        ("graph g {\n  node 1 label=a root=0\n  edge 1 1 => 1 label=x\n}", 3, "edge"),
        ("graph g {\n  node x label=a\n}", 2, "node"),
        ("graph g {\n  node 1 label=a root=0\n", 2, "graph"),
    ],
)
def test_errors_carry_line_and_production(text, line, production):
    with pytest.raises(ParseError) as info:
        parse_graph(text, "demo.graph")
    err = info.value
    assert err.line == line
    assert production in err.production
    assert str(err).startswith(f"demo.graph:{line}:")


def test_interface_must_be_shared():
    text = """rule bad {
  left { node 1 label=a root=0 }
  interface { node 2 label=a root=0 }
  right { node 1 label=a root=0 }
}"""
    with pytest.raises(ParseError):
        parse_rules(text, "bad.rule")
