import random

import pytest

from helpers import TRACES, boxes
from rootgt import are_isomorphic, derive
from rootgt.gen import plant_root, random_input_graph, random_tree, tree_oracle
from rootgt.grammar import (
    Membership,
    efd_grammar,
    is_input_graph,
    load_grammar,
    member,
    recognize_tree,
    tree_grammar,
    tree_recognition_system,
    tree_reduction,
)


@pytest.mark.parametrize("name", sorted(TRACES))
def test_worked_trace(name):
    start, expected = TRACES[name]
    d = derive(tree_recognition_system(), start)
    assert [s.rule.name for s in d.steps] == [rule for rule, _ in expected]
    for step, (_, graph) in zip(d.steps, expected):
        assert are_isomorphic(step.result, graph)


def test_trace_verdicts():
    assert recognize_tree(TRACES["tree"][0])
    assert not recognize_tree(TRACES["cycle"][0])
    assert not recognize_tree(TRACES["forest"][0])


def test_single_node_is_a_tree():
    assert recognize_tree(boxes({0: "□*"}, []))


def test_root_position_does_not_matter():
    rng = random.Random(3)
    t = random_tree(12, rng)
    for v in t.nodes:
        assert recognize_tree(plant_root(t, v))


def test_greedy_and_random_strategies_agree():
    rng = random.Random(11)
    for _ in range(60):
        g, _ = random_input_graph(rng, max_nodes=15)
        greedy = tree_reduction(g)
        rand = tree_reduction(g, rng=random.Random(rng.random()))
        assert greedy.is_tree == rand.is_tree == tree_oracle(g)
        assert greedy.steps <= 2 * g.node_count


def test_non_input_graph_rejected():
    two_roots = boxes({0: "□*", 1: "□*"}, [])
    assert not is_input_graph(two_roots)
    with pytest.raises(ValueError):
        tree_reduction(two_roots)


class TestMembership:
    def test_tree_grammar_shortcut(self):
        t = random_tree(9, random.Random(1)).relabelled(roots={v: 0 for v in range(9)})
        assert member(tree_grammar(), t) is Membership.YES
        cyc = boxes({0: "□", 1: "□"}, [(0, 1), (1, 0)])
        assert member(tree_grammar(), cyc) is Membership.NO

    def test_efd_start_and_derived_graphs_are_members(self):
        gram = efd_grammar()
        assert member(gram, gram.start) is Membership.YES
        seq = gram.system.rule("seq")
        from rootgt.rewrite import steps_from
        from helpers import single

        grown = steps_from(single(seq), gram.start)[0].result
        assert member(gram, grown) is Membership.YES

    def test_efd_rejects_t_free_cycle(self):
        from rootgt import Graph

        loop = Graph(
            [(1, "•", 0), (2, "□", 0), (3, "•", 0), (4, "□", 0)],
            [(1, 1, 2, "□"), (2, 2, 3, "□"), (3, 3, 4, "□"), (4, 4, 1, "□")],
        )
        assert member(efd_grammar(), loop) is Membership.NO

    def test_budget_exceeded(self):
        gram = efd_grammar()
        from rootgt.rewrite import derive as run

        big = run(gram.system, gram.start, strategy="random", seed=2, max_steps=6).final
        assert member(gram, big, budget=1) in (Membership.BUDGET_EXCEEDED, Membership.YES)

    def test_manifest_loading(self, tmp_path):
        (tmp_path / "r.rule").write_text(
            "rule grow {\n left { node 1 label=a root=0 }\n interface { node 1 label=a root=0 }\n"
            " right { node 1 label=a root=0 node 2 label=a root=0 edge 1 1 -> 2 label=x }\n}\n",
            encoding="utf-8",
        )
        (tmp_path / "s.graph").write_text("graph s { node 1 label=a root=0 }\n", encoding="utf-8")
        (tmp_path / "g.grammar").write_text("grammar { rules=r.rule start=s.graph }\n", encoding="utf-8")
        gram = load_grammar(tmp_path / "g.grammar")
        from rootgt import Graph

        star = Graph([(1, "a", 0), (2, "a", 0), (3, "a", 0)], [(1, 1, 2, "x"), (2, 1, 3, "x")])
        assert member(gram, star) is Membership.YES
        assert member(gram, Graph([(1, "a", 0), (2, "a", 0)])) is Membership.NO
