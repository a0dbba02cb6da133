import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import BOX, boxes, g, host_containing, random_graph, random_rule
from rootgt import find_matches, find_matches_fast, satisfies_dangling
from rootgt.grammar import tree_recognition_system
from rootgt.matching import NotFastError, dangling_ok, is_fast_pattern
from test_graph import brute_force_morphisms


def injective(pairs):
    return [(nm, em) for nm, em in pairs if len(set(nm.values())) == len(nm) and len(set(em.values())) == len(em)]


seeds = st.integers(0, 10**6)


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_matches_are_the_injective_morphisms(seed):
    rng = random.Random(seed)
    rule = random_rule(rng, max_nodes=3)
    host = host_containing(rng, rule.lhs, 5) if rng.random() < 0.7 else random_graph(rng, 5, e_max=5)
    ours = {(tuple(sorted(m.nmap.items())), tuple(sorted(m.emap.items()))) for m in find_matches(rule.lhs, host)}
    oracle = {
        (tuple(sorted(nm.items())), tuple(sorted(em.items())))
        for nm, em in injective(brute_force_morphisms(rule.lhs, host))
    }
    assert ours == oracle


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_degree_form_of_dangling_agrees_with_set_form(seed):
    rng = random.Random(seed)
    rule = random_rule(rng)
    host = host_containing(rng, rule.lhs, 7)
    for m in find_matches(rule.lhs, host):
        assert dangling_ok(rule, m.nmap, host) == satisfies_dangling(rule, m)


def test_match_order_is_lexicographic():
    pattern = g([(1, BOX, 0)])
    host = g([(3, BOX, 0), (1, BOX, 0), (2, BOX, 0)])
    assert [m.nmap[1] for m in find_matches(pattern, host)] == [1, 2, 3]


def test_no_matches_in_empty_graph():
    r2 = tree_recognition_system().rule("r2")
    assert find_matches(r2.lhs, g([])) == []


class TestFastMatching:
    def test_fast_equals_full_search_on_tree_rules(self):
        rng = random.Random(7)
        for rule in tree_recognition_system():
            assert is_fast_pattern(rule.lhs)
            for _ in range(40):
                n = rng.randint(1, 7)
                edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 8))]
                root = rng.randrange(n)
                host = boxes({v: "□*" if v == root else rng.choice(["□", "△"]) for v in range(n)}, edges)
                slow = [(m.nmap, m.emap) for m in find_matches(rule.lhs, host)]
                fast = [(m.nmap, m.emap) for m in find_matches_fast(rule.lhs, host)]
                assert fast == slow

    def test_unrooted_component_is_rejected(self):
        with pytest.raises(NotFastError):
            find_matches_fast(g([(1, BOX, 0)]), g([(1, BOX, 1)]))

    def test_fast_search_only_visits_root_neighbourhood(self):
        # a long list with the root at one end: matching r2 should touch
        # a handful of nodes, not the whole list
        n = 2000
        host = boxes({v: "□*" if v == 0 else "□" for v in range(n)}, [(v, v + 1) for v in range(n - 1)])
        counter = [0]
        r2 = tree_recognition_system().rule("r2")
        assert len(find_matches_fast(r2.lhs, host, counter=counter)) == 1
        assert counter[0] < 10
