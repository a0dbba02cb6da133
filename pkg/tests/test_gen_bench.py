import io
import math
import random

import pytest

from rootgt.bench import (
    BenchRecord,
    fit_class,
    instance,
    loglog_fit,
    parse_sizes,
    read_csv,
    run_benchmark,
    time_instance,
    write_csv,
)
from rootgt.gen import (
    gen_grid,
    gen_linked_list,
    gen_perfect_binary_tree,
    gen_star,
    perturb,
    plant_root,
    random_tree,
    tree_oracle,
)
from rootgt.grammar import recognize_tree
from rootgt import Graph


def degrees(g):
    ins = {v: 0 for v in g.nodes}
    outs = dict(ins)
    for e in g.edges:
        outs[g.source(e)] += 1
        ins[g.target(e)] += 1
    return ins, outs


class TestGenerators:
    def test_list(self):
        g = gen_linked_list(5)
        assert g.node_count == 5 and g.edge_count == 4
        assert tree_oracle(g)

    def test_binary_tree_sizes(self):
        for d in range(5):
            g = gen_perfect_binary_tree(d)
            assert g.node_count == 2 ** (d + 1) - 1
            assert g.edge_count == g.node_count - 1
            ins, outs = degrees(g)
            assert max(outs.values()) <= 2 and max(ins.values()) <= 1

    @pytest.mark.parametrize("n, m", [(1, 1), (2, 2), (3, 4), (5, 2)])
    def test_grid_edge_count(self, n, m):
        g = gen_grid(n, m)
        assert g.node_count == n * m
        assert g.edge_count == 2 * n * m - n - m

    def test_star_alternates(self):
        g = gen_star(6)
        centre = 6
        for e in g.edges:
            s, t = g.source(e), g.target(e)
            spoke = t if s == centre else s
            assert (s == centre) == (spoke % 2 == 0)

    def test_all_unrooted_boxes(self):
        for g in (gen_linked_list(3), gen_grid(2, 3), gen_star(3), gen_perfect_binary_tree(2)):
            assert all(g.label(v) == "□" and g.rootedness(v) == 0 for v in g.nodes)
            assert all(g.edge_label(e) == "□" for e in g.edges)

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            gen_linked_list(0)
        with pytest.raises(ValueError):
            gen_grid(0, 3)


class TestOracleAgreement:
    @pytest.mark.parametrize("g", [gen_linked_list(30), gen_perfect_binary_tree(4), gen_star(1), gen_star(3)])
    def test_trees_accepted(self, g):
        # a star stays a tree while its centre has at most one parent spoke
        assert tree_oracle(g)
        assert recognize_tree(plant_root(g))

    @pytest.mark.parametrize("g", [gen_grid(2, 2), gen_grid(3, 5), gen_star(4), gen_star(7)])
    def test_non_trees_rejected(self, g):
        assert not tree_oracle(g)
        assert not recognize_tree(plant_root(g))

    def test_two_lists_are_not_a_tree(self):
        two = Graph([(v, "□", 0) for v in range(4)], [(1, 0, 1, "□"), (2, 2, 3, "□")])
        assert not tree_oracle(two)
        assert not recognize_tree(plant_root(two))

    def test_random_and_perturbed(self):
        rng = random.Random(8)
        for _ in range(100):
            g = random_tree(rng.randint(1, 25), rng)
            if rng.random() < 0.5:
                g = perturb(g, rng)
            root = rng.choice(list(g.nodes))
            assert recognize_tree(plant_root(g, root)) == tree_oracle(g)


class TestBench:
    def test_instance_sizes(self):
        assert instance("list", 100).node_count == 100
        assert instance("star", 100).node_count == 101
        assert instance("grid", 100).node_count == 100
        assert instance("tree", 100).node_count == 63
        with pytest.raises(ValueError):
            instance("hypercube", 8)

    def test_list_steps_are_linear(self):
        # a list of n nodes needs n-1 moves and n-1 deletions
        for n in (50, 100, 200):
            _, steps = time_instance(gen_linked_list(n))
            assert steps == 2 * n - 2

    def test_steps_double_with_size(self):
        _, a = time_instance(gen_linked_list(1000))
        _, b = time_instance(gen_linked_list(2000))
        assert 1.9 <= b / a <= 2.1

    def test_run_and_csv_round_trip(self):
        recs = run_benchmark(["list", "star"], [10, 20], trials=2)
        assert len(recs) == 8
        text = write_csv(recs)
        assert text.splitlines()[0] == "class,nodes,trial,seconds,steps"
        back = read_csv(io.StringIO(text))
        assert [(r.graph_class, r.nodes, r.trial, r.steps) for r in back] == [
            (r.graph_class, r.nodes, r.trial, r.steps) for r in recs
        ]

    def test_sizes_must_ascend(self):
        with pytest.raises(ValueError):
            run_benchmark(["list"], [20, 10], trials=1)

    def test_loglog_fit_recovers_exponent(self):
        pts = [(n, 3e-7 * n**1.5) for n in (100, 200, 400, 800)]
        slope, intercept, r2 = loglog_fit(pts)
        assert slope == pytest.approx(1.5)
        assert intercept == pytest.approx(math.log(3e-7))
        assert r2 == pytest.approx(1.0)

    def test_fit_uses_medians(self):
        recs = [BenchRecord("x", n, t, n * (10 if t == 0 else 1) * 1e-6, 0) for n in (10, 100) for t in range(3)]
        assert fit_class(recs, "x").slope == pytest.approx(1.0)


@pytest.mark.parametrize(
    "text, sizes",
    [
        ("10,30,20", [10, 20, 30]),
        ("100..400:4", [100, 200, 300, 400]),
        ("1000..10000", [1000 * k for k in range(1, 11)]),
        ("5..5", [5]),
    ],
)
def test_parse_sizes(text, sizes):
    assert parse_sizes(text) == sizes
