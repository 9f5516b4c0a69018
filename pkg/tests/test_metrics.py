import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causal_eval.bayesnet import CategoricalDistribution
from causal_eval.errors import ParameterError
from causal_eval.graph import Dag, Pdag, consistent_extension, cpdag_of
from causal_eval.metrics import (
    EffectTable,
    adjustment_valid,
    aggregate_effects,
    enumerate_extensions,
    shd,
    sid,
    sid_bounds,
    tvd,
)

from conftest import dags
from oracles import random_small_dag, sid_oracle


def dist(p, domain=None):
    return CategoricalDistribution(domain or [str(i) for i in range(len(p))], p)


@st.composite
def simplex(draw, k):
    w = draw(st.lists(st.floats(0, 1), min_size=k, max_size=k))
    total = sum(w)
    if total == 0:
        w, total = [1.0] + [0.0] * (k - 1), 1.0
    return dist([x / total for x in w])


def same_vars(a, b):
    return Dag(a.variables, [e for e in b.edges if set(e) <= set(a.variables)])


class TestSHD:
    def test_identical(self):
        g = Dag("ABC", [("A", "B"), ("C", "B")])
        assert shd(g, g) == 0

    def test_empty_vs_m_edges(self):
        g = Dag("ABCD", [("A", "B"), ("B", "C"), ("C", "D"), ("A", "D")])
        assert shd(Dag("ABCD"), g) == 4

    def test_collider_arm_flipped(self):
        a = Dag("XYZ", [("X", "Z"), ("Y", "Z")])
        b = Dag("XYZ", [("Z", "X"), ("Y", "Z")])
        # b is a chain: both pairs change status
        assert shd(a, b) == 2

    def test_reversal_inside_class_is_free(self):
        assert shd(Dag("XY", [("X", "Y")]), Dag("XY", [("Y", "X")])) == 0

    def test_undirected_vs_directed(self):
        assert shd(Pdag("XY", undirected_edges=[("X", "Y")]), Pdag("XY", [("X", "Y")])) == 1

    def test_variable_mismatch(self):
        with pytest.raises(ParameterError):
            shd(Dag("AB"), Dag("AC"))

    @settings(max_examples=200)
    @given(dags(max_nodes=5), dags(max_nodes=5), dags(max_nodes=5))
    def test_metric_axioms(self, a, b, c):
        b, c = same_vars(a, b), same_vars(a, c)
        assert shd(a, b) == shd(b, a)
        assert (shd(a, b) == 0) == (cpdag_of(a) == cpdag_of(b))
        assert shd(a, c) <= shd(a, b) + shd(b, c)


class TestSID:
    def test_identical(self):
        g = Dag("ABC", [("A", "B"), ("C", "B")])
        assert sid(g, g) == 0

    def test_two_node_reversal(self):
        assert sid(Dag("XY", [("X", "Y")]), Dag("XY", [("Y", "X")])) == 2

    def test_two_node_reversal_matches_oracle(self):
        assert sid_oracle(Dag("XY", [("X", "Y")]), Dag("XY", [("Y", "X")])) == 2

    def test_supergraph_has_zero_sid(self):
        g = Dag("ABCD", [("A", "B"), ("B", "C")])
        h = g.with_edges(add=[("A", "C"), ("A", "D"), ("B", "D")])
        assert sid(g, h) == 0

    def test_empty_learned(self):
        # X->Y: pair (X,Y) wrong, (Y,X) right
        assert sid(Dag("XY", [("X", "Y")]), Dag("XY")) == 1

    def test_pdag_uses_consistent_extension(self):
        g = Dag("XYZ", [("X", "Y"), ("Y", "Z")])
        p = cpdag_of(g)
        assert sid(g, p) == sid(g, consistent_extension(p))

    def test_bounds(self):
        g = Dag("XYZ", [("X", "Y"), ("Y", "Z")])
        lo, hi = sid_bounds(g, cpdag_of(g))
        assert lo == 0 and hi > 0
        assert len(enumerate_extensions(cpdag_of(g))) == 3

    def test_variable_mismatch(self):
        with pytest.raises(ParameterError):
            sid(Dag("AB"), Dag("AC"))

    @settings(max_examples=200)
    @given(dags(min_nodes=2, max_nodes=5), st.data())
    def test_range_and_self(self, g, data):
        h = same_vars(g, data.draw(dags(min_nodes=len(g.variables), max_nodes=len(g.variables))))
        n = len(g.variables)
        assert sid(g, g) == 0
        assert 0 <= sid(g, h) <= n * (n - 1)

    def test_matches_definitional_oracle(self):
        rng = np.random.default_rng(2024)
        for k in range(150):
            n = int(rng.integers(2, 7))
            g = random_small_dag(rng, n, rng.uniform(0.1, 0.9))
            h = random_small_dag(rng, n, rng.uniform(0.1, 0.9))
            assert sid(g, h) == sid_oracle(g, h, seed=k), (sorted(g.edges), sorted(h.edges))

    def test_adjustment_rejects_descendant_on_causal_path(self):
        g = Dag("TMO", [("T", "M"), ("M", "O")])
        assert adjustment_valid(g, "T", "O", [])
        assert not adjustment_valid(g, "T", "O", ["M"])


class TestTVD:
    def test_worked_examples(self):
        assert tvd(dist([0.3, 0.7]), dist([0.3, 0.7])) == 0.0
        assert tvd(dist([1.0, 0.0]), dist([0.0, 1.0])) == 1.0
        assert tvd(dist([0.5, 0.5]), dist([1.0, 0.0])) == 0.5

    def test_domain_mismatch(self):
        with pytest.raises(ParameterError):
            tvd(dist([0.5, 0.5], ["a", "b"]), dist([0.5, 0.5], ["b", "a"]))

    @settings(max_examples=500)
    @given(st.integers(2, 6).flatmap(lambda k: st.tuples(simplex(k), simplex(k), simplex(k))))
    def test_axioms(self, triple):
        p, q, r = triple
        assert 0.0 <= tvd(p, q) <= 1.0
        assert tvd(p, q) == tvd(q, p)
        assert tvd(p, p) == 0.0
        assert tvd(p, r) <= tvd(p, q) + tvd(q, r) + 1e-12


class TestAggregation:
    def test_modes(self):
        t = EffectTable()
        t.add("T", "1", "A", 0.2)
        t.add("T", "1", "B", 0.4)
        assert aggregate_effects(t, "sum") == pytest.approx(0.6)
        assert aggregate_effects(t, "mean") == pytest.approx(0.3)

    def test_single_and_zero(self):
        t = EffectTable()
        t.add("T", "0", "O", 0.37)
        assert aggregate_effects(t, "mean") == 0.37
        z = EffectTable()
        for o in "ABC":
            z.add("T", "1", o, 0.0)
        assert aggregate_effects(z, "mean") == aggregate_effects(z, "sum") == 0.0

    def test_empty_and_bad_mode(self):
        with pytest.raises(ParameterError):
            aggregate_effects(EffectTable(), "mean")
        t = EffectTable()
        t.add("T", "1", "O", 0.1)
        with pytest.raises(ParameterError):
            aggregate_effects(t, "median")

    def test_entry_validation(self):
        t = EffectTable()
        with pytest.raises(ParameterError):
            t.add("T", "1", "O", 1.5)
        t.add("T", "1", "O", 0.1)
        with pytest.raises(ParameterError):
            t.add("T", "1", "O", 0.2)

    def test_where(self):
        t = EffectTable()
        t.add("T", "0", "O", 0.1)
        t.add("T", "1", "O", 0.3)
        assert [e.tvd for e in t.where("1")] == [0.3]
