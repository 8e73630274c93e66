from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metric_distortion import fixtures
from metric_distortion.metric import (Metric, MetricError, MetricGraph, PointSpace, check_consistency,
                                      check_triangle, complete_graph, metric_closure, social_cost)
from metric_distortion.profile import make_profile

M = fixtures.M


def space_of(*names, n_clients=0):
    return PointSpace(tuple(names), n_clients)


def test_single_edge_and_two_hop():
    s = space_of("u", "v")
    assert metric_closure(MetricGraph(s, (("u", "v", 2.5),)))("u", "v") == 2.5
    s = space_of("u", "v", "w")
    d = metric_closure(MetricGraph(s, (("u", "v", 1.0), ("v", "w", 1.0))))
    assert d("u", "w") == 2.0


def test_colocation_and_disconnected():
    s = space_of("u", "v", "w")
    d = metric_closure(MetricGraph(s, (("u", "w", 3.0),), (("u", "v"),)))
    assert d("u", "v") == 0 and d("v", "w") == 3.0
    with pytest.raises(MetricError, match="v"):
        metric_closure(MetricGraph(s, (("u", "w", 1.0),)))


def test_graph_validation():
    s = space_of("u", "v")
    with pytest.raises(MetricError):
        MetricGraph(s, (("u", "v", -1.0),))
    with pytest.raises(MetricError):
        MetricGraph(s, (("u", "x", 1.0),))


def test_metric_validation():
    s = space_of("u", "v")
    with pytest.raises(MetricError):
        Metric(s, np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(MetricError):
        Metric(s, np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(MetricError):
        Metric(s, np.array([[0.0, -1.0], [-1.0, 0.0]]))


def test_printed_graph_spot_values():
    g = fixtures.dual_metric_graphs()
    da = metric_closure(g["a"])
    assert da("d", "C1") == pytest.approx(3 * M["a"], abs=1e-15)
    assert da("b", "C3") == pytest.approx(M["a"], abs=1e-15)
    assert metric_closure(g["f"])("c", "d") == pytest.approx(2 * M["f"], abs=1e-15)
    assert metric_closure(g["d"])("d", "C2") == 0
    assert metric_closure(g["c"])("c", "C1") == 0
    assert metric_closure(g["b"])("b", "C3") == 0


@pytest.mark.parametrize("o", list("abcdefg"))
def test_printed_graphs_are_consistent_metrics(o):
    p = fixtures.profile()
    d = metric_closure(fixtures.dual_metric_graphs(p)[o])
    assert check_consistency(d, p, 0).ok
    assert check_triangle(d, 0).ok


def test_consistency_violation_reported():
    p = make_profile("ab", ["ab"])
    s = PointSpace.from_profile(p)
    d = metric_closure(MetricGraph(s, (("C1", "a", 2.0), ("C1", "b", 1.0))))
    rep = check_consistency(d, p)
    assert not rep.ok
    assert rep.violations[0].where[:2] == ("C1", 1)
    zero = Metric(s, np.zeros((3, 3)))
    assert check_consistency(zero, p).ok


def test_triangle_violation_reported():
    s = space_of("a", "b", "c")
    d = Metric(s, np.array([[0, 3, 1], [3, 0, 1], [1, 1, 0]], dtype=float))
    rep = check_triangle(d)
    assert not rep.ok
    assert rep.max_excess == 1


def test_social_cost():
    p = fixtures.profile()
    da = metric_closure(fixtures.dual_metric_graphs(p)["a"])
    assert social_cost(da, p, "a") == pytest.approx(0.101549, abs=1e-12)
    one = make_profile("a", ["a"])
    s = PointSpace.from_profile(one)
    d = Metric(s, np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert social_cost(d, one, "a") == 1
    assert social_cost(Metric(s, np.zeros((2, 2))), one, "a") == 0
    with pytest.raises(KeyError):
        social_cost(d, one, "z")


def test_exact_closure_uses_fractions():
    p = fixtures.profile()
    d = metric_closure(fixtures.dual_metric_graphs(p)["a"], exact=True)
    assert d.exact
    assert d("d", "C1") == 3 * Fraction("0.014507")
    assert check_triangle(d, 0).ok


def test_json_round_trip():
    g = fixtures.dual_metric_graphs()["c"]
    g2 = MetricGraph.from_json(g.to_json(), g.space)
    assert metric_closure(g2) == metric_closure(g)
    d = metric_closure(g)
    assert Metric.from_json(d.to_json()) == d


@st.composite
def graphs(draw):
    k = draw(st.integers(2, 7))
    names = tuple(f"p{i}" for i in range(k))
    # spanning path keeps it connected
    edges = [(names[i], names[i + 1], draw(st.floats(0, 10))) for i in range(k - 1)]
    for _ in range(draw(st.integers(0, 8))):
        i, j = draw(st.integers(0, k - 1)), draw(st.integers(0, k - 1))
        if i != j:
            edges.append((names[i], names[j], draw(st.floats(0, 10))))
    return MetricGraph(PointSpace(names, 0), tuple(edges))


@settings(max_examples=60)
@given(graphs(), st.floats(0.1, 5))
def test_closure_properties(g, t):
    d = metric_closure(g)
    assert check_triangle(d, 0).ok
    again = metric_closure(complete_graph(d))
    assert np.array_equal(again.dist, d.dist)
    scaled = metric_closure(g.scaled(t))
    assert np.allclose(scaled.dist, t * d.dist, rtol=1e-12, atol=1e-12)
