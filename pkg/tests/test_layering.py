import json

import pytest
from hypothesis import given

from compact_layering import DiGraph, Layering, Objective, Weights, evaluate, metrics, validate
from compact_layering.graph import is_acyclic
from compact_layering.layering import InvalidLayering, layer_width
from compact_layering.objective import exact

from helpers import C3, layered_graphs, path

TRIANGLE = DiGraph.from_edges([(0, 1), (0, 2), (1, 2)])


def test_validate():
    assert validate(path(3), Layering(3, (1, 2, 3))) == []
    problems = validate(DiGraph.from_edges([(0, 1)]), Layering(3, (2, 2)))
    assert len(problems) == 1 and "arc 0 (0, 1)" in problems[0]
    assert "outside" in validate(path(2), Layering(3, (0, 1)))[0]
    with pytest.raises(ValueError):
        validate(path(3), Layering(3, (1, 2)))


def test_layering_rejects_non_positive_height():
    with pytest.raises(ValueError):
        Layering(0, ())


def test_layer_width():
    lay = Layering(3, (1, 2, 3))
    assert layer_width(TRIANGLE, lay, 2) == (1, 1)
    assert layer_width(TRIANGLE, lay, 1) == (1, 0)
    assert layer_width(path(2), Layering(2, (1, 2)), 1) == (1, 0)
    with pytest.raises(ValueError):
        layer_width(TRIANGLE, lay, 4)


def test_metrics_examples():
    m = metrics(path(3), Layering(3, (1, 2, 3)))
    assert (m.total_length, m.reversed, m.width, m.est_aspect_ratio) == (2, 0, 1, 1 / 3)
    back = DiGraph.from_edges([(0, 1)])
    m = metrics(back, Layering(3, (3, 1)))
    assert (m.reversed, m.total_length, m.dummy_count) == (1, 2, 1)
    assert layer_width(back, Layering(3, (3, 1)), 2) == (0, 1)
    m = metrics(TRIANGLE, Layering(3, (1, 2, 3)))
    assert (m.total_length, m.dummy_count, m.width, m.real_width) == (4, 1, 2, 1)


def test_metrics_rejects_invalid():
    with pytest.raises(InvalidLayering):
        metrics(path(2), Layering(2, (1, 1)))


def test_height_used_and_custom_widths():
    g = DiGraph(3, ((0, 2),), vertex_width=(2.0, 0.5, 1.0))
    m = metrics(g, Layering(4, (1, 1, 3)))
    assert m.height_used == 3
    assert m.real_width == 2.5
    assert m.width == 2.5  # layer 2 holds one unit dummy only


def test_json_round_trip():
    lay = Layering(4, (1, 3, 2))
    assert json.loads(lay.to_json()) == {"H": 4, "layers": [1, 3, 2]}
    assert Layering.from_json(lay.to_json()) == lay


@given(layered_graphs())
def test_dummy_identity_and_width_bounds(case):
    g, lay = case
    m = metrics(g, lay)
    assert m.dummy_count == m.total_length - g.m
    assert m.width >= m.real_width
    assert m.width >= -(-g.n // lay.height)
    assert m.est_aspect_ratio == m.width / lay.height


@given(layered_graphs())
def test_shift_invariance(case):
    g, lay = case
    base = metrics(g, lay)
    lo, hi = min(lay.layer_of), max(lay.layer_of)
    for c in range(1 - lo, lay.height - hi + 1):
        m = metrics(g, lay.shifted(c))
        assert (m.reversed, m.total_length, m.width, m.real_width) == (
            base.reversed, base.total_length, base.width, base.real_width
        )


@given(layered_graphs())
def test_no_reversals_certifies_acyclic(case):
    g, lay = case
    if metrics(g, lay).reversed == 0:
        assert is_acyclic(g)


@given(layered_graphs())
def test_signed_length_telescopes(case):
    g, lay = case
    indeg, outdeg = g.in_out_degrees()
    w = Weights(0, 1, 0)
    expected = sum(lay[v] * (indeg[v] - outdeg[v]) for v in range(g.n))
    assert evaluate(g, lay, Objective.MML_SIGNED, w) == expected


def test_evaluate_c3():
    lay = Layering(3, (1, 2, 3))
    w = Weights.default(C3, 3)
    assert w.as_tuple() == (9, 1, 1)
    assert evaluate(C3, lay, Objective.CGLP, w) == 15
    assert evaluate(C3, lay, "mml-signed", w) == 10
    assert evaluate(C3, lay, Objective.MML_ABS, w) == 14


def test_exact():
    assert exact(3.0) == 3 and isinstance(exact(3.0), int)
    assert exact(0.5) * 2 == 1
    with pytest.raises(ValueError):
        exact(float("inf"))
    with pytest.raises(ValueError):
        Weights(-1)
