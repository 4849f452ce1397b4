import copy
import json
from dataclasses import replace
from pathlib import Path

import pytest

from polydyn.core.poly import Poly
from polydyn.errors import (
    CriticalPointsError,
    GraphDepthMismatchError,
    GraphIncompleteError,
    RingMismatchError,
)
from polydyn.services.dyngraph import (
    COUNT_IDENTITY_VIOLATED,
    FLOW_ACTION_INCOMPATIBLE,
    MARKED_MULTIPLICITY_MISMATCH,
    build_graph,
    graph_from_json,
    graph_to_json,
    graphs_equal,
    is_special,
    orbit_shape,
    rational_critical_points,
    validate_axioms,
)

GOLDEN = Path(__file__).parent / "golden"
CUBIC = "3; 1/3, -3/2, 0, 17/7"


def load_golden(name: str) -> dict:
    with open(GOLDEN / name) as f:
        return json.load(f)


@pytest.mark.parametrize(
    "text,depth,golden",
    [
        ("2; 1, 0, -1", 8, "z2_minus_1.json"),
        ("2; 1, 0, -2", 8, "z2_minus_2.json"),
        ("2; 1, 0, 1", 4, "z2_plus_1.json"),
    ],
)
def test_matches_golden(text, depth, golden):
    graph = build_graph(Poly.parse(text), depth=depth)
    assert graph_to_json(graph) == load_golden(golden)
    assert validate_axioms(graph) == []


def test_json_form_reloads():
    graph = build_graph(Poly.parse("2; 1, 0, 1"), depth=4)
    reloaded = graph_from_json(graph_to_json(graph))
    assert graph_to_json(reloaded) == graph_to_json(graph)
    assert reloaded.heights == graph.heights


def test_heights_along_escaping_orbit():
    graph = build_graph(Poly.parse("2; 1, 0, 1"), depth=4)
    assert graph.heights["0.0.0"] == -2
    assert graph.heights["0.2.0"] == 0
    assert graph.heights["0.4.1"] == 2


class TestSpecial:
    def test_escaping_quadratic_is_special(self):
        assert is_special(build_graph(Poly.parse("2; 1, 0, 1"), depth=4))

    def test_bounded_quadratic_is_not_special(self):
        assert not is_special(build_graph(Poly.parse("2; 1, 0, -1")))

    def test_cubic_with_two_escaping_critical_points(self):
        assert not is_special(build_graph(Poly.parse(CUBIC)))

    def test_incomplete_graph_is_undecided(self):
        graph = build_graph(Poly.parse("2; 1, 0, -2"), depth=1)
        assert not graph.complete
        with pytest.raises(GraphIncompleteError):
            is_special(graph)


class TestTampering:
    def test_wrong_local_degree(self):
        graph = build_graph(Poly.parse("2; 1, 0, -1"))
        graph.vertices["0.0.0"] = replace(graph.vertices["0.0.0"], dpi=3)
        assert COUNT_IDENTITY_VIOLATED in validate_axioms(graph)

    def test_marks_stacked_on_one_vertex(self):
        graph = build_graph(Poly.parse(CUBIC))
        graph.marking[1] = graph.marking[0]
        assert MARKED_MULTIPLICITY_MISMATCH in validate_axioms(graph)

    def test_flow_breaking_the_action(self):
        graph = build_graph(Poly.parse("2; 1, 0, -1"))
        graph.flow["0.1.1"] = "0.1.1"
        assert FLOW_ACTION_INCOMPATIBLE in validate_axioms(graph)


class TestComparison:
    def test_same_polynomial(self):
        G = build_graph(Poly.parse("2; 1, 0, -1"))
        assert graphs_equal(G, copy.deepcopy(G))

    def test_different_critical_relations(self):
        G1 = build_graph(Poly.parse("2; 1, 0, -1"))
        G2 = build_graph(Poly.parse("2; 1, 0, -2"))
        assert not graphs_equal(G1, G2)

    def test_depths_must_agree(self):
        G1 = build_graph(Poly.parse("2; 1, 0, -1"), depth=4)
        G2 = build_graph(Poly.parse("2; 1, 0, -1"), depth=8)
        with pytest.raises(GraphDepthMismatchError):
            graphs_equal(G1, G2)

    def test_conjugate_polynomials(self):
        # z^2 - 2 conjugated by z -> z/2
        G1 = build_graph(Poly.parse("2; 1, 0, -2"))
        G2 = build_graph(Poly.parse("2; 1/2, 0, -4"))
        assert graphs_equal(G1, G2)


def test_orbit_shapes():
    assert orbit_shape(build_graph(Poly.parse("2; 1, 0, -1")), 0) == (0, 2)
    assert orbit_shape(build_graph(Poly.parse("2; 1, 0, -2")), 0) == (2, 1)
    assert orbit_shape(build_graph(Poly.parse("2; 1, 0, 1"), depth=4), 0) is None


class TestPreconditions:
    def test_irrational_critical_points(self):
        with pytest.raises(CriticalPointsError):
            rational_critical_points(Poly.parse("3; 1, 0, -2, 0"))

    def test_monomial(self):
        with pytest.raises(CriticalPointsError):
            build_graph(Poly.parse("2; 1, 0, 0"))

    def test_parameter_polynomial(self):
        with pytest.raises(RingMismatchError):
            build_graph(Poly.parse("2; 1, 0, [0, 1]"))

    def test_depth(self):
        with pytest.raises(ValueError):
            build_graph(Poly.parse("2; 1, 0, -1"), depth=0)
