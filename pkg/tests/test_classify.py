import pytest

from tbound.classify import EiGraph, classify_contraction, classify_graph
from tbound.dualgraph import build_configuration, contract
from tbound.search import build_optimal_config


def graph(words, boxes, circles, self_int=-1):
    """G_E from chain words, 0-based box positions and circle -> [(chain, position)]."""
    chains = tuple(sorted(words))
    return EiGraph(
        1, chains, dict(words), {k: frozenset(boxes.get(k, ())) for k in chains}, tuple(sorted(circles)),
        {f: self_int for f in circles},
        {f: tuple(sorted((k, j, 1) for k, j in hits)) for f, hits in circles.items()},
        {f: () for f in circles}, True,
    )


W253, W226, W2227 = (2, 5, 3), (2, 2, 6), (2, 2, 2, 7)

CASES = [
    ("T.2.1(2)", graph({0: W253, 1: W226}, {1: {0, 1}}, {"F": [(0, 0), (1, 0)]})),
    ("T.2.2(2, 1)", graph({0: W226, 1: W253}, {0: {0, 1}, 1: {0}}, {"F": [(0, 0), (1, 0)]})),
    ("T.2.3(0, 1)", graph({0: W253, 1: W226}, {1: {0, 1}}, {"F": [(0, 0), (1, 1)]})),
    ("T.2.4", graph({0: W226, 1: (4,)}, {0: {0, 1}, 1: {0}}, {"F": [(0, 1), (1, 0)]})),
    ("T.2.5", graph({0: W2227, 1: W253}, {0: {0, 1, 2}, 1: {0, 1, 2}}, {"F": [(0, 0), (1, 1)]})),
    ("T.3.1(1, 1)", graph({0: W253, 1: (5, 2), 2: W253}, {0: {0}, 1: {0, 1}, 2: {0}},
                         {"F1": [(0, 0), (1, 0)], "F2": [(2, 0), (1, 0)]})),
    ("T.3.2(2, 1)", graph({0: W226, 1: (3, 5, 2), 2: W253}, {0: {0, 1}, 1: {0, 1, 2}, 2: {0}},
                         {"F1": [(0, 0), (1, 1)], "F2": [(2, 0), (1, 0)]})),
    ("C.1(2)", graph({0: W226}, {0: {0, 1}}, {"F": [(0, 0), (0, 2)]})),
    ("C.2(2)", graph({0: W226}, {0: {0, 1}}, {"F": [(0, 1), (0, 2)]})),
]


@pytest.mark.parametrize("label, g", CASES, ids=[c[0] for c in CASES])
def test_templates(label, g):
    t = classify_graph(g)
    assert t is not None and t.label() == label


def test_single_box_is_c2():
    g = graph({0: W253}, {0: {0}}, {"F": [(0, 0), (0, 1)]})
    assert classify_graph(g).label() == "C.2(1)"


def test_non_template_graphs():
    assert classify_graph(graph({0: W226}, {0: {0, 1}}, {"F": [(0, 0), (0, 2)]}, self_int=-2)) is None
    # boxes on a non-(-2) curve
    assert classify_graph(graph({0: W253, 1: W253}, {1: {1}}, {"F": [(0, 1), (1, 1)]})) is None


@pytest.mark.parametrize("name, labels, shapes", [
    ("c1_example", ["C.1(2)"], ["G3", "G1"]),
    ("c2_example", ["C.2(1)"], ["G3", "G1"]),
    ("t24_example", ["T.2.4"], ["G3"]),
    ("t21_t21_example", ["T.2.1(1)", "T.2.1(1)"], ["G2"]),
    ("t21_t22_example", ["T.2.1(1)", "T.2.1(1)"], ["G2"]),
])
def test_fixture_classification(fixture_config, name, labels, shapes):
    result = contract(fixture_config(name))
    cls = classify_contraction(result)
    assert sorted(t.label() for t in cls.graph.types.values()) == labels
    assert [c.shape for c in cls.components] == shapes
    weight = sum(e.weight for e in cls.graph.edges + cls.graph.loops)
    assert weight == cls.units.z


def test_meets_two_ends(fixture_config):
    cls = classify_contraction(contract(fixture_config("t21_t22_example")))
    assert sorted(t.meets_two_ends for t in cls.graph.types.values()) == [False, True]


def test_no_units_empty_graph():
    c = build_configuration(0, [[4], [4]])
    cls = classify_contraction(contract(c))
    assert cls.units.z == 0 and not cls.graph.edges and len(cls.components) == 2


@pytest.mark.parametrize("n, l", [(1, 1), (2, 1), (2, 3), (3, 2)])
def test_optimal_decorated_graph(n, l):
    cls = classify_contraction(contract(build_optimal_config(n, l)))
    (comp,) = cls.components
    assert comp.shape == "G3" and comp.size == l
    assert comp.loop_kind == ("C.2" if n == 1 else "C.1")
    assert [(e.u, e.weight) for e in cls.graph.loops] == [(0, n)]
    assert sorted(e.weight for e in cls.graph.edges) == [2 * n + 3 + i for i in range(1, l)]
    assert {e.kind for e in cls.graph.edges} <= {"T.2.2"}
