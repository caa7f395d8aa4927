from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from linkrec import FeasibilityError, Network, OpportunityDistribution, ParamPoint, Population
from linkrec.model import GREEN
from linkrec.recsets import (
    circulant_edges,
    circulant_offsets,
    construct_recommendations,
    plan_recommendations,
    validate_recommendations,
)

G = OpportunityDistribution.two_point(F(1, 2))
B = OpportunityDistribution.two_point(F(9, 10))


def pop(ng, nb):
    return Population.two_group(ng, nb, G, B)


def test_perfect_cross_matching():
    p = pop(4, 4)
    Q = construct_recommendations(p, ParamPoint(F(1, 25), 1, 1))
    assert len(Q) == 4
    for i in range(8):
        assert Q.degree(i) == 1 and Q.cross_degree(i) == 1
    assert validate_recommendations(Q, p, ParamPoint(F(1, 25), 1, 1)) == []


def test_half_cross_six_by_six():
    p = pop(6, 6)
    params = ParamPoint(F(1, 25), 2, F(1, 2))
    Q = construct_recommendations(p, params)
    for i in range(12):
        assert Q.cross_degree(i) == 1 and Q.same_degree(i) == 1
    greens = [e for e in Q.edges if p.group_of(e[0]) == p.group_of(e[1]) == GREEN]
    assert len(greens) == 3  # a perfect matching on six greens
    assert validate_recommendations(Q, p, params) == []


def test_no_recommendations():
    Q = construct_recommendations(pop(3, 3), ParamPoint(F(1, 25)))
    assert len(Q) == 0


def test_dropped_edge_flags_both_endpoints():
    p = pop(4, 4)
    params = ParamPoint(F(1, 25), 1, 1)
    Q = construct_recommendations(p, params)
    edge = Q.sorted_edges()[0]
    bad = validate_recommendations(Q.without_edges([edge]), p, params)
    assert {v.nodes[0] for v in bad if v.kind == "degree"} == set(edge)


def test_rewired_edge_flags_cross_fraction():
    p = pop(6, 6)
    params = ParamPoint(F(1, 25), 2, F(1, 2))
    Q = construct_recommendations(p, params)
    # swap two cross links (g1,b1),(g2,b2) for (g1,g2),(b1,b2): degrees hold,
    # and the four endpoints lose a cross link each
    cross = sorted(e for e in Q.edges if p.group_of(e[0]) != p.group_of(e[1]))
    (g1, b1), (g2, b2) = next((a, b) for a in cross for b in cross
                              if len({*a, *b}) == 4 and not Q.has_edge(a[0], b[0])
                              and not Q.has_edge(a[1], b[1]))
    mutated = Network(12, (Q.edges - {(g1, b1), (g2, b2)}) | {(g1, g2), (b1, b2)})
    bad = validate_recommendations(mutated, p, params)
    assert all(v.kind == "cross-fraction" for v in bad)
    assert {v.nodes[0] for v in bad} == {g1, b1, g2, b2}


def test_single_rewire_changes_two_nodes():
    # moving the blue endpoint of a cross edge onto another green
    p = pop(4, 4)
    params = ParamPoint(F(1, 25), 1, 1)
    Q = construct_recommendations(p, params)
    g, b = Q.sorted_edges()[0]
    other = next(x for x in range(4) if x != g)
    mutated = Network(8, (Q.edges - {(g, b)}) | {(min(g, other), max(g, other))})
    flagged = {v.nodes[0] for v in validate_recommendations(mutated, p, params)
               if v.kind == "cross-fraction"}
    assert flagged == {g, b}


@pytest.mark.parametrize("ng,nb,k,rho,reason", [
    (2, 4, 1, 1, "sigma"),
    (3, 3, 1, 0, "parity"),
    (4, 2, 1, F(1, 1), "not an integer"),
])
def test_infeasible(ng, nb, k, rho, reason):
    with pytest.raises(FeasibilityError, match=reason):
        construct_recommendations(pop(ng, nb), ParamPoint(F(1, 25), k, rho))


def test_circulant_offsets():
    assert circulant_offsets(6, 3) == (1, 3)
    assert circulant_offsets(5, 4) == (1, 2)
    with pytest.raises(FeasibilityError):
        circulant_offsets(5, 3)
    assert len(circulant_edges(list(range(6)), (1, 3))) == 9


def test_deterministic():
    p = pop(6, 6)
    params = ParamPoint(F(1, 25), 2, F(1, 2))
    assert construct_recommendations(p, params) == construct_recommendations(p, params)


def test_round_trip_grid():
    checked = 0
    for ng in range(2, 13):
        for nb in range(2, 13):
            p = pop(ng, nb)
            for k in range(5):
                for r in range(k + 1) if k else [0]:
                    params = ParamPoint(F(1, 25), k, F(r, k) if k else 0)
                    try:
                        plan_recommendations(p, params)
                    except FeasibilityError:
                        with pytest.raises(FeasibilityError):
                            construct_recommendations(p, params)
                        continue
                    Q = construct_recommendations(p, params)
                    assert validate_recommendations(Q, p, params) == []
                    checked += 1
    assert checked > 400


@given(st.integers(2, 12), st.integers(2, 12), st.integers(0, 4), st.data())
def test_feasible_sets_validate(ng, nb, k, data):
    r = data.draw(st.integers(0, k))
    params = ParamPoint(F(1, 25), k, F(r, k) if k else 0)
    p = pop(ng, nb)
    try:
        Q = construct_recommendations(p, params)
    except FeasibilityError:
        return
    assert validate_recommendations(Q, p, params) == []
    assert all(i != j for i, j in Q.edges)
