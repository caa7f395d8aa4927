import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from linkrec import (
    INFINITY,
    DegenerateDenominatorError,
    InputError,
    Network,
    OpportunityDistribution,
    ParamPoint,
    Population,
    exogenous_utility_ratio,
    mu,
    utilities,
    utility,
    utility_ratio,
    welfare_exogenous,
    welfare_rawlsian,
    welfare_utilitarian,
)
from linkrec.model import stochastically_dominates

HALF = OpportunityDistribution((F(1, 2), 0, F(1, 2)))
TENTH = OpportunityDistribution((F(9, 10), 0, F(1, 10)))
GAMMA = ParamPoint(F(1, 25))


def two_by_two():
    return Population.two_group(2, 2, HALF, TENTH)


# frozen hand evaluations of the sum and utility formulas

def test_mu_two_point():
    assert mu(HALF, 0) == 0
    assert mu(HALF, 1) == F(1, 2)


def test_mu_four_point():
    dist = OpportunityDistribution((F(2, 10), F(3, 10), F(1, 10), F(4, 10)))
    assert mu(dist, 1) == F(1, 2)
    assert mu(dist, 2) == F(9, 10)
    assert mu(dist, INFINITY) == F(9, 10)


def test_mu_rejects_bad_degree():
    with pytest.raises(InputError):
        mu(HALF, -1)
    with pytest.raises(InputError):
        mu(HALF, 1.5)


def test_isolated_utility():
    pop = Population.two_group(1, 1, OpportunityDistribution((F(1, 2), 0, F(1, 2))),
                               OpportunityDistribution((F(7, 10), 0, F(3, 10))))
    assert utility(Network.empty(2), 1, pop, GAMMA) == F(3, 10)


def test_green_pair_organic_and_recommended():
    pop = two_by_two()
    E = Network(4, frozenset({(0, 1)}))
    assert utility(E, 0, pop, GAMMA) == F(71, 100)
    assert utility(E, 0, pop, GAMMA, Q=E) == F(3, 4)


def test_utility_node_out_of_range():
    with pytest.raises(InputError):
        utility(Network.empty(4), 7, two_by_two(), GAMMA)


def test_utility_ratio_examples():
    pop = Population.two_group(1, 1, OpportunityDistribution.two_point(F(1, 4)),
                               OpportunityDistribution.two_point(F(85, 100)))
    assert utility_ratio(Network.empty(2), pop, GAMMA) == 5
    pop = two_by_two()
    E = Network(4, frozenset({(0, 1)}))
    assert utility_ratio(E, pop, GAMMA) == F(71, 10)
    assert utility_ratio(Network.empty(4), pop, GAMMA) == exogenous_utility_ratio(pop)


def test_utility_ratio_degenerate():
    pop = Population.two_group(1, 1, HALF, TENTH)
    # an expensive edge drags the blue utility below zero
    E = Network(2, frozenset({(0, 1)}))
    with pytest.raises(DegenerateDenominatorError):
        utility_ratio(E, pop, ParamPoint(1))


@pytest.mark.parametrize("g0,b0,expected", [
    (F(1, 2), F(1, 2), 1),
    (F(1, 2), F(3, 4), 2),
    (F(1, 4), F(37, 40), 10),
])
def test_exogenous_ratio(g0, b0, expected):
    pop = Population.two_group(1, 1, OpportunityDistribution.two_point(g0),
                               OpportunityDistribution.two_point(b0), strict=False)
    assert exogenous_utility_ratio(pop) == expected


def test_exogenous_ratio_degenerate():
    pop = Population.two_group(1, 1, HALF, OpportunityDistribution((1, 0, 0)), strict=False)
    with pytest.raises(DegenerateDenominatorError):
        exogenous_utility_ratio(pop)


def test_welfare_examples():
    pop = two_by_two()
    empty = Network.empty(4)
    assert welfare_utilitarian(empty, pop, GAMMA) == F(6, 5)
    assert welfare_rawlsian(empty, pop, GAMMA) == F(1, 10)
    assert welfare_exogenous(pop) == welfare_utilitarian(empty, pop, GAMMA)
    E = Network(4, frozenset({(0, 1)}))
    assert welfare_utilitarian(E, pop, GAMMA) == F(162, 100)


def test_distribution_validation():
    with pytest.raises(InputError):
        OpportunityDistribution((F(1, 2), F(1, 3)))
    with pytest.raises(InputError):
        OpportunityDistribution((F(3, 2), F(-1, 2)))
    with pytest.raises(InputError):
        Population.two_group(2, 2, TENTH, HALF)  # blue dominates green


def test_param_validation():
    with pytest.raises(InputError):
        ParamPoint(0)
    with pytest.raises(InputError):
        ParamPoint(F(1, 25), 0, F(1, 2))
    with pytest.raises(InputError):
        ParamPoint(F(1, 25), 3, F(1, 2))
    assert ParamPoint(F(1, 25), 1).degree_cap == 26


def test_float_mode_agrees_with_exact():
    pop = two_by_two()
    E = Network(4, frozenset({(0, 1), (1, 2), (2, 3)}))
    exact = utilities(E, pop, GAMMA)
    approx = utilities(E, pop.as_float(), GAMMA.as_float())
    for a, b in zip(exact, approx):
        assert isinstance(b, float)
        assert abs(float(a) - b) < 1e-9


# property tests

probs = st.lists(st.integers(0, 20), min_size=2, max_size=5).filter(lambda v: sum(v) > 0)


def dist_of(weights):
    total = sum(weights)
    return OpportunityDistribution(tuple(F(w, total) for w in weights))


@given(probs, st.integers(1, 30))
def test_mu_shape(weights, d):
    dist = dist_of(weights)
    assert mu(dist, d) >= mu(dist, d - 1)
    assert mu(dist, d) <= mu(dist, INFINITY)
    assert F(mu(dist, d + 1)) / (d + 1) <= F(mu(dist, d)) / d


@st.composite
def instances(draw):
    n = draw(st.integers(2, 6))
    sizes = (draw(st.integers(1, n - 1)),)
    sizes = (sizes[0], n - sizes[0])
    dists = (dist_of(draw(probs)), dist_of(draw(probs)))
    pop = Population(sizes, dists, strict=False)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = frozenset(p for p in pairs if draw(st.booleans()))
    qedges = frozenset(p for p in edges if draw(st.booleans()))
    gamma = F(1, draw(st.integers(1, 50)))
    return pop, Network(n, edges), Network(n, qedges), ParamPoint(gamma)


@settings(max_examples=150)
@given(instances())
def test_utility_range_and_adding_neighbour(inst):
    pop, E, Q, params = inst
    for i in range(E.n):
        u = utility(E, i, pop, params, Q)
        assert -params.gamma * E.degree(i) <= u <= 1
        # with every link recommended only the probability term remains
        base = utility(E, i, pop, params, E)
        for j in range(E.n):
            if j != i and not E.has_edge(i, j):
                more = E.with_edges([(i, j)])
                assert utility(more, i, pop, params, more) >= base


@given(instances())
def test_empty_network_is_exogenous(inst):
    pop, E, Q, params = inst
    empty = Network.empty(E.n)
    for i in range(E.n):
        assert utility(empty, i, pop, params) == 1 - pop.dist_of(i).p0


@given(probs, probs)
def test_dominance_matches_tail_sums(a, b):
    g, bl = dist_of(a), dist_of(b)
    width = max(len(g.probs), len(bl.probs))
    tg = [sum(g.probs[m:], F(0)) for m in range(width)]
    tb = [sum(bl.probs[m:], F(0)) for m in range(width)]
    expected = all(x >= y for x, y in zip(tg, tb)) and any(x > y for x, y in zip(tg, tb))
    assert stochastically_dominates(g, bl) == expected
