from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from linkrec import (
    Network,
    OpportunityDistribution,
    ParamPoint,
    Population,
    construct_recommendations,
    exogenous_utility_ratio,
    utility_ratio,
)
from linkrec import bounds
from linkrec.bounds import FINITE, SYMMETRIC
from linkrec.equilibrium import enumerate_equilibria
from linkrec.model import BLUE, GREEN, group_mean_utilities

G = OpportunityDistribution.two_point(F(1, 2))
B = OpportunityDistribution.two_point(F(24, 25))
GAMMA = F(1, 25)


def pop(ng=1, nb=1, g=G, b=B):
    return Population.two_group(ng, nb, g, b)


def closed_form_green_degrees(gamma, cap):
    # keep and add bounds for two-point g0 = 1/2 at common degree d
    out = set()
    for d in range(1, cap + 1):
        keep = F(1, 2) * (F(1, 2) / d) * (1 - F(1, 2) / d) ** (d - 1)
        add = F(1, 2) * (F(1, 2) / (d + 1)) * (1 - F(1, 2) / d) ** d
        if add <= gamma <= keep:
            out.add(d)
    return out


def test_blue_locked_when_cost_exceeds_threshold():
    assert B.p0 * (1 - B.p0) < GAMMA
    for k, rho in ((0, 0), (1, 1), (2, F(1, 2))):
        env = bounds.feasible_degree_set(BLUE, pop(), ParamPoint(GAMMA, k, rho))
        assert env.feasible_degrees == {k}


def test_green_degrees_match_closed_forms():
    env = bounds.feasible_degree_set(GREEN, pop(), ParamPoint(GAMMA))
    assert env.feasible_degrees == closed_form_green_degrees(GAMMA, 25) == {3, 4}


def test_expensive_links_give_empty_network():
    params = ParamPoint(F(1, 2))
    for X in (GREEN, BLUE):
        assert bounds.feasible_degree_set(X, pop(), params).feasible_degrees == {0}
    env = bounds.ur_envelope(pop(), params)
    assert env.lower == env.upper == exogenous_utility_ratio(pop())


def test_locked_degrees_give_point_envelopes():
    params = ParamPoint(GAMMA, 1, 1)
    green, blue = bounds.utility_envelopes(pop(), params)
    assert green.lower == green.upper and blue.lower == blue.upper
    assert green.argmin == (4, 1)


def test_asymptotic_blue_without_cross_recommendations():
    env = bounds.utility_envelope_asymptotic(BLUE, pop(), ParamPoint(GAMMA))
    assert env.lower == env.upper == pytest.approx(1 - 24 / 25)


def test_asymptotic_tracks_finite_envelope():
    # distance between the two envelopes stays within gamma as gamma shrinks
    for gamma in (F(1, 10), F(1, 25), F(1, 100), F(1, 400)):
        params = ParamPoint(float(gamma))
        fin = bounds.utility_envelopes(pop().as_float(), params)[GREEN]
        asy = bounds.utility_envelope_asymptotic(GREEN, pop().as_float(), params)
        gap = max(asy.lower - float(fin.upper), float(fin.lower) - asy.upper, 0)
        assert gap <= float(gamma)
        assert max(asy.lower - float(fin.lower), float(fin.upper) - asy.upper) <= float(gamma)


def test_facially_neutral_raises_ratio():
    env = bounds.ur_envelope(pop(), ParamPoint(GAMMA))
    assert env.lower > exogenous_utility_ratio(pop())


def test_cross_recommendations_lower_ratio_above_threshold():
    params = ParamPoint(GAMMA, 1, 1)
    threshold = bounds.cross_recommendation_blue_threshold(pop(), params)
    assert threshold == F(50, 51)
    b = OpportunityDistribution.two_point(F(99, 100))
    p = pop(b=b)
    assert b.p0 >= threshold
    assert bounds.ur_envelope(p, params).upper < exogenous_utility_ratio(p)


@pytest.mark.parametrize("gamma,k,expected", [
    (F(1), 0, 8),
    (F(1, 2), 1, 288),
    (F(1, 25), 1, 985608),
])
def test_reciprocity_constant(gamma, k, expected):
    assert bounds.reciprocity_constant(ParamPoint(gamma, k, 1 if k else 0)) == expected


def test_welfare_envelope_orders_endpoints():
    w = bounds.welfare_envelope(pop(2, 2), ParamPoint(GAMMA))
    assert w.utilitarian[0] <= w.utilitarian[1]
    assert w.rawlsian[0] <= w.rawlsian[1]
    assert w.exogenous == 2 * F(1, 2) + 2 * F(1, 25)
    lo, hi = w.utilitarian_gain_per_capita()
    assert lo <= hi


def test_bad_mode():
    with pytest.raises(Exception):
        bounds.degree_envelopes(pop(), ParamPoint(GAMMA), "nonsense")


def test_ur_endpoints_attained():
    params = ParamPoint(GAMMA)
    env = bounds.ur_envelope(pop(), params)
    (g_lo, b_hi), (g_hi, b_lo) = env.lower_attained_by, env.upper_attained_by
    lo = bounds.profile_utility(pop(), params, GREEN, *g_lo) / bounds.profile_utility(pop(), params, BLUE, *b_hi)
    hi = bounds.profile_utility(pop(), params, GREEN, *g_hi) / bounds.profile_utility(pop(), params, BLUE, *b_lo)
    assert (lo, hi) == (env.lower, env.upper)


SOUND_POINTS = [
    (2, 2, G, B, ParamPoint(GAMMA)),
    (3, 3, G, B, ParamPoint(GAMMA)),
    (4, 4, G, B, ParamPoint(F(1, 10), 1, 1)),
    (4, 2, G, OpportunityDistribution.two_point(F(19, 20)), ParamPoint(F(1, 20), 2, 1)),
    (4, 4, OpportunityDistribution.two_point(F(1, 4)), B, ParamPoint(F(1, 10), 2, F(1, 2))),
]


@pytest.mark.parametrize("ng,nb,g,b,params", SOUND_POINTS)
def test_finite_envelope_contains_enumerated_equilibria(ng, nb, g, b, params):
    p = pop(ng, nb, g, b)
    envs = bounds.degree_envelopes(p, params, FINITE)
    if not all(e.applicable for e in envs):
        pytest.skip("assumptions fail at this point")
    Q = construct_recommendations(p, params)
    found = enumerate_equilibria(p, params, Q)
    assert found
    ur = bounds.ur_envelope(p, params, FINITE)
    utils = bounds.utility_envelopes(p, params, FINITE)
    for E in found:
        for i, d in enumerate(E.degrees()):
            assert d in envs[p.group_of(i)].feasible_degrees
        means = group_mean_utilities(E, p, params, Q)
        for X in (GREEN, BLUE):
            assert utils[X].contains(means[X])
        assert ur.contains(utility_ratio(E, p, params, Q))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(2, 60), st.integers(0, 2))
def test_envelope_bounds_are_ordered(g_tenths, inv_gamma, k):
    g = OpportunityDistribution.two_point(F(g_tenths, 10))
    params = ParamPoint(F(1, inv_gamma), k, 1 if k else 0)
    for mode in (SYMMETRIC, FINITE):
        envs = bounds.degree_envelopes(pop(4, 4, g, B), params, mode)
        for env in envs:
            assert all(0 <= d <= params.degree_cap for d in env.feasible_degrees)
        if all(e.applicable for e in envs):
            for u in bounds.utility_envelopes(pop(4, 4, g, B), params, mode):
                assert u.lower <= u.upper
