"""Deliberately naive reference implementations used as test oracles.

Nothing here is clever: every deviation builds the deviated network and asks
``model.utility`` for the utilities before and after.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from linkrec.equilibrium import is_dfpn
from linkrec.model import Network, OpportunityDistribution, ParamPoint, Population, utility
from linkrec.recsets import construct_recommendations
from linkrec.errors import LinkrecError


def subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def gain(E, after, node, pop, params, Q):
    return utility(after, node, pop, params, Q) - utility(E, node, pop, params, Q)


def naive_is_dfpn(E, pop, params, Q=None, semantics="own") -> bool:
    """All edges, all non-edges, all pairs of severed subsets."""
    Q = Q if Q is not None else Network.empty(E.n)
    for i, j in E.sorted_edges():
        cut = E.without_edges([(i, j)])
        if gain(E, cut, i, pop, params, Q) > 0 or gain(E, cut, j, pop, params, Q) > 0:
            return False
    for i in range(E.n):
        for j in range(i + 1, E.n):
            if E.has_edge(i, j):
                continue
            added = E.with_edges([(i, j)])
            for si in subsets(E.neighbors(i)):
                for sj in subsets(E.neighbors(j)):
                    if semantics == "own":
                        after_i = added.without_edges((i, s) for s in si)
                        after_j = added.without_edges((j, s) for s in sj)
                    else:
                        after_i = after_j = added.without_edges(
                            [(i, s) for s in si] + [(j, s) for s in sj])
                    if (gain(E, after_i, i, pop, params, Q) > 0
                            and gain(E, after_j, j, pop, params, Q) > 0):
                        return False
    return True


def all_supersets(Q: Network):
    pairs = [(i, j) for i in range(Q.n) for j in range(i + 1, Q.n) if not Q.has_edge(i, j)]
    for mask in range(1 << len(pairs)):
        extra = {p for t, p in enumerate(pairs) if mask >> t & 1}
        yield Network(Q.n, Q.edges | frozenset(extra))


def brute_force_equilibria(pop, params, Q, semantics="own") -> list:
    """Every superset of ``Q`` that passes ``is_dfpn``, without any cap."""
    found = [E for E in all_supersets(Q) if is_dfpn(E, pop, params, Q, semantics=semantics)]
    return sorted(found, key=lambda E: E.sorted_edges())


SMALL = [Fraction(a, 10) for a in range(0, 11)]


def random_dist(rng: random.Random, support: int = 2) -> OpportunityDistribution:
    cuts = sorted(rng.randint(0, 10) for _ in range(support))
    probs = [Fraction(cuts[0], 10)]
    for a, b in zip(cuts, cuts[1:]):
        probs.append(Fraction(b - a, 10))
    probs.append(1 - sum(probs))
    return OpportunityDistribution(tuple(probs))


GAMMAS = (Fraction(1, 50), Fraction(1, 25), Fraction(1, 20), Fraction(1, 10), Fraction(1, 5))


def random_instance(rng: random.Random, max_n: int = 6, density: float = 0.4):
    """Random population, parameters, recommendations and network.

    Populations skip the dominance assumptions, since the checker must work
    on any input.
    """
    while True:
        n_green = rng.randint(1, max_n - 1)
        n_blue = rng.randint(1, max_n - n_green)
        pop = Population.two_group(n_green, n_blue, random_dist(rng, rng.choice((2, 3))),
                                   random_dist(rng, 2), strict=False)
        k = rng.choice((0, 0, 1, 2))
        rho = Fraction(rng.randint(0, k), k) if k else Fraction(0)
        try:
            params = ParamPoint(rng.choice(GAMMAS), k, rho)
            params.check_against(pop)
            Q = Network(pop.n, construct_recommendations(pop, params).edges)
        except LinkrecError:
            continue
        pairs = [(i, j) for i in range(pop.n) for j in range(i + 1, pop.n)]
        edges = {p for p in pairs if rng.random() < density}
        if rng.random() < 0.7:
            edges |= Q.edges
        return pop, params, Q, Network(pop.n, frozenset(edges))


def mixed_instances(count: int, seed: int, max_n: int = 6):
    """Random networks, enumerated equilibria, and equilibria with one pair
    toggled, in roughly equal shares, so both verdicts are well represented."""
    from linkrec.equilibrium import enumerate_equilibria

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        pop, params, Q, E = random_instance(rng, max_n)
        kind = rng.randrange(3)
        if kind and all(d.p0 > 0 and d.mu(d.support) > 0 for d in pop.dists):
            found = enumerate_equilibria(pop, params, Q)
            if found:
                E = rng.choice(found)
                if kind == 2:
                    i, j = rng.sample(range(pop.n), 2)
                    pair = [(min(i, j), max(i, j))]
                    E = E.without_edges(pair) if E.has_edge(i, j) else E.with_edges(pair)
        out.append((pop, params, Q, E))
    return out
