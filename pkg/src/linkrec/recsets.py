"""Recommendation sets: every node gets exactly ``k`` subsidised links, with a
fixed share of each blue node's links pointing at greens.

Cross-group links are assigned round-robin, which is one concrete solution of
the bipartite degree problem. Same-group links come from circulant graphs.
Greens occupy nodes ``0..|G|-1`` and blues follow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FeasibilityError
from .model import BLUE, GREEN, Network, ParamPoint, Population


@dataclass(frozen=True)
class RecommendationSet(Network):
    """Subsidised edges plus the group label of every node."""

    groups: tuple = ()

    def cross_degree(self, i: int) -> int:
        gi = self.groups[i]
        return sum(1 for j in self.neighbors(i) if self.groups[j] != gi)

    def same_degree(self, i: int) -> int:
        return self.degree(i) - self.cross_degree(i)


@dataclass(frozen=True)
class Violation:
    kind: str
    nodes: tuple
    message: str

    def __str__(self) -> str:
        return f"{self.kind} at {list(self.nodes)}: {self.message}"


@dataclass(frozen=True)
class RecommendationPlan:
    """Per-node counts implied by ``(|G|, |B|, k, rho)``."""

    blue_cross: int
    green_cross: int
    green_same: int
    blue_same: int


def circulant_offsets(size: int, degree: int) -> tuple:
    """Offsets ``1..degree//2``, plus ``size/2`` when ``degree`` is odd."""
    if degree < 0 or degree > size - 1:
        raise FeasibilityError(f"regular degree {degree} impossible on {size} nodes")
    if (size * degree) % 2:
        raise FeasibilityError(f"regular degree {degree} on {size} nodes needs an even degree sum")
    offsets = list(range(1, degree // 2 + 1))
    if degree % 2:
        offsets.append(size // 2)
    return tuple(offsets)


def circulant_edges(members: Sequence[int], offsets: Iterable[int]) -> set:
    """Edges ``(members[t], members[t+o mod N])`` for every offset ``o``."""
    size = len(members)
    edges = set()
    for o in offsets:
        for t in range(size):
            a, b = members[t], members[(t + o) % size]
            if a != b:
                edges.add((min(a, b), max(a, b)))
    return edges


def plan_recommendations(pop: Population, params: ParamPoint) -> RecommendationPlan:
    """Check feasibility and return per-node counts, or raise FeasibilityError."""
    k = params.k
    if k == 0:
        return RecommendationPlan(0, 0, 0, 0)
    if pop.n_groups != 2:
        raise FeasibilityError("recommendations need exactly two groups")
    n_g, n_b = pop.n_green, pop.n_blue
    blue_cross = params.blue_cross
    green_cross_frac = Fraction(blue_cross * n_b, n_g)
    if green_cross_frac > k:
        raise FeasibilityError(f"sigma = rho*|B|/|G| = {params.sigma(pop)} exceeds 1")
    if green_cross_frac.denominator != 1:
        raise FeasibilityError(
            f"green cross count rho*k*|B|/|G| = {green_cross_frac} is not an integer")
    green_cross = int(green_cross_frac)
    if blue_cross > n_g:
        raise FeasibilityError(f"blue cross count {blue_cross} exceeds |G| = {n_g}")
    if green_cross > n_b:
        raise FeasibilityError(f"green cross count {green_cross} exceeds |B| = {n_b}")
    green_same, blue_same = k - green_cross, k - blue_cross
    for label, size, r in (("green", n_g, green_same), ("blue", n_b, blue_same)):
        if r > size - 1:
            raise FeasibilityError(f"{label} same-group degree {r} exceeds group size - 1 = {size - 1}")
        if (size * r) % 2:
            raise FeasibilityError(f"{label} same-group degree sum {size}*{r} is odd (parity)")
    return RecommendationPlan(blue_cross, green_cross, green_same, blue_same)


def construct_recommendations(pop: Population, params: ParamPoint) -> RecommendationSet:
    """Canonical recommendation set for ``(pop, params)``."""
    plan = plan_recommendations(pop, params)
    groups = pop.node_groups
    if params.k == 0:
        return RecommendationSet(pop.n, frozenset(), groups)
    greens = list(pop.members(GREEN))
    blues = list(pop.members(BLUE))
    edges = set()
    c = plan.blue_cross
    for t, b in enumerate(blues):
        for s in range(c):
            g = greens[(t * c + s) % len(greens)]
            edges.add((g, b))
    edges |= circulant_edges(greens, circulant_offsets(len(greens), plan.green_same))
    edges |= circulant_edges(blues, circulant_offsets(len(blues), plan.blue_same))
    return RecommendationSet(pop.n, frozenset(edges), groups)


def as_recommendation_set(Q, pop: Population) -> RecommendationSet:
    if isinstance(Q, RecommendationSet):
        return Q
    if Q is None:
        return RecommendationSet(pop.n, frozenset(), pop.node_groups)
    edges = Q.edges if isinstance(Q, Network) else frozenset(tuple(p) for p in Q)
    return RecommendationSet(pop.n, edges, pop.node_groups)


def validate_recommendations(Q: Network, pop: Population, params: ParamPoint) -> list:
    """Every broken invariant, one :class:`Violation` each. Empty means valid."""
    out = []
    if Q.n != pop.n:
        return [Violation("size", (), f"set has {Q.n} nodes, population has {pop.n}")]
    groups = pop.node_groups
    k = params.k
    want_cross = {}
    if pop.n_groups == 2:
        want_cross[BLUE] = params.rho * k
        want_cross[GREEN] = params.rho * k * Fraction(pop.n_blue, pop.n_green)
    for i in range(Q.n):
        d = Q.degree(i)
        if d != k:
            out.append(Violation("degree", (i,), f"has {d} recommendations, expected {k}"))
        if groups[i] in want_cross:
            cross = sum(1 for j in Q.neighbors(i) if groups[j] != groups[i])
            if cross != want_cross[groups[i]]:
                out.append(Violation(
                    "cross-fraction", (i,),
                    f"has {cross} cross-group recommendations, expected {want_cross[groups[i]]}"))
    return out


__all__ = [
    "RecommendationPlan",
    "RecommendationSet",
    "Violation",
    "as_recommendation_set",
    "circulant_edges",
    "circulant_offsets",
    "construct_recommendations",
    "plan_recommendations",
    "validate_recommendations",
]
