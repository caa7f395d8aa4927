"""Primitive types of the network-formation game, the utility function, and
population-level metrics.

Every quantity is computed with whatever number type the inputs carry. When
probabilities and the edge cost are :class:`fractions.Fraction` the whole
pipeline stays exact, which is what the equilibrium checker relies on for its
strict comparisons. Float inputs give the faster double-precision mode used by
the sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import DegenerateDenominatorError, InputError

Number = Union[Fraction, float, int]

INFINITY = math.inf
FLOAT_TOL = 1e-12

GREEN = 0
BLUE = 1


def parse_number(value) -> Number:
    """Turn ``"1/25"``, ``"0.04"``, ints or Fractions into an exact Fraction.

    Floats are passed through untouched so callers can opt into float mode.
    """
    if isinstance(value, float):
        return value
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a number: {value!r}") from exc


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def strictly_positive(x) -> bool:
    """Strict ``x > 0``; floats need to clear :data:`FLOAT_TOL`."""
    if isinstance(x, float):
        return x > FLOAT_TOL
    return x > 0


def to_float(x) -> float:
    return float(x)


# --------------------------------------------------------------------------
# Opportunity distributions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OpportunityDistribution:
    """Probability of receiving ``l`` exogenous opportunities, ``l = 0..C``."""

    probs: tuple
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        probs = tuple(parse_number(p) if not isinstance(p, float) else p for p in self.probs)
        if not probs:
            raise InputError("distribution needs at least one entry")
        for p in probs:
            if p < 0 or p > 1:
                raise InputError(f"probability {p} outside [0, 1]")
        total = sum(probs)
        if all(is_exact(p) for p in probs):
            if total != 1:
                raise InputError(f"probabilities sum to {total}, not 1")
        elif abs(total - 1) > FLOAT_TOL:
            raise InputError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def two_point(cls, p0, support: int = 2) -> "OpportunityDistribution":
        """Mass ``p0`` on zero opportunities and the rest on ``support``."""
        p0 = parse_number(p0) if not isinstance(p0, float) else p0
        probs = [p0] + [0] * (support - 1) + [1 - p0]
        return cls(tuple(probs))

    @property
    def support(self) -> int:
        return len(self.probs) - 1

    @property
    def p0(self):
        return self.probs[0]

    @property
    def p1(self):
        return self.probs[1] if len(self.probs) > 1 else 0

    @property
    def exact(self) -> bool:
        return all(is_exact(p) for p in self.probs)

    def tail(self, m: int):
        """``sum_{l >= m} p_l``."""
        return sum(self.probs[m:], 0)

    def mu(self, d):
        key = ("mu", d)
        try:
            return self._cache[key]
        except KeyError:
            pass
        total = 0
        for ell, p in enumerate(self.probs):
            if ell >= 1 and p:
                total += min(ell - 1, d) * p
        self._cache[key] = total
        return total

    def pass_prob(self, d: int):
        """Chance that a holder of degree ``d`` passes a given neighbour an
        opportunity, ``mu(d) / d``."""
        if d < 1:
            raise InputError("pass probability is defined for degree >= 1")
        key = ("q", d)
        try:
            return self._cache[key]
        except KeyError:
            pass
        m = self.mu(d)
        q = m / d if isinstance(m, float) else Fraction(m) / d
        self._cache[key] = q
        return q

    def as_float(self) -> "OpportunityDistribution":
        return OpportunityDistribution(tuple(float(p) for p in self.probs))

    def __str__(self) -> str:
        return " ".join(str(p) for p in self.probs)


def mu(dist: OpportunityDistribution, d) -> Number:
    """Expected number of opportunities a degree-``d`` holder passes on.

    ``d`` may be :data:`INFINITY`, giving the expected surplus.
    """
    if d != INFINITY and (d < 0 or int(d) != d):
        raise InputError(f"degree must be a non-negative integer, got {d!r}")
    return dist.mu(d)


def stochastically_dominates(g: OpportunityDistribution, b: OpportunityDistribution) -> bool:
    """Tail sums of ``g`` are all at least those of ``b``, strictly somewhere."""
    width = max(len(g.probs), len(b.probs))
    strict = False
    for m in range(width):
        tg, tb = g.tail(m), b.tail(m)
        if isinstance(tg, float) or isinstance(tb, float):
            if tg < tb - FLOAT_TOL:
                return False
            strict = strict or tg > tb + FLOAT_TOL
        else:
            if tg < tb:
                return False
            strict = strict or tg > tb
    return strict


# --------------------------------------------------------------------------
# Population
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Population:
    """Groups of exchangeable individuals, privileged group first.

    Nodes are numbered group by group: the first ``sizes[0]`` nodes belong to
    group 0 and so on. The two-group case (green, blue) is the one the metrics
    use; more groups are allowed so that small hand-built instances with
    several privilege levels can be checked too.
    """

    sizes: tuple
    dists: tuple
    labels: tuple = ("green", "blue")
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        dists = tuple(self.dists)
        labels = tuple(self.labels)
        if len(sizes) != len(dists) or len(sizes) != len(labels):
            raise InputError("sizes, dists and labels must have equal length")
        if any(s < 1 for s in sizes):
            raise InputError("every group needs at least one member")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "dists", dists)
        object.__setattr__(self, "labels", labels)
        if self.strict:
            problems = self.assumption_violations()
            if problems:
                raise InputError("; ".join(problems))
        groups = []
        for g, s in enumerate(sizes):
            groups.extend([g] * s)
        object.__setattr__(self, "_groups", tuple(groups))

    @classmethod
    def two_group(cls, n_green: int, n_blue: int, green, blue, *, strict: bool = True) -> "Population":
        if not isinstance(green, OpportunityDistribution):
            green = OpportunityDistribution(tuple(green))
        if not isinstance(blue, OpportunityDistribution):
            blue = OpportunityDistribution(tuple(blue))
        return cls((n_green, n_blue), (green, blue), ("green", "blue"), strict=strict)

    def assumption_violations(self) -> list:
        out = []
        for label, dist in zip(self.labels, self.dists):
            if not dist.mu(INFINITY) > 0:
                out.append(f"group {label}: expected surplus must be positive")
        for a in range(len(self.dists) - 1):
            if not stochastically_dominates(self.dists[a], self.dists[a + 1]):
                out.append(f"group {self.labels[a]} must stochastically dominate {self.labels[a + 1]}")
        return out

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def n_groups(self) -> int:
        return len(self.sizes)

    @property
    def n_green(self) -> int:
        return self.sizes[GREEN]

    @property
    def n_blue(self) -> int:
        self._require_two()
        return self.sizes[BLUE]

    @property
    def dist_green(self) -> OpportunityDistribution:
        return self.dists[GREEN]

    @property
    def dist_blue(self) -> OpportunityDistribution:
        self._require_two()
        return self.dists[BLUE]

    @property
    def exact(self) -> bool:
        return all(d.exact for d in self.dists)

    @property
    def node_groups(self) -> tuple:
        return self._groups

    def group_of(self, i: int) -> int:
        return self._groups[i]

    def dist_of(self, i: int) -> OpportunityDistribution:
        return self.dists[self._groups[i]]

    def members(self, group: int) -> range:
        start = sum(self.sizes[:group])
        return range(start, start + self.sizes[group])

    def as_float(self) -> "Population":
        return Population(self.sizes, tuple(d.as_float() for d in self.dists), self.labels, strict=False)

    def _require_two(self):
        if len(self.sizes) != 2:
            raise InputError("this operation needs exactly two groups (green, blue)")


# --------------------------------------------------------------------------
# Networks
# --------------------------------------------------------------------------


def _norm(i: int, j: int) -> tuple:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Network:
    """Undirected simple graph on nodes ``0..n-1``."""

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise InputError("node count must be non-negative")
        norm = set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise InputError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"edge ({i}, {j}) outside [0, {n})")
            norm.add(_norm(i, j))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [set() for _ in range(n)]
        for i, j in norm:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @classmethod
    def empty(cls, n: int) -> "Network":
        return cls(n, frozenset())

    def neighbors(self, i: int) -> frozenset:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def degrees(self) -> tuple:
        return tuple(len(a) for a in self._adj)

    def has_edge(self, i: int, j: int) -> bool:
        return _norm(i, j) in self.edges

    def with_edges(self, pairs: Iterable) -> "Network":
        return Network(self.n, self.edges | {_norm(*p) for p in pairs})

    def without_edges(self, pairs: Iterable) -> "Network":
        return Network(self.n, self.edges - {_norm(*p) for p in pairs})

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def __contains__(self, pair) -> bool:
        return _norm(*pair) in self.edges

    def __iter__(self) -> Iterator:
        return iter(self.sorted_edges())

    def __len__(self) -> int:
        return len(self.edges)


def as_network(Q, n: int) -> Network:
    """Coerce ``None`` / a pair iterable / a Network into a Network on ``n`` nodes."""
    if Q is None:
        return Network.empty(n)
    if isinstance(Q, Network):
        return Q
    return Network(n, frozenset(tuple(p) for p in Q))


# --------------------------------------------------------------------------
# Parameters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamPoint:
    """Edge cost, recommendations per node, and blue cross-group fraction."""

    gamma: Number
    k: int = 0
    rho: Fraction = Fraction(0)

    def __post_init__(self):
        gamma = self.gamma if isinstance(self.gamma, float) else parse_number(self.gamma)
        if not gamma > 0:
            raise InputError("gamma must be positive")
        k = self.k
        if int(k) != k or k < 0:
            raise InputError("k must be a non-negative integer")
        k = int(k)
        rho = self.rho
        if isinstance(rho, float):
            rho = Fraction(rho).limit_denominator(10**6)
        else:
            rho = parse_number(rho)
        if rho < 0 or rho > 1:
            raise InputError("rho must lie in [0, 1]")
        if k == 0 and rho != 0:
            raise InputError("rho must be 0 when k = 0")
        if (rho * k).denominator != 1:
            raise InputError(f"rho = {rho} is not a multiple of 1/k for k = {k}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "rho", rho)

    @property
    def exact(self) -> bool:
        return is_exact(self.gamma)

    @property
    def degree_cap(self) -> int:
        """Largest degree any individual can hold in an equilibrium."""
        g = self.gamma
        inv = 1 / g if isinstance(g, float) else Fraction(1) / g
        return math.floor(inv) + self.k

    @property
    def blue_cross(self) -> int:
        return int(self.rho * self.k)

    def sigma(self, pop: Population) -> Fraction:
        return self.rho * Fraction(pop.n_blue, pop.n_green)

    def green_cross(self, pop: Population) -> Fraction:
        return self.sigma(pop) * self.k

    def check_against(self, pop: Population) -> None:
        if self.k and pop.n_groups == 2 and self.sigma(pop) > 1:
            raise InputError("rho * |B| / |G| must not exceed 1")

    def as_float(self) -> "ParamPoint":
        return ParamPoint(float(self.gamma), self.k, self.rho)


# --------------------------------------------------------------------------
# Utility and metrics
# --------------------------------------------------------------------------


def _check(E: Network, pop: Population) -> None:
    if E.n != pop.n:
        raise InputError(f"network has {E.n} nodes but population has {pop.n}")


def utility(E: Network, i: int, pop: Population, params: ParamPoint, Q=None) -> Number:
    """Expected utility of node ``i``: probability of ending up with an
    opportunity minus ``gamma`` per non-recommended neighbour."""
    _check(E, pop)
    if not 0 <= i < E.n:
        raise InputError(f"node {i} outside [0, {E.n})")
    Q = as_network(Q, E.n)
    miss = 1
    organic = 0
    for j in E.neighbors(i):
        miss *= 1 - pop.dist_of(j).pass_prob(E.degree(j))
        if not Q.has_edge(i, j):
            organic += 1
    return 1 - pop.dist_of(i).p0 * miss - params.gamma * organic


def utilities(E: Network, pop: Population, params: ParamPoint, Q=None) -> tuple:
    _check(E, pop)
    Q = as_network(Q, E.n)
    return tuple(utility(E, i, pop, params, Q) for i in range(E.n))


def group_mean_utilities(E: Network, pop: Population, params: ParamPoint, Q=None) -> tuple:
    us = utilities(E, pop, params, Q)
    out = []
    for g in range(pop.n_groups):
        members = pop.members(g)
        out.append(sum((us[i] for i in members), 0) / _size(len(members), us))
    return tuple(out)


def _size(count: int, sample) -> Number:
    if any(isinstance(u, float) for u in sample):
        return float(count)
    return Fraction(count)


def _ratio(num, den, what: str):
    if not strictly_positive(den):
        raise DegenerateDenominatorError(f"{what} denominator is {den}, must be positive")
    return num / den


def utility_ratio(E: Network, pop: Population, params: ParamPoint, Q=None) -> Number:
    """Mean green utility over mean blue utility."""
    pop._require_two()
    green, blue = group_mean_utilities(E, pop, params, Q)
    return _ratio(green, blue, "mean blue utility")


def exogenous_utility_ratio(pop: Population) -> Number:
    """Utility ratio of the empty network, ``(1 - g0) / (1 - b0)``."""
    pop._require_two()
    return _ratio(1 - pop.dist_green.p0, 1 - pop.dist_blue.p0, "1 - b0")


def welfare_utilitarian(E: Network, pop: Population, params: ParamPoint, Q=None) -> Number:
    return sum(utilities(E, pop, params, Q), 0)


def welfare_rawlsian(E: Network, pop: Population, params: ParamPoint, Q=None) -> Number:
    return min(utilities(E, pop, params, Q))


def welfare_exogenous(pop: Population) -> Number:
    return sum(((1 - pop.dist_of(i).p0) for i in range(pop.n)), 0)


def exogenous_utilities(pop: Population) -> tuple:
    return tuple(1 - pop.dist_of(i).p0 for i in range(pop.n))


__all__ = [
    "BLUE",
    "GREEN",
    "INFINITY",
    "Network",
    "OpportunityDistribution",
    "ParamPoint",
    "Population",
    "as_network",
    "exogenous_utilities",
    "exogenous_utility_ratio",
    "group_mean_utilities",
    "mu",
    "parse_number",
    "stochastically_dominates",
    "strictly_positive",
    "utilities",
    "utility",
    "utility_ratio",
    "welfare_exogenous",
    "welfare_rawlsian",
    "welfare_utilitarian",
]
