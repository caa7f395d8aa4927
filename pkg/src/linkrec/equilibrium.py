"""Defection-free pairwise Nash (DFPN) checking, enumeration and construction.

A network is DFPN when

* no endpoint of an existing edge strictly gains by severing it, and
* for every missing edge ``(i, j)`` it is not the case that both ``i`` and
  ``j`` strictly gain by forming it, where each may simultaneously drop any
  subset of their own current links.

Two readings of "both strictly gain" are supported. Under ``OWN`` (the
default) each endpoint's utility is evaluated on the network obtained by
adding ``(i, j)`` and removing only its own severed links, which lets the two
best responses be optimised independently. Under ``JOINT`` both utilities are
evaluated on the network after the whole deviation, so one endpoint's dropped
links change the other's view through degrees. Every ``OWN`` defection is
also a ``JOINT`` one, so joint equilibria are a subset of the others.

Comparisons are exact when the inputs are Fractions. Float inputs are
accepted with a ``1e-12`` strictness margin but are not meant for the
equilibrium tests.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ConsistencyError, FeasibilityError, InputError, ResourceError
from .model import (
    BLUE,
    GREEN,
    Network,
    ParamPoint,
    Population,
    as_network,
    strictly_positive,
    utility,
)
from .recsets import (
    RecommendationSet,
    circulant_edges,
    circulant_offsets,
    construct_recommendations,
    plan_recommendations,
)

ADD = "add-with-severing"
SEVER = "unilateral-sever"

EXHAUSTIVE = "exhaustive"
SORTED = "sorted"
AUTO = "auto"

JOINT = "joint"
OWN = "own"
SEMANTICS = (JOINT, OWN)

# above this many organic neighbours "auto" switches to the sorted search
AUTO_EXHAUSTIVE_LIMIT = 12


# --------------------------------------------------------------------------
# Witnesses and verdicts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DefectionWitness:
    """A concrete profitable deviation from ``E``.

    For ``kind == ADD`` both deltas are strictly positive. For ``kind == SEVER``
    the pair is an existing edge and at least one delta is strictly positive;
    a delta of ``None`` means that endpoint was not evaluated.
    """

    kind: str
    pair: tuple
    severed_i: frozenset = frozenset()
    severed_j: frozenset = frozenset()
    delta_i: Optional[object] = None
    delta_j: Optional[object] = None
    joint: bool = False

    def deviation(self, E: Network, endpoint: int) -> Network:
        """Network on which ``endpoint``'s post-deviation utility is evaluated."""
        i, j = self.pair
        if endpoint not in (i, j):
            raise InputError(f"node {endpoint} is not part of {self.pair}")
        if self.kind == SEVER:
            return E.without_edges([self.pair])
        if self.joint:
            dropped = [(i, s) for s in self.severed_i] + [(j, s) for s in self.severed_j]
            return E.with_edges([self.pair]).without_edges(dropped)
        severed = self.severed_i if endpoint == i else self.severed_j
        return E.with_edges([self.pair]).without_edges((endpoint, s) for s in severed)

    def deviators(self) -> tuple:
        i, j = self.pair
        if self.kind == ADD:
            return (i, j)
        out = []
        if self.delta_i is not None and strictly_positive(self.delta_i):
            out.append(i)
        if self.delta_j is not None and strictly_positive(self.delta_j):
            out.append(j)
        return tuple(out)

    def describe(self) -> str:
        i, j = self.pair
        if self.kind == SEVER:
            who = ", ".join(str(x) for x in self.deviators())
            return f"sever ({i}, {j}): node {who} gains"
        return (f"add ({i}, {j}) severing {sorted(self.severed_i)} / {sorted(self.severed_j)}: "
                f"gains {self.delta_i} / {self.delta_j}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pair": list(self.pair),
            "severed_i": sorted(self.severed_i),
            "severed_j": sorted(self.severed_j),
            "delta_i": None if self.delta_i is None else str(self.delta_i),
            "delta_j": None if self.delta_j is None else str(self.delta_j),
            "joint": self.joint,
        }


@dataclass(frozen=True)
class DfpnResult:
    """Outcome of :func:`is_dfpn`; truthy iff ``E`` is an equilibrium."""

    witness: Optional[DefectionWitness] = None

    @property
    def is_equilibrium(self) -> bool:
        return self.witness is None

    def __bool__(self) -> bool:
        return self.witness is None

    def __str__(self) -> str:
        return "equilibrium" if self.witness is None else self.witness.describe()


@dataclass(frozen=True)
class BestResponse:
    """One endpoint's best severed set when forming a new link."""

    node: int
    severed: frozenset
    delta: object


# --------------------------------------------------------------------------
# Exact deviation arithmetic
# --------------------------------------------------------------------------


class _Game:
    """Cached quantities for evaluating deviations from one network."""

    def __init__(self, E: Network, pop: Population, params: ParamPoint, Q=None):
        if E.n != pop.n:
            raise InputError(f"network has {E.n} nodes but population has {pop.n}")
        self.E = E
        self.pop = pop
        self.params = params
        self.Q = as_network(Q, E.n)
        self.gamma = params.gamma
        self.deg = E.degrees()
        self.p0 = [pop.dist_of(i).p0 for i in range(E.n)]
        self.q = [pop.dist_of(j).pass_prob(self.deg[j]) if self.deg[j] else None
                  for j in range(E.n)]
        self._qplus = {}
        self.organic = []
        self.recommended = []
        for i in range(E.n):
            org, rec = [], []
            for j in sorted(E.neighbors(i)):
                (rec if self.Q.has_edge(i, j) else org).append(j)
            self.organic.append(org)
            self.recommended.append(rec)

    def qplus(self, j: int):
        try:
            return self._qplus[j]
        except KeyError:
            v = self.pop.dist_of(j).pass_prob(self.deg[j] + 1)
            self._qplus[j] = v
            return v

    def miss(self, i: int, skip=()) -> object:
        out = 1
        for ell in self.E.neighbors(i):
            if ell not in skip:
                out *= 1 - self.q[ell]
        return out

    def is_organic(self, i: int, j: int) -> bool:
        return not self.Q.has_edge(i, j)

    def sever_delta(self, i: int, j: int):
        """Utility change for ``i`` when it drops the link to ``j``."""
        saved = self.gamma if self.is_organic(i, j) else 0
        return saved - self.p0[i] * self.q[j] * self.miss(i, (j,))

    def add_delta(self, i: int, j: int, severed=()):
        """Utility change for ``i`` when it links to ``j`` and drops ``severed``."""
        severed = tuple(severed)
        old = self.p0[i] * self.miss(i)
        new = self.p0[i] * (1 - self.qplus(j)) * self.miss(i, severed)
        cost = (self.gamma if self.is_organic(i, j) else 0)
        cost -= self.gamma * sum(1 for s in severed if self.is_organic(i, s))
        return old - new - cost

    def best_response(self, i: int, j: int, method: str = AUTO) -> BestResponse:
        org = self.organic[i]
        if method == AUTO:
            method = EXHAUSTIVE if len(org) <= AUTO_EXHAUSTIVE_LIMIT else SORTED
        if method == EXHAUSTIVE:
            return self._best_exhaustive(i, j, org)
        if method == SORTED:
            return self._best_sorted(i, j, org)
        raise InputError(f"unknown search method {method!r}")

    def _best_exhaustive(self, i, j, org) -> BestResponse:
        best_set, best = (), None
        for size in range(len(org) + 1):
            for subset in itertools.combinations(org, size):
                d = self.add_delta(i, j, subset)
                if best is None or d > best:
                    best_set, best = subset, d
        return BestResponse(i, frozenset(best_set), best)

    def _best_sorted(self, i, j, org) -> BestResponse:
        # for a fixed number of severed links the cost saving is fixed, so
        # dropping the neighbours least likely to pass anything is optimal
        order = sorted(org, key=lambda ell: (self.q[ell], ell))
        keep_rec = 1
        for ell in self.recommended[i]:
            keep_rec *= 1 - self.q[ell]
        suffix = [1] * (len(order) + 1)
        for t in range(len(order) - 1, -1, -1):
            suffix[t] = suffix[t + 1] * (1 - self.q[order[t]])
        old = self.p0[i] * keep_rec * suffix[0]
        base_cost = self.gamma if self.is_organic(i, j) else 0
        factor = self.p0[i] * (1 - self.qplus(j)) * keep_rec
        best_m, best = 0, None
        for m in range(len(order) + 1):
            d = old - factor * suffix[m] - base_cost + self.gamma * m
            if best is None or d > best:
                best_m, best = m, d
        return BestResponse(i, frozenset(order[:best_m]), best)

    # joint deviations -------------------------------------------------------

    def qminus(self, ell: int):
        return self.pop.dist_of(ell).pass_prob(self.deg[ell] - 1)

    def joint_delta(self, i: int, j: int, severed_i, severed_j):
        """Utility change for ``i`` after the whole deviation: ``(i, j)``
        formed, ``i`` drops ``severed_i`` and ``j`` drops ``severed_j``."""
        severed_i, severed_j = set(severed_i), set(severed_j)
        qj = self.pop.dist_of(j).pass_prob(self.deg[j] + 1 - len(severed_j))
        new = 1 - qj
        for ell in self.E.neighbors(i):
            if ell in severed_i:
                continue
            new *= 1 - (self.qminus(ell) if ell in severed_j else self.q[ell])
        cost = (self.gamma if self.is_organic(i, j) else 0)
        cost -= self.gamma * sum(1 for s in severed_i if self.is_organic(i, s))
        return self.p0[i] * (self.miss(i) - new) - cost

    def _joint_bound(self, me: int, other: int, mine: dict, theirs: dict):
        """Largest gain ``me`` can still reach when ``mine``/``theirs`` fix
        some sever decisions (1 = drop). Undecided links of ``other`` are
        assumed dropped, which only helps ``me``; undecided links of ``me``
        are set optimally for ``me`` alone."""
        other_nbrs = self.E.neighbors(other)
        dropped = sum(1 for ell in other_nbrs if theirs.get(ell, 1) == 1)
        q_other = self.pop.dist_of(other).pass_prob(self.deg[other] + 1 - dropped)
        fixed = 1 - q_other
        saved = 0
        free = []
        for ell in self.E.neighbors(me):
            choice = mine.get(ell)
            organic = self.is_organic(me, ell)
            if choice == 1:
                saved += organic
                continue
            boosted = ell in other_nbrs and theirs.get(ell, 1) == 1
            q = self.qminus(ell) if boosted else self.q[ell]
            if choice == 0 or not organic:
                fixed *= 1 - q
            else:
                free.append(q)
        free.sort()
        suffix = [1] * (len(free) + 1)
        for t in range(len(free) - 1, -1, -1):
            suffix[t] = suffix[t + 1] * (1 - free[t])
        old = self.p0[me] * self.miss(me)
        cost = self.gamma if self.is_organic(me, other) else 0
        factor = self.p0[me] * fixed
        return max(old - factor * suffix[m] - cost + self.gamma * (saved + m)
                   for m in range(len(free) + 1))

    def joint_defection(self, i: int, j: int) -> Optional[tuple]:
        """Exact branch and bound over both endpoints' severed sets.

        Returns ``(S_i, S_j, delta_i, delta_j)`` for a deviation in which both
        strictly gain, or None.
        """
        Ni = sorted(self.E.neighbors(i))
        Nj = sorted(self.E.neighbors(j))
        common = [ell for ell in Ni if ell in set(Nj)]
        order = []
        for ell in common:
            order.append((i, ell))
            order.append((j, ell))
        order += [(i, ell) for ell in Ni if ell not in common]
        order += [(j, ell) for ell in Nj if ell not in common]
        x, y = {}, {}

        def visit(pos):
            bi = self._joint_bound(i, j, x, y)
            if not strictly_positive(bi):
                return None
            bj = self._joint_bound(j, i, y, x)
            if not strictly_positive(bj):
                return None
            if pos == len(order):
                # every decision is fixed, so the bounds are the exact gains
                return (frozenset(k for k, v in x.items() if v),
                        frozenset(k for k, v in y.items() if v), bi, bj)
            owner, ell = order[pos]
            table = x if owner == i else y
            for choice in (0, 1):
                table[ell] = choice
                hit = visit(pos + 1)
                if hit is not None:
                    return hit
            del table[ell]
            return None

        return visit(0)


# --------------------------------------------------------------------------
# Public checks
# --------------------------------------------------------------------------


def best_defection_for_add(E: Network, i: int, j: int, pop: Population, params: ParamPoint,
                           Q=None, method: str = AUTO) -> tuple:
    """Best severed sets for ``i`` and ``j`` when forming ``(i, j)``.

    Returns ``(BestResponse_i, BestResponse_j)``. The link is a profitable
    defection iff both deltas are strictly positive.
    """
    if E.has_edge(i, j):
        raise InputError(f"({i}, {j}) is already an edge")
    if i == j:
        raise InputError("a node cannot link to itself")
    game = _Game(E, pop, params, Q)
    return game.best_response(i, j, method), game.best_response(j, i, method)


def is_dfpn(E: Network, pop: Population, params: ParamPoint, Q=None,
            method: str = AUTO, semantics: str = OWN) -> DfpnResult:
    """Decide whether ``E`` is DFPN; otherwise return the first witness found.

    Checks run in a fixed order (missing recommended links, single severs,
    every other missing link with independently optimised severing, then
    under ``JOINT`` the coupled search) so the witness is deterministic.
    ``method`` only affects the independent best responses.
    """
    if semantics not in SEMANTICS:
        raise InputError(f"unknown semantics {semantics!r}")
    game = _Game(E, pop, params, Q)
    joint = semantics == JOINT
    n = E.n
    for i, j in sorted(game.Q.edges - E.edges):
        di, dj = game.add_delta(i, j), game.add_delta(j, i)
        if strictly_positive(di) and strictly_positive(dj):
            return DfpnResult(DefectionWitness(ADD, (i, j), frozenset(), frozenset(), di, dj, joint))
    for i, j in E.sorted_edges():
        di, dj = game.sever_delta(i, j), game.sever_delta(j, i)
        if strictly_positive(di) or strictly_positive(dj):
            return DfpnResult(DefectionWitness(SEVER, (i, j), frozenset(), frozenset(), di, dj))
    missing = [(i, j) for i in range(n) for j in range(i + 1, n) if not E.has_edge(i, j)]
    for i, j in missing:
        bi = game.best_response(i, j, method)
        if not strictly_positive(bi.delta):
            continue
        bj = game.best_response(j, i, method)
        if strictly_positive(bj.delta):
            if joint:
                # the other side's severing only helps, so the gains stay positive
                di = game.joint_delta(i, j, bi.severed, bj.severed)
                dj = game.joint_delta(j, i, bj.severed, bi.severed)
                return DfpnResult(DefectionWitness(ADD, (i, j), bi.severed, bj.severed, di, dj, True))
            return DfpnResult(DefectionWitness(ADD, (i, j), bi.severed, bj.severed,
                                               bi.delta, bj.delta))
    if joint:
        for i, j in missing:
            hit = game.joint_defection(i, j)
            if hit is not None:
                si, sj, di, dj = hit
                return DfpnResult(DefectionWitness(ADD, (i, j), si, sj, di, dj, True))
    return DfpnResult(None)


def witness_is_sound(w: DefectionWitness, E: Network, pop: Population, params: ParamPoint,
                     Q=None) -> bool:
    """Re-evaluate a witness from scratch with :func:`model.utility`."""
    Q = as_network(Q, E.n)
    for node in w.deviators():
        before = utility(E, node, pop, params, Q)
        after = utility(w.deviation(E, node), node, pop, params, Q)
        if not strictly_positive(after - before):
            return False
    return bool(w.deviators())


# --------------------------------------------------------------------------
# Enumeration
# --------------------------------------------------------------------------


def _require_fact_preconditions(pop: Population) -> None:
    for g, dist in enumerate(pop.dists):
        if not dist.p0 > 0:
            raise InputError(
                f"enumeration needs p0 > 0 in every group (group {pop.labels[g]} has p0 = {dist.p0})")
        if not dist.mu(math.inf) > 0:
            raise InputError(f"group {pop.labels[g]} has zero expected surplus")


def _pass_prob_values(pop: Population, n: int) -> list:
    vals = set()
    for dist in pop.dists:
        for d in range(1, max(n, 2)):
            vals.add(dist.pass_prob(d))
    return sorted(vals)


def organic_degree_caps(pop: Population, params: ParamPoint, prune: bool = True) -> list:
    """Largest number of organic links each node can keep in any equilibrium.

    Without pruning this is ``floor(1 / gamma)``. With pruning it is the
    largest ``m`` for which ``gamma <= p0 * max_q q (1 - q)^(m - 1)`` over the
    pass probabilities that can occur, because the neighbour with the lowest
    pass probability is worth at most that much.
    """
    base = math.floor(1 / Fraction(params.gamma)) if not isinstance(params.gamma, float) \
        else math.floor(1 / params.gamma)
    if not prune:
        return [base] * pop.n
    qvals = _pass_prob_values(pop, pop.n)
    caps = []
    for i in range(pop.n):
        p0 = pop.dist_of(i).p0
        m = 0
        while m < base and any(params.gamma <= p0 * q * (1 - q) ** m for q in qvals):
            m += 1
        caps.append(m)
    return caps


def candidate_organic_edges(pop: Population, params: ParamPoint, Q: Network,
                            prune: bool = True) -> list:
    """Pairs that may carry an organic link in some equilibrium."""
    out = []
    for i in range(pop.n):
        for j in range(i + 1, pop.n):
            if Q.has_edge(i, j):
                continue
            if prune:
                # a kept organic link is worth at most p0_i * mu_j(1) to i
                if params.gamma > pop.dist_of(i).p0 * pop.dist_of(j).mu(1):
                    continue
                if params.gamma > pop.dist_of(j).p0 * pop.dist_of(i).mu(1):
                    continue
            out.append((i, j))
    return out


@dataclass
class _Search:
    """Backtracking state shared by one enumeration run."""

    pop: Population
    params: ParamPoint
    Q: Network
    candidates: list
    caps: list
    prune: bool
    method: str
    perms: Optional[list] = None
    semantics: str = OWN
    found: list = field(default_factory=list)
    leaves: int = 0

    def __post_init__(self):
        n = self.pop.n
        self.n = n
        self.gamma_f = float(self.params.gamma)
        self.p0_f = [float(self.pop.dist_of(i).p0) for i in range(n)]
        tables = []
        for dist in self.pop.dists:
            row = [0.0] + [float(dist.pass_prob(d)) for d in range(1, n + 1)]
            tables.append(row)
        self.qf = [tables[self.pop.group_of(i)] for i in range(n)]
        self.q_adj = [set(self.Q.neighbors(i)) for i in range(n)]
        self.org_adj = [set() for _ in range(n)]
        self.deg = [len(self.q_adj[i]) for i in range(n)]
        self.remaining = [0] * n
        for i, j in self.candidates:
            self.remaining[i] += 1
            self.remaining[j] += 1
        self.max_deg = [len(self.q_adj[i]) + self.caps[i] for i in range(n)]

    # bound checks --------------------------------------------------------

    def _d_max(self, m: int) -> int:
        return min(self.deg[m] + self.remaining[m], self.max_deg[m])

    def _node_ok(self, i: int) -> bool:
        """Can every organic link of ``i`` still survive i's sever test?"""
        if not self.org_adj[i]:
            return True
        nbrs = self.q_adj[i] | self.org_adj[i]
        lows = {m: 1.0 - self.qf[m][self._d_max(m)] for m in nbrs}
        for ell in self.org_adj[i]:
            bound = self.p0_f[i] * self.qf[ell][self.deg[ell]]
            for m in nbrs:
                if m != ell:
                    bound *= lows[m]
            if bound < self.gamma_f - 1e-9:
                return False
        return True

    def _local_ok(self, a: int, b: int) -> bool:
        touched = {a, b} | self.q_adj[a] | self.org_adj[a] | self.q_adj[b] | self.org_adj[b]
        return all(self._node_ok(x) for x in touched)

    # search ----------------------------------------------------------------

    def run(self, prefix=()):
        pos = 0
        for bit in prefix:
            # a failed prefix leaves dirty state, but each prefix gets a fresh search
            if not self._decide(pos, bit):
                return self.found
            pos += 1
        self._recurse(pos)
        return self.found

    def _decide(self, pos: int, include: bool) -> bool:
        a, b = self.candidates[pos]
        self.remaining[a] -= 1
        self.remaining[b] -= 1
        if include:
            if len(self.org_adj[a]) >= self.caps[a] or len(self.org_adj[b]) >= self.caps[b]:
                return False
            self.org_adj[a].add(b)
            self.org_adj[b].add(a)
            self.deg[a] += 1
            self.deg[b] += 1
        if self.prune and not self._local_ok(a, b):
            return False
        return True

    def _revert(self, pos: int, include: bool) -> None:
        a, b = self.candidates[pos]
        self.remaining[a] += 1
        self.remaining[b] += 1
        if include and b in self.org_adj[a]:
            self.org_adj[a].discard(b)
            self.org_adj[b].discard(a)
            self.deg[a] -= 1
            self.deg[b] -= 1

    def _recurse(self, pos: int) -> None:
        if pos == len(self.candidates):
            self._leaf()
            return
        for include in (False, True):
            if self._decide(pos, include):
                self._recurse(pos + 1)
            self._revert(pos, include)

    def _leaf(self) -> None:
        self.leaves += 1
        organic = frozenset((i, j) for i in range(self.n) for j in self.org_adj[i] if i < j)
        if self.perms is not None and not _is_orbit_minimal(organic, self.perms):
            return
        E = Network(self.n, self.Q.edges | organic)
        if self.prune and _float_reject(self, E):
            return
        if is_dfpn(E, self.pop, self.params, self.Q, self.method, self.semantics):
            self.found.append(E)


def _float_reject(s: _Search, E: Network) -> bool:
    """Quick double-precision screen: True only if some defection clearly
    pays (by more than 1e-9 for every deviator)."""
    n, g = s.n, s.gamma_f
    deg = E.degrees()
    q = [s.qf[j][deg[j]] for j in range(n)]
    nbrs = [sorted(E.neighbors(i)) for i in range(n)]
    organic = [[j for j in nbrs[i] if j not in s.q_adj[i]] for i in range(n)]
    miss = []
    for i in range(n):
        m = 1.0
        for j in nbrs[i]:
            m *= 1.0 - q[j]
        miss.append(m)
    tol = 1e-9

    def prod_except(i, skip):
        out = 1.0
        for ell in nbrs[i]:
            if ell != skip:
                out *= 1.0 - q[ell]
        return out

    for i in range(n):
        for j in organic[i]:
            if g - s.p0_f[i] * q[j] * prod_except(i, j) > tol:
                return True

    def best(i, j):
        order = sorted(organic[i], key=lambda ell: q[ell])
        rec = 1.0
        for ell in nbrs[i]:
            if ell in s.q_adj[i]:
                rec *= 1.0 - q[ell]
        suffix = [1.0] * (len(order) + 1)
        for t in range(len(order) - 1, -1, -1):
            suffix[t] = suffix[t + 1] * (1.0 - q[order[t]])
        qj = s.qf[j][deg[j] + 1]
        base = g if j not in s.q_adj[i] else 0.0
        old = s.p0_f[i] * miss[i]
        factor = s.p0_f[i] * (1.0 - qj) * rec
        return max(old - factor * suffix[m] - base + g * m for m in range(len(order) + 1))

    for i in range(n):
        for j in range(i + 1, n):
            if j in nbrs[i]:
                continue
            if best(i, j) > tol and best(j, i) > tol:
                return True
    return False


def group_automorphisms(pop: Population, Q: Network, limit: int = 50000) -> Optional[list]:
    """Group-preserving node permutations that map ``Q`` onto itself.

    Returns None when the candidate permutation count exceeds ``limit``.
    """
    total = 1
    for s in pop.sizes:
        total *= math.factorial(s)
    if total > limit:
        return None
    blocks = [list(pop.members(g)) for g in range(pop.n_groups)]
    out = []
    for parts in itertools.product(*(itertools.permutations(b) for b in blocks)):
        perm = [0] * pop.n
        for block, image in zip(blocks, parts):
            for src, dst in zip(block, image):
                perm[src] = dst
        mapped = {tuple(sorted((perm[i], perm[j]))) for i, j in Q.edges}
        if mapped == set(Q.edges):
            out.append(tuple(perm))
    return out


def _mapped(edges, perm) -> tuple:
    return tuple(sorted(tuple(sorted((perm[i], perm[j]))) for i, j in edges))


def _is_orbit_minimal(edges: frozenset, perms: list) -> bool:
    key = tuple(sorted(edges))
    return all(_mapped(edges, p) >= key for p in perms)


def _run_prefix(args) -> list:
    pop, params, Q, candidates, caps, prune, method, perms, semantics, prefix = args
    s = _Search(pop, params, Q, candidates, caps, prune, method, perms, semantics)
    return [sorted(E.edges) for E in s.run(prefix)]


def enumerate_equilibria(pop: Population, params: ParamPoint, Q=None, max_n: int = 8, *,
                         prune: bool = True, symmetry: bool = False, workers: int = 1,
                         method: str = SORTED, semantics: str = OWN) -> list:
    """Every DFPN network containing ``Q`` with bounded degrees.

    The search only visits supersets of ``Q`` whose organic degrees are at
    most ``floor(1 / gamma)``; both restrictions hold for every equilibrium
    when all ``p0 > 0``. ``prune`` adds further sound cuts, ``symmetry``
    evaluates one network per orbit of the group-preserving automorphisms of
    ``Q`` and expands the orbits afterwards. Each surviving candidate is
    confirmed with the exact :func:`is_dfpn` using ``method``; the sorted
    search is the default because it is linear in the degree and is checked
    against the exhaustive one in the test suite. The cuts only use
    conditions that hold under both ``semantics``. Results are sorted by edge
    list and do not depend on ``workers``.
    """
    if pop.n > max_n:
        raise ResourceError(f"n = {pop.n} exceeds max_n = {max_n}")
    if semantics not in SEMANTICS:
        raise InputError(f"unknown semantics {semantics!r}")
    _require_fact_preconditions(pop)
    Q = as_network(Q, pop.n)
    candidates = candidate_organic_edges(pop, params, Q, prune)
    caps = organic_degree_caps(pop, params, prune)
    perms = group_automorphisms(pop, Q) if symmetry else None

    depth = 0
    if workers > 1:
        depth = min(len(candidates), max(1, math.ceil(math.log2(workers * 4))))
    prefixes = list(itertools.product((False, True), repeat=depth))
    jobs = [(pop, params, Q, candidates, caps, prune, method, perms, semantics, p)
            for p in prefixes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_run_prefix, jobs))
    else:
        chunks = [_run_prefix(j) for j in jobs]

    found = set()
    for chunk in chunks:
        for edges in chunk:
            found.add(tuple(edges))
    if perms is not None:
        found = {_mapped(edges, p) for edges in found for p in perms}
    return [Network(pop.n, frozenset(e)) for e in sorted(found)]


# --------------------------------------------------------------------------
# Group-symmetric construction
# --------------------------------------------------------------------------


def _miss_pow(dist, d: int, exponent) -> object:
    if exponent == 0:
        return 1
    return (1 - dist.pass_prob(d)) ** int(exponent)


def symmetric_thresholds(pop: Population, params: ParamPoint, d: int) -> tuple:
    """``(keep_bound, add_bound)`` for greens at common degree ``d > k``.

    Degree ``d`` is stable iff ``add_bound <= gamma <= keep_bound``: greens do
    not want to drop an organic link, and two greens do not both want a new
    one.
    """
    g, b = pop.dist_green, pop.dist_blue
    c = params.green_cross(pop)
    rec = _miss_pow(b, params.k, c)
    q_d, q_next = g.pass_prob(d), g.pass_prob(d + 1)
    keep = g.p0 * q_d * (1 - q_d) ** int(d - c - 1) * rec
    add = g.p0 * q_next * (1 - q_d) ** int(d - c) * rec
    return keep, add


def regular_threshold(pop: Population, params: ParamPoint):
    """Edge cost above which the recommendation graph alone is stable."""
    g, b = pop.dist_green, pop.dist_blue
    k = params.k
    c = params.green_cross(pop)
    return g.p0 * g.pass_prob(k + 1) * _miss_pow(g, k, k - c) * _miss_pow(b, k, c)


def blue_isolation_threshold(pop: Population):
    """``b0 (1 - b0 - b1)``: no blue wants an organic link above this cost."""
    b = pop.dist_blue
    return b.p0 * (1 - b.p0 - b.p1)


@dataclass(frozen=True)
class SymmetricEquilibrium:
    E: Network
    Q: RecommendationSet
    green_degree: int
    feasible_degrees: tuple

    @property
    def organic_edges(self) -> frozenset:
        return self.E.edges - self.Q.edges


def symmetric_green_degrees(pop: Population, params: ParamPoint) -> tuple:
    """All common green degrees that satisfy the symmetric stability tests."""
    k = params.k
    out = []
    if params.gamma >= regular_threshold(pop, params):
        out.append(k)
    for d in range(k + 1, params.degree_cap + 1):
        keep, add = symmetric_thresholds(pop, params, d)
        if add <= params.gamma <= keep:
            out.append(d)
    return tuple(out)


def construct_symmetric_equilibrium(pop: Population, params: ParamPoint,
                                    require_peer: bool = False) -> SymmetricEquilibrium:
    """Group-symmetric equilibrium: blues keep only their ``k`` recommended
    links, greens share a common degree realised by a circulant graph.

    ``require_peer`` also demands room for a non-adjacent same-degree peer in
    each group, which the reciprocity audit needs.
    """
    if not params.gamma > blue_isolation_threshold(pop):
        raise InputError("construction needs gamma > b0 (1 - b0 - b1)")
    params.check_against(pop)
    Q = construct_recommendations(pop, params)
    plan = plan_recommendations(pop, params)
    feasible = symmetric_green_degrees(pop, params)
    if not feasible:
        raise ConsistencyError("no stable common green degree within the degree cap")
    d = feasible[0]
    n_g, n_b = pop.n_green, pop.n_blue
    if require_peer:
        if n_g < d - plan.green_cross + 2:
            raise FeasibilityError(f"green group of {n_g} too small for a same-degree peer at degree {d}")
        if n_b < plan.blue_same + 2:
            raise FeasibilityError(f"blue group of {n_b} too small for a same-degree peer")
    if d == params.k:
        return SymmetricEquilibrium(Network(pop.n, Q.edges), Q, d, feasible)
    in_group = d - plan.green_cross
    if in_group > n_g - 1:
        raise FeasibilityError(f"green in-group degree {in_group} exceeds |G| - 1 = {n_g - 1}")
    if plan.green_same % 2 and (d - params.k) % 2:
        raise FeasibilityError(
            "parity: recommendations use the antipodal offset so the organic degree must be even")
    offsets = circulant_offsets(n_g, in_group)
    greens = list(pop.members(GREEN))
    full = circulant_edges(greens, offsets)
    green_q = {e for e in Q.edges if e[0] in greens and e[1] in greens}
    if not green_q <= full:
        raise ConsistencyError("recommended circulant is not contained in the green circulant")
    E = Network(pop.n, Q.edges | full)
    return SymmetricEquilibrium(E, Q, d, feasible)


def smallest_symmetric_population(green, blue, params: ParamPoint, require_peer: bool = False,
                                  max_size: int = 200) -> Population:
    """Equal-size two-group population of minimal size for which
    :func:`construct_symmetric_equilibrium` succeeds."""
    last = None
    for size in range(1, max_size + 1):
        pop = Population.two_group(size, size, green, blue)
        try:
            construct_symmetric_equilibrium(pop, params, require_peer)
        except FeasibilityError as exc:
            last = exc
            continue
        return pop
    raise FeasibilityError(f"no group size up to {max_size} works: {last}")


# --------------------------------------------------------------------------
# Reciprocity audit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditResult:
    compliant: frozenset
    violators: tuple
    reasons: dict

    @property
    def violator_count(self) -> int:
        return len(self.violators)


def reciprocity_audit(E: Network, pop: Population, params: ParamPoint, Q=None,
                      epsilon=Fraction(1, 100), scope: str = "organic") -> AuditResult:
    """Nodes whose links are near-balanced in pass probability.

    A node is locally compliant when, for every neighbour ``j`` in scope,
    ``q_i(d_i) >= q_j(d_j + 1) - epsilon`` and, for same-group ``j``, also
    ``q_i(d_i) <= q_j(d_j - 1) + epsilon``; and it has a non-adjacent
    same-group peer of equal degree. The compliant set is the largest set in
    which every member's scoped neighbours and at least one such peer are
    members too.

    ``scope="organic"`` applies the balance tests to organic links only;
    ``scope="all"`` applies them to recommended links as well.
    """
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    if scope not in ("organic", "all"):
        raise InputError(f"unknown scope {scope!r}")
    Q = as_network(Q, E.n)
    deg = E.degrees()
    n = E.n

    def q(j, d):
        return pop.dist_of(j).pass_prob(d) if d >= 1 else None

    scoped = []
    for i in range(n):
        scoped.append([j for j in sorted(E.neighbors(i)) if scope == "all" or not Q.has_edge(i, j)])
    peers = []
    for i in range(n):
        peers.append([j for j in range(n) if j != i and pop.group_of(j) == pop.group_of(i)
                      and deg[j] == deg[i] and not E.has_edge(i, j)])

    reasons = {}
    for i in range(n):
        why = []
        qi = q(i, deg[i])
        for j in scoped[i]:
            if qi < q(j, deg[j] + 1) - epsilon:
                why.append(f"undervalued by {j}")
            if pop.group_of(j) == pop.group_of(i) and deg[j] >= 2:
                if qi > q(j, deg[j] - 1) + epsilon:
                    why.append(f"overvalued relative to {j}")
        if not peers[i]:
            why.append("no unlinked same-degree peer")
        if why:
            reasons[i] = why
    S = set(range(n)) - set(reasons)
    changed = True
    while changed:
        changed = False
        for i in sorted(S):
            if any(j not in S for j in scoped[i]) or not any(j in S for j in peers[i]):
                S.discard(i)
                reasons.setdefault(i, []).append("depends on a non-compliant node")
                changed = True
    violators = tuple(i for i in range(n) if i not in S)
    return AuditResult(frozenset(S), violators, {i: tuple(v) for i, v in reasons.items()})


__all__ = [
    "ADD",
    "SEVER",
    "JOINT",
    "OWN",
    "SEMANTICS",
    "AuditResult",
    "BestResponse",
    "DefectionWitness",
    "DfpnResult",
    "SymmetricEquilibrium",
    "best_defection_for_add",
    "blue_isolation_threshold",
    "candidate_organic_edges",
    "construct_symmetric_equilibrium",
    "enumerate_equilibria",
    "group_automorphisms",
    "is_dfpn",
    "organic_degree_caps",
    "reciprocity_audit",
    "regular_threshold",
    "smallest_symmetric_population",
    "symmetric_green_degrees",
    "symmetric_thresholds",
    "witness_is_sound",
]
