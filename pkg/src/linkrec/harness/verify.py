"""Verification suites: sample parameter points that satisfy a statement's
hypotheses, enumerate every equilibrium at small ``n`` in exact arithmetic,
and check the claimed inequality on all of them.

Each point is ``pass``, ``fail`` or ``vacuous`` (no equilibrium found, or a
needed equilibrium set is empty). A suite fails if any point fails, is
vacuous if no point is informative, and passes otherwise. Reports are plain
JSON with sorted keys and carry the full instance text of every failure so
it can be replayed with ``linkrec eq check``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from .. import bounds
from ..equilibrium import (
    ADD,
    EXHAUSTIVE,
    JOINT,
    OWN,
    construct_symmetric_equilibrium,
    enumerate_equilibria,
    is_dfpn,
    reciprocity_audit,
    smallest_symmetric_population,
)
from ..errors import LinkrecError
from ..model import (
    GREEN,
    Network,
    OpportunityDistribution,
    ParamPoint,
    Population,
    exogenous_utility_ratio,
    utilities,
    utility_ratio,
    welfare_rawlsian,
    welfare_utilitarian,
)
from ..recsets import construct_recommendations
from .io import Instance, format_instance

SUITES = ("prop1", "prop2", "corollary1", "prop3", "prop4", "lemma1", "facts", "notes-examples")

PASS, FAIL, VACUOUS = "pass", "fail", "vacuous"

F = Fraction


def _two(p0) -> OpportunityDistribution:
    return OpportunityDistribution.two_point(F(p0))


def _dist(*probs) -> OpportunityDistribution:
    return OpportunityDistribution(tuple(F(p) for p in probs))


GREENS = (
    _two("1/2"),
    _two("1/4"),
    _two("3/8"),
    _two("1/8"),
    _two("1/10"),
    _dist("3/10", "1/10", "3/5"),
    _dist("1/5", "1/5", "2/5", "1/5"),
)
BLUES = (
    _two("24/25"),
    _two("19/20"),
    _two("49/50"),
    _two("99/100"),
    _dist("9/10", "3/50", "1/25"),
)
GAMMAS = (F(1, 25), F(1, 20), F(3, 50), F(1, 10))
SIZES = ((2, 1), (2, 2), (3, 1), (3, 2), (2, 3), (3, 3), (4, 2), (4, 3), (3, 4), (4, 4),
         (5, 2), (5, 3), (6, 2))


@dataclass(frozen=True)
class Point:
    pop: Population
    params: ParamPoint

    @property
    def label(self) -> str:
        g, b = self.pop.dist_green, self.pop.dist_blue
        return (f"G={self.pop.n_green} B={self.pop.n_blue} g=({g}) b=({b}) "
                f"gamma={self.params.gamma} k={self.params.k} rho={self.params.rho}")

    def with_params(self, params: ParamPoint) -> "Point":
        return Point(self.pop, params)

    def Q(self) -> Network:
        return construct_recommendations(self.pop, self.params)

    def instance(self, E: Optional[Network] = None) -> str:
        return format_instance(Instance(self.pop, self.params), E=E, Q=self.Q())


@lru_cache(maxsize=None)
def equilibria(point: Point) -> tuple:
    return tuple(enumerate_equilibria(point.pop, point.params, point.Q(), max_n=point.pop.n))


@dataclass
class PointResult:
    point: Point
    verdict: str = PASS
    equilibria: int = 0
    failures: list = field(default_factory=list)
    facts_checked: int = 0
    facts_violations: int = 0
    note: str = ""

    def fail(self, claim: str, detail: str, E: Optional[Network] = None, point: Optional[Point] = None):
        self.verdict = FAIL
        self.failures.append({
            "claim": claim,
            "detail": detail,
            "instance": (point or self.point).instance(E),
        })

    def to_dict(self) -> dict:
        out = {
            "point": self.point.label,
            "verdict": self.verdict,
            "equilibria": self.equilibria,
            "facts_checked": self.facts_checked,
            "facts_violations": self.facts_violations,
        }
        if self.failures:
            out["failures"] = self.failures
        if self.note:
            out["note"] = self.note
        return out


def _check_facts(res: PointResult, point: Point, eqs) -> None:
    Q = point.Q()
    cap = point.params.degree_cap
    for E in eqs:
        res.facts_checked += 1
        if not Q.edges <= E.edges:
            res.facts_violations += 1
            res.fail("recommended links form", "Q is not contained in E", E, point)
        if E.n and max(E.degrees()) > cap:
            res.facts_violations += 1
            res.fail("degree cap", f"max degree {max(E.degrees())} > {cap}", E, point)


# --------------------------------------------------------------------------
# Hypotheses
# --------------------------------------------------------------------------


def _mu_inf(dist) -> float:
    return float(dist.mu(math.inf))


def blue_isolated(pop: Population, params: ParamPoint) -> bool:
    b = pop.dist_blue
    return params.gamma > b.p0 * (1 - b.p0 - b.p1)


def green_links(pop: Population, params: ParamPoint) -> bool:
    g = pop.dist_green
    return params.gamma < g.p0 * (1 - g.p0 - g.p1)


def prop2_holds(pop: Population, params: ParamPoint) -> bool:
    if params.k == 0 or params.rho != 1 or pop.n_blue > pop.n_green:
        return False
    if not blue_isolated(pop, params):
        return False
    try:
        threshold = bounds.cross_recommendation_blue_threshold(pop, params)
    except LinkrecError:
        return False
    return pop.dist_blue.p0 > threshold


def prop3_holds(pop: Population, params: ParamPoint) -> bool:
    if params.k == 0 or params.rho != 1 or not blue_isolated(pop, params):
        return False
    g0, b0 = float(pop.dist_green.p0), float(pop.dist_blue.p0)
    mu = _mu_inf(pop.dist_green)
    ratio = pop.n_blue / pop.n_green
    k, gamma = params.k, float(params.gamma)
    return (gamma < ratio * mu / (4 * (k + 1))
            and b0 > (k + 1) * (g0 * math.exp(-mu) + gamma / mu) / ratio
            and g0 * math.exp(-mu) < ratio / (4 * (k + 1)))


def prop4_holds(pop: Population, params: ParamPoint) -> bool:
    if params.k == 0 or params.rho == 0 or not blue_isolated(pop, params):
        return False
    g0, b0 = float(pop.dist_green.p0), float(pop.dist_blue.p0)
    mu = _mu_inf(pop.dist_green)
    ratio = pop.n_blue / pop.n_green
    k, gamma, rho = params.k, float(params.gamma), float(params.rho)
    if mu >= k:
        return False
    if not (gamma < g0 * mu * math.exp(-mu)
            and b0 > (k + 1) * (g0 * math.exp(-mu) + gamma / mu) / ratio
            and b0 > g0 / (1 - mu / k) ** (rho * k)):
        return False
    # the gap condition must admit rho' = 0
    lower_pass = 1 - gamma / (g0 * math.exp(-mu) + gamma / mu)
    return lower_pass ** (rho * k) + gamma * (k + 1) / (ratio * b0) < 1


# --------------------------------------------------------------------------
# Point generation
# --------------------------------------------------------------------------


def _feasible(pop: Population, params: ParamPoint) -> bool:
    try:
        params.check_against(pop)
        construct_recommendations(pop, params)
    except LinkrecError:
        return False
    return True


def _points(max_n: int, ks, rhos_for: Callable, accept: Callable, sizes=SIZES) -> list:
    out = []
    for (ng, nb), g, b, gamma, k in itertools.product(sizes, GREENS, BLUES, GAMMAS, ks):
        if ng + nb > max_n:
            continue
        try:
            pop = Population.two_group(ng, nb, g, b)
        except LinkrecError:
            continue
        for rho in rhos_for(k):
            try:
                params = ParamPoint(gamma, k, rho)
            except LinkrecError:
                continue
            if _feasible(pop, params) and accept(pop, params):
                out.append(Point(pop, params))
    return out


def _spread(points: list, budget: Optional[int]) -> list:
    """Deterministic, evenly spaced subset of at most ``budget`` points."""
    if budget is None or len(points) <= budget:
        return points
    step = len(points) / budget
    return [points[int(i * step)] for i in range(budget)]


def prop1_points(max_n: int) -> list:
    return _points(max_n, (0,), lambda k: (0,),
                   lambda pop, p: pop.n_green >= 2 and blue_isolated(pop, p) and green_links(pop, p))


def prop2_points(max_n: int) -> list:
    return _points(max_n, (1, 2, 3), lambda k: (1,), prop2_holds)


def corollary_points(max_n: int) -> list:
    return [p for p in prop2_points(max_n)
            if p.pop.n_green >= 2 and green_links(p.pop, p.params)]


def prop3_points(max_n: int) -> list:
    return _points(max_n, (1, 2), lambda k: (1,), prop3_holds)


def prop4_points(max_n: int) -> list:
    return _points(max_n, (1, 2, 3), lambda k: tuple(F(i, k) for i in range(1, k + 1)), prop4_holds)


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------


def _run_prop1(point: Point) -> PointResult:
    res = PointResult(point)
    eqs = equilibria(point)
    res.equilibria = len(eqs)
    _check_facts(res, point, eqs)
    if not eqs:
        res.verdict = VACUOUS
        return res
    pop, params = point.pop, point.params
    ur0 = exogenous_utility_ratio(pop)
    for E in eqs:
        ur = utility_ratio(E, pop, params)
        if not ur > ur0:
            res.fail("UR(E) > UR(empty)", f"UR(E) = {ur}, UR(empty) = {ur0}", E)
        for i, u in enumerate(utilities(E, pop, params)):
            if u > 1 - pop.dist_of(i).p0 and pop.group_of(i) != GREEN:
                res.fail("only greens gain", f"node {i} (blue) has utility {u}", E)
    return res


def _run_prop2(point: Point) -> PointResult:
    res = PointResult(point)
    eqs = equilibria(point)
    res.equilibria = len(eqs)
    _check_facts(res, point, eqs)
    if not eqs:
        res.verdict = VACUOUS
        return res
    ur0 = exogenous_utility_ratio(point.pop)
    Q = point.Q()
    for E in eqs:
        ur = utility_ratio(E, point.pop, point.params, Q)
        if not ur < ur0:
            res.fail("UR(E_k) < UR(empty)", f"UR(E) = {ur}, UR(empty) = {ur0}", E)
    return res


def _baseline(point: Point, rho=None) -> Point:
    if rho is None:
        return point.with_params(ParamPoint(point.params.gamma, 0, 0))
    return point.with_params(ParamPoint(point.params.gamma, point.params.k, rho))


def _run_corollary(point: Point) -> PointResult:
    res = PointResult(point)
    base = _baseline(point)
    eqs_k, eqs_0 = equilibria(point), equilibria(base)
    res.equilibria = len(eqs_k) + len(eqs_0)
    _check_facts(res, point, eqs_k)
    _check_facts(res, base, eqs_0)
    if not eqs_k or not eqs_0:
        res.verdict = VACUOUS
        res.note = f"{len(eqs_k)} equilibria with recommendations, {len(eqs_0)} without"
        return res
    pop = point.pop
    ur0 = exogenous_utility_ratio(pop)
    Q = point.Q()
    for E in eqs_k:
        ur = utility_ratio(E, pop, point.params, Q)
        if not ur < ur0:
            res.fail("UR(E_k) < UR(empty)", f"UR(E_k) = {ur}, UR(empty) = {ur0}", E)
    for E in eqs_0:
        ur = utility_ratio(E, pop, base.params)
        if not ur0 < ur:
            res.fail("UR(empty) < UR(E_0)", f"UR(E_0) = {ur}, UR(empty) = {ur0}", E, base)
    return res


def _compare_welfare(res: PointResult, better: Point, worse: Point, tag: str) -> None:
    eqs_hi, eqs_lo = equilibria(better), equilibria(worse)
    res.equilibria = len(eqs_hi) + len(eqs_lo)
    _check_facts(res, better, eqs_hi)
    _check_facts(res, worse, eqs_lo)
    if not eqs_hi or not eqs_lo:
        res.verdict = VACUOUS
        res.note = f"{len(eqs_hi)} and {len(eqs_lo)} equilibria"
        return
    Qh, Ql = better.Q(), worse.Q()
    pop = better.pop
    util_hi = [(welfare_utilitarian(E, pop, better.params, Qh), E) for E in eqs_hi]
    util_lo = [(welfare_utilitarian(E, pop, worse.params, Ql), E) for E in eqs_lo]
    raw_hi = [(welfare_rawlsian(E, pop, better.params, Qh), E) for E in eqs_hi]
    raw_lo = [(welfare_rawlsian(E, pop, worse.params, Ql), E) for E in eqs_lo]
    for name, hi, lo in (("utilitarian", util_hi, util_lo), ("rawlsian", raw_hi, raw_lo)):
        worst_hi = min(hi, key=lambda t: t[0])
        best_lo = max(lo, key=lambda t: t[0])
        if not worst_hi[0] > best_lo[0]:
            res.fail(f"{name} welfare {tag}",
                     f"min over better policy {worst_hi[0]} <= max over baseline {best_lo[0]}; "
                     f"baseline network: {sorted(best_lo[1].edges)}",
                     worst_hi[1], better)


def _run_prop3(point: Point) -> PointResult:
    res = PointResult(point)
    _compare_welfare(res, point, _baseline(point), "k cross recommendations beat none")
    return res


def _run_prop4(point: Point) -> PointResult:
    res = PointResult(point)
    base = _baseline(point, rho=F(0))
    if not _feasible(base.pop, base.params):
        res.verdict = VACUOUS
        res.note = "same-group recommendations infeasible for rho' = 0"
        return res
    _compare_welfare(res, point, base, "rho beats rho' = 0")
    return res


EPSILONS = (F(1, 100), F(1, 10), F(1))


def lemma1_enumerated_points(max_n: int) -> list:
    pts = prop1_points(max_n)[::3] + prop2_points(max_n)[::3] + prop4_points(max_n)[::3]
    return pts


def _run_lemma1(point: Point) -> PointResult:
    res = PointResult(point)
    eqs = equilibria(point)
    res.equilibria = len(eqs)
    _check_facts(res, point, eqs)
    if not eqs:
        res.verdict = VACUOUS
        return res
    C = bounds.reciprocity_constant(point.params)
    Q = point.Q()
    for E in eqs:
        for eps in EPSILONS:
            audit = reciprocity_audit(E, point.pop, point.params, Q, eps)
            if audit.violator_count > C / eps:
                res.fail("violators <= C / epsilon",
                         f"{audit.violator_count} violators > {C / eps} at epsilon {eps}", E)
    return res


def constructed_points() -> list:
    """Parameter points for the constructed-equilibrium audit (any n)."""
    out = []
    for g, b, gamma, k in itertools.product(GREENS, BLUES, GAMMAS, (0, 1, 2)):
        params = ParamPoint(gamma, k, 1 if k else 0)
        try:
            Population.two_group(1, 1, g, b)
        except LinkrecError:
            continue
        if params.gamma > b.p0 * (1 - b.p0 - b.p1):
            out.append((g, b, params))
    return out


def _run_constructed(g, b, params) -> dict:
    label = f"constructed g=({g}) b=({b}) gamma={params.gamma} k={params.k} rho={params.rho}"
    try:
        pop = smallest_symmetric_population(g, b, params, require_peer=True)
        sym = construct_symmetric_equilibrium(pop, params, require_peer=True)
    except LinkrecError as exc:
        return {"point": label, "verdict": FAIL, "detail": f"construction failed: {exc}"}
    point = Point(pop, params)
    ok = is_dfpn(sym.E, pop, params, sym.Q)
    audit = reciprocity_audit(sym.E, pop, params, sym.Q, F(1, 100))
    out = {"point": label, "n": pop.n, "green_degree": sym.green_degree,
           "violators": audit.violator_count, "verdict": PASS}
    if not ok:
        out["verdict"] = FAIL
        out["detail"] = f"not an equilibrium: {ok}"
        out["instance"] = point.instance(sym.E)
    elif audit.violator_count:
        out["verdict"] = FAIL
        out["detail"] = f"violators {list(audit.violators)}"
        out["instance"] = point.instance(sym.E)
    return out


def facts_points(max_n: int) -> list:
    return (prop1_points(max_n)[::2] + prop2_points(max_n)[::2] + prop3_points(max_n)[::2]
            + prop4_points(max_n)[::2])


def _run_facts(point: Point) -> PointResult:
    res = PointResult(point)
    eqs = equilibria(point)
    res.equilibria = len(eqs)
    _check_facts(res, point, eqs)
    if not eqs:
        res.verdict = VACUOUS
    return res


# --------------------------------------------------------------------------
# Three-node example
# --------------------------------------------------------------------------


def three_node_population(eps: Fraction) -> Population:
    """Three single-member groups ``g``, ``m``, ``b`` (nodes 0, 1, 2)."""
    eps = F(eps)
    dists = (
        _dist(eps, 1 - 4 * eps, 3 * eps),
        _dist(2 * eps, 1 - 4 * eps, 2 * eps),
        _dist(3 * eps, 1 - 4 * eps, eps),
    )
    return Population((1, 1, 1), dists, ("g", "m", "b"))


def three_node_params(eps: Fraction) -> ParamPoint:
    return ParamPoint(F(3, 2) * F(eps) ** 2, 0, 0)


THREE_NODE_EPSILONS = (F(1, 100), F(1, 50), F(1, 25), F(1, 20), F(3, 50), F(2, 25))


def _exhaustive_equilibria(pop: Population, params: ParamPoint, semantics: str) -> list:
    pairs = [(0, 1), (0, 2), (1, 2)]
    out = []
    for mask in range(8):
        cand = Network(3, frozenset(p for t, p in enumerate(pairs) if mask >> t & 1))
        if is_dfpn(cand, pop, params, method=EXHAUSTIVE, semantics=semantics):
            out.append(sorted(cand.edges))
    return out


def _run_three_node(eps: Fraction) -> dict:
    """The three-node example. ``{(g, m)}`` must be rejected through an
    add-(m, b) defection. The no-equilibrium claim reasons about ``g`` seeing
    ``m``'s degree after ``m`` drops ``b``, so it is checked under the joint
    reading; the independent reading keeps ``{(m, b)}`` and is reported too.
    """
    pop, params = three_node_population(eps), three_node_params(eps)
    inst = Instance(pop, params, Q=Network.empty(3))
    out = {"point": f"three-node example epsilon={eps}", "verdict": PASS}
    E = Network(3, frozenset({(0, 1)}))
    for semantics in (OWN, JOINT):
        w = is_dfpn(E, pop, params, semantics=semantics).witness
        if w is None or w.kind != ADD or w.pair != (1, 2):
            out["verdict"] = FAIL
            out["detail"] = f"expected an add-(m, b) witness for {{(g, m)}} ({semantics}), got {w}"
            out["instance"] = format_instance(inst, E=E)
            return out
        out[f"witness_{semantics}"] = w.to_dict()
    found = enumerate_equilibria(pop, params, Network.empty(3), semantics=JOINT)
    brute = _exhaustive_equilibria(pop, params, JOINT)
    out["enumerated"] = len(found)
    out["exhaustive"] = len(brute)
    out["equilibria_own_reading"] = _exhaustive_equilibria(pop, params, OWN)
    if found or brute:
        out["verdict"] = FAIL
        out["detail"] = f"expected no equilibria, found {brute or [sorted(e.edges) for e in found]}"
        out["instance"] = format_instance(inst)
    return out


# --------------------------------------------------------------------------
# Driver
# --------------------------------------------------------------------------


POINT_SUITES = {
    "prop1": (prop1_points, _run_prop1),
    "prop2": (prop2_points, _run_prop2),
    "corollary1": (corollary_points, _run_corollary),
    "prop3": (prop3_points, _run_prop3),
    "prop4": (prop4_points, _run_prop4),
    "lemma1": (lemma1_enumerated_points, _run_lemma1),
    "facts": (facts_points, _run_facts),
}


def _summarise(suite: str, records: list, extra: Optional[list] = None) -> dict:
    verdicts = [r["verdict"] for r in records] + [r["verdict"] for r in (extra or [])]
    informative = sum(1 for v in verdicts if v != VACUOUS)
    if FAIL in verdicts:
        verdict = FAIL
    elif informative == 0:
        verdict = VACUOUS
    else:
        verdict = PASS
    report = {
        "suite": suite,
        "verdict": verdict,
        "points": records,
        "points_total": len(records),
        "non_vacuous": sum(1 for r in records if r["verdict"] != VACUOUS),
        "vacuous": sum(1 for r in records if r["verdict"] == VACUOUS),
        "failed": sum(1 for r in records if r["verdict"] == FAIL),
        "equilibria_checked": sum(r.get("equilibria", 0) for r in records),
        "facts_checked": sum(r.get("facts_checked", 0) for r in records),
        "facts_violations": sum(r.get("facts_violations", 0) for r in records),
    }
    if extra is not None:
        report["constructed"] = extra
    return report


def run_verification(suite: str, budget: Optional[int] = None, max_n: int = 8) -> dict:
    """Run one suite; ``budget`` caps the number of parameter points."""
    if suite not in SUITES:
        raise LinkrecError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if suite == "notes-examples":
        eps = THREE_NODE_EPSILONS if budget is None else THREE_NODE_EPSILONS[:max(budget, 1)]
        return _summarise(suite, [_run_three_node(e) for e in eps])
    make, run = POINT_SUITES[suite]
    points = _spread(make(max_n), budget)
    records = [run(p).to_dict() for p in points]
    extra = None
    if suite == "lemma1":
        extra = [_run_constructed(*c) for c in _spread(constructed_points(), budget)]
    return _summarise(suite, records, extra)


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
