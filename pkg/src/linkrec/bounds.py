"""Bounds that hold across all equilibria: feasible degrees per group and the
resulting utility, utility-ratio and welfare envelopes.

Two degree-set regimes are available.

``"symmetric"``
    Every member of a group shares one degree. A degree profile
    ``(d_green, d_blue)`` is feasible when, within each group, nobody wants
    to drop an organic link or add one more, and no green/blue pair both gain
    from linking across groups. This is the regime the figure sweeps use and
    it only depends on the groups' size ratio.

``"finite-n"``
    Degrees may differ between members. A fixpoint shrinks each group's
    candidate degree set using necessary conditions that hold for any
    equilibrium of the given finite population, so the result contains every
    equilibrium degree. It requires that no green would keep a link to a blue
    (``gamma > g0 * mu_B(1)``).

The closed-form large-population bounds are in
:func:`utility_envelope_asymptotic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DegenerateDenominatorError, InputError, LinkrecError
from .model import BLUE, GREEN, INFINITY, ParamPoint, Population, strictly_positive
from .recsets import plan_recommendations

SYMMETRIC = "symmetric"
FINITE = "finite-n"
MODES = (SYMMETRIC, FINITE)

OK = "ok"
EMPTY = "empty"
INAPPLICABLE = "inapplicable"


@dataclass(frozen=True)
class DegreeEnvelope:
    group: int
    feasible_degrees: frozenset
    assumptions: dict = field(default_factory=dict)
    mode: str = SYMMETRIC
    status: str = OK
    profiles: tuple = ()

    @property
    def applicable(self) -> bool:
        return self.status == OK

    @property
    def min_degree(self) -> Optional[int]:
        return min(self.feasible_degrees) if self.feasible_degrees else None

    @property
    def max_degree(self) -> Optional[int]:
        return max(self.feasible_degrees) if self.feasible_degrees else None


@dataclass(frozen=True)
class UtilityEnvelope:
    group: int
    lower: object
    upper: object
    mode: str = "finite-degree-set"
    argmin: tuple = ()
    argmax: tuple = ()

    def __post_init__(self):
        if self.lower > self.upper:
            raise LinkrecError(f"envelope lower {self.lower} exceeds upper {self.upper}")

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class RatioEnvelope:
    lower: object
    upper: object
    lower_attained_by: tuple = ()
    upper_attained_by: tuple = ()

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class WelfareEnvelope:
    utilitarian: tuple
    rawlsian: tuple
    exogenous: object
    n: int

    def utilitarian_gain_per_capita(self) -> tuple:
        """Average utility minus average exogenous utility, both endpoints."""
        lo, hi = self.utilitarian
        return ((lo - self.exogenous) / self.n, (hi - self.exogenous) / self.n)


class InapplicableError(LinkrecError):
    """The envelope's regime assumptions do not hold at this point."""


# --------------------------------------------------------------------------
# Shared helpers
# --------------------------------------------------------------------------


def _miss_pow(dist, d: int, exponent) -> object:
    """``(1 - q(d))^exponent`` with the empty power equal to 1."""
    if exponent == 0:
        return 1
    if exponent < 0:
        raise InputError("negative exponent")
    return (1 - dist.pass_prob(d)) ** int(exponent)


def cross_counts(pop: Population, params: ParamPoint) -> tuple:
    """Per-node cross-group recommendation counts ``(green, blue)``."""
    c_green = params.green_cross(pop)
    if Fraction(c_green).denominator != 1:
        raise InputError(f"green cross count {c_green} is not an integer")
    return int(c_green), params.blue_cross


def _integer_cap(params: ParamPoint) -> int:
    return params.degree_cap - params.k


def blue_lock_holds(pop: Population, params: ParamPoint) -> bool:
    """No blue keeps an organic link: ``gamma > b0 * mu_B(1)``."""
    b = pop.dist_blue
    return params.gamma > b.p0 * b.mu(1)


def cross_organic_excluded(pop: Population, params: ParamPoint) -> bool:
    """No green keeps an organic link to a blue: ``gamma > g0 * mu_B(1)``."""
    return params.gamma > pop.dist_green.p0 * pop.dist_blue.mu(1)


# --------------------------------------------------------------------------
# Symmetric profiles
# --------------------------------------------------------------------------


def _in_group_stable(dist, d: int, k: int, c: int, partner_miss, gamma) -> bool:
    """Members at common degree ``d`` neither drop a link nor add one."""
    p0 = dist.p0
    if d == k:
        return gamma >= p0 * dist.pass_prob(k + 1) * _miss_pow(dist, k, k - c) * partner_miss
    q, q_next = dist.pass_prob(d), dist.pass_prob(d + 1)
    keep = p0 * q * _miss_pow(dist, d, d - c - 1) * partner_miss
    add = p0 * q_next * _miss_pow(dist, d, d - c) * partner_miss
    return add <= gamma <= keep


def _best_cross_gain(own, partner, d_own: int, d_partner: int, k: int, c: int, gamma):
    """Largest gain for a member of ``own`` at ``d_own`` from an organic link
    to a member of ``partner`` at ``d_partner``, dropping any number of its
    own organic links."""
    p0 = own.p0
    cross_miss = _miss_pow(partner, d_partner, c)
    full = _miss_pow(own, d_own, d_own - c) * cross_miss
    new_factor = 1 - partner.pass_prob(d_partner + 1)
    best = None
    for m in range(d_own - k + 1):
        after = _miss_pow(own, d_own, d_own - c - m) * cross_miss
        gain = p0 * (full - new_factor * after) - gamma + gamma * m
        if best is None or gain > best:
            best = gain
    return best


def profile_utility(pop: Population, params: ParamPoint, group: int, d_green: int, d_blue: int):
    """Utility of a ``group`` member when greens sit at ``d_green`` and blues at
    ``d_blue``, with all organic links inside the group."""
    c_green, c_blue = cross_counts(pop, params)
    g, b = pop.dist_green, pop.dist_blue
    if group == GREEN:
        miss = _miss_pow(g, d_green, d_green - c_green) * _miss_pow(b, d_blue, c_green)
        return 1 - g.p0 * miss - params.gamma * (d_green - params.k)
    miss = _miss_pow(b, d_blue, d_blue - c_blue) * _miss_pow(g, d_green, c_blue)
    return 1 - b.p0 * miss - params.gamma * (d_blue - params.k)


@dataclass(frozen=True)
class ProfileSet:
    profiles: tuple
    assumptions: dict


def feasible_profiles(pop: Population, params: ParamPoint) -> ProfileSet:
    """All jointly stable group-symmetric degree profiles."""
    k, gamma = params.k, params.gamma
    c_green, c_blue = cross_counts(pop, params)
    g, b = pop.dist_green, pop.dist_blue
    if not g.mu(INFINITY) > 0 or not b.mu(INFINITY) > 0:
        raise InputError("both groups need a positive expected surplus")
    top = params.degree_cap
    green_range = [d for d in range(k, top + 1) if d >= c_green]
    blue_range = [d for d in range(k, top + 1) if d >= c_blue]
    out = []
    for d_g in green_range:
        for d_b in blue_range:
            if not _in_group_stable(g, d_g, k, c_green, _miss_pow(b, d_b, c_green), gamma):
                continue
            if not _in_group_stable(b, d_b, k, c_blue, _miss_pow(g, d_g, c_blue), gamma):
                continue
            green_gain = _best_cross_gain(g, b, d_g, d_b, k, c_green, gamma)
            blue_gain = _best_cross_gain(b, g, d_b, d_g, k, c_blue, gamma)
            if strictly_positive(green_gain) and strictly_positive(blue_gain):
                continue
            out.append((d_g, d_b))
    assumptions = {
        "blue_locked": bool(blue_lock_holds(pop, params)),
        "cross_organic_excluded": bool(cross_organic_excluded(pop, params)),
        "profile_exists": bool(out),
    }
    return ProfileSet(tuple(out), assumptions)


# --------------------------------------------------------------------------
# Finite-population degree sets
# --------------------------------------------------------------------------


def _finite_assumptions(pop: Population, params: ParamPoint) -> dict:
    out = {
        "all_p0_positive": all(d.p0 > 0 for d in pop.dists),
        "cross_organic_excluded": bool(cross_organic_excluded(pop, params)),
    }
    try:
        plan_recommendations(pop, params)
        out["recommendations_feasible"] = True
    except LinkrecError:
        out["recommendations_feasible"] = False
    return out


def finite_degree_sets(pop: Population, params: ParamPoint) -> tuple:
    """``(F_green, F_blue, assumptions)`` containing every equilibrium degree.

    Raises :class:`InapplicableError` when an assumption fails.
    """
    assumptions = _finite_assumptions(pop, params)
    if not all(assumptions.values()):
        failed = [k for k, v in assumptions.items() if not v]
        raise InapplicableError(f"finite-n envelope assumptions fail: {failed}")
    k, gamma = params.k, params.gamma
    c_green, c_blue = cross_counts(pop, params)
    dists = {GREEN: pop.dist_green, BLUE: pop.dist_blue}
    sizes = {GREEN: pop.n_green, BLUE: pop.n_blue}
    cross = {GREEN: c_green, BLUE: c_blue}
    base_cap = _integer_cap(params)
    F = {}
    for X in (GREEN, BLUE):
        room = sizes[X] - 1 - (k - cross[X])
        F[X] = set(range(k, k + min(base_cap, room) + 1))

    def q(X, d):
        return dists[X].pass_prob(d)

    def neighbour_qs(X):
        # anyone who is a neighbour has degree at least 1
        return [q(X, e) for e in sorted(F[X]) if e >= 1] or [0]

    def miss_low(X, d):
        """Smallest possible miss product for a degree-d member of X."""
        Y = 1 - X
        c = cross[X]
        in_part = (1 - max(neighbour_qs(X))) ** (d - c) if d - c else 1
        cross_part = (1 - max(neighbour_qs(Y))) ** c if c else 1
        return in_part * cross_part

    changed = True
    while changed:
        changed = False
        for X in (GREEN, BLUE):
            Y = 1 - X
            if not F[X] or (cross[X] and not F[Y]):
                if F[X]:
                    F[X] = set()
                    changed = True
                continue
            p0 = dists[X].p0
            c = cross[X]
            q_in = neighbour_qs(X)
            min_in = min(q_in)
            rec_factor = (1 - min_in) ** (k - c) if k - c else 1
            if c:
                rec_factor *= (1 - min(neighbour_qs(Y))) ** c
            keep = set()
            for d in sorted(F[X]):
                m = d - k
                if m and not any(gamma <= p0 * qs * (1 - qs) ** (m - 1) * rec_factor for qs in q_in):
                    continue
                if d - c < sizes[X] - 1:
                    partners = [e for e in F[X] if e - c < sizes[X] - 1]
                    if not partners:
                        continue
                    ok = any(
                        p0 * q(X, e + 1) * miss_low(X, d) <= gamma
                        or p0 * q(X, d + 1) * miss_low(X, e) <= gamma
                        for e in partners
                    )
                    if not ok:
                        continue
                keep.add(d)
            if keep != F[X]:
                F[X] = keep
                changed = True
    return frozenset(F[GREEN]), frozenset(F[BLUE]), assumptions


def _finite_node_bounds(pop: Population, params: ParamPoint, F: dict, X: int, d: int) -> tuple:
    """Utility range of a group-X member with degree ``d`` when all degrees
    lie in ``F``."""
    Y = 1 - X
    c_green, c_blue = cross_counts(pop, params)
    c = c_green if X == GREEN else c_blue
    dist = pop.dist_green if X == GREEN else pop.dist_blue
    other = pop.dist_blue if X == GREEN else pop.dist_green
    q_in = [dist.pass_prob(e) for e in F[X] if e >= 1] or [0]
    q_cross = [other.pass_prob(e) for e in F[Y] if e >= 1] or [0]
    hi_miss = ((1 - min(q_in)) ** (d - c) if d - c else 1) * ((1 - min(q_cross)) ** c if c else 1)
    lo_miss = ((1 - max(q_in)) ** (d - c) if d - c else 1) * ((1 - max(q_cross)) ** c if c else 1)
    cost = params.gamma * (d - params.k)
    return 1 - dist.p0 * hi_miss - cost, 1 - dist.p0 * lo_miss - cost


# --------------------------------------------------------------------------
# Public envelope API
# --------------------------------------------------------------------------


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise InputError(f"unknown envelope mode {mode!r}; choose from {MODES}")


def degree_envelopes(pop: Population, params: ParamPoint, mode: str = SYMMETRIC) -> tuple:
    """Green and blue :class:`DegreeEnvelope` for one parameter point."""
    _check_mode(mode)
    if pop.n_groups != 2:
        raise InputError("degree envelopes need exactly two groups")
    if mode == SYMMETRIC:
        ps = feasible_profiles(pop, params)
        status = OK if ps.profiles else INAPPLICABLE
        out = []
        for X in (GREEN, BLUE):
            degs = frozenset(p[X] for p in ps.profiles)
            out.append(DegreeEnvelope(X, degs, dict(ps.assumptions), SYMMETRIC, status, ps.profiles))
        return tuple(out)
    try:
        F_g, F_b, assumptions = finite_degree_sets(pop, params)
    except InapplicableError:
        assumptions = _finite_assumptions(pop, params)
        return tuple(DegreeEnvelope(X, frozenset(), assumptions, FINITE, INAPPLICABLE)
                     for X in (GREEN, BLUE))
    status = OK if F_g and F_b else EMPTY
    return (DegreeEnvelope(GREEN, F_g, assumptions, FINITE, status),
            DegreeEnvelope(BLUE, F_b, assumptions, FINITE, status))


def feasible_degree_set(group: int, pop: Population, params: ParamPoint,
                        mode: str = SYMMETRIC) -> DegreeEnvelope:
    """Degrees members of ``group`` can hold in equilibrium."""
    return degree_envelopes(pop, params, mode)[group]


def utility_envelope_finite(group: int, envelopes: tuple, pop: Population,
                            params: ParamPoint) -> UtilityEnvelope:
    """Range of the group-mean utility over the feasible degrees."""
    green_env, blue_env = envelopes
    if not (green_env.applicable and blue_env.applicable):
        raise InapplicableError("degree envelopes are not applicable")
    if green_env.mode == SYMMETRIC:
        values = [(profile_utility(pop, params, group, dg, db), (dg, db))
                  for dg, db in green_env.profiles]
        lo = min(values, key=lambda t: t[0])
        hi = max(values, key=lambda t: t[0])
        return UtilityEnvelope(group, lo[0], hi[0], "finite-degree-set", lo[1], hi[1])
    F = {GREEN: green_env.feasible_degrees, BLUE: blue_env.feasible_degrees}
    rows = [(_finite_node_bounds(pop, params, F, group, d), d) for d in sorted(F[group])]
    lo = min(rows, key=lambda t: t[0][0])
    hi = max(rows, key=lambda t: t[0][1])
    return UtilityEnvelope(group, lo[0][0], hi[0][1], "finite-degree-set", (lo[1],), (hi[1],))


def utility_envelopes(pop: Population, params: ParamPoint, mode: str = SYMMETRIC) -> tuple:
    envs = degree_envelopes(pop, params, mode)
    return tuple(utility_envelope_finite(X, envs, pop, params) for X in (GREEN, BLUE))


def ur_envelope(pop: Population, params: ParamPoint, mode: str = SYMMETRIC) -> RatioEnvelope:
    """Smallest green utility over largest blue utility, and vice versa."""
    green, blue = utility_envelopes(pop, params, mode)
    if not strictly_positive(blue.lower):
        raise DegenerateDenominatorError(f"blue utility lower bound {blue.lower} is not positive")
    return RatioEnvelope(green.lower / blue.upper, green.upper / blue.lower,
                         (green.argmin, blue.argmax), (green.argmax, blue.argmin))


def welfare_envelope(pop: Population, params: ParamPoint, mode: str = SYMMETRIC) -> WelfareEnvelope:
    """Utilitarian (total) and Rawlsian (minimum) welfare ranges."""
    green, blue = utility_envelopes(pop, params, mode)
    ng, nb = pop.n_green, pop.n_blue
    util = (ng * green.lower + nb * blue.lower, ng * green.upper + nb * blue.upper)
    rawls = (min(green.lower, blue.lower), min(green.upper, blue.upper))
    exo = ng * (1 - pop.dist_green.p0) + nb * (1 - pop.dist_blue.p0)
    return WelfareEnvelope(util, rawls, exo, pop.n)


# --------------------------------------------------------------------------
# Closed forms
# --------------------------------------------------------------------------


def utility_envelope_asymptotic(group: int, pop: Population, params: ParamPoint) -> UtilityEnvelope:
    """Large-population utility bounds with the slack term set to zero."""
    g = pop.dist_green
    mu_g = float(g.mu(INFINITY))
    if mu_g == 0:
        raise DegenerateDenominatorError("green expected surplus is zero")
    g0 = float(g.p0)
    gamma = float(params.gamma)
    base = g0 * math.exp(-mu_g)
    if group == GREEN:
        lower = 1 - g0 * (1 + mu_g) * math.exp(-mu_g)
        return UtilityEnvelope(GREEN, lower, lower + gamma * (params.k + 1), "asymptotic-closed-form")
    b0 = float(pop.dist_blue.p0)
    exponent = params.rho * params.k
    if exponent == 0:
        return UtilityEnvelope(BLUE, 1 - b0, 1 - b0, "asymptotic-closed-form")
    den_lo = base + gamma / mu_g
    den_hi = base - gamma / mu_g
    if den_hi <= 0:
        raise DegenerateDenominatorError(
            "g0 exp(-mu_G) - gamma / mu_G must be positive for the blue upper bound")
    lower = 1 - b0 * (1 - gamma / den_lo) ** float(exponent)
    upper = 1 - b0 * (1 - gamma / den_hi) ** float(exponent)
    return UtilityEnvelope(BLUE, min(lower, upper), max(lower, upper), "asymptotic-closed-form")


def reciprocity_constant(params: ParamPoint):
    """``2 (1/gamma + k)^2 (1/gamma + k + 1)^2``."""
    g = params.gamma
    inv = 1 / g if isinstance(g, float) else Fraction(1) / g
    a = inv + params.k
    return 2 * a ** 2 * (a + 1) ** 2


def cross_recommendation_blue_threshold(pop: Population, params: ParamPoint):
    """Blue no-opportunity probability above which ``k`` all-cross
    recommendations pull the utility ratio below its exogenous value."""
    g = pop.dist_green
    gamma = params.gamma
    cap = math.floor(1 / gamma) if isinstance(gamma, float) else math.floor(Fraction(1) / gamma)
    inner = (1 - gamma * g.mu(cap)) ** params.k
    den = 1 - (1 - g.p0) * inner
    if not strictly_positive(den):
        raise DegenerateDenominatorError("threshold denominator is not positive")
    return g.p0 / den


__all__ = [
    "DegreeEnvelope",
    "FINITE",
    "InapplicableError",
    "ProfileSet",
    "RatioEnvelope",
    "SYMMETRIC",
    "UtilityEnvelope",
    "WelfareEnvelope",
    "blue_lock_holds",
    "cross_counts",
    "cross_organic_excluded",
    "cross_recommendation_blue_threshold",
    "degree_envelopes",
    "feasible_degree_set",
    "feasible_profiles",
    "finite_degree_sets",
    "profile_utility",
    "reciprocity_constant",
    "ur_envelope",
    "utility_envelope_asymptotic",
    "utility_envelope_finite",
    "utility_envelopes",
    "welfare_envelope",
]
