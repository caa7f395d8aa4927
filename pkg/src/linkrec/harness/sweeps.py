"""Figure sweeps written as CSV.

fig1/fig2 sweep the exogenous utility ratio for each ``g0`` (``b0`` is solved
from the ratio) and report utility-ratio bounds. fig3 sweeps ``k`` and fig4
sweeps ``rho``, both with ``b0`` chosen so the exogenous ratio is 2, and
report per-capita welfare gained over the empty network.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .. import bounds
from ..errors import LinkrecError
from ..model import BLUE, GREEN, OpportunityDistribution, ParamPoint, Population
from .config import SweepSpec

log = logging.getLogger(__name__)

COLUMNS = ("figure", "g0", "b0", "gamma", "k", "rho", "ur_exo", "metric_lower", "metric_upper", "status")


@dataclass(frozen=True)
class Row:
    figure: int
    g0: float
    b0: float
    gamma: float
    k: int
    rho: float
    ur_exo: Optional[float]
    lower: Optional[float]
    upper: Optional[float]
    status: str
    reason: str = ""

    def sort_key(self) -> tuple:
        ur = self.ur_exo if self.ur_exo is not None else math.inf
        return (self.figure, self.g0, self.k, self.rho, ur)

    def cells(self) -> list:
        def f(x):
            return "" if x is None else format(x, ".12g")
        return [str(self.figure), f(self.g0), f(self.b0), f(self.gamma), str(self.k), f(self.rho),
                f(self.ur_exo), f(self.lower), f(self.upper), self.status]


def _population(g0: float, b0: float, support: int) -> Population:
    return Population.two_group(1, 1, OpportunityDistribution.two_point(g0, support),
                                OpportunityDistribution.two_point(b0, support))


def _metric(spec: SweepSpec, pop: Population, params: ParamPoint) -> tuple:
    if spec.figure in (1, 2):
        if spec.mode == "asymptotic":
            green = bounds.utility_envelope_asymptotic(GREEN, pop, params)
            blue = bounds.utility_envelope_asymptotic(BLUE, pop, params)
            if blue.lower <= 0:
                raise bounds.DegenerateDenominatorError("blue lower bound is not positive")
            return green.lower / blue.upper, green.upper / blue.lower
        env = bounds.ur_envelope(pop, params)
        return env.lower, env.upper
    if spec.mode == "asymptotic":
        green = bounds.utility_envelope_asymptotic(GREEN, pop, params)
        blue = bounds.utility_envelope_asymptotic(BLUE, pop, params)
        exo = ((1 - float(pop.dist_green.p0)) + (1 - float(pop.dist_blue.p0))) / 2
        if spec.metric == "rawlsian":
            return min(green.lower, blue.lower), min(green.upper, blue.upper)
        return (green.lower + blue.lower) / 2 - exo, (green.upper + blue.upper) / 2 - exo
    w = bounds.welfare_envelope(pop, params)
    if spec.metric == "rawlsian":
        return w.rawlsian
    return w.utilitarian_gain_per_capita()


def _point(args) -> Row:
    spec, g0, b0, k, rho, ur = args
    g0f, b0f = float(g0), float(b0)
    gamma = float(spec.gamma)
    ur_f = None if ur is None else float(ur)
    try:
        params = ParamPoint(gamma, k, rho)
        pop = _population(g0f, b0f, spec.support)
        lo, hi = _metric(spec, pop, params)
        return Row(spec.figure, g0f, b0f, gamma, k, float(rho), ur_f, float(lo), float(hi), "ok")
    except bounds.InapplicableError as exc:
        reason = str(exc)
    except LinkrecError as exc:
        reason = str(exc)
    log.info("fig%d g0=%s b0=%s k=%s rho=%s inapplicable: %s", spec.figure, g0, b0, k, rho, reason)
    return Row(spec.figure, g0f, b0f, gamma, k, float(rho), ur_f, None, None, "inapplicable", reason)


def grid_points(spec: SweepSpec) -> list:
    """Every ``(spec, g0, b0, k, rho, ur_exo)`` the sweep evaluates."""
    out = []
    for g0 in spec.g0:
        g0 = Fraction(g0)
        if spec.figure in (1, 2):
            for ur in spec.ur_grid():
                b0 = 1 - (1 - g0) / ur
                out.append((spec, g0, b0, spec.k, spec.rho, ur))
        elif spec.figure == 3:
            b0 = 1 - (1 - g0) / 2
            for k in range(spec.k_max + 1):
                out.append((spec, g0, b0, k, spec.rho if k else Fraction(0), Fraction(2)))
        else:
            b0 = 1 - (1 - g0) / 2
            for rho in spec.rho_grid:
                out.append((spec, g0, b0, spec.k, Fraction(rho), Fraction(2)))
    return out


def run_figure_sweep(spec: SweepSpec, workers: int = 1) -> list:
    """Rows for every grid point, sorted deterministically."""
    points = grid_points(spec)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_point, points, chunksize=16))
    else:
        rows = [_point(p) for p in points]
    return sorted(rows, key=Row.sort_key)


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def read_csv(text: str) -> list:
    return list(csv.DictReader(io.StringIO(text)))


def sustained_crossing(rows: list, g0: float) -> Optional[float]:
    """Smallest exogenous ratio from which the lower bound stays strictly
    above the break-even line for the rest of the grid."""
    line = [r for r in rows if r.g0 == g0 and r.status == "ok"]
    line.sort(key=lambda r: r.ur_exo)
    start = None
    for r in line:
        if r.lower > r.ur_exo:
            if start is None:
                start = r.ur_exo
        else:
            start = None
    return start
