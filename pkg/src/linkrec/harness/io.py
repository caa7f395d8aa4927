"""Plain-text instance files.

Example::

    # two greens, two blues, no recommendations
    group green 2 1/2 0 1/2
    group blue 2 24/25 0 1/25
    gamma 1/25
    k 0
    rho 0
    edges E
    0 1
    edges Q

Groups are listed most privileged first and their members are numbered in
that order. Numbers may be written as fractions or decimals; both are read
exactly. ``edges E`` and ``edges Q`` start edge lists with one ``u v`` pair
per line (0-indexed). Without an ``edges Q`` section the canonical
recommendation set is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from ..errors import InputError
from ..model import Network, OpportunityDistribution, ParamPoint, Population, parse_number
from ..recsets import construct_recommendations


@dataclass(frozen=True)
class Instance:
    pop: Population
    params: ParamPoint
    E: Optional[Network] = None
    Q: Optional[Network] = None

    def recommendations(self) -> Network:
        if self.Q is not None:
            return self.Q
        if self.params.k == 0:
            return Network.empty(self.pop.n)
        return construct_recommendations(self.pop, self.params)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_instance(text: str, strict: bool = True) -> Instance:
    groups = []
    gamma = None
    k = 0
    rho = Fraction(0)
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        try:
            if key == "group":
                if len(parts) < 4:
                    raise InputError("group needs a name, a size and probabilities")
                probs = tuple(parse_number(p) for p in parts[3:])
                groups.append((parts[1], int(parts[2]), OpportunityDistribution(probs)))
                current = None
            elif key == "gamma":
                gamma = parse_number(parts[1])
                current = None
            elif key == "k":
                k = int(parts[1])
                current = None
            elif key == "rho":
                rho = parse_number(parts[1])
                current = None
            elif key == "edges":
                if len(parts) != 2 or parts[1] not in ("E", "Q"):
                    raise InputError("expected 'edges E' or 'edges Q'")
                current = parts[1]
                sections.setdefault(current, [])
            elif current is not None and len(parts) == 2:
                sections[current].append((int(parts[0]), int(parts[1])))
            else:
                raise InputError(f"unrecognised line {raw!r}")
        except (ValueError, IndexError) as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
    if not groups:
        raise InputError("no groups defined")
    if gamma is None:
        raise InputError("gamma missing")
    labels = tuple(g[0] for g in groups)
    pop = Population(tuple(g[1] for g in groups), tuple(g[2] for g in groups), labels, strict=strict)
    params = ParamPoint(gamma, k, rho)
    if pop.n_groups == 2:
        params.check_against(pop)
    E = Network(pop.n, frozenset(sections["E"])) if "E" in sections else None
    Q = Network(pop.n, frozenset(sections["Q"])) if "Q" in sections else None
    return Instance(pop, params, E, Q)


def read_instance(path, strict: bool = True) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text, strict)


def format_instance(inst: Instance, E: Optional[Network] = None, Q: Optional[Network] = None) -> str:
    """Serialise an instance so that ``parse_instance`` restores it exactly."""
    E = E if E is not None else inst.E
    Q = Q if Q is not None else inst.Q
    lines = []
    for label, size, dist in zip(inst.pop.labels, inst.pop.sizes, inst.pop.dists):
        lines.append(f"group {label} {size} " + " ".join(_fmt(p) for p in dist.probs))
    lines.append(f"gamma {_fmt(inst.params.gamma)}")
    lines.append(f"k {inst.params.k}")
    lines.append(f"rho {_fmt(inst.params.rho)}")
    for name, net in (("E", E), ("Q", Q)):
        if net is None:
            continue
        lines.append(f"edges {name}")
        lines.extend(f"{i} {j}" for i, j in net.sorted_edges())
    return "\n".join(lines) + "\n"


def format_edges(net: Network) -> str:
    return "\n".join(f"{i} {j}" for i, j in net.sorted_edges())
