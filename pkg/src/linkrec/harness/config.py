"""Sweep configuration: built-in figure defaults, optionally overridden by a
TOML file and then by command-line flags.

A config file may contain a ``[sweep]`` table that applies to every figure
and per-figure tables ``[fig1]`` .. ``[fig4]``::

    [sweep]
    g0 = [0.25, 0.5, 0.75]

    [fig1]
    ur_max = 10
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import InputError
from ..model import parse_number

DEFAULT_G0 = ("1/4", "3/8", "1/2", "5/8", "3/4")

SWEEP_KEYS = {"g0", "gamma", "k", "rho", "k_max", "rho_grid", "ur_min", "ur_max", "ur_step",
              "mode", "metric", "support"}


@dataclass(frozen=True)
class SweepSpec:
    """Grids and fixed parameters for one figure sweep."""

    figure: int
    g0: tuple
    gamma: Fraction
    k: int = 0
    rho: Fraction = Fraction(0)
    k_max: int = 5
    rho_grid: tuple = ()
    ur_min: Fraction = Fraction(1)
    ur_max: Fraction = Fraction(20)
    ur_step: Fraction = Fraction(1, 10)
    mode: str = "symmetric"
    metric: str = "utilitarian"
    support: int = 2

    def __post_init__(self):
        if not self.g0:
            raise InputError("g0 grid is empty")
        if self.figure in (1, 2):
            if self.ur_step <= 0 or self.ur_max < self.ur_min:
                raise InputError("utility-ratio grid is empty")
        if self.figure == 4 and not self.rho_grid:
            raise InputError("rho grid is empty")
        if self.mode not in ("symmetric", "asymptotic"):
            raise InputError(f"unknown sweep mode {self.mode!r}")
        if self.metric not in ("utilitarian", "rawlsian"):
            raise InputError(f"unknown welfare metric {self.metric!r}")
        if self.support < 2:
            raise InputError("support must be at least 2")

    @property
    def x_name(self) -> str:
        return {1: "ur_exo", 2: "ur_exo", 3: "k", 4: "rho"}[self.figure]

    def ur_grid(self) -> list:
        out = []
        x = self.ur_min
        while x <= self.ur_max:
            out.append(x)
            x += self.ur_step
        return out


def figure_defaults(figure: int) -> SweepSpec:
    g0 = tuple(Fraction(x) for x in DEFAULT_G0)
    if figure == 1:
        return SweepSpec(1, g0, Fraction(1, 25), k=0)
    if figure == 2:
        return SweepSpec(2, g0, Fraction(1, 25), k=1, rho=Fraction(1))
    if figure == 3:
        return SweepSpec(3, g0, Fraction(1, 50), rho=Fraction(1), k_max=5)
    if figure == 4:
        return SweepSpec(4, g0, Fraction(1, 50), k=5,
                         rho_grid=tuple(Fraction(i, 5) for i in range(6)))
    raise InputError(f"unknown figure {figure}; choose 1-4")


def _coerce(key: str, value):
    if key in ("g0", "rho_grid"):
        if not isinstance(value, (list, tuple)):
            raise InputError(f"{key} must be a list")
        return tuple(parse_number(str(v)) if not isinstance(v, str) else parse_number(v) for v in value)
    if key in ("k", "k_max", "support"):
        if int(value) != value:
            raise InputError(f"{key} must be an integer")
        return int(value)
    if key in ("mode", "metric"):
        return str(value)
    return parse_number(str(value)) if isinstance(value, float) else parse_number(value)


def apply_overrides(spec: SweepSpec, overrides: dict) -> SweepSpec:
    clean = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in SWEEP_KEYS:
            raise InputError(f"unknown sweep setting {key!r}")
        clean[key] = _coerce(key, value)
    return replace(spec, **clean)


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"bad config {path}: {exc}") from exc


def resolve_spec(figure: int, config_path: Optional[str] = None,
                 overrides: Optional[dict] = None) -> SweepSpec:
    """Defaults, then the config file, then explicit overrides."""
    spec = figure_defaults(figure)
    if config_path:
        cfg = load_config(config_path)
        spec = apply_overrides(spec, cfg.get("sweep", {}))
        spec = apply_overrides(spec, cfg.get(f"fig{figure}", {}))
    if overrides:
        spec = apply_overrides(spec, overrides)
    return spec
