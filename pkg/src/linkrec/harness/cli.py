"""Command-line entry point.

Exit codes: 0 success or pass, 1 verification failure (including "not an
equilibrium"), 2 input error, 3 inapplicable or vacuous.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .. import bounds
from ..equilibrium import (
    SEMANTICS,
    OWN,
    construct_symmetric_equilibrium,
    enumerate_equilibria,
    is_dfpn,
)
from ..errors import ConsistencyError, DegenerateDenominatorError, InputError, LinkrecError, ResourceError
from ..model import exogenous_utility_ratio
from .config import resolve_spec
from .io import format_instance, read_instance
from .sweeps import rows_to_csv, run_figure_sweep
from .verify import FAIL, SUITES, VACUOUS, report_json, run_verification

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INAPPLICABLE = 0, 1, 2, 3


def _out(text: str, path=None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_eq(args) -> int:
    inst = read_instance(args.file)
    Q = inst.recommendations()
    if args.action == "check":
        if inst.E is None:
            raise InputError("instance has no 'edges E' section to check")
        verdict = is_dfpn(inst.E, inst.pop, inst.params, Q, semantics=args.semantics)
        print(verdict)
        return EXIT_OK if verdict else EXIT_FAIL
    if args.action == "enumerate":
        found = enumerate_equilibria(inst.pop, inst.params, Q, max_n=args.max_n,
                                     workers=args.workers, semantics=args.semantics)
        print(f"{len(found)} equilibria")
        for E in found:
            print("edges " + " ".join(f"{i}-{j}" for i, j in E.sorted_edges()))
        return EXIT_OK
    sym = construct_symmetric_equilibrium(inst.pop, inst.params, require_peer=args.require_peer)
    print(f"# green degree {sym.green_degree}, stable degrees {list(sym.feasible_degrees)}")
    _out(format_instance(inst, E=sym.E, Q=sym.Q))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    inst = read_instance(args.file)
    pop, params = inst.pop, inst.params
    if args.what == "degrees":
        envs = bounds.degree_envelopes(pop, params, args.mode)
        for env in envs:
            degs = " ".join(str(d) for d in sorted(env.feasible_degrees))
            print(f"{pop.labels[env.group]} {env.status}: {degs}")
        return EXIT_OK if all(e.applicable for e in envs) else EXIT_INAPPLICABLE
    if args.what == "utility":
        for env in bounds.utility_envelopes(pop, params, args.mode):
            print(f"{pop.labels[env.group]} [{env.lower}, {env.upper}]")
        return EXIT_OK
    if args.what == "ur":
        env = bounds.ur_envelope(pop, params, args.mode)
        print(f"UR [{env.lower}, {env.upper}]  exogenous {exogenous_utility_ratio(pop)}")
        return EXIT_OK
    w = bounds.welfare_envelope(pop, params, args.mode)
    print(f"utilitarian [{w.utilitarian[0]}, {w.utilitarian[1]}]")
    print(f"rawlsian [{w.rawlsian[0]}, {w.rawlsian[1]}]")
    print(f"exogenous {w.exogenous}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    figure = int(args.figure.removeprefix("fig"))
    overrides = {"mode": args.mode, "metric": args.metric, "gamma": args.gamma}
    if args.g0:
        overrides["g0"] = args.g0.split(",")
    spec = resolve_spec(figure, args.config, overrides)
    rows = run_figure_sweep(spec, workers=args.workers)
    _out(rows_to_csv(rows), args.out)
    if args.plot:
        from .plots import plot_rows
        plot_rows(rows, figure, args.plot)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = run_verification(args.suite, budget=args.budget, max_n=args.max_n)
    _out(report_json(report), args.out)
    if args.out:
        print(f"{args.suite}: {report['verdict']} ({report['non_vacuous']} informative points, "
              f"{report['failed']} failed)")
    if report["verdict"] == FAIL:
        return EXIT_FAIL
    if report["verdict"] == VACUOUS:
        return EXIT_INAPPLICABLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linkrec", description="Network formation with link recommendations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log inapplicable points")
    sub = p.add_subparsers(dest="command", required=True)

    eq = sub.add_parser("eq", help="check, enumerate or construct equilibria")
    eq.add_argument("action", choices=("check", "enumerate", "construct"))
    eq.add_argument("file")
    eq.add_argument("--max-n", type=int, default=8)
    eq.add_argument("--workers", type=int, default=1)
    eq.add_argument("--semantics", choices=SEMANTICS, default=OWN)
    eq.add_argument("--require-peer", action="store_true")
    eq.set_defaults(func=_cmd_eq)

    bd = sub.add_parser("bounds", help="equilibrium envelopes")
    bd.add_argument("what", choices=("degrees", "utility", "ur", "welfare"))
    bd.add_argument("file")
    bd.add_argument("--mode", choices=bounds.MODES, default=bounds.SYMMETRIC)
    bd.set_defaults(func=_cmd_bounds)

    sw = sub.add_parser("sweep", help="figure sweeps as CSV")
    sw.add_argument("figure", choices=("fig1", "fig2", "fig3", "fig4"))
    sw.add_argument("--config")
    sw.add_argument("--out", help="CSV path (default stdout)")
    sw.add_argument("--plot", metavar="SVG", help="also write an SVG chart")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--mode", choices=("symmetric", "asymptotic"))
    sw.add_argument("--metric", choices=("utilitarian", "rawlsian"))
    sw.add_argument("--gamma")
    sw.add_argument("--g0", help="comma-separated g0 values")
    sw.set_defaults(func=_cmd_sweep)

    vf = sub.add_parser("verify", help="small-n verification suites")
    vf.add_argument("suite", choices=SUITES)
    vf.add_argument("--budget", type=int, help="maximum parameter points")
    vf.add_argument("--max-n", type=int, default=8)
    vf.add_argument("--out", help="JSON report path (default stdout)")
    vf.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (bounds.InapplicableError, DegenerateDenominatorError, ConsistencyError) as exc:
        print(f"inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (InputError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LinkrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
