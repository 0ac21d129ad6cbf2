"""Command-line front end.

Commands: scenario <id>, sweep <id>, measure, bound <theorem-id>, selftest.
Exit codes: 0 success, 1 check/suite failure, 2 unknown target or bad input.
Output is deterministic for a fixed (config, seed); the default seed is 0,
overridable by the RTL_SEED environment variable and the --seed flag.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import jsonio
from .qcore import nats_to_bits
from .resources import ResourceMeasure
from .scenarios import SCENARIOS, SWEEPABLE, run_scenario
from .selftest import run_all
from . import bounds as _bounds


def _default_seed() -> int:
    try:
        return int(os.environ.get("RTL_SEED", "0"))
    except ValueError:
        return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sweep_csv(rows) -> str:
    lines = ["epsilon,bound,flag"]
    for e, v, fl in rows:
        bound = "divergent" if v is None else jsonio.csv_float(v)
        lines.append(f"{jsonio.csv_float(e)},{bound},{fl}")
    return "\n".join(lines) + "\n"


def _grid(args) -> np.ndarray | None:
    if args.eps_from is None and args.eps_to is None:
        return None
    if args.eps_from is None or args.eps_to is None:
        raise ValueError("--eps-from and --eps-to must be given together")
    if not args.eps_from < args.eps_to:
        raise ValueError("--eps-from must be smaller than --eps-to")
    if args.eps_from <= 0.0:
        raise ValueError("epsilon grid must start above zero; the bounds "
                         "diverge at zero error")
    if args.points < 2:
        raise ValueError("--points must be at least 2")
    if args.spacing == "log":
        return np.geomspace(args.eps_from, args.eps_to, args.points)
    return np.linspace(args.eps_from, args.eps_to, args.points)


def _scenario_kwargs(args) -> dict:
    import inspect
    fn = SCENARIOS[args.id]
    sig = inspect.signature(fn)
    mapping = {"hbar_omega": args.hbar_omega, "eps": args.eps,
               "beta": args.beta, "e_j": args.e_j, "e_jp": args.e_jp,
               "e1": args.e1, "e2": args.e2, "n": args.n, "seed": args.seed}
    return {k: v for k, v in mapping.items()
            if v is not None and k in sig.parameters}


def cmd_scenario(args) -> int:
    if args.id not in SCENARIOS:
        sys.stderr.write(f"unknown scenario {args.id!r}; known: "
                         f"{', '.join(sorted(SCENARIOS))}\n")
        return 2
    try:
        grid = _grid(args)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    rep = run_scenario(args.id, eps_grid=grid, **_scenario_kwargs(args))
    if args.format == "csv":
        if rep.sweep is None:
            sys.stderr.write("csv output requires a sweep; pass --eps-from/"
                             "--eps-to on a sweepable scenario\n")
            return 2
        _emit(_sweep_csv(rep.sweep), args.out)
    else:
        _emit(jsonio.dumps(rep.to_dict(), indent=2), args.out)
    return 0 if rep.all_pass else 1


def cmd_sweep(args) -> int:
    if args.id not in SCENARIOS:
        sys.stderr.write(f"unknown scenario {args.id!r}\n")
        return 2
    if args.id not in SWEEPABLE:
        sys.stderr.write(f"scenario {args.id!r} has no error parameter to "
                         "sweep\n")
        return 2
    if args.eps_from is None:
        args.eps_from, args.eps_to = 1e-3, 1e-1
    try:
        grid = _grid(args)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    rep = run_scenario(args.id, eps_grid=grid, **_scenario_kwargs(args))
    if args.format == "csv":
        _emit(_sweep_csv(rep.sweep), args.out)
    else:
        rows = [{"epsilon": e, "bound": "divergent" if v is None else v,
                 "flag": fl} for e, v, fl in rep.sweep]
        _emit(jsonio.dumps({"scenario": args.id, "sweep": rows}, indent=2),
              args.out)
    return 0 if rep.all_pass else 1


def cmd_measure(args) -> int:
    try:
        with open(args.state) as fh:
            import json
            rho = jsonio.state_from_json(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"cannot parse state file: {exc}\n")
        return 2
    try:
        if args.kind in ("energy", "athermality", "qfi"):
            if args.hamiltonian is None:
                sys.stderr.write(f"{args.kind} requires --hamiltonian\n")
                return 2
            with open(args.hamiltonian) as fh:
                import json
                h = jsonio.observable_from_json(json.load(fh))
            if args.kind == "energy":
                m = ResourceMeasure.energy(h)
            elif args.kind == "qfi":
                m = ResourceMeasure.qfi(h)
            else:
                m = ResourceMeasure.athermality(h, args.beta or 1.0)
        elif args.kind == "coherence":
            m = ResourceMeasure.coherence(rho.space)
        elif args.kind == "magic":
            n = int(round(math.log2(rho.dim)))
            if 2 ** n != rho.dim:
                sys.stderr.write("magic requires a qubit-register state\n")
                return 2
            m = ResourceMeasure.magic(n)
        else:
            sys.stderr.write(f"unknown measure kind {args.kind!r}\n")
            return 2
        value = m.value(rho)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"measure evaluation failed: {exc}\n")
        return 2
    out = {"kind": args.kind, "value": value, "unit":
           "bits" if args.kind == "magic" else "nats",
           "descriptor": m.descriptor()}
    if args.kind != "magic":
        out["value_bits"] = nats_to_bits(value)
    _emit(jsonio.dumps(out, indent=2), args.out)
    return 0


_BOUND_IDS = ("general", "simplified", "povm", "conversion",
              "energy-irreversibility", "energy-error", "athermality",
              "work", "way")


def cmd_bound(args) -> int:
    tid = args.theorem
    if tid not in _BOUND_IDS:
        sys.stderr.write(f"unknown theorem id {tid!r}; known: "
                         f"{', '.join(_BOUND_IDS)}\n")
        return 2

    def need(name):
        v = getattr(args, name.replace("-", "_"))
        if v is None:
            raise ValueError(f"--{name} is required for {tid}")
        return v

    try:
        if tid == "general":
            a = need("a")
            rep = _bounds.general_tradeoff(
                need("gap"), need("k"), a, need("b"), need("error"),
                args.c_max or 0.0,
                a_prime=args.a_prime if math.isinf(a) else None)
        elif tid == "simplified":
            rep = _bounds.simplified_tradeoff(need("gap"), need("k"),
                                              need("error"),
                                              args.c_max or 0.0)
        elif tid == "povm":
            rep = _bounds.povm_tradeoff(need("gap"), need("k"),
                                        need("p_fail"), args.c_max or 0.0)
        elif tid == "conversion":
            rep = _bounds.conversion_tradeoff(need("gap"), need("k"),
                                              need("error"),
                                              args.c_max or 0.0)
        elif tid == "energy-irreversibility":
            rep = _bounds.energy_irrev_bound(need("c"), need("spread_h"),
                                             need("spread_hp"), need("error"))
        elif tid == "energy-error":
            rep = _bounds.energy_error_bound(need("c"), need("spread_h"),
                                             need("spread_hp"), need("error"))
        elif tid == "athermality":
            rep = _bounds.athermality_bound(need("gap"), need("k"),
                                            need("beta"), need("error"))
        elif tid == "work":
            rep = _bounds.work_bound(need("gap"), need("k"), need("beta"),
                                     need("error"))
        else:
            rep = _bounds.way_bound(need("m_em"), args.power or 0.0,
                                    need("k"), need("error"),
                                    args.c_max or 0.0)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    _emit(jsonio.dumps(rep.to_dict(), indent=2), args.out)
    return 0


def cmd_selftest(args) -> int:
    results = run_all(seed=args.seed, budget=args.budget,
                      force_failure=args.force_failure)
    lines = []
    ok = True
    for r in results:
        status = "pass" if r.passed else "FAIL"
        ok = ok and r.passed
        lines.append(f"{status}  {r.name}: {r.instances} instances, "
                     f"{r.failures} failures, worst margin "
                     f"{jsonio.csv_float(r.worst_margin)}")
    lines.append("all suites passed" if ok else "selftest FAILED")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def _add_common(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_scenario_params(p):
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--hbar-omega", type=float, default=None)
    p.add_argument("--e1", type=float, default=None)
    p.add_argument("--e2", type=float, default=None)
    p.add_argument("--e-j", type=float, default=None)
    p.add_argument("--e-jp", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eps-from", type=float, default=None)
    p.add_argument("--eps-to", type=float, default=None)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rtl",
        description="Irreversibility and resource-cost trade-off toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("scenario", help="run a worked scenario")
    ps.add_argument("id")
    _add_common(ps)
    _add_scenario_params(ps)
    ps.set_defaults(fn=cmd_scenario)

    pw = sub.add_parser("sweep", help="sweep a scenario's bound over epsilon")
    pw.add_argument("id")
    _add_common(pw)
    _add_scenario_params(pw)
    pw.set_defaults(fn=cmd_sweep)

    pm = sub.add_parser("measure", help="evaluate a resource measure")
    pm.add_argument("--state", required=True, help="state JSON file")
    pm.add_argument("--kind", required=True,
                    help="energy|athermality|coherence|qfi|magic")
    pm.add_argument("--hamiltonian", default=None,
                    help="observable JSON file")
    pm.add_argument("--beta", type=float, default=None)
    _add_common(pm)
    pm.set_defaults(fn=cmd_measure)

    pb = sub.add_parser("bound", help="evaluate a closed-form bound")
    pb.add_argument("theorem")
    for flag in ("--gap", "--k", "--a", "--b", "--error", "--c-max",
                 "--a-prime", "--p-fail", "--c", "--spread-h", "--spread-hp",
                 "--beta", "--m-em", "--power"):
        pb.add_argument(flag, type=float, default=None)
    _add_common(pb)
    pb.set_defaults(fn=cmd_bound)

    pt = sub.add_parser("selftest", help="run the invariant suites")
    pt.add_argument("--budget", type=float, default=1.0,
                    help="instance-count scale factor")
    pt.add_argument("--force-failure", action="store_true",
                    help="include the always-failing fixture suite")
    _add_common(pt)
    pt.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = _default_seed()
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
