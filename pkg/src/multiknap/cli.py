"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 unreadable or malformed input
(or bad arguments), 3 a guard refused the run, 4 verification failed (an
infeasible schedule, or failed rows in a bench table).

Guard defaults can be overridden through ``MULTIKNAP_BRUTE_MAX_CELLS``,
``MULTIKNAP_DP_MAX_ENTRIES`` and ``MULTIKNAP_PTAS_MAX_WORK``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from pathlib import Path

from . import approx, exact, formats, reductions
from .core import GuardError, Instance, StructuralError, evaluate, is_feasible, step_loads
from .simplex import build_lp, solve_relaxation, to_lp_format

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_GUARD = 3
EXIT_FAILED = 4

ALGORITHMS = ("brute", "dp", "lp-bound", "round-lp", "ptas", "ptas-general")
BENCH_COLUMNS = (
    "instance",
    "algorithm",
    "epsilon",
    "status",
    "value",
    "dp_value",
    "lp_bound",
    "ratio_dp",
    "ratio_lp",
    "lp_solves",
    "dp_table_size",
    "assignments_examined",
    "error",
)


class InputError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def default_guards() -> dict:
    return {
        "brute_max_cells": _env_int("MULTIKNAP_BRUTE_MAX_CELLS", exact.BRUTE_MAX_CELLS),
        "dp_max_entries": _env_int("MULTIKNAP_DP_MAX_ENTRIES", exact.DP_MAX_ENTRIES),
        "ptas_max_work": _env_int("MULTIKNAP_PTAS_MAX_WORK", approx.PTAS_MAX_WORK),
    }


def decimal_str(q: Fraction, places: int = 6) -> str:
    scaled = round(q * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def run_algorithm(inst: Instance, algo: str, epsilon=None, guards=None, inner: str = "ptas") -> dict:
    """Dispatch one solver; returns schedule, breakdown, LP bound and counters."""
    guards = guards or default_guards()
    out = {"schedule": None, "breakdown": None, "lp_bound": None, "stats": {}}
    if algo in ("ptas", "ptas-general") and epsilon is None:
        raise InputError(f"--epsilon is required for {algo}")
    if algo == "brute":
        sched, res = exact.brute_force(inst, guards["brute_max_cells"])
    elif algo == "dp":
        sched, res = exact.dp_solve(inst, guards["dp_max_entries"])
        out["stats"]["dp_table_size"] = exact.dp_table_size(inst)
    elif algo == "lp-bound":
        sol = solve_relaxation(inst)
        out["lp_bound"] = sol.objective_value
        out["stats"]["lp_solves"] = 1
        return out
    elif algo == "round-lp":
        sched, sol = approx.round_lp(inst)
        res = evaluate(inst, sched)
        out["lp_bound"] = sol.objective_value
        out["stats"]["lp_solves"] = 1
    elif algo == "ptas":
        rep = approx.ptas_constant(inst, epsilon, guards["ptas_max_work"])
        sched, res = rep.best_schedule, rep.breakdown
        out["stats"].update(ell=rep.ell, lp_solves=rep.lp_solves, assignments_examined=rep.assignments_examined)
    elif algo == "ptas-general":
        if inner == "dp":
            inner_fn = partial(approx.dp_inner, max_entries=guards["dp_max_entries"])
        else:
            inner_fn = partial(approx.ptas_constant, max_work=guards["ptas_max_work"])
        rep = approx.ptas_general(inst, epsilon, inner_fn)
        sched, res = rep.best_schedule, rep.breakdown
        out["stats"].update(
            ell=rep.ell,
            lp_solves=rep.lp_solves,
            assignments_examined=rep.assignments_examined,
            best_offset=rep.best_offset,
            interval_length=approx.horizon_length(epsilon),
        )
    else:
        raise InputError(f"unknown algorithm {algo!r}")
    out["schedule"], out["breakdown"] = sched, res
    return out


def _read_instance(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return formats.parse_instance(text)
    except formats.ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _guards_from_args(args) -> dict:
    g = default_guards()
    for key in g:
        val = getattr(args, key, None)
        if val is not None:
            g[key] = val
    return g


def _epsilon(raw):
    if raw is None:
        return None
    try:
        eps = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"invalid epsilon {raw!r}") from None
    if eps <= 0:
        raise InputError("epsilon must be positive")
    return eps


def cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    eps = _epsilon(args.epsilon)
    guards = _guards_from_args(args)
    if args.dump_lp:
        Path(args.dump_lp).write_text(to_lp_format(build_lp(inst)))
    start = time.perf_counter()
    result = run_algorithm(inst, args.algo, eps, guards, args.inner)
    elapsed = time.perf_counter() - start

    params = {"epsilon": None if eps is None else str(eps)}
    params.update(guards)
    if args.algo == "ptas-general":
        params["inner"] = args.inner
    doc = {"format": formats.RESULT_FORMAT, "instance": args.instance, "algorithm": args.algo}
    sched, res = result["schedule"], result["breakdown"]
    doc["schedule"] = None if sched is None else formats.schedule_rows(sched)
    if res is not None:
        doc["feasible"] = is_feasible(inst, sched)
        doc["objective"] = {
            "knapsack_profit": res.knapsack_profit,
            "transition_profit": res.transition_profit,
            "total": res.total,
            "per_object_reward": list(res.per_object_reward),
        }
    if result["lp_bound"] is not None:
        doc["lp_bound"] = {"exact": str(result["lp_bound"]), "decimal": decimal_str(result["lp_bound"])}
    value = res.total if res is not None else str(result["lp_bound"])
    run = {
        "instance": args.instance,
        "algorithm": args.algo,
        "parameters": params,
        "value": value,
        "stats": result["stats"],
    }
    if args.timing:
        run["wall_time_s"] = round(elapsed, 6)
    doc["run"] = run
    text = formats.dumps(doc)
    if args.out:
        _write(args.out, text)
        if res is not None:
            print(f"{args.algo}: total {res.total}")
        else:
            print(f"{args.algo}: {doc['lp_bound']['exact']} ({doc['lp_bound']['decimal']})")
    else:
        _write(None, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    try:
        sched = formats.parse_schedule(Path(args.schedule).read_text())
    except OSError as exc:
        raise InputError(f"{args.schedule}: cannot read ({exc.strerror})") from None
    except formats.ParseError as exc:
        raise InputError(f"{args.schedule}: {exc}") from None
    try:
        loads = step_loads(inst, sched)
    except StructuralError as exc:
        raise InputError(str(exc)) from None
    res = evaluate(inst, sched)
    ok = True
    lines = []
    for t, (load, cap) in enumerate(zip(loads, inst.C), start=1):
        status = "ok" if load <= cap else "VIOLATED"
        ok &= load <= cap
        lines.append(f"step {t}: load {load} capacity {cap} slack {cap - load} {status}")
    lines.append(f"knapsack_profit {res.knapsack_profit}")
    lines.append(f"transition_profit {res.transition_profit}")
    lines.append(f"total {res.total}")
    lines.append("per_object_reward " + " ".join(map(str, res.per_object_reward)))
    lines.append("feasible" if ok else "infeasible")
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_gen(args) -> int:
    if args.family == "random":
        for key in ("n", "T"):
            if getattr(args, key) is None:
                raise InputError(f"--{key} is required for the random family")
        if args.capacity_fixed is not None:
            rule = ("fixed", args.capacity_fixed)
        else:
            try:
                rule = ("fraction", Fraction(args.capacity_fraction))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"invalid capacity fraction {args.capacity_fraction!r}") from None
        try:
            inst = reductions.gen_random(
                args.seed,
                args.n,
                args.T,
                args.weight_max,
                args.profit_max,
                args.bonus_max,
                rule,
                weight_min=args.weight_min,
            )
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        if not args.input:
            raise InputError(f"--input is required for the {args.family} family")
        try:
            text = Path(args.input).read_text()
        except OSError as exc:
            raise InputError(f"{args.input}: cannot read ({exc.strerror})") from None
        try:
            if args.family == "independent-set":
                inst = reductions.reduce_independent_set(reductions.parse_graph(text))
            else:
                inst = reductions.reduce_two_kp(reductions.parse_two_kp(text))
        except (StructuralError, ValueError) as exc:
            raise InputError(f"{args.input}: {exc}") from None
    _write(args.out, formats.format_instance(inst))
    return EXIT_OK


def _bench_row(item, guards, timing):
    label, path, run, refs = item
    algo = run.get("algo")
    eps_raw = run.get("epsilon")
    row = dict.fromkeys(BENCH_COLUMNS, "")
    row.update(instance=label, algorithm=algo or "", epsilon="" if eps_raw is None else str(eps_raw))
    start = time.perf_counter()
    try:
        eps = _epsilon(None if eps_raw is None else str(eps_raw))
        if eps is not None:
            row["epsilon"] = str(eps)
        inst = _read_instance(path)
        result = run_algorithm(inst, algo, eps, guards, run.get("inner", "ptas"))
    except (InputError, GuardError, ValueError, StructuralError) as exc:
        row.update(status="error", error=str(exc).replace("\n", " "))
        if timing:
            row["wall_time_s"] = ""
        return row
    elapsed = time.perf_counter() - start
    if result["breakdown"] is not None:
        value = Fraction(result["breakdown"].total)
    else:
        value = result["lp_bound"]
    dp_value, lp_bound = refs
    row.update(status="ok", value=str(value))
    if dp_value is not None:
        row["dp_value"] = str(dp_value)
        if dp_value > 0:
            row["ratio_dp"] = decimal_str(value / dp_value)
    if lp_bound is not None:
        row["lp_bound"] = str(lp_bound)
        if lp_bound > 0:
            row["ratio_lp"] = decimal_str(value / lp_bound)
    for key in ("lp_solves", "dp_table_size", "assignments_examined"):
        if key in result["stats"]:
            row[key] = str(result["stats"][key])
    if timing:
        row["wall_time_s"] = f"{elapsed:.6f}"
    return row


def _references(inst: Instance, guards: dict):
    try:
        dp_value = exact.dp_solve(inst, guards["dp_max_entries"])[1].total
    except GuardError:
        dp_value = None
    return dp_value, solve_relaxation(inst).objective_value


def _load_manifest(path: str) -> list[tuple[str, str, dict]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: manifest must be a JSON object")
    base = Path(path).parent
    instances = doc.get("instances", [])
    runs = doc.get("runs", [])
    if not isinstance(instances, list) or not isinstance(runs, list):
        raise InputError(f"{path}: 'instances' and 'runs' must be lists")
    for r in runs:
        if not isinstance(r, dict) or r.get("algo") not in ALGORITHMS:
            raise InputError(f"{path}: bad run entry {r!r}")
    items = []
    for inst_path in instances:
        if not isinstance(inst_path, str):
            raise InputError(f"{path}: bad instance entry {inst_path!r}")
        p = Path(inst_path)
        resolved = str(p if p.is_absolute() else base / p)
        items.extend((inst_path, resolved, r) for r in runs)
    return items


def cmd_bench(args) -> int:
    guards = _guards_from_args(args)
    items = _load_manifest(args.manifest)
    refs = {}
    for _, path, _ in items:
        if path in refs:
            continue
        try:
            refs[path] = _references(_read_instance(path), guards)
        except (InputError, GuardError):
            refs[path] = (None, None)
    work = [(label, path, run, refs[path]) for label, path, run in items]
    fn = partial(_bench_row, guards=guards, timing=args.timing)
    if args.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(fn, work))
    else:
        rows = [fn(w) for w in work]

    columns = BENCH_COLUMNS + (("wall_time_s",) if args.timing else ())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write(args.out, buf.getvalue())
    failed = sum(r["status"] != "ok" for r in rows)
    if failed:
        print(f"{failed} of {len(rows)} rows failed", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def _add_guard_flags(p):
    p.add_argument("--brute-max-cells", dest="brute_max_cells", type=int, help="largest n*T for brute force")
    p.add_argument("--dp-max-entries", dest="dp_max_entries", type=int, help="largest DP table")
    p.add_argument("--ptas-max-work", dest="ptas_max_work", type=int, help="largest PTAS guess count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multiknap", description="Multistage knapsack solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--epsilon", help="accuracy for ptas variants, e.g. 0.3 or 3/10")
    p.add_argument("--inner", choices=("ptas", "dp"), default="ptas", help="interval solver for ptas-general")
    p.add_argument("--out", help="result document path (default: stdout)")
    p.add_argument("--dump-lp", help="also write the relaxation in CPLEX LP format")
    p.add_argument("--timing", action="store_true", help="record wall time in the result")
    _add_guard_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a schedule against an instance")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("family", choices=("random", "independent-set", "two-kp"))
    p.add_argument("--out", help="instance path (default: stdout)")
    p.add_argument("--input", help="graph or 2-KP file for the reduction families")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--weight-min", type=int, default=1)
    p.add_argument("--weight-max", type=int, default=10)
    p.add_argument("--profit-max", type=int, default=10)
    p.add_argument("--bonus-max", type=int, default=10)
    cap = p.add_mutually_exclusive_group()
    cap.add_argument("--capacity-fixed", type=int)
    cap.add_argument("--capacity-fraction", default="1/2")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a manifest of instances x algorithms")
    p.add_argument("manifest")
    p.add_argument("--out", help="CSV table path (default: stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add a wall_time_s column")
    _add_guard_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
