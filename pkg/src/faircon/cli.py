"""Command-line front end: solve, verify, generate, bench-pof.

Exit codes: 0 success, 1 verification failed, 2 budget exceeded, 3 invalid
input.  FAIRCON_LOG sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import dp, exact, ext, instances, serialize
from .core import (
    SolveResult,
    fairness_report,
    greedy_ef,
    revenue,
    unconstrained_opt,
    verify_eps_ef,
)
from .errors import BudgetExceededError, FairconError, InvalidInstanceError
from .numeric import as_fraction, format_scalar_text

log = logging.getLogger("faircon")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BUDGET = 2
EXIT_INVALID = 3

METHODS = (
    "greedy",
    "exact-ef",
    "exact-eps-ef",
    "exact-ef1",
    "exact-efs",
    "dp-eps-ef",
    "dp-ef1",
    "round-robin",
)
EPS_METHODS = ("exact-eps-ef", "dp-eps-ef", "dp-ef1")


def _setup_logging() -> None:
    level = os.environ.get("FAIRCON_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _load_instance(path: str):
    return serialize.instance_from_dict(serialize.load_json(path))


def _dispatch_solve(inst, method: str, eps, budget_lps: int, budget_states: int, f_bits):
    if method == "greedy":
        contract = greedy_ef(inst)
        return SolveResult(contract, revenue(inst, contract), "greedy", {})
    if method == "exact-ef":
        return exact.solve_opt_ef(inst, 0, budget_lps)
    if method == "exact-eps-ef":
        return exact.solve_opt_ef(inst, eps, budget_lps)
    if method == "exact-ef1":
        return exact.solve_opt_ef1(inst, budget_lps)
    if method == "exact-efs":
        return exact.solve_opt_efs(inst, budget_lps)
    if method == "dp-eps-ef":
        return dp.solve_eps_ef_fptas(inst, eps, budget_states)
    if method == "dp-ef1":
        return dp.solve_ef1_fptas(inst, eps, budget_states, f_bits=f_bits)
    if method == "round-robin":
        return ext.round_robin_ef1(inst)
    raise InvalidInstanceError(f"unknown method {method!r}")


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    eps = as_fraction(args.eps) if args.eps is not None else None
    if args.method in EPS_METHODS and eps is None:
        print(f"method {args.method} requires --eps", file=sys.stderr)
        return EXIT_INVALID
    res = _dispatch_solve(
        inst, args.method, eps, args.budget_lps, args.budget_states, args.f_bits
    )
    report = fairness_report(inst, res.contract, eps or 0, args.tol)
    payload = serialize.result_to_dict(res, report, args.exact_arith)
    if args.out:
        serialize.dump_json(payload, args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    print(
        f"method={res.method} revenue={format_scalar_text(res.revenue, args.exact_arith)}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    contract = serialize.contract_from_dict(
        serialize.load_json(args.contract), inst.n
    )
    tol = as_fraction(args.tol)
    eps = as_fraction(args.eps) if args.eps is not None else None
    if args.notion == "eps-ef" and eps is None:
        print("eps-ef verification requires --eps", file=sys.stderr)
        return EXIT_INVALID
    report = fairness_report(inst, contract, eps or 0, tol)
    payload = serialize.report_to_dict(report, args.exact_arith)
    if args.notion == "ef":
        ok = report.ir_ok and bool(report.ef_ok)
    elif args.notion == "eps-ef":
        ok = report.ir_ok and verify_eps_ef(inst, contract, eps, tol)
    elif args.notion == "ef1":
        ok = report.ir_ok and bool(report.ef1_ok)
    elif args.notion == "efs":
        if contract.subsidies is None:
            print("contract has no subsidies", file=sys.stderr)
            return EXIT_INVALID
        ok = report.ir_ok and bool(report.efs_ok)
    else:
        return EXIT_INVALID
    payload["notion"] = args.notion
    payload["ok"] = ok
    out = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _parse_int_set(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _parse_graph(text: str) -> list[list[int]]:
    """Edges like '0-1,1-2,2-0' into an adjacency list."""
    edges = []
    for part in text.replace(",", " ").split():
        u, v = part.split("-")
        edges.append((int(u), int(v)))
    n = max(max(e) for e in edges) + 1
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def cmd_generate(args) -> int:
    params: dict = {}
    if args.family in ("partition-ef", "partition-ef1", "partition-eps-ef", "two-agent-hard"):
        if not args.set:
            print("--set is required for partition families", file=sys.stderr)
            return EXIT_INVALID
        params["set"] = _parse_int_set(args.set)
    if args.family in ("partition-eps-ef", "example"):
        if args.eps is None:
            print("--eps is required for this family", file=sys.stderr)
            return EXIT_INVALID
        params["eps"] = as_fraction(args.eps)
    if args.family == "independent-set":
        if not args.graph:
            print("--graph is required (edges like 0-1,1-2)", file=sys.stderr)
            return EXIT_INVALID
        params["adjacency"] = _parse_graph(args.graph)
        params["c_target"] = as_fraction(args.c_target)
    if args.family == "pof-sqrt":
        params["n"] = args.n
    if args.family == "example":
        params["id"] = args.id
    if args.family == "random":
        params.update(n=args.n, m=args.m, seed=args.seed, profile=args.profile)
    inst = instances.make(args.family, params)
    serialize.dump_json(serialize.instance_to_dict(inst, exact=True), args.out)
    manifest = {
        "generator": args.family,
        "params": {
            k: (str(v) if isinstance(v, Fraction) else v) for k, v in params.items()
        },
    }
    serialize.dump_json(manifest, args.out + ".manifest.json")
    print(f"wrote {inst.n}x{inst.m} instance to {args.out}", file=sys.stderr)
    return EXIT_OK


def _bench_row(row: dict, budget_lps: int, budget_states: int) -> dict:
    """One price-of-fairness row; exceptions are reported in the row."""
    out = {
        "instance_id": row.get("id", ""),
        "n": "",
        "m": "",
        "opt": "",
        "opt_ef": "",
        "opt_ef1_lb": "",
        "ratio_ef": "",
        "ratio_ef1": "",
        "method": "",
        "runtime_states": "",
        "error": "",
    }
    try:
        inst = instances.make(row["family"], row.get("params", {}))
        out["n"], out["m"] = inst.n, inst.m
        eps = as_fraction(row["eps"]) if row.get("eps") is not None else None
        ef_method = row.get("ef_method", "exact-ef")
        ef1_method = row.get("ef1_method", "round-robin")
        opt = unconstrained_opt(inst)

        if ef_method == "exact-ef":
            ef_res = exact.solve_opt_ef(inst, 0, budget_lps)
        elif ef_method == "dp-eps-ef":
            ef_res = dp.solve_eps_ef_fptas(inst, eps, budget_states)
        elif ef_method == "greedy":
            k = greedy_ef(inst)
            ef_res = SolveResult(k, revenue(inst, k), "greedy", {})
        else:
            raise InvalidInstanceError(f"unknown ef_method {ef_method!r}")

        if ef1_method == "exact-ef1":
            ef1_res = exact.solve_opt_ef1(inst, budget_lps)
        elif ef1_method == "dp-ef1":
            ef1_res = dp.solve_ef1_fptas(
                inst, eps, budget_states, f_bits=row.get("f_bits")
            )
        elif ef1_method == "round-robin":
            ef1_res = ext.round_robin_ef1(inst)
        else:
            raise InvalidInstanceError(f"unknown ef1_method {ef1_method!r}")

        states = ef_res.meta.get("states", 0) + ef1_res.meta.get("states", 0)
        lps = ef_res.meta.get("lp_solves", 0) + ef1_res.meta.get("lp_solves", 0)
        out.update(
            opt=format_scalar_text(opt),
            opt_ef=format_scalar_text(ef_res.revenue),
            opt_ef1_lb=format_scalar_text(ef1_res.revenue),
            ratio_ef=format_scalar_text(ef_res.revenue / opt) if opt else "",
            ratio_ef1=format_scalar_text(ef1_res.revenue / opt) if opt else "",
            method=f"{ef_method}+{ef1_method}",
            runtime_states=states or lps,
        )
    except Exception as exc:  # per-row failures must not kill the sweep
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


CSV_COLUMNS = [
    "instance_id", "n", "m", "opt", "opt_ef", "opt_ef1_lb",
    "ratio_ef", "ratio_ef1", "method", "runtime_states", "error",
]


def cmd_bench_pof(args) -> int:
    config = serialize.load_json(args.config)
    rows = config.get("rows", [])
    budget_lps = int(config.get("budget_lps", exact.DEFAULT_LP_BUDGET))
    budget_states = int(config.get("budget_states", dp.DEFAULT_STATE_BUDGET))
    jobs = args.jobs or int(config.get("jobs", 1))
    started = time.time()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(_bench_row, rows, [budget_lps] * len(rows), [budget_states] * len(rows))
            )
    else:
        results = [_bench_row(row, budget_lps, budget_states) for row in rows]
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rec in results:
            writer.writerow(rec)
    ok_rows = sum(1 for rec in results if not rec["error"])
    log.info("bench: %d/%d rows ok in %.1fs", ok_rows, len(results), time.time() - started)
    print(f"{ok_rows}/{len(results)} rows ok -> {args.out}", file=sys.stderr)
    return EXIT_OK if ok_rows else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faircon",
        description="Revenue-optimal fair contracts: solvers, verifiers, generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve an instance file")
    ps.add_argument("instance")
    ps.add_argument("--method", required=True, choices=METHODS)
    ps.add_argument("--eps", help="epsilon for eps-EF / DP methods")
    ps.add_argument("--tol", default="1e-9")
    ps.add_argument("--budget-lps", type=int, default=exact.DEFAULT_LP_BUDGET)
    ps.add_argument("--budget-states", type=int, default=dp.DEFAULT_STATE_BUDGET)
    ps.add_argument("--f-bits", type=int, default=None, help="override the EF1 guess resolution")
    ps.add_argument("--exact-arith", action="store_true", help="print rationals as num/den")
    ps.add_argument("--seed", type=int, default=0, help="accepted for script symmetry")
    ps.add_argument("--out")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="verify a contract against an instance")
    pv.add_argument("instance")
    pv.add_argument("contract")
    pv.add_argument("--notion", required=True, choices=("ef", "eps-ef", "ef1", "efs"))
    pv.add_argument("--eps")
    pv.add_argument("--tol", default="1e-9")
    pv.add_argument("--exact-arith", action="store_true")
    pv.add_argument("--out")
    pv.set_defaults(func=cmd_verify)

    pg = sub.add_parser("generate", help="write an instance from a named family")
    pg.add_argument(
        "family",
        choices=(
            "partition-ef", "partition-ef1", "partition-eps-ef", "two-agent-hard",
            "independent-set", "pof-sqrt", "example", "random",
        ),
    )
    pg.add_argument("--set", help="comma-separated integers for partition families")
    pg.add_argument("--eps")
    pg.add_argument("--graph", help="edge list like 0-1,1-2,2-0")
    pg.add_argument("--c-target", default="1")
    pg.add_argument("--n", type=int)
    pg.add_argument("--m", type=int)
    pg.add_argument("--id", help="example id: 5.2, 5.4, or 5.7")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--profile", default="uniform", choices=instances.PROFILES)
    pg.add_argument("--out", required=True)
    pg.set_defaults(func=cmd_generate)

    pb = sub.add_parser("bench-pof", help="price-of-fairness sweep to CSV")
    pb.add_argument("config")
    pb.add_argument("--out", required=True)
    pb.add_argument("--jobs", type=int, default=None)
    pb.set_defaults(func=cmd_bench_pof)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInstanceError, FairconError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
