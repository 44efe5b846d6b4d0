"""Command-line entry point.

Subcommands: ``gen`` (build an instance from a dataset and a utility model),
``solve`` (run one solver on an instance file), ``pod`` (welfare-ratio report
with bounds), ``lottery`` (Monte-Carlo lottery simulation), and
``experiment`` (batch grid runs with CSV and figure output).

Exit codes: 0 success, 2 input error, 3 precondition error, 4 budget
exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import experiment as exp
from .generators import ModelConfig, generate
from .geodata import load_geodata, scale_blocks
from .lottery import lottery_monte_carlo
from .model import (
    BudgetExceededError,
    InputError,
    PreconditionError,
    QuotamatchError,
    instance_to_json,
    load_instance,
)
from .pod import compute_pod
from .solvers import SOLVERS, solve, solve_brute_force, solve_unconstrained

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_BUDGET = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quotamatch",
        description="Assignment under type-block diversity quotas: generators, "
                    "solvers, welfare-ratio analysis, and lottery simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate an instance from a dataset")
    p_gen.add_argument("--model", required=True,
                       choices=["dist", "ethn", "proj", "price", "chicago"])
    p_gen.add_argument("--n", type=int, required=True, help="number of agents")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--sigma2", type=float, default=None, help="noise variance")
    p_gen.add_argument("--rho", type=float, default=None, help="approval radius (km)")
    p_gen.add_argument("--data", default="sg",
                       help="dataset directory or bundled name (sg, chicago)")
    p_gen.add_argument("--scale", type=float, default=None,
                       help="scale all block sizes by this factor")
    p_gen.add_argument("--per-block-noise", action="store_true",
                       help="draw one noise sample per (agent, block) instead of per item")
    p_gen.add_argument("-o", "--output", default=None,
                       help="output file (default: stdout)")

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument("--method", default="auto",
                         choices=sorted(SOLVERS) + ["auto"])
    p_solve.add_argument("--oracle-check", action="store_true",
                         help="cross-check the objective against brute force")
    p_solve.add_argument("--node-budget", type=int, default=None)
    p_solve.add_argument("--time-budget", type=float, default=None)
    p_solve.add_argument("--explicit-min", action="store_true",
                         help="flow solvers: solve one problem per flow value")

    p_pod = sub.add_parser("pod", help="welfare-ratio report with bounds")
    p_pod.add_argument("instance")
    p_pod.add_argument("--method", default="auto",
                       help="exact solver for the constrained optimum")
    p_pod.add_argument("--effective", action="store_true",
                       help="use floored integer caps in the bounds")

    p_lot = sub.add_parser("lottery", help="simulate the serial lottery")
    p_lot.add_argument("instance")
    p_lot.add_argument("--trials", type=int, default=100)
    p_lot.add_argument("--seed", type=int, default=0)
    p_lot.add_argument("--csv", default=None, help="write per-trial CSV here")
    p_lot.add_argument("--opt-c-method", default=None,
                       help="also compute the constrained optimum with this solver")

    p_exp = sub.add_parser("experiment", help="run a batch experiment grid")
    p_exp.add_argument("config")
    p_exp.add_argument("--output", default=None, help="override the output directory")
    p_exp.add_argument("--threads", type=int, default=1)
    p_exp.add_argument("--no-plot", action="store_true",
                       help="skip figure rendering")
    return parser


def cmd_gen(args: argparse.Namespace) -> int:
    dataset = load_geodata(args.data)
    if args.scale is not None:
        dataset = scale_blocks(dataset, args.scale)
    cfg = ModelConfig(
        model=args.model,
        n=args.n,
        seed=args.seed,
        sigma2=args.sigma2,
        rho_km=args.rho,
        noise="per-block" if args.per_block_noise else "per-item",
    )
    inst = generate(dataset, cfg)
    doc = instance_to_json(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    else:
        json.dump(doc, sys.stdout)
        sys.stdout.write("\n")
    print(f"n={inst.n} m={inst.m} k={inst.k} l={inst.l} "
          f"caps={inst.capacities.tolist()}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    kwargs = {}
    if args.method == "exact":
        if args.node_budget is not None:
            kwargs["node_budget"] = args.node_budget
        if args.time_budget is not None:
            kwargs["time_budget"] = args.time_budget
    if args.method == "brute" and args.node_budget is not None:
        kwargs["node_budget"] = args.node_budget
    if args.method in ("mcf-type", "mcf-block") and args.explicit_min:
        kwargs["explicit_min"] = True
    result = solve(inst, args.method, **kwargs)
    if args.oracle_check:
        try:
            oracle = solve_brute_force(inst)
        except BudgetExceededError:
            result.stats["oracle_check"] = "skipped: instance too large"
        else:
            result.stats["oracle_objective"] = oracle.objective
            gap = abs(oracle.objective - result.objective)
            if result.optimal and gap > 1e-9 * max(1.0, oracle.objective):
                raise QuotamatchError(
                    f"solver disagrees with brute force: {result.objective} vs "
                    f"{oracle.objective}")
    json.dump(result.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_pod(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    report = compute_pod(inst, exact_method=args.method,
                         mode="effective" if args.effective else "nominal"
                         if inst.quotas is not None else "effective")
    json.dump(report.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_lottery(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    opt = solve_unconstrained(inst).objective
    opt_c = None
    if args.opt_c_method:
        opt_c = solve(inst, args.opt_c_method).objective
    summary = lottery_monte_carlo(inst, args.trials, args.seed, opt=opt, opt_c=opt_c)
    if args.csv:
        import csv as csvmod
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csvmod.writer(fh)
            writer.writerow(["trial", "seed", "welfare", "ratio"])
            for rec in summary.records:
                writer.writerow([rec["trial"], rec["seed"], repr(float(rec["welfare"])),
                                 repr(float(rec["ratio"]))])
    doc = summary.to_json()
    doc["opt"] = opt
    if opt_c is not None:
        doc["opt_c"] = opt_c
    json.dump(doc, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = exp.parse_config(args.config)
    if args.output:
        cfg.out = args.output
    rows = exp.run_experiment(cfg, threads=args.threads)
    path = exp.write_results(rows, cfg.out)
    print(f"wrote {path}", file=sys.stderr)
    if not args.no_plot:
        for fig_path in exp.render_figures(rows, cfg.out):
            print(f"wrote {fig_path}", file=sys.stderr)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "solve": cmd_solve,
        "pod": cmd_pod,
        "lottery": cmd_lottery,
        "experiment": cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QuotamatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
