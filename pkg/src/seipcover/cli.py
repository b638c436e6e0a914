"""``seipcover`` command line: generate, solve, experiment, verify.

Exit codes: 0 success, 1 a verification check failed, 2 usage or parse
error, 3 budget exhausted without a feasible solution, 4 oracle refusal.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .analysis import (
    OracleLimitError,
    certificate_from_trace,
    check_path_certificate,
    exact_solve,
    price_audit,
    prices_from_trace,
)
from .core import IsolationFunction, extend_closure
from .experiment import (
    ALGORITHMS,
    EA_ALGORITHMS,
    ConfigError,
    ResultRow,
    default_jobs,
    load_config,
    rows_to_csv,
    run_algorithm,
    run_experiment,
    summary_to_csv,
)
from .generators import ProblemISpec, RandomSpec, gen_known_opt, gen_problem_i, gen_random_k_cover
from .io import (
    FormatError,
    audit_rows_csv,
    audit_to_text,
    certificate_to_text,
    instance_to_text,
    optimum_path,
    rational_from_json,
    rational_to_json,
    read_certificate,
    read_instance,
    read_opt_value,
    read_optimum,
    read_prices,
    read_trace,
    write_instance,
    write_optimum,
    write_prices,
    write_trace,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_ORACLE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"seipcover: {msg}", file=sys.stderr)


# -- generate -----------------------------------------------------------------

def cmd_generate(args) -> int:
    opt = None
    if args.kind == "problem-i":
        _need(args, "k", "L", "epsilon")
        inst, opt = gen_problem_i(ProblemISpec(args.k, args.L, rational_from_json(args.epsilon)))
    elif args.kind == "random-k":
        _need(args, "n", "m", "k", "seed")
        lo = rational_from_json(args.weight_lo)
        hi = rational_from_json(args.weight_hi)
        inst = gen_random_k_cover(RandomSpec(args.n, args.m, args.k, args.seed, (lo, hi)))
    else:
        _need(args, "k", "L", "seed")
        inst, opt = gen_known_opt(args.k, args.L, args.extra, args.seed)
    opt_value = opt.value if opt is not None else None
    if opt_value is None and args.with_opt:
        opt_value = exact_solve(inst).value

    if args.out:
        write_instance(inst, args.out)
        side = optimum_path(args.out)
        if opt is not None:
            write_optimum(opt, side)
        elif opt_value is not None:
            side.write_text(f'{{"value": "{opt_value.numerator}/{opt_value.denominator}"}}\n')
        summary_stream = sys.stdout
    else:
        sys.stdout.write(instance_to_text(inst))
        summary_stream = sys.stderr
    shown = "unknown" if opt_value is None else str(rational_to_json(opt_value))
    print(f"{inst.name}: n={inst.n} m={inst.m} k={inst.k} opt={shown}", file=summary_stream)
    return EXIT_OK


def _need(args, *names) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--kind {args.kind} requires {', '.join(missing)}")


# -- solve --------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    if args.algorithm in EA_ALGORITHMS and (args.seed is None or args.budget is None):
        raise UsageError(f"{args.algorithm} requires --seed and --budget")
    opt = None
    if args.opt is not None:
        opt = rational_from_json(args.opt)
    else:
        side = optimum_path(args.instance)
        if side.exists():
            opt = read_opt_value(side)
    if args.extend:
        inst = extend_closure(inst)
    options = {"oracle_limit": args.oracle_limit, "isolation": args.isolation,
               "acceptance": args.acceptance, "initialization": args.init}
    if args.mutation:
        options["mutation"] = args.mutation
    t0 = time.perf_counter()
    try:
        out = run_algorithm(inst, args.algorithm, args.seed or 0, args.budget, options,
                            record_trace=bool(args.trace))
    except OracleLimitError as exc:
        _err(str(exc))
        return EXIT_ORACLE
    wall = (time.perf_counter() - t0) * 1000.0
    if args.trace:
        write_trace(out.trace, args.trace)
    if args.prices:
        if out.prices is None:
            raise UsageError("--prices is only available for greedy and gaww")
        write_prices(out.prices, args.prices)
    row = ResultRow(inst.name, args.algorithm, args.seed or 0, out.steps_used, out.cost, opt, wall)
    sys.stdout.write(rows_to_csv([row]))
    return EXIT_OK if row.feasible else EXIT_INFEASIBLE


# -- experiment ---------------------------------------------------------------

def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.output:
        cfg.output = args.output
    res = run_experiment(cfg, jobs=args.jobs)
    sys.stdout.write(summary_to_csv(res.summary))
    if res.aborted:
        _err(f"experiment aborted, partial results kept: {res.aborted}")
        return EXIT_FAIL
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    iso = IsolationFunction.for_instance(inst, args.isolation)
    if args.certificate:
        cert = read_certificate(args.certificate, inst.m)
        return _report_certificate(check_path_certificate(inst, cert, iso))
    if not args.trace:
        raise UsageError("verify needs --certificate or --trace")
    trace = read_trace(args.trace)
    if args.mode == "audit":
        side = Path(args.optimum) if args.optimum else optimum_path(args.instance)
        if not side.exists():
            raise UsageError(f"price audit needs an optimum sidecar ({side})")
        known = read_optimum(side)
        prices = read_prices(args.prices) if args.prices else prices_from_trace(inst, trace)
        report = price_audit(inst, prices, trace, known)
        if args.report_out:
            Path(args.report_out).write_text(audit_to_text(report))
        if args.rows_out:
            Path(args.rows_out).write_text(audit_rows_csv(report))
        print(f"price audit: {'pass' if report.passed else 'FAIL'}; "
              f"total price {rational_to_json(report.total_price)}, "
              f"cost {rational_to_json(report.solution_cost)}")
        for e in report.errors:
            print(f"  {e}")
        return EXIT_OK if report.passed else EXIT_FAIL
    if args.opt is not None:
        opt = rational_from_json(args.opt)
    else:
        side = Path(args.optimum) if args.optimum else optimum_path(args.instance)
        if not side.exists():
            raise UsageError("certificate mode needs --opt or an optimum sidecar")
        opt = read_opt_value(side)
    cert = certificate_from_trace(inst, trace, opt, gap=args.gap)
    if args.certificate_out:
        Path(args.certificate_out).write_text(certificate_to_text(cert))
    return _report_certificate(check_path_certificate(inst, cert, iso))


def _report_certificate(rep) -> int:
    if rep.valid:
        print(f"certificate: pass; bound {rational_to_json(rep.bound)}, "
              f"final cost {rational_to_json(rep.final_cost)}")
        return EXIT_OK
    print(f"certificate: FAIL at step {rep.step}, condition {rep.condition}: {rep.message}")
    return EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seipcover", description="Weighted set cover workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated instance")
    g.add_argument("--kind", required=True, choices=("problem-i", "random-k", "known-opt"))
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--L", type=int)
    g.add_argument("--epsilon")
    g.add_argument("--seed", type=int)
    g.add_argument("--extra", type=int, default=0, help="distractor sets for known-opt")
    g.add_argument("--weight-lo", default="1")
    g.add_argument("--weight-hi", default="10")
    g.add_argument("--with-opt", action="store_true", help="compute OPT exactly and write a sidecar")
    g.add_argument("--out", help="instance path; the sidecar goes to <out>.opt")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run one algorithm on one instance")
    s.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    s.add_argument("--instance", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--extend", action="store_true", help="solve the subset closure")
    s.add_argument("--trace")
    s.add_argument("--prices")
    s.add_argument("--opt", help="optimum value; defaults to the sidecar")
    s.add_argument("--isolation", default="covered-elements", choices=("covered-elements", "feasibility"))
    s.add_argument("--mutation", choices=("one-bit", "bit-wise"))
    s.add_argument("--acceptance", default="penalty", choices=("penalty", "literal"))
    s.add_argument("--init", default="empty", choices=("empty", "random"))
    s.add_argument("--oracle-limit", type=int, default=24)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", help="run a batch experiment from a JSON config")
    e.add_argument("config")
    e.add_argument("--jobs", type=int, default=None, help="worker processes (default from SEIPCOVER_JOBS)")
    e.add_argument("--output")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="check a path certificate or run a price audit")
    v.add_argument("--instance", required=True)
    v.add_argument("--certificate")
    v.add_argument("--trace")
    v.add_argument("--mode", choices=("certificate", "audit"), default="certificate")
    v.add_argument("--prices")
    v.add_argument("--optimum")
    v.add_argument("--opt")
    v.add_argument("--gap", type=int)
    v.add_argument("--isolation", default="covered-elements", choices=("covered-elements", "feasibility"))
    v.add_argument("--certificate-out")
    v.add_argument("--report-out")
    v.add_argument("--rows-out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 0) is None:
        args.jobs = default_jobs()
    try:
        return args.func(args)
    except OracleLimitError as exc:
        _err(str(exc))
        return EXIT_ORACLE
    except (UsageError, ConfigError, FormatError, ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
