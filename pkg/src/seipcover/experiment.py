"""Batch experiments: budget expressions, algorithm dispatch and result tables."""

from __future__ import annotations

import ast
import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .analysis import exact_solve
from .core import IsolationFunction, SetCoverInstance, extend_closure
from .generators import ProblemISpec, RandomSpec, gen_known_opt, gen_problem_i, gen_random_k_cover
from .io import FormatError, optimum_path, rational_from_json, read_instance, read_opt_value
from .solvers import EaConfig, GawwConfig, gaww_solve, greedy_solve, opo_ea_run, seip_run, semo_run

ALGORITHMS = ("greedy", "gaww", "opo-ea", "semo", "lseip", "gseip", "exact")
EA_ALGORITHMS = ("opo-ea", "semo", "lseip", "gseip")
JOBS_ENV = "SEIPCOVER_JOBS"


class ConfigError(ValueError):
    pass


# -- budget expressions -------------------------------------------------------

_BUDGET_OPS = {ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow}


def evaluate_budget(expr, **params: int) -> int:
    """Evaluate e.g. ``"50*m*n^2"`` or ``"100*n^(k+3)"`` exactly.

    ``^`` means power.  Only integer literals, the given names and
    ``+ - * / ^ ( )`` are accepted; the result must be a positive integer.
    """
    if isinstance(expr, int) and not isinstance(expr, bool):
        value = Fraction(expr)
    else:
        try:
            tree = ast.parse(str(expr).replace("^", "**"), mode="eval")
        except SyntaxError:
            raise ConfigError(f"cannot parse budget expression {expr!r}") from None

        def ev(node) -> Fraction:
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
                return Fraction(node.value)
            if isinstance(node, ast.Name):
                if node.id not in params:
                    raise ConfigError(f"unknown name {node.id!r} in budget expression")
                return Fraction(params[node.id])
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                v = ev(node.operand)
                return -v if isinstance(node.op, ast.USub) else v
            if isinstance(node, ast.BinOp) and type(node.op) in _BUDGET_OPS:
                a, b = ev(node.left), ev(node.right)
                if isinstance(node.op, ast.Add):
                    return a + b
                if isinstance(node.op, ast.Sub):
                    return a - b
                if isinstance(node.op, ast.Mult):
                    return a * b
                if isinstance(node.op, ast.Div):
                    if b == 0:
                        raise ConfigError("division by zero in budget expression")
                    return a / b
                if b.denominator != 1 or b < 0:
                    raise ConfigError("exponents must be non-negative integers")
                return a ** int(b)
            raise ConfigError(f"unsupported syntax in budget expression {expr!r}")

        value = ev(tree)
    if value.denominator != 1 or value < 1:
        raise ConfigError(f"budget {expr!r} evaluates to {value}, not a positive integer")
    return int(value)


def budget_params(instance: SetCoverInstance) -> dict[str, int]:
    return {"n": instance.n, "m": instance.m, "k": instance.k, "q": instance.n}


# -- running one algorithm ----------------------------------------------------

@dataclass
class Outcome:
    solution: Optional[object]
    cost: Optional[Fraction]
    steps_used: int
    trace: list = field(default_factory=list)
    prices: Optional[dict] = None


def run_algorithm(instance: SetCoverInstance, name: str, seed: int = 0, budget: Optional[int] = None,
                  options: Optional[dict] = None, record_trace: bool = False,
                  target_cost: Optional[Fraction] = None) -> Outcome:
    options = dict(options or {})
    if name == "greedy":
        res = greedy_solve(instance)
        return Outcome(res.solution, _cost(instance, res.solution), len(res.trace), res.trace, res.prices)
    if name == "gaww":
        cfg = GawwConfig(enumeration_budget=int(options.get("enumeration_budget", GawwConfig.enumeration_budget)))
        res = gaww_solve(instance, cfg)
        return Outcome(res.solution, _cost(instance, res.solution), len(res.trace), res.trace, res.prices)
    if name == "exact":
        res = exact_solve(instance, limit=int(options.get("oracle_limit", 24)))
        return Outcome(res.solution, res.value, 0)
    if name not in EA_ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    if budget is None:
        raise ConfigError(f"{name} needs a budget")
    mutation = {"lseip": "one-bit", "gseip": "bit-wise"}.get(name, options.get("mutation", "one-bit"))
    cfg = EaConfig(
        mutation=mutation,
        budget=budget,
        seed=seed,
        acceptance=options.get("acceptance", "penalty"),
        initialization=options.get("initialization", "empty"),
        record_trace=record_trace,
        target_cost=target_cost,
    )
    if name in ("lseip", "gseip"):
        iso = IsolationFunction.for_instance(instance, options.get("isolation", "covered-elements"))
        res = seip_run(instance, iso, cfg)
    elif name == "semo":
        res = semo_run(instance, cfg)
    else:
        res = opo_ea_run(instance, cfg)
    return Outcome(res.best_feasible, res.best_cost, res.steps_used, res.trace)


def _cost(instance, solution) -> Fraction:
    return instance.from_int_cost(instance.int_cost(solution.bits))


# -- result rows --------------------------------------------------------------

RESULT_HEADER = ["instance", "algorithm", "seed", "steps_used", "cost", "opt", "ratio",
                 "ratio_decimal", "feasible", "wall_ms"]


def fmt_rational(value: Optional[Fraction]) -> str:
    if value is None:
        return ""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def fmt_decimal(value: Optional[Fraction]) -> str:
    if value is None:
        return ""
    with localcontext() as ctx:
        ctx.prec = 15
        return str(Decimal(value.numerator) / Decimal(value.denominator))


@dataclass
class ResultRow:
    instance: str
    algorithm: str
    seed: int
    steps_used: int
    cost: Optional[Fraction]
    opt: Optional[Fraction]
    wall_ms: Optional[float] = 0.0

    @property
    def feasible(self) -> bool:
        return self.cost is not None

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.opt is None or self.cost is None:
            return None
        return self.cost / self.opt

    def cells(self) -> list:
        return [
            self.instance, self.algorithm, self.seed, self.steps_used, fmt_rational(self.cost),
            fmt_rational(self.opt), fmt_rational(self.ratio), fmt_decimal(self.ratio),
            int(self.feasible), "" if self.wall_ms is None else f"{self.wall_ms:.3f}",
        ]


def rows_to_csv(rows, header=True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(RESULT_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


# -- experiments --------------------------------------------------------------

@dataclass
class ExperimentConfig:
    instance: object  # path string or generator dict
    algorithms: list
    runs: int = 1
    base_seed: int = 0
    budget: object = "50*m*n^2"
    output: str = "results.csv"
    threshold: Optional[Fraction] = None
    opt: object = "auto"
    extend: bool = False
    stop_at_threshold: bool = False
    timing: bool = True
    base_dir: Path = field(default=Path("."), repr=False)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not self.algorithms:
            raise ConfigError("algorithm list is empty")
        for a in self.algorithms:
            if a["name"] not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a['name']!r}")
        if self.stop_at_threshold and self.threshold is None:
            raise ConfigError("stop_at_threshold needs a threshold")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return config_from_dict(data, base_dir=path.parent)


def config_from_dict(data: dict, base_dir=Path(".")) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be an object")
    algos = []
    for a in data.get("algorithms", []):
        algos.append({"name": a} if isinstance(a, str) else dict(a))
    for a in algos:
        if "name" not in a:
            raise ConfigError("every algorithm entry needs a name")
    threshold = data.get("threshold")
    try:
        return ExperimentConfig(
            instance=data["instance"],
            algorithms=algos,
            runs=int(data.get("runs", 1)),
            base_seed=int(data.get("base_seed", 0)),
            budget=data.get("budget", "50*m*n^2"),
            output=data.get("output", "results.csv"),
            threshold=rational_from_json(threshold) if threshold is not None else None,
            opt=data.get("opt", "auto"),
            extend=bool(data.get("extend", False)),
            stop_at_threshold=bool(data.get("stop_at_threshold", False)),
            timing=bool(data.get("timing", True)),
            base_dir=Path(base_dir),
        )
    except KeyError as exc:
        raise ConfigError(f"config is missing field {exc}") from None
    except FormatError as exc:
        raise ConfigError(str(exc)) from None


def build_instance(source, base_dir=Path(".")) -> tuple[SetCoverInstance, Optional[Fraction]]:
    """Instance and known optimum value (if any) from a path or generator object."""
    if isinstance(source, str):
        p = Path(source)
        if not p.is_absolute():
            p = Path(base_dir) / p
        inst = read_instance(p)
        side = optimum_path(p)
        return inst, read_opt_value(side) if side.exists() else None
    if not isinstance(source, dict) or "kind" not in source:
        raise ConfigError("instance must be a path or a generator object with a 'kind'")
    kind = source["kind"]
    if kind == "problem-i":
        inst, opt = gen_problem_i(ProblemISpec(int(source["k"]), int(source["L"]),
                                               rational_from_json(source["epsilon"])))
        return inst, opt.value
    if kind == "random-k":
        lo = rational_from_json(source.get("weight_lo", 1))
        hi = rational_from_json(source.get("weight_hi", 10))
        inst = gen_random_k_cover(RandomSpec(int(source["n"]), int(source["m"]), int(source["k"]),
                                             int(source.get("seed", 0)), (lo, hi)))
        return inst, None
    if kind in ("known-opt", "planted"):
        inst, opt = gen_known_opt(int(source["k"]), int(source["L"]), int(source.get("extra", 0)),
                                  int(source.get("seed", 0)))
        return inst, opt.value
    raise ConfigError(f"unknown generator kind {kind!r}")


def _cell(args):
    instance, label, algo, seed, budget, opt, target, timing = args
    name = algo["name"]
    options = {k: v for k, v in algo.items() if k != "name"}
    t0 = time.perf_counter()
    out = run_algorithm(instance, name, seed, budget, options, target_cost=target)
    wall = (time.perf_counter() - t0) * 1000.0
    return ResultRow(label, name, seed, out.steps_used, out.cost, opt, wall if timing else None)


@dataclass
class ExperimentResult:
    rows: list
    summary: list
    aborted: Optional[str] = None


def _median(values):
    values = sorted(values)
    mid = len(values) // 2
    if len(values) % 2:
        return values[mid]
    return (values[mid - 1] + values[mid]) / 2


def summarize(rows, threshold: Optional[Fraction]) -> list[dict]:
    out = []
    for name in sorted({r.algorithm for r in rows}):
        rs = [r for r in rows if r.algorithm == name]
        ratios = [r.ratio for r in rs if r.ratio is not None]
        entry = {
            "algorithm": name,
            "cells": len(rs),
            "feasible": sum(r.feasible for r in rs),
            "min_ratio": min(ratios) if ratios else None,
            "median_ratio": _median(ratios) if ratios else None,
            "max_ratio": max(ratios) if ratios else None,
            "success_fraction": None,
        }
        if threshold is not None and ratios:
            entry["success_fraction"] = Fraction(sum(r <= threshold for r in ratios), len(rs))
        out.append(entry)
    return out


SUMMARY_HEADER = ["algorithm", "cells", "feasible", "min_ratio", "median_ratio", "max_ratio",
                  "success_fraction", "success_decimal"]


def summary_to_csv(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in summary:
        w.writerow([s["algorithm"], s["cells"], s["feasible"], fmt_rational(s["min_ratio"]),
                    fmt_rational(s["median_ratio"]), fmt_rational(s["max_ratio"]),
                    fmt_rational(s["success_fraction"]), fmt_decimal(s["success_fraction"])])
    return buf.getvalue()


def summary_path(output) -> Path:
    p = Path(output)
    return p.with_name(p.stem + ".summary.csv")


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run_experiment(cfg: ExperimentConfig, jobs: Optional[int] = None, write: bool = True) -> ExperimentResult:
    """Run every (algorithm, seed) cell; seeds are ``base_seed + run index``.

    Rows come back sorted by (algorithm position in the config, seed), so the
    output does not depend on ``jobs``.
    """
    jobs = jobs or default_jobs()
    instance, opt = build_instance(cfg.instance, cfg.base_dir)
    if cfg.opt == "exact" or (cfg.opt == "auto" and opt is None and instance.m <= 24):
        opt = exact_solve(instance).value
    elif cfg.opt not in ("auto", "exact", None):
        opt = rational_from_json(cfg.opt)
    if cfg.extend:
        instance = extend_closure(instance)
    budget = evaluate_budget(cfg.budget, **budget_params(instance))
    target = cfg.threshold * opt if (cfg.stop_at_threshold and opt is not None) else None
    label = instance.name
    cells = []
    for ai, algo in enumerate(cfg.algorithms):
        deterministic = algo["name"] in ("greedy", "gaww", "exact")
        for t in range(1 if deterministic else cfg.runs):
            cells.append((ai, (instance, label, algo, cfg.base_seed + t, budget, opt, target, cfg.timing)))

    rows: list[tuple[int, ResultRow]] = []
    aborted = None
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(ai, args, pool.submit(_cell, args)) for ai, args in cells]
            for ai, args, fut in futures:
                try:
                    rows.append((ai, fut.result()))
                except Exception as exc:  # noqa: BLE001 - recorded in the output
                    aborted = aborted or f"algorithm={args[2]['name']} seed={args[3]}: {exc!r}"
    else:
        for ai, args in cells:
            try:
                rows.append((ai, _cell(args)))
            except Exception as exc:  # noqa: BLE001 - recorded in the output
                aborted = f"algorithm={args[2]['name']} seed={args[3]}: {exc!r}"
                break
    rows.sort(key=lambda p: (p[0], p[1].seed))
    ordered = [r for _, r in rows]
    summary = summarize(ordered, cfg.threshold)
    result = ExperimentResult(ordered, summary, aborted)
    if write:
        out = Path(cfg.output)
        if not out.is_absolute():
            out = cfg.base_dir / out
        text = rows_to_csv(ordered)
        if aborted:
            text += f"# aborted: {aborted}\n"
        out.write_text(text)
        summary_path(out).write_text(summary_to_csv(summary))
    return result
