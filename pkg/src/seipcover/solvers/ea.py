"""Evolutionary solvers: (1+1)-EA, SEMO and SEIP (LSEIP / GSEIP).

All three share one loop shape.  A *step* is one mutation plus one evaluation,
and ``EaConfig.budget`` counts steps.  Randomness comes only from the
configured seed, so a run is a pure function of ``(instance, config)``.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import (
    FEASIBILITY,
    IsolationFunction,
    SetCoverInstance,
    Solution,
    flip_each,
    flip_one,
)
from ..rng import Rng
from .trace import RunResult, TraceRecord, member_hash

MUTATIONS = ("one-bit", "bit-wise")


@dataclass(frozen=True)
class EaConfig:
    """Run settings.

    ``target_cost`` stops a run as soon as the best feasible cost drops to or
    below it.  SEIP, SEMO and the penalty-mode (1+1)-EA never lose their best
    feasible cost, so for "does the run reach cost <= target within the
    budget" the early stop gives the same answer as running to the end.
    """

    mutation: str = "one-bit"
    budget: int = 1000
    seed: int = 0
    acceptance: str = "penalty"
    initialization: str = "empty"
    record_trace: bool = False
    target_cost: Optional[Fraction] = None

    def __post_init__(self):
        if self.mutation not in MUTATIONS:
            raise ValueError(f"mutation must be one of {MUTATIONS}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.acceptance not in ("literal", "penalty"):
            raise ValueError("acceptance must be 'literal' or 'penalty'")
        if self.initialization not in ("empty", "random"):
            raise ValueError("initialization must be 'empty' or 'random'")


def _mutator(cfg: EaConfig):
    return flip_one if cfg.mutation == "one-bit" else flip_each


def _target_int(instance: SetCoverInstance, cfg: EaConfig) -> Optional[Fraction]:
    if cfg.target_cost is None:
        return None
    # compare scaled int costs against target * scale
    return Fraction(cfg.target_cost) * instance.scale


def _delta(instance: SetCoverInstance, old: int, new: int, old_cost: int) -> int:
    ws = instance.int_weights
    diff = old ^ new
    c = old_cost
    while diff:
        low = diff & -diff
        i = low.bit_length() - 1
        c += ws[i] if new & low else -ws[i]
        diff ^= low
    return c


def superior(x: Solution, y: Solution, instance: SetCoverInstance, iso: IsolationFunction) -> bool:
    """True when x and y share an isolation and x is cheaper, or equal cost with fewer sets."""
    cx = iso.cardinality_of_mask(instance, instance.cover_mask(x.bits))
    cy = iso.cardinality_of_mask(instance, instance.cover_mask(y.bits))
    if cx != cy:
        return False
    fx, fy = instance.int_cost(x.bits), instance.int_cost(y.bits)
    return fx < fy or (fx == fy and len(x) < len(y))


def dominates(a: tuple, b: tuple) -> bool:
    """SEMO's three-rule dominance on ``(cost, uncovered, size)`` triples."""
    f1a, f2a, sa = a
    f1b, f2b, sb = b
    return (
        (f1a < f1b and f2a <= f2b)
        or (f1a <= f1b and f2a < f2b)
        or (f1a == f1b and f2a == f2b and sa < sb)
    )


def objectives(instance: SetCoverInstance, x: Solution) -> tuple[Fraction, int, int]:
    cover = instance.cover_mask(x.bits)
    return cost_of(instance, x), instance.n - cover.bit_count(), len(x)


def cost_of(instance: SetCoverInstance, x: Solution) -> Fraction:
    return instance.from_int_cost(instance.int_cost(x.bits))


def dominate(x: Solution, y: Solution, instance: SetCoverInstance) -> bool:
    return dominates(objectives(instance, x), objectives(instance, y))


# -- SEIP -------------------------------------------------------------------

def seip_name(cfg: EaConfig) -> str:
    return "lseip" if cfg.mutation == "one-bit" else "gseip"


def seip_run(instance: SetCoverInstance, iso: IsolationFunction, cfg: EaConfig) -> RunResult:
    """SEIP from the empty solution.

    The population keeps one resident per isolation cardinality.  An offspring
    enters unless the resident of its cardinality is superior to it; when
    neither is superior the offspring replaces the resident, which keeps the
    population at one member per cardinality.
    """
    if iso.kind == FEASIBILITY and iso.q != 1:
        raise ValueError("feasibility isolation has q == 1")
    if iso.kind != FEASIBILITY and iso.q != instance.n:
        raise ValueError("covered-elements isolation needs q == n")
    rng = Rng(cfg.seed)
    mutate = _mutator(cfg)
    name = seip_name(cfg)
    m, q, full = instance.m, iso.q, instance.full_mask
    masks = instance.masks
    by_cover = iso.kind != FEASIBILITY
    target = _target_int(instance, cfg)
    tracing = cfg.record_trace

    # cardinality -> [bits, scaled cost, size, cover mask]
    pop = {0: [0, 0, 0, 0]}
    cards = [0]
    trace: list[TraceRecord] = []
    digest = member_hash(0, 0)
    if tracing:
        trace.append(TraceRecord(0, name, "init", 0, Fraction(0), 0, None, format(digest, "016x")))

    steps = 0
    for steps in range(1, cfg.budget + 1):
        pcard = cards[rng.below(len(cards))]
        parent = pop[pcard]
        pbits = parent[0]
        child = mutate(pbits, m, rng)
        ccost = _delta(instance, pbits, child, parent[1])
        if child & ~pbits == child ^ pbits:
            # only additions: extend the parent's cover
            cover = parent[3]
            added = child & ~pbits
            i = 0
            while added:
                if added & 1:
                    cover |= masks[i]
                added >>= 1
                i += 1
        else:
            cover = instance.cover_mask(child)
        if by_cover:
            ccard = cover.bit_count()
        else:
            ccard = 1 if cover == full else 0
        csize = child.bit_count()
        res = pop.get(ccard)
        if res is None:
            pop[ccard] = [child, ccost, csize, cover]
            insort(cards, ccard)
            accepted = True
            if tracing:
                digest ^= member_hash(ccard, child)
        elif res[1] < ccost or (res[1] == ccost and res[2] < csize):
            accepted = False
        else:
            if tracing:
                digest ^= member_hash(ccard, res[0]) ^ member_hash(ccard, child)
            res[0], res[1], res[2], res[3] = child, ccost, csize, cover
            accepted = True
        if tracing:
            trace.append(
                TraceRecord(
                    steps,
                    name,
                    "accept" if accepted else "reject",
                    ccard,
                    instance.from_int_cost(ccost),
                    child,
                    pcard,
                    format(digest, "016x"),
                )
            )
        if target is not None and accepted and ccard == q and ccost <= target:
            break

    best = pop.get(q)
    return RunResult(
        algorithm=name,
        seed=cfg.seed,
        steps_used=steps,
        best_feasible=Solution(best[0], m) if best else None,
        best_cost=instance.from_int_cost(best[1]) if best else None,
        population=[(c, Solution(pop[c][0], m)) for c in cards],
        trace=trace,
    )


def replay_population(trace: list[TraceRecord]) -> dict[int, int]:
    """Rebuild a SEIP population ``{cardinality: bits}`` from its trace."""
    pop: dict[int, int] = {}
    for rec in trace:
        if rec.event in ("init", "accept"):
            pop[rec.cardinality] = rec.bits
    return pop


# -- (1+1)-EA ---------------------------------------------------------------

def opo_ea_run(instance: SetCoverInstance, cfg: EaConfig) -> RunResult:
    """Single-parent elitist EA.

    ``literal`` accepts an offspring only if it is feasible and no more
    expensive than the parent.  ``penalty`` minimises
    ``cost + M * uncovered`` with ``M = total weight + max weight``, which makes
    coverage strictly dominant over cost, and accepts ties.
    """
    rng = Rng(cfg.seed)
    mutate = _mutator(cfg)
    m, n, full = instance.m, instance.n, instance.full_mask
    target = _target_int(instance, cfg)
    penalty = sum(instance.int_weights) + max(instance.int_weights)

    if cfg.initialization == "random":
        x = 0
        for i in range(m):
            if rng.below(2):
                x |= 1 << i
    else:
        x = 0
    xcost = instance.int_cost(x)
    xcover = instance.cover_mask(x)
    xunc = n - xcover.bit_count()
    literal = cfg.acceptance == "literal"

    def g(c: int, unc: int) -> int:
        return c + penalty * unc

    trace: list[TraceRecord] = []
    if cfg.record_trace:
        trace.append(TraceRecord(0, "opo-ea", "init", n - xunc, instance.from_int_cost(xcost), x))
    steps = 0
    for steps in range(1, cfg.budget + 1):
        child = mutate(x, m, rng)
        ccost = _delta(instance, x, child, xcost)
        ccover = instance.cover_mask(child)
        cunc = n - ccover.bit_count()
        if literal:
            ok = ccover == full and ccost <= xcost
        else:
            ok = g(ccost, cunc) <= g(xcost, xunc)
        if ok:
            x, xcost, xunc = child, ccost, cunc
        if cfg.record_trace:
            trace.append(
                TraceRecord(steps, "opo-ea", "accept" if ok else "reject", n - cunc,
                            instance.from_int_cost(ccost), child)
            )
        if target is not None and ok and xunc == 0 and xcost <= target:
            break

    feasible = xunc == 0
    return RunResult(
        algorithm="opo-ea",
        seed=cfg.seed,
        steps_used=steps,
        best_feasible=Solution(x, m) if feasible else None,
        best_cost=instance.from_int_cost(xcost) if feasible else None,
        population=[(n - xunc, Solution(x, m))],
        trace=trace,
    )


def penalized_fitness(instance: SetCoverInstance, x: Solution) -> Fraction:
    """The ``penalty``-mode fitness, as an exact rational."""
    penalty = instance.total_weight + instance.w_max
    unc = instance.n - instance.cover_mask(x.bits).bit_count()
    return cost_of(instance, x) + penalty * unc


# -- SEMO -------------------------------------------------------------------

def semo_run(instance: SetCoverInstance, cfg: EaConfig) -> RunResult:
    """SEMO on (cost, uncovered elements), starting from the empty solution.

    Dominance uses the three literal rules, so two different solutions with
    identical cost, coverage and size both stay in the archive.
    """
    rng = Rng(cfg.seed)
    mutate = _mutator(cfg)
    m, n = instance.m, instance.n
    target = _target_int(instance, cfg)
    # entries: [bits, cost, uncovered, size]
    archive = [[0, 0, n, 0]]
    trace: list[TraceRecord] = []
    if cfg.record_trace:
        trace.append(TraceRecord(0, "semo", "init", 0, Fraction(0), 0))
    steps = 0
    for steps in range(1, cfg.budget + 1):
        parent = archive[rng.below(len(archive))]
        child = mutate(parent[0], m, rng)
        ccost = _delta(instance, parent[0], child, parent[1])
        cunc = n - instance.cover_mask(child).bit_count()
        cobj = (ccost, cunc, child.bit_count())
        accepted = not any(dominates((a[1], a[2], a[3]), cobj) for a in archive)
        if accepted:
            archive = [a for a in archive if not dominates(cobj, (a[1], a[2], a[3]))]
            if all(a[0] != child for a in archive):
                archive.append([child, ccost, cunc, cobj[2]])
        if cfg.record_trace:
            trace.append(
                TraceRecord(steps, "semo", "accept" if accepted else "reject", n - cunc,
                            instance.from_int_cost(ccost), child, n - parent[2])
            )
        if target is not None and accepted and cunc == 0 and ccost <= target:
            break

    feasible = [a for a in archive if a[2] == 0]
    best = min(feasible, key=lambda a: (a[1], a[3], a[0])) if feasible else None
    return RunResult(
        algorithm="semo",
        seed=cfg.seed,
        steps_used=steps,
        best_feasible=Solution(best[0], m) if best else None,
        best_cost=instance.from_int_cost(best[1]) if best else None,
        population=[(n - a[2], Solution(a[0], m)) for a in archive],
        trace=trace,
    )
