"""Exact optimum, approximation and partial ratios, path certificates, price audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import NamedTuple, Optional, Sequence

from .core import IsolationFunction, SetCoverInstance, Solution, cost, isolation
from .generators import KnownOptimum

DEFAULT_ORACLE_LIMIT = 24


class OracleLimitError(ValueError):
    """The instance is too large for exhaustive search."""


class ExactResult(NamedTuple):
    value: Fraction
    solution: Solution


def exact_solve(instance: SetCoverInstance, limit: int = DEFAULT_ORACLE_LIMIT) -> ExactResult:
    """Minimum-cost cover by depth-first include/exclude search.

    Sets are decided in index order with "exclude" explored first, so among
    equally cheap covers the lexicographically smallest bit vector
    ``(x_1, ..., x_m)`` is the one returned.  Branches are cut when the
    remaining sets cannot finish the cover, when a set would add nothing, or
    when cost plus a per-element lower bound reaches the incumbent.
    """
    m, n = instance.m, instance.n
    if m > limit:
        raise OracleLimitError(f"exact search refuses m={m} > limit {limit}")
    masks = instance.masks
    full = instance.full_mask
    lcm_k = reduce(lambda a, b: a * b // math.gcd(a, b), range(1, instance.k + 1), 1)
    w = [iw * lcm_k for iw in instance.int_weights]
    per_elem = [iw * (lcm_k // len(s)) for iw, s in zip(instance.int_weights, instance.sets)]

    suffix_union = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | masks[i]
    # cheapest per-element share among sets j >= i, for every element
    inf = float("inf")
    min_share = [[inf] * n for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        row = list(min_share[i + 1])
        for e in instance.sets[i]:
            if per_elem[i] < row[e - 1]:
                row[e - 1] = per_elem[i]
        min_share[i] = row

    best_cost = inf
    best_bits = -1

    def bound(i: int, cov: int) -> float:
        row = min_share[i]
        unc = full & ~cov
        total = 0
        e = 0
        while unc:
            if unc & 1:
                total += row[e]
            unc >>= 1
            e += 1
        return total

    def dfs(i: int, cov: int, c: int, bits: int) -> None:
        nonlocal best_cost, best_bits
        if cov == full:
            if c < best_cost:
                best_cost, best_bits = c, bits
            return
        if i == m or cov | suffix_union[i] != full:
            return
        if c + bound(i, cov) >= best_cost:
            return
        dfs(i + 1, cov, c, bits)
        if masks[i] & ~cov:
            dfs(i + 1, cov | masks[i], c + w[i], bits | (1 << i))

    dfs(0, 0, 0, 0)
    return ExactResult(Fraction(int(best_cost), instance.scale * lcm_k), Solution(best_bits, m))


def approximation_ratio(cost_value: Fraction, opt: Fraction) -> Fraction:
    opt = Fraction(opt)
    if opt <= 0:
        raise ValueError("optimum must be positive")
    return Fraction(cost_value) / opt


# -- partial ratios ---------------------------------------------------------

@dataclass(frozen=True)
class PartialReference:
    """Reference value per isolation cardinality ``0..q``; the last entry is OPT."""

    q: int
    opt_value: Fraction
    profile: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.profile) != self.q + 1:
            raise ValueError("profile needs q+1 entries")
        if self.profile[-1] != self.opt_value:
            raise ValueError("reference at full cardinality must equal OPT")
        if self.profile[0] != 0:
            raise ValueError("reference at cardinality 0 must be 0")
        if any(a > b for a, b in zip(self.profile, self.profile[1:])):
            raise ValueError("reference profile must be non-decreasing")

    def __call__(self, cardinality: int) -> Fraction:
        return self.profile[cardinality]


def make_linear_reference(q: int, opt: Fraction) -> PartialReference:
    if q < 1:
        raise ValueError("q must be positive")
    opt = Fraction(opt)
    if opt <= 0:
        raise ValueError("optimum must be positive")
    return PartialReference(q, opt, tuple(opt * j / q for j in range(q + 1)))


def make_price_reference(instance: SetCoverInstance, optimum: Solution) -> PartialReference:
    """Reference built from an optimal cover (diagnostic, tiny instances).

    Each element is charged to the first optimal set containing it, at that
    set's weight split evenly over the elements charged to it; ``L(j)`` is the
    sum of the j cheapest charges.
    """
    owner: dict[int, int] = {}
    for i in optimum.indices():
        for e in instance.sets[i]:
            owner.setdefault(e, i)
    if len(owner) != instance.n:
        raise ValueError("optimum does not cover the universe")
    counts: dict[int, int] = {}
    for i in owner.values():
        counts[i] = counts.get(i, 0) + 1
    charges = sorted(instance.weights[owner[e]] / counts[owner[e]] for e in owner)
    profile = [Fraction(0)]
    for c in charges:
        profile.append(profile[-1] + c)
    return PartialReference(instance.n, profile[-1], tuple(profile))


def partial_ratio(instance: SetCoverInstance, x: Solution, ref: PartialReference,
                  iso: IsolationFunction) -> Fraction:
    """``cost(x) / L(|mu(x)|)``; the empty solution scores 0 by convention.

    Raises ValueError for a nonempty solution whose reference value is 0.
    """
    if x.bits == 0:
        return Fraction(0)
    denom = ref(len(isolation(instance, iso, x)))
    if denom == 0:
        raise ValueError("partial ratio undefined: reference value is 0")
    return cost(instance, x) / denom


def conditional_partial_ratio(instance: SetCoverInstance, x: Solution, y: Solution,
                              ref: PartialReference, iso: IsolationFunction) -> Fraction:
    """Partial ratio of y given x: extra cost over extra reference value."""
    z = x | y
    denom = ref(len(isolation(instance, iso, z))) - ref(len(isolation(instance, iso, x)))
    if denom <= 0:
        raise ValueError("conditional partial ratio undefined: y adds no isolation progress")
    return (cost(instance, z) - cost(instance, x)) / denom


# -- non-negligible path certificates --------------------------------------

@dataclass(frozen=True)
class PathStep:
    y_plus: Solution
    y_minus: Solution

    @property
    def size(self) -> int:
        return len(self.y_plus) + len(self.y_minus)


@dataclass(frozen=True)
class PathCertificate:
    """Jumps from the empty solution, one ratio per jump."""

    steps: tuple[PathStep, ...]
    gap: int
    ratios: tuple[Fraction, ...]
    opt_value: Fraction

    @property
    def bound(self) -> Fraction:
        return sum(self.ratios, Fraction(0))


@dataclass
class CertificateReport:
    valid: bool
    bound: Fraction
    condition: Optional[str] = None
    step: Optional[int] = None
    message: str = ""
    final: Optional[Solution] = None
    final_cost: Optional[Fraction] = None
    final_ratio: Optional[Fraction] = None


def check_path_certificate(instance: SetCoverInstance, cert: PathCertificate,
                           iso: IsolationFunction) -> CertificateReport:
    """Replay a certificate from the empty solution and check every jump.

    For each jump: (1) it flips between 1 and ``gap`` bits, (2) its extra cost
    is at most ``ratio * OPT``, (3) it strictly raises the isolation
    cardinality while that is below q.  The walk must end feasible.  On
    success the report carries the implied bound (sum of ratios) and the
    achieved ratio, which never exceeds it.
    """
    bound = cert.bound
    if not cert.steps:
        return CertificateReport(False, bound, "structure", None, "certificate has no steps")
    if len(cert.ratios) != len(cert.steps):
        return CertificateReport(False, bound, "structure", None, "one ratio per step is required")
    if cert.opt_value <= 0:
        return CertificateReport(False, bound, "structure", None, "opt_value must be positive")
    q = iso.q
    x = instance.empty()
    for t, (step, r) in enumerate(zip(cert.steps, cert.ratios)):
        if step.y_plus.m != instance.m or step.y_minus.m != instance.m:
            return CertificateReport(False, bound, "structure", t, "step not bound to this instance")
        if not step.y_minus.issubset(x):
            return CertificateReport(False, bound, "structure", t, "y_minus is not part of the current solution")
        if not 1 <= step.size <= cert.gap:
            return CertificateReport(False, bound, "1", t, f"jump flips {step.size} bits, allowed 1..{cert.gap}")
        nxt = (x | step.y_plus) - step.y_minus
        extra = cost(instance, nxt) - cost(instance, x)
        if extra > r * cert.opt_value:
            return CertificateReport(False, bound, "2", t, f"extra cost {extra} exceeds {r} * OPT")
        before = len(isolation(instance, iso, x))
        after = len(isolation(instance, iso, nxt))
        if before < q and after <= before:
            return CertificateReport(False, bound, "3", t, f"isolation cardinality {before} -> {after}")
        x = nxt
    if len(isolation(instance, iso, x)) != q:
        return CertificateReport(False, bound, "incomplete", len(cert.steps) - 1, "path ends infeasible")
    final_cost = cost(instance, x)
    ratio = final_cost / cert.opt_value
    if ratio > bound:
        return CertificateReport(False, bound, "soundness", None, "achieved ratio exceeds the implied bound",
                                 x, final_cost, ratio)
    return CertificateReport(True, bound, None, None, "ok", x, final_cost, ratio)


def certificate_from_trace(instance: SetCoverInstance, trace: Sequence, opt_value: Fraction,
                           gap: Optional[int] = None) -> PathCertificate:
    """Turn a constructive trace (greedy or GAWW) into a path certificate.

    Each trace step becomes one jump: sets that appear go to ``y_plus``, sets
    that disappear to ``y_minus``, and its ratio is the step's extra cost over
    OPT.  The gap defaults to the largest jump.
    """
    opt_value = Fraction(opt_value)
    prev = 0
    steps, ratios = [], []
    for rec in trace:
        plus = Solution(rec.bits & ~prev, instance.m)
        minus = Solution(prev & ~rec.bits, instance.m)
        extra = instance.from_int_cost(instance.int_cost(rec.bits) - instance.int_cost(prev))
        steps.append(PathStep(plus, minus))
        ratios.append(extra / opt_value)
        prev = rec.bits
    if gap is None:
        gap = max((s.size for s in steps), default=1)
    return PathCertificate(tuple(steps), gap, tuple(ratios), opt_value)


# -- price audit ------------------------------------------------------------

def prices_from_trace(instance: SetCoverInstance, trace: Sequence) -> dict[int, Fraction]:
    """Recover element prices: each step's extra cost split over its new elements."""
    prices: dict[int, Fraction] = {}
    prev = 0
    prev_cov = 0
    for rec in trace:
        cov = instance.cover_mask(rec.bits)
        new = cov & ~prev_cov
        if new:
            extra = instance.int_cost(rec.bits) - instance.int_cost(prev)
            p = Fraction(extra, new.bit_count() * instance.scale)
            for e in instance.elements_of(new):
                prices[e] = p
        prev, prev_cov = rec.bits, cov
    return prices


@dataclass
class AuditRow:
    element: int
    step: int
    price: Fraction
    uncovered_in_column: int  # N(e): other uncovered elements of e's optimal set
    bound: Fraction
    status: str  # "pass", "fail" or "unaudited"


@dataclass
class PriceAuditReport:
    rows: list = field(default_factory=list)
    total_price: Fraction = Fraction(0)
    solution_cost: Fraction = Fraction(0)
    errors: list = field(default_factory=list)

    @property
    def identity_holds(self) -> bool:
        return self.total_price == self.solution_cost

    @property
    def passed(self) -> bool:
        return (not self.errors and self.identity_holds
                and all(r.status != "fail" for r in self.rows))

    @property
    def n(self) -> dict[int, int]:
        return {r.element: r.uncovered_in_column for r in self.rows}


def price_audit(instance: SetCoverInstance, prices: dict, trace: Sequence,
                known: KnownOptimum) -> PriceAuditReport:
    """Check each greedy-priced element against its optimal set's per-element cost.

    For an element e first covered at a greedy step, with ``N(e)`` the number
    of other still-uncovered elements of the optimal set containing e, the
    check is ``price(e) <= w*(e) / (N(e) + 1)``.  Elements covered by a
    withdrawal step are listed as unaudited.
    """
    known.check_against(instance)
    column_of, w_col = known.column_of, known.weight_of_column
    col_masks = [instance.element_mask(s) for s in known.sets]
    report = PriceAuditReport()
    prev, prev_cov = 0, 0
    seen: set[int] = set()
    for rec in trace:
        cov = instance.cover_mask(rec.bits)
        if prev_cov & ~cov:
            report.errors.append(f"step {rec.step}: previously covered elements were lost")
        new = cov & ~prev_cov
        extra = instance.int_cost(rec.bits) - instance.int_cost(prev)
        step_price = Fraction(extra, new.bit_count() * instance.scale) if new else None
        for e in sorted(instance.elements_of(new)):
            seen.add(e)
            if e not in prices:
                report.errors.append(f"element {e} covered at step {rec.step} but has no price")
                continue
            p = Fraction(prices[e])
            if p != step_price:
                report.errors.append(f"element {e}: price {p} disagrees with trace step price {step_price}")
            col = column_of[e]
            n_other = (col_masks[col] & ~prev_cov).bit_count() - 1
            bound = w_col[e] / (n_other + 1)
            if rec.event == "withdraw":
                status = "unaudited"
            else:
                status = "pass" if p <= bound else "fail"
            report.rows.append(AuditRow(e, rec.step, p, n_other, bound, status))
        prev, prev_cov = rec.bits, cov
    extra_priced = set(prices) - seen
    if extra_priced:
        report.errors.append(f"priced elements never covered in trace: {sorted(extra_priced)}")
    if prev_cov != instance.full_mask:
        report.errors.append("trace does not end in a cover")
    report.total_price = sum((Fraction(p) for p in prices.values()), Fraction(0))
    report.solution_cost = instance.from_int_cost(instance.int_cost(prev))
    return report
