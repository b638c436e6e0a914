"""The classic price-based greedy heuristic for weighted set cover."""

from __future__ import annotations

from fractions import Fraction

from ..core import SetCoverInstance, Solution
from .trace import CoverResult, cost_record


def best_ratio_set(instance: SetCoverInstance, covered_mask: int) -> tuple[int, int, int]:
    """Index, scaled weight and new-element count of the cheapest set per new element.

    Ties go to the lowest index.  Returns ``(-1, 0, 0)`` when nothing is left to
    cover.
    """
    best, best_w, best_cnt = -1, 0, 0
    uncovered = ~covered_mask
    for i, (mask, w) in enumerate(zip(instance.masks, instance.int_weights)):
        cnt = (mask & uncovered).bit_count()
        if cnt == 0:
            continue
        if best < 0 or w * best_cnt < best_w * cnt:
            best, best_w, best_cnt = i, w, cnt
    return best, best_w, best_cnt


def greedy_solve(instance: SetCoverInstance) -> CoverResult:
    """Repeatedly add the set with the smallest weight per newly covered element.

    Newly covered elements are priced at that ratio, so the prices sum to the
    cost of the returned cover.
    """
    bits = 0
    covered_mask = 0
    prices: dict[int, Fraction] = {}
    trace = []
    step = 0
    while covered_mask != instance.full_mask:
        i, w, cnt = best_ratio_set(instance, covered_mask)
        price = Fraction(w, cnt * instance.scale)
        for e in instance.elements_of(instance.masks[i] & ~covered_mask):
            prices[e] = price
        covered_mask |= instance.masks[i]
        bits |= 1 << i
        step += 1
        trace.append(cost_record(instance, step, "greedy", "greedy", bits))
    return CoverResult(Solution(bits, instance.m), prices, trace)
