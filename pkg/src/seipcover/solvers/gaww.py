"""Greedy with withdrawals for k-bounded weighted set cover.

Each iteration compares the best greedy step against the best withdrawal:
drop one chosen set ``S`` and add a group ``Q`` of at most ``k`` unchosen sets,
scored by ``(w(Q) - w(S)) / |new elements covered by Q|``.  The withdrawal wins
only if its score is strictly below ``alpha * r_greedy``.

A withdrawal must keep every already covered element covered, i.e. ``Q`` has
to contain the elements that only ``S`` covers.  The withdrawal search is an
exact depth-first enumeration over groups in increasing index order, pruned by

* dropping sets that add neither a new element nor a still-needed element of a
  withdrawal candidate (such a set only raises the score), and
* a lower bound on the score of any extension, using that every unchosen set
  costs at least ``r_greedy`` per new element.

Ties are resolved on ``(score, |Q|, indices of Q, index of S)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import SetCoverInstance, Solution
from .greedy import best_ratio_set
from .trace import CoverResult, cost_record


class GawwBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class GawwConfig:
    alpha: Optional[Fraction] = None
    max_withdrawal_size: Optional[int] = None
    enumeration_budget: int = 5_000_000

    def resolve(self, instance: SetCoverInstance) -> tuple[Fraction, int]:
        k = instance.k
        alpha = self.alpha if self.alpha is not None else 1 - Fraction(1, k**3)
        alpha = Fraction(alpha)
        if not 0 <= alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")
        size = self.max_withdrawal_size if self.max_withdrawal_size is not None else k
        if size < 1:
            raise ValueError("max_withdrawal_size must be >= 1")
        return alpha, size


def _exclusive_parts(instance: SetCoverInstance, chosen: list[int]) -> dict[int, int]:
    out = {}
    for s in chosen:
        others = 0
        for t in chosen:
            if t != s:
                others |= instance.masks[t]
        out[s] = instance.masks[s] & ~others
    return out


def _best_withdrawal(instance, chosen, covered_mask, greedy_w, greedy_cnt, alpha, max_q, budget):
    """Return ``(score, Q, S)`` for the best withdrawal beating the threshold, or None."""
    masks, iw = instance.masks, instance.int_weights
    k_set = instance.k
    exclusive = _exclusive_parts(instance, chosen)
    needed = 0
    for d in exclusive.values():
        needed |= d
    uncovered = instance.full_mask & ~covered_mask
    relevant = uncovered | needed
    chosen_set = set(chosen)
    pool = [t for t in range(instance.m) if t not in chosen_set and masks[t] & relevant]
    # candidates for S: heaviest first, lowest index among equals
    by_weight = sorted(chosen, key=lambda s: (-iw[s], s))
    w_heaviest = iw[by_weight[0]]
    n_left = uncovered.bit_count()

    # scores are compared as exact fractions of scaled ints
    thr_num, thr_den = alpha.numerator * greedy_w, alpha.denominator * greedy_cnt
    best = None  # (Fraction score, len Q, Q, S)
    nodes = 0

    def beats_bound(num: int, den: int) -> bool:
        # True when num/den could still tie or beat the incumbent
        if best is None:
            return num * thr_den < thr_num * den
        score = best[0]
        return num * score.denominator <= score.numerator * instance.scale * den

    def visit(start: int, w_q: int, cov_q: int, q: tuple) -> None:
        nonlocal best, nodes
        for pos in range(start, len(pool)):
            t = pool[pos]
            if not masks[t] & relevant & ~cov_q:
                continue
            nodes += 1
            if nodes > budget:
                raise GawwBudgetError(
                    f"withdrawal enumeration exceeded {budget} nodes; "
                    "use an instance with smaller k or m, or raise enumeration_budget"
                )
            w2 = w_q + iw[t]
            cov2 = cov_q | masks[t]
            q2 = q + (t,)
            new = (cov2 & uncovered).bit_count()
            if new:
                for s in by_weight:
                    if not exclusive[s] & ~cov2:
                        if beats_bound(w2 - iw[s], new):
                            key = (Fraction(w2 - iw[s], new * instance.scale), len(q2), q2, s)
                            if best is None or key < best:
                                best = key
                        break
            slots = max_q - len(q2)
            if slots <= 0:
                continue
            lo = 0 if new else 1
            hi = min(slots * k_set, n_left - new)
            if hi < lo:
                continue
            # lower bound over extensions adding b more new elements
            base = (w2 - w_heaviest) * greedy_cnt
            for b in (lo, hi):
                if new + b == 0:
                    continue
                if beats_bound(base + greedy_w * b, greedy_cnt * (new + b)):
                    visit(pos + 1, w2, cov2, q2)
                    break

    visit(0, 0, 0, ())
    return best


def gaww_solve(instance: SetCoverInstance, cfg: Optional[GawwConfig] = None) -> CoverResult:
    cfg = cfg or GawwConfig()
    alpha, max_q = cfg.resolve(instance)
    masks = instance.masks
    chosen: list[int] = []
    covered_mask = 0
    prices: dict[int, Fraction] = {}
    trace = []
    step = 0
    while covered_mask != instance.full_mask:
        g, gw, gcnt = best_ratio_set(instance, covered_mask)
        wd = None
        if chosen:
            wd = _best_withdrawal(instance, chosen, covered_mask, gw, gcnt, alpha, max_q, cfg.enumeration_budget)
        step += 1
        if wd is None:
            price = Fraction(gw, gcnt * instance.scale)
            for e in instance.elements_of(masks[g] & ~covered_mask):
                prices[e] = price
            covered_mask |= masks[g]
            chosen.append(g)
            event = "greedy"
        else:
            score, _, q, s = wd
            added = 0
            for t in q:
                added |= masks[t]
            for e in instance.elements_of(added & ~covered_mask):
                prices[e] = score
            covered_mask |= added
            chosen.remove(s)
            chosen.extend(q)
            event = "withdraw"
        bits = 0
        for i in chosen:
            bits |= 1 << i
        trace.append(cost_record(instance, step, "gaww", event, bits))
    return CoverResult(Solution(bits, instance.m), prices, trace)


def partial_cover_disjoint(instance: SetCoverInstance, trace) -> list[bool]:
    """Per trace step, whether the chosen sets are pairwise disjoint (diagnostic only)."""
    out = []
    for rec in trace:
        seen = 0
        ok = True
        for i in Solution(rec.bits, instance.m).indices():
            if seen & instance.masks[i]:
                ok = False
                break
            seen |= instance.masks[i]
        out.append(ok)
    return out
