"""Instance families: the greedy-hard family, random k-bounded covers and planted optima."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .core import SetCoverInstance, as_rational, harmonic
from .rng import Rng


@dataclass(frozen=True)
class KnownOptimum:
    """A disjoint optimal cover by k-sets, with its column bookkeeping."""

    sets: tuple[tuple[int, ...], ...]
    set_indices: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        seen: set[int] = set()
        sizes = {len(s) for s in self.sets}
        if len(sizes) != 1:
            raise ValueError("optimal sets must all have the same size k")
        for s in self.sets:
            if seen & set(s):
                raise ValueError("optimal sets must be pairwise disjoint")
            seen |= set(s)
        if any(w <= 0 for w in self.weights):
            raise ValueError("optimal set weights must be positive")

    @property
    def value(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def k(self) -> int:
        return len(self.sets[0])

    @property
    def column_of(self) -> dict[int, int]:
        return {e: i for i, s in enumerate(self.sets) for e in s}

    @property
    def weight_of_column(self) -> dict[int, Fraction]:
        return {e: self.weights[i] for i, s in enumerate(self.sets) for e in s}

    def check_against(self, instance: SetCoverInstance) -> None:
        covered = set()
        for s, idx, w in zip(self.sets, self.set_indices, self.weights):
            if instance.sets[idx] != tuple(s) or instance.weights[idx] != w:
                raise ValueError(f"optimal set {idx} does not match the instance")
            covered |= set(s)
        if covered != set(range(1, instance.n + 1)):
            raise ValueError("optimal sets do not cover the universe")


@dataclass(frozen=True)
class ProblemISpec:
    k: int
    L: int
    epsilon: Fraction

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("problem I needs k >= 2")
        if self.L < 1:
            raise ValueError("problem I needs L >= 1")
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def n(self) -> int:
        return self.k * self.L

    @property
    def m(self) -> int:
        return self.L * (self.k + 1)


def gen_problem_i(spec: ProblemISpec) -> tuple[SetCoverInstance, KnownOptimum]:
    """L disjoint k-sets at weight 1+eps, plus one singleton per element.

    Column ``i`` holds elements ``i*k+1 .. i*k+k`` in ascending order and the
    singleton of its j-th element weighs 1/j.  Sets are ordered: the L big
    sets, then the singletons column by column.
    """
    k, L, eps = spec.k, spec.L, spec.epsilon
    if eps >= harmonic(k) - 1:
        warnings.warn(
            f"epsilon={eps} >= H_k - 1 = {harmonic(k) - 1}: the big sets are no longer the optimum",
            stacklevel=2,
        )
    columns = [tuple(range(i * k + 1, i * k + k + 1)) for i in range(L)]
    sets = list(columns)
    weights = [1 + eps] * L
    for col in columns:
        for j, e in enumerate(col, start=1):
            sets.append((e,))
            weights.append(Fraction(1, j))
    inst = SetCoverInstance.from_sets(k * L, sets, weights, name=f"problem-i-k{k}-L{L}-eps{eps}")
    opt = KnownOptimum(tuple(columns), tuple(range(L)), tuple([1 + eps] * L))
    return inst, opt


@dataclass(frozen=True)
class RandomSpec:
    n: int
    m: int
    k: int
    seed: int
    weight_range: tuple = (Fraction(1), Fraction(10))

    def __post_init__(self):
        lo, hi = (as_rational(v) for v in self.weight_range)
        object.__setattr__(self, "weight_range", (lo, hi))
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if self.m < math.ceil(self.n / self.k):
            raise ValueError(f"m={self.m} sets of size <= {self.k} cannot cover n={self.n}")
        if not 0 < lo <= hi:
            raise ValueError("weight range must satisfy 0 < lo <= hi")
        if math.ceil(lo * 1000) > math.floor(hi * 1000):
            raise ValueError("weight range contains no multiple of 1/1000")


def _random_weight(rng: Rng, lo: Fraction, hi: Fraction) -> Fraction:
    a, b = math.ceil(lo * 1000), math.floor(hi * 1000)
    return Fraction(a + rng.below(b - a + 1), 1000)


def gen_random_k_cover(spec: RandomSpec) -> SetCoverInstance:
    """Random coverable instance with every set of size at most k.

    A shuffled partition of ``[n]`` into ``ceil(n/k)`` blocks guarantees
    coverability; the remaining sets are uniform random subsets of uniform
    random size in ``1..k``.  The collection order is shuffled at the end and
    weights are multiples of 1/1000 drawn uniformly in the range.
    """
    rng = Rng(spec.seed)
    n, k = spec.n, spec.k
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    sets = [tuple(sorted(perm[i:i + k])) for i in range(0, n, k)]
    while len(sets) < spec.m:
        size = 1 + rng.below(min(k, n))
        sets.append(tuple(sorted(rng.sample(range(1, n + 1), size))))
    rng.shuffle(sets)
    lo, hi = spec.weight_range
    weights = [_random_weight(rng, lo, hi) for _ in sets]
    return SetCoverInstance.from_sets(n, sets, weights, name=f"random-n{n}-m{spec.m}-k{k}-s{spec.seed}")


def gen_known_opt(k: int, L: int, extra: int, seed: int, verify_limit: int = 24,
                  max_retries: int = 8) -> tuple[SetCoverInstance, KnownOptimum]:
    """Plant L disjoint k-sets as the unique optimum among ``extra`` distractors.

    Planted weights lie in [1, 2]; every distractor weighs more than
    ``k * max planted weight``, so swapping a distractor for the planted sets it
    touches never costs more.  Instances with at most ``verify_limit`` sets are
    checked with the exact solver; a failed check retries with a derived seed.
    """
    if k < 1 or L < 1 or extra < 0:
        raise ValueError("need k >= 1, L >= 1, extra >= 0")
    from .analysis import exact_solve

    n = k * L
    for attempt in range(max_retries):
        rng = Rng(seed) if attempt == 0 else Rng(seed).spawn(attempt)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        planted = [tuple(sorted(perm[i * k:(i + 1) * k])) for i in range(L)]
        pw = [_random_weight(rng, Fraction(1), Fraction(2)) for _ in planted]
        floor_w = k * max(pw)
        distractors = []
        for _ in range(extra):
            size = 1 + rng.below(k)
            elems = tuple(sorted(rng.sample(range(1, n + 1), size)))
            distractors.append((elems, floor_w + _random_weight(rng, Fraction(1, 1000), Fraction(1))))
        entries = [(s, w, True) for s, w in zip(planted, pw)] + [(s, w, False) for s, w in distractors]
        rng.shuffle(entries)
        inst = SetCoverInstance.from_sets(
            n, [e[0] for e in entries], [e[1] for e in entries], name=f"planted-k{k}-L{L}-x{extra}-s{seed}"
        )
        idx = [i for i, e in enumerate(entries) if e[2]]
        idx.sort(key=lambda i: entries[i][0])
        opt = KnownOptimum(
            tuple(entries[i][0] for i in idx), tuple(idx), tuple(entries[i][1] for i in idx)
        )
        if inst.m > verify_limit or exact_solve(inst).value == opt.value:
            return inst, opt
    raise RuntimeError(f"planted optimum failed verification after {max_retries} attempts")


def random_corpus(count: int = 200, seed: int = 20240601, n_max: int = 20, k_max: int = 4,
                  m_max: int = 16) -> list[SetCoverInstance]:
    """A reproducible batch of small random k-covers for ratio checks.

    Instance ``i`` draws k in ``2..k_max``, n in ``k..n_max`` and m between
    the partition size ``ceil(n/k)`` and ``m_max`` from ``Rng(seed).spawn(i)``.
    """
    out = []
    for i in range(count):
        rng = Rng(seed).spawn(i)
        k = 2 + rng.below(k_max - 1)
        n = k + rng.below(n_max - k + 1)
        lo_m = math.ceil(n / k)
        m = lo_m + rng.below(m_max - lo_m + 1)
        out.append(gen_random_k_cover(RandomSpec(n, m, k, rng.next_u64() >> 1)))
    return out
