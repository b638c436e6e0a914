"""Weighted set cover instances, bit-vector solutions and the operators on them.

Weights are :class:`fractions.Fraction` throughout.  Internally each instance
also carries its weights scaled to integers by the lcm of their denominators,
so the hot loops of the evolutionary solvers compare plain ints while every
value that leaves the package is an exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

from .rng import Rng

__all__ = [
    "Rational",
    "SetCoverInstance",
    "Solution",
    "IsolationFunction",
    "COVERED_ELEMENTS",
    "FEASIBILITY",
    "BindingError",
    "ClosureBudgetError",
    "as_rational",
    "cost",
    "covered",
    "is_feasible",
    "isolation",
    "one_bit_mutation",
    "bitwise_mutation",
    "extend_closure",
    "harmonic",
]

Rational = Fraction


class BindingError(ValueError):
    """A solution was used with an instance of a different size."""


class ClosureBudgetError(ValueError):
    """Subset closure would create more sets than the configured budget."""


def as_rational(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into an exact rational.

    Floats are refused: they would silently carry binary rounding into the
    weights.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def _popcount(x: int) -> int:
    return x.bit_count()


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe ``[1..n]`` and an ordered, weighted collection of subsets."""

    n: int
    sets: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]
    name: str = "instance"
    # derived fields, filled in __post_init__
    masks: tuple[int, ...] = field(init=False, repr=False, compare=False)
    scale: int = field(init=False, repr=False, compare=False)
    int_weights: tuple[int, ...] = field(init=False, repr=False, compare=False)
    full_mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("universe size n must be a positive integer")
        if len(self.sets) != len(self.weights):
            raise ValueError("sets and weights differ in length")
        if not self.sets:
            raise ValueError("collection is empty")
        norm_sets = []
        masks = []
        for idx, elems in enumerate(self.sets):
            elems = tuple(sorted(set(int(e) for e in elems)))
            if not elems:
                raise ValueError(f"set {idx} is empty")
            if elems[0] < 1 or elems[-1] > self.n:
                raise ValueError(f"set {idx} has an element outside [1, {self.n}]")
            norm_sets.append(elems)
            masks.append(reduce(lambda acc, e: acc | (1 << (e - 1)), elems, 0))
        weights = tuple(as_rational(w) for w in self.weights)
        for idx, w in enumerate(weights):
            if w <= 0:
                raise ValueError(f"set {idx} has non-positive weight {w}")
        full = (1 << self.n) - 1
        if reduce(lambda a, b: a | b, masks, 0) != full:
            raise ValueError("instance is not coverable: union of sets != universe")
        scale = reduce(lambda a, b: a * b // math.gcd(a, b), (w.denominator for w in weights), 1)
        object.__setattr__(self, "sets", tuple(norm_sets))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "masks", tuple(masks))
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "int_weights", tuple(int(w * scale) for w in weights))
        object.__setattr__(self, "full_mask", full)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]], weights: Iterable, name: str = "instance"):
        return cls(n, tuple(tuple(s) for s in sets), tuple(as_rational(w) for w in weights), name)

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def k(self) -> int:
        """Largest set cardinality."""
        return max(len(s) for s in self.sets)

    @property
    def w_max(self) -> Fraction:
        return max(self.weights)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def element_mask(self, elements: Iterable[int]) -> int:
        return reduce(lambda acc, e: acc | (1 << (e - 1)), elements, 0)

    def elements_of(self, mask: int) -> frozenset[int]:
        out = []
        e = 1
        while mask:
            if mask & 1:
                out.append(e)
            mask >>= 1
            e += 1
        return frozenset(out)

    def solution(self, indices: Iterable[int] = ()) -> Solution:
        """Solution selecting the given 0-based set indices."""
        return Solution.from_indices(indices, self.m)

    def empty(self) -> Solution:
        return Solution(0, self.m)

    # int-level helpers shared by the solvers
    def cover_mask(self, bits: int) -> int:
        masks = self.masks
        acc = 0
        i = 0
        while bits:
            if bits & 1:
                acc |= masks[i]
            bits >>= 1
            i += 1
        return acc

    def int_cost(self, bits: int) -> int:
        ws = self.int_weights
        total = 0
        i = 0
        while bits:
            if bits & 1:
                total += ws[i]
            bits >>= 1
            i += 1
        return total

    def from_int_cost(self, value: int) -> Fraction:
        return Fraction(value, self.scale)


@dataclass(frozen=True)
class Solution:
    """Bit vector over the collection; bit ``i`` selects set ``i`` (0-based).

    Set operators follow the usual overloading: ``|`` union, ``&``
    intersection, ``-`` difference, ``<=`` subset, ``len`` cardinality.
    """

    bits: int
    m: int

    def __post_init__(self):
        if self.m < 0 or self.bits < 0 or self.bits >> self.m:
            raise ValueError("bits do not fit in a vector of length m")

    @classmethod
    def from_indices(cls, indices: Iterable[int], m: int) -> Solution:
        bits = 0
        for i in indices:
            if not 0 <= i < m:
                raise IndexError(f"set index {i} out of range for m={m}")
            bits |= 1 << i
        return cls(bits, m)

    @classmethod
    def from_vector(cls, vector: Sequence[int]) -> Solution:
        return cls.from_indices((i for i, b in enumerate(vector) if b), len(vector))

    @classmethod
    def from_hex(cls, text: str, m: int) -> Solution:
        return cls(int(text, 16), m)

    def _check(self, other: Solution) -> None:
        if not isinstance(other, Solution):
            raise TypeError("expected a Solution")
        if other.m != self.m:
            raise BindingError(f"length mismatch: {self.m} vs {other.m}")

    def __or__(self, other: Solution) -> Solution:
        self._check(other)
        return Solution(self.bits | other.bits, self.m)

    def __and__(self, other: Solution) -> Solution:
        self._check(other)
        return Solution(self.bits & other.bits, self.m)

    def __sub__(self, other: Solution) -> Solution:
        self._check(other)
        return Solution(self.bits & ~other.bits, self.m)

    def __xor__(self, other: Solution) -> Solution:
        self._check(other)
        return Solution(self.bits ^ other.bits, self.m)

    def __len__(self) -> int:
        return _popcount(self.bits)

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.m and bool(self.bits >> index & 1)

    def __iter__(self):
        return iter(self.indices())

    def issubset(self, other: Solution) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __le__(self, other: Solution) -> bool:  # type: ignore[override]
        return self.issubset(other)

    def indices(self) -> list[int]:
        return [i for i in range(self.m) if self.bits >> i & 1]

    def vector(self) -> tuple[int, ...]:
        return tuple(self.bits >> i & 1 for i in range(self.m))

    def hex(self) -> str:
        return format(self.bits, "x")

    def hamming(self, other: Solution) -> int:
        self._check(other)
        return _popcount(self.bits ^ other.bits)

    def __repr__(self) -> str:
        return f"Solution({''.join(map(str, self.vector()))})"


def _bind(instance: SetCoverInstance, x: Solution) -> None:
    if x.m != instance.m:
        raise BindingError(f"solution has length {x.m}, instance has m={instance.m}")


def cost(instance: SetCoverInstance, x: Solution) -> Fraction:
    """Total weight of the selected sets (the fitness ``w . x``)."""
    _bind(instance, x)
    return instance.from_int_cost(instance.int_cost(x.bits))


def covered(instance: SetCoverInstance, x: Solution) -> frozenset[int]:
    _bind(instance, x)
    return instance.elements_of(instance.cover_mask(x.bits))


def is_feasible(instance: SetCoverInstance, x: Solution) -> bool:
    _bind(instance, x)
    return instance.cover_mask(x.bits) == instance.full_mask


@dataclass(frozen=True)
class IsolationFunction:
    """Linearly additive map from solutions to subsets of ``[q]``.

    ``covered-elements`` maps a solution to the elements it covers (q = n);
    ``feasibility`` maps feasible solutions to ``{1}`` and the rest to the
    empty set (q = 1).
    """

    kind: str
    q: int

    def __post_init__(self):
        if self.kind not in ("covered-elements", "feasibility"):
            raise ValueError(f"unknown isolation kind {self.kind!r}")
        if self.q < 1:
            raise ValueError("q must be positive")

    @classmethod
    def for_instance(cls, instance: SetCoverInstance, kind: str = "covered-elements") -> IsolationFunction:
        return cls(kind, instance.n if kind == "covered-elements" else 1)

    def cardinality_of_mask(self, instance: SetCoverInstance, cover_mask: int) -> int:
        if self.kind == "covered-elements":
            return _popcount(cover_mask)
        return 1 if cover_mask == instance.full_mask else 0


COVERED_ELEMENTS = "covered-elements"
FEASIBILITY = "feasibility"


def isolation(instance: SetCoverInstance, f: IsolationFunction, x: Solution) -> frozenset[int]:
    _bind(instance, x)
    if f.kind == COVERED_ELEMENTS:
        if f.q != instance.n:
            raise BindingError("covered-elements isolation needs q == n")
        return covered(instance, x)
    return frozenset({1}) if is_feasible(instance, x) else frozenset()


# -- mutation ---------------------------------------------------------------

def flip_one(bits: int, m: int, rng: Rng) -> int:
    return bits ^ (1 << rng.below(m))


def flip_each(bits: int, m: int, rng: Rng) -> int:
    # One word per position in index order.  Words >= limit are redrawn for the
    # same position; an accepted word flips its position iff it is below
    # limit / m, which happens with probability exactly 1/m.
    limit = (1 << 64) - ((1 << 64) % m)
    cut = limit // m
    words = rng.take(m)
    if max(words) < limit:
        for i, x in enumerate(words):
            if x < cut:
                bits ^= 1 << i
        return bits
    i = 0
    pending = words
    while True:
        for x in pending:
            if x >= limit:
                continue
            if x < cut:
                bits ^= 1 << i
            i += 1
        if i == m:
            return bits
        pending = rng.take(m - i)


def one_bit_mutation(x: Solution, rng: Rng) -> Solution:
    """Flip exactly one uniformly chosen position."""
    if x.m < 1:
        raise ValueError("mutation needs m >= 1")
    return Solution(flip_one(x.bits, x.m, rng), x.m)


def bitwise_mutation(x: Solution, rng: Rng) -> Solution:
    """Flip every position independently with probability exactly 1/m."""
    if x.m < 1:
        raise ValueError("mutation needs m >= 1")
    return Solution(flip_each(x.bits, x.m, rng), x.m)


MUTATIONS = {"one-bit": flip_one, "bit-wise": flip_each}


# -- instance transforms ----------------------------------------------------

DEFAULT_CLOSURE_BUDGET = 1 << 16


def extend_closure(instance: SetCoverInstance, budget: int = DEFAULT_CLOSURE_BUDGET) -> SetCoverInstance:
    """Close the collection under taking nonempty subsets.

    Every subset gets the cheapest weight among the input sets containing it.
    The input sets come first, in input order and with their (possibly
    lowered) weights; new subsets follow ordered by size and then
    lexicographically.  Duplicate element sets collapse into one entry.
    """
    work = instance.m * (1 << instance.k)
    if work > budget:
        raise ClosureBudgetError(
            f"closure needs about m*2^k = {work} subsets, budget is {budget}; "
            "use a smaller k or raise the budget"
        )
    best: dict[tuple[int, ...], Fraction] = {}
    for elems, w in zip(instance.sets, instance.weights):
        for size in range(1, len(elems) + 1):
            for sub in combinations(elems, size):
                if sub not in best or w < best[sub]:
                    best[sub] = w
    order: list[tuple[int, ...]] = []
    seen = set()
    for elems in instance.sets:
        if elems not in seen:
            seen.add(elems)
            order.append(elems)
    extra = sorted((s for s in best if s not in seen), key=lambda s: (len(s), s))
    order.extend(extra)
    return SetCoverInstance(
        instance.n,
        tuple(order),
        tuple(best[s] for s in order),
        name=instance.name,
    )


def harmonic(n: int) -> Fraction:
    """Exact n-th harmonic number."""
    if n < 1:
        raise ValueError("harmonic number needs n >= 1")
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))
