"""Run records shared by all solvers."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from ..core import SetCoverInstance, Solution

PriceMap = dict  # element -> Fraction


@dataclass(frozen=True)
class TraceRecord:
    step: int
    algorithm: str
    event: str
    cardinality: int
    cost: Fraction
    bits: int
    parent_cardinality: Optional[int] = None
    digest: str = ""

    def solution(self, m: int) -> Solution:
        return Solution(self.bits, m)


class CoverResult(NamedTuple):
    """Output of the deterministic constructive solvers."""

    solution: Solution
    prices: PriceMap
    trace: list


@dataclass
class RunResult:
    algorithm: str
    seed: int
    steps_used: int
    best_feasible: Optional[Solution]
    best_cost: Optional[Fraction]
    population: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.best_feasible is not None


def member_hash(cardinality: int, bits: int) -> int:
    payload = f"{cardinality}:{bits:x}".encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def population_digest(members) -> str:
    """Order-independent digest of ``(cardinality, bits)`` pairs."""
    acc = 0
    for card, bits in members:
        acc ^= member_hash(card, bits)
    return format(acc, "016x")


def cost_record(instance: SetCoverInstance, step: int, algorithm: str, event: str, bits: int) -> TraceRecord:
    cover = instance.cover_mask(bits)
    return TraceRecord(
        step=step,
        algorithm=algorithm,
        event=event,
        cardinality=cover.bit_count(),
        cost=instance.from_int_cost(instance.int_cost(bits)),
        bits=bits,
    )
