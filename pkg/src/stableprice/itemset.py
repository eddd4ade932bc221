"""Item sets as integer bit masks.

Bit ``j`` of a mask is set iff item ``j`` is in the set. Python ints give
O(words) union/intersection/difference and ``int.bit_count`` gives the
cardinality, so no wrapper class is used in the hot loops.
"""
from __future__ import annotations

from typing import Iterable

#: hard cap on the number of items any market may have; exhaustive routines
#: enforce their own, much smaller caps below
MAX_ITEMS = 64
#: default cap for a single demand enumeration (2^m subsets)
DEMAND_CAP = 20
#: default cap for sweeps that touch every subset more than once
SWEEP_CAP = 16


class CapExceeded(RuntimeError):
    """An exhaustive routine was asked to enumerate beyond its size cap."""


class PreconditionError(ValueError):
    """Arguments violate an operation's documented precondition."""


def check_cap(m: int, cap: int, what: str = "enumeration") -> None:
    if m > cap:
        raise CapExceeded(f"{what} over {m} items exceeds cap {cap}")


def full_mask(m: int) -> int:
    return (1 << m) - 1


def mask_of(items: Iterable[int]) -> int:
    mask = 0
    for j in items:
        if j < 0:
            raise ValueError(f"negative item index {j}")
        mask |= 1 << j
    return mask


def items_of(mask: int) -> list[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> list[int]:
    """All submasks of ``mask`` in ascending numeric order."""
    out = [0]
    for j in items_of(mask):
        bit = 1 << j
        out += [s | bit for s in out]
    # doubling from the lowest bit already yields ascending order
    return out


def within(mask: int, m: int) -> bool:
    return mask >> m == 0
