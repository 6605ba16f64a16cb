"""Exact maximin-share oracle and approximation ratios.

The maximin share of a player for ``k`` bundles over an item set ``S`` is the
largest value she can guarantee by partitioning ``S`` into ``k`` bundles and
keeping the worst one.  Empty bundles are legal (they are forced whenever
``|S| < k``, in which case the share is 0).

The oracle is exact.  Internally the player's values are scaled to integers;
a subset-sum sweep handles two bundles and a branch-and-bound search with
symmetry breaking handles the general case.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import Allocation, Instance, Value, validate_allocation


class _Unbounded:
    """Marker for approximation ratios on instances where every share is 0."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()

# Subset-sum sweeps use a bitset of achievable sums; beyond this many bits the
# branch-and-bound path is cheaper.
_BITSET_LIMIT = 1 << 22


def maximin_share(
    inst: Instance,
    player: int,
    parts: int,
    items: Iterable[int] | None = None,
) -> Fraction:
    """Exact maximin share of ``player`` for ``parts`` bundles over ``items``.

    ``items`` defaults to the full item set.

    >>> inst = Instance.from_rows([[1, 1, 1, 1, 1, 1]] * 2)
    >>> maximin_share(inst, 0, 2)
    Fraction(3, 1)
    """
    inst._check_player(player)
    if parts < 1:
        raise ValueError("parts must be at least 1")
    if items is None:
        subset = list(range(inst.m))
    else:
        subset = sorted(set(items))
        for j in subset:
            if not 0 <= j < inst.m:
                raise IndexError(f"item index {j} out of range [0, {inst.m})")

    row = inst.values[player]
    values = [row[j] for j in subset]
    if parts == 1:
        return Fraction(sum(values))
    if len(subset) < parts:
        return Fraction(0)

    scale = math.lcm(*(Fraction(v).denominator for v in values)) if values else 1
    weights = sorted((int(v * scale) for v in values), reverse=True)
    while weights and weights[-1] == 0:
        weights.pop()
    if len(weights) < parts:
        return Fraction(0)

    if parts == 2:
        best = _max_min_two_parts(weights)
    else:
        best = _max_min_partition(weights, parts)
    return Fraction(best, scale)


def _max_min_two_parts(weights: Sequence[int]) -> int:
    """Best min bundle over all 2-partitions, via achievable subset sums."""
    total = sum(weights)
    if total > _BITSET_LIMIT:
        return _max_min_partition(weights, 2)
    bits = 1
    for w in weights:
        bits |= bits << w
    half = total // 2
    reachable = bits & ((1 << (half + 1)) - 1)
    return reachable.bit_length() - 1


def _max_min_partition(weights: Sequence[int], k: int) -> int:
    """Branch and bound over bundle assignments, items in descending order.

    A greedy warm start gives an incumbent; the answer is then located by
    binary search between the incumbent and the ceiling ``total // k``, each
    probe asking whether some assignment keeps every bundle at or above a
    target value.
    """
    total = sum(weights)
    upper = total // k
    if upper == 0:
        return 0
    if len(weights) == k:
        return weights[-1]

    # Greedy warm start: largest weight into the lightest bundle.
    loads = [0] * k
    for w in weights:
        loads[loads.index(min(loads))] += w
    best = min(loads)
    if best == upper:
        return best

    lo, hi = best, upper
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _can_reach_target(weights, k, mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def _can_reach_target(weights: Sequence[int], k: int, target: int) -> bool:
    """Decide whether all items fit into ``k`` bundles of value >= target.

    Symmetry breaking: bundles are interchangeable, so among bundles with
    equal load only the first may receive the next item (in particular a new
    bundle opens only when all earlier ones are nonempty).  Items never go to
    bundles that already reached the target (moving an item out of a
    satisfied bundle keeps it satisfied, so this loses no solutions); once
    every bundle is satisfied the leftovers can be dumped anywhere.  A node
    is pruned when the remaining supply cannot cover the remaining deficit,
    or when fewer items remain than unsatisfied bundles.
    """
    count = len(weights)
    suffix = [0] * (count + 1)
    for i in range(count - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]
    if suffix[0] < k * target:
        return False
    loads = [0] * k
    failed: set = set()  # (item index, sorted unsatisfied loads) seen to fail

    def place(idx: int, unsat: int) -> bool:
        if unsat == 0:
            return True
        if idx == count or count - idx < unsat:
            return False
        open_loads = sorted(load for load in loads if load < target)
        if suffix[idx] < unsat * target - sum(open_loads):
            return False
        key = (idx, tuple(open_loads))
        if key in failed:
            return False
        w = weights[idx]
        tried = set()
        for b in range(k):
            load = loads[b]
            if load >= target or load in tried:
                continue
            tried.add(load)
            loads[b] = load + w
            ok = place(idx + 1, unsat - (1 if load + w >= target else 0))
            loads[b] = load
            if ok:
                return True
        failed.add(key)
        return False

    return place(0, k)


def maximin_share_bruteforce(
    inst: Instance,
    player: int,
    parts: int,
    items: Iterable[int] | None = None,
) -> Fraction:
    """Independent oracle: full enumeration of all ``parts**|S|`` assignments.

    Only for small inputs; used to cross-check the optimized oracle.
    """
    inst._check_player(player)
    if parts < 1:
        raise ValueError("parts must be at least 1")
    subset = list(range(inst.m)) if items is None else sorted(set(items))
    row = inst.values[player]
    best = Fraction(-1)
    sums: list[Value] = [0] * parts

    def assign(idx: int):
        nonlocal best
        if idx == len(subset):
            low = Fraction(min(sums))
            if low > best:
                best = low
            return
        v = row[subset[idx]]
        for b in range(parts):
            sums[b] += v
            assign(idx + 1)
            sums[b] -= v

    assign(0)
    return best if best >= 0 else Fraction(0)


def approximation_ratio(inst: Instance, alloc: Allocation):
    """Worst ratio of received value to maximin share, over players with a
    positive share.

    Returns :data:`UNBOUNDED` when every player's share is 0 (then any
    allocation is trivially as good as the shares demand).
    """
    violations = validate_allocation(inst, alloc)
    if violations:
        raise ValueError("invalid allocation: " + "; ".join(violations))
    ratios = []
    for i in range(inst.n):
        share = maximin_share(inst, i, inst.n)
        if share == 0:
            continue
        ratios.append(inst.value(i, alloc.bundles[i]) / share)
    if not ratios:
        return UNBOUNDED
    return min(ratios)
