"""Adversarial valuations for the ordinal model.

When every player submits the same ranking, an algorithm that sees only
rankings cannot tell the players apart, and the values behind that ranking
can be chosen after the allocation is fixed.  This module builds those
worst-case valuations, evaluates the counting bound they impose, and offers
a small exhaustive check over all allocations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .instance import Instance
from .mms import maximin_share

INFEASIBLE = "infeasible"
FEASIBLE_UNKNOWN = "feasible-unknown"


def harmonic_number(n: int) -> Fraction:
    """Exact n-th harmonic number, sum of 1/k for k = 1..n.

    >>> harmonic_number(3)
    Fraction(11, 6)
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    total = Fraction(0)
    for k in range(1, n + 1):
        total += Fraction(1, k)
    return total


def ordinal_adversary_valuation(i: int, n: int, m: int) -> tuple[Fraction, ...]:
    """Worst-case value row for the player in slot ``i`` (1-based) of the
    common ranking 1 >= 2 >= ... >= m: ones on her ``i - 1`` best items, then
    ``1/(m - i + 1)`` on the rest.

    Her maximin share under ``n`` players is
    ``floor((m - i + 1)/(n - i + 1)) / (m - i + 1)``.
    """
    if not 1 <= i <= n <= m:
        raise IndexError("need 1 <= i <= n <= m")
    tail = m - i + 1
    return (Fraction(1),) * (i - 1) + (Fraction(1, tail),) * tail


def ordinal_adversary_share(i: int, n: int, m: int) -> Fraction:
    """Closed form for the slot-``i`` adversarial maximin share."""
    if not 1 <= i <= n <= m:
        raise IndexError("need 1 <= i <= n <= m")
    tail = m - i + 1
    return Fraction(tail // (n - i + 1), tail)


@dataclass(frozen=True)
class CountingReport:
    n: int
    m: int
    alpha: Fraction
    terms: tuple[int, ...]  # ceil(alpha * floor((m-i+1)/(n-i+1))) per slot
    total: int
    verdict: str  # INFEASIBLE or FEASIBLE_UNKNOWN


def ordinal_lower_bound_check(n: int, m: int, alpha: Fraction) -> CountingReport:
    """Counting bound for ratio ``alpha`` in the ordinal model: each slot-``i``
    player must receive at least ``ceil(alpha * floor((m-i+1)/(n-i+1)))``
    items, and only ``m`` items exist.  A sum above ``m`` certifies that no
    common-ranking algorithm reaches ``alpha``; otherwise nothing is decided.
    """
    if not 1 <= n <= m:
        raise ValueError("need 1 <= n <= m")
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    terms = []
    for i in range(1, n + 1):
        bundles = (m - i + 1) // (n - i + 1)
        need = alpha * bundles
        terms.append(-((-need.numerator) // need.denominator))  # exact ceil
    total = sum(terms)
    verdict = INFEASIBLE if total > m else FEASIBLE_UNKNOWN
    return CountingReport(
        n=n, m=m, alpha=alpha, terms=tuple(terms), total=total, verdict=verdict
    )


def exhaustive_common_ranking_ratio(n: int, m: int) -> Fraction:
    """Best worst-case ratio any allocation can secure when all players share
    the common ranking and the adversary then picks each player's valuation
    from the slot family above.

    Enumerates all ``n**m`` allocations; intended for desk sizes such as
    ``n=3, m=6`` (729 allocations).
    """
    if not 1 <= n <= m:
        raise ValueError("need 1 <= n <= m")
    rows = [ordinal_adversary_valuation(i, n, m) for i in range(1, n + 1)]
    shares = [ordinal_adversary_share(i, n, m) for i in range(1, n + 1)]
    best = Fraction(0)
    for assignment in product(range(n), repeat=m):
        bundles: list[list[int]] = [[] for _ in range(n)]
        for item, player in enumerate(assignment):
            bundles[player].append(item)
        worst = None
        for bundle in bundles:
            for slot in range(n):
                ratio = sum(rows[slot][j] for j in bundle) / shares[slot]
                if worst is None or ratio < worst:
                    worst = ratio
            if worst == 0:
                break
        if worst > best:
            best = worst
    return best


def adversary_share_matches_oracle(i: int, n: int, m: int) -> bool:
    """Cross-check the closed-form share against the exact oracle."""
    row = ordinal_adversary_valuation(i, n, m)
    inst = Instance.from_rows([row])
    return maximin_share(inst, 0, n) == ordinal_adversary_share(i, n, m)
