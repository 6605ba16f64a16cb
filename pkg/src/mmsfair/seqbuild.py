"""Construction of long picking sequences with per-player pick deadlines,
plus the guarantee-ratio lookup for the sequence mechanisms.

The construction targets a rate ``alpha = 1 / n**(1/2 + epsilon)``: player
``i`` (1-based) gets her 0th pick at overall position ``i`` and her j-th pick
no later than position ``i + j * floor((n - i + 1) / alpha)``.  Whether a
sequence of length ``m`` with this property exists is checked up front; an
infeasible request is a reported error, never a silent degradation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .adversary import harmonic_number
from .mechanisms import (
    BEST_ITEM,
    PICK_SEQ,
    PR,
    SQRT_SEQ,
    Mechanism,
    MechanismError,
    PickingSequence,
)


class InfeasibleParams(ValueError):
    """The length bound fails: building would need more than ``m`` picks."""

    def __init__(self, required: int, m: int):
        super().__init__(
            f"infeasible parameters: the construction needs "
            f"n + ceil(alpha * H_n * m) = {required} picks but only m = {m} fit"
        )
        self.required = required
        self.m = m


@dataclass(frozen=True)
class SqrtSeqParams:
    """Validated build parameters; ``alpha`` is a rational lower bound for
    ``1 / n**(1/2 + epsilon)`` (rounding down only weakens the target rate,
    so it is always safe)."""

    n: int
    m: int
    epsilon: Fraction
    alpha: Fraction


class PickPair(NamedTuple):
    player: int  # 0-based
    deadline: int  # 1-based overall pick position


def power_lower_rational(
    n: int, exponent: Fraction, max_den: int = 10**6
) -> Fraction:
    """Largest fraction ``p/q`` with ``q <= max_den`` and ``p/q <= n**-exponent``.

    Walks the Stern-Brocot tree with an exact comparator
    (``p/q <= n**(-a/b)``  iff  ``p**b * n**a <= q**b``), so no floating
    point is involved.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_den < 1:
        raise ValueError("max_den must be at least 1")
    if n == 1 or exponent == 0:
        return Fraction(1)
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    a_exp, b_exp = exponent.numerator, exponent.denominator
    n_pow = n**a_exp

    def below(p: int, q: int) -> bool:
        return p**b_exp * n_pow <= q**b_exp

    lo_n, lo_d = 0, 1  # lower bound, <= target
    hi_n, hi_d = 1, 1  # upper bound, > target (the target is < 1)
    while lo_d + hi_d <= max_den:
        if below(lo_n + hi_n, lo_d + hi_d):
            # Mediant is still below: advance the lower bound as far as the
            # denominator budget and the target allow.
            cap = (max_den - lo_d) // hi_d
            lo_k, hi_k = 1, cap
            while lo_k < hi_k:
                mid = (lo_k + hi_k + 1) // 2
                if below(lo_n + mid * hi_n, lo_d + mid * hi_d):
                    lo_k = mid
                else:
                    hi_k = mid - 1
            lo_n, lo_d = lo_n + lo_k * hi_n, lo_d + lo_k * hi_d
        else:
            cap = (max_den - hi_d) // lo_d
            lo_k, hi_k = 1, cap
            while lo_k < hi_k:
                mid = (lo_k + hi_k + 1) // 2
                if not below(hi_n + mid * lo_n, hi_d + mid * lo_d):
                    lo_k = mid
                else:
                    hi_k = mid - 1
            hi_n, hi_d = hi_n + lo_k * lo_n, hi_d + lo_k * lo_d
    return Fraction(lo_n, lo_d)


def sqrt_seq_params(
    n: int, m: int, epsilon: Fraction, max_den: int = 10**6
) -> SqrtSeqParams:
    if n < 1:
        raise ValueError("n must be at least 1")
    if m < 0:
        raise ValueError("m must be nonnegative")
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    alpha = power_lower_rational(n, Fraction(1, 2) + epsilon, max_den)
    return SqrtSeqParams(n=n, m=m, epsilon=epsilon, alpha=alpha)


def length_bound(params: SqrtSeqParams) -> int:
    """Left side of the feasibility check: ``n + ceil(alpha * H_n * m)``."""
    return params.n + math.ceil(params.alpha * harmonic_number(params.n) * params.m)


def _deadline_step(n: int, i: int, alpha: Fraction) -> int:
    """Spacing between consecutive deadlines of 1-based player ``i``."""
    return math.floor(Fraction(n - i + 1) / alpha)


def pair_schedule(params: SqrtSeqParams) -> list[PickPair]:
    """All (player, deadline) pairs, sorted by deadline, ties by player."""
    n, m, alpha = params.n, params.m, params.alpha
    pairs = []
    for i in range(1, n + 1):
        step = _deadline_step(n, i, alpha)
        j_max = math.floor(alpha * (m - i) / (n - i + 1))
        for j in range(j_max + 1):
            pairs.append(PickPair(player=i - 1, deadline=i + j * step))
    pairs.sort(key=lambda p: (p.deadline, p.player))
    return pairs


def build_sqrt_sequence(params: SqrtSeqParams) -> PickingSequence:
    """Emit a non-cyclic sequence of length exactly ``m`` meeting every
    deadline: the sorted pair players form the prefix, remaining picks are
    padded round-robin over ascending players, skipping any player whose
    extra pick would land past her next deadline.

    A single player needs no deadline bookkeeping and is always feasible.
    """
    n, m = params.n, params.m
    if n == 1:
        return PickingSequence((0,) * max(m, 1))
    required = length_bound(params)
    if required > m:
        raise InfeasibleParams(required, m)
    picks = [p.player for p in pair_schedule(params)]
    if len(picks) > m:  # ruled out by the length bound
        raise InfeasibleParams(len(picks), m)
    occurrences = [0] * n
    for p in picks:
        occurrences[p] += 1
    steps = [_deadline_step(n, i, params.alpha) for i in range(1, n + 1)]
    cursor = 0
    while len(picks) < m:
        position = len(picks) + 1
        chosen = None
        for offset in range(n):
            cand = (cursor + offset) % n
            if cand + 1 + occurrences[cand] * steps[cand] >= position:
                chosen = cand
                break
        if chosen is None:  # no player can absorb another pick in time
            raise InfeasibleParams(required, m)
        picks.append(chosen)
        occurrences[chosen] += 1
        cursor = (chosen + 1) % n
    return PickingSequence(tuple(picks))


class PickViolation(NamedTuple):
    player: int  # 0-based
    occurrence: int  # j >= 0, counted from the player's first pick
    position: int  # 1-based actual position
    bound: int  # latest allowed position


def verify_pick_positions(
    seq: PickingSequence, n: int, alpha: Fraction
) -> list[PickViolation]:
    """Check every occurrence of every player against her deadline; returns
    all violations (empty list = sequence is on schedule)."""
    if seq.cyclic:
        raise MechanismError("pick-position verification needs a non-cyclic sequence")
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    occurrences: dict[int, int] = {}
    violations = []
    for pos, player in enumerate(seq.picks, start=1):
        j = occurrences.get(player, 0)
        occurrences[player] = j + 1
        i = player + 1
        bound = i + j * _deadline_step(n, i, alpha)
        if pos > bound:
            violations.append(
                PickViolation(player=player, occurrence=j, position=pos, bound=bound)
            )
    return violations


class DemandViolation(NamedTuple):
    player: int  # 0-based
    occurrence: int
    demand: int
    deadline: int


def verify_schedule_demand(params: SqrtSeqParams) -> list[DemandViolation]:
    """Numeric check that no deadline is oversubscribed: for every generated
    pair of player ``i`` and index ``j``, the number of picks every player can
    claim by that deadline,
    ``n + sum_l floor((i - l + j*step_i) / step_l)``,
    must fit inside the deadline itself."""
    n, m, alpha = params.n, params.m, params.alpha
    violations = []
    steps = {i: _deadline_step(n, i, alpha) for i in range(1, n + 1)}
    for i in range(1, n + 1):
        j_max = math.floor(alpha * (m - i) / (n - i + 1))
        for j in range(j_max + 1):
            deadline = i + j * steps[i]
            demand = n + sum(
                (i - l + j * steps[i]) // steps[l] for l in range(1, n + 1)
            )
            if demand > deadline:
                violations.append(
                    DemandViolation(
                        player=i - 1, occurrence=j, demand=demand, deadline=deadline
                    )
                )
    return violations


def theoretical_ratio(mech: Mechanism, n: int, m: int) -> Fraction:
    """Proven worst-case guarantee of a sequence mechanism at size (n, m)."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    name = mech.name
    if name in (BEST_ITEM, PICK_SEQ):
        return Fraction(1, max(2, m - n + 2) // 2)
    if name == PR:
        return Fraction(2, n + 1)
    if name == SQRT_SEQ:
        return power_lower_rational(n, Fraction(1, 2) + mech.epsilon)
    raise MechanismError(f"no guarantee ratio is defined for {mech}")
