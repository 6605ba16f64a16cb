"""Exhaustive search for profitable unilateral misreports.

A mechanism is immune to misreports when no player can strictly raise the
true value of her bundle by deviating alone.  The search space depends on
the information model: all ``m!`` rankings in the ordinal model, value rows
in the other two.  The cardinal row space is infinite, so a cardinal or
public-rankings search is exhaustive only when the mechanism ignores values
(then rankings cover everything) or when the supplied row pool covers every
decision the mechanism actually takes; the ``search_complete`` flag records
which situation holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterable, Sequence

from .instance import Instance, Ranking, Value, ranking_order
from .mechanisms import (
    CARDINAL,
    ORDINAL,
    PR_EXACT_24,
    PUBLIC_RANKINGS,
    RANDOM_UNIFORM,
    Mechanism,
    MechanismError,
    PickingSequence,
    _consistent_with_order,
    _cut_and_choose_bundles,
    _pr_exact_24_bundles,
    _simulate_picks,
    best_item_sequence,
    models_for,
    pr_sequence,
    random_uniform_allocation,
    value_oblivious,
)

# m! rankings are enumerated per search; 8! = 40320 keeps this a desk job.
ENUM_LIMIT = 8


@dataclass(frozen=True)
class DeviationReport:
    """Outcome of one player's misreport search under one model.

    ``best_deviation_value`` always includes the truthful report itself, so
    it is never below ``truthful_value``; ``witness`` is present exactly when
    a strictly profitable misreport exists.
    """

    player: int
    model: str
    truthful_value: Value
    best_deviation_value: Value
    witness: object | None
    search_complete: bool


class EnumerationLimitError(ValueError):
    """The request would enumerate more than the search can afford."""


_SEQUENCE_CACHE: dict = {}


def _sequence_for(mech: Mechanism, n: int, m: int) -> PickingSequence | None:
    """Picking sequence of a sequence mechanism, or None for the others."""
    key = (mech.name, mech.epsilon, n, m)
    if key in _SEQUENCE_CACHE:
        return _SEQUENCE_CACHE[key]
    if mech.name in ("best-item", "pick-seq"):
        seq = best_item_sequence(n, m)
    elif mech.name == "pr":
        seq = pr_sequence(n)
    elif mech.name == "sqrt-seq":
        from .seqbuild import build_sqrt_sequence, sqrt_seq_params

        seq = build_sqrt_sequence(sqrt_seq_params(n, m, mech.epsilon))
    else:
        seq = None
    _SEQUENCE_CACHE[key] = seq
    return seq


def _allocate_raw(
    mech: Mechanism,
    orders: Sequence[tuple[int, ...]],
    rows: Sequence[Sequence[Value]],
    n: int,
    m: int,
    seed: int = 0,
    cache: dict | None = None,
) -> tuple[tuple[int, ...], ...]:
    """Mechanism dispatch on raw orders/rows; value-oblivious outcomes are
    memoized by their ranking profile."""
    seq = _sequence_for(mech, n, m)
    if seq is not None:
        key = tuple(orders)
        if cache is not None and key in cache:
            return cache[key]
        bundles = tuple(
            tuple(b) for b in _simulate_picks(orders, m, seq.picks, seq.cyclic)
        )
        if cache is not None:
            cache[key] = bundles
        return bundles
    if mech.name == PR_EXACT_24:
        mine, rest = _pr_exact_24_bundles(orders, rows)
        return tuple(sorted(mine)), tuple(sorted(rest))
    if mech.name == "cut-and-choose":
        first, second = _cut_and_choose_bundles(rows)
        return tuple(sorted(first)), tuple(sorted(second))
    if mech.name == RANDOM_UNIFORM:
        alloc = random_uniform_allocation(n, m, seed)
        return tuple(tuple(sorted(b)) for b in alloc.bundles)
    raise MechanismError(f"unhandled mechanism {mech}")  # pragma: no cover


def _check_model(mech: Mechanism, model: str) -> None:
    if model not in models_for(mech):
        raise MechanismError(f"{mech} is not defined in the {model} model")


def _check_enum(m: int) -> None:
    if m > ENUM_LIMIT:
        raise EnumerationLimitError(
            f"exhaustive ranking enumeration needs m <= {ENUM_LIMIT}, got m = {m}"
        )


def _builtin_rows(true_row: Sequence[Value], m: int) -> list[tuple[Value, ...]]:
    """Built-in misreport pool: every permutation of the true row plus a
    strict-ranking representative row for each of the m! rankings."""
    pool: dict[tuple[Value, ...], None] = {}
    for perm in permutations(true_row):
        pool.setdefault(perm, None)
    descending = tuple(range(m, 0, -1))
    for perm in permutations(descending):
        pool.setdefault(perm, None)
    return list(pool)


def _validate_misreports(misreports, m: int) -> list[tuple[Value, ...]]:
    rows = []
    for row in misreports:
        row = tuple(row)
        if len(row) != m:
            raise ValueError(f"misreport row must have {m} values, got {len(row)}")
        for v in row:
            if v < 0:
                raise ValueError("misreport values must be nonnegative")
        rows.append(row)
    return rows


def deviation_search_ordinal(
    mech: Mechanism, inst: Instance, player: int, seed: int = 0
) -> DeviationReport:
    """Try every ranking the player could submit, others truthful."""
    _check_model(mech, ORDINAL)
    _check_enum(inst.m)
    inst._check_player(player)
    n, m = inst.n, inst.m
    true_row = inst.values[player]
    orders = [ranking_order(row) for row in inst.values]
    cache: dict = {}
    truthful = _allocate_raw(mech, orders, inst.values, n, m, seed, cache)
    t_val = sum(true_row[j] for j in truthful[player])
    best = t_val
    witness = None
    for perm in permutations(range(m)):
        orders[player] = perm
        bundles = _allocate_raw(mech, orders, inst.values, n, m, seed, cache)
        val = sum(true_row[j] for j in bundles[player])
        if val > best:
            best = val
            witness = Ranking(perm)
    orders[player] = ranking_order(true_row)
    return DeviationReport(
        player=player,
        model=ORDINAL,
        truthful_value=t_val,
        best_deviation_value=best,
        witness=witness,
        search_complete=True,
    )


def _row_deviation_search(
    mech: Mechanism,
    inst: Instance,
    player: int,
    pool: Iterable[tuple[Value, ...]],
    model: str,
    seed: int,
    complete: bool,
) -> DeviationReport:
    n, m = inst.n, inst.m
    true_row = inst.values[player]
    true_orders = [ranking_order(row) for row in inst.values]
    rows = list(inst.values)
    orders = list(true_orders)
    cache: dict = {}
    truthful = _allocate_raw(mech, orders, rows, n, m, seed, cache)
    t_val = sum(true_row[j] for j in truthful[player])
    best = t_val
    witness = None
    for report in pool:
        if model == CARDINAL:
            orders[player] = ranking_order(report)
            rows[player] = report
        else:  # public rankings: orders stay public, inconsistent rows ignored
            if _consistent_with_order(report, true_orders[player]):
                rows[player] = report
            else:
                rows[player] = true_row
        bundles = _allocate_raw(mech, orders, rows, n, m, seed, cache)
        val = sum(true_row[j] for j in bundles[player])
        if val > best:
            best = val
            witness = report
    return DeviationReport(
        player=player,
        model=model,
        truthful_value=t_val,
        best_deviation_value=best,
        witness=witness,
        search_complete=complete,
    )


def deviation_search_cardinal(
    mech: Mechanism,
    inst: Instance,
    player: int,
    misreports: Iterable[Sequence[Value]] = (),
    seed: int = 0,
) -> DeviationReport:
    """Try the supplied rows plus the built-in pool (permutations of the true
    row and one representative row per strict ranking)."""
    _check_model(mech, CARDINAL)
    _check_enum(inst.m)
    inst._check_player(player)
    supplied = _validate_misreports(misreports, inst.m)
    pool: dict[tuple[Value, ...], None] = {tuple(inst.values[player]): None}
    for row in supplied:
        pool.setdefault(row, None)
    for row in _builtin_rows(inst.values[player], inst.m):
        pool.setdefault(row, None)
    return _row_deviation_search(
        mech, inst, player, list(pool), CARDINAL, seed, value_oblivious(mech)
    )


def grid_covers_decisions(mech: Mechanism, grid: Sequence[Value]) -> bool:
    """Whether rows drawn from ``grid`` reach every decision the mechanism
    can take, making a row search over the grid exhaustive."""
    if value_oblivious(mech):
        return True
    if mech.name == PR_EXACT_24:
        # Player 1's only decision is binary (top item vs ranks 2-3); a grid
        # holding zero and a positive value realizes both sides under any
        # public ranking.
        return any(v == 0 for v in grid) and any(v > 0 for v in grid)
    return False


def deviation_search_public(
    mech: Mechanism,
    inst: Instance,
    player: int,
    misreports: Iterable[Sequence[Value]] = (),
    seed: int = 0,
    pool_covers_decisions: bool = False,
) -> DeviationReport:
    """Like the cardinal search, but the player's ranking is public: a
    misreport inconsistent with it is replaced by her true row."""
    _check_model(mech, PUBLIC_RANKINGS)
    _check_enum(inst.m)
    inst._check_player(player)
    supplied = _validate_misreports(misreports, inst.m)
    pool: dict[tuple[Value, ...], None] = {tuple(inst.values[player]): None}
    for row in supplied:
        pool.setdefault(row, None)
    for row in _builtin_rows(inst.values[player], inst.m):
        pool.setdefault(row, None)
    complete = value_oblivious(mech) or pool_covers_decisions
    return _row_deviation_search(
        mech, inst, player, list(pool), PUBLIC_RANKINGS, seed, complete
    )


@dataclass(frozen=True)
class GridWitness:
    instance_rows: tuple[tuple[Value, ...], ...]
    player: int
    misreport: object  # value row, or a Ranking in the ordinal model
    truthful_value: Value
    deviation_value: Value


@dataclass(frozen=True)
class GridVerification:
    mechanism: str
    model: str
    n: int
    m: int
    grid: tuple[Value, ...]
    instances: int
    violations: int
    witness: GridWitness | None
    complete: bool
    certificate: str | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def verify_truthful_on_grid(
    mech: Mechanism,
    model: str,
    n: int,
    m: int,
    grid: Sequence[Value],
    budget: int = 1_000_000,
    seed: int = 0,
) -> GridVerification:
    """Enumerate every instance with values from ``grid`` and run the
    applicable deviation search for every player.

    Counts (instance, player) pairs admitting a profitable misreport and
    keeps the first witness in enumeration order.
    """
    _check_model(mech, model)
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    grid = tuple(sorted(set(grid)))
    if not grid:
        raise ValueError("grid must be nonempty")
    for v in grid:
        if v < 0:
            raise ValueError("grid values must be nonnegative")

    total = len(grid) ** (n * m)
    if total > budget:
        raise EnumerationLimitError(
            f"grid sweep needs {total} instances, over the budget of {budget}"
        )

    if mech.name == RANDOM_UNIFORM:
        # The allocation never reads the reports, so no misreport can matter.
        return GridVerification(
            mechanism=str(mech),
            model=model,
            n=n,
            m=m,
            grid=grid,
            instances=total,
            violations=0,
            witness=None,
            complete=True,
            certificate="input-oblivious: the allocation ignores all reports",
        )

    _check_enum(m)
    rows_space = list(product(grid, repeat=m))
    rank_perms = list(permutations(range(m)))
    descending = tuple(range(m, 0, -1))

    # Reusable pools, keyed by what they actually depend on.
    consistent_cache: dict[tuple[int, ...], list[tuple[Value, ...]]] = {}

    def consistent_rows(order: tuple[int, ...]) -> list[tuple[Value, ...]]:
        rows = consistent_cache.get(order)
        if rows is None:
            rows = [r for r in rows_space if _consistent_with_order(r, order)]
            consistent_cache[order] = rows
        return rows

    complete = value_oblivious(mech) or (
        model == PUBLIC_RANKINGS and grid_covers_decisions(mech, grid)
    )
    if model == ORDINAL:
        complete = True

    alloc_cache: dict = {}
    violations = 0
    witness = None

    for inst_rows in product(rows_space, repeat=n):
        true_orders = [ranking_order(row) for row in inst_rows]
        truthful = _allocate_raw(mech, true_orders, inst_rows, n, m, seed, alloc_cache)
        for player in range(n):
            true_row = inst_rows[player]
            t_val = sum(true_row[j] for j in truthful[player])
            found = None
            if model == ORDINAL:
                orders = list(true_orders)
                for perm in rank_perms:
                    orders[player] = perm
                    bundles = _allocate_raw(
                        mech, orders, inst_rows, n, m, seed, alloc_cache
                    )
                    val = sum(true_row[j] for j in bundles[player])
                    if val > t_val:
                        found = (Ranking(perm), val)
                        break
            else:
                if model == CARDINAL:
                    pool: dict[tuple[Value, ...], None] = {}
                    for r in rows_space:
                        pool.setdefault(r, None)
                    for r in permutations(true_row):
                        pool.setdefault(r, None)
                    for r in permutations(descending):
                        pool.setdefault(r, None)
                    reports = list(pool)
                else:
                    pool = {}
                    for r in consistent_rows(true_orders[player]):
                        pool.setdefault(r, None)
                    pool.setdefault(true_row, None)
                    reports = list(pool)
                orders = list(true_orders)
                rows = list(inst_rows)
                for report in reports:
                    if model == CARDINAL:
                        orders[player] = ranking_order(report)
                    rows[player] = report
                    bundles = _allocate_raw(mech, orders, rows, n, m, seed, alloc_cache)
                    val = sum(true_row[j] for j in bundles[player])
                    if val > t_val:
                        found = (report, val)
                        break
                orders[player] = true_orders[player]
                rows[player] = true_row
            if found is not None:
                violations += 1
                if witness is None:
                    witness = GridWitness(
                        instance_rows=tuple(inst_rows),
                        player=player,
                        misreport=found[0],
                        truthful_value=t_val,
                        deviation_value=found[1],
                    )
    return GridVerification(
        mechanism=str(mech),
        model=model,
        n=n,
        m=m,
        grid=grid,
        instances=total,
        violations=violations,
        witness=witness,
        complete=complete,
    )
