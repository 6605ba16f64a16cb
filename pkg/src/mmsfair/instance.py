"""Problem instances with exact rational valuations.

An instance is an ``n x m`` grid of nonnegative rational values, one row per
player and one column per item.  All arithmetic on these values is exact:
values are Python ``int`` or ``fractions.Fraction`` objects, never floats.
Items are indexed ``0..m-1`` internally (the command line prints them
1-based).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Value = Union[int, Fraction]

_TOKEN_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


class InstanceError(ValueError):
    """Malformed instance data; carries the offending line number if known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: one row of exact item values per player."""

    values: tuple[tuple[Value, ...], ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise InstanceError("an instance needs at least one player")
        m = len(self.values[0])
        for i, row in enumerate(self.values):
            if len(row) != m:
                raise InstanceError(
                    f"player {i + 1} has {len(row)} values, expected {m}"
                )
            for j, v in enumerate(row):
                if not isinstance(v, (int, Fraction)):
                    raise InstanceError(
                        f"value for player {i + 1}, item {j + 1} is not rational"
                    )
                if v < 0:
                    raise InstanceError(
                        f"negative value for player {i + 1}, item {j + 1}"
                    )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Value]]) -> "Instance":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0])

    def row(self, player: int) -> tuple[Value, ...]:
        self._check_player(player)
        return self.values[player]

    def value(self, player: int, items: Iterable[int]) -> Value:
        """Exact total value of ``items`` for ``player`` (empty set -> 0)."""
        return bundle_value(self, player, items)

    def _check_player(self, player: int) -> None:
        if not 0 <= player < self.n:
            raise IndexError(f"player index {player} out of range [0, {self.n})")


@dataclass(frozen=True)
class Ranking:
    """A strict preference order over items, most-preferred first.

    ``order`` is a permutation of ``0..m-1``.
    """

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("ranking must be a permutation of the item indices")

    @property
    def m(self) -> int:
        return len(self.order)

    def rank_of(self, item: int) -> int:
        """1-based position of ``item`` in this ranking."""
        return self.order.index(item) + 1


@dataclass(frozen=True)
class Allocation:
    """An ordered partition of the items into one bundle per player."""

    bundles: tuple[frozenset[int], ...]

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)


def parse_instance(text: str | Iterable[str]) -> Instance:
    """Parse the instance file format.

    Lines starting with ``#`` are ignored, as are blank lines.  The first data
    line is ``n m``; the next ``n`` lines hold ``m`` whitespace-separated
    values, each an integer ``p`` or a fraction ``p/q`` with ``q > 0``.

    >>> parse_instance("2 3\\n1 1/2 0\\n2/3 1 1").values[0]
    (1, Fraction(1, 2), 0)
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [line.rstrip("\n") for line in text]

    data: list[tuple[int, str]] = []  # (1-based line number, content)
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        data.append((lineno, stripped))

    if not data:
        raise InstanceError("empty instance: missing 'n m' header")

    header_line, header = data[0]
    parts = header.split()
    if len(parts) != 2:
        raise InstanceError("header must be two integers 'n m'", header_line)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise InstanceError("header must be two integers 'n m'", header_line) from None
    if n < 1:
        raise InstanceError("player count must be at least 1", header_line)
    if m < 0:
        raise InstanceError("item count must be nonnegative", header_line)

    body = data[1:]
    if len(body) != n:
        raise InstanceError(
            f"expected {n} value rows, found {len(body)}",
            body[-1][0] if body else header_line,
        )

    rows = []
    for lineno, content in body:
        tokens = content.split()
        if len(tokens) != m:
            raise InstanceError(
                f"expected {m} values, found {len(tokens)}", lineno
            )
        row = []
        for tok in tokens:
            match = _TOKEN_RE.match(tok)
            if match is None:
                raise InstanceError(f"malformed value {tok!r}", lineno)
            num = int(match.group(1))
            den = match.group(2)
            if den is None:
                value: Value = num
            else:
                if int(den) == 0:
                    raise InstanceError(f"zero denominator in {tok!r}", lineno)
                value = Fraction(num, int(den))
            if value < 0:
                raise InstanceError(f"negative value {tok!r}", lineno)
            row.append(value)
        rows.append(tuple(row))

    return Instance(tuple(rows))


def format_instance(inst: Instance) -> str:
    """Render an instance in the file format accepted by :func:`parse_instance`."""
    lines = [f"{inst.n} {inst.m}"]
    for row in inst.values:
        lines.append(" ".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def _format_value(v: Value) -> str:
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def bundle_value(inst: Instance, player: int, items: Iterable[int]) -> Value:
    """Exact sum of ``player``'s values over ``items``; the empty set is 0."""
    inst._check_player(player)
    row = inst.values[player]
    total: Value = 0
    for j in items:
        if not 0 <= j < inst.m:
            raise IndexError(f"item index {j} out of range [0, {inst.m})")
        total += row[j]
    return total


def derive_ranking(inst: Instance, player: int) -> Ranking:
    """Rank items by value, descending; ties broken by ascending item index.

    This fixed tie-break makes every ranking-based mechanism deterministic.

    >>> derive_ranking(Instance.from_rows([[0, 1, 2]]), 0).order
    (2, 1, 0)
    """
    inst._check_player(player)
    row = inst.values[player]
    return Ranking(tuple(sorted(range(inst.m), key=lambda j: (-row[j], j))))


def ranking_order(row: Sequence[Value]) -> tuple[int, ...]:
    """Raw order tuple for a single value row (same tie-break as above)."""
    return tuple(sorted(range(len(row)), key=lambda j: (-row[j], j)))


def validate_allocation(inst: Instance, alloc: Allocation) -> list[str]:
    """Return a list of violations; an empty list means the allocation is valid.

    Checks bundle count, item-index range, duplicates, and full coverage.
    """
    violations = []
    if alloc.n != inst.n:
        violations.append(f"expected {inst.n} bundles, found {alloc.n}")
    seen: dict[int, int] = {}
    for b, bundle in enumerate(alloc.bundles):
        for j in bundle:
            if not 0 <= j < inst.m:
                violations.append(f"item index {j} out of range in bundle {b + 1}")
            elif j in seen:
                violations.append(
                    f"item {j + 1} assigned to both bundle {seen[j] + 1} and bundle {b + 1}"
                )
            else:
                seen[j] = b
    for j in range(inst.m):
        if j not in seen:
            violations.append(f"item {j + 1} unassigned")
    return violations
