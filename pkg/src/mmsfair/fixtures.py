"""Executable impossibility chains.

Each fixture is a short ordered list of two-player profiles plus deviation
edges: an edge (from, to, player) says that at profile ``from`` the named
player could report the row she holds in profile ``to``.  Running a chain
against a mechanism either catches it under-delivering the fixture's
threshold at some profile (APPROX-FAILURE), catches a strictly profitable
deviation along an edge (MANIPULABLE), or reports that the mechanism evades
the chain (CONSISTENT).

The fixtures instantiate their symbolic gap as ``epsilon = 1/10`` by
default; any value inside the fixture's admissible range may be requested.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import Instance, derive_ranking
from .mechanisms import (
    CARDINAL,
    MODELS,
    ORDINAL,
    PUBLIC_RANKINGS,
    Mechanism,
    MechanismError,
    models_for,
    run_mechanism,
)
from .mms import maximin_share
from .seqbuild import InfeasibleParams

FIXTURE_NAMES = ("lemma-2+2", "lemma-1+3", "pr-m6", "pr-m5", "ordinal-m4")

APPROX_FAILURE = "approx-failure"
MANIPULABLE = "manipulable"
CONSISTENT = "consistent"

# (supremum, inclusive?): the lemma chains need epsilon strictly below 1/2,
# otherwise 2 - e and 1 + e coincide and distinct profiles collapse.
_EPSILON_RANGE = {
    "lemma-2+2": (Fraction(1, 2), False),
    "lemma-1+3": (Fraction(1, 2), False),
    "pr-m6": (Fraction(1, 5), True),
    "pr-m5": (Fraction(1, 6), True),
    "ordinal-m4": (Fraction(1, 2), True),
}

Row = tuple[Fraction, ...]
Profile = tuple[Row, Row]


@dataclass(frozen=True)
class ChainFixture:
    """An impossibility chain: profiles, deviation edges, and the
    approximation threshold the argued-about mechanisms would have to meet
    in ``model``."""

    name: str
    epsilon: Fraction
    threshold: Fraction
    model: str
    profiles: tuple[Profile, ...]
    deviation_edges: tuple[tuple[int, int, int], ...]  # (from, to, player), 0-based

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if not self.profiles:
            raise ValueError("a fixture needs at least one profile")
        m = len(self.profiles[0][0])
        for p, profile in enumerate(self.profiles):
            if len(profile) != 2 or any(len(row) != m for row in profile):
                raise ValueError(f"profile {p + 1} is not a 2 x {m} matrix")
        for src, dst, player in self.deviation_edges:
            if not (
                0 <= src < len(self.profiles)
                and 0 <= dst < len(self.profiles)
                and player in (0, 1)
            ):
                raise ValueError(f"edge ({src}, {dst}, {player}) out of range")
            if self.profiles[src][1 - player] != self.profiles[dst][1 - player]:
                raise ValueError(
                    f"edge ({src + 1}, {dst + 1}, player {player + 1}) changes "
                    "the other player's row"
                )
            if self.profiles[src][player] == self.profiles[dst][player]:
                raise ValueError(
                    f"edge ({src + 1}, {dst + 1}, player {player + 1}) changes "
                    "no row"
                )

    @property
    def m(self) -> int:
        return len(self.profiles[0][0])

    def instance(self, index: int) -> Instance:
        return Instance.from_rows(self.profiles[index])


def _check_epsilon(name: str, epsilon: Fraction) -> Fraction:
    epsilon = Fraction(epsilon)
    limit, inclusive = _EPSILON_RANGE[name]
    ok = 0 < epsilon and (epsilon <= limit if inclusive else epsilon < limit)
    if not ok:
        bracket = "]" if inclusive else ")"
        raise ValueError(
            f"fixture {name} needs epsilon in (0, {limit}{bracket}, got {epsilon}"
        )
    return epsilon


def builtin_fixture(name: str, epsilon: Fraction = Fraction(1, 10)) -> ChainFixture:
    """Construct one of the built-in chains at the requested epsilon."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    e = _check_epsilon(name, epsilon)
    if name == "lemma-2+2":
        return _fixture_two_two(e)
    if name == "lemma-1+3":
        return _fixture_one_three(e)
    if name == "pr-m6":
        return _fixture_pr_m6(e)
    if name == "pr-m5":
        return _fixture_pr_m5(e)
    return _fixture_ordinal_m4(e)


def _fixture_two_two(e: Fraction) -> ChainFixture:
    """Six profiles over value multisets {2-e, 1+e, 1-e, e/2} and
    {2+e, 1+e, 1-e, e/2} (per-player shares 2 -+ e/2) that corner any
    cardinal mechanism handing two items to each player."""
    hi, lo = 2 + e, 2 - e
    up, dn, tiny = 1 + e, 1 - e, e / 2
    profiles = (
        ((lo, up, dn, tiny), (lo, up, dn, tiny)),
        ((lo, up, dn, tiny), (tiny, hi, dn, up)),
        ((up, lo, dn, tiny), (tiny, hi, dn, up)),
        ((up, lo, dn, tiny), (up, hi, dn, tiny)),
        ((up, dn, lo, tiny), (lo, up, dn, tiny)),
        ((up, dn, lo, tiny), (up, hi, dn, tiny)),
    )
    edges = ((1, 0, 1), (1, 2, 0), (3, 2, 1), (0, 4, 0), (5, 4, 1), (5, 3, 0))
    return ChainFixture(
        name="lemma-2+2",
        epsilon=e,
        threshold=Fraction(1, 2) + e,
        model=CARDINAL,
        profiles=profiles,
        deviation_edges=edges,
    )


def _fixture_one_three(e: Fraction) -> ChainFixture:
    """Chain closing the one-item-to-a-player case in the cardinal model; it
    ends at an all-ones row whose owner can then be kept below half her
    share."""
    lo = 2 - e
    up, dn, tiny = 1 + e, 1 - e, e / 2
    one = Fraction(1)
    profiles = (
        ((lo, up, dn, tiny), (lo, up, dn, tiny)),
        ((lo, up, dn, tiny), (tiny, lo, up, dn)),
        ((dn, lo, tiny, dn), (tiny, lo, up, dn)),
        ((dn, lo, tiny, dn), (lo, up, dn, tiny)),
        ((dn, lo, tiny, up), (dn, tiny, lo, up)),
        ((up, dn, lo, tiny), (dn, tiny, lo, up)),
        ((up, dn, lo, tiny), (lo, up, dn, tiny)),
        ((one, one, one, one), (lo, up, dn, tiny)),
    )
    edges = (
        (1, 0, 1),
        (1, 2, 0),
        (3, 2, 1),
        (4, 5, 0),
        (6, 5, 1),
        (0, 7, 0),
        (3, 7, 0),
        (6, 7, 0),
    )
    return ChainFixture(
        name="lemma-1+3",
        epsilon=e,
        threshold=Fraction(1, 2) + e,
        model=CARDINAL,
        profiles=profiles,
        deviation_edges=edges,
    )


def _fixture_pr_m6(e: Fraction) -> ChainFixture:
    """Five public-rankings profiles on six commonly-ranked items (shares 3
    or 1 per row) bounding what a truthful mechanism can reach there."""
    one = Fraction(1)
    u = Fraction(1, 5)
    q = Fraction(1, 4)
    ones = (one,) * 6
    spiked = (one, u, u, u, u, u)
    split = (Fraction(7, 10), Fraction(3, 10), q, q, q, q)
    profiles = (
        (ones, ones),
        (spiked, ones),
        (spiked, spiked),
        (ones, spiked),
        (ones, split),
    )
    edges = ((1, 0, 0), (1, 2, 1), (3, 2, 0), (3, 4, 1))
    return ChainFixture(
        name="pr-m6",
        epsilon=e,
        threshold=Fraction(4, 5) + e,
        model=PUBLIC_RANKINGS,
        profiles=profiles,
        deviation_edges=edges,
    )


def _fixture_pr_m5(e: Fraction) -> ChainFixture:
    """The five-item public-rankings chain; both halves of the case split on
    who receives the top item are transcribed (they share three profiles)."""
    one = Fraction(1)
    q = Fraction(1, 4)
    ones = (one,) * 5
    spiked = (one, q, q, q, q)
    near = (Fraction(11, 20), Fraction(9, 20), Fraction(17, 50), Fraction(17, 50), Fraction(17, 50))
    flat = (Fraction(1, 2), Fraction(1, 2), Fraction(7, 20), Fraction(33, 100), Fraction(8, 25))
    low = (Fraction(1, 2), Fraction(1, 5), Fraction(1, 5), Fraction(1, 5), Fraction(1, 10))
    profiles = (
        (ones, ones),  # 1
        (spiked, ones),  # 2
        (spiked, spiked),  # 3
        (ones, spiked),  # 4
        (ones, near),  # 5
        (spiked, flat),  # 6
        (low, flat),  # 7
    )
    edges = (
        (1, 0, 0),
        (1, 2, 1),
        (3, 2, 0),
        (3, 4, 1),
        (0, 4, 1),
        (0, 3, 1),
        (3, 0, 1),
        (5, 2, 1),
        (5, 6, 0),
    )
    return ChainFixture(
        name="pr-m5",
        epsilon=e,
        threshold=Fraction(5, 6) + e,
        model=PUBLIC_RANKINGS,
        profiles=profiles,
        deviation_edges=edges,
    )


def _fixture_ordinal_m4(e: Fraction) -> ChainFixture:
    """Six ranking profiles on four items for the ordinal model.  Values are
    near-ties realizing the rankings: the item at rank k is worth the k-th
    entry of (1+e, 1+e/2, 1, 1-e), so every row's two-bundle share is
    exactly 2 and a single top item is worth (1+e)/2 of it, under half plus
    epsilon."""
    weights = (1 + e, 1 + e / 2, Fraction(1), 1 - e)

    def row_for(order: Sequence[int]) -> Row:
        row = [Fraction(0)] * 4
        for rank, item in enumerate(order):
            row[item] = weights[rank]
        return tuple(row)

    abcd = (0, 1, 2, 3)
    abdc = (0, 1, 3, 2)
    bdca = (1, 3, 2, 0)
    bacd = (1, 0, 2, 3)
    profiles = (
        (row_for(abcd), row_for(abcd)),
        (row_for(abcd), row_for(abdc)),
        (row_for(abcd), row_for(bdca)),
        (row_for(bacd), row_for(bdca)),
        (row_for(bacd), row_for(bacd)),
        (row_for(bacd), row_for(abcd)),
    )
    edges = ((0, 1, 1), (2, 1, 1), (2, 3, 0), (4, 3, 1), (4, 5, 1), (0, 5, 0))
    return ChainFixture(
        name="ordinal-m4",
        epsilon=e,
        threshold=Fraction(1, 2) + e,
        model=ORDINAL,
        profiles=profiles,
        deviation_edges=edges,
    )


@dataclass(frozen=True)
class ProfileOutcome:
    index: int
    bundles: tuple[tuple[int, ...], ...]
    values: tuple[Fraction, ...]
    shares: tuple[Fraction, ...]
    ratios: tuple[Fraction, ...]
    meets_threshold: bool


@dataclass(frozen=True)
class EdgeOutcome:
    edge: tuple[int, int, int]
    truthful_value: Fraction
    deviation_value: Fraction
    gain: Fraction

    @property
    def profitable(self) -> bool:
        return self.gain > 0


@dataclass(frozen=True)
class ChainReport:
    fixture: str
    mechanism: str
    model: str
    threshold: Fraction
    profiles: tuple[ProfileOutcome, ...]
    edges: tuple[EdgeOutcome, ...]
    verdict: str
    detail: str


def _reported_for_edge(
    fix: ChainFixture, model: str, src: int, dst: int, player: int
):
    """The misreport object handed to the mechanism for one deviation edge."""
    reported_rows = list(fix.profiles[src])
    reported_rows[player] = fix.profiles[dst][player]
    if model == ORDINAL:
        inst = Instance.from_rows(reported_rows)
        return [derive_ranking(inst, i) for i in range(2)]
    return Instance.from_rows(reported_rows)


def run_chain(
    fix: ChainFixture, mech: Mechanism, model: str, seed: int = 0
) -> ChainReport:
    """Run a mechanism through every profile and deviation edge of a chain.

    The verdict is APPROX-FAILURE on the first profile where some player's
    ratio drops below the threshold, otherwise MANIPULABLE on the first edge
    whose deviator strictly gains (at her true values), otherwise CONSISTENT.
    """
    outcomes = []
    failure = None
    for idx in range(len(fix.profiles)):
        inst = fix.instance(idx)
        alloc = run_mechanism(mech, model, inst, None, seed)
        values = tuple(Fraction(inst.value(i, alloc.bundles[i])) for i in range(2))
        shares = tuple(maximin_share(inst, i, 2) for i in range(2))
        ratios = tuple(
            values[i] / shares[i] if shares[i] else Fraction(0) for i in range(2)
        )
        meets = all(ratios[i] >= fix.threshold for i in range(2))
        outcomes.append(
            ProfileOutcome(
                index=idx,
                bundles=tuple(tuple(sorted(b)) for b in alloc.bundles),
                values=values,
                shares=shares,
                ratios=ratios,
                meets_threshold=meets,
            )
        )
        if not meets and failure is None:
            player = min(i for i in range(2) if ratios[i] < fix.threshold)
            failure = (idx, player, ratios[player])

    edge_outcomes = []
    manipulation = None
    for edge in fix.deviation_edges:
        src, dst, player = edge
        inst = fix.instance(src)
        reported = _reported_for_edge(fix, model, src, dst, player)
        alloc = run_mechanism(mech, model, inst, reported, seed)
        d_val = Fraction(inst.value(player, alloc.bundles[player]))
        t_val = outcomes[src].values[player]
        out = EdgeOutcome(
            edge=edge, truthful_value=t_val, deviation_value=d_val, gain=d_val - t_val
        )
        edge_outcomes.append(out)
        if out.profitable and manipulation is None:
            manipulation = (edge, out.gain)

    if failure is not None:
        idx, player, ratio = failure
        verdict = APPROX_FAILURE
        detail = (
            f"profile {idx + 1}: player {player + 1} gets ratio {ratio} "
            f"< threshold {fix.threshold}"
        )
    elif manipulation is not None:
        (src, dst, player), gain = manipulation
        verdict = MANIPULABLE
        detail = (
            f"edge {src + 1}->{dst + 1}: player {player + 1} gains {gain} "
            "by deviating"
        )
    else:
        verdict = CONSISTENT
        detail = "mechanism evades the chain"
    return ChainReport(
        fixture=fix.name,
        mechanism=str(mech),
        model=model,
        threshold=fix.threshold,
        profiles=tuple(outcomes),
        edges=tuple(edge_outcomes),
        verdict=verdict,
        detail=detail,
    )


def fixture_applies(fix: ChainFixture, mech: Mechanism, seed: int = 0) -> bool:
    """Whether the chain's impossibility argument covers this mechanism: the
    model must match, the mechanism must run at the fixture's dimensions, and
    any structural premise must hold (the two-items-each chain only binds
    mechanisms that split 2+2 on every profile; the one-item chain only binds
    mechanisms that hand a single item to someone somewhere)."""
    if fix.model not in models_for(mech):
        return False
    try:
        allocations = [
            run_mechanism(mech, fix.model, fix.instance(i), None, seed)
            for i in range(len(fix.profiles))
        ]
    except (MechanismError, InfeasibleParams):
        return False
    sizes = [tuple(len(b) for b in alloc.bundles) for alloc in allocations]
    if fix.name == "lemma-2+2":
        return all(size == (2, 2) for size in sizes)
    if fix.name == "lemma-1+3":
        return any(1 in size for size in sizes)
    return True


def parse_fixture(text: str, name: str = "custom") -> ChainFixture:
    """Parse the fixture text format: optional ``epsilon`` and ``model``
    lines, a ``threshold`` line, ``profile`` blocks of two value rows, and
    ``edge FROM TO PLAYER`` lines (1-based)."""
    threshold = None
    epsilon = Fraction(1, 10)
    model = CARDINAL
    profiles: list[Profile] = []
    edges: list[tuple[int, int, int]] = []
    pending_rows: list[Row] = []
    in_profile = False

    def flush_profile(lineno):
        nonlocal in_profile
        if in_profile:
            if len(pending_rows) != 2:
                raise ValueError(
                    f"line {lineno}: profile needs exactly 2 rows, got {len(pending_rows)}"
                )
            profiles.append((pending_rows[0], pending_rows[1]))
            pending_rows.clear()
            in_profile = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "threshold":
            flush_profile(lineno)
            threshold = Fraction(tokens[1])
        elif head == "epsilon":
            flush_profile(lineno)
            epsilon = Fraction(tokens[1])
        elif head == "model":
            flush_profile(lineno)
            model = tokens[1]
        elif head == "profile":
            flush_profile(lineno)
            in_profile = True
        elif head == "edge":
            flush_profile(lineno)
            if len(tokens) != 4:
                raise ValueError(f"line {lineno}: edge needs FROM TO PLAYER")
            src, dst, player = (int(t) for t in tokens[1:])
            edges.append((src - 1, dst - 1, player - 1))
        elif in_profile:
            pending_rows.append(tuple(Fraction(t) for t in tokens))
        else:
            raise ValueError(f"line {lineno}: unexpected content {line!r}")
    flush_profile("end")
    if threshold is None:
        raise ValueError("fixture file is missing a threshold line")
    return ChainFixture(
        name=name,
        epsilon=epsilon,
        threshold=threshold,
        model=model,
        profiles=tuple(profiles),
        deviation_edges=tuple(edges),
    )


def format_fixture(fix: ChainFixture) -> str:
    lines = [
        f"epsilon {fix.epsilon}",
        f"model {fix.model}",
        f"threshold {fix.threshold}",
    ]
    for profile in fix.profiles:
        lines.append("profile")
        for row in profile:
            lines.append(" ".join(str(v) for v in row))
    for src, dst, player in fix.deviation_edges:
        lines.append(f"edge {src + 1} {dst + 1} {player + 1}")
    return "\n".join(lines) + "\n"
