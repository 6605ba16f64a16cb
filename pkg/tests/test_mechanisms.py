import random
from fractions import Fraction

import pytest

from conftest import random_instance
from mmsfair import (
    CARDINAL,
    ORDINAL,
    PUBLIC_RANKINGS,
    Allocation,
    Instance,
    MechanismError,
    PickingSequence,
    Ranking,
    approximation_ratio,
    best_item_sequence,
    cut_and_choose,
    derive_ranking,
    maximin_share,
    mechanism,
    mechanism_pr_exact_24,
    positions_bundle,
    pr_sequence,
    random_uniform_allocation,
    run_mechanism,
    run_picking_sequence,
    validate_allocation,
)


class TestSequences:
    def test_best_item(self):
        assert best_item_sequence(2, 4).picks == (0, 1, 1, 1)
        assert best_item_sequence(3, 3).picks == (0, 1, 2)
        assert best_item_sequence(4, 10).picks == (0, 1, 2) + (3,) * 7
        assert not best_item_sequence(2, 4).cyclic

    def test_best_item_fewer_items_than_players(self):
        assert best_item_sequence(4, 2).picks == (0, 1)

    def test_pr(self):
        assert pr_sequence(2).picks == (0, 1, 1)
        assert pr_sequence(1).picks == (0, 0)
        assert pr_sequence(3).picks == (0, 1, 2, 2)
        assert pr_sequence(3).cyclic


class TestRunPickingSequence:
    def test_cyclic_two_players(self):
        r = Ranking((0, 1, 2, 3))
        alloc = run_picking_sequence(
            [r, r], 4, PickingSequence((0, 1, 1), cyclic=True)
        )
        assert alloc.bundles == (frozenset({0, 3}), frozenset({1, 2}))

    def test_single_player_takes_all(self):
        alloc = run_picking_sequence(
            [Ranking((2, 0, 1))], 3, PickingSequence((0,), cyclic=True)
        )
        assert alloc.bundles == (frozenset({0, 1, 2}),)

    def test_hand_simulation(self, ex23):
        # picks: p1 takes a, p2 takes b, p3 takes c then d then e
        rankings = [derive_ranking(ex23, i) for i in range(3)]
        alloc = run_picking_sequence(rankings, 5, PickingSequence((0, 1, 2, 2, 2)))
        assert alloc.bundles == (
            frozenset({0}),
            frozenset({1}),
            frozenset({2, 3, 4}),
        )

    def test_exhausted_sequence(self):
        r = Ranking((0, 1, 2))
        with pytest.raises(MechanismError, match="exhausted"):
            run_picking_sequence([r, r], 3, PickingSequence((0, 1)))

    def test_pick_out_of_range(self):
        r = Ranking((0, 1))
        with pytest.raises(MechanismError, match="out of range"):
            run_picking_sequence([r], 2, PickingSequence((0, 1)))


class TestPositionsBundle:
    def test_examples(self):
        r = Ranking((0, 1, 2, 3))
        assert positions_bundle(r, (2, 3)) == {1, 2}
        assert positions_bundle(r, (1,)) == {0}
        assert positions_bundle(Ranking((3, 2, 1, 0)), (1, 4)) == {3, 0}

    def test_errors(self):
        r = Ranking((0, 1, 2))
        with pytest.raises(IndexError):
            positions_bundle(r, (4,))
        with pytest.raises(ValueError):
            positions_bundle(r, (1, 1))


class TestPrExact24:
    def test_distinct_favorites_runs_sequence(self):
        inst = Instance.from_rows([[4, 3, 2, 1], [3, 4, 2, 1]])
        alloc = mechanism_pr_exact_24(inst)
        assert alloc.bundles == (frozenset({0, 3}), frozenset({1, 2}))

    def test_shared_favorite_tie_keeps_top_item(self):
        inst = Instance.from_rows([[2, 1, 1, 0], [3, 1, 1, 1]])
        alloc = mechanism_pr_exact_24(inst)
        assert alloc.bundles == (frozenset({0}), frozenset({1, 2, 3}))

    def test_shared_favorite_pair_better(self):
        inst = Instance.from_rows([[3, 2, 2, 0], [3, 1, 1, 1]])
        alloc = mechanism_pr_exact_24(inst)
        assert alloc.bundles == (frozenset({1, 2}), frozenset({0, 3}))

    def test_wrong_dimensions(self):
        with pytest.raises(MechanismError):
            mechanism_pr_exact_24(Instance.from_rows([[1, 1, 1]] * 2))
        with pytest.raises(MechanismError):
            mechanism_pr_exact_24(Instance.from_rows([[1, 1, 1, 1]] * 3))

    def test_always_exact_on_small_grid(self):
        from itertools import product

        from mmsfair import UNBOUNDED

        rows = list(product((0, 1, 2), repeat=4))
        for r1 in rows:
            for r2 in rows:
                inst = Instance.from_rows([r1, r2])
                ratio = approximation_ratio(inst, mechanism_pr_exact_24(inst))
                assert ratio is UNBOUNDED or ratio >= 1, (r1, r2)

    def test_feasible_bundles_all_clear_share(self):
        # ranks 1+2, 1+3, 1+4, any 3 items, and the better of {rank 1} and
        # ranks 2+3 are each worth >= the player's two-bundle share
        from itertools import combinations, product

        for row in product((0, 1, 2, 3), repeat=4):
            inst = Instance.from_rows([row, row])
            share = maximin_share(inst, 0, 2)
            ranking = derive_ranking(inst, 0)
            for positions in ((1, 2), (1, 3), (1, 4)):
                bundle = positions_bundle(ranking, positions)
                assert inst.value(0, bundle) >= share
            for triple in combinations(range(4), 3):
                assert inst.value(0, triple) >= share
            top = inst.value(0, positions_bundle(ranking, (1,)))
            pair = inst.value(0, positions_bundle(ranking, (2, 3)))
            assert max(top, pair) >= share


class TestCutAndChoose:
    def test_proposer_suffers_lexicographic_cut(self):
        inst = Instance.from_rows([[1, 1, 1, 1], [3, 1, 1, 1]])
        alloc = cut_and_choose(inst)
        assert alloc.bundles == (frozenset({2, 3}), frozenset({0, 1}))

    def test_two_items(self):
        inst = Instance.from_rows([[1, 0], [1, 0]])
        alloc = cut_and_choose(inst)
        assert alloc.bundles == (frozenset({1}), frozenset({0}))

    def test_requires_two_players(self):
        with pytest.raises(MechanismError):
            cut_and_choose(Instance.from_rows([[1, 1]] * 3))

    def test_exact_under_truthful_reports(self):
        rng = random.Random(13)
        for _ in range(40):
            inst = random_instance(rng, 2, rng.randrange(1, 8))
            alloc = cut_and_choose(inst)
            for i in range(2):
                assert inst.value(i, alloc.bundles[i]) >= maximin_share(inst, i, 2)


class TestRandomUniform:
    def test_single_player(self):
        for seed in (0, 1, 99):
            alloc = random_uniform_allocation(1, 5, seed)
            assert alloc.bundles == (frozenset(range(5)),)

    def test_deterministic_given_seed(self):
        assert random_uniform_allocation(3, 5, 7) == random_uniform_allocation(3, 5, 7)
        assert random_uniform_allocation(3, 5, 7) != random_uniform_allocation(3, 5, 8)

    def test_empirical_frequency(self):
        hits = 0
        trials = 100_000
        for seed in range(trials):
            if 0 in random_uniform_allocation(3, 5, seed).bundles[0]:
                hits += 1
        assert abs(hits / trials - 1 / 3) < 0.01


class TestRunMechanism:
    def test_best_item_ordinal(self, ex23):
        alloc = run_mechanism(mechanism("best-item"), ORDINAL, ex23)
        assert alloc.bundles[0] == {0}
        assert alloc.bundles == (frozenset({0}), frozenset({1}), frozenset({2, 3, 4}))

    def test_cardinal_equals_ordinal_on_derived_rankings(self):
        rng = random.Random(3)
        pr = mechanism("pr")
        for _ in range(30):
            inst = random_instance(rng, rng.choice([2, 3]), rng.randrange(1, 8))
            rankings = [derive_ranking(inst, i) for i in range(inst.n)]
            assert run_mechanism(pr, CARDINAL, inst) == run_mechanism(
                pr, ORDINAL, inst, rankings
            )

    def test_public_ignores_inconsistent_row(self):
        inst = Instance.from_rows([[3, 2, 1, 0], [3, 2, 1, 0]])
        # player 1 reports a row
        # inconsistent with her (public) ranking: it is replaced by the truth
        lying = Instance.from_rows([[0, 1, 2, 3], [3, 2, 1, 0]])
        mech = mechanism("pr-exact-2-4")
        assert run_mechanism(mech, PUBLIC_RANKINGS, inst, lying) == run_mechanism(
            mech, PUBLIC_RANKINGS, inst
        )

    def test_model_mismatch_errors(self, ex23):
        with pytest.raises(MechanismError, match="not defined"):
            run_mechanism(mechanism("pr-exact-2-4"), ORDINAL, ex23)
        with pytest.raises(MechanismError, match="not defined"):
            run_mechanism(mechanism("cut-and-choose"), ORDINAL, ex23)
        with pytest.raises(MechanismError, match="not defined"):
            run_mechanism(
                mechanism("pr-exact-2-4"),
                CARDINAL,
                Instance.from_rows([[1, 1, 1, 1]] * 2),
            )

    def test_unknown_mechanism_and_bad_epsilon(self):
        with pytest.raises(MechanismError):
            mechanism("nope")
        with pytest.raises(MechanismError):
            mechanism("sqrt-seq")
        with pytest.raises(MechanismError):
            mechanism("pr", epsilon=Fraction(1, 4))

    def test_outputs_always_valid(self):
        rng = random.Random(11)
        mechs = [
            (mechanism("best-item"), CARDINAL),
            (mechanism("pick-seq"), ORDINAL),
            (mechanism("pr"), PUBLIC_RANKINGS),
            (mechanism("cut-and-choose"), CARDINAL),
            (mechanism("random-uniform"), ORDINAL),
        ]
        for _ in range(30):
            inst = random_instance(rng, 2, rng.randrange(1, 8))
            for mech, model in mechs:
                alloc = run_mechanism(mech, model, inst, seed=rng.randrange(100))
                assert validate_allocation(inst, alloc) == []

    def test_reported_type_mismatch(self, ex23):
        rankings = [derive_ranking(ex23, i) for i in range(3)]
        with pytest.raises(MechanismError, match="value matrix"):
            run_mechanism(mechanism("pr"), CARDINAL, ex23, rankings)
        with pytest.raises(MechanismError, match="list of rankings"):
            run_mechanism(mechanism("pr"), ORDINAL, ex23, ex23)

    def test_column_permutation_equivariance(self):
        # permuting items permutes tie-free allocations the same way
        rng = random.Random(53)
        for mech_name in ("pick-seq", "pr"):
            mech = mechanism(mech_name)
            for _ in range(15):
                m = rng.randrange(1, 8)
                values = rng.sample(range(100), m)
                inst = Instance.from_rows([values, rng.sample(range(100), m)])
                perm = rng.sample(range(m), m)
                permuted = Instance.from_rows(
                    [[row[perm[j]] for j in range(m)] for row in inst.values]
                )
                base = run_mechanism(mech, CARDINAL, inst)
                moved = run_mechanism(mech, CARDINAL, permuted)
                expect = tuple(
                    frozenset(j for j in range(m) if perm[j] in bundle)
                    for bundle in base.bundles
                )
                assert moved.bundles == expect

    def test_value_oblivious_scaling_invariance(self):
        rng = random.Random(19)
        pr = mechanism("pr")
        for _ in range(20):
            inst = random_instance(rng, 3, 6)
            factor = Fraction(rng.randrange(1, 9), rng.randrange(1, 9))
            scaled = Instance.from_rows(
                [
                    [factor * v for v in inst.values[0]],
                    inst.values[1],
                    inst.values[2],
                ]
            )
            assert run_mechanism(pr, CARDINAL, inst) == run_mechanism(
                pr, CARDINAL, scaled
            )


class TestGuarantees:
    def test_pick_seq_tightness_all_ones(self):
        inst = Instance.from_rows([[1] * 6, [1] * 6])
        alloc = run_mechanism(mechanism("pick-seq"), CARDINAL, inst)
        assert approximation_ratio(inst, alloc) == Fraction(1, 3)

    def test_pr_guarantee_random(self):
        rng = random.Random(29)
        pr = mechanism("pr")
        for _ in range(60):
            n = rng.choice([2, 3, 4])
            inst = random_instance(rng, n, rng.randrange(1, 9))
            alloc = run_mechanism(pr, CARDINAL, inst)
            for i in range(n):
                assert inst.value(i, alloc.bundles[i]) >= Fraction(2, n + 1) * maximin_share(inst, i, n)

    def test_sqrt_seq_dispatch_guarantee(self):
        from mmsfair import sqrt_seq_params

        rng = random.Random(61)
        eps = Fraction(3, 20)
        params = sqrt_seq_params(5, 26, eps)
        mech = mechanism("sqrt-seq", eps)
        for _ in range(10):
            inst = random_instance(rng, 5, 26, top=3)
            alloc = run_mechanism(mech, PUBLIC_RANKINGS, inst)
            assert validate_allocation(inst, alloc) == []
            for i in range(5):
                share = maximin_share(inst, i, 5)
                assert inst.value(i, alloc.bundles[i]) >= params.alpha * share

    def test_pick_seq_guarantee_random(self):
        rng = random.Random(59)
        mech = mechanism("pick-seq")
        for _ in range(60):
            n = rng.choice([2, 3])
            m = rng.randrange(1, 9)
            inst = random_instance(rng, n, m)
            alloc = run_mechanism(mech, CARDINAL, inst)
            bound = Fraction(1, max(2, m - n + 2) // 2)
            for i in range(n):
                assert inst.value(i, alloc.bundles[i]) >= bound * maximin_share(inst, i, n)
