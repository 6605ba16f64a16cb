import math
import random
from fractions import Fraction

import pytest

from conftest import random_instance
from mmsfair import (
    InfeasibleParams,
    MechanismError,
    PickingSequence,
    build_sqrt_sequence,
    derive_ranking,
    harmonic_number,
    length_bound,
    maximin_share,
    mechanism,
    pair_schedule,
    power_lower_rational,
    run_picking_sequence,
    sqrt_seq_params,
    theoretical_ratio,
    verify_pick_positions,
    verify_schedule_demand,
)


class TestPowerLowerRational:
    def test_lower_bound_and_tightness(self):
        for n, eps in ((17, Fraction(1, 4)), (5, Fraction(3, 20)), (2, Fraction(1, 2))):
            exponent = Fraction(1, 2) + eps
            alpha = power_lower_rational(n, exponent)
            assert alpha.denominator <= 10**6
            # exact check alpha <= n**-exponent
            a, b = exponent.numerator, exponent.denominator
            assert alpha.numerator**b * n**a <= alpha.denominator**b
            target = n ** (-float(exponent))
            assert target - float(alpha) < 2e-6

    def test_trivial_cases(self):
        assert power_lower_rational(1, Fraction(3, 4)) == 1
        assert power_lower_rational(4, Fraction(1, 2)) == Fraction(1, 2)
        assert power_lower_rational(8, Fraction(1, 3)) == Fraction(1, 2)


class TestBuild:
    def test_single_player(self):
        seq = build_sqrt_sequence(sqrt_seq_params(1, 6, Fraction(1, 4)))
        assert seq.picks == (0,) * 6
        assert verify_pick_positions(seq, 1, Fraction(1)) == []

    def test_smallest_feasible_m_for_17_players(self):
        eps = Fraction(1, 4)
        m = 17
        while True:
            params = sqrt_seq_params(17, m, eps)
            if length_bound(params) <= m:
                break
            m += 1
        assert m == 29
        seq = build_sqrt_sequence(params)
        assert len(seq.picks) == 29
        assert not seq.cyclic
        assert set(seq.picks) == set(range(17))
        assert verify_pick_positions(seq, 17, params.alpha) == []
        assert verify_schedule_demand(params) == []

    def test_five_players_note(self):
        eps = Fraction(3, 20)
        params0 = sqrt_seq_params(5, 1, eps)
        slack = 1 - params0.alpha * harmonic_number(5)
        assert slack > 0
        m = math.ceil(Fraction(5) / slack)
        params = sqrt_seq_params(5, m, eps)
        seq = build_sqrt_sequence(params)
        assert len(seq.picks) == m
        assert verify_pick_positions(seq, 5, params.alpha) == []

    def test_infeasible_reports_both_sides(self):
        with pytest.raises(InfeasibleParams) as err:
            build_sqrt_sequence(sqrt_seq_params(17, 28, Fraction(1, 4)))
        assert err.value.required == 29
        assert err.value.m == 28
        assert "29" in str(err.value) and "28" in str(err.value)

    def test_deterministic(self):
        p = sqrt_seq_params(17, 40, Fraction(1, 4))
        assert build_sqrt_sequence(p) == build_sqrt_sequence(p)

    def test_pair_deadlines_shape(self):
        params = sqrt_seq_params(17, 29, Fraction(1, 4))
        pairs = pair_schedule(params)
        assert [p.deadline for p in pairs] == sorted(p.deadline for p in pairs)
        for player, deadline in pairs:
            i = player + 1
            step = math.floor(Fraction(17 - i + 1) / params.alpha)
            assert (deadline - i) % step == 0

    def test_allocation_guarantee_random(self):
        params = sqrt_seq_params(17, 29, Fraction(1, 4))
        seq = build_sqrt_sequence(params)
        rng = random.Random(2)
        for _ in range(25):
            inst = random_instance(rng, 17, 29, top=3)
            rankings = [derive_ranking(inst, i) for i in range(17)]
            alloc = run_picking_sequence(rankings, 29, seq)
            for i in range(17):
                assert inst.value(i, alloc.bundles[i]) >= params.alpha * maximin_share(
                    inst, i, 17
                )


class TestVerifyPickPositions:
    def test_deliberate_counterexample(self):
        violations = verify_pick_positions(
            PickingSequence((1, 0)), 2, Fraction(1, 2)
        )
        assert len(violations) == 1
        v = violations[0]
        assert (v.player, v.occurrence, v.position, v.bound) == (0, 0, 2, 1)

    def test_cyclic_rejected(self):
        with pytest.raises(MechanismError):
            verify_pick_positions(
                PickingSequence((0,), cyclic=True), 1, Fraction(1, 2)
            )


class TestTheoreticalRatio:
    def test_known_values(self):
        assert theoretical_ratio(mechanism("pick-seq"), 2, 6) == Fraction(1, 3)
        assert theoretical_ratio(mechanism("best-item"), 2, 6) == Fraction(1, 3)
        assert theoretical_ratio(mechanism("pr"), 2, 9) == Fraction(2, 3)
        assert theoretical_ratio(mechanism("pr"), 3, 5) == Fraction(1, 2)
        assert theoretical_ratio(mechanism("pick-seq"), 3, 4) == 1
        assert theoretical_ratio(mechanism("best-item"), 2, 3) == 1

    def test_sqrt_seq_uses_alpha(self):
        mech = mechanism("sqrt-seq", Fraction(1, 4))
        assert theoretical_ratio(mech, 17, 29) == power_lower_rational(
            17, Fraction(3, 4)
        )

    def test_undefined_for_other_mechanisms(self):
        with pytest.raises(MechanismError):
            theoretical_ratio(mechanism("cut-and-choose"), 2, 4)
