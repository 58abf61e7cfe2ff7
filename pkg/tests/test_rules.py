import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyaproc import (
    EntryDistribution,
    RandomizedRule,
    ReplacementRule,
    deterministic_entry_moment,
    entry_mixed_moment,
    validate_deterministic,
    validate_randomized,
)


class TestReplacementRule:
    def test_balance_factor(self):
        assert ReplacementRule(1, 3, 2, 2).k == 4

    def test_unbalanced_rejected(self):
        with pytest.raises(ValueError, match="unbalanced"):
            ReplacementRule(1, 2, 3, 1)

    def test_zero_balance_rejected(self):
        with pytest.raises(ValueError):
            ReplacementRule(0, 0, 0, 0)


class TestValidateDeterministic:
    def test_reference_rule_tenable(self):
        report = validate_deterministic(ReplacementRule(1, 3, 2, 2), 3, 2)
        assert report.balanced and report.tenable

    def test_polya_eggenberger_tenable(self):
        report = validate_deterministic(ReplacementRule(2, 0, 0, 2), 1, 1)
        assert report.balanced and report.tenable

    def test_negative_offdiagonal_untenable(self):
        report = validate_deterministic(ReplacementRule(5, -1, 2, 2), 3, 2)
        assert not report.tenable

    def test_negative_diagonal_divisibility(self):
        # a = -1 divides everything, so tenable; a = -2 needs w0 and c even
        assert validate_deterministic(ReplacementRule(-1, 4, 3, 0), 3, 2).tenable
        assert not validate_deterministic(ReplacementRule(-2, 5, 3, 0), 3, 2).tenable
        assert validate_deterministic(ReplacementRule(-2, 5, 4, -1), 4, 2).tenable

    def test_bad_start_rejected(self):
        with pytest.raises(ValueError):
            validate_deterministic(ReplacementRule(1, 3, 2, 2), 0, 0)


class TestValidateRandomized:
    def test_play_the_winner_valid(self):
        rule = RandomizedRule.play_the_winner(0.3, 0.6)
        assert validate_randomized(rule).ok

    def test_mass_deficit_rejected(self):
        with pytest.raises(ValueError, match="sums to"):
            EntryDistribution(k=1, pmf=(0.5, 0.4))

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            EntryDistribution(k=1, pmf=(1.2, -0.2))

    def test_k_mismatch_rejected(self):
        with pytest.raises(ValueError, match="disagree"):
            RandomizedRule(
                dist_w=EntryDistribution.bernoulli(0.5),
                dist_z=EntryDistribution(k=2, pmf=(0.2, 0.3, 0.5)),
            )

    def test_degenerate_point_mass_accepted(self):
        # P(W = k) = 1 is accepted and reduces to a deterministic row
        rule = RandomizedRule(
            dist_w=EntryDistribution.point_mass(2, 2),
            dist_z=EntryDistribution.point_mass(2, 1),
        )
        assert validate_randomized(rule).ok


class TestEntryMixedMoment:
    def test_bernoulli_mean(self):
        assert entry_mixed_moment(EntryDistribution.bernoulli(0.3), 1, 0) == pytest.approx(0.3)

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 1.0])
    def test_bernoulli_cross_vanishes(self, p):
        # v(1-v) is identically 0 on {0, 1}
        assert entry_mixed_moment(EntryDistribution.bernoulli(p), 1, 1) == 0.0

    def test_uniform_support_enumeration(self):
        # oracle: sum over {0,1,2} of (1/3) v (2-v) = (0 + 1 + 0)/3
        dist = EntryDistribution(k=2, pmf=(1 / 3, 1 / 3, 1 / 3))
        assert entry_mixed_moment(dist, 1, 1) == pytest.approx(1 / 3)

    def test_zeroth_moment_is_one(self):
        dist = EntryDistribution(k=3, pmf=(0.1, 0.2, 0.3, 0.4))
        assert entry_mixed_moment(dist, 0, 0) == pytest.approx(1.0)

    @given(
        weights=st.lists(st.floats(0.01, 1.0), min_size=2, max_size=7),
        n=st.integers(0, 6),
    )
    @settings(max_examples=100)
    def test_binomial_consistency(self, weights, n):
        # (V + (k - V))^n = k^n term by term
        total = sum(weights)
        dist = EntryDistribution(
            k=len(weights) - 1, pmf=tuple(w / total for w in weights)
        )
        lhs = sum(
            math.comb(n, s) * entry_mixed_moment(dist, n - s, s) for s in range(n + 1)
        )
        assert lhs == pytest.approx(dist.k**n, abs=1e-10 * max(1.0, dist.k**n))


class TestDeterministicEntryMoment:
    def test_row1(self):
        assert deterministic_entry_moment(ReplacementRule(1, 3, 2, 2), 1, 2, 1) == 3.0

    def test_row2(self):
        assert deterministic_entry_moment(ReplacementRule(1, 3, 2, 2), 2, 1, 2) == 8.0

    def test_empty_product(self):
        assert deterministic_entry_moment(ReplacementRule(1, 3, 2, 2), 1, 0, 0) == 1.0

    @pytest.mark.parametrize("row,value", [(1, 1), (2, 2)])
    def test_agrees_with_point_mass(self, row, value):
        rule = ReplacementRule(1, 3, 2, 2)
        left, right = rule.row(row)
        dist = EntryDistribution.point_mass(rule.k, left)
        for r in range(4):
            for s in range(4):
                assert deterministic_entry_moment(rule, row, r, s) == pytest.approx(
                    entry_mixed_moment(dist, r, s)
                )
