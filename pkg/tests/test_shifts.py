import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from suborbit import (
    ContractionError,
    SeqVector,
    ShiftOperators,
    UnboundedOperatorError,
    WeightedLpSpace,
    WeightSequence,
    apply_L_pow,
    apply_R_pow,
    apply_S_pow,
    apply_T_pow,
    norm,
    sample_priesz_bounds,
    shift_norms,
)
from suborbit.shifts import check_riesz_consistency, default_lambda, sampled_shift_norms

from test_spaces import sparse_vectors, spaces


def e(k, value=1.0):
    return SeqVector.basis(k, value)


class TestShiftNorms:
    def test_geometric_l1(self, geometric_l1):
        assert shift_norms(geometric_l1) == (0.5, 2.0)

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
    def test_scaled_mode(self, p):
        space = WeightedLpSpace(p, WeightSequence.power(2.0), "scaled")
        assert shift_norms(space) == (1.0, 1.0)

    def test_linear_weight_l2(self):
        space = WeightedLpSpace(2.0, WeightSequence.power(1.0))
        assert shift_norms(space) == pytest.approx((1.0, math.sqrt(2.0)), rel=1e-15)

    def test_linear_weight_brute_force(self):
        space = WeightedLpSpace(2.0, WeightSequence.power(1.0))
        sup_L, sup_R = sampled_shift_norms(space, 50, 300, random_state=0)
        exact_L, exact_R = shift_norms(space)
        assert sup_L <= exact_L * (1 + 1e-12) and sup_R <= exact_R * (1 + 1e-12)
        assert sup_L == pytest.approx(exact_L, abs=2e-2)
        assert sup_R == pytest.approx(exact_R, abs=1e-12)

    def test_table_weight(self):
        space = WeightedLpSpace(1.0, WeightSequence.table([1.0, 8.0, 2.0], 2.0))
        assert shift_norms(space) == (4.0, 8.0)

    @given(spaces.filter(lambda s: s.basis == "canonical"))
    def test_sampled_never_exceeds_formula(self, space):
        sup_L, sup_R = sampled_shift_norms(space, 12, 20, random_state=1)
        exact_L, exact_R = shift_norms(space)
        assert sup_L <= exact_L * (1 + 1e-10)
        assert sup_R <= exact_R * (1 + 1e-10)

    def test_unbounded_right_shift_is_named(self):
        with pytest.raises(UnboundedOperatorError) as info:
            shift_norms(WeightedLpSpace(2.0, WeightSequence.gaussian(0.5)))
        assert info.value.operator == "R"

    def test_unbounded_left_shift_is_named(self):
        with pytest.raises(UnboundedOperatorError) as info:
            shift_norms(WeightedLpSpace(2.0, WeightSequence.gaussian(-0.5)))
        assert info.value.operator == "L"


class TestShiftActions:
    def test_left_shift_examples(self):
        assert apply_L_pow(e(3), 2) == e(1)
        assert apply_L_pow(e(3), 3).is_zero
        assert apply_L_pow(SeqVector({2: 1.0, 5: 1.0}), 1) == SeqVector({1: 1.0, 4: 1.0})

    def test_right_shift_examples(self):
        assert apply_R_pow(e(1), 4) == e(5)
        v = SeqVector({1: 1.0, 2: 1.0})
        assert apply_R_pow(v, 0) == v

    @given(sparse_vectors(), st.integers(0, 40))
    def test_left_inverse(self, v, n):
        assert apply_L_pow(apply_R_pow(v, n), n) == v

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            apply_L_pow(e(1), -1)


class TestWeightedPair:
    @pytest.fixture
    def ops(self, l2):
        return ShiftOperators.from_space(l2, 4.0)

    def test_T_examples(self, ops):
        assert apply_T_pow(ops, e(3), 2).materialized() == e(1, 16.0)
        assert apply_T_pow(ops, e(3), 3).is_zero
        assert apply_T_pow(ops, e(4, 4.0 ** -3), 3).materialized() == e(1)

    def test_S_examples(self, ops):
        assert apply_S_pow(ops, e(1), 1).materialized() == e(2, 0.25)
        assert apply_S_pow(ops, e(1), 0) == e(1)

    def test_exponents_cancel_exactly_at_any_size(self, ops):
        v = SeqVector({1: 0.3, 4: -1.7})
        back = apply_T_pow(ops, apply_S_pow(ops, v, 5000), 5000)
        assert back.scale_exponent == 0
        assert back == v

    @given(sparse_vectors(), st.integers(0, 30))
    def test_TS_identity(self, v, n):
        ops = ShiftOperators.from_space(WeightedLpSpace(2.0), 3.0)
        assert apply_T_pow(ops, apply_S_pow(ops, v, n), n) == v

    @given(sparse_vectors(), st.integers(0, 10))
    def test_S_contracts(self, v, n):
        space = WeightedLpSpace(2.0, WeightSequence.geometric(3.0), "scaled")
        ops = ShiftOperators.from_space(space)
        lhs = norm(space, apply_S_pow(ops, v, n))
        assert lhs <= ops.norm_S ** n * norm(space, v) * (1 + 1e-10)

    @given(spaces.filter(lambda s: s.basis == "canonical"), sparse_vectors(),
           st.integers(0, 6))
    def test_power_norm_bounds(self, space, v, n):
        norm_L, norm_R = shift_norms(space)
        base = norm(space, v)
        assert norm(space, apply_L_pow(v, n)) <= norm_L ** n * base * (1 + 1e-10)
        assert norm(space, apply_R_pow(v, n)) <= norm_R ** n * base * (1 + 1e-10)

    def test_lambda_must_exceed_right_norm(self, geometric_l1):
        with pytest.raises(ContractionError, match="must exceed"):
            ShiftOperators.from_space(geometric_l1, 2.0)

    def test_default_lambda(self, geometric_l1):
        assert default_lambda(geometric_l1) == 3.0
        ops = ShiftOperators.from_space(geometric_l1)
        assert ops.norm_S == pytest.approx(2 / 3)
        assert ops.norm_T_bound == pytest.approx(1.5)


class TestRiesz:
    def test_scaled_mode_ratios_are_one(self):
        rng = np.random.RandomState(7)
        for _ in range(20):
            space = WeightedLpSpace(rng.uniform(1, 4), WeightSequence.geometric(rng.uniform(.5, 3)),
                                    "scaled")
            lo, hi = sample_priesz_bounds(space, 50, 20, random_state=rng)
            assert lo == pytest.approx(1.0, abs=1e-12) and hi == pytest.approx(1.0, abs=1e-12)

    def test_unweighted_canonical(self, l2):
        lo, hi = sample_priesz_bounds(l2, 30, 10, random_state=0)
        assert lo == pytest.approx(1.0, abs=1e-12) and hi == pytest.approx(1.0, abs=1e-12)

    def test_weighted_canonical_spread(self, geometric_l1):
        lo, hi = sample_priesz_bounds(geometric_l1, 200, 10, random_state=0)
        # weights 2^k on indices <= 10 keep every ratio within [2, 2^10]; the
        # smallest sampled ratio never exceeds the largest
        assert 2.0 * (1 - 1e-12) <= lo <= hi <= 2.0 ** 10 * (1 + 1e-12)
        assert hi / lo > 2.0

    def test_consistency_in_scaled_mode(self):
        space = WeightedLpSpace(2.0, WeightSequence.power(1.0), "scaled")
        norm_L, norm_R = shift_norms(space)
        A, B = sample_priesz_bounds(space, 40, 15, random_state=3)
        assert norm_L * A <= B * (1 + 1e-12)
        assert norm_R == 1.0
        assert check_riesz_consistency(space, 1.0, 1.0)

    def test_seed_env_makes_sampling_reproducible(self, monkeypatch, geometric_l1):
        monkeypatch.setenv("SUBORBIT_SEED", "11")
        first = sample_priesz_bounds(geometric_l1, 20, 5)
        second = sample_priesz_bounds(geometric_l1, 20, 5)
        assert first == second
