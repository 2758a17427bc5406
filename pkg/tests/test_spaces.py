import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from suborbit import (
    DecayProfile,
    InvalidIndexError,
    InvalidInputError,
    SeqVector,
    UnsupportedWeightError,
    WeightedLpSpace,
    WeightSequence,
    norm,
    scaled_basis_vector,
    tail_norm,
)
from suborbit.spaces import log_norm


def sparse_vectors(max_index=30, max_size=8):
    coeff = st.floats(-1e3, 1e3, allow_nan=False).filter(lambda x: x != 0)
    return st.dictionaries(st.integers(1, max_index), coeff, max_size=max_size).map(SeqVector)


weights = st.one_of(
    st.floats(0.1, 10).map(WeightSequence.constant),
    st.floats(0.5, 3.0).map(WeightSequence.geometric),
    st.floats(-2.0, 2.0).map(WeightSequence.power),
)
spaces = st.builds(WeightedLpSpace, st.floats(1.0, 5.0), weights,
                   st.sampled_from(["canonical", "scaled"]))


class TestNormExamples:
    def test_l1_two_unit_terms(self, l1):
        assert norm(l1, SeqVector({1: 1.0, 2: 1.0})) == 2.0

    def test_geometric_weight_first_index(self):
        space = WeightedLpSpace(2.0, WeightSequence.geometric(4.0))
        assert norm(space, SeqVector.basis(1)) == pytest.approx(2.0, rel=1e-15)

    def test_geometric_decay_tail_in_closed_form(self, l2):
        v = SeqVector.geometric_tail(0.5, math.log(2.0), center=1, start=1)
        assert v.coefficient(3) == pytest.approx(0.125)
        partial = math.sqrt(sum(4.0 ** -j for j in range(1, 200)))
        assert norm(l2, v) == pytest.approx(partial, abs=1e-12)
        assert norm(l2, v) == pytest.approx(3 ** -0.5, abs=1e-12)

    def test_non_finite_coefficient_rejected(self):
        with pytest.raises(InvalidInputError):
            SeqVector({1: math.inf})

    def test_index_below_one_rejected(self):
        with pytest.raises(InvalidIndexError):
            SeqVector({0: 1.0})

    def test_zero_coefficients_are_not_stored(self):
        assert SeqVector({1: 0.0, 2: 3.0}).support == (2,)

    def test_scaled_mode_ignores_weights(self):
        space = WeightedLpSpace(2.0, WeightSequence.geometric(4.0), "scaled")
        assert norm(space, SeqVector({1: 3.0, 5: 4.0})) == pytest.approx(5.0)

    def test_huge_weights_do_not_overflow(self):
        space = WeightedLpSpace(1.0, WeightSequence.geometric(10.0))
        assert log_norm(space, SeqVector.basis(400)) == pytest.approx(400 * math.log(10.0))

    def test_coefficients_must_respect_decay_certificate(self):
        with pytest.raises(InvalidInputError):
            SeqVector({3: 1.0}, decay=DecayProfile(1.0, 1.0, center=1))


class TestTailNorm:
    def test_two_terms_from_two(self, l1):
        assert tail_norm(l1, SeqVector({1: 1.0, 2: 1.0}), 2) == (1.0, 1.0)

    def test_empty_tail(self, l1):
        assert tail_norm(l1, SeqVector.basis(1), 2) == (0.0, 0.0)

    def test_geometric_tail_closed_form(self, l1):
        v = SeqVector.geometric_tail(0.5, math.log(2.0))
        value, bound = tail_norm(l1, v, 5)
        assert value == pytest.approx(2.0 ** -4, rel=1e-12)
        assert bound == pytest.approx(2.0 ** -4, rel=1e-12)

    def test_certificate_bounds_stored_support(self, l1):
        v = SeqVector({1: 0.5, 4: 0.01}, decay=DecayProfile(1.0, 1.0))
        value, bound = tail_norm(l1, v, 2)
        assert value == pytest.approx(0.01)
        assert bound >= value

    def test_from_index_must_be_positive(self, l1):
        with pytest.raises(InvalidIndexError):
            tail_norm(l1, SeqVector.basis(1), 0)


class TestScaledBasis:
    def test_canonical_geometric_first(self):
        v = scaled_basis_vector(WeightedLpSpace(2.0, WeightSequence.geometric(4.0)), 1)
        assert v.coefficients == {1: 0.5}

    def test_scaled_mode_is_unit(self):
        v = scaled_basis_vector(WeightedLpSpace(2.0, WeightSequence.power(3.0), "scaled"), 7)
        assert v.coefficients == {7: 1.0}

    def test_l1_geometric_third(self):
        space = WeightedLpSpace(1.0, WeightSequence.geometric(2.0))
        v = scaled_basis_vector(space, 3)
        assert v.coefficients == {3: 0.125}
        assert norm(space, v) == 1.0

    def test_invalid_index(self, l2):
        with pytest.raises(InvalidIndexError):
            scaled_basis_vector(l2, 0)

    @given(spaces, st.integers(1, 60))
    def test_always_unit_norm(self, space, k):
        assert norm(space, scaled_basis_vector(space, k)) == pytest.approx(1.0, rel=1e-12)


class TestNormProperties:
    @given(spaces, sparse_vectors(), st.floats(-50, 50, allow_nan=False))
    def test_homogeneity(self, space, v, a):
        assert norm(space, v * a) == pytest.approx(abs(a) * norm(space, v), rel=1e-12,
                                                   abs=1e-300)

    @given(spaces, sparse_vectors(), sparse_vectors())
    def test_triangle_inequality(self, space, u, v):
        assert norm(space, u + v) <= (norm(space, u) + norm(space, v)) * (1 + 1e-12)

    @given(spaces, sparse_vectors(), st.data())
    def test_solidity(self, space, c, data):
        shrink = {j: x * data.draw(st.floats(0, 1)) for j, x in c.coefficients.items()}
        assert norm(space, SeqVector(shrink)) <= norm(space, c) * (1 + 1e-12)

    @given(spaces, sparse_vectors(), st.integers(1, 35))
    def test_tail_norm_monotone_and_starts_at_norm(self, space, v, start):
        assert tail_norm(space, v, 1)[0] == pytest.approx(norm(space, v), rel=1e-12)
        assert tail_norm(space, v, start + 1)[0] <= tail_norm(space, v, start)[0] * (1 + 1e-12)


class TestWeights:
    def test_power_series_matches_partial_sums(self):
        w = WeightSequence.power(1.5, scale=2.0)
        brute = mpmath.nsum(lambda k: 0.25 ** k * 2.0 * k ** 1.5, [3, mpmath.inf])
        assert w.power_series(0.25, 3) == pytest.approx(float(brute), rel=1e-12)

    def test_table_series(self):
        w = WeightSequence.table([1.0, 4.0, 2.0], 3.0)
        brute = sum(0.5 ** k * w(k) for k in range(1, 400))
        assert w.power_series(0.5, 1) == pytest.approx(brute, rel=1e-12)

    def test_divergent_series(self):
        with pytest.raises(UnsupportedWeightError):
            WeightSequence.geometric(4.0).power_series(0.5, 1)

    def test_table_requires_positive_tail(self):
        with pytest.raises(InvalidInputError):
            WeightSequence.table([1.0], 0.0)

    def test_weights_positive(self):
        with pytest.raises(InvalidInputError):
            WeightSequence.geometric(-1.0)

    @pytest.mark.parametrize("w", [WeightSequence.constant(2.0), WeightSequence.geometric(3.0),
                                   WeightSequence.power(-1.0), WeightSequence.table([1, 2], 5)])
    def test_serialization_round_trip(self, w):
        assert WeightSequence.from_dict(w.to_dict()) == w

    def test_space_round_trip(self):
        space = WeightedLpSpace(3.0, WeightSequence.power(2.0), "scaled")
        assert WeightedLpSpace.from_dict(space.to_dict()) == space

    def test_p_below_one_rejected(self):
        with pytest.raises(InvalidInputError):
            WeightedLpSpace(0.5)


class TestSeqVector:
    def test_round_trip_dict(self):
        v = SeqVector({2: 1.5, 7: -3.0}, decay=DecayProfile(5.0, 0.1, 3))
        assert SeqVector.from_dict(v.to_dict()) == v

    def test_dense_round_trip(self):
        values = np.array([0.0, 1.0, 0.0, -2.0])
        assert np.array_equal(SeqVector.from_dense(values).to_dense(4), values)

    def test_scale_exponent_materializes(self):
        v = SeqVector({1: 1.0}, scale_base=4.0, scale_exponent=-2)
        assert v.coefficient(1) == 1 / 16
        assert v.materialized() == SeqVector({1: 1 / 16})

    def test_sum_with_different_exponents(self):
        u = SeqVector({1: 1.0}, scale_base=2.0, scale_exponent=3)
        v = SeqVector({1: 1.0, 2: 1.0})
        assert (u + v).materialized() == SeqVector({1: 9.0, 2: 1.0})
