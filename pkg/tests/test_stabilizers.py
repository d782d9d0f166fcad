"""Tests for stabilizers and Z-error sets."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import NumericalAmbiguityError, PreconditionError, SpecError
from src.stabilizers import (st_eps, stabilizer, stabilizer_guarded, symmetric_difference_profile,
                             translate_overlaps, z_error_set)
from src.subsets import complement, inverse_set, is_symmetric, product_set
from tests.strategies import subsets


def test_tight_stabilizer_is_trivial(z4, subset):
    assert stabilizer(subset(z4, [0, 1]), 1).elements == [0]


def test_profile(z4, subset):
    assert symmetric_difference_profile(subset(z4, [0, 1])).tolist() == [0, 2, 4, 2]


def test_subgroup_stabilizes_itself(z12, subset):
    """For A = H and N < 2|H|, the stabilizer is H."""
    H = subset(z12, [0, 4, 8])
    assert stabilizer(H, 5) == H


def test_st_eps(z8, subset):
    """Shifting by 4 fixes the set; shifting by 1 moves half of it."""
    A = subset(z8, [0, 1, 4, 5])
    assert st_eps(A, Fraction(1, 2)).elements == [0, 4]


def test_translate_overlaps_sides(d4, subset):
    A = subset(d4, [0, 1, 4])
    X = subset(d4, [0, 4])
    left = translate_overlaps(A, X, "left")
    right = translate_overlaps(A, X, "right")
    assert left[0] == right[0] == 2
    assert left.sum() == right.sum() == A.size * X.size


def test_negative_threshold(z4, subset):
    with pytest.raises(SpecError):
        stabilizer(subset(z4, [0]), -1)


def test_z_error_set_empty(z4, subset):
    """A = {0,1,2} with X = {0,2} at eps = 9/10 has no mixed translates."""
    assert z_error_set(subset(z4, [0, 1, 2]), subset(z4, [0, 2]), Fraction(9, 10)).size == 0


def test_z_error_set_mixed(z4, subset):
    """At eps = 1/2 the translates {1,3} split evenly."""
    Z = z_error_set(subset(z4, [0, 1, 2]), subset(z4, [0, 2]), Fraction(1, 2))
    assert Z.elements == [1, 3]


def test_z_error_set_needs_x(z4, subset):
    with pytest.raises(PreconditionError):
        z_error_set(subset(z4, [0]), subset(z4, []), Fraction(1, 2))


def test_guarded_threshold(z4, subset):
    A = subset(z4, [0, 1])
    assert stabilizer_guarded(A, 2.5).elements == [0, 1, 3]
    with pytest.raises(NumericalAmbiguityError):
        stabilizer_guarded(A, 2.0 + 1e-12)


@given(subsets(), st.integers(0, 12))
@settings(max_examples=60, deadline=None)
def test_stabilizer_is_symmetric(A, N):
    for side in ("left", "right"):
        S = stabilizer(A, N, side)
        assert is_symmetric(S)


@given(subsets(), st.integers(0, 12))
@settings(max_examples=60, deadline=None)
def test_right_is_left_of_inverse(A, N):
    assert stabilizer(A, N, "right") == stabilizer(inverse_set(A), N, "left")


@given(subsets(), st.integers(0, 12))
@settings(max_examples=60, deadline=None)
def test_complement_has_same_stabilizer(A, N):
    assert stabilizer(complement(A), N) == stabilizer(A, N)


@given(subsets(), st.integers(0, 6), st.integers(0, 6))
@settings(max_examples=60, deadline=None)
def test_stabilizer_product_grows_threshold(A, N1, N2):
    """Stab_N1 · Stab_N2 ⊆ Stab_{N1+N2}."""
    lhs = product_set(stabilizer(A, N1), stabilizer(A, N2))
    assert lhs <= stabilizer(A, N1 + N2)


def test_profile_is_even(z12, subset):
    profile = symmetric_difference_profile(subset(z12, [0, 1, 5, 7]))
    assert np.all(profile % 2 == 0)
