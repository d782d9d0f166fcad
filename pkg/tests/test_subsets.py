"""Tests for subset algebra, tupling ratios, subgroup enumeration and subset specs."""
from fractions import Fraction

import pytest
from hypothesis import given, settings

from src.errors import CapExceededError, GroupMismatchError, SpecError
from src.groups import build_group
from src.subsets import (GroupSubset, asymmetry_witness, enumerate_subgroups, generated_subgroup, inverse_set,
                         is_subgroup, is_symmetric, parse_subset, power_set, power_set_inductive, product_set,
                         subsets_of, tupling_params)
from tests.strategies import subset_pairs, subsets


def test_product_set(z4, subset):
    A = subset(z4, [0, 1])
    assert product_set(A, A).elements == [0, 1, 2]


def test_inverse_set(z4, subset):
    assert inverse_set(subset(z4, [0, 1])).elements == [0, 3]


def test_power_set(z10, subset):
    """{0,1}^3 in Z10 is the interval 0..3."""
    assert power_set(subset(z10, [0, 1]), 3).elements == [0, 1, 2, 3]


def test_power_set_rejects_zero(z10, subset):
    with pytest.raises(SpecError):
        power_set(subset(z10, [0]), 0)


def test_symmetry(z4, subset):
    assert is_symmetric(subset(z4, [0, 1, 3]))
    assert not is_symmetric(subset(z4, [1, 3]))
    assert asymmetry_witness(subset(z4, [1, 3])) == 0
    assert asymmetry_witness(subset(z4, [0, 1])) == 1
    assert asymmetry_witness(subset(z4, [0, 2])) is None


def test_tupling_params(z10, subset):
    """Doubling and tripling ratios of an interval of length 2."""
    t = tupling_params(subset(z10, [0, 1]))
    assert (t.sigma, t.tau, t.delta, t.alpha) == (Fraction(3, 2), Fraction(2), Fraction(3, 2), Fraction(2))


@pytest.mark.parametrize("spec,count", [("Z12", 6), ("Z2^2", 5), ("Z1", 1), ("S3", 6), ("D4", 10), ("Q8", 6)])
def test_subgroup_counts(spec, count):
    subgroups = enumerate_subgroups(build_group(spec))
    assert len(subgroups) == count
    assert all(is_subgroup(H) for H in subgroups)
    assert [H.size for H in subgroups] == sorted(H.size for H in subgroups)


def test_subgroup_cap(z12):
    with pytest.raises(CapExceededError):
        enumerate_subgroups(z12, cap=8)
    assert len(enumerate_subgroups(z12, limit=3, cap=8)) == 3


def test_generated_subgroup(d4):
    """r and s generate D4; r alone gives the rotations."""
    assert generated_subgroup(d4, [1, 4]).size == 8
    assert generated_subgroup(d4, [1]).elements == [0, 1, 2, 3]


def test_parse_subset_forms(z12):
    assert parse_subset(z12, "0,1,3").elements == [0, 1, 3]
    assert parse_subset(z12, "interval:-2..2").elements == [0, 1, 2, 10, 11]
    assert parse_subset(z12, "cosets:0,4,8:0,1").elements == [0, 1, 4, 5, 8, 9]
    assert parse_subset(z12, "all").size == 12
    assert parse_subset(z12, "empty").size == 0


def test_parse_subset_random_is_seeded(z12):
    a = parse_subset(z12, "random:p=1/2:seed=7")
    b = parse_subset(z12, "random:p=1/2:seed=7")
    assert a == b
    assert parse_subset(z12, "random:p=1").size == 12


@pytest.mark.parametrize("spec", ["0,12", "x,y", "interval:3..1", "cosets:0,5:0", "random:q=1", ""])
def test_parse_subset_rejects(z12, spec):
    with pytest.raises(SpecError):
        parse_subset(z12, spec)


def test_interval_needs_abelian(s3):
    with pytest.raises(SpecError):
        parse_subset(s3, "interval:0..2")


def test_group_mismatch(z4, z8, subset):
    with pytest.raises(GroupMismatchError):
        product_set(subset(z4, [0]), subset(z8, [0]))


def test_same_order_different_tables(d4, z8):
    with pytest.raises(GroupMismatchError):
        GroupSubset.from_elements(d4, [0, 1]) | GroupSubset.from_elements(z8, [0, 1])


def test_separately_built_copies_share_subsets():
    """Two builds of Z5 have one table, so their subsets mix and compare equal."""
    first, second = build_group("Z5"), build_group("Z5")
    A = GroupSubset.from_elements(first, [0, 1])
    B = GroupSubset.from_elements(second, [0, 1])
    assert A == B and hash(A) == hash(B)
    assert product_set(A, B).elements == [0, 1, 2]


def test_subsets_of(z4):
    assert sum(1 for _ in subsets_of(z4)) == 15


@given(subset_pairs())
@settings(max_examples=60, deadline=None)
def test_inverse_of_product(pair):
    """(AB)^-1 = B^-1 A^-1."""
    A, B = pair
    assert inverse_set(product_set(A, B)) == product_set(inverse_set(B), inverse_set(A))


@given(subsets())
@settings(max_examples=60, deadline=None)
def test_power_set_matches_inductive(A):
    for n in (1, 2, 3, 5):
        assert power_set(A, n) == power_set_inductive(A, n)


@given(subsets())
@settings(max_examples=40, deadline=None)
def test_mask_roundtrip(A):
    assert GroupSubset.from_elements(A.group, A.elements) == A
