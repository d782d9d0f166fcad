"""Tests for greedy covers, Ruzsa covering and the minimum-cover oracle."""
from fractions import Fraction

import pytest
from hypothesis import given, settings

from src.covering import haussler_bound_check, haussler_cover, min_cover_oracle, ruzsa_cover
from src.errors import CapExceededError, PreconditionError
from src.setsystems import vc_variant
from src.subsets import GroupSubset, product_set
from src.util import Capped
from tests.strategies import subsets


def test_haussler_cover_z4(z4, subset):
    """Translates of {0,1}: 1 and 3 sit within distance 2 of 0, 2 does not."""
    cover = haussler_cover(subset(z4, [0, 1]), GroupSubset.full(z4), 2)
    assert cover.E == (0, 2)
    assert cover.assignment == {0: 0, 1: 0, 2: 2, 3: 0}


def test_haussler_cover_zero_threshold(z8, subset):
    """With N = 0 every distinct translate is its own centre."""
    cover = haussler_cover(subset(z8, [0, 1, 3]), GroupSubset.full(z8), 0)
    assert cover.size == 8


def test_haussler_bound_check(z8, subset):
    A = subset(z8, [0, 1, 3])
    d = vc_variant(A, A)
    check = haussler_bound_check(A, A, Fraction(1, 2), "left", d)
    assert check.ok
    assert check.cov <= check.bound
    assert check.packing_eps == Fraction(1, 2) / product_set(A, A).size


def test_haussler_dimension_zero(z4, subset):
    """A subgroup over itself needs one translate."""
    H = subset(z4, [0, 2])
    check = haussler_bound_check(H, H, 1, "left", 0)
    assert (check.cov, check.bound, check.ok) == (1, 1, True)


def test_haussler_refuses_lower_bound(z4, subset):
    A = subset(z4, [0, 1])
    with pytest.raises(CapExceededError):
        haussler_bound_check(A, A, 1, "left", Capped(3, exact=False))
    with pytest.raises(CapExceededError):
        haussler_bound_check(A, A, 1, "left", None)


def test_ruzsa_cover(z5, subset):
    assert ruzsa_cover(GroupSubset.full(z5), subset(z5, [0, 1, 4])) == (0,)


def test_ruzsa_cover_disjoint_translates(z12, subset):
    F = ruzsa_cover(GroupSubset.full(z12), subset(z12, [0, 1, 11]))
    assert F == (0, 3, 6, 9)


def test_ruzsa_needs_symmetric(z4, subset):
    with pytest.raises(PreconditionError) as info:
        ruzsa_cover(GroupSubset.full(z4), subset(z4, [0, 1]))
    assert info.value.witness == 1


def test_min_cover_oracle(z12, subset):
    assert min_cover_oracle(GroupSubset.full(z12), subset(z12, [0, 1, 11])) == Capped(4)


def test_min_cover_beats_greedy_order(z8, subset):
    """P = {0,1,2} covers Z8 with three translates."""
    assert min_cover_oracle(GroupSubset.full(z8), subset(z8, [0, 1, 2])) == Capped(3)


def test_min_cover_empty_set(z4, subset):
    assert min_cover_oracle(subset(z4, []), subset(z4, [0])) == Capped(0)


def test_min_cover_cap(z12, subset):
    """Twelve singletons are needed; a cap of 5 reports a lower bound."""
    assert min_cover_oracle(GroupSubset.full(z12), subset(z12, [0]), cap=5) == Capped(5, exact=False)


def test_min_cover_unreachable(z4, subset):
    """Translates of P = {2} by elements of A never meet A."""
    with pytest.raises(PreconditionError):
        min_cover_oracle(subset(z4, [0, 1]), subset(z4, [2]))


@given(subsets())
@settings(max_examples=40, deadline=None)
def test_ruzsa_with_trivial_b(A):
    """With B = {0} every element of A is its own translate."""
    B = GroupSubset.from_elements(A.group, [0])
    F = ruzsa_cover(A, B)
    assert len(F) == A.size


@given(subsets())
@settings(max_examples=30, deadline=None)
def test_haussler_cover_covers(A):
    """Every element of G is assigned to a centre within distance N."""
    group = A.group
    N = A.size
    cover = haussler_cover(A, GroupSubset.full(group), N)
    assert set(cover.assignment) == set(range(group.order))
    assert set(cover.assignment.values()) == set(cover.E)
