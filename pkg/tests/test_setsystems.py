"""Tests for set systems, VC dimension, duals and quotients."""
import itertools
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import PreconditionError, SpecError
from src.groups import build_group
from src.setsystems import (SetSystem, dual_system, dual_vc, is_quotient, quotient_system, shattered,
                            sisask_dimension, sisask_system, translate_system, vc_dimension, vc_variant)
from src.subsets import GroupSubset, inverse_set
from src.util import Capped
from tests.strategies import subsets


def test_translate_vc_over_group(z4, subset):
    """Translates of {0,1} in Z4 shatter a pair."""
    assert vc_variant(subset(z4, [0, 1])) == Capped(2)


def test_translate_vc_over_self(z4, subset):
    A = subset(z4, [0, 1])
    assert vc_variant(A, A) == Capped(1)


def test_translate_system_shape(z4, subset):
    S = translate_system(subset(z4, [0, 1]), GroupSubset.full(z4))
    assert S.ground == (0, 1, 2, 3)
    assert sorted(S.members()) == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_sisask_system(z4, subset):
    """{xA ∩ A : x in AA^-1} for A = {0,1} has three distinct members."""
    A = subset(z4, [0, 1])
    S = sisask_system(A, A).deduplicated()
    assert sorted(S.members()) == [(0,), (0, 1), (1,)]
    assert sisask_dimension(A) == Capped(1)


def test_dual_vc_of_cycle(z4, subset):
    assert dual_vc(translate_system(subset(z4, [0, 1]), GroupSubset.full(z4))) == Capped(2)


def test_coset_has_dimension_zero(z4, subset):
    """A coset has a single translate over itself."""
    A = subset(z4, [1, 3])
    assert vc_variant(A, A) == Capped(0)
    assert vc_variant(A, A, fast_path=False) == Capped(0)


def test_singleton_family():
    assert vc_dimension(SetSystem.from_sets([1, 2, 3], [[1, 2]])) == Capped(0)


def test_empty_family_raises():
    with pytest.raises(PreconditionError):
        vc_dimension(SetSystem((1, 2), ()))


def test_member_outside_ground():
    with pytest.raises(SpecError):
        SetSystem.from_sets(["a"], [["b"]])


def test_cap_gives_lower_bound():
    """The full power set of 4 points stops at the cap."""
    family = [[p for p in range(4) if (code >> p) & 1] for code in range(16)]
    S = SetSystem.from_sets(range(4), family)
    assert vc_dimension(S) == Capped(4)
    assert vc_dimension(S, cap=2) == Capped(2, exact=False)


def test_duplicates_do_not_change_dimension():
    S = SetSystem.from_sets("abc", [["a"], ["b"], ["a", "b"], []])
    doubled = SetSystem(S.ground, S.family * 2)
    assert vc_dimension(S) == vc_dimension(doubled) == Capped(2)
    assert shattered(S, ["a", "b"])
    assert not shattered(S, ["a", "c"])


def test_quotient_merges_identical_points():
    S = SetSystem.from_sets("abcd", [["a", "b"], ["c"], ["a", "b", "d"]])
    Q = quotient_system(S)
    assert Q.ground == ("a", "c", "d")
    assert vc_dimension(Q) == vc_dimension(S)
    assert is_quotient(S, Q, {"a": "a", "b": "a", "c": "c", "d": "d"})
    assert not is_quotient(S, Q, {"a": "a", "b": "c", "c": "c", "d": "d"})


def test_dual_of_dual(z4, subset):
    """Taking the dual twice gives back a system of the same dimension."""
    S = translate_system(subset(z4, [0, 1]), GroupSubset.full(z4))
    assert vc_dimension(dual_system(dual_system(S))) == vc_dimension(S)


def test_unknown_variant(z4, subset):
    with pytest.raises(SpecError):
        vc_variant(subset(z4, [0]), variant="primal")


@given(subsets())
@settings(max_examples=40, deadline=None)
def test_fast_path_agrees_with_search(A):
    assert vc_variant(A, A) == vc_variant(A, A, fast_path=False)


@given(subsets())
@settings(max_examples=40, deadline=None)
def test_left_right_exchange(A):
    """VC^r_A(A) = VC^l_{A^-1}(A^-1)."""
    Ai = inverse_set(A)
    assert vc_variant(A, A, "right") == vc_variant(Ai, Ai, "left")


@given(subsets())
@settings(max_examples=40, deadline=None)
def test_dual_bounds(A):
    """VC* < 2^(VC+1) for the translate family over the group."""
    S = translate_system(A, GroupSubset.full(A.group))
    d = vc_dimension(S).value
    assert dual_vc(S).value < 2 ** (d + 1)


@given(st.lists(st.sets(st.integers(0, 5)), min_size=1, max_size=24))
@settings(max_examples=60, deadline=None)
def test_search_matches_brute_force(family):
    """The pruned search finds the largest shattered set of a random family."""
    S = SetSystem.from_sets(range(6), family)
    brute = max(k for k in range(7) if any(shattered(S, pts) for pts in itertools.combinations(range(6), k)))
    assert vc_dimension(S) == Capped(brute)


def test_search_stops_at_family_bound():
    """A shattered pair among four members is already the answer."""
    S = SetSystem.from_sets(range(8), [[], [0], [1], [0, 1, 2, 3, 4, 5, 6, 7]])
    assert vc_dimension(S) == Capped(2)


@pytest.mark.slow
def test_translate_dimension_in_z2_7_is_fast():
    group = build_group("Z2^7")
    rng = np.random.default_rng(7)
    started = time.perf_counter()
    for _ in range(5):
        A = GroupSubset(group, rng.random(group.order) < rng.uniform(0.15, 0.85))
        B = GroupSubset(group, rng.random(group.order) < rng.uniform(0.15, 0.85))
        for side in ("left", "right"):
            assert vc_variant(A, B, side).exact
    assert time.perf_counter() - started < 30
