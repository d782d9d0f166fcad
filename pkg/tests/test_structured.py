"""Tests for the shrinking step, Bohr sets and progression search."""
import math
from fractions import Fraction

import pytest

from src.errors import DegenerateDimensionError, NumericalAmbiguityError, SpecError
from src.groups import build_group
from src.structured import (BohrSpec, CosetProgression, afz_shrink, bohr_cover_bound, bohr_halving, bohr_set,
                            coset_progression_set, find_bohr_in, find_progression_in, find_subgroup_in,
                            progression_halving)
from src.subsets import GroupSubset, power_set


def test_bohr_set(z12):
    spec = BohrSpec(z12, ((1,),), Fraction(3, 5))
    assert bohr_set(spec).elements == [0, 1, 11]


def test_bohr_full_radius(z12):
    assert bohr_set(BohrSpec(z12, ((1,),), Fraction(2))).size == 12


def test_bohr_halving(z12):
    half = bohr_halving(BohrSpec(z12, ((1,),), Fraction(3, 5)))
    assert half.delta == Fraction(3, 10)
    assert bohr_set(half).elements == [0]


@pytest.mark.unit
def test_bohr_exact_tie(z12):
    """|chi(2) - 1| = 1 exactly, so 2 is outside the radius-1 set without raising."""
    assert bohr_set(BohrSpec(z12, ((1,),), Fraction(1))).elements == [0, 1, 11]


@pytest.mark.unit
def test_bohr_near_tie_is_ambiguous():
    """A radius that only approximates 2 sin(pi/24) cannot decide element 1 of Z24."""
    delta = Fraction(2 * math.sin(math.pi / 24)).limit_denominator(10 ** 12)
    with pytest.raises(NumericalAmbiguityError):
        bohr_set(BohrSpec(build_group("Z24"), ((1,),), delta))


def test_bohr_cover_bound(z12):
    assert bohr_cover_bound(BohrSpec(z12, ((1,),), Fraction(3, 5))) == 11
    assert bohr_cover_bound(BohrSpec(z12, ((1,), (2,)), Fraction(2))) == 16


def test_bohr_spec_validation(z12, d4):
    with pytest.raises(SpecError):
        BohrSpec(d4, ((1,),), Fraction(1))
    with pytest.raises(SpecError):
        BohrSpec(z12, ((1, 2),), Fraction(1))
    with pytest.raises(SpecError):
        BohrSpec(z12, ((1,),), Fraction(3))


def test_find_bohr_in(z12, subset):
    S = subset(z12, [0, 4, 8])
    spec = find_bohr_in(S)
    assert spec is not None
    assert bohr_set(spec) == S


def test_find_bohr_in_trivial(z12, subset):
    assert find_bohr_in(subset(z12, [0, 1])) is None
    assert find_bohr_in(subset(z12, [1, 2])) is None


def test_find_subgroup_in(z8, subset):
    assert find_subgroup_in(subset(z8, [0, 2, 4, 6])) == subset(z8, [0, 2, 4, 6])
    assert find_subgroup_in(subset(z8, [0, 3, 4, 5])) == subset(z8, [0, 4])
    assert find_subgroup_in(subset(z8, [1, 2])) is None


def test_progression_sets(z10, subset):
    trivial = subset(z10, [0])
    cp = CosetProgression(z10, trivial, (2,), (2,))
    assert coset_progression_set(cp).elements == [0, 2, 4, 6, 8]
    assert cp.proper
    wrap = CosetProgression(z10, trivial, (5,), (1,))
    assert coset_progression_set(wrap).elements == [0, 5]
    assert not wrap.proper


def test_progression_halving(z10, subset):
    cp = CosetProgression(z10, subset(z10, [0]), (1,), (4,))
    half = progression_halving(cp)
    assert half.bounds == (2,)
    assert coset_progression_set(half).elements == [0, 1, 2, 8, 9]


def test_progression_needs_subgroup(z10, subset):
    with pytest.raises(SpecError):
        CosetProgression(z10, subset(z10, [0, 1]), (2,), (1,))


def test_find_progression_in(z10, subset):
    S = subset(z10, [0, 1, 2, 8, 9])
    cp = find_progression_in(S)
    assert coset_progression_set(cp) == S


def test_find_progression_in_coset_plus_interval(z12, subset):
    """H = {0,6} plus {-1,0,1}."""
    S = subset(z12, [0, 1, 5, 6, 7, 11])
    cp = find_progression_in(S)
    assert coset_progression_set(cp) == S
    assert cp.H.elements == [0, 6]


def test_progression_needs_abelian(d4, subset):
    with pytest.raises(SpecError):
        find_progression_in(subset(d4, [0, 1]))


def test_afz_shrink(z4, subset):
    A = subset(z4, [0, 1])
    result = afz_shrink(A, Fraction(1, 2), u=2, n=4)
    assert result.d == 1
    assert result.cert.ok
    assert result.k == Fraction(3, 2)
    assert result.m == Fraction(3, 2)
    assert power_set(result.B, 4) <= GroupSubset.full(z4)


def test_afz_shrink_case_two(d4, subset):
    result = afz_shrink(subset(d4, [0, 1, 4]), Fraction(1, 2), u=2, n=2, case="two")
    assert result.case == "two"
    assert result.cert.ok


def test_afz_degenerate(z4, subset):
    """A subgroup has dimension 0 and no shrinking is needed."""
    with pytest.raises(DegenerateDimensionError):
        afz_shrink(subset(z4, [0, 2]), Fraction(1, 2))


def test_afz_parameters(z4, subset):
    A = subset(z4, [0, 1])
    with pytest.raises(SpecError):
        afz_shrink(A, Fraction(1, 2), u=1, n=2)
    with pytest.raises(SpecError):
        afz_shrink(A, Fraction(1, 2), u=3, n=2)
    with pytest.raises(SpecError):
        afz_shrink(A, Fraction(1, 2), case="three")
