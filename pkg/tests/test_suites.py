"""Tests for the property suites on small groups."""
import pytest

from src.errors import SpecError
from src.groups import build_group
from src.subsets import GroupSubset, is_symmetric
from src.suites import EPS_GRID, SUITES, symmetric_subsets_within, verify_suite


@pytest.mark.slow
@pytest.mark.parametrize("suite,max_order,trials,exhaustive", [
    ("stabilizers", 6, 3, 6),
    ("vc-duality", 6, 3, 4),
    ("covering", 8, 4, 0),
    ("regularity", 6, 3, 6),
    ("structure", 6, 3, 6),
    ("afz", 8, 4, 0),
    ("bohr", 10, 3, 0),
    ("d0", 6, 1, 6),
    ("tupling", 8, 3, 8),
])
def test_suite_passes(suite, max_order, trials, exhaustive):
    report = verify_suite(suite, trials=trials, seed=0, max_order=max_order, exhaustive_order=exhaustive, jobs=1)
    assert report.ok, report.failures[:3]
    assert report.checked > 0
    assert report.groups


def test_bohr_suite_uses_cyclic_groups():
    report = verify_suite("bohr", trials=2, max_order=6, jobs=1)
    assert report.groups == ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6"]


def test_suite_is_deterministic():
    first = verify_suite("covering", trials=3, seed=5, max_order=6, exhaustive_order=0, jobs=1)
    second = verify_suite("covering", trials=3, seed=5, max_order=6, exhaustive_order=0, jobs=1)
    assert first.to_dict() == second.to_dict()


def test_all_merges_every_suite():
    report = verify_suite("all", trials=1, max_order=3, exhaustive_order=3, jobs=1)
    assert report.ok
    assert {g.split(":")[0] for g in report.groups} == set(SUITES)


def test_unknown_suite():
    with pytest.raises(SpecError):
        verify_suite("ramsey")


def test_trials_must_be_positive():
    with pytest.raises(SpecError):
        verify_suite("tupling", trials=0)


@pytest.mark.parametrize("spec,rows", [("Z4", 4), ("Z2^3", 128), ("S3", 16), ("Z1", 1)])
def test_symmetric_subsets_of_whole_group(spec, rows):
    """Z4 pairs {1,3} and keeps 2 alone; S3 has three involutions and one pair of 3-cycles."""
    group = build_group(spec)
    Xs = symmetric_subsets_within(GroupSubset.full(group))
    assert Xs.shape == (rows, group.order)
    assert len({x.tobytes() for x in Xs}) == rows
    assert all(is_symmetric(GroupSubset(group, x)) for x in Xs)


def test_symmetric_subsets_stay_inside(z8, subset):
    T = subset(z8, [0, 2, 4, 6])
    Xs = symmetric_subsets_within(T)
    assert Xs.shape[0] == 4
    assert not (Xs & ~T.mask).any()


def test_exhaustive_regularity_covers_every_threshold_and_eps():
    """Orders up to 4: each of the 41 sets is checked for 5 thresholds, every eps and every X."""
    report = verify_suite("regularity", trials=1, max_order=4, exhaustive_order=4, jobs=1)
    assert report.ok, report.failures[:3]
    assert report.checked >= 41 * 5 * len(EPS_GRID) * 2


def test_exhaustive_structure_runs_every_eps():
    report = verify_suite("structure", trials=1, max_order=3, exhaustive_order=3, jobs=1)
    assert report.ok, report.failures[:3]
    assert report.checked >= (1 + 3 + 7) * len(EPS_GRID) * 3
