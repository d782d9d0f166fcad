"""Tests for the end-to-end decomposition."""
import json
from fractions import Fraction
from types import SimpleNamespace

import pytest

from src.errors import GroupMismatchError, PreconditionError, SpecError
from src.groups import build_group
from src.pipeline import CSV_COLUMNS, _structured_subgroup, decompose, report_json
from src.subsets import GroupSubset, parse_subset
from src.util import dumps_json

HALF = Fraction(1, 2)


@pytest.fixture
def coset_union(z2_4):
    """Two cosets of the subgroup {0,1,2,3} of Z2^4: a coset of an order 8 subgroup."""
    return parse_subset(z2_4, "cosets:0,1,2,3:4,8")


@pytest.mark.integration
def test_exact_coset_union(z2_4, coset_union):
    report = decompose(z2_4, coset_union, HALF, group_spec="Z2^4", set_spec="cosets:0,1,2,3:4,8")
    assert report.ok
    assert report.d_left == report.d_right == 0
    assert report.structure_err == 0
    assert report.regularity_err == 0
    assert report.P_descriptor["kind"] == "subgroup"
    assert report.size_P == 8
    assert report.F == [4]
    assert (report.cov_A_P, report.cov_G_P) == (1, 2)


@pytest.mark.integration
def test_noisy_coset_union(z2_4, coset_union):
    """One extra element stays within the error budget."""
    noisy = coset_union | GroupSubset.from_elements(z2_4, [0])
    report = decompose(z2_4, noisy, HALF)
    assert report.ok
    assert report.structure_err < HALF
    assert report.regularity_err <= HALF
    assert report.size_A == 9


@pytest.mark.integration
def test_bohr_mode(z12):
    A = parse_subset(z12, "interval:0..5")
    report = decompose(z12, A, Fraction(3, 4), "bohr")
    assert report.mode == "bohr"
    assert report.P_descriptor["kind"] in ("bohr", "trivial", "none")
    assert report.regularity_err <= Fraction(3, 4)
    assert report.ok


@pytest.mark.integration
def test_progression_mode(z12):
    A = parse_subset(z12, "cosets:0,6:0,1,2")
    report = decompose(z12, A, HALF, "progression")
    assert report.ok
    assert report.structure_err < HALF


@pytest.mark.integration
def test_nonabelian_subgroup_mode(d4):
    A = GroupSubset.from_elements(d4, [0, 1, 2, 3, 4])
    report = decompose(d4, A, HALF)
    assert report.ok
    assert report.structure_err < HALF


def test_abelian_only_modes(d4):
    A = GroupSubset.from_elements(d4, [0, 1])
    for mode in ("bohr", "progression"):
        with pytest.raises(SpecError):
            decompose(d4, A, HALF, mode)


def test_bad_inputs(z4):
    A = GroupSubset.from_elements(z4, [0, 1])
    with pytest.raises(SpecError):
        decompose(z4, A, HALF, "lattice")
    with pytest.raises(SpecError):
        decompose(z4, A, Fraction(1))
    with pytest.raises(PreconditionError):
        decompose(z4, GroupSubset.empty(z4), HALF)


def test_report_is_deterministic(z12):
    A = parse_subset(z12, "0,1,3,4,6")
    first = decompose(z12, A, HALF, seed=3)
    second = decompose(z12, A, HALF, seed=3)
    assert first.to_row() == second.to_row()


def test_row_and_json(z2_4, coset_union):
    report = decompose(z2_4, coset_union, HALF, group_spec="Z2^4", set_spec="cosets")
    row = report.to_row()
    assert tuple(row) == CSV_COLUMNS
    assert row["eps"] == "1/2"
    assert row["ok"] is True
    payload = json.loads(dumps_json(report_json(report)))
    assert payload["eps"] == {"num": 1, "den": 2}
    assert payload["schema_version"] == 1
    assert {c["status"] for c in payload["bound_checks"]} <= {"pass", "not-applicable"}


def test_set_from_another_group_is_rejected(d4):
    A = GroupSubset.from_elements(build_group("Z8"), [0, 1, 2])
    with pytest.raises(GroupMismatchError):
        decompose(d4, A, HALF)


def test_set_from_a_rebuilt_copy_is_accepted():
    A = parse_subset(build_group("Z4"), "0,1")
    report = decompose(build_group("Z4"), A, HALF)
    assert report.size_A == 2
    assert report.ok


def test_shrinking_step_supplies_an_approximate_group(z8, subset, mocker):
    """With no nontrivial subgroup inside S, the shrunk set B gives P = B^2 and Q = B."""
    B = subset(z8, [0, 1, 7])
    shrink = mocker.patch("src.pipeline.afz_shrink", return_value=SimpleNamespace(B=B, t=1))
    S = subset(z8, [0, 1, 2, 6, 7])
    P, Q, descriptor = _structured_subgroup(subset(z8, [0, 1, 2]), S, Fraction(1, 18), d_right=1)
    assert shrink.call_args.kwargs["n"] == 12
    assert P.elements == [0, 1, 2, 6, 7]
    assert Q == B
    assert descriptor == {"kind": "approximate-group", "B": [0, 1, 7], "via": "afz", "t": 1}


def test_subgroup_inside_s_skips_the_shrinking_step(z8, subset, mocker):
    shrink = mocker.patch("src.pipeline.afz_shrink")
    P, Q, descriptor = _structured_subgroup(subset(z8, [0, 4]), subset(z8, [0, 1, 4]), HALF, d_right=1)
    assert P.elements == [0, 4] and Q == P
    assert descriptor["via"] == "direct"
    shrink.assert_not_called()
