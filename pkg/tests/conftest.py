"""Shared fixtures: small groups built once per session and a subset factory."""
import pytest

from src.groups import build_group
from src.subsets import GroupSubset


@pytest.fixture(scope="session")
def z4():
    return build_group("Z4")


@pytest.fixture(scope="session")
def z5():
    return build_group("Z5")


@pytest.fixture(scope="session")
def z8():
    return build_group("Z8")


@pytest.fixture(scope="session")
def z10():
    return build_group("Z10")


@pytest.fixture(scope="session")
def z12():
    return build_group("Z12")


@pytest.fixture(scope="session")
def z2_4():
    return build_group("Z2^4")


@pytest.fixture(scope="session")
def d4():
    return build_group("D4")


@pytest.fixture(scope="session")
def s3():
    return build_group("S3")


@pytest.fixture(scope="session")
def q8():
    return build_group("Q8")


@pytest.fixture
def subset():
    """subset(group, [elements]) -> GroupSubset"""
    def make(group, elements):
        return GroupSubset.from_elements(group, elements)
    return make


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Point every default output path at a temporary directory."""
    monkeypatch.setenv("NIPREG_OUTPUT_DIR", str(tmp_path / "outputs"))
    return tmp_path / "outputs"
