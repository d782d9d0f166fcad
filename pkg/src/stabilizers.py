from __future__ import annotations
import logging
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import NumericalAmbiguityError, PreconditionError, SpecError
from .groups import CHUNK_CELLS
from .subsets import GroupSubset
from .util import parse_eps

log = logging.getLogger(__name__)

Threshold = Union[Fraction, int]
GUARD = 1e-9


def translate_overlaps(A: GroupSubset, X: GroupSubset, side: str) -> np.ndarray:
    """
    For every g in G: |gX ∩ A| (left) or |Xg ∩ A| (right), as an int64 array.
    """
    group = A.group
    counts = np.zeros(group.order, dtype=np.int64)
    idx = X.indices
    if not len(idx):
        return counts
    step = max(1, CHUNK_CELLS // group.order)
    for start in range(0, len(idx), step):
        block = idx[start:start + step]
        if side == "left":
            counts += A.mask[group.mul[:, block]].sum(axis=1)
        else:
            counts += A.mask[group.mul[block, :]].sum(axis=0)
    return counts


def symmetric_difference_profile(A: GroupSubset, side: str = "left") -> np.ndarray:
    """|xA △ A| (left) or |Ax △ A| (right) for every x, via 2(|A| - |xA ∩ A|)."""
    if side not in ("left", "right"):
        raise SpecError(f"side must be left or right, got {side!r}")
    return 2 * (A.size - translate_overlaps(A, A, side))


def stabilizer(A: GroupSubset, N: Threshold, side: str = "left") -> GroupSubset:
    """Stab_N(A) = {x : |xA △ A| <= N} (or Ax on the right), compared exactly."""
    N = Fraction(N)
    if N < 0:
        raise SpecError(f"stabilizer threshold must be nonnegative, got {N}")
    profile = symmetric_difference_profile(A, side)
    return GroupSubset(A.group, profile * N.denominator <= N.numerator)


def st_eps(A: GroupSubset, eps, side: str = "left") -> GroupSubset:
    """St_eps(A) = Stab_{eps|A|}(A) for eps in (0,1)."""
    eps = parse_eps(eps)
    return stabilizer(A, eps * A.size, side)


def stabilizer_guarded(A: GroupSubset, threshold, side: str = "left") -> GroupSubset:
    """
    Stabilizer at a real (possibly irrational) threshold, given as an mpmath or float
    value. Any profile value within a relative 1e-9 of the threshold is ambiguous.
    """
    profile = symmetric_difference_profile(A, side)
    t = float(threshold)
    for v in np.unique(profile):
        if abs(float(v) - t) <= GUARD * max(1.0, abs(t)):
            raise NumericalAmbiguityError(f"|xA△A| = {v} is within the guard of threshold {t!r}")
    return GroupSubset(A.group, profile <= t)


def z_error_set(A: GroupSubset, X: GroupSubset, eps, side: str = "left") -> GroupSubset:
    """
    Z_eps(A, X) = {g : min(|gX ∩ A|, |gX \\ A|) >= eps|X|} (Xg on the right).
    """
    if side not in ("left", "right"):
        raise SpecError(f"side must be left or right, got {side!r}")
    if not X:
        raise PreconditionError("Z-error sets need a nonempty X")
    A._check(X)
    eps = parse_eps(eps)
    inside = translate_overlaps(A, X, side)
    outside = X.size - inside
    low = np.minimum(inside, outside)
    return GroupSubset(A.group, low * eps.denominator >= eps.numerator * X.size)
