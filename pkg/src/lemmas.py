"""
Executable regularity and structure lemmas.

Each function verifies its preconditions on the concrete instance, computes the
objects the lemma talks about, and reports the inequality it promises as an
exact rational comparison.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import FalsificationError, PreconditionError, SpecError
from .stabilizers import Threshold, stabilizer, st_eps, symmetric_difference_profile, z_error_set
from .subsets import GroupSubset, inverse_set, is_subgroup, product_set
from .util import parse_eps

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegularityCheck:
    Z: GroupSubset
    bound: Fraction
    ok: bool
    side: str
    # |Z| <= eps|A| whenever X lies in the eps^2/2 stabilizer
    special_applicable: bool
    special_ok: Optional[bool]


def _require_inside(X: GroupSubset, stab: GroupSubset, what: str) -> None:
    witness = X.first_outside(stab)
    if witness is not None:
        raise PreconditionError(f"X is not contained in {what}", witness=witness)


def _regularity(A: GroupSubset, X: GroupSubset, N: Threshold, eps, side: str) -> RegularityCheck:
    if not X:
        raise PreconditionError("X must be nonempty")
    eps = parse_eps(eps)
    N = Fraction(N)
    # X sits in the stabilizer on the opposite side to the Z-set
    stab_side = "right" if side == "left" else "left"
    _require_inside(X, stabilizer(A, N, stab_side), f"Stab^{stab_side}_{N}(A)")
    Z = z_error_set(A, X, eps, side)
    bound = 2 * N / eps
    ok = Z.size <= bound
    special = X <= stabilizer(A, eps * eps * A.size / 2, stab_side)
    special_ok = (Z.size <= eps * A.size) if special else None
    if not ok or special_ok is False:
        log.error("regularity bound fails on %s: |Z|=%d, bound %s", A.group.name, Z.size, bound)
    return RegularityCheck(Z, bound, ok, side, special, special_ok)


def check_regularity(A: GroupSubset, X: GroupSubset, N: Threshold, eps) -> RegularityCheck:
    """
    |Z^l_eps(A, X)| <= 2N/eps for nonempty X ⊆ Stab^r_N(A).

    Raises:
        PreconditionError: X is not inside Stab^r_N(A); the witness is the least offender.
    """
    return _regularity(A, X, N, eps, "left")


def mirrored_regularity(A: GroupSubset, X: GroupSubset, N: Threshold, eps) -> RegularityCheck:
    """
    The left/right exchange: |Z^r_eps(A, X)| <= 2N/eps for X ⊆ Stab^l_N(A).
    Cross-checked against the left form on A^-1, X^-1.
    """
    check = _regularity(A, X, N, eps, "right")
    mirror = _regularity(inverse_set(A), inverse_set(X), N, eps, "left")
    if inverse_set(mirror.Z) != check.Z:
        raise FalsificationError("Z^r(A,X) differs from the inverse of Z^l(A^-1,X^-1)",
                                 {"group_spec": A.group.name, "A": A.elements, "X": X.elements})
    return check


@dataclass(frozen=True)
class StructureCore:
    eps: Fraction
    X: GroupSubset
    nu: Fraction
    S: GroupSubset
    Aprime: GroupSubset
    size_claim_ok: bool
    growth_claim_ok: bool


def structure_core(A: GroupSubset, eps, nu: Optional[Fraction] = None) -> StructureCore:
    """
    X = St^l_{eps^2/162}(A), nu = min(|X|/|A|, eps) unless given,
    S = St^r_{eps*nu/9}(A), A' = {a in A : |Xa \\ A| < (eps/9)|X|}.

    Also evaluates the two intermediate claims: |A'| >= (1 - eps/3)|A| and
    (1 - 2eps/9)|A'S| <= |A|.
    """
    if not A:
        raise PreconditionError("structure_core needs a nonempty A")
    eps = parse_eps(eps)
    X = st_eps(A, eps * eps / 162, "left")
    ratio = Fraction(X.size, A.size)
    if nu is None:
        nu = min(ratio, eps)
    else:
        nu = Fraction(nu)
        if not 0 < nu < 1 or nu > ratio:
            raise SpecError(f"nu must lie in (0,1) with nu <= |X|/|A| = {ratio}, got {nu}")
    S = st_eps(A, eps * nu / 9, "right")

    group = A.group
    # |Xa \ A| for a in A
    outside = (~A.mask[group.mul[np.ix_(X.indices, A.indices)]]).sum(axis=0)
    threshold = eps / 9 * X.size
    keep = outside * threshold.denominator < threshold.numerator
    Aprime = GroupSubset.from_elements(group, A.indices[keep])

    size_ok = Aprime.size >= (1 - eps / 3) * A.size
    growth_ok = (1 - 2 * eps / 9) * product_set(Aprime, S).size <= A.size
    if not (size_ok and growth_ok):
        log.error("structure claims fail on %s (|A'|=%d)", group.name, Aprime.size)
    return StructureCore(eps, X, nu, S, Aprime, size_ok, growth_ok)


@dataclass(frozen=True)
class StructureApproximant:
    D: GroupSubset
    err: Fraction
    ok: bool
    mode: str


def structure_approximant(A: GroupSubset, eps, F: Optional[Sequence[int]] = None,
                          P: Optional[GroupSubset] = None,
                          core: Optional[StructureCore] = None) -> StructureApproximant:
    """
    D = A'S (full mode) or D = FP (sandwich mode, when F and P are given), with the
    sandwich A' ⊆ D ⊆ A'S verified. Asserts |A △ D| < eps|A|.

    Raises:
        PreconditionError: FP leaves the sandwich; the witness is the offending element.
        FalsificationError: the error bound fails.
    """
    eps = parse_eps(eps)
    core = core or structure_core(A, eps)
    upper = product_set(core.Aprime, core.S)
    if F is None and P is None:
        D, mode = upper, "full"
    elif F is None or P is None:
        raise SpecError("sandwich mode needs both F and P")
    else:
        D = product_set(GroupSubset.from_elements(A.group, F), P)
        mode = "sandwich"
        witness = core.Aprime.first_outside(D)
        if witness is None:
            witness = D.first_outside(upper)
        if witness is not None:
            raise PreconditionError("FP is not sandwiched between A' and A'S", witness=witness)
    err = Fraction((A ^ D).size, A.size)
    ok = err < eps
    if not ok:
        raise FalsificationError(f"|A△D|/|A| = {err} is not below eps = {eps}",
                                 {"group_spec": A.group.name, "A": A.elements, "eps": str(eps), "D": D.elements})
    return StructureApproximant(D, err, ok, mode)


def _require_subgroup_in_stab(A: GroupSubset, H: GroupSubset, N: Fraction) -> None:
    if not is_subgroup(H):
        witness = 0 if not H.mask[0] else product_set(H, H).first_outside(H)
        raise PreconditionError("H is not a subgroup", witness=witness)
    _require_inside(H, stabilizer(A, N, "right"), f"Stab^r_{N}(A)")


def left_cosets(H: GroupSubset) -> list:
    """The distinct left cosets gH, ordered by least element."""
    group = H.group
    seen = np.zeros(group.order, dtype=bool)
    cosets = []
    for g in range(group.order):
        if not seen[g]:
            C = H.left_translate(g)
            seen |= C.mask
            cosets.append(C)
    return cosets


@dataclass(frozen=True)
class CosetApproximant:
    D: GroupSubset
    err_abs: int
    ok: bool
    pair_count: int
    cosets: Tuple[GroupSubset, ...]


def coset_approximant(A: GroupSubset, H: GroupSubset, N: Threshold) -> CosetApproximant:
    """
    D = union of the left cosets C of H with |C ∩ A| >= |H|/2; ok iff |A △ D| <= N.

    The pair count |P| = sum over cosets of |C ∩ A||C \\ A| is checked against
    2|P| = sum_{x in H} |Ax △ A|.
    """
    N = Fraction(N)
    _require_subgroup_in_stab(A, H, N)
    cosets = tuple(left_cosets(H))
    mask = np.zeros(A.group.order, dtype=bool)
    pairs = 0
    for C in cosets:
        inside = (C & A).size
        pairs += inside * (H.size - inside)
        if 2 * inside >= H.size:
            mask |= C.mask
    profile = symmetric_difference_profile(A, "right")
    if 2 * pairs != int(profile[H.indices].sum()):
        raise FalsificationError("pair count identity fails",
                                 {"group_spec": A.group.name, "A": A.elements, "H": H.elements})
    D = GroupSubset(A.group, mask)
    err = (A ^ D).size
    ok = err <= N
    if not ok:
        log.error("coset approximant error %d exceeds N=%s", err, N)
    return CosetApproximant(D, err, ok, pairs, cosets)


@dataclass(frozen=True)
class CosetRegularity:
    Z: GroupSubset
    mixed: GroupSubset
    covered: bool
    mixed_ok: bool
    ok: bool


def coset_regularity(A: GroupSubset, H: GroupSubset, N: Threshold, eps) -> CosetRegularity:
    """
    Regularity read off the coset pair counts: with M the union of cosets whose pair
    count reaches eps^2|H|^2, checks Z^l_eps(A,H) ⊆ M, |M| <= N/(2eps^2) and
    |Z^l_eps(A,H)| <= 2N/eps.
    """
    eps = parse_eps(eps)
    N = Fraction(N)
    _require_subgroup_in_stab(A, H, N)
    mask = np.zeros(A.group.order, dtype=bool)
    for C in left_cosets(H):
        inside = (C & A).size
        if inside * (H.size - inside) >= eps * eps * H.size * H.size:
            mask |= C.mask
    M = GroupSubset(A.group, mask)
    Z = z_error_set(A, H, eps, "left")
    covered = Z <= M
    mixed_ok = M.size <= N / (2 * eps * eps)
    ok = Z.size <= 2 * N / eps
    if not (covered and mixed_ok and ok):
        log.error("coset regularity fails on %s", A.group.name)
    return CosetRegularity(Z, M, covered, mixed_ok, ok)


@dataclass(frozen=True)
class SubgroupApproximation:
    F: Tuple[int, ...]
    D: GroupSubset
    err_abs: int
    ok: bool


def subgroup_approximation(A: GroupSubset, H: GroupSubset, N: Threshold) -> SubgroupApproximation:
    """
    Coset approximant with representatives moved into A: F ⊆ A and |A △ FH| <= N.
    """
    approx = coset_approximant(A, H, N)
    F = []
    for C in approx.cosets:
        if C <= approx.D:
            F.append(int((C & A).indices[0]))
    D = product_set(GroupSubset.from_elements(A.group, F), H)
    if D != approx.D:
        raise FalsificationError("representatives in A do not reproduce the coset union",
                                 {"group_spec": A.group.name, "A": A.elements, "H": H.elements})
    return SubgroupApproximation(tuple(sorted(F)), D, approx.err_abs, approx.ok)
