"""
Covering procedures: greedy separated sets of translates, Ruzsa covering, and an
exact minimum-cover oracle for small instances.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import CapExceededError, FalsificationError, PreconditionError, SpecError
from .setsystems import rows_to_bitsets, translate_rows
from .stabilizers import Threshold, stabilizer
from .subsets import GroupSubset, asymmetry_witness, inverse_set, is_symmetric, product_set
from .util import Capped, get_settings

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HausslerCover:
    E: Tuple[int, ...]
    assignment: Dict[int, int]
    N: Fraction
    side: str

    @property
    def size(self) -> int:
        return len(self.E)


@dataclass(frozen=True)
class HausslerCheck:
    cov: int
    bound: Fraction
    ok: bool
    d: int
    # eps' = N/|BA| (N/|AB| on the right); (30/eps')^d equals `bound`
    packing_eps: Fraction
    cover: Optional[HausslerCover] = field(default=None, compare=False)


def _counterexample(A: GroupSubset, **extra) -> dict:
    payload = {"group_spec": A.group.name, "A": A.elements}
    for k, v in extra.items():
        payload[k] = v.elements if isinstance(v, GroupSubset) else v
    return payload


def haussler_cover(A: GroupSubset, B: GroupSubset, N: Threshold, side: str = "left") -> HausslerCover:
    """
    Greedy maximal N-separated set E ⊆ B under d(x, y) = |xA △ yA| (|Ax △ Ay| on the
    right), scanning B in ascending order. Every x in B is assigned to the first
    member of E within distance N.

    Asserts separation, maximality, and B ⊆ E·(Stab^l_N(A) ∩ B^-1 B)
    (right: B^-1 ⊆ E^-1·(Stab^r_N(A) ∩ BB^-1)).
    """
    if not A or not B:
        raise PreconditionError("haussler_cover needs nonempty A and B")
    if side not in ("left", "right"):
        raise SpecError(f"side must be left or right, got {side!r}")
    A._check(B)
    N = Fraction(N)
    xs = B.indices
    rows = translate_rows(A, xs, side).astype(np.int32)
    two_a = 2 * A.size

    E_pos: List[int] = []
    assignment: Dict[int, int] = {}
    for r, x in enumerate(xs):
        if E_pos:
            dist = two_a - 2 * (rows[E_pos] @ rows[r])
            close = np.flatnonzero(dist * N.denominator <= N.numerator)
            if len(close):
                assignment[int(x)] = int(xs[E_pos[close[0]]])
                continue
        E_pos.append(r)
        assignment[int(x)] = int(x)
    E = tuple(int(xs[p]) for p in E_pos)

    sub = rows[E_pos].astype(np.int64)
    dist = two_a - 2 * (sub @ sub.T)
    off_diagonal = ~np.eye(len(E), dtype=bool)
    if np.any((dist * N.denominator <= N.numerator) & off_diagonal):
        raise FalsificationError("greedy set is not N-separated", _counterexample(A, B=B, N=N))

    group = A.group
    Es = GroupSubset.from_elements(group, E)
    stab = stabilizer(A, N, side)
    if side == "left":
        lhs, rhs = B, product_set(Es, stab & product_set(inverse_set(B), B))
    else:
        lhs, rhs = inverse_set(B), product_set(inverse_set(Es), stab & product_set(B, inverse_set(B)))
    if not lhs <= rhs:
        raise FalsificationError("translates of B are not covered by E and the stabilizer",
                                 _counterexample(A, B=B, N=N, witness=lhs.first_outside(rhs)))
    return HausslerCover(E, assignment, N, side)


def haussler_bound_check(A: GroupSubset, B: GroupSubset, N: Threshold, side: str = "left",
                         d: Union[int, Capped, None] = None) -> HausslerCheck:
    """
    Compare the greedy cover size with (30|BA|/(eps|A|))^d where eps|A| = N.

    Args:
        d: VC^side_B(A), precomputed. A lower-bound-only value is refused.

    Raises:
        CapExceededError: d is unknown.
    """
    if isinstance(d, Capped):
        if not d.exact:
            raise CapExceededError(f"VC dimension only known as {d}; refusing the covering bound")
        d = d.value
    if d is None:
        raise CapExceededError("VC dimension unknown; refusing the covering bound")
    N = Fraction(N)
    if N <= 0:
        raise SpecError("covering bound needs N = eps|A| > 0")
    grown = product_set(B, A) if side == "left" else product_set(A, B)
    packing_eps = N / grown.size
    if d == 0:
        if grown.size != A.size:
            raise FalsificationError("VC dimension 0 but the translates of A differ",
                                     _counterexample(A, B=B))
        return HausslerCheck(1, Fraction(1), True, 0, packing_eps)
    bound = (30 * Fraction(grown.size) / N) ** d
    cover = haussler_cover(A, B, N, side)
    ok = cover.size <= bound
    if not ok:
        log.error("covering bound fails: %d > %s", cover.size, bound)
    return HausslerCheck(cover.size, bound, ok, d, packing_eps, cover)


def ruzsa_cover(A: GroupSubset, B: GroupSubset) -> Tuple[int, ...]:
    """
    Greedy maximal F ⊆ A with pairwise disjoint fB, scanning A in ascending order.

    Asserts the translates are disjoint, A ⊆ FB^2 and |F||B| <= |AB|.

    Raises:
        PreconditionError: B is not symmetric (witness attached).
    """
    if not A or not B:
        raise PreconditionError("ruzsa_cover needs nonempty A and B")
    A._check(B)
    if not is_symmetric(B):
        raise PreconditionError("ruzsa_cover needs a symmetric B", witness=asymmetry_witness(B))
    group = A.group
    used = np.zeros(group.order, dtype=bool)
    F: List[int] = []
    for a in A.indices:
        image = group.mul[a, B.indices]
        if not used[image].any():
            used[image] = True
            F.append(int(a))
    Fs = GroupSubset.from_elements(group, F)
    if int(used.sum()) != len(F) * B.size:
        raise FalsificationError("Ruzsa translates overlap", _counterexample(A, B=B, F=F))
    if not A <= product_set(Fs, product_set(B, B)):
        raise FalsificationError("A is not covered by F·B^2", _counterexample(A, B=B, F=F))
    if len(F) * B.size > product_set(A, B).size:
        raise FalsificationError("|F| exceeds |AB|/|B|", _counterexample(A, B=B, F=F))
    return tuple(F)


def _greedy_cover(universe: int, sets: List[int]) -> List[int]:
    chosen, left = [], universe
    while left:
        best = max(range(len(sets)), key=lambda i: (sets[i] & left).bit_count())
        chosen.append(best)
        left &= ~sets[best]
    return chosen


def min_cover_oracle(A: GroupSubset, P: GroupSubset, cap: Optional[int] = None) -> Capped:
    """
    Least number of translates gP, g in A, whose union contains A.

    Branch and bound over the translates restricted to A: branch on the uncovered
    element with the fewest candidate translates, bound by ceil(uncovered / largest
    translate). Covers of size above `cap` are not searched; the result is then the
    lower bound "≥cap".

    Raises:
        PreconditionError: no family of such translates covers A.
    """
    cap = cap if cap is not None else get_settings().cover_cap
    if not A:
        return Capped(0)
    A._check(P)
    if not P:
        raise PreconditionError("cannot cover a nonempty set with translates of the empty set")
    rows = translate_rows(P, A.indices, "left")[:, A.indices]
    sets = list(dict.fromkeys(s for s in rows_to_bitsets(rows) if s))
    # drop translates contained in another
    sets = [s for s in sets if not any(t != s and s & t == s for t in sets)]
    universe = (1 << A.size) - 1
    reach = 0
    for s in sets:
        reach |= s
    if reach != universe:
        missing = A.elements[(universe & ~reach).bit_length() - 1]
        raise PreconditionError("translates of P by elements of A miss part of A", witness=missing)

    greedy = _greedy_cover(universe, sets)
    best = len(greedy)
    if best == 1:
        return Capped(1)
    largest = max(s.bit_count() for s in sets)
    owners = [[i for i, s in enumerate(sets) if (s >> e) & 1] for e in range(A.size)]
    limit = min(best, cap + 1)

    def search(left: int, depth: int) -> None:
        nonlocal limit
        if not left:
            limit = min(limit, depth)
            return
        if depth + -(-left.bit_count() // largest) >= limit:
            return
        pivot = min((e for e in iter_bits(left)), key=lambda e: len(owners[e]))
        for i in sorted(owners[pivot], key=lambda i: -(sets[i] & left).bit_count()):
            search(left & ~sets[i], depth + 1)

    search(universe, 0)
    if limit > cap:
        log.warning("cover oracle hit cap %d", cap)
        return Capped(cap, exact=False)
    return Capped(limit)


def iter_bits(value: int):
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low
