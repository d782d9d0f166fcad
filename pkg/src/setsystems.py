"""
Set systems over a finite ground set and their VC dimension.

Family members are Python int bitsets over ground *positions* (bit j set means
ground[j] is in the member), so traces and splits are plain `&` and `~`.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import PreconditionError, SpecError
from .subsets import GroupSubset, inverse_set, product_set
from .util import Capped, get_settings

log = logging.getLogger(__name__)

SIDES = ("left", "right")
VARIANTS = ("translate", "sisask", "dual-of-translate")


def make_bitset(indexes: Iterable[int]) -> int:
    value = 0
    for idx in indexes:
        value |= 1 << idx
    return value


def iter_indexes(value: int) -> Iterable[int]:
    index = 0
    while value:
        if value & 1:
            yield index
        value >>= 1
        index += 1


def rows_to_bitsets(rows: np.ndarray) -> List[int]:
    """Bool matrix (members x ground) to one int bitset per row."""
    if rows.shape[1] == 0:
        return [0] * rows.shape[0]
    packed = np.packbits(rows, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


@dataclass(frozen=True)
class SetSystem:
    ground: Tuple[Hashable, ...]
    family: Tuple[int, ...]
    provenance: str = "custom"

    def __post_init__(self):
        limit = 1 << len(self.ground)
        for member in self.family:
            if member < 0 or member >= limit:
                raise SpecError("family member is not a subset of the ground set")

    @classmethod
    def from_sets(cls, ground: Sequence[Hashable], family: Iterable[Iterable[Hashable]],
                  provenance: str = "custom") -> "SetSystem":
        pos = {x: i for i, x in enumerate(ground)}
        try:
            bits = tuple(make_bitset(pos[x] for x in member) for member in family)
        except KeyError as e:
            raise SpecError(f"{e.args[0]!r} is not in the ground set") from e
        return cls(tuple(ground), bits, provenance)

    def __len__(self) -> int:
        return len(self.family)

    def member(self, i: int) -> Tuple[Hashable, ...]:
        return tuple(self.ground[j] for j in iter_indexes(self.family[i]))

    def members(self) -> List[Tuple[Hashable, ...]]:
        return [self.member(i) for i in range(len(self.family))]

    def deduplicated(self) -> "SetSystem":
        return SetSystem(self.ground, tuple(dict.fromkeys(self.family)), self.provenance)

    def incidence(self) -> np.ndarray:
        """Bool matrix (members x ground)."""
        g = len(self.ground)
        nbytes = max(1, (g + 7) // 8)
        raw = np.frombuffer(b"".join(m.to_bytes(nbytes, "little") for m in self.family), dtype=np.uint8)
        bits = np.unpackbits(raw.reshape(len(self.family), nbytes), axis=1, bitorder="little")
        return bits[:, :g].astype(bool)


def _system_from_rows(ground: GroupSubset, rows: np.ndarray, provenance: str) -> SetSystem:
    cols = ground.indices
    return SetSystem(tuple(int(x) for x in cols), tuple(rows_to_bitsets(rows[:, cols])), provenance)


def translate_rows(A: GroupSubset, xs: np.ndarray, side: str) -> np.ndarray:
    """Row r is the mask of x_r A (left) or A x_r (right)."""
    group = A.group
    rows = np.zeros((len(xs), group.order), dtype=bool)
    if side == "left":
        images = group.mul[np.ix_(xs, A.indices)]
    else:
        images = group.mul[np.ix_(A.indices, xs)].T
    rows[np.arange(len(xs))[:, None], images] = True
    return rows


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise SpecError(f"side must be left or right, got {side!r}")


def translate_system(A: GroupSubset, B: GroupSubset, side: str = "left") -> SetSystem:
    """
    Left: {xA : x in B} on ground BA. Right: {Ax : x in B} on ground AB.
    """
    _check_side(side)
    if not A or not B:
        raise PreconditionError("translate systems need nonempty A and B")
    ground = product_set(B, A) if side == "left" else product_set(A, B)
    rows = translate_rows(A, B.indices, side)
    return _system_from_rows(ground, rows, f"{side}-translate")


def sisask_system(A: GroupSubset, B: GroupSubset, side: str = "left") -> SetSystem:
    """
    Left: {xA ∩ B : x in BA^-1}. Right: {Ax ∩ B : x in A^-1 B}. Both on ground B.
    """
    _check_side(side)
    if not A or not B:
        raise PreconditionError("Sisask systems need nonempty A and B")
    Ai = inverse_set(A)
    xs = product_set(B, Ai) if side == "left" else product_set(Ai, B)
    rows = translate_rows(A, xs.indices, side) & B.mask[None, :]
    return _system_from_rows(B, rows, "sisask")


def _reduced_columns(S: SetSystem) -> Tuple[List[int], int]:
    """
    Distinct non-constant incidence columns, each as a bitset over the deduplicated
    family. Constant or repeated columns never lie in a shattered set of size >= 1.
    """
    members = list(dict.fromkeys(S.family))
    m = len(members)
    inc = SetSystem(S.ground, tuple(members)).incidence()
    cols = rows_to_bitsets(np.ascontiguousarray(inc.T))
    full = (1 << m) - 1
    seen = dict.fromkeys(c for c in cols if c not in (0, full))
    return list(seen), m


def _splits_all(c: int, classes: Sequence[int]) -> bool:
    for cl in classes:
        inside = cl & c
        if not inside or inside == cl:
            return False
    return True


def vc_dimension(S: SetSystem, cap: Optional[int] = None) -> Capped:
    """
    Exact VC dimension by depth-first search over lexicographic extensions.

    The current path is a shattered set together with the partition of the family
    into trace classes. A column extends the path exactly when it splits every
    class, and a column that fails to split some class fails for every refinement,
    so each node only hands its surviving candidates down. A branch is cut when its
    depth plus the candidates left, or plus log2 of the smallest class, cannot beat
    the best size found. The search returns as soon as a shattered set reaches
    log2 of the family size or `cap`; at `cap` the result becomes a lower bound.

    Raises:
        PreconditionError: the family is empty.
    """
    if not S.family:
        raise PreconditionError("VC dimension of an empty family is undefined")
    cap = cap if cap is not None else get_settings().vc_cap
    cols, m = _reduced_columns(S)
    upper = min(m.bit_length() - 1, len(cols))
    target = min(upper, cap)
    best = 0

    def extend(classes: List[int], candidates: List[int], depth: int) -> bool:
        nonlocal best
        best = max(best, depth)
        if best >= target:
            return True
        smallest = min(cl.bit_count() for cl in classes)
        if depth + min(len(candidates), smallest.bit_length() - 1) <= best:
            return False
        for i, c in enumerate(candidates):
            if depth + len(candidates) - i <= best:
                break
            split = []
            for cl in classes:
                inside = cl & c
                split.append(inside)
                split.append(cl ^ inside)
            rest = [c2 for c2 in candidates[i + 1:] if _splits_all(c2, split)]
            if extend(split, rest, depth + 1):
                return True
        return False

    extend([(1 << m) - 1], cols, 0)
    if best >= cap and cap < upper:
        log.warning("VC search stopped at cap %d (ground %d, family %d)", cap, len(S.ground), m)
        return Capped(cap, exact=False)
    return Capped(best, exact=True)


def dual_system(S: SetSystem, keep_multiplicity: bool = False) -> SetSystem:
    """
    Transposed incidence: ground = family members, one member F_x = {F : x in F} for
    every x covered by some member. Identical members collapse unless
    keep_multiplicity is set.
    """
    if not S.family:
        raise PreconditionError("dual of an empty family")
    members = list(S.family) if keep_multiplicity else list(dict.fromkeys(S.family))
    inc = SetSystem(S.ground, tuple(members)).incidence()
    covered = inc.any(axis=0)
    cols = rows_to_bitsets(np.ascontiguousarray(inc.T[covered]))
    return SetSystem(tuple(range(len(members))), tuple(cols), "dual")


def dual_vc(S: SetSystem, cap: Optional[int] = None) -> Capped:
    return vc_dimension(dual_system(S), cap)


def quotient_system(S: SetSystem) -> SetSystem:
    """Merge ground points with identical incidence, keeping the first of each class."""
    inc = S.incidence() if S.family else np.zeros((0, len(S.ground)), dtype=bool)
    keys = rows_to_bitsets(np.ascontiguousarray(inc.T)) if len(S.ground) else []
    first: Dict[int, int] = {}
    for j, k in enumerate(keys):
        first.setdefault(k, j)
    reps = sorted(first.values())
    rows = inc[:, reps]
    return SetSystem(tuple(S.ground[j] for j in reps), tuple(rows_to_bitsets(rows)), S.provenance)


def is_quotient(S1: SetSystem, S2: SetSystem, sigma: Mapping[Hashable, Hashable]) -> bool:
    """True iff sigma maps ground(S1) onto ground(S2) and S1 = {sigma^-1(F) : F in S2}."""
    if set(sigma) != set(S1.ground) or set(sigma.values()) != set(S2.ground):
        return False
    pos2 = {x: j for j, x in enumerate(S2.ground)}
    pulled = set()
    for F in S2.family:
        pulled.add(make_bitset(i for i, x in enumerate(S1.ground) if (F >> pos2[sigma[x]]) & 1))
    return pulled == set(S1.family)


def vc_variant(A: GroupSubset, base: Optional[GroupSubset] = None, side: str = "left",
               variant: str = "translate", cap: Optional[int] = None, fast_path: bool = True) -> Capped:
    """
    VC dimension of a translate-derived system of A over `base` (default: the whole group).

    Args:
        variant: "translate" for VC^side_base(A), "sisask" for dim_sideVC(A|base),
            "dual-of-translate" for VC*(F^side_base(A)).
        fast_path: answer translate queries with |BA| = |A| (resp. |AB| = |A|) as 0
            without searching.
    """
    _check_side(side)
    if variant not in VARIANTS:
        raise SpecError(f"unknown VC variant {variant!r}")
    B = base if base is not None else GroupSubset.full(A.group)
    if variant == "sisask":
        return vc_dimension(sisask_system(A, B, side), cap)
    if variant == "dual-of-translate":
        return dual_vc(translate_system(A, B, side), cap)
    if fast_path and A and B:
        grown = product_set(B, A) if side == "left" else product_set(A, B)
        if grown.size == A.size:
            return Capped(0, exact=True)
    return vc_dimension(translate_system(A, B, side), cap)


def sisask_dimension(A: GroupSubset, side: str = "left", cap: Optional[int] = None) -> Capped:
    """dim_sideVC(A) = dim_sideVC(A|A)."""
    return vc_variant(A, A, side, "sisask", cap)


def shattered(S: SetSystem, points: Sequence[Hashable]) -> bool:
    """Direct shattering test: all 2^|T| traces occur."""
    pos = {x: i for i, x in enumerate(S.ground)}
    mask = make_bitset(pos[p] for p in points)
    return len({F & mask for F in S.family}) == 1 << len(points)
