"""Subsets of a finite group and the set algebra the rest of the package is written in."""
from __future__ import annotations
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np

from .errors import CapExceededError, GroupMismatchError, PreconditionError, SpecError
from .groups import FiniteGroup
from .util import get_settings, parse_fraction

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupSubset:
    group: FiniteGroup
    mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool, copy=True)
        if m.shape != (self.group.order,):
            raise SpecError(f"mask of shape {m.shape} does not fit {self.group.name}")
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_elements(cls, group: FiniteGroup, elements: Iterable[int]) -> "GroupSubset":
        mask = np.zeros(group.order, dtype=bool)
        idx = np.fromiter((int(x) for x in elements), dtype=np.int64)
        if len(idx) and (idx.min() < 0 or idx.max() >= group.order):
            raise SpecError(f"element out of range for {group.name}")
        mask[idx] = True
        return cls(group, mask)

    @classmethod
    def full(cls, group: FiniteGroup) -> "GroupSubset":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def empty(cls, group: FiniteGroup) -> "GroupSubset":
        return cls(group, np.zeros(group.order, dtype=bool))

    @cached_property
    def size(self) -> int:
        return int(self.mask.sum())

    @cached_property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def elements(self) -> List[int]:
        return [int(x) for x in self.indices]

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return self.size > 0

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[int(x)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupSubset):
            return NotImplemented
        return self.group.same_as(other.group) and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash((self.group.fingerprint, self.mask.tobytes()))

    def _check(self, other: "GroupSubset") -> None:
        if not self.group.same_as(other.group):
            raise GroupMismatchError(f"{self.group.name} vs {other.group.name}")

    def __and__(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask & other.mask)

    def __or__(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask | other.mask)

    def __sub__(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask & ~other.mask)

    def __xor__(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask ^ other.mask)

    def __le__(self, other: "GroupSubset") -> bool:
        self._check(other)
        return not bool(np.any(self.mask & ~other.mask))

    def issubset(self, other: "GroupSubset") -> bool:
        return self <= other

    def first_outside(self, other: "GroupSubset") -> Optional[int]:
        """Least element of self not in other, or None when self is contained in other."""
        self._check(other)
        out = np.flatnonzero(self.mask & ~other.mask)
        return int(out[0]) if len(out) else None

    def left_translate(self, g: int) -> "GroupSubset":
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.group.mul[int(g), self.indices]] = True
        return GroupSubset(self.group, mask)

    def right_translate(self, g: int) -> "GroupSubset":
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.group.mul[self.indices, int(g)]] = True
        return GroupSubset(self.group, mask)

    def __repr__(self) -> str:
        els = self.elements
        shown = ",".join(map(str, els[:16])) + (",..." if len(els) > 16 else "")
        return f"GroupSubset({self.group.name}, {{{shown}}}, size={self.size})"


def product_set(A: GroupSubset, B: GroupSubset) -> GroupSubset:
    """AB = {ab : a in A, b in B}."""
    A._check(B)
    return GroupSubset(A.group, A.group.product_mask(A.mask, B.mask))


def inverse_set(A: GroupSubset) -> GroupSubset:
    # x in A^-1 iff x^-1 in A
    return GroupSubset(A.group, A.mask[A.group.inv])


def power_set(A: GroupSubset, n: int) -> GroupSubset:
    """A^n by repeated squaring, using A^(2m) = (A^m)^2."""
    if n < 1:
        raise SpecError(f"power_set needs n >= 1, got {n}")
    result: Optional[GroupSubset] = None
    base = A
    while n:
        if n & 1:
            result = base if result is None else product_set(result, base)
        n >>= 1
        if n:
            base = product_set(base, base)
    return result


def power_set_inductive(A: GroupSubset, n: int) -> GroupSubset:
    """A^n straight from A^1 = A, A^(k+1) = A^k A."""
    if n < 1:
        raise SpecError(f"power_set needs n >= 1, got {n}")
    out = A
    for _ in range(n - 1):
        out = product_set(out, A)
    return out


def complement(A: GroupSubset) -> GroupSubset:
    return GroupSubset(A.group, ~A.mask)


def is_symmetric(A: GroupSubset) -> bool:
    """True iff A = A^-1 and A contains the identity."""
    return bool(A.mask[0]) and bool(np.array_equal(A.mask, A.mask[A.group.inv]))


def asymmetry_witness(A: GroupSubset) -> Optional[int]:
    if not A.mask[0]:
        return 0
    bad = np.flatnonzero(A.mask != A.mask[A.group.inv])
    return int(bad[0]) if len(bad) else None


@dataclass(frozen=True)
class TuplingParams:
    sigma: Fraction
    tau: Fraction
    delta: Fraction
    alpha: Fraction

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "tau": self.tau, "delta": self.delta, "alpha": self.alpha}


def tupling_params(A: GroupSubset) -> TuplingParams:
    """
    Doubling and tripling ratios of a nonempty set.

    Returns:
        sigma = |A^2|/|A|, tau = |A^3|/|A|, delta = |AA^-1|/|A|, alpha = |AA^-1A|/|A|.
    """
    if not A:
        raise PreconditionError("tupling parameters need a nonempty set")
    A2 = product_set(A, A)
    A3 = product_set(A2, A)
    AAi = product_set(A, inverse_set(A))
    AAiA = product_set(AAi, A)
    n = A.size
    return TuplingParams(Fraction(A2.size, n), Fraction(A3.size, n), Fraction(AAi.size, n), Fraction(AAiA.size, n))


def is_subgroup(H: GroupSubset) -> bool:
    # nonempty and closed under products suffices in a finite group
    return bool(H.mask[0]) and product_set(H, H) == H


def generated_subgroup(group: FiniteGroup, gens: Iterable[int]) -> GroupSubset:
    mask = np.zeros(group.order, dtype=bool)
    mask[0] = True
    for g in gens:
        mask[int(g)] = True
    while True:
        nxt = group.product_mask(mask, mask)
        if np.array_equal(nxt, mask):
            return GroupSubset(group, mask)
        mask = nxt


def cyclic_subgroup(group: FiniteGroup, x: int) -> GroupSubset:
    mask = np.zeros(group.order, dtype=bool)
    y = 0
    while True:
        mask[y] = True
        y = int(group.mul[y, x])
        if y == 0:
            return GroupSubset(group, mask)


def enumerate_subgroups(group: FiniteGroup, limit: Optional[int] = None,
                        cap: Optional[int] = None) -> List[GroupSubset]:
    """
    All subgroups of the group, sorted by (size, elements).

    Cyclic subgroups seed the search; every known subgroup is then joined with
    every cyclic subgroup it does not contain until nothing new appears. With
    `limit`, the search stops after that many subgroups have been found.

    Raises:
        CapExceededError: the order exceeds the subgroup cap and no limit was given.
    """
    cap = cap or get_settings().subgroup_cap
    if group.order > cap and limit is None:
        raise CapExceededError(f"subgroup enumeration of {group.name} (order {group.order}) exceeds cap {cap}")

    found = {}
    cyclics = []
    for x in range(group.order):
        C = cyclic_subgroup(group, x)
        key = C.mask.tobytes()
        if key not in found:
            found[key] = C
            cyclics.append(C)
    frontier = list(found.values())
    while frontier and (limit is None or len(found) < limit):
        nxt = []
        for H in frontier:
            for C in cyclics:
                if C <= H:
                    continue
                J = generated_subgroup(group, np.flatnonzero(H.mask | C.mask))
                key = J.mask.tobytes()
                if key not in found:
                    found[key] = J
                    nxt.append(J)
                    if limit is not None and len(found) >= limit:
                        break
            if limit is not None and len(found) >= limit:
                break
        frontier = nxt
    subgroups = sorted(found.values(), key=lambda H: (H.size, H.elements))
    if limit is not None:
        subgroups = subgroups[:limit]
    log.debug("%s: %d subgroups", group.name, len(subgroups))
    return subgroups


@lru_cache(maxsize=16)
def subgroup_lattice(group: FiniteGroup, cap: Optional[int] = None) -> Tuple[GroupSubset, ...]:
    """enumerate_subgroups, memoised per group object."""
    return tuple(enumerate_subgroups(group, cap=cap))


def _parse_int_list(text: str, group: FiniteGroup) -> List[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise SpecError(f"bad element list {text!r}") from e
    for v in values:
        if not 0 <= v < group.order:
            raise SpecError(f"element {v} out of range for {group.name}")
    return values


def parse_subset(group: FiniteGroup, spec: str, default_seed: int = 0) -> GroupSubset:
    """
    Subset from a spec string:
      "0,1,3"                      explicit element indices
      "random:p=1/3:seed=7"        each element kept independently with probability p
      "interval:-2..2"             index range (abelian groups), taken mod |G|
      "cosets:0,4,8:0,1"           union of left cosets rH of the subgroup H
      "all" / "empty"
    """
    spec = spec.strip()
    if spec == "all":
        return GroupSubset.full(group)
    if spec == "empty":
        return GroupSubset.empty(group)
    if spec.startswith("random:"):
        opts = {}
        for part in spec.split(":")[1:]:
            key, _, value = part.partition("=")
            opts[key.strip()] = value.strip()
        if "p" not in opts or set(opts) - {"p", "seed"}:
            raise SpecError(f"bad random subset spec {spec!r}")
        p = parse_fraction(opts["p"])
        if not 0 <= p <= 1:
            raise SpecError(f"probability out of range in {spec!r}")
        try:
            seed = int(opts.get("seed", default_seed))
        except ValueError as e:
            raise SpecError(f"bad seed in {spec!r}") from e
        rng = np.random.default_rng(seed)
        return GroupSubset(group, rng.random(group.order) < float(p))
    if spec.startswith("interval:"):
        if not group.is_abelian:
            raise SpecError("interval subsets need an abelian group")
        lo, sep, hi = spec[len("interval:"):].partition("..")
        try:
            a, b = int(lo), int(hi)
        except ValueError as e:
            raise SpecError(f"bad interval {spec!r}") from e
        if not sep or b < a:
            raise SpecError(f"bad interval {spec!r}")
        return GroupSubset.from_elements(group, {x % group.order for x in range(a, b + 1)})
    if spec.startswith("cosets:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise SpecError(f"bad coset spec {spec!r}")
        H = GroupSubset.from_elements(group, _parse_int_list(parts[1], group))
        if not is_subgroup(H):
            raise SpecError(f"{parts[1]!r} is not a subgroup of {group.name}")
        reps = GroupSubset.from_elements(group, _parse_int_list(parts[2], group))
        return product_set(reps, H)
    if not spec:
        raise SpecError("empty subset spec")
    return GroupSubset.from_elements(group, _parse_int_list(spec, group))


def subsets_of(group: FiniteGroup, nonempty: bool = True) -> Iterator[GroupSubset]:
    """Every subset of a small group, in increasing bitmask order."""
    n = group.order
    if n > 20:
        raise CapExceededError(f"exhaustive subset scan of order {n}")
    bits = 1 << np.arange(n)
    for code in range(1 if nonempty else 0, 1 << n):
        yield GroupSubset(group, (code & bits) != 0)
