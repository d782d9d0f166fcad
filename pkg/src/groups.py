"""
Finite groups as Cayley tables.

Elements are the indices 0..n-1 and the identity is always index 0. Every other
module computes over these tables, so construction validates the group axioms
once and nothing downstream re-checks them.
"""
from __future__ import annotations
import itertools, json, logging, math, re
from dataclasses import dataclass
from functools import cached_property, reduce
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import CapExceededError, GroupAxiomError, SpecError
from .util import get_settings

log = logging.getLogger(__name__)

EXHAUSTIVE_ASSOC_ORDER = 512
SAMPLED_ASSOC_TRIPLES = 1_000_000
# Max cells touched by a single fancy-index product.
CHUNK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    inv: np.ndarray
    name: str
    abelian_decomposition: Optional[Tuple[int, ...]] = None
    labels: Optional[Tuple[str, ...]] = None

    identity = 0

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def coordinate_table(self) -> np.ndarray:
        """n x k residues of every element; requires an abelian decomposition."""
        if self.abelian_decomposition is None:
            raise SpecError(f"{self.name} has no cyclic decomposition")
        return np.stack(np.unravel_index(np.arange(self.order), self.abelian_decomposition), axis=1)

    @cached_property
    def fingerprint(self) -> int:
        return hash(self.mul.tobytes())

    def same_as(self, other: "FiniteGroup") -> bool:
        """Same Cayley table, so subsets of one are subsets of the other."""
        return self is other or (self.order == other.order and self.fingerprint == other.fingerprint
                                 and bool(np.array_equal(self.mul, other.mul)))

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def product_mask(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Membership mask of {xy : x in a, y in b} for two masks over the group."""
        out = np.zeros(self.order, dtype=bool)
        a_idx = np.flatnonzero(a)
        b_idx = np.flatnonzero(b)
        if not len(a_idx) or not len(b_idx):
            return out
        step = max(1, CHUNK_CELLS // len(b_idx))
        for start in range(0, len(a_idx), step):
            out[self.mul[np.ix_(a_idx[start:start + step], b_idx)].ravel()] = True
        return out

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def validate_table(mul: np.ndarray) -> np.ndarray:
    """
    Check the group axioms on a table whose identity already sits at index 0.

    Returns:
        The inverse table.
    """
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise GroupAxiomError("multiplication table must be a non-empty square")
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        raise GroupAxiomError("table entries out of range")
    ar = np.arange(n)
    if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
        raise GroupAxiomError("index 0 is not a two-sided identity")
    # Latin square: every row and column is a permutation.
    if not (np.all(np.sort(mul, axis=1) == ar) and np.all(np.sort(mul, axis=0) == ar[:, None])):
        raise GroupAxiomError("table is not a Latin square")
    inv = np.argmax(mul == 0, axis=1)
    if not np.all(mul[ar, inv] == 0):
        raise GroupAxiomError("missing inverses")

    if n <= EXHAUSTIVE_ASSOC_ORDER:
        for a in range(n):
            # (ab)c against a(bc) for every b, c
            if not np.array_equal(mul[mul[a]], mul[a][mul]):
                raise GroupAxiomError(f"associativity fails for a={a}")
    else:
        rng = np.random.default_rng(0)
        remaining = SAMPLED_ASSOC_TRIPLES
        while remaining:
            k = min(remaining, 100_000)
            a, b, c = rng.integers(0, n, size=(3, k))
            if not np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]):
                raise GroupAxiomError("associativity fails on a sampled triple")
            remaining -= k
        log.debug("associativity sampled on %d triples for order %d", SAMPLED_ASSOC_TRIPLES, n)
    return inv.astype(np.int32)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise SpecError(f"Z{n}: order must be positive")
    ar = np.arange(n)
    mul = (np.add.outer(ar, ar) % n).astype(np.int32)
    return FiniteGroup(mul, ((-ar) % n).astype(np.int32), f"Z{n}", (n,))


def direct_product(g1: FiniteGroup, g2: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    """G1 x G2 with element (x1, x2) stored at index x1 * |G2| + x2."""
    n1, n2 = g1.order, g2.order
    mul = (g1.mul[:, None, :, None] * n2 + g2.mul[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    inv = (g1.inv[:, None] * n2 + g2.inv[None, :]).reshape(n1 * n2)
    decomp = None
    if g1.abelian_decomposition is not None and g2.abelian_decomposition is not None:
        decomp = g1.abelian_decomposition + g2.abelian_decomposition
    labels = None
    if g1.labels or g2.labels:
        labels = tuple(f"({g1.label(a)},{g2.label(b)})" for a in range(n1) for b in range(n2))
    return FiniteGroup(mul.astype(np.int32), inv.astype(np.int32), name or f"{g1.name}x{g2.name}", decomp, labels)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; r^i s^a is stored at index i + n*a."""
    if n < 1:
        raise SpecError(f"D{n}: n must be positive")
    idx = np.arange(2 * n)
    i, a = idx % n, idx // n
    rot = (i[:, None] + np.where(a[:, None] == 0, i[None, :], -i[None, :])) % n
    flip = (a[:, None] + a[None, :]) % 2
    mul = (rot + n * flip).astype(np.int32)
    labels = tuple(("r%d" % k if k else "e") if s == 0 else ("r%ds" % k if k else "s") for s in (0, 1) for k in range(n))
    return FiniteGroup(mul, validate_table(mul), f"D{n}", labels=labels)


def symmetric(n: int) -> FiniteGroup:
    """S_n on lexicographically ordered permutations; (pq)(x) = p(q(x))."""
    if not 1 <= n <= 6:
        raise SpecError(f"S{n}: only 1 <= n <= 6 is supported")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    m = len(perms)
    weights = n ** np.arange(n - 1, -1, -1)
    codes = perms @ weights
    composed = perms[np.arange(m)[:, None, None], perms[None, :, :]]
    mul = np.searchsorted(codes, composed @ weights).astype(np.int32)
    labels = tuple("".join(str(v + 1) for v in p) for p in perms)
    return FiniteGroup(mul, validate_table(mul), f"S{n}", labels=labels)


def _hamilton(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)


def quaternion() -> FiniteGroup:
    units = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    elems = [tuple(s * c for c in u) for u in units for s in (1, -1)]
    pos = {e: k for k, e in enumerate(elems)}
    mul = np.array([[pos[_hamilton(p, q)] for q in elems] for p in elems], dtype=np.int32)
    labels = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
    return FiniteGroup(mul, validate_table(mul), "Q8", labels=labels)


def from_table(path: str) -> FiniteGroup:
    """Load {order, mul} JSON; the identity is relabelled to index 0."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        mul = np.asarray(payload["mul"], dtype=np.int64)
        order = int(payload.get("order", len(mul)))
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise SpecError(f"cannot read group table {path!r}: {e}") from e
    if mul.ndim != 2 or mul.shape != (order, order):
        raise GroupAxiomError(f"table shape {mul.shape} does not match order {order}")
    if mul.min() < 0 or mul.max() >= order:
        raise GroupAxiomError("table entries out of range")
    ar = np.arange(order)
    ids = [e for e in range(order) if np.array_equal(mul[e], ar) and np.array_equal(mul[:, e], ar)]
    if not ids:
        raise GroupAxiomError("table has no identity element")
    e = ids[0]
    perm = np.array([e] + [x for x in range(order) if x != e])
    old_to_new = np.empty(order, dtype=np.int64)
    old_to_new[perm] = ar
    relabelled = old_to_new[mul[np.ix_(perm, perm)]].astype(np.int32)
    labels = tuple(str(int(x)) for x in perm)
    return FiniteGroup(relabelled, validate_table(relabelled), f"table:{Path(path).name}", labels=labels)


_FACTOR = re.compile(r"^(Z|D|S)(\d+)(?:\^(\d+))?$|^Q8(?:\^(\d+))?$")


def _parse_factors(spec: str) -> List[Tuple[str, int, int]]:
    factors = []
    for raw in spec.split("x"):
        m = _FACTOR.match(raw.strip())
        if not m:
            raise SpecError(f"bad group factor {raw!r} in {spec!r}")
        if raw.strip().startswith("Q8"):
            factors.append(("Q", 8, int(m.group(4) or 1)))
        else:
            factors.append((m.group(1), int(m.group(2)), int(m.group(3) or 1)))
    for kind, n, k in factors:
        if k < 1:
            raise SpecError(f"exponent must be positive in {spec!r}")
    return factors


def _factor_order(kind: str, n: int) -> int:
    return {"Z": n, "D": 2 * n, "Q": 8}.get(kind) or math.factorial(n)


def spec_order(spec: str) -> int:
    """Order of the group a product spec describes, without building it."""
    return math.prod(_factor_order(kind, n) ** k for kind, n, k in _parse_factors(spec))


def build_group(spec: str, max_order: Optional[int] = None) -> FiniteGroup:
    """
    Build a validated group from a spec such as "Z4", "Z2^3", "Z4xZ2^2", "D4", "S3", "Q8"
    or "table:<path>".

    Raises:
        SpecError: the group string does not parse.
        GroupAxiomError: a loaded table is not a group.
        CapExceededError: the order exceeds max_order (default NIPREG_MAX_ORDER).
    """
    spec = spec.strip()
    cap = max_order or get_settings().max_order
    if spec.startswith("table:"):
        group = from_table(spec[len("table:"):])
        if group.order > cap:
            raise CapExceededError(f"{spec}: order {group.order} exceeds cap {cap}")
        return group

    factors = _parse_factors(spec)
    for kind, n, _ in factors:
        if kind == "S" and not 1 <= n <= 6:
            raise SpecError(f"S{n}: only 1 <= n <= 6 is supported")
        if n < 1:
            raise SpecError(f"{kind}{n}: size must be positive")
    order = spec_order(spec)
    if order > cap:
        raise CapExceededError(f"{spec}: order {order} exceeds cap {cap}")

    builders = {"Z": cyclic, "D": dihedral, "S": symmetric, "Q": lambda _n: quaternion()}
    parts = [builders[kind](n) for kind, n, k in factors for _ in range(k)]
    group = reduce(direct_product, parts)
    if len(parts) > 1:
        if order <= EXHAUSTIVE_ASSOC_ORDER:
            validate_table(group.mul)
        group = FiniteGroup(group.mul, group.inv, spec, group.abelian_decomposition, group.labels)
    log.debug("built %s of order %d", spec, group.order)
    return group


_CATALOG = [
    "Z1", "Z2", "Z3", "Z4", "Z2^2", "Z5", "Z6", "S3", "D3", "Z7", "Z8", "Z4xZ2", "Z2^3", "D4", "Q8",
    "Z9", "Z3^2", "Z10", "D5", "Z11", "Z12", "Z2xZ6", "D6", "Z13", "Z14", "D7", "Z15",
    "Z16", "Z4^2", "Z8xZ2", "Z2^4", "Z4xZ2^2", "D8", "D4xZ2", "Q8xZ2", "Z17", "Z18", "Z3xZ6",
    "D9", "S3xZ3", "Z19", "Z20", "Z2xZ10", "D10", "Z21", "Z22", "D11", "Z23", "Z24", "Z2xZ12",
    "Z2^2xZ6", "D12", "S4", "S3xZ4", "D6xZ2", "Q8xZ3", "D4xZ3",
    "Z32", "Z2^5", "D16", "Q8xZ4", "S4xZ2", "Z2^6", "Z4^3", "Z8^2", "D32",
    "Z128", "Z2^7", "Z16^2", "Z2^8", "D128",
]


def catalog(max_order: int = 24) -> List[str]:
    """Built-in group specs up to max_order, ordered by (order, spec)."""
    specs = [s for s in _CATALOG if spec_order(s) <= max_order]
    return sorted(specs, key=lambda s: (spec_order(s), s))


def element_order(group: FiniteGroup, x: int) -> int:
    k, y = 1, int(x)
    while y != 0:
        y = int(group.mul[y, x])
        k += 1
    return k


def element_power(group: FiniteGroup, x: int, k: int) -> int:
    """x^k for any integer k."""
    base = int(group.inv[x]) if k < 0 else int(x)
    y = 0
    for _ in range(abs(k)):
        y = int(group.mul[y, base])
    return y


def coordinates(group: FiniteGroup, x: int) -> Tuple[int, ...]:
    """Residue tuple of x under the group's cyclic decomposition."""
    return tuple(int(c) for c in group.coordinate_table[x])


def from_coordinates(group: FiniteGroup, coords: Sequence[int]) -> int:
    decomp = group.abelian_decomposition
    if decomp is None:
        raise SpecError(f"{group.name} has no cyclic decomposition")
    return int(np.ravel_multi_index(tuple(int(c) % m for c, m in zip(coords, decomp)), decomp))
