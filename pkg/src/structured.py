"""
Structured sets inside stabilizers.

- afz_shrink: the shrinking iteration that trades a stabilizer of tiny radius for a
  set of controlled growth whose n-fold product stays inside St^l_eps(A).
- Bohr sets of abelian groups, their halving and covering bound.
- Subgroup and coset-progression search inside a given set.
"""
from __future__ import annotations
import itertools, logging, math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .errors import (CapExceededError, DegenerateDimensionError, FalsificationError,
                     NumericalAmbiguityError, PreconditionError, SpecError)
from .groups import FiniteGroup, element_order, element_power
from .setsystems import vc_variant
from .stabilizers import GUARD, st_eps, stabilizer_guarded
from .subsets import (GroupSubset, subgroup_lattice, inverse_set, is_subgroup, is_symmetric,
                      power_set, product_set)
from .util import parse_eps, parse_fraction

log = logging.getLogger(__name__)

AFZ_PRECISION = 40


@dataclass(frozen=True)
class AFZCertificate:
    growth_ok: bool       # |B^u| <= u^w |B|
    containment_ok: bool  # B^n ⊆ St^l_eps(A)
    size_ok: bool         # |A|^d <= m (30kn/eps)^(d(d+1)) |B|^d
    symmetric: bool

    @property
    def ok(self) -> bool:
        return self.growth_ok and self.containment_ok and self.size_ok and self.symmetric


@dataclass(frozen=True)
class AFZResult:
    B: GroupSubset
    t: int
    delta_used: str
    d: int
    k: Fraction
    m: Fraction
    u: int
    n: int
    case: str
    cert: AFZCertificate


def _guarded_le(lhs: int, rhs: mpmath.mpf, what: str) -> bool:
    lhs_f = mpmath.mpf(lhs)
    if abs(lhs_f - rhs) <= GUARD * max(1, abs(rhs)):
        raise NumericalAmbiguityError(f"{what}: {lhs} is within the guard of {rhs}")
    return lhs_f <= rhs


def afz_shrink(A: GroupSubset, eps, u: int = 2, n: int = 2, case: str = "one",
               d: Optional[int] = None, vc_cap: Optional[int] = None) -> AFZResult:
    """
    Find a symmetric B with |B^u| <= u^(d(d+1))|B|, B^n ⊆ St^l_eps(A) and
    |A| <= m^(1/d) (30kn/eps)^(d+1) |B|.

    Case "one": d = VC^l_A(A), k = |A^2|/|A|. Case "two": d = VC^l_{A^-1}(A),
    k = |A^-1 A|/|A|. In both, m = |AA^-1|/|A|.

    delta = m^(-1/d^2) (30k)^(-1/d) (eps/n)^(1+1/d) is evaluated in mpmath; R = St^l_delta(A)
    and B = R^(u^t) for the least t with u^(tw) <= c and |R^(u^(t+1))| < u^w |R^(u^t)|,
    where w = d(d+1) and c = m (30k/delta)^d. The three conclusions are then
    re-verified with exact integer arithmetic.

    Raises:
        DegenerateDimensionError: d = 0; A is then a coset and B = H works directly.
        CapExceededError: d is only known as a lower bound.
        FalsificationError: no admissible t exists, or the certificate fails.
    """
    eps = parse_eps(eps)
    if not A:
        raise PreconditionError("afz_shrink needs a nonempty A")
    if u < 2 or n < u:
        raise SpecError(f"need n >= u >= 2, got u={u}, n={n}")
    if case not in ("one", "two"):
        raise SpecError(f"case must be 'one' or 'two', got {case!r}")

    Ai = inverse_set(A)
    if d is None:
        base = A if case == "one" else Ai
        found = vc_variant(A, base, "left", "translate", cap=vc_cap)
        if not found.exact:
            raise CapExceededError(f"VC dimension is only known as {found}")
        d = found.value
    if d == 0:
        raise DegenerateDimensionError(
            "d = 0: A is a coset of a subgroup H (|AA^-1| = |A|) and B = H satisfies the conclusions")
    size = A.size
    k = Fraction(product_set(A, A).size if case == "one" else product_set(Ai, A).size, size)
    m = Fraction(product_set(A, Ai).size, size)
    w = d * (d + 1)

    with mpmath.workdps(AFZ_PRECISION):
        mk, mm = mpmath.mpf(k.numerator) / k.denominator, mpmath.mpf(m.numerator) / m.denominator
        me = mpmath.mpf(eps.numerator) / eps.denominator
        delta = mm ** (-mpmath.mpf(1) / d ** 2) * (30 * mk) ** (-mpmath.mpf(1) / d) * (me / n) ** (1 + mpmath.mpf(1) / d)
        c = mm * (30 * mk / delta) ** d
        R = stabilizer_guarded(A, delta * size, "left")
        log.debug("afz: d=%d k=%s m=%s delta=%s |R|=%d", d, k, m, mpmath.nstr(delta, 12), R.size)

        B, t = R, 0
        chosen = None
        while _guarded_le(u ** (t * w), c, "u^(tw) <= c"):
            grown = power_set(B, u)
            if grown.size < u ** w * B.size:
                chosen = B
                break
            B, t = grown, t + 1
        delta_text = mpmath.nstr(delta, 20)
    if chosen is None:
        raise FalsificationError("no admissible t in the shrinking iteration",
                                 {"group_spec": A.group.name, "A": A.elements, "eps": str(eps), "u": u, "n": n})

    B = chosen
    Bu = power_set(B, u)
    cert = AFZCertificate(
        growth_ok=Bu.size <= u ** w * B.size,
        containment_ok=power_set(B, n) <= st_eps(A, eps, "left"),
        size_ok=Fraction(size) ** d <= m * (30 * k * n / eps) ** w * Fraction(B.size) ** d,
        symmetric=is_symmetric(B),
    )
    if not cert.ok:
        raise FalsificationError(f"shrinking certificate fails: {cert}",
                                 {"group_spec": A.group.name, "A": A.elements, "eps": str(eps), "u": u, "n": n,
                                  "case": case, "B": B.elements})
    return AFZResult(B, t, delta_text, d, k, m, u, n, case, cert)


@dataclass(frozen=True)
class BohrSpec:
    group: FiniteGroup
    gamma: Tuple[Tuple[int, ...], ...]
    delta: Fraction

    def __post_init__(self):
        decomp = self.group.abelian_decomposition
        if decomp is None:
            raise SpecError(f"Bohr sets need an abelian group with a cyclic decomposition, not {self.group.name}")
        if not self.gamma:
            raise SpecError("Bohr spec needs at least one character")
        gamma = []
        for g in self.gamma:
            if len(g) != len(decomp):
                raise SpecError(f"character {g} does not match factor orders {decomp}")
            gamma.append(tuple(int(r) % mi for r, mi in zip(g, decomp)))
        object.__setattr__(self, "gamma", tuple(gamma))
        delta = parse_fraction(self.delta)
        if not 0 < delta <= 2:
            raise SpecError(f"Bohr radius must lie in (0, 2], got {delta}")
        object.__setattr__(self, "delta", delta)

    @property
    def m(self) -> int:
        return len(self.gamma)

    def to_dict(self) -> dict:
        return {"gamma": [list(g) for g in self.gamma], "delta": self.delta}


def character_phases(group: FiniteGroup, gamma: Sequence[int]) -> Tuple[np.ndarray, int]:
    """Numerators of <gamma, g> mod 1 over the common denominator lcm(m_i)."""
    decomp = group.abelian_decomposition
    L = math.lcm(*decomp)
    weights = np.array([int(r) * (L // mi) for r, mi in zip(gamma, decomp)], dtype=np.int64)
    return (group.coordinate_table.astype(np.int64) @ weights) % L, L


def character_distance(group: FiniteGroup, gamma: Sequence[int]) -> Tuple[np.ndarray, np.ndarray, int]:
    """|chi(g) - 1| = 2 sin(pi * phase) for every g, with the exact phases."""
    num, L = character_phases(group, gamma)
    return 2.0 * np.sin(np.pi * num / L), num, L


def _bohr_mask(group: FiniteGroup, gamma, delta: Fraction, strict_guard: bool = True) -> Optional[np.ndarray]:
    """
    Membership mask, or None on an ambiguous boundary when strict_guard is False.

    Values within the 1e-9 guard of delta raise NumericalAmbiguityError, except the
    one exact tie a rational delta admits: 2 sin(pi q) = 1 at phases 1/6 and 5/6 when
    delta = 1. That tie is decided exactly and excluded, since membership is strict.
    """
    mask = np.ones(group.order, dtype=bool)
    if delta >= 2:
        return mask
    d = float(delta)
    for g in gamma:
        dist, num, L = character_distance(group, g)
        # 2 sin(pi q) is rational only at 0, 1, 2; for rational delta, equality happens
        # only at delta = 1 with phase 1/6 or 5/6
        exact_tie = (delta == 1) & ((6 * num == L) | (6 * num == 5 * L))
        near = (np.abs(dist - d) <= GUARD * max(1.0, d)) & ~exact_tie
        if near.any():
            if strict_guard:
                raise NumericalAmbiguityError(f"character {g} lands within the guard of delta={delta}")
            return None
        mask &= (dist < d) & ~exact_tie
    return mask


def bohr_set(spec: BohrSpec) -> GroupSubset:
    """
    {g : |chi_j(g) - 1| < delta for every j}; delta = 2 gives the whole group. At
    delta = 1 the exact boundary points (phase 1/6 or 5/6) are left out rather than
    reported as ambiguous.
    """
    return GroupSubset(spec.group, _bohr_mask(spec.group, spec.gamma, spec.delta))


def bohr_halving(spec: BohrSpec) -> BohrSpec:
    """Same characters at radius delta/2; asserts C·C ⊆ B."""
    half = BohrSpec(spec.group, spec.gamma, spec.delta / 2)
    B, C = bohr_set(spec), bohr_set(half)
    if not product_set(C, C) <= B:
        raise FalsificationError("halved Bohr set squares outside the original",
                                 {"group_spec": spec.group.name, **spec.to_dict()})
    return half


def bohr_cover_bound(spec: BohrSpec) -> int:
    """ceil(2 pi / delta)^m."""
    with mpmath.workdps(AFZ_PRECISION):
        ratio = 2 * mpmath.pi * spec.delta.denominator / spec.delta.numerator
        return int(mpmath.ceil(ratio)) ** spec.m


def find_subgroup_in(S: GroupSubset, cap: Optional[int] = None) -> Optional[GroupSubset]:
    """Largest subgroup H ⊆ S (first in enumeration order on ties); None when S misses the identity."""
    if not S.mask[0]:
        return None
    best = None
    for H in subgroup_lattice(S.group, cap):
        if H <= S and (best is None or H.size > best.size):
            best = H
    return best


def default_delta_grid() -> List[Fraction]:
    return [Fraction(k, 10) for k in range(20, 0, -1)]


def all_characters(group: FiniteGroup) -> List[Tuple[int, ...]]:
    decomp = group.abelian_decomposition
    return [tuple(c) for c in itertools.product(*(range(mi) for mi in decomp))]


def find_bohr_in(S: GroupSubset, max_m: int = 2, delta_grid: Optional[Sequence] = None,
                 budget: int = 20000, seed: int = 0) -> Optional[BohrSpec]:
    """
    Largest Bohr set inside S over character lists of size <= max_m and radii from
    `delta_grid` (descending; default 2.0, 1.9, ..., 0.1).

    Character lists are enumerated in order (the trivial character first) or, when
    there are more than `budget` lists, sampled with the given seed. For each list
    the largest radius whose set fits in S is used. Radii that land on a guard
    boundary are skipped. Returns None when no Bohr set besides {0} fits.
    """
    group = S.group
    if group.abelian_decomposition is None:
        raise SpecError(f"Bohr search needs an abelian group with a cyclic decomposition, not {group.name}")
    if not S.mask[0]:
        return None
    grid = sorted({parse_fraction(x) for x in (delta_grid or default_delta_grid())}, reverse=True)
    chars = all_characters(group)
    lists: List[Tuple[Tuple[int, ...], ...]] = []
    total = sum(math.comb(len(chars), r) for r in range(1, max_m + 1))
    if total <= budget:
        for r in range(1, max_m + 1):
            lists.extend(itertools.combinations(chars, r))
    else:
        log.warning("Bohr search samples %d of %d character lists", budget, total)
        rng = np.random.default_rng(seed)
        lists.append((chars[0],))
        while len(lists) < budget:
            r = int(rng.integers(1, max_m + 1))
            pick = sorted(rng.choice(len(chars), size=r, replace=False))
            lists.append(tuple(chars[i] for i in pick))

    best: Optional[BohrSpec] = None
    best_size = 1
    for gamma in lists:
        for delta in grid:
            mask = _bohr_mask(group, gamma, delta, strict_guard=False)
            if mask is None:
                continue
            if not np.any(mask & ~S.mask):
                size = int(mask.sum())
                if size > best_size:
                    best, best_size = BohrSpec(group, gamma, delta), size
                break
        if best_size == S.size:
            break
    return best


@dataclass(frozen=True)
class CosetProgression:
    group: FiniteGroup
    H: GroupSubset
    generators: Tuple[int, ...]
    bounds: Tuple[int, ...]

    def __post_init__(self):
        if not self.group.is_abelian:
            raise SpecError("coset progressions need an abelian group")
        if len(self.generators) != len(self.bounds) or any(L < 0 for L in self.bounds):
            raise SpecError("one nonnegative bound per generator is required")
        if not is_subgroup(self.H):
            raise SpecError("H must be a subgroup")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def proper(self) -> bool:
        return coset_progression_set(self).size == self.H.size * math.prod(2 * L + 1 for L in self.bounds)

    def to_dict(self) -> dict:
        return {"H": self.H.elements, "generators": list(self.generators), "bounds": list(self.bounds),
                "proper": self.proper}


def _box(group: FiniteGroup, x: int, L: int) -> GroupSubset:
    return GroupSubset.from_elements(group, {element_power(group, x, l) for l in range(-L, L + 1)})


def coset_progression_set(cp: CosetProgression) -> GroupSubset:
    """H + {sum l_i x_i : |l_i| <= L_i}."""
    out = cp.H
    for x, L in zip(cp.generators, cp.bounds):
        out = product_set(out, _box(cp.group, x, L))
    return out


def progression_halving(cp: CosetProgression) -> CosetProgression:
    """Bounds floor(L_i/2); asserts the result Q is symmetric with Q + Q ⊆ P."""
    half = CosetProgression(cp.group, cp.H, cp.generators, tuple(L // 2 for L in cp.bounds))
    P, Q = coset_progression_set(cp), coset_progression_set(half)
    if not (is_symmetric(Q) and product_set(Q, Q) <= P):
        raise FalsificationError("halved progression is not symmetric with Q+Q ⊆ P",
                                 {"group_spec": cp.group.name, **cp.to_dict()})
    return half


def _max_bound(base: GroupSubset, x: int, S: GroupSubset) -> int:
    """Largest L with base + {-L..L}x ⊆ S, stopping once layers repeat."""
    group = S.group
    order = element_order(group, x)
    L = 0
    while L + 1 <= order // 2:
        layer = product_set(base, GroupSubset.from_elements(group, {element_power(group, x, L + 1),
                                                                  element_power(group, x, -(L + 1))}))
        if not layer <= S:
            break
        L += 1
    return L


def find_progression_in(S: GroupSubset, max_rank: int = 2, budget: int = 5000,
                        cap: Optional[int] = None) -> Optional[CosetProgression]:
    """
    Largest coset progression of rank <= max_rank inside S, within `budget`
    candidate (H, generators) evaluations.

    Subgroups H ⊆ S are tried largest first; each generator gets the greatest bound
    that keeps the progression inside S, given the generators before it. A None
    result after an exhausted budget proves nothing.
    """
    group = S.group
    if not group.is_abelian:
        raise SpecError(f"progression search needs an abelian group, not {group.name}")
    if not 0 <= max_rank <= 2:
        raise SpecError("max_rank must be 0, 1 or 2")
    if not S.mask[0]:
        return None
    subgroups = [H for H in subgroup_lattice(group, cap) if H <= S]
    subgroups.sort(key=lambda H: -H.size)

    best: Optional[CosetProgression] = None
    best_size = 0
    spent = 0

    def consider(cp: CosetProgression) -> None:
        nonlocal best, best_size
        size = coset_progression_set(cp).size
        if size > best_size:
            best, best_size = cp, size

    for H in subgroups:
        consider(CosetProgression(group, H, (), ()))
        if max_rank == 0:
            continue
        outside = [int(x) for x in np.flatnonzero(~H.mask)]
        singles = []
        for x in outside:
            if spent >= budget:
                break
            spent += 1
            L = _max_bound(H, x, S)
            if L:
                singles.append((x, L))
                consider(CosetProgression(group, H, (x,), (L,)))
        if max_rank == 2:
            for (x1, L1), (x2, _) in itertools.combinations(singles, 2):
                if spent >= budget:
                    break
                spent += 1
                base = product_set(H, _box(group, x1, L1))
                L2 = _max_bound(base, x2, S)
                if L2:
                    consider(CosetProgression(group, H, (x1, x2), (L1, L2)))
        if spent >= budget:
            log.warning("progression search budget %d exhausted", budget)
            break
    return best
