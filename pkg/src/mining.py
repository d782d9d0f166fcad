"""Search for sets where two VC-type dimensions differ the most."""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import SpecError
from .groups import FiniteGroup, build_group, catalog
from .setsystems import vc_variant
from .subsets import GroupSubset, subsets_of

log = logging.getLogger(__name__)

PAIRS = ("l-vs-r", "a-vs-g", "g-vs-dual")
EXHAUSTIVE_ORDER = 8


@dataclass(frozen=True)
class MinedInstance:
    group_spec: str
    A: Tuple[int, ...]
    first: int
    second: int

    @property
    def gap(self) -> int:
        return abs(self.first - self.second)

    def to_dict(self) -> dict:
        return {"group_spec": self.group_spec, "A": list(self.A), "first": self.first,
                "second": self.second, "gap": self.gap}


@dataclass
class GapReport:
    pair: str
    seed: int
    budget: int
    labels: Tuple[str, str]
    evaluated: int = 0
    skipped: int = 0
    top: List[MinedInstance] = field(default_factory=list)

    @property
    def max_gap(self) -> int:
        return self.top[0].gap if self.top else 0

    def to_dict(self) -> dict:
        return {"pair": self.pair, "seed": self.seed, "budget": self.budget, "labels": list(self.labels),
                "evaluated": self.evaluated, "skipped": self.skipped, "max_gap": self.max_gap,
                "top": [m.to_dict() for m in self.top]}


_LABELS: Dict[str, Tuple[str, str]] = {
    "l-vs-r": ("VC^l_A(A)", "VC^r_A(A)"),
    "a-vs-g": ("VC^l_A(A)", "VC^l_G(A)"),
    "g-vs-dual": ("VC^l_G(A)", "VC*(F^l_G(A))"),
}


def _measure(A: GroupSubset, pair: str, cap: Optional[int]):
    if pair == "l-vs-r":
        return vc_variant(A, A, "left", cap=cap), vc_variant(A, A, "right", cap=cap)
    if pair == "a-vs-g":
        return vc_variant(A, A, "left", cap=cap), vc_variant(A, None, "left", cap=cap)
    return vc_variant(A, None, "left", cap=cap), vc_variant(A, None, "left", "dual-of-translate", cap=cap)


def _candidates(group: FiniteGroup, share: int, rng: np.random.Generator):
    if group.order <= EXHAUSTIVE_ORDER and (1 << group.order) - 1 <= share:
        yield from subsets_of(group)
        return
    for _ in range(share):
        mask = rng.random(group.order) < rng.uniform(0.2, 0.8)
        if mask.any():
            yield GroupSubset(group, mask)


def mine_gap(pair: str, budget: int = 2000, seed: int = 0, top_k: int = 5, max_order: int = 16,
             groups: Optional[Sequence[str]] = None, cap: Optional[int] = None) -> GapReport:
    """
    Rank sets by the gap between two dimensions and keep the top_k.

    pair: "l-vs-r" compares VC^l_A(A) with VC^r_A(A) (nonabelian groups only, the two
    agree in abelian ones), "a-vs-g" compares VC^l_A(A) with VC^l_G(A), "g-vs-dual"
    compares VC^l_G(A) with the dual dimension of its translate family. Only exact
    values are ranked; a capped search is counted as skipped.

    The budget is split evenly over the groups; a group small enough to fit its share
    is scanned exhaustively. Ties are broken by group order, spec and elements.
    """
    if pair not in PAIRS:
        raise SpecError(f"unknown pair {pair!r}; choose from {', '.join(PAIRS)}")
    if budget < 1 or top_k < 1:
        raise SpecError("budget and top_k must be positive")
    specs = list(groups) if groups else catalog(max_order)
    built = [build_group(s) for s in specs]
    if pair == "l-vs-r":
        built = [g for g in built if not g.is_abelian]
    report = GapReport(pair, seed, budget, _LABELS[pair])
    if not built:
        log.warning("no groups to mine for %s", pair)
        return report

    rng = np.random.default_rng(seed)
    share = max(1, budget // len(built))
    found: List[Tuple[int, MinedInstance]] = []
    for pos, group in enumerate(built):
        for A in _candidates(group, share, rng):
            first, second = _measure(A, pair, cap)
            report.evaluated += 1
            if not (first.exact and second.exact):
                report.skipped += 1
                continue
            found.append((pos, MinedInstance(group.name, tuple(A.elements), first.value, second.value)))
    found.sort(key=lambda pm: (-pm[1].gap, built[pm[0]].order, pm[0], pm[1].A))
    report.top = [m for _, m in found[:top_k]]
    log.info("%s: best gap %d over %d sets", pair, report.max_gap, report.evaluated)
    return report
