"""
Property suites: run every proved inequality over catalog groups and record any
instance where one fails.

Each suite is a per-instance checker. Small groups are scanned exhaustively,
larger ones are sampled with a generator seeded from (seed, group index), so a run
is a pure function of its arguments. Groups are farmed out to joblib workers and
the results reassembled in catalog order.
"""
from __future__ import annotations
import itertools, logging, re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .covering import haussler_bound_check, min_cover_oracle, ruzsa_cover
from .errors import (CapExceededError, DegenerateDimensionError, FalsificationError,
                     NumericalAmbiguityError, SpecError)
from .groups import FiniteGroup, build_group, catalog, spec_order
from .lemmas import (check_regularity, coset_approximant, coset_regularity, mirrored_regularity,
                     structure_approximant, structure_core, subgroup_approximation)
from .setsystems import dual_vc, quotient_system, translate_rows, translate_system, vc_dimension, vc_variant
from .stabilizers import stabilizer, symmetric_difference_profile, z_error_set
from .structured import BohrSpec, afz_shrink, all_characters, bohr_cover_bound, bohr_halving, bohr_set
from .subsets import (GroupSubset, complement, inverse_set, is_subgroup, is_symmetric, power_set,
                      product_set, subgroup_lattice, subsets_of, tupling_params)
from .util import get_settings

log = logging.getLogger(__name__)

SUITES = ("stabilizers", "vc-duality", "covering", "regularity", "structure", "afz", "bohr", "d0", "tupling")
EPS_GRID = tuple(Fraction(k, 12) for k in (2, 3, 4, 6, 8, 9))
EXHAUSTIVE_ORDER = 8
MAX_BULK_FAILURES = 5


@dataclass
class SuiteReport:
    suite: str
    seed: int
    max_order: int
    trials: int
    groups: List[str] = field(default_factory=list)
    checked: int = 0
    skipped: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {"suite": self.suite, "seed": self.seed, "max_order": self.max_order, "trials": self.trials,
                "groups": self.groups, "checked": self.checked, "skipped": self.skipped,
                "ok": self.ok, "failures": self.failures}


class _Run:
    """Per-group bookkeeping handed to each checker."""

    def __init__(self, suite: str, group: FiniteGroup, rng: np.random.Generator):
        self.suite, self.group, self.rng = suite, group, rng
        self.checked = 0
        self.skipped = 0
        self.failures: List[Dict[str, Any]] = []

    def expect(self, holds: bool, check: str, A: Optional[GroupSubset] = None, **extra) -> None:
        self.checked += 1
        if holds:
            return
        record = {"suite": self.suite, "check": check, "group_spec": self.group.name}
        if A is not None:
            record["A"] = A.elements
        for k, v in extra.items():
            record[k] = v.elements if isinstance(v, GroupSubset) else (str(v) if isinstance(v, Fraction) else v)
        log.error("%s: %s fails on %s", self.suite, check, record)
        self.failures.append(record)

    def expect_all(self, holds: np.ndarray, check: str, A: GroupSubset,
                   describe: Callable[[int], Dict[str, Any]]) -> None:
        """One check per entry of `holds`; the first few failures are recorded via `describe`."""
        if not holds.size:
            return
        self.checked += int(holds.size) - 1
        failed = np.flatnonzero(~holds)
        self.expect(not failed.size, check, A, **(describe(int(failed[0])) if failed.size else {}))
        for i in failed[1:MAX_BULK_FAILURES]:
            self.checked -= 1
            self.expect(False, check, A, **describe(int(i)))

    def falsified(self, e: FalsificationError, check: str, A: GroupSubset) -> None:
        self.expect(False, check, A, detail=str(e), **{k: v for k, v in e.counterexample.items()
                                                       if k not in ("group_spec", "A")})

    def choice(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def subset(self) -> GroupSubset:
        n = self.group.order
        mask = self.rng.random(n) < self.rng.uniform(0.15, 0.85)
        if not mask.any():
            mask[int(self.rng.integers(n))] = True
        return GroupSubset(self.group, mask)

    def symmetric_inside(self, T: GroupSubset) -> GroupSubset:
        """Random symmetric subset of a symmetric T, always holding the identity."""
        mask = T.mask & (self.rng.random(self.group.order) < 0.5)
        mask = mask | mask[self.group.inv]
        mask[0] = True
        return GroupSubset(self.group, mask)


def _instances(run: _Run, trials: int, exhaustive_order: int) -> Iterator[GroupSubset]:
    if run.group.order <= exhaustive_order:
        yield from subsets_of(run.group)
    else:
        for _ in range(trials):
            yield run.subset()


def _check_stabilizers(run: _Run, A: GroupSubset) -> None:
    size = A.size
    AAi, AiA = product_set(A, inverse_set(A)), product_set(inverse_set(A), A)
    M = Fraction(size, 3)
    for N in (Fraction(0), Fraction(size, 2), Fraction(size), Fraction(3 * size, 2)):
        for side in ("left", "right"):
            S = stabilizer(A, N, side)
            run.expect(is_symmetric(S), f"Stab^{side}_N symmetric", A, N=N)
            grown = product_set(stabilizer(A, M, side), S)
            run.expect(grown <= stabilizer(A, M + N, side), f"Stab^{side}_M Stab^{side}_N in Stab_(M+N)",
                       A, M=M, N=N)
            if N < 2 * size:
                run.expect(S <= (AAi if side == "left" else AiA), f"Stab^{side}_N inside the difference set",
                           A, N=N)
            if size < run.group.order:
                run.expect(S == stabilizer(complement(A), N, side), f"Stab^{side}_N complement invariance",
                           A, N=N)
        run.expect(stabilizer(A, N, "left") == stabilizer(inverse_set(A), N, "right"),
                   "Stab^l_N(A) = Stab^r_N(A^-1)", A, N=N)
    if size < run.group.order:
        X = stabilizer(A, Fraction(size, 2), "right")
        eps = run.choice(EPS_GRID)
        run.expect(z_error_set(A, X, eps) == z_error_set(complement(A), X, eps),
                   "Z_eps(A,X) = Z_eps(G minus A, X)", A, eps=eps)


def _check_vc_duality(run: _Run, A: GroupSubset) -> None:
    G = GroupSubset.full(run.group)
    Ai = inverse_set(A)
    values = {
        "vl_G": vc_variant(A, G, "left"), "vr_G": vc_variant(A, G, "right"),
        "dual_r_G": vc_variant(A, G, "right", "dual-of-translate"),
        "dual_l_G": vc_variant(A, G, "left", "dual-of-translate"),
        "dim_l": vc_variant(A, A, "left", "sisask"), "dim_r": vc_variant(A, A, "right", "sisask"),
        "dual_r_Ai": vc_variant(A, Ai, "right", "dual-of-translate"),
        "dual_l_Ai": vc_variant(A, Ai, "left", "dual-of-translate"),
        "vr_Ai": vc_variant(A, Ai, "right"), "vl_Ai": vc_variant(A, Ai, "left"),
        "vl_A": vc_variant(A, A, "left"), "vr_A": vc_variant(A, A, "right"),
        "vr_Ai_of_Ai": vc_variant(Ai, Ai, "right"),
        "sisask_G": vc_variant(A, G, "left", "sisask"),
    }
    if not all(v.exact for v in values.values()):
        run.skipped += 1
        return
    v = {k: c.value for k, c in values.items()}
    run.expect(v["vl_G"] == v["dual_r_G"], "VC^l_G(A) = VC*(F^r_G(A))", A, **v)
    run.expect(v["vr_G"] == v["dual_l_G"], "VC^r_G(A) = VC*(F^l_G(A))", A, **v)
    run.expect(v["dim_l"] == v["dual_r_Ai"], "dim_lVC(A) = VC*(F^r_{A^-1}(A))", A, **v)
    run.expect(v["dim_r"] == v["dual_l_Ai"], "dim_rVC(A) = VC*(F^l_{A^-1}(A))", A, **v)
    run.expect(v["vl_G"] < 2 ** (v["vr_G"] + 1) and v["vr_G"] < 2 ** (v["vl_G"] + 1),
               "Assouad bounds between VC^l_G and VC^r_G", A, **v)
    run.expect(v["dim_l"] < 2 ** (v["vr_Ai"] + 1) and v["vr_Ai"] < 2 ** (v["dim_l"] + 1),
               "Assouad bounds between dim_lVC and VC^r_{A^-1}", A, **v)
    run.expect(v["dim_r"] < 2 ** (v["vl_Ai"] + 1) and v["vl_Ai"] < 2 ** (v["dim_r"] + 1),
               "Assouad bounds between dim_rVC and VC^l_{A^-1}", A, **v)
    run.expect(v["vl_G"] - 1 <= v["dim_l"] <= v["vl_G"], "VC^l_G(A) - 1 <= dim_lVC(A) <= VC^l_G(A)", A, **v)
    run.expect(v["vr_G"] - 1 <= v["dim_r"] <= v["vr_G"], "VC^r_G(A) - 1 <= dim_rVC(A) <= VC^r_G(A)", A, **v)
    run.expect(v["sisask_G"] == v["vl_G"], "dim_lVC(A|G) = VC^l_G(A)", A, **v)
    run.expect(v["vl_A"] <= v["vl_G"] and v["vr_A"] <= v["vr_G"], "VC_A(A) <= VC_G(A)", A, **v)
    run.expect(v["vl_A"] == v["vr_Ai_of_Ai"], "VC^l_A(A) = VC^r_{A^-1}(A^-1)", A, **v)
    S = translate_system(A, A, "left")
    plain, dedup, quotient = vc_dimension(S), vc_dimension(S.deduplicated()), vc_dimension(quotient_system(S))
    if plain.exact and dedup.exact and quotient.exact:
        run.expect(plain == dedup == quotient, "VC invariant under deduplication and quotient", A,
                   plain=plain.value, dedup=dedup.value, quotient=quotient.value)
    dual = dual_vc(S)
    if dual.exact:
        run.expect(dual.value < 2 ** (v["vl_A"] + 1), "VC*(F) < 2 exp VC(F) for F = F^l_A(A)", A, dual=dual.value, **v)


def _check_covering(run: _Run, A: GroupSubset) -> None:
    B = run.subset()
    eps = run.choice(EPS_GRID)
    side = run.choice(("left", "right"))
    d = vc_variant(A, B, side)
    if not d.exact:
        run.skipped += 1
        return
    try:
        hc = haussler_bound_check(A, B, eps * A.size, side, d)
        run.expect(hc.ok, "cov <= (30|BA|/(eps|A|))^d", A, B=B, eps=eps, side=side, d=d.value, cov=hc.cov)
        Q = GroupSubset(run.group, B.mask | B.mask[run.group.inv])
        Q = Q | GroupSubset.from_elements(run.group, [0])
        F = ruzsa_cover(A, Q)
        run.expect(len(F) * Q.size <= product_set(A, Q).size, "|F| <= |AB|/|B|", A, B=Q, F=list(F))
        if A.size <= 24:
            best = min_cover_oracle(A, power_set(Q, 2), cap=len(F))
            run.expect(best.exact and best.value <= len(F), "cov(A:Q^2) <= |F|", A, B=Q, F=list(F))
    except FalsificationError as e:
        run.falsified(e, "covering", A)


def _check_regularity(run: _Run, A: GroupSubset, exhaustive: bool) -> None:
    eps = run.choice(EPS_GRID)
    N = Fraction(int(run.rng.integers(0, 5)) * A.size, 4)
    stab_r = stabilizer(A, N, "right")
    X = stab_r if exhaustive else run.symmetric_inside(stab_r)
    try:
        rc = check_regularity(A, X, N, eps)
        run.expect(rc.ok, "|Z^l_eps(A,X)| <= 2N/eps", A, X=X, N=N, eps=eps, Z=rc.Z)
        run.expect(rc.special_ok is not False, "|Z^l_eps(A,X)| <= eps|A| for X in St^r_{eps^2/2}", A,
                   X=X, eps=eps, Z=rc.Z)
        X2 = run.symmetric_inside(stabilizer(A, N, "left"))
        mirrored = mirrored_regularity(A, X2, N, eps)
        run.expect(mirrored.ok, "|Z^r_eps(A,X)| <= 2N/eps", A, X=X2, N=N, eps=eps)
        if A.size < run.group.order:
            run.expect(z_error_set(A, X, eps) == z_error_set(complement(A), X, eps),
                       "Z_eps(A,X) = Z_eps(G minus A,X)", A, X=X, eps=eps)
        fitting = [H for H in subgroup_lattice(run.group) if H <= stab_r]
        H = fitting[-1]
        cr = coset_regularity(A, H, N, eps)
        run.expect(cr.covered and cr.mixed_ok and cr.ok, "coset regularity counts", A, H=H, N=N, eps=eps)
        run.expect(coset_approximant(A, H, N).ok, "|A xor union of majority cosets| <= N", A, H=H, N=N)
        run.expect(subgroup_approximation(A, H, N).ok, "|A xor FH| <= N with F in A", A, H=H, N=N)
    except FalsificationError as e:
        run.falsified(e, "regularity", A)


def symmetric_subsets_within(T: GroupSubset) -> np.ndarray:
    """
    Boolean rows, one per symmetric X ⊆ T holding the identity, built from the
    inverse-closed orbits {x, x^-1} of T. T itself must be symmetric.
    """
    group = T.group
    orbits = []
    seen = np.zeros(group.order, dtype=bool)
    seen[0] = True
    for x in T.indices:
        if not seen[x]:
            orbit = np.zeros(group.order, dtype=bool)
            orbit[[x, group.inv[x]]] = True
            seen |= orbit
            orbits.append(orbit)
    codes = np.arange(1 << len(orbits), dtype=np.int64)
    picks = ((codes[:, None] >> np.arange(len(orbits))) & 1).astype(bool)
    rows = picks @ np.array(orbits, dtype=np.int64).reshape(len(orbits), group.order) > 0
    rows[:, 0] = True
    return rows


def _sweep_regularity(run: _Run, A: GroupSubset) -> None:
    """
    Every threshold N = k|A|/4, every eps in EPS_GRID and every symmetric X inside
    Stab^r_N(A), counted at once: |gX ∩ A| for all X is the product of the X rows
    with the table of A-memberships A[g x].
    """
    group = A.group
    member = A.mask[group.mul].astype(np.int64)
    profile = symmetric_difference_profile(A, "right")
    for k in range(5):
        N = Fraction(k * A.size, 4)
        Xs = symmetric_subsets_within(stabilizer(A, N, "right"))
        sizes = Xs.sum(axis=1)
        inside = Xs.astype(np.int64) @ member.T
        low = np.minimum(inside, sizes[:, None] - inside)
        widest = np.where(Xs, profile[None, :], 0).max(axis=1)

        def describe(i, eps):
            return {"X": np.flatnonzero(Xs[i]).tolist(), "N": N, "eps": eps}

        for eps in EPS_GRID:
            Z = (low * eps.denominator >= eps.numerator * sizes[:, None]).sum(axis=1)
            # |Z| <= 2N/eps and, inside St^r_{eps^2/2}(A), |Z| <= eps|A|; both cleared of denominators
            run.expect_all(Z * eps.numerator * N.denominator <= 2 * N.numerator * eps.denominator,
                           "|Z^l_eps(A,X)| <= 2N/eps", A, lambda i, e=eps: describe(i, e))
            special = widest * 2 * eps.denominator ** 2 <= eps.numerator ** 2 * A.size
            run.expect_all(~special | (Z * eps.denominator <= eps.numerator * A.size),
                           "|Z^l_eps(A,X)| <= eps|A| for X in St^r_{eps^2/2}", A, lambda i, e=eps: describe(i, e))




def _check_structure(run: _Run, A: GroupSubset, eps: Optional[Fraction] = None) -> None:
    eps = eps if eps is not None else run.choice(EPS_GRID)
    try:
        core = structure_core(A, eps)
        run.expect(core.size_claim_ok, "|A'| >= (1 - eps/3)|A|", A, eps=eps, Aprime=core.Aprime)
        run.expect(core.growth_claim_ok, "(1 - 2eps/9)|A'S| <= |A|", A, eps=eps, Aprime=core.Aprime, S=core.S)
        full = structure_approximant(A, eps, core=core)
        run.expect(full.ok, "|A xor A'S| < eps|A|", A, eps=eps)
        upper = full.D
        between = core.Aprime | GroupSubset(run.group, upper.mask & (run.rng.random(run.group.order) < 0.5))
        run.expect((A ^ between).size < eps * A.size, "|A xor D| < eps|A| for A' <= D <= A'S", A,
                   eps=eps, D=between)
    except FalsificationError as e:
        run.falsified(e, "structure", A)


def _check_afz(run: _Run, A: GroupSubset) -> None:
    u = int(run.choice((2, 3)))
    n = int(run.rng.integers(u, 13))
    eps = run.choice(EPS_GRID)
    case = run.choice(("one", "two"))
    try:
        result = afz_shrink(A, eps, u=u, n=n, case=case)
    except (DegenerateDimensionError, NumericalAmbiguityError, CapExceededError):
        run.skipped += 1
        return
    except FalsificationError as e:
        run.falsified(e, "afz certificate", A)
        return
    run.expect(result.cert.ok, "afz certificate", A, eps=eps, u=u, n=n, case=case, B=result.B)


def _check_tupling(run: _Run, A: GroupSubset) -> None:
    t = tupling_params(A)
    run.expect(t.sigma <= t.tau and t.delta <= t.alpha, "sigma <= tau and delta <= alpha", A, **t.to_dict())
    run.expect(t.delta <= t.sigma ** 2, "delta <= sigma^2", A, **t.to_dict())
    if not run.group.is_abelian:
        return
    run.expect(t.tau <= t.delta ** 3, "tau <= delta^3", A, **t.to_dict())
    Ai = inverse_set(A)
    for m, k in ((1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)):
        size = product_set(power_set(A, m), power_set(Ai, k)).size
        run.expect(size <= t.sigma ** (m + k) * A.size, f"|{m}A - {k}A| <= sigma^{m + k}|A|", A, sigma=t.sigma)


def _one_translate(A: GroupSubset, B: GroupSubset, side: str) -> bool:
    rows = translate_rows(A, B.indices, side)
    return np.unique(rows, axis=0).shape[0] == 1


def _check_d0(run: _Run, A: GroupSubset) -> None:
    group = A.group
    Ai = inverse_set(A)
    size = A.size
    for B in (A, Ai):
        for side in ("left", "right"):
            grown = product_set(B, A) if side == "left" else product_set(A, B)
            run.expect(_one_translate(A, B, side) == (grown.size == size), f"VC^{side}_B(A) = 0 iff |BA| = |A|", A,
                       B=B)
    a = A.elements[0]
    H = A.left_translate(int(group.inv[a]))
    coset = is_subgroup(H)
    left0 = vc_variant(A, Ai, "left", fast_path=False).value == 0
    right0 = vc_variant(A, Ai, "right", fast_path=False).value == 0
    flags = [left0, right0, product_set(A, Ai).size == size, product_set(Ai, A).size == size, coset]
    run.expect(len(set(flags)) == 1, "d=0 equivalences for VC_{A^-1}(A)", A, flags=flags)
    normal = coset and H.right_translate(a) == A
    flags = [vc_variant(A, A, "left", fast_path=False).value == 0, vc_variant(A, A, "right", fast_path=False).value == 0,
             product_set(A, A).size == size, normal]
    run.expect(len(set(flags)) == 1, "d=0 equivalences for VC_A(A)", A, flags=flags)


def _check_bohr(run: _Run, trials: int) -> None:
    group = run.group
    chars = all_characters(group)
    pairs = list(itertools.combinations(chars, 2))
    if len(pairs) > trials:
        picks = run.rng.choice(len(pairs), size=trials, replace=False)
        pairs = [pairs[int(i)] for i in sorted(picks)]
    G = GroupSubset.full(group)
    for gamma in [(c,) for c in chars] + pairs:
        for k in range(1, 20):
            spec = BohrSpec(group, gamma, Fraction(k, 10))
            try:
                B = bohr_set(spec)
                bohr_halving(spec)
            except NumericalAmbiguityError:
                run.skipped += 1
                continue
            except FalsificationError as e:
                run.falsified(e, "C.C in B for the halved radius", G)
                continue
            run.expect(is_symmetric(B), "Bohr set symmetric", gamma=[list(g) for g in gamma], delta=spec.delta)
            bound = bohr_cover_bound(spec)
            best = min_cover_oracle(G, B, cap=bound)
            run.expect(best.exact, "cov(G:B) <= ceil(2 pi/delta)^m", gamma=[list(g) for g in gamma],
                       delta=spec.delta, bound=bound)


_PER_SET: Dict[str, Callable[[_Run, GroupSubset], None]] = {
    "stabilizers": _check_stabilizers,
    "vc-duality": _check_vc_duality,
    "covering": _check_covering,
    "structure": _check_structure,
    "afz": _check_afz,
    "tupling": _check_tupling,
    "d0": _check_d0,
}


def _suite_groups(suite: str, max_order: int) -> List[str]:
    specs = catalog(max_order)
    if suite == "bohr":
        specs = [s for s in specs if re.fullmatch(r"Z\d+", s)]
    elif suite in ("regularity", "d0"):
        # both walk the subgroup lattice or every subset
        specs = [s for s in specs if spec_order(s) <= 64]
    return specs


def _run_group(suite: str, spec: str, seed: int, index: int, trials: int,
               exhaustive_order: int) -> Tuple[int, int, List[Dict[str, Any]]]:
    group = build_group(spec)
    run = _Run(suite, group, np.random.default_rng([seed, index]))
    if suite == "bohr":
        _check_bohr(run, trials)
    elif suite == "regularity":
        exhaustive = group.order <= exhaustive_order
        for A in _instances(run, trials, exhaustive_order):
            _check_regularity(run, A, exhaustive)
            if exhaustive:
                _sweep_regularity(run, A)
    elif suite == "structure" and group.order <= exhaustive_order:
        for A in subsets_of(group):
            for eps in EPS_GRID:
                _check_structure(run, A, eps)
    else:
        limit = 16 if suite == "d0" else exhaustive_order
        check = _PER_SET[suite]
        for A in _instances(run, trials, limit):
            check(run, A)
    return run.checked, run.skipped, run.failures


def verify_suite(suite: str, trials: int = 200, seed: int = 0, max_order: int = 16,
                 exhaustive_order: int = EXHAUSTIVE_ORDER, jobs: Optional[int] = None) -> SuiteReport:
    """
    Run one suite (or "all") over the catalog groups of order <= max_order.

    Args:
        trials: sampled instances per group above `exhaustive_order`; for the Bohr
            suite, the number of sampled character pairs per group.
        exhaustive_order: groups up to this order get every nonempty subset. The d0
            suite scans every subset up to order 16 regardless.

    Raises:
        SpecError: unknown suite name or a nonpositive trial count.
    """
    if suite != "all" and suite not in SUITES:
        raise SpecError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    if trials < 1:
        raise SpecError("trials must be positive")
    if suite == "all":
        merged = SuiteReport("all", seed, max_order, trials)
        for name in SUITES:
            part = verify_suite(name, trials, seed, max_order, exhaustive_order, jobs)
            merged.groups.extend(f"{name}:{g}" for g in part.groups)
            merged.checked += part.checked
            merged.skipped += part.skipped
            merged.failures.extend(part.failures)
        return merged

    specs = _suite_groups(suite, max_order)
    jobs = jobs or get_settings().jobs
    log.info("suite %s: %d groups, seed %d", suite, len(specs), seed)
    results = Parallel(n_jobs=jobs)(
        delayed(_run_group)(suite, spec, seed, i, trials, exhaustive_order) for i, spec in enumerate(specs)
    )
    report = SuiteReport(suite, seed, max_order, trials, groups=list(specs))
    for checked, skipped, failures in results:
        report.checked += checked
        report.skipped += skipped
        report.failures.extend(failures)
    if report.ok:
        log.info("suite %s passed %d checks (%d skipped)", suite, report.checked, report.skipped)
    else:
        log.error("suite %s: %d failures", suite, len(report.failures))
    return report
