"""End-to-end arithmetic regularity decomposition of one set."""
from __future__ import annotations
import logging, time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from .covering import haussler_bound_check, min_cover_oracle, ruzsa_cover
from .errors import (CapExceededError, DegenerateDimensionError, GroupMismatchError, NumericalAmbiguityError,
                     PreconditionError, SpecError)
from .groups import FiniteGroup
from .lemmas import structure_approximant, structure_core
from .setsystems import vc_variant
from .stabilizers import st_eps, z_error_set
from .structured import (afz_shrink, bohr_halving, bohr_set, coset_progression_set, find_bohr_in,
                         find_progression_in, find_subgroup_in, progression_halving)
from .subsets import GroupSubset, TuplingParams, inverse_set, power_set, product_set, tupling_params
from .util import fraction_json, parse_eps

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_VERSION = 1
MODES = ("subgroup", "bohr", "progression")
CSV_COLUMNS = (
    "csv_version", "group_spec", "set_spec", "eps", "mode", "seed", "order", "size_A", "d_left", "d_right",
    "alpha", "sigma", "tau", "delta", "alpha_tripling", "nu", "size_X", "size_S", "size_R", "size_Aprime",
    "P_kind", "size_P", "size_F", "structure_err", "regularity_err", "cov_A_P", "cov_G_P", "checks_failed", "ok",
)
ORACLE_LIMIT = 128

Number = Union[int, Fraction, None]


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: Number
    rhs: Number
    status: str  # pass | fail | not-applicable

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _check(name: str, lhs, rhs, holds: bool, applicable: bool = True) -> BoundCheck:
    status = "not-applicable" if not applicable else ("pass" if holds else "fail")
    if status == "fail":
        log.error("bound check %s failed: %s vs %s", name, lhs, rhs)
    return BoundCheck(name, lhs, rhs, status)


@dataclass
class DecompositionReport:
    group_spec: str
    set_spec: str
    eps: Fraction
    mode: str
    seed: int
    order: int
    size_A: int
    d_left: Optional[int]
    d_right: Optional[int]
    alpha: Fraction
    tupling: TuplingParams
    nu: Fraction
    size_X: int
    size_S: int
    size_R: int
    size_Aprime: int
    P_descriptor: Dict[str, Any]
    size_P: int
    F: List[int]
    structure_err: Fraction
    regularity_err: Fraction
    cov_A_P: Optional[int]
    cov_G_P: Optional[int]
    bound_checks: List[BoundCheck]
    timings: Dict[str, float] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.bound_checks)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["tupling"] = self.tupling.to_dict()
        out["bound_checks"] = [{"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "status": c.status}
                               for c in self.bound_checks]
        return out

    def to_row(self) -> Dict[str, Any]:
        """Flat CSV row; rationals as 'p/q' strings and no timings."""
        def q(x):
            return None if x is None else str(x)
        failed = [c.name for c in self.bound_checks if c.status == "fail"]
        return {
            "csv_version": CSV_VERSION,
            "group_spec": self.group_spec, "set_spec": self.set_spec, "eps": q(self.eps), "mode": self.mode,
            "seed": self.seed, "order": self.order, "size_A": self.size_A,
            "d_left": self.d_left, "d_right": self.d_right, "alpha": q(self.alpha),
            "sigma": q(self.tupling.sigma), "tau": q(self.tupling.tau),
            "delta": q(self.tupling.delta), "alpha_tripling": q(self.tupling.alpha),
            "nu": q(self.nu), "size_X": self.size_X, "size_S": self.size_S, "size_R": self.size_R,
            "size_Aprime": self.size_Aprime, "P_kind": self.P_descriptor.get("kind"), "size_P": self.size_P,
            "size_F": len(self.F), "structure_err": q(self.structure_err), "regularity_err": q(self.regularity_err),
            "cov_A_P": self.cov_A_P, "cov_G_P": self.cov_G_P,
            "checks_failed": ";".join(failed), "ok": self.ok,
        }


@contextmanager
def _timed(timings: Dict[str, float], stage: str):
    start = time.perf_counter()
    yield
    timings[stage] = round(time.perf_counter() - start, 6)


def _exact(value) -> Optional[int]:
    if not value.exact:
        log.warning("value only known as %s; dependent checks are skipped", value)
        return None
    return value.value


def _structured_subgroup(A: GroupSubset, S: GroupSubset, eps_s: Fraction, d_right: Optional[int]):
    """
    Largest subgroup inside S. When S holds no nontrivial subgroup, the shrinking
    step supplies an approximate group instead: B with B^12 ⊆ S, giving P = B^2 and
    the halved set Q = B.
    """
    H = find_subgroup_in(S)
    if H is not None and H.size > 1:
        return H, H, {"kind": "subgroup", "H": H.elements, "via": "direct"}
    # A^-1 has St^l(A^-1) = St^r(A) = S, and VC^l_{A^-1}(A^-1) = VC^r_A(A)
    if not d_right:
        return None
    try:
        shrunk = afz_shrink(inverse_set(A), eps_s, u=3, n=12, case="one", d=d_right)
    except (DegenerateDimensionError, CapExceededError, NumericalAmbiguityError) as e:
        log.warning("shrinking step skipped: %s", e)
        return None
    B = shrunk.B
    if B.size == 1:
        return None
    return power_set(B, 2), B, {"kind": "approximate-group", "B": B.elements, "via": "afz", "t": shrunk.t}


def _structured_bohr(S: GroupSubset, seed: int):
    spec = find_bohr_in(S, seed=seed)
    if spec is None:
        return None
    try:
        half = bohr_halving(spec)
    except NumericalAmbiguityError as e:
        log.warning("halved Bohr set is ambiguous: %s", e)
        return None
    return bohr_set(spec), bohr_set(half), {"kind": "bohr", **spec.to_dict()}


def _structured_progression(S: GroupSubset):
    cp = find_progression_in(S)
    if cp is None or coset_progression_set(cp).size == 1:
        return None
    half = progression_halving(cp)
    return coset_progression_set(cp), coset_progression_set(half), {"kind": "progression", **cp.to_dict()}


def decompose(group: FiniteGroup, A: GroupSubset, eps, mode: str = "subgroup", *,
              group_spec: Optional[str] = None, set_spec: Optional[str] = None, seed: int = 0,
              vc_cap: Optional[int] = None, oracle_limit: int = ORACLE_LIMIT) -> DecompositionReport:
    """
    Decompose A as a structured part FP plus a small error, and check every
    inequality the construction promises on this instance.

    Steps: structure core (X, nu, S, A'); R = St^r_{eps*nu/36}(A); a structured set P
    inside S with a halved Q (Q^2 ⊆ P); F from Ruzsa covering of A' by Q; D = FP,
    falling back to D = A'S when FP leaves the sandwich A' ⊆ D ⊆ A'S.

    Raises:
        SpecError: bad eps or mode, or an abelian-only mode on a nonabelian group.
        GroupMismatchError: A belongs to a group with a different Cayley table.
        FalsificationError: a proved conclusion failed on this instance.
    """
    eps = parse_eps(eps)
    if mode not in MODES:
        raise SpecError(f"mode must be one of {MODES}, got {mode!r}")
    if mode != "subgroup" and not group.is_abelian:
        raise SpecError(f"mode {mode} needs an abelian group; {group.name} is not")
    if mode == "bohr" and group.abelian_decomposition is None:
        raise SpecError(f"mode bohr needs a cyclic decomposition of {group.name}")
    if not A:
        raise PreconditionError("decompose needs a nonempty set")
    if not group.same_as(A.group):
        raise GroupMismatchError(f"set of {A.group.name} passed to a decomposition over {group.name}")
    timings: Dict[str, float] = {}

    with _timed(timings, "vc"):
        d_left = _exact(vc_variant(A, A, "left", cap=vc_cap))
        d_right = _exact(vc_variant(A, A, "right", cap=vc_cap))
    tupling = tupling_params(A)

    with _timed(timings, "structure"):
        core = structure_core(A, eps)
        R = st_eps(A, eps * core.nu / 36, "right")
    eps_s = eps * core.nu / 9
    S = core.S

    with _timed(timings, "search"):
        if mode == "subgroup":
            found = _structured_subgroup(A, S, eps_s, d_right)
        elif mode == "bohr":
            found = _structured_bohr(S, seed)
        else:
            found = _structured_progression(S)
    if found is None:
        log.warning("no nontrivial %s found inside S; using the trivial set", mode)
        trivial = GroupSubset.from_elements(group, [0])
        P, Q, descriptor = trivial, trivial, {"kind": "trivial"}
    else:
        P, Q, descriptor = found

    with _timed(timings, "cover"):
        F = list(ruzsa_cover(core.Aprime, Q)) if core.Aprime else []
        try:
            approx = structure_approximant(A, eps, F=F, P=P, core=core)
            reg_set = P
        except PreconditionError as e:
            log.warning("sandwich fails (%s); falling back to D = A'S", e)
            approx = structure_approximant(A, eps, core=core)
            descriptor, reg_set, F = {"kind": "none"}, S, []

    Z = z_error_set(A, reg_set, eps, "left")
    with _timed(timings, "oracle"):
        cov_A_P = _exact(min_cover_oracle(A, reg_set)) if A.size <= oracle_limit else None
        full = GroupSubset.full(group)
        cov_G_P = _exact(min_cover_oracle(full, reg_set)) if group.order <= oracle_limit else None

    checks = _bound_checks(A, eps, core, reg_set, Q, F, approx, Z, d_left, descriptor)
    report = DecompositionReport(
        group_spec=group_spec or group.name, set_spec=set_spec or ",".join(map(str, A.elements)),
        eps=eps, mode=mode, seed=seed, order=group.order, size_A=A.size,
        d_left=d_left, d_right=d_right, alpha=Fraction(A.size, group.order), tupling=tupling,
        nu=core.nu, size_X=core.X.size, size_S=S.size, size_R=R.size, size_Aprime=core.Aprime.size,
        P_descriptor=descriptor, size_P=reg_set.size, F=sorted(F),
        structure_err=approx.err, regularity_err=Fraction(Z.size, A.size),
        cov_A_P=cov_A_P, cov_G_P=cov_G_P, bound_checks=checks, timings=timings,
    )
    log.info("%s %s eps=%s mode=%s: structure_err=%s regularity_err=%s", report.group_spec, report.set_spec,
             eps, mode, report.structure_err, report.regularity_err)
    return report


def _bound_checks(A, eps, core, P, Q, F, approx, Z, d_left, descriptor) -> List[BoundCheck]:
    size = A.size
    checks = []
    st_r = st_eps(A, eps, "right")
    checks.append(_check("P in St^r_eps(A)", (P - st_r).size, 0, P <= st_r))
    N = eps * core.nu / 9 * size
    checks.append(_check("|Z| <= 2N/eps (regularity, N = eps*nu|A|/9)", Z.size, 2 * N / eps,
                         Z.size <= 2 * N / eps, applicable=P <= core.S))
    special = P <= st_eps(A, eps * eps / 2, "right")
    checks.append(_check("|Z| <= eps|A| (regularity, P in St^r_{eps^2/2})", Z.size, eps * size,
                         Z.size <= eps * size, applicable=special))
    err_abs = approx.err * size
    checks.append(_check("|A xor D| < eps|A| (structure)", err_abs, eps * size, err_abs < eps * size))
    checks.append(_check("|A'| >= (1 - eps/3)|A|", core.Aprime.size, (1 - eps / 3) * size, core.size_claim_ok))
    grown = product_set(core.Aprime, core.S).size
    checks.append(_check("(1 - 2eps/9)|A'S| <= |A|", (1 - 2 * eps / 9) * grown, size, core.growth_claim_ok))
    if F:
        bound = Fraction(product_set(core.Aprime, Q).size, Q.size)
        checks.append(_check("|F| <= |A'Q|/|Q| (Ruzsa)", len(F), bound, len(F) <= bound))
    if descriptor.get("kind") in ("subgroup", "progression"):
        pbr = P <= st_eps(A, Fraction(1, 2), "left")
        AAi = product_set(A, inverse_set(A))
        checks.append(_check("P in AA^-1", (P - AAi).size, 0, P <= AAi, applicable=pbr))
    if d_left is None:
        checks.append(_check("cov(A:X) <= (30|AA|/((eps^2/162)|A|))^d_left", None, None, True, applicable=False))
    else:
        hc = haussler_bound_check(A, A, eps * eps / 162 * size, "left", d_left)
        checks.append(_check("cov(A:X) <= (30|AA|/((eps^2/162)|A|))^d_left", hc.cov, hc.bound, hc.ok))
    return checks


def report_json(report: DecompositionReport) -> Dict[str, Any]:
    """to_dict with rationals already in {num, den} form."""
    def conv(x):
        if isinstance(x, Fraction):
            return fraction_json(x)
        if isinstance(x, dict):
            return {k: conv(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [conv(v) for v in x]
        return x
    return conv(report.to_dict())
