#!/usr/bin/env python3
"""
Acceptance runner: every property suite at its acceptance scale, plus the
end-to-end recovery experiment, with wall-clock timings.

Usage:
  NIPREG_JOBS=4 python tools/run_acceptance.py --seed 0
  python tools/run_acceptance.py --only regularity,structure --quick

- Suites run through verify_suite; any failure is dumped to
  outputs/counterexamples/ and the exit status is 1.
- The recovery experiment decomposes noisy unions of three cosets of a size-8
  subgroup of Z2^6 and reports the share of trials meeting both error targets.
"""

from __future__ import annotations
import os, sys, time, argparse
from fractions import Fraction
from pathlib import Path
from typing import Dict, List

import numpy as np

# Attempt to add project root to path when executed directly
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.groups import build_group
from src.pipeline import decompose
from src.subsets import GroupSubset, generated_subgroup, product_set
from src.suites import verify_suite
from src.util import counterexample_path_for, dumps_json, ensure_dirs

# suite -> (max_order, trials, exhaustive_order, time limit in seconds)
SCALES: Dict[str, tuple] = {
    "regularity": (16, 600, 8, 60),
    "structure": (16, 600, 8, 60),
    "afz": (64, 40, 0, 120),
    "vc-duality": (16, 200, 8, 120),
    "d0": (16, 1, 16, 60),
    "covering": (256, 400, 0, 120),
    "bohr": (24, 60, 0, 60),
    "tupling": (64, 200, 12, 60),
    "stabilizers": (16, 200, 8, 60),
}


def recovery(trials: int, seed: int) -> tuple:
    """Share of noisy coset unions decomposed within eps = 1/2 on both errors."""
    group = build_group("Z2^6")
    H = generated_subgroup(group, [1, 2, 4])
    reps = GroupSubset.from_elements(group, [0, 8, 16])
    base = product_set(reps, H)
    eps = Fraction(1, 2)
    budget = int(eps * base.size / 4)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        mask = base.mask.copy()
        flips = rng.choice(group.order, size=int(rng.integers(0, budget + 1)), replace=False)
        mask[flips] ^= True
        if not mask.any():
            mask[0] = True
        report = decompose(group, GroupSubset(group, mask), eps, "subgroup", seed=seed)
        if report.structure_err < eps and report.regularity_err <= eps:
            hits += 1
    return hits, trials


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance suites with timings")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--only", default="", help="Comma separated suite names")
    parser.add_argument("--quick", action="store_true", help="Tenth of the trials, for a smoke run")
    parser.add_argument("--recovery-trials", type=int, default=100)
    args = parser.parse_args()

    names: List[str] = [s.strip() for s in args.only.split(",") if s.strip()] or list(SCALES)
    failed = False
    print(f"Running {len(names)} suite(s): {', '.join(names)}")
    for idx, name in enumerate(names, 1):
        max_order, trials, exhaustive, limit = SCALES[name]
        if args.quick:
            trials = max(1, trials // 10)
        start = time.perf_counter()
        report = verify_suite(name, trials=trials, seed=args.seed, max_order=max_order, exhaustive_order=exhaustive)
        elapsed = time.perf_counter() - start
        status = "ok" if report.ok else f"{len(report.failures)} FAILURES"
        slow = "  (over time limit)" if elapsed > limit else ""
        print(f"[{idx}/{len(names)}] {name}: {report.checked} checks, {status}, {elapsed:.1f}s{slow}")
        if not report.ok:
            failed = True
            path = counterexample_path_for(name, args.seed)
            ensure_dirs(str(Path(path).parent))
            Path(path).write_text(dumps_json(report.failures) + "\n", encoding="utf-8")
            print(f"  Counterexamples → {path}")

    if not args.only:
        start = time.perf_counter()
        hits, total = recovery(args.recovery_trials, args.seed)
        print(f"recovery: {hits}/{total} trials within eps, {time.perf_counter() - start:.1f}s")
        failed = failed or hits < 0.95 * total

    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
