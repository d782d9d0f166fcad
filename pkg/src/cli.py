from __future__ import annotations
import argparse, os, sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
from rich import print
from rich.console import Console

from .errors import FalsificationError, NipregError
from .groups import build_group
from .mining import PAIRS, mine_gap
from .pipeline import MODES, decompose, report_json
from .setsystems import VARIANTS, vc_variant
from .stabilizers import stabilizer, st_eps
from .subsets import parse_subset
from .suites import SUITES, verify_suite
from .sweep import parse_grid, sweep, write_sweep
from .util import (counterexample_path_for, dumps_json, ensure_dirs, get_settings, parse_fraction,
                   report_path_for, setup_logging)

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2
# progress and verdict lines; stdout carries only command output
status = Console(stderr=True)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        ensure_dirs(str(Path(out).parent))
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _dump_counterexample(suite: str, seed: int, payload) -> str:
    path = counterexample_path_for(suite, seed)
    ensure_dirs(os.path.dirname(path))
    Path(path).write_text(dumps_json(payload) + "\n", encoding="utf-8")
    return path


def cmd_vc(args) -> int:
    group = build_group(args.group, max_order=args.max_order)
    A = parse_subset(group, args.set, default_seed=args.seed)
    base = parse_subset(group, args.base, default_seed=args.seed) if args.base else None
    value = vc_variant(A, base, args.side, args.variant, cap=args.cap)
    if args.format == "json":
        _emit(dumps_json({"group_spec": args.group, "set_spec": args.set, "side": args.side,
                          "variant": args.variant, "base": args.base or "all",
                          "value": value.value, "exact": value.exact}), args.out)
    else:
        print(f"[bold green]{args.variant} {args.side} VC dimension of {args.set} in {args.group}: {value}")
        if not value.exact:
            print(f"[yellow]search stopped at cap {value.value}; only a lower bound is known")
    return EXIT_OK


def cmd_stab(args) -> int:
    group = build_group(args.group, max_order=args.max_order)
    A = parse_subset(group, args.set, default_seed=args.seed)
    if args.threshold is not None:
        S, label = stabilizer(A, parse_fraction(args.threshold), args.side), f"Stab_{args.threshold}"
    else:
        S, label = st_eps(A, args.eps, args.side), f"St_{args.eps}"
    if args.format == "json":
        _emit(dumps_json({"group_spec": args.group, "set_spec": args.set, "side": args.side,
                          "threshold": label, "size": S.size, "elements": S.elements}), args.out)
    else:
        print(f"[bold green]{args.side} {label}(A): {S.size} of {group.order} elements")
        print(S.elements)
    return EXIT_OK


def cmd_decompose(args) -> int:
    group = build_group(args.group, max_order=args.max_order)
    A = parse_subset(group, args.set, default_seed=args.seed)
    eps = parse_fraction(args.eps)
    status.print(f"[bold blue]Decomposing {args.set} in {args.group} at eps={eps} ({args.mode})")
    try:
        report = decompose(group, A, eps, args.mode, group_spec=args.group, set_spec=args.set, seed=args.seed)
    except FalsificationError as e:
        path = _dump_counterexample("decompose", args.seed, e.counterexample)
        status.print(f"[bold red]Falsified: {e}. Counterexample → {path}")
        return EXIT_FALSIFIED

    if args.format == "csv":
        text = pd.DataFrame([report.to_row()]).to_csv(index=False).rstrip("\n")
    else:
        text = dumps_json(report_json(report))
    out = args.out or (report_path_for(args.group, args.set, eps, args.mode) if args.format == "json" else None)
    _emit(text, out)
    summary = (f"structure_err={report.structure_err} regularity_err={report.regularity_err} "
               f"P={report.P_descriptor.get('kind')} |F|={len(report.F)}")
    if report.ok:
        status.print(f"[bold green]{summary}" + (f" | JSON: {out}" if out else ""))
        return EXIT_OK
    failed = [c.name for c in report.bound_checks if c.status == "fail"]
    path = _dump_counterexample("decompose", args.seed, {"group_spec": args.group, "A": A.elements,
                                                          "eps": str(eps), "mode": args.mode, "failed": failed})
    status.print(f"[bold red]{len(failed)} bound check(s) failed: {', '.join(failed)}. Counterexample → {path}")
    return EXIT_FALSIFIED


def cmd_verify(args) -> int:
    status.print(f"[bold blue]Running suite {args.suite} (seed {args.seed}, max order {args.max_order})")
    report = verify_suite(args.suite, trials=args.trials, seed=args.seed, max_order=args.max_order,
                          exhaustive_order=args.exhaustive_order, jobs=args.jobs)
    if args.out:
        _emit(dumps_json(report.to_dict()), args.out)
    if report.ok:
        print(f"[bold green]{report.checked} checks passed ({report.skipped} skipped) over {len(report.groups)} groups")
        return EXIT_OK
    path = _dump_counterexample(args.suite, args.seed, report.failures)
    print(f"[bold red]{len(report.failures)} failure(s) in {args.suite}. Counterexamples → {path}")
    return EXIT_FALSIFIED


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    df = sweep(grid, jobs=args.jobs, max_order=args.max_order)
    path = write_sweep(df, grid.name, args.out)
    errors = int((df["error"].fillna("") != "").sum())
    print(f"[bold green]{len(df)} rows → {path}")
    if errors:
        print(f"[yellow]{errors} cell(s) could not run; see the error column")
    return EXIT_FALSIFIED if df["ok"].eq(False).any() else EXIT_OK


def cmd_mine(args) -> int:
    report = mine_gap(args.pair, budget=args.budget, seed=args.seed, top_k=args.top,
                      max_order=args.max_order, groups=args.group or None)
    if args.format == "json" or args.out:
        _emit(dumps_json(report.to_dict()), args.out)
        if not args.out:
            return EXIT_OK
    first, second = report.labels
    print(f"[bold green]{args.pair}: max gap {report.max_gap} over {report.evaluated} sets")
    for m in report.top:
        print(f"  {m.group_spec} A={list(m.A)}  {first}={m.first}  {second}={m.second}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    p = argparse.ArgumentParser(prog="nipreg", description="NIP arithmetic regularity workbench")
    p.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_set: bool = True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--max-order", type=int, default=settings.max_order)
        sp.add_argument("--out", default=None, help="Output path")
        if with_set:
            sp.add_argument("--group", required=True, help='e.g. "Z4xZ2^2", "D6", "table:mul.json"')
            sp.add_argument("--set", required=True, help='e.g. "0,1,2", "interval:0..5", "random:p=0.3:seed=7"')

    vc = sub.add_parser("vc", help="VC dimension of a translate-derived set system")
    common(vc)
    vc.add_argument("--side", default="left", choices=["left", "right"])
    vc.add_argument("--variant", default="translate", choices=list(VARIANTS))
    vc.add_argument("--base", default=None, help="Base set spec (default: the whole group)")
    vc.add_argument("--cap", type=int, default=None)
    vc.add_argument("--format", default="text", choices=["text", "json"])
    vc.set_defaults(func=cmd_vc)

    st = sub.add_parser("stab", help="Stabilizer of a set")
    common(st)
    st.add_argument("--side", default="left", choices=["left", "right"])
    st.add_argument("--eps", default="1/2", help="Relative threshold, St_eps(A)")
    st.add_argument("--threshold", default=None, help="Absolute threshold N, overrides --eps")
    st.add_argument("--format", default="text", choices=["text", "json"])
    st.set_defaults(func=cmd_stab)

    de = sub.add_parser("decompose", help="Structure and regularity decomposition")
    common(de)
    de.add_argument("--eps", required=True, help='e.g. "1/2"')
    de.add_argument("--mode", default="subgroup", choices=list(MODES))
    de.add_argument("--format", default="json", choices=["json", "csv"])
    de.set_defaults(func=cmd_decompose)

    ve = sub.add_parser("verify", help="Run a property suite")
    common(ve, with_set=False)
    ve.set_defaults(max_order=16)
    ve.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    ve.add_argument("--trials", type=int, default=200)
    ve.add_argument("--exhaustive-order", type=int, default=8)
    ve.add_argument("--jobs", type=int, default=None)
    ve.set_defaults(func=cmd_verify)

    sw = sub.add_parser("sweep", help="Decompose every cell of a grid into one CSV")
    common(sw, with_set=False)
    sw.add_argument("--grid", required=True, help="Grid JSON file or inline JSON")
    sw.add_argument("--jobs", type=int, default=None)
    sw.set_defaults(func=cmd_sweep)

    mi = sub.add_parser("mine", help="Search for gaps between VC variants")
    common(mi, with_set=False)
    mi.set_defaults(max_order=16)
    mi.add_argument("--pair", required=True, choices=list(PAIRS))
    mi.add_argument("--budget", type=int, default=2000)
    mi.add_argument("--top", type=int, default=5)
    mi.add_argument("--group", action="append", help="Restrict to these groups (repeatable)")
    mi.add_argument("--format", default="text", choices=["text", "json"])
    mi.set_defaults(func=cmd_mine)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except FalsificationError as e:
        path = _dump_counterexample(args.command, getattr(args, "seed", 0), e.counterexample)
        status.print(f"[bold red]Falsified: {e}. Counterexample → {path}")
        return EXIT_FALSIFIED
    except NipregError as e:
        status.print(f"[bold red]Error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
