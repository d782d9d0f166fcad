"""
Parameter sweeps: cross product of groups, set specs, eps values and modes, one
decomposition per cell, written as a versioned CSV.

Grid file (JSON):
  {"name": "z2-cosets", "groups": ["Z2^4"], "sets": ["cosets:0,1,2,3:0,4"],
   "eps": ["1/4", "1/2", "3/4"], "modes": ["subgroup"], "seed": 0}
"""
from __future__ import annotations
import itertools, json, logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd
from joblib import Parallel, delayed

from .errors import NipregError, SpecError
from .groups import build_group
from .pipeline import CSV_COLUMNS, CSV_VERSION, MODES, decompose
from .subsets import parse_subset
from .util import ensure_dirs, get_settings, parse_eps, sweep_path_for

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepGrid:
    name: str
    groups: Tuple[str, ...]
    sets: Tuple[str, ...]
    eps: Tuple[Fraction, ...]
    modes: Tuple[str, ...] = ("subgroup",)
    seed: int = 0

    def cells(self) -> List[Tuple[str, str, Fraction, str]]:
        return list(itertools.product(self.groups, self.sets, self.eps, self.modes))


def _string_list(raw: Dict[str, Any], key: str) -> Tuple[str, ...]:
    value = raw.get(key)
    if not isinstance(value, list) or not value or not all(isinstance(v, str) and v.strip() for v in value):
        raise SpecError(f"grid field {key!r} must be a nonempty list of strings")
    return tuple(v.strip() for v in value)


def _read_grid_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"grid is neither inline JSON nor a readable file: {path!r}") from e


def parse_grid(raw: Union[Dict[str, Any], str]) -> SweepGrid:
    """A grid from a dict, a JSON string or a path to a JSON file."""
    if isinstance(raw, str):
        text = raw if raw.lstrip().startswith(("{", "[")) else _read_grid_file(raw)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"grid is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise SpecError("grid must be a JSON object")
    unknown = set(raw) - {"name", "groups", "sets", "eps", "modes", "seed"}
    if unknown:
        raise SpecError(f"unknown grid fields: {', '.join(sorted(unknown))}")
    eps = tuple(parse_eps(e) for e in _string_list(raw, "eps"))
    modes = _string_list(raw, "modes") if "modes" in raw else ("subgroup",)
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise SpecError(f"unknown modes in grid: {', '.join(bad)}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise SpecError("grid seed must be a nonnegative integer")
    name = raw.get("name", "sweep")
    if not isinstance(name, str) or not name.strip():
        raise SpecError("grid name must be a nonempty string")
    return SweepGrid(name.strip(), _string_list(raw, "groups"), _string_list(raw, "sets"), eps, modes, seed)


def _row(group_spec: str, set_spec: str, eps: Fraction, mode: str, seed: int,
         max_order: Optional[int]) -> Dict[str, Any]:
    try:
        group = build_group(group_spec, max_order=max_order)
        A = parse_subset(group, set_spec, default_seed=seed)
        report = decompose(group, A, eps, mode, group_spec=group_spec, set_spec=set_spec, seed=seed)
    except NipregError as e:
        # a cell that cannot run is recorded, not fatal
        log.warning("sweep cell %s / %s / %s / %s: %s", group_spec, set_spec, eps, mode, e)
        return {"csv_version": CSV_VERSION, "group_spec": group_spec, "set_spec": set_spec, "eps": str(eps),
                "mode": mode, "seed": seed, "error": f"{type(e).__name__}: {e}"}
    return {**report.to_row(), "error": ""}


def sweep(grid: Union[SweepGrid, Dict[str, Any], str], jobs: Optional[int] = None,
          max_order: Optional[int] = None) -> pd.DataFrame:
    """One row per grid cell, in grid order regardless of worker scheduling."""
    if not isinstance(grid, SweepGrid):
        grid = parse_grid(grid)
    jobs = jobs or get_settings().jobs
    cells = grid.cells()
    log.info("sweep %s: %d cells on %d worker(s)", grid.name, len(cells), jobs)
    rows = Parallel(n_jobs=jobs)(
        delayed(_row)(g, s, e, m, grid.seed, max_order) for g, s, e, m in cells
    )
    df = pd.DataFrame(rows, dtype=object)
    return df.reindex(columns=list(CSV_COLUMNS) + ["error"])


def write_sweep(df: pd.DataFrame, grid_name: str, out: Optional[str] = None) -> str:
    """Write the sweep CSV; the default path comes from sweep_path_for."""
    path = out or sweep_path_for(grid_name)
    ensure_dirs(str(Path(path).parent))
    df.to_csv(path, index=False)
    return path
