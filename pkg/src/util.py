from __future__ import annotations
import json, os
import logging
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

from rich.console import Console
from rich.logging import RichHandler
from slugify import slugify

from .errors import SpecError

Rational = Union[Fraction, int, str]


@dataclass(frozen=True)
class Settings:
    max_order: int = 20000
    subgroup_cap: int = 1024
    vc_cap: int = 12
    cover_cap: int = 64
    jobs: int = 1
    output_dir: str = "outputs"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


def get_settings() -> Settings:
    """
    Runtime caps and output root, read from the environment. Example:
      export NIPREG_MAX_ORDER=4096 NIPREG_JOBS=4
    Malformed values fall back to the defaults.
    """
    return Settings(
        max_order=_env_int("NIPREG_MAX_ORDER", Settings.max_order),
        subgroup_cap=_env_int("NIPREG_SUBGROUP_CAP", Settings.subgroup_cap),
        vc_cap=_env_int("NIPREG_VC_CAP", Settings.vc_cap),
        cover_cap=_env_int("NIPREG_COVER_CAP", Settings.cover_cap),
        jobs=_env_int("NIPREG_JOBS", Settings.jobs),
        output_dir=os.getenv("NIPREG_OUTPUT_DIR") or Settings.output_dir,
    )


def setup_logging(verbose: bool = False) -> None:
    """Route library logging through rich, on stderr."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False)],
        force=True,
    )


@dataclass(frozen=True)
class Capped:
    """Result of a capped exhaustive search: exact value, or a lower bound when exact is False."""
    value: int
    exact: bool = True

    def __str__(self) -> str:
        return str(self.value) if self.exact else f"≥{self.value}"

    def require_exact(self, what: str) -> int:
        if not self.exact:
            raise SpecError(f"{what} is only known as a lower bound ({self})")
        return self.value


def parse_fraction(text: Rational) -> Fraction:
    """Exact rational from "p/q", a decimal literal, an int or a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise SpecError("floats are not accepted as rationals; pass 'p/q' or a decimal string")
    raw = str(text).strip()
    try:
        if "/" in raw:
            num, den = raw.split("/", 1)
            if int(den) == 0:
                raise SpecError(f"zero denominator in {raw!r}")
            return Fraction(int(num), int(den))
        return Fraction(Decimal(raw))
    except (ValueError, InvalidOperation) as e:
        raise SpecError(f"not a rational: {raw!r}") from e


def parse_eps(text: Rational) -> Fraction:
    """A rational restricted to the open interval (0, 1)."""
    eps = parse_fraction(text)
    if not 0 < eps < 1:
        raise SpecError(f"eps must lie in (0,1), got {eps}")
    return eps


def fraction_json(value: Optional[Fraction]) -> Optional[dict]:
    if value is None:
        return None
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator}


def _json_default(obj: Any):
    if isinstance(obj, Fraction):
        return fraction_json(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, (set, frozenset, tuple)):
        return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def dumps_json(payload: Any) -> str:
    """Deterministic UTF-8 JSON: sorted keys, rationals as {num, den}."""
    return json.dumps(payload, default=_json_default, sort_keys=True, indent=2, ensure_ascii=False)


def ensure_dirs(*dirs: str) -> None:
    """Create any missing directories."""
    for d in dirs:
        Path(d).mkdir(parents=True, exist_ok=True)


def report_path_for(group_spec: str, set_spec: str, eps: Fraction, mode: str,
                    output_dir: Optional[str] = None) -> str:
    """Stable JSON path under outputs/reports/ following slug conventions."""
    root = output_dir or get_settings().output_dir
    g = slugify(group_spec)
    s = slugify(set_spec)[:48]
    e = f"{eps.numerator}-{eps.denominator}"
    return str(Path(root) / "reports" / f"{g}_{s}_eps{e}_{slugify(mode)}.json")


def sweep_path_for(grid_name: str, output_dir: Optional[str] = None) -> str:
    """Stable CSV path under outputs/sweeps/."""
    root = output_dir or get_settings().output_dir
    return str(Path(root) / "sweeps" / f"{slugify(grid_name)}.csv")


def counterexample_path_for(suite: str, seed: int, output_dir: Optional[str] = None) -> str:
    """Stable JSON path under outputs/counterexamples/."""
    root = output_dir or get_settings().output_dir
    return str(Path(root) / "counterexamples" / f"{slugify(suite)}_seed-{seed}.json")
