"""Command-line entry point.

Usage::

    tvefficiency --input topix.csv --date-col date --value-col close --prices --out results/
    tvefficiency --config run.cfg --seed 7

The optional config file holds flat ``key = value`` lines (``#`` starts a
comment) using the long flag names with dashes or underscores; flags given
on the command line override it.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from importlib import resources
from pathlib import Path

from . import __version__
from .pipeline import ConfigError, PipelineConfig, StageError, UnitRootNotRejected, run_pipeline

EXIT_OK, EXIT_STAGE, EXIT_CONFIG, EXIT_UNIT_ROOT = 0, 1, 2, 3

_INT_KEYS = {"qmax", "max_lag", "horizons", "boot_reps", "seed"}
_FLOAT_KEYS = {"level"}
_BOOL_KEYS = {"force"}


def demo_input() -> Path:
    """Path of the bundled synthetic monthly price series."""
    return Path(str(resources.files("tvefficiency.data").joinpath("synthetic_prices.csv")))


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_KEYS:
        return None if key == "max_lag" and raw.lower() in ("", "auto", "none") else int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if key == "delta2":
        return "auto" if raw.lower() == "auto" else float(raw)
    return raw


def read_config_file(path: str | Path) -> dict:
    valid = {f.name for f in fields(PipelineConfig)}
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in valid:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tvefficiency",
        description="Time-varying degree of market efficiency from a price or return series.",
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--input", help="CSV file with a header row")
    p.add_argument("--demo", action="store_true", help="use the bundled synthetic price series as input")
    p.add_argument("--date-col", dest="date_col")
    p.add_argument("--value-col", dest="value_col")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--prices", dest="value_kind", action="store_const", const="prices")
    kind.add_argument("--returns", dest="value_kind", action="store_const", const="returns")
    p.add_argument("--trend", choices=["c", "ct"], help="deterministics in the ADF-GLS test")
    p.add_argument("--max-lag", dest="max_lag", type=int, help="ADF-GLS maximum lag (default: Schwert rule)")
    p.add_argument("--qmax", type=int, help="largest AR order considered by SBIC")
    p.add_argument("--delta2", help="smoothing variance ratio, or 'auto' for maximum likelihood")
    p.add_argument("--horizons", type=int, help="impulse-response horizons")
    p.add_argument("--boot-reps", dest="boot_reps", type=int, help="bootstrap replications (0 skips the test)")
    p.add_argument("--seed", type=int)
    p.add_argument("--level", type=float, help="confidence level for bands")
    p.add_argument("--out", help="output directory")
    p.add_argument("--backend", choices=["stacked", "kalman", "both"])
    p.add_argument("--force", action="store_true", help="continue when the unit root is not rejected")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def resolve_config(argv=None) -> tuple[PipelineConfig, bool]:
    ns = vars(build_parser().parse_args(argv))
    verbose = ns.pop("verbose", False)
    values = {}
    if "config" in ns:
        values.update(read_config_file(ns.pop("config")))
    if ns.pop("demo", False):
        values.setdefault("input", str(demo_input()))
        values.setdefault("value_kind", "prices")
        values.setdefault("value_col", "price")
    if "delta2" in ns:
        ns["delta2"] = _coerce("delta2", ns["delta2"])
    values.update(ns)
    return PipelineConfig(**values), verbose


def main(argv=None) -> int:
    try:
        cfg, verbose = resolve_config(argv)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        result = run_pipeline(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnitRootNotRejected as exc:
        print(f"WARNING {exc}", file=sys.stderr)
        return EXIT_UNIT_ROOT
    except StageError as exc:
        print(f"error in stage {exc}", file=sys.stderr)
        return EXIT_STAGE
    for w in result.report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(result.files)} files to {result.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
