"""Command-line front end.

    assocfam verify   --space "E(1,0)" --surface slice-product
    assocfam family   --space "E(-1,0)" --surface helicoid-product --thetas 0,0.7854
    assocfam classify --space "E(0,0.5)" --surface nil3-vertical-plane

Exit codes: 0 pass or definite verdict, 1 failed suite, 2 configuration
error, 3 undetermined verdict.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional, cast

from ._config import DEFAULT_CASE_TOL, DEFAULT_GRID_MARGIN, DEFAULT_RESIDUAL_TOL
from ._version import __version__
from .catalog import get_entry, make_surface
from .compat import residual_grid
from .exceptions import AssocFamError, ConfigError, SuiteFailure
from .family import classify, parse_law, sweep
from .models import GridSpec, Tolerances
from .surface import Immersion

__all__ = ["RunConfig", "build_parser", "main", "write_atomic"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_UNDETERMINED = 3

Command = Literal["verify", "family", "classify"]
OutputFormat = Literal["json", "csv"]

DEFAULT_THETAS = "0,0.39269908169872414,0.7853981633974483,1.5707963267948966"


def _parse_params(items: Sequence[str]) -> dict[str, str]:
    params: dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"--param must look like key=value, got {item!r}", value=item)
        if key == "space":
            raise ConfigError("give the ambient space with --space, not --param space=...")
        if key in params:
            raise ConfigError(f"--param {key} given twice")
        params[key] = value.strip()
    return params


def _parse_thetas(text: str) -> tuple[float, ...]:
    thetas = []
    for part in text.split(","):
        part = part.strip()
        try:
            theta = float(part)
        except ValueError:
            raise ConfigError(
                f"--thetas takes comma-separated radians, got {part!r}", value=text
            ) from None
        if not math.isfinite(theta):
            raise ConfigError(f"theta must be finite, got {part!r}", value=text)
        thetas.append(theta)
    return tuple(thetas)


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI run needs, validated."""

    command: Command
    surface: str
    space: Optional[str] = None
    params: dict[str, str] = field(default_factory=dict)
    grid: GridSpec = field(default_factory=GridSpec)
    thetas: tuple[float, ...] = ()
    law: str = "canonical"
    tolerances: Tolerances = field(default_factory=Tolerances)
    out: Optional[Path] = None
    format: OutputFormat = "json"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        """Build a config from parsed arguments.

        Raises:
            ConfigError: an option has a malformed value.
        """
        get_entry(args.surface)
        tolerances = Tolerances(residual=args.tol, case=args.tol_case)
        return cls(
            command=cast(Command, args.command),
            surface=args.surface,
            space=args.space,
            params=_parse_params(args.param),
            grid=GridSpec.parse(args.grid, args.margin),
            thetas=_parse_thetas(args.thetas) if args.command == "family" else (),
            law=args.law,
            tolerances=tolerances,
            out=Path(args.out) if args.out else None,
            format=cast(OutputFormat, args.format),
        )

    def immersion(self) -> Immersion:
        params: dict[str, object] = dict(self.params)
        if self.space is not None:
            params["space"] = self.space
        return make_surface(self.surface, params)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assocfam",
        description="Check structure equations and associate families of surfaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug records")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="E(kappa,tau) or W(eps,eps0,c,k,a=...,I=[lo,hi])")
    common.add_argument("--surface", required=True, help="catalog entry name")
    common.add_argument(
        "--param", action="append", default=[], metavar="KEY=VALUE", help="catalog parameter"
    )
    common.add_argument("--grid", default="21x21", help="sample grid NUxNV (default 21x21)")
    common.add_argument("--margin", type=float, default=DEFAULT_GRID_MARGIN)
    common.add_argument("--tol", type=float, default=DEFAULT_RESIDUAL_TOL)
    common.add_argument("--tol-case", type=float, default=DEFAULT_CASE_TOL)
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    commands = parser.add_subparsers(dest="command", required=True)
    verify = commands.add_parser("verify", parents=[common], help="check the structure equations")
    verify.set_defaults(thetas="", law="canonical")
    family = commands.add_parser("family", parents=[common], help="sweep an associate family")
    family.add_argument("--thetas", default=DEFAULT_THETAS, help="comma-separated radians")
    family.add_argument("--law", default="canonical", help="canonical or custom(F1=...,...)")
    classify_cmd = commands.add_parser("classify", parents=[common], help="decide existence")
    classify_cmd.set_defaults(thetas="", law="canonical")
    return parser


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(cfg.out, text)
        logger.info("wrote %s", cfg.out)


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True
    )


def cmd_verify(cfg: RunConfig) -> int:
    report = residual_grid(cfg.immersion(), cfg.grid, cfg.tolerances.residual)
    _emit(cfg, report.to_json() if cfg.format == "json" else report.to_csv())
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_family(cfg: RunConfig) -> int:
    law = parse_law(cfg.law)
    try:
        result = sweep(cfg.immersion(), law, cfg.thetas, cfg.grid, cfg.tolerances.residual)
    except SuiteFailure as exc:
        print(f"assocfam: {exc}", file=sys.stderr)
        _emit(cfg, exc.report.to_json() if cfg.format == "json" else exc.report.to_csv())
        return EXIT_FAILED
    _emit(cfg, result.to_json() if cfg.format == "json" else result.to_csv())
    for row in result.summary():
        logger.info("%s", "  ".join(f"{key}={value}" for key, value in row.items()))
    if result.passed:
        return EXIT_OK
    print(f"assocfam: first failing theta = {result.first_failing_theta!r}", file=sys.stderr)
    return EXIT_FAILED


def cmd_classify(cfg: RunConfig) -> int:
    verdict = classify(cfg.immersion(), cfg.grid, cfg.tolerances)
    _emit(cfg, verdict.to_json() if cfg.format == "json" else verdict.to_csv())
    return EXIT_OK if verdict.is_definite else EXIT_UNDETERMINED


_COMMANDS = {"verify": cmd_verify, "family": cmd_family, "classify": cmd_classify}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    _configure_logging(args)
    try:
        cfg = RunConfig.from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"assocfam: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssocFamError as exc:
        print(f"assocfam: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
