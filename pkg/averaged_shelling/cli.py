"""Command line front end: ``shellav <subcommand> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .calculator import shellingCalculator
from .modelsets import AMMANN, COEFFICIENT_LENGTH, PENROSE, SILVER, modelSet
from .plotting import render_points_svg, render_svg
from .randomtiling import MAX_ORDER
from .read_data import _load_point_dump
from .shelling_results import ConsistencyError, shellingResults

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("central", "chain", "penrose", "ammann", "ammann-random")
FORMATS = ("csv", "svg", "both")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

TITLES = {
    "central": "Square lattice, central shelling",
    "chain": "Silver mean chain, averaged shelling",
    "penrose": "Penrose vertex set, averaged shelling",
    "ammann": "Ammann-Beenker vertex set, averaged shelling",
    "ammann-random": "Random Ammann-Beenker tiling, averaged shelling",
}

POINT_SETS = {"chain": SILVER, "penrose": PENROSE, "ammann": AMMANN}


@dataclass
class RunConfig:
    """One command line run, flags merged over the settings file."""

    subcommand: str
    rmax: float = 1.0
    mmax: int = 16
    order: int = 5
    seed: int = 1
    flips_per_vertex: float = 1000
    replicas: int = 1
    detailed_balance: bool = False
    output: Path | None = None
    format: str = "csv"
    dump_points: Path | None = None

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}")
        if self.rmax <= 0:
            raise ValueError("--rmax must be positive")
        if self.mmax < 1:
            raise ValueError("--mmax must be at least 1")
        if self.replicas < 1:
            raise ValueError("--replicas must be at least 1")
        if self.flips_per_vertex < 0:
            raise ValueError("--flips-per-vertex must be nonnegative")
        if not 1 <= self.order <= MAX_ORDER:
            raise ValueError(f"--order must be between 1 and {MAX_ORDER}")
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ValueError("--seed must be an unsigned 64-bit integer")
        if self.format == "both" and self.output is None:
            raise ValueError("--format both needs --out")
        if self.dump_points is not None:
            if self.subcommand not in POINT_SETS:
                raise ValueError("--dump-points needs one of chain, penrose or ammann")
            if Path(self.dump_points).suffix == ".svg":
                raise ValueError("--dump-points names the dump, its plot goes next to it as .svg")


def _compute(config: RunConfig, calculator: shellingCalculator) -> shellingResults:
    if config.subcommand == "central":
        return calculator.central(config.mmax)
    if config.subcommand == "chain":
        return calculator.chain(config.rmax)
    if config.subcommand == "penrose":
        return calculator.penrose(config.rmax)
    if config.subcommand == "ammann":
        return calculator.ammann(config.rmax)
    return calculator.ammann_random(
        rmax=config.rmax,
        order=config.order,
        seed=config.seed,
        flips_per_vertex=config.flips_per_vertex,
        replicas=config.replicas,
        detailed_balance=config.detailed_balance,
    )


def _dump_points(config: RunConfig) -> Path:
    """Write the point dump of the run, then plot the patch it holds next to it."""
    kind = POINT_SETS[config.subcommand]
    count = modelSet(kind).dump_points(config.rmax, config.dump_points)
    logger.info("wrote %d points to %s", count, config.dump_points)
    _, coords = _load_point_dump(str(config.dump_points), COEFFICIENT_LENGTH[kind])
    target = Path(config.dump_points).with_suffix(".svg")
    name = TITLES[config.subcommand].split(",")[0]
    title = f"{name}, points within r = {config.rmax:g}"
    target.write_text(render_points_svg(coords, title))
    return target


def run(config: RunConfig, calculator: shellingCalculator | None = None) -> int:
    """
    Compute one table and write it.

    Returns
    -------
    int
        0 on success, 1 when the table fails its consistency checks.
    """
    calculator = shellingCalculator() if calculator is None else calculator
    results = _compute(config, calculator)
    try:
        results.check()
    except ConsistencyError as error:
        logger.error("inconsistent %s table: %s", config.subcommand, error)
        return 1

    title = TITLES[config.subcommand]
    if config.format in ("csv", "both"):
        if config.output is None:
            sys.stdout.write(results.to_csv())
        else:
            results.to_csv(str(config.output))
            logger.info("wrote %d shells to %s", len(results), config.output)
    if config.format in ("svg", "both"):
        svg = render_svg(results.records, title)
        if config.output is None:
            sys.stdout.write(svg)
        else:
            target = config.output if config.format == "svg" else config.output.with_suffix(".svg")
            target.write_text(svg)
            logger.info("wrote plot to %s", target)
    if config.dump_points is not None:
        logger.info("wrote point plot to %s", _dump_points(config))
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="output file, stdout if omitted")
    common.add_argument("--format", choices=FORMATS, default=None, help="csv, svg or both")
    common.add_argument("--verbose", action="store_true", help="log progress")
    common.add_argument("--debug", action="store_true", help="log everything")

    parser = argparse.ArgumentParser(
        prog="shellav",
        description="Averaged shelling numbers of crystals, quasicrystals and random tilings.",
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    central = commands.add_parser("central", parents=[common], help="square lattice, central shelling")
    central.add_argument("--mmax", type=int, default=None, help="largest squared radius")

    for name, text in (
        ("chain", "silver mean chain"),
        ("penrose", "Penrose vertex set"),
        ("ammann", "Ammann-Beenker vertex set"),
    ):
        sub = commands.add_parser(name, parents=[common], help=f"{text}, exact averaged shelling")
        sub.add_argument("--rmax", type=float, default=None, help="physical cut-off radius")
        sub.add_argument(
            "--dump-points",
            type=Path,
            default=None,
            dest="dump_points",
            help="also write the points within --rmax to this file and plot them",
        )

    random = commands.add_parser(
        "ammann-random", parents=[common], help="random Ammann-Beenker tiling, empirical shelling"
    )
    random.add_argument("--rmax", type=float, default=None, help="physical cut-off radius")
    random.add_argument("--order", type=int, default=None, help="approximant order")
    random.add_argument("--seed", type=int, default=None, help="seed of the random stream")
    random.add_argument("--flips-per-vertex", type=float, default=None, dest="flips_per_vertex")
    random.add_argument("--replicas", type=int, default=None, help="number of independent samples")
    random.add_argument(
        "--detailed-balance",
        action="store_true",
        default=None,
        dest="detailed_balance",
        help="sample the uniform measure on tilings",
    )
    return parser


def _run_config(args: argparse.Namespace, settings: dict) -> RunConfig:
    section = {
        "central": "central",
        "chain": "chain",
        "penrose": "penrose",
        "ammann": "ammann",
        "ammann-random": "ammann_random",
    }[args.subcommand]
    values = dict(settings[section])
    values.update(
        {
            key: value
            for key, value in vars(args).items()
            if value is not None and key in RunConfig.__dataclass_fields__
        }
    )
    values["subcommand"] = args.subcommand
    values["output"] = args.out
    values["format"] = args.format or settings["output"]["format"]
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    calculator = shellingCalculator()
    settings = calculator.settings

    level = settings["logging"]["level"]
    if args.verbose:
        level = "INFO"
    if args.debug:
        level = "DEBUG"
    logging.basicConfig(format=LOG_FORMAT, level=level)

    try:
        config = _run_config(args, settings)
    except (TypeError, ValueError) as error:
        parser.error(str(error))
    try:
        return run(config, calculator)
    except ValueError as error:
        logger.error("%s", error)
        return 2


if __name__ == "__main__":
    sys.exit(main())
