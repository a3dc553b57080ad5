"""Batch entry point: one command runs ingest through reporting.

Example:

    horizonbench --data data/day.csv --out runs/full --seed 0
    horizonbench --data data/day.csv --models seasonal_naive \\
        --targets week10 --ratios 2 --out runs/quick
"""

from __future__ import annotations

import argparse
import datetime as dt
import os
import sys

from .errors import ConfigError, HorizonbenchError
from .forecast import FORECASTER_KINDS, ForecasterSpec
from .runner import DEFAULT_MODELS, RunConfig, run
from .scenarios import CALENDAR, TargetName


def _csv_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizonbench",
        description=(
            "Score probabilistic forecasters over a matrix of prediction "
            "windows and context-to-prediction ratios."
        ),
    )
    parser.add_argument("--data", required=True, help="daily CSV (date,casual,registered)")
    parser.add_argument(
        "--targets",
        default="week10,july,q4",
        help="comma list of targets (week10, july, q4)",
    )
    parser.add_argument("--ratios", default="2,3,4,5", help="comma list from 2,3,4,5")
    parser.add_argument(
        "--classes", default="casual,registered", help="comma list of user classes"
    )
    parser.add_argument(
        "--models",
        default=",".join(DEFAULT_MODELS),
        help=f"comma list from: {', '.join(FORECASTER_KINDS)}",
    )
    parser.add_argument(
        "--calendar-split",
        action="store_true",
        help="add calendar-boundary context cells alongside the integer ratios",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=0, help="0 = all cores")
    parser.add_argument(
        "--out",
        default=None,
        help="output directory (falls back to $HORIZONBENCH_OUT)",
    )
    parser.add_argument("--bridge", default=None, help="external bridge address")
    parser.add_argument("--week10-start", default=None, metavar="DATE")
    parser.add_argument("--july-start", default=None, metavar="DATE")
    parser.add_argument("--q4-start", default=None, metavar="DATE")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    out_dir = args.out or os.environ.get("HORIZONBENCH_OUT")
    if not out_dir:
        raise ConfigError("no output directory: pass --out or set HORIZONBENCH_OUT")

    ratios: list = []
    for token in _csv_list(args.ratios):
        ratios.append(CALENDAR if token == CALENDAR else int(token))
    if args.calendar_split and CALENDAR not in ratios:
        ratios.append(CALENDAR)

    target_starts = {}
    for name, value in (
        (TargetName.WEEK10.value, args.week10_start),
        (TargetName.JULY.value, args.july_start),
        (TargetName.Q4.value, args.q4_start),
    ):
        if value:
            try:
                dt.date.fromisoformat(value)
            except ValueError as exc:
                raise ConfigError(f"bad date for {name}: {value!r}") from exc
            target_starts[name] = value

    models = []
    for kind in _csv_list(args.models):
        params: dict = {}
        if kind == "external":
            if not args.bridge:
                raise ConfigError("model 'external' needs --bridge ADDR")
            params["bridge"] = args.bridge
        models.append(ForecasterSpec(kind, params))

    return RunConfig(
        data_path=args.data,
        out_dir=out_dir,
        targets=tuple(_csv_list(args.targets)),
        target_starts=target_starts,
        ratios=tuple(ratios),
        classes=tuple(_csv_list(args.classes)),
        models=tuple(models),
        seed=args.seed,
        jobs=args.jobs,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        config.validate()
        result = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HorizonbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(f"{len(result.cells)} cells scored, {len(result.failures)} failed")
    print(f"artifacts in {result.out_dir}")
    for failure in result.failures:
        print(
            f"  FAILED {failure.model} {failure.scenario.target.name.value}"
            f"/{failure.scenario.user_class.value}/{failure.scenario.ratio_label}: "
            f"{failure.error}",
            file=sys.stderr,
        )
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
