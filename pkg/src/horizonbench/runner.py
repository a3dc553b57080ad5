"""Run orchestration: the full cells matrix from one validated config.

Each cell (model x scenario) is independent: it derives its own seed
from the global seed and the cell coordinates, so a subset run scores
exactly the same numbers as the matching cells of a full run.  Cells
execute concurrently up to a jobs bound; a cell failure is recorded and
the run continues.  Two runs with the same config are byte-identical.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from ._kernels import BACKEND
from .data import DailySeries, UserClass, load_series
from .errors import ConfigError, HorizonbenchError
from .forecast import ForecasterSpec, forecast_with_diagnostics, validate_spec
from .metrics import score
from .report import (
    METRIC_NAMES,
    ResultCell,
    degradation_tables,
    metric_table,
    metric_table_json,
    results_csv_text,
    swarm_csv_text,
    swarm_data,
)
from .scenarios import (
    CALENDAR,
    Scenario,
    TargetName,
    build_matrix,
    default_target,
    slice_scenario,
)

DEFAULT_MODELS = ("seasonal_naive", "arima", "decomposition", "quantized_sampler")


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run; serialized into the manifest."""

    data_path: str
    out_dir: str
    targets: tuple[str, ...] = tuple(t.value for t in TargetName)
    target_starts: dict[str, str] = field(default_factory=dict)
    ratios: tuple = (2, 3, 4, 5)
    classes: tuple[str, ...] = ("casual", "registered")
    models: tuple[ForecasterSpec, ...] = tuple(
        ForecasterSpec(kind) for kind in DEFAULT_MODELS
    )
    seed: int = 0
    jobs: int = 0  # 0 means "use available parallelism"

    def validate(self) -> None:
        if not Path(self.data_path).is_file():
            raise ConfigError(f"data file not found: {self.data_path}")
        if not self.targets:
            raise ConfigError("at least one target is required")
        for name in self.targets:
            TargetName(name)
        for name in self.target_starts:
            TargetName(name)
        if not self.ratios:
            raise ConfigError("at least one ratio is required")
        for ratio in self.ratios:
            if ratio != CALENDAR and int(ratio) not in (2, 3, 4, 5):
                raise ConfigError(f"unsupported ratio {ratio!r}")
        if not self.classes:
            raise ConfigError("at least one user class is required")
        for cls in self.classes:
            UserClass(cls)
        if not self.models:
            raise ConfigError("at least one model is required")
        for spec in self.models:
            validate_spec(spec)
        if self.jobs < 0:
            raise ConfigError("jobs must be >= 0")

    def to_json(self) -> str:
        obj = {
            "data": self.data_path,
            "out": self.out_dir,
            "targets": list(self.targets),
            "target_starts": dict(sorted(self.target_starts.items())),
            "ratios": list(self.ratios),
            "classes": list(self.classes),
            "models": [
                {"kind": spec.kind, "parameters": dict(sorted(spec.parameters.items()))}
                for spec in self.models
            ],
            "seed": self.seed,
            "jobs": self.jobs,
        }
        return json.dumps(obj, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        obj = json.loads(text)
        return cls(
            data_path=obj["data"],
            out_dir=obj["out"],
            targets=tuple(obj["targets"]),
            target_starts=dict(obj.get("target_starts", {})),
            ratios=tuple(
                r if r == CALENDAR else int(r) for r in obj["ratios"]
            ),
            classes=tuple(obj["classes"]),
            models=tuple(
                ForecasterSpec(m["kind"], m.get("parameters", {}))
                for m in obj["models"]
            ),
            seed=int(obj["seed"]),
            jobs=int(obj.get("jobs", 0)),
        )


def derive_seed(global_seed: int, model: str, scenario: Scenario) -> int:
    """Stable per-cell seed from the cell coordinates.

    Uses a cryptographic digest rather than ``hash()`` so the same cell
    reproduces across processes, platforms, and Python versions.
    """
    key = (
        f"{global_seed}|{model}|{scenario.target.name.value}|"
        f"{scenario.user_class.value}|{scenario.ratio_label}"
    )
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


@dataclass(frozen=True)
class CellFailure:
    model: str
    scenario: Scenario
    error: str


@dataclass(frozen=True)
class RunResult:
    cells: tuple[ResultCell, ...]
    failures: tuple[CellFailure, ...]
    out_dir: str

    @property
    def ok(self) -> bool:
        return not self.failures


def _execute_cell(args) -> tuple:
    """Worker entry: score one (model, scenario) cell."""
    spec, series, scenario, seed = args
    try:
        context, actuals = slice_scenario(series, scenario)
        qf, diag = forecast_with_diagnostics(
            spec, context, scenario.target.horizon_days, seed
        )
        triple = score(actuals.values, qf, context.values)
        return ("ok", ResultCell(spec.kind, scenario, triple, seed, diag))
    except HorizonbenchError as exc:
        return ("error", CellFailure(spec.kind, scenario, str(exc)))


def _resolved_targets(config: RunConfig):
    targets = []
    for name in config.targets:
        override = config.target_starts.get(name)
        start = dt.date.fromisoformat(override) if override else None
        targets.append(default_target(name, start))
    return targets


def plan_cells(config: RunConfig):
    """Load data, resolve scenarios, and enumerate cells with seeds."""
    series = {
        cls: load_series(config.data_path, cls) for cls in config.classes
    }
    any_series = next(iter(series.values()))
    targets = _resolved_targets(config)
    scenarios = build_matrix(
        any_series.start_date,
        any_series.end_date,
        targets=targets,
        ratios=config.ratios,
        classes=config.classes,
    )
    cells = []
    for spec in config.models:
        for scenario in scenarios:
            seed = derive_seed(config.seed, spec.kind, scenario)
            cells.append((spec, series[scenario.user_class.value], scenario, seed))
    return cells, scenarios


def run(config: RunConfig) -> RunResult:
    """Execute the matrix and write every artifact into the out dir."""
    config.validate()
    tasks, scenarios = plan_cells(config)

    jobs = config.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_execute_cell, tasks))
    else:
        outcomes = [_execute_cell(task) for task in tasks]

    cells = tuple(payload for status, payload in outcomes if status == "ok")
    failures = tuple(payload for status, payload in outcomes if status == "error")

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_artifacts(config, scenarios, cells, failures, out_dir)
    return RunResult(cells, failures, str(out_dir))


def _write_artifacts(config, scenarios, cells, failures, out_dir: Path) -> None:
    (out_dir / "results.csv").write_text(results_csv_text(cells))

    for ratio in config.ratios:
        label = ratio if ratio == CALENDAR else str(ratio)
        try:
            table = metric_table(cells, ratio)
        except HorizonbenchError:
            continue  # ratio entirely failed; failures.csv records why
        (out_dir / f"table_{label}.csv").write_text(table.to_csv_text())
        (out_dir / f"table_{label}.json").write_text(metric_table_json(table))

    for metric in METRIC_NAMES:
        lines = ["model,target,user_class,ratio,percent_change"]
        for table in degradation_tables(cells, metric):
            for (model, cls, ratio), pct in sorted(
                table.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])
            ):
                lines.append(
                    f"{model},{table.target.value},{cls.value},{ratio},{pct:+.1f}"
                )
        (out_dir / f"degradation_{metric}.csv").write_text("\n".join(lines) + "\n")
        records = swarm_data(cells, metric)
        (out_dir / f"swarm_{metric}.csv").write_text(swarm_csv_text(records))

    if failures:
        lines = ["model,target,user_class,ratio,error"]
        for f in sorted(
            failures,
            key=lambda f: (f.model, f.scenario.target.name.value,
                           f.scenario.user_class.value, str(f.scenario.ratio_label)),
        ):
            message = f.error.replace("\n", " ").replace(",", ";")
            lines.append(
                f"{f.model},{f.scenario.target.name.value},"
                f"{f.scenario.user_class.value},{f.scenario.ratio_label},{message}"
            )
        (out_dir / "failures.csv").write_text("\n".join(lines) + "\n")

    (out_dir / "manifest.txt").write_text(
        manifest_text(config, scenarios, cells, failures)
    )


def manifest_text(config, scenarios, cells, failures) -> str:
    """Human-readable run record; the config line alone re-creates the run."""
    lines = [
        "# horizonbench run manifest",
        f"version: {__version__}",
        f"kernel_backend: {BACKEND}",
        f"config: {config.to_json()}",
        "",
        "## resolved scenarios (dates are conventions unless overridden)",
    ]
    lines += [f"- {s.describe()}" for s in scenarios]
    lines.append("")
    lines.append("## forecaster specs")
    lines += [f"- {spec.describe()}" for spec in config.models]
    lines.append("")
    lines.append("## cells")
    for cell in sorted(
        cells,
        key=lambda c: (c.model, c.scenario.target.name.value,
                       c.scenario.user_class.value, str(c.ratio_label)),
    ):
        lines.append(
            f"- {cell.model} {cell.scenario.target.name.value}"
            f"/{cell.scenario.user_class.value}/{cell.ratio_label} "
            f"seed={cell.seed} ok {cell.fit_diagnostics}"
        )
    for failure in sorted(
        failures,
        key=lambda f: (f.model, f.scenario.target.name.value,
                       f.scenario.user_class.value, str(f.scenario.ratio_label)),
    ):
        lines.append(
            f"- {failure.model} {failure.scenario.target.name.value}"
            f"/{failure.scenario.user_class.value}/{failure.scenario.ratio_label} "
            f"ERROR {failure.error}"
        )
    return "\n".join(lines) + "\n"


def config_from_manifest(text: str) -> RunConfig:
    """Recover the exact run configuration from a manifest file."""
    for line in text.splitlines():
        if line.startswith("config: "):
            return RunConfig.from_json(line[len("config: "):])
    raise ConfigError("manifest has no config line")


def subset_config(config: RunConfig, **overrides) -> RunConfig:
    return replace(config, **overrides)
