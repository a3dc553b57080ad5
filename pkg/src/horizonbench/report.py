"""Aggregation of per-cell scores into tables and plot-ready data.

Outputs mirror the benchmark's reporting conventions: one metric table
per context ratio (rows model x metric, columns target x class, with
machine-readable per-column minimum markers), percentage-change
degradation tables against the 2:1 ratio baseline, and long-format
swarm records for external plotting.  Formatting is fixed (4 decimals
for metric values, signed 1 decimal for percents) so that re-rendering
the same cells is byte-identical.

Degradation derived from externally supplied table values is always
emitted under both column-label hypotheses (as-labeled and with the
July/Q4 columns swapped); see :func:`degradation_hypotheses`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .data import UserClass
from .errors import ReportError
from .forecast import FORECASTER_KINDS
from .metrics import MetricTriple
from .scenarios import CALENDAR, Scenario, TargetName

METRIC_NAMES = ("emd", "mase", "wql")

#: Canonical column order of every table: target-major, class-minor.
COLUMN_ORDER = [
    (target, cls) for target in TargetName for cls in (UserClass.CASUAL, UserClass.REGISTERED)
]


@dataclass(frozen=True)
class ResultCell:
    """One scored (model, scenario) pair."""

    model: str
    scenario: Scenario
    metrics: MetricTriple
    seed: int
    fit_diagnostics: str = ""

    @property
    def ratio_label(self) -> str:
        return self.scenario.ratio_label

    def metric(self, name: str) -> float:
        return float(getattr(self.metrics, name))


def _model_order(models: Iterable[str]) -> list[str]:
    present = set(models)
    ordered = [m for m in FORECASTER_KINDS if m in present]
    ordered += sorted(present - set(ordered))
    return ordered


@dataclass(frozen=True)
class MetricTable:
    """Model x metric rows against target x class columns, one ratio."""

    ratio_label: str
    models: tuple[str, ...]
    columns: tuple[tuple[TargetName, UserClass], ...]
    values: Mapping[tuple[str, str, TargetName, UserClass], float]
    minima: Mapping[tuple[str, TargetName, UserClass], str]

    def to_csv_text(self) -> str:
        header = ["model", "metric"] + [
            f"{t.value}_{c.value}" for t, c in self.columns
        ]
        lines = [",".join(header)]
        for model in self.models:
            for metric in METRIC_NAMES:
                row = [model, metric]
                for col in self.columns:
                    row.append(f"{self.values[(model, metric) + col]:.4f}")
                lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "ratio": self.ratio_label,
            "columns": [f"{t.value}_{c.value}" for t, c in self.columns],
            "rows": [
                {
                    "model": model,
                    "metric": metric,
                    "values": {
                        f"{t.value}_{c.value}": round(
                            self.values[(model, metric, t, c)], 4
                        )
                        for t, c in self.columns
                    },
                }
                for model in self.models
                for metric in METRIC_NAMES
            ],
            "minima": {
                f"{metric}/{t.value}_{c.value}": model
                for (metric, t, c), model in sorted(
                    self.minima.items(),
                    key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2].value),
                )
            },
        }


def metric_table(cells: Sequence[ResultCell], ratio: int | str) -> MetricTable:
    """Build the metric table for one ratio from a completed cell set.

    Every model present must cover every (target, class) column seen at
    this ratio; a hole means the run is incomplete and aggregating it
    would silently misrank models.
    """
    label = ratio if ratio == CALENDAR else str(ratio)
    selected = [c for c in cells if c.ratio_label == label]
    if not selected:
        raise ReportError(f"incomplete run: no cells for ratio {label}")
    columns = tuple(
        col
        for col in COLUMN_ORDER
        if any(
            (c.scenario.target.name, c.scenario.user_class) == col for c in selected
        )
    )
    models = tuple(_model_order(c.model for c in selected))
    values: dict[tuple[str, str, TargetName, UserClass], float] = {}
    for cell in selected:
        key_base = (cell.scenario.target.name, cell.scenario.user_class)
        for metric in METRIC_NAMES:
            values[(cell.model, metric) + key_base] = cell.metric(metric)
    minima: dict[tuple[str, TargetName, UserClass], str] = {}
    for metric in METRIC_NAMES:
        for col in columns:
            best_model, best_value = None, None
            for model in models:
                key = (model, metric) + col
                if key not in values:
                    raise ReportError(
                        f"incomplete run: missing {model} at "
                        f"{col[0].value}/{col[1].value} ratio {label}"
                    )
                if best_value is None or values[key] < best_value:
                    best_model, best_value = model, values[key]
            minima[(metric,) + col] = best_model  # type: ignore[assignment]
    return MetricTable(label, models, columns, values, minima)


def degradation(
    values_by_ratio: Mapping[int | str, float], baseline: int = 2
) -> dict[int | str, float]:
    """Percent change of a metric at each ratio against the baseline ratio."""
    if baseline not in values_by_ratio:
        raise ReportError(f"baseline ratio {baseline} missing")
    base = values_by_ratio[baseline]
    if base == 0:
        raise ReportError("undefined percent change: zero baseline value")
    return {
        ratio: (value - base) / base * 100.0
        for ratio, value in values_by_ratio.items()
    }


@dataclass(frozen=True)
class DegradationTable:
    """Percent WQL/MASE/EMD changes vs the baseline ratio, one target."""

    metric: str
    target: TargetName
    baseline_ratio: int
    entries: Mapping[tuple[str, UserClass, int], float] = field(default_factory=dict)

    def to_csv_text(self) -> str:
        lines = ["model,user_class,ratio,percent_change"]
        for (model, cls, ratio), pct in sorted(
            self.entries.items(), key=lambda kv: (_model_rank(kv[0][0]), kv[0][1].value, kv[0][2])
        ):
            lines.append(f"{model},{cls.value},{ratio},{pct:+.1f}")
        return "\n".join(lines) + "\n"


def _model_rank(model: str) -> tuple[int, str]:
    try:
        return (FORECASTER_KINDS.index(model), model)
    except ValueError:
        return (len(FORECASTER_KINDS), model)


def degradation_tables(
    cells: Sequence[ResultCell], metric: str, baseline: int = 2
) -> list[DegradationTable]:
    """One degradation table per target, computed from this run's cells."""
    if metric not in METRIC_NAMES:
        raise ReportError(f"unknown metric '{metric}'")
    by_key: dict[tuple[TargetName, str, UserClass], dict[int, float]] = {}
    for cell in cells:
        if cell.scenario.ratio == CALENDAR:
            continue
        key = (cell.scenario.target.name, cell.model, cell.scenario.user_class)
        by_key.setdefault(key, {})[int(cell.scenario.ratio)] = cell.metric(metric)
    tables: dict[TargetName, dict[tuple[str, UserClass, int], float]] = {}
    for (target, model, cls), series in sorted(
        by_key.items(), key=lambda kv: (kv[0][0].value, _model_rank(kv[0][1]), kv[0][2].value)
    ):
        if baseline not in series:
            continue
        for ratio, pct in degradation(series, baseline).items():
            tables.setdefault(target, {})[(model, cls, int(ratio))] = pct
    return [
        DegradationTable(metric, target, baseline, entries)
        for target, entries in sorted(tables.items(), key=lambda kv: kv[0].value)
    ]


def degradation_hypotheses(
    wql_by_ratio: Mapping[int, Mapping[tuple[str, str], float]],
    baseline: int = 2,
) -> dict[str, dict[str, dict[tuple[str, str, int], float]]]:
    """Degradation from externally supplied per-ratio table values.

    ``wql_by_ratio[ratio][(target, class)]`` maps to a metric value per
    model-less column; callers pass one mapping per model.  Because
    published degradation tables have been observed inconsistent with
    their source metric tables up to a July/Q4 column swap, both
    hypotheses are always produced: ``as_labeled`` reads each target's
    own column, ``swapped`` reads July from the Q4 column and vice
    versa.
    """
    swap = {"july": "q4", "q4": "july"}
    out: dict[str, dict[str, dict[tuple[str, str, int], float]]] = {
        "as_labeled": {},
        "swapped": {},
    }
    ratios = sorted(wql_by_ratio)
    if baseline not in ratios:
        raise ReportError(f"baseline ratio {baseline} missing")
    columns = sorted(wql_by_ratio[baseline])
    for hypothesis in out:
        for target, cls in columns:
            source = (
                (swap.get(target, target), cls) if hypothesis == "swapped" else (target, cls)
            )
            series = {
                r: wql_by_ratio[r][source] for r in ratios if source in wql_by_ratio[r]
            }
            label = f"{target}_{cls}"
            out[hypothesis][label] = {
                (target, cls, int(r)): pct
                for r, pct in degradation(series, baseline).items()
            }
    return out


def swarm_data(cells: Sequence[ResultCell], metric: str) -> list[dict]:
    """Long-format records for external plotting, deterministically sorted."""
    if metric not in METRIC_NAMES:
        raise ReportError(f"unknown metric '{metric}'")
    records = [
        {
            "model": cell.model,
            "target": cell.scenario.target.name.value,
            "user_class": cell.scenario.user_class.value,
            "ratio": cell.ratio_label,
            "score": cell.metric(metric),
        }
        for cell in cells
    ]
    records.sort(
        key=lambda r: (
            r["target"],
            r["user_class"],
            _model_rank(r["model"]),
            str(r["ratio"]),
        )
    )
    return records


def results_csv_text(cells: Sequence[ResultCell]) -> str:
    """The run's primary artifact: one row per scored cell."""
    lines = ["model,target,user_class,ratio,emd,mase,wql,seed"]
    ordered = sorted(
        cells,
        key=lambda c: (
            c.scenario.target.name.value,
            c.scenario.user_class.value,
            str(c.ratio_label),
            _model_rank(c.model),
        ),
    )
    for cell in ordered:
        lines.append(
            f"{cell.model},{cell.scenario.target.name.value},"
            f"{cell.scenario.user_class.value},{cell.ratio_label},"
            f"{cell.metrics.emd:.4f},{cell.metrics.mase:.4f},"
            f"{cell.metrics.wql:.4f},{cell.seed}"
        )
    return "\n".join(lines) + "\n"


def swarm_csv_text(records: Sequence[dict]) -> str:
    lines = ["model,target,user_class,ratio,score"]
    for r in records:
        lines.append(
            f"{r['model']},{r['target']},{r['user_class']},{r['ratio']},{r['score']:.4f}"
        )
    return "\n".join(lines) + "\n"


def metric_table_json(table: MetricTable) -> str:
    return json.dumps(table.to_json_obj(), indent=2, sort_keys=False) + "\n"
