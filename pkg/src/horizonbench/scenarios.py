"""Evaluation-cell generation: target windows paired with context windows.

A scenario is one cell of the evaluation matrix: a prediction target
(one week, one month, or one 91-day quarter), a user class, and a
context window whose length is a fixed multiple of the horizon.  A
``calendar`` marker replaces the integer ratio when the context is cut
on calendar boundaries instead (three whole weeks / months / quarters),
which gives a different length than ratio 3 for months and quarters.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .data import DailySeries, UserClass
from .errors import ScenarioError

#: Marker used in place of an integer ratio for calendar-boundary splits.
CALENDAR = "calendar"

#: Integer context-to-prediction ratios supported by the matrix.
VALID_RATIOS = (2, 3, 4, 5)


class TargetName(str, enum.Enum):
    WEEK10 = "week10"
    JULY = "july"
    Q4 = "q4"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: Horizon length implied by each target name, in days.
HORIZON_DAYS = {
    TargetName.WEEK10: 7,
    TargetName.JULY: 31,
    TargetName.Q4: 91,
}

#: Default anchoring of the three targets.  The week is ISO week 10 of
#: 2012, the month is July 2012, and the quarter is the first 91 days of
#: 2012 Q4 (Oct 1 - Dec 30; the final day is dropped to keep quarters at
#: exactly 91 days).  All three can be overridden per run, and resolved
#: dates are recorded in the run manifest because these defaults are a
#: convention, not a property of the data.
DEFAULT_TARGET_STARTS = {
    TargetName.WEEK10: dt.date(2012, 3, 5),
    TargetName.JULY: dt.date(2012, 7, 1),
    TargetName.Q4: dt.date(2012, 10, 1),
}


@dataclass(frozen=True)
class TargetWindow:
    """A named prediction window: name fixes the horizon length."""

    name: TargetName
    start_date: dt.date
    horizon_days: int

    def __post_init__(self):
        object.__setattr__(self, "name", TargetName(self.name))
        expected = HORIZON_DAYS[self.name]
        if self.horizon_days != expected:
            raise ScenarioError(
                f"target '{self.name.value}' must have a {expected}-day horizon, "
                f"got {self.horizon_days}"
            )

    @property
    def end_date(self) -> dt.date:
        return self.start_date + dt.timedelta(days=self.horizon_days - 1)


def default_target(name: TargetName | str, start: dt.date | None = None) -> TargetWindow:
    name = TargetName(name)
    return TargetWindow(name, start or DEFAULT_TARGET_STARTS[name], HORIZON_DAYS[name])


def _quarter_start(day: dt.date) -> dt.date:
    month = 3 * ((day.month - 1) // 3) + 1
    return dt.date(day.year, month, 1)


def _shift_months(day: dt.date, months: int) -> dt.date:
    idx = day.year * 12 + (day.month - 1) + months
    return dt.date(idx // 12, idx % 12 + 1, 1)


def calendar_context_start(target: TargetWindow) -> dt.date:
    """First context day for a calendar-boundary split (three periods).

    Weeks are uniform, so three calendar weeks equal 21 days.  For the
    month target the context runs from the first day of the month three
    months back (Apr 1 - Jun 30 ahead of a July 1 start); for the
    quarter target, from the first day of the quarter three quarters
    back (Jan 1 - Sep 30 ahead of an Oct 1 start).
    """
    if target.name is TargetName.WEEK10:
        return target.start_date - dt.timedelta(days=21)
    if target.name is TargetName.JULY:
        return _shift_months(target.start_date, -3)
    return _shift_months(_quarter_start(target.start_date), -9)


@dataclass(frozen=True)
class Scenario:
    """One evaluation cell: target window x user class x context length."""

    target: TargetWindow
    user_class: UserClass
    ratio: int | str
    context_days: int

    def __post_init__(self):
        object.__setattr__(self, "user_class", UserClass(self.user_class))
        if self.ratio != CALENDAR:
            if self.ratio not in VALID_RATIOS:
                raise ScenarioError(f"unsupported ratio {self.ratio!r}")
            expected = self.ratio * self.target.horizon_days
            if self.context_days != expected:
                raise ScenarioError(
                    f"ratio {self.ratio} with a {self.target.horizon_days}-day "
                    f"horizon requires {expected} context days, got {self.context_days}"
                )
        if self.context_days < 1:
            raise ScenarioError("context must be at least one day")

    @property
    def context_start(self) -> dt.date:
        return self.target.start_date - dt.timedelta(days=self.context_days)

    @property
    def ratio_label(self) -> str:
        return self.ratio if self.ratio == CALENDAR else str(self.ratio)

    def describe(self) -> str:
        """One-line summary with resolved dates, for run manifests."""
        return (
            f"{self.target.name.value}/{self.user_class.value}/{self.ratio_label}: "
            f"context {self.context_start}..{self.target.start_date - dt.timedelta(days=1)} "
            f"({self.context_days}d), "
            f"target {self.target.start_date}..{self.target.end_date} "
            f"({self.target.horizon_days}d)"
        )


def make_scenario(
    target: TargetWindow, user_class: UserClass | str, ratio: int | str
) -> Scenario:
    if ratio == CALENDAR:
        context_days = (target.start_date - calendar_context_start(target)).days
    else:
        context_days = int(ratio) * target.horizon_days
    return Scenario(target, UserClass(user_class), ratio, context_days)


def build_matrix(
    span_start: dt.date,
    span_end: dt.date,
    targets: Sequence[TargetWindow] | None = None,
    ratios: Iterable[int | str] = VALID_RATIOS,
    classes: Iterable[UserClass | str] = tuple(UserClass),
) -> list[Scenario]:
    """Cross targets x classes x ratios into a deterministic scenario list.

    The default full matrix is 3 targets x 4 ratios x 2 classes = 24
    cells.  Every context window must fit inside the data span; a
    too-early context start is an error rather than a silent truncation,
    because forecasts from shortened contexts would not be comparable.
    """
    if targets is None:
        targets = [default_target(name) for name in TargetName]
    ratio_list = _sorted_ratios(ratios)
    class_list = [UserClass(c) for c in dict.fromkeys(classes)]

    scenarios: list[Scenario] = []
    seen = set()
    for target in targets:
        for cls in class_list:
            for ratio in ratio_list:
                scenario = make_scenario(target, cls, ratio)
                if scenario.context_start < span_start:
                    raise ScenarioError(
                        f"insufficient history for scenario "
                        f"{target.name.value}/{cls.value}/{scenario.ratio_label}: "
                        f"needs {scenario.context_start}, data starts {span_start}"
                    )
                if scenario.target.end_date > span_end:
                    raise ScenarioError(
                        f"target window for {target.name.value} ends "
                        f"{scenario.target.end_date}, data ends {span_end}"
                    )
                key = (target.name, target.start_date, cls, scenario.ratio_label)
                if key in seen:
                    continue
                seen.add(key)
                scenarios.append(scenario)
    return scenarios


def slice_scenario(
    series: DailySeries, scenario: Scenario
) -> tuple[DailySeries, DailySeries]:
    """Split a series into (context, actuals) for one scenario.

    The context ends the day before the target starts; the two windows
    are adjacent and disjoint by construction.
    """
    try:
        context = series.window(scenario.context_start, scenario.context_days)
        actuals = series.window(scenario.target.start_date, scenario.target.horizon_days)
    except Exception as exc:
        raise ScenarioError(f"scenario outside series: {exc}") from exc
    return context, actuals


def _sorted_ratios(ratios: Iterable[int | str]) -> list[int | str]:
    ints: list[int] = []
    calendar = False
    for r in dict.fromkeys(ratios):
        if r == CALENDAR:
            calendar = True
        else:
            ints.append(int(r))
    out: list[int | str] = sorted(ints)
    if calendar:
        out.append(CALENDAR)
    return out
