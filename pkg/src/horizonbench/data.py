"""Ingest of rental records and pre-aggregated daily count files.

Two input shapes are supported:

* raw per-rental rows (one timestamped record per ride), which are
  counted into a gapless daily series with explicit zeros, and
* day-aggregated CSV files with one row per calendar day and one count
  column per user class.

Both paths produce :class:`DailySeries`, the universal input of every
forecaster and metric in this package.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError


class UserClass(str, enum.Enum):
    """The two customer populations tracked by the rental system."""

    CASUAL = "casual"
    REGISTERED = "registered"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: Column-name aliases accepted in daily CSV headers.  The public
#: bike-share day file uses ``dteday`` for its date column.
DAILY_COLUMN_ALIASES = {
    "dteday": "date",
    "day": "date",
}


@dataclass(frozen=True)
class RentalRecord:
    """One ride: when it started and which population took it."""

    timestamp: dt.datetime
    user_class: UserClass


@dataclass(frozen=True)
class DailySeries:
    """Gapless daily count series for a single user class.

    ``values[i]`` is the count for ``start_date + i`` days.  Values are
    non-negative integers stored as float64 for numerical work.
    """

    start_date: dt.date
    values: np.ndarray = field(repr=False)
    user_class: UserClass

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise DataError("daily series needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise DataError("daily series contains non-finite values")
        if np.any(arr < 0):
            raise DataError("invalid count: daily values must be >= 0")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "user_class", UserClass(self.user_class))

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end_date(self) -> dt.date:
        return self.start_date + dt.timedelta(days=len(self) - 1)

    def date_at(self, index: int) -> dt.date:
        return self.start_date + dt.timedelta(days=index)

    def index_of(self, day: dt.date) -> int:
        """Position of ``day`` in the series; may be out of range."""
        return (day - self.start_date).days

    def window(self, start: dt.date, n_days: int) -> "DailySeries":
        """Contiguous sub-series of ``n_days`` starting at ``start``."""
        i = self.index_of(start)
        if i < 0 or i + n_days > len(self):
            raise DataError(
                f"window {start} (+{n_days}d) outside series "
                f"{self.start_date}..{self.end_date}"
            )
        return DailySeries(start, self.values[i : i + n_days].copy(), self.user_class)


def aggregate_daily(
    records: Iterable[RentalRecord], user_class: UserClass | str
) -> DailySeries:
    """Count rides per calendar day for one user class.

    Days with no rides between the first and last matching record appear
    as explicit zeros; a quiet day is observed zero demand, not a gap.

    Raises
    ------
    DataError
        If no record matches ``user_class``.
    """
    cls = UserClass(user_class)
    days = [r.timestamp.date() for r in records if r.user_class == cls]
    if not days:
        raise DataError(f"no records for class '{cls.value}'")
    start = min(days)
    n = (max(days) - start).days + 1
    values = np.zeros(n)
    for day in days:
        values[(day - start).days] += 1
    return DailySeries(start, values, cls)


def load_rental_csv(path) -> list[RentalRecord]:
    """Parse a raw per-rental CSV (``started_at``, ``member_type`` columns).

    ``member_type`` matching is case-insensitive.  A bad timestamp is
    reported with its line number so the offending row can be found.
    """
    records: list[RentalRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "started_at" not in reader.fieldnames:
            raise DataError("raw CSV is missing the 'started_at' column")
        if "member_type" not in reader.fieldnames:
            raise DataError("raw CSV is missing the 'member_type' column")
        for lineno, row in enumerate(reader, start=2):
            raw_ts = (row["started_at"] or "").strip()
            try:
                ts = dt.datetime.fromisoformat(raw_ts)
            except ValueError:
                raise DataError(f"unparseable timestamp {raw_ts!r} at line {lineno}")
            raw_cls = (row["member_type"] or "").strip().lower()
            try:
                cls = UserClass(raw_cls)
            except ValueError:
                raise DataError(f"unknown member type {raw_cls!r} at line {lineno}")
            records.append(RentalRecord(ts, cls))
    return records


def load_daily_csv(path, user_class: UserClass | str) -> DailySeries:
    """Load one class column from a day-aggregated CSV.

    The file must have a ``date`` column (ISO ``YYYY-MM-DD``, ``dteday``
    accepted as an alias) and one integer column per user class, with
    dates strictly increasing by exactly one day.  Unlike the raw-record
    path, a missing date here is an error: the aggregated source
    guarantees contiguity, so a gap means a broken file.
    """
    cls = UserClass(user_class)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("daily CSV has no header row")
        header = {DAILY_COLUMN_ALIASES.get(name, name): name for name in reader.fieldnames}
        if "date" not in header:
            raise DataError("daily CSV is missing a 'date' column")
        if cls.value not in header:
            raise DataError(f"unknown user class column '{cls.value}'")
        date_col, value_col = header["date"], header[cls.value]

        dates: list[dt.date] = []
        values: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            try:
                day = dt.date.fromisoformat(row[date_col].strip())
            except ValueError:
                raise DataError(f"unparseable date {row[date_col]!r} at line {lineno}")
            if dates and (day - dates[-1]).days != 1:
                raise DataError(f"non-contiguous dates at row {lineno}")
            try:
                count = int(row[value_col])
            except ValueError:
                raise DataError(f"invalid count {row[value_col]!r} at line {lineno}")
            if count < 0:
                raise DataError(f"invalid count {count} at line {lineno}")
            dates.append(day)
            values.append(count)

    if not dates:
        raise DataError("daily CSV has no data rows")
    return DailySeries(dates[0], np.array(values, dtype=float), cls)


def load_series(path, user_class: UserClass | str) -> DailySeries:
    """Load one class from either input shape, sniffing the header.

    A ``started_at`` column marks raw per-rental rows (aggregated here
    with zero-filled quiet days); anything else is treated as a
    day-aggregated file.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline()
    names = [h.strip() for h in header.split(",")]
    if "started_at" in names:
        return aggregate_daily(load_rental_csv(path), user_class)
    return load_daily_csv(path, user_class)


def write_daily_csv(path, series_by_class: Sequence[DailySeries]) -> None:
    """Serialize aligned per-class series back to the daily CSV format."""
    if not series_by_class:
        raise DataError("nothing to write")
    first = series_by_class[0]
    for s in series_by_class[1:]:
        if s.start_date != first.start_date or len(s) != len(first):
            raise DataError("series are not aligned")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date"] + [s.user_class.value for s in series_by_class])
        for i in range(len(first)):
            row = [first.date_at(i).isoformat()]
            row += [str(int(s.values[i])) for s in series_by_class]
            writer.writerow(row)
