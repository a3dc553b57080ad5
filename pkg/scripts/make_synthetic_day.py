#!/usr/bin/env python3
"""Generate the deterministic synthetic daily file used by the tests.

Writes 731 rows spanning 2011-01-01..2012-12-31 with the same schema as
the public day-aggregated rental file (date, casual, registered).  The
series carry yearly and weekly structure, year-over-year growth, and
Poisson-like noise, so they exercise the same code paths as the real
data without shipping it.  Regenerating with the same seed is
byte-identical.
"""

import csv
import datetime as dt
import sys
from pathlib import Path

import numpy as np

SEED = 20110101
N_DAYS = 731
START = dt.date(2011, 1, 1)


def synth_series(rng: np.ndarray):
    t = np.arange(N_DAYS)
    yearly = 0.5 - 0.45 * np.cos(2 * np.pi * (t + 10) / 365.25)
    growth = 1.0 + 0.65 * t / N_DAYS
    dow = np.array([(START + dt.timedelta(days=int(i))).weekday() for i in t])

    casual_week = np.array([0.75, 0.7, 0.7, 0.72, 0.85, 1.5, 1.6])[dow]
    casual_mean = 900.0 * yearly * growth * casual_week + 40.0
    registered_week = np.array([1.15, 1.2, 1.2, 1.2, 1.15, 0.8, 0.7])[dow]
    registered_mean = 3400.0 * (0.35 + 0.65 * yearly) * growth * registered_week + 300.0

    casual = rng.poisson(casual_mean) + np.rint(
        rng.normal(0, 0.08 * casual_mean)
    ).astype(int)
    registered = rng.poisson(registered_mean) + np.rint(
        rng.normal(0, 0.05 * registered_mean)
    ).astype(int)
    return np.maximum(casual, 0), np.maximum(registered, 0)


def main(path: str) -> None:
    rng = np.random.default_rng(SEED)
    casual, registered = synth_series(rng)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "casual", "registered"])
        for i in range(N_DAYS):
            writer.writerow(
                [
                    (START + dt.timedelta(days=i)).isoformat(),
                    int(casual[i]),
                    int(registered[i]),
                ]
            )
    print(f"wrote {out} ({N_DAYS} rows)")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/day_synthetic.csv")
