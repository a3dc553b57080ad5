import os
from pathlib import Path

import pytest

from horizonbench.data import UserClass, load_daily_csv

TESTS_DIR = Path(__file__).parent
SYNTHETIC_DAY_CSV = TESTS_DIR / "data" / "day_synthetic.csv"

#: The real public dataset is not shipped with the tests; point this env
#: var (or data/day.csv in the repo root) at it to run the gated checks.
REAL_DAY_CSV_ENV = "HORIZONBENCH_UCI_DAY"


def real_day_csv() -> Path | None:
    env = os.environ.get(REAL_DAY_CSV_ENV)
    if env and Path(env).is_file():
        return Path(env)
    default = TESTS_DIR.parent / "data" / "day.csv"
    if default.is_file():
        return default
    return None


@pytest.fixture(scope="session")
def day_csv_path() -> Path:
    """Synthetic stand-in with the public file's exact schema."""
    assert SYNTHETIC_DAY_CSV.is_file(), "run scripts/make_synthetic_day.py first"
    return SYNTHETIC_DAY_CSV


@pytest.fixture(scope="session")
def bench_day_csv_path() -> Path:
    """Real daily file when available, else the synthetic stand-in."""
    return real_day_csv() or SYNTHETIC_DAY_CSV


@pytest.fixture(scope="session")
def casual_series(day_csv_path):
    return load_daily_csv(day_csv_path, UserClass.CASUAL)


@pytest.fixture(scope="session")
def registered_series(day_csv_path):
    return load_daily_csv(day_csv_path, UserClass.REGISTERED)
