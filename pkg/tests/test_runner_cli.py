import datetime as dt
import os
from pathlib import Path

import pytest

from horizonbench.cli import main
from horizonbench.errors import ConfigError
from horizonbench.forecast import ForecasterSpec
from horizonbench.runner import (
    RunConfig,
    config_from_manifest,
    derive_seed,
    plan_cells,
    run,
)
from horizonbench.scenarios import default_target, make_scenario


def quick_config(data_path, out_dir, **overrides) -> RunConfig:
    defaults = dict(
        data_path=str(data_path),
        out_dir=str(out_dir),
        targets=("week10",),
        ratios=(2, 3),
        classes=("casual",),
        models=(
            ForecasterSpec("seasonal_naive"),
            ForecasterSpec("quantized_sampler"),
        ),
        seed=11,
        jobs=1,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


class TestSeeds:
    def test_stable_across_runs_and_subsets(self):
        scenario = make_scenario(default_target("july"), "casual", 3)
        a = derive_seed(5, "arima", scenario)
        b = derive_seed(5, "arima", scenario)
        assert a == b
        assert derive_seed(5, "decomposition", scenario) != a
        assert derive_seed(6, "arima", scenario) != a

    def test_subset_cells_share_full_run_seeds(self, day_csv_path, tmp_path):
        full = quick_config(day_csv_path, tmp_path / "full", ratios=(2, 3, 4, 5))
        sub = quick_config(day_csv_path, tmp_path / "sub", ratios=(3,))
        full_cells, _ = plan_cells(full)
        sub_cells, _ = plan_cells(sub)
        full_seeds = {
            (spec.kind, sc.ratio_label): seed for spec, _, sc, seed in full_cells
        }
        for spec, _, scenario, seed in sub_cells:
            assert full_seeds[(spec.kind, scenario.ratio_label)] == seed


class TestRun:
    def test_produces_all_artifacts(self, day_csv_path, tmp_path):
        out = tmp_path / "run"
        result = run(quick_config(day_csv_path, out))
        assert result.ok
        assert len(result.cells) == 4  # 2 models x 1 target x 1 class x 2 ratios
        for name in (
            "results.csv",
            "table_2.csv",
            "table_2.json",
            "table_3.csv",
            "degradation_wql.csv",
            "degradation_mase.csv",
            "degradation_emd.csv",
            "swarm_wql.csv",
            "manifest.txt",
        ):
            assert (out / name).is_file(), name
        assert not (out / "failures.csv").exists()

    def test_byte_identical_reruns(self, day_csv_path, tmp_path):
        config_a = quick_config(day_csv_path, tmp_path / "a")
        config_b = quick_config(day_csv_path, tmp_path / "b")
        run(config_a)
        run(config_b)
        assert (tmp_path / "a" / "results.csv").read_bytes() == (
            tmp_path / "b" / "results.csv"
        ).read_bytes()

    def test_parallel_matches_serial(self, day_csv_path, tmp_path):
        serial = quick_config(day_csv_path, tmp_path / "serial", jobs=1)
        parallel = quick_config(day_csv_path, tmp_path / "par", jobs=2)
        run(serial)
        run(parallel)
        assert (tmp_path / "serial" / "results.csv").read_bytes() == (
            tmp_path / "par" / "results.csv"
        ).read_bytes()

    def test_manifest_round_trip(self, day_csv_path, tmp_path):
        config = quick_config(day_csv_path, tmp_path / "first")
        run(config)
        manifest = (tmp_path / "first" / "manifest.txt").read_text()
        recovered = config_from_manifest(manifest)
        assert recovered == config
        rerun = run(
            RunConfig(
                **{
                    **recovered.__dict__,
                    "out_dir": str(tmp_path / "second"),
                }
            )
        )
        assert rerun.ok
        assert (tmp_path / "first" / "results.csv").read_bytes() == (
            tmp_path / "second" / "results.csv"
        ).read_bytes()

    def test_failing_cell_recorded_not_fatal(self, tmp_path):
        # constant data: the seasonal MASE scale degenerates, so every
        # cell fails while the run itself completes
        path = tmp_path / "flat.csv"
        days = [dt.date(2011, 1, 1) + dt.timedelta(days=i) for i in range(60)]
        path.write_text(
            "date,casual,registered\n"
            + "\n".join(f"{d},5,7" for d in days)
            + "\n"
        )
        config = quick_config(
            path,
            tmp_path / "out",
            models=(ForecasterSpec("seasonal_naive"),),
            target_starts={"week10": "2011-02-01"},
            ratios=(2,),
        )
        result = run(config)
        assert not result.ok
        assert len(result.failures) == 1
        assert "MASE" in result.failures[0].error
        failures_csv = (tmp_path / "out" / "failures.csv").read_text()
        assert "seasonal_naive" in failures_csv
        # results.csv still written, just without the failed cell
        assert (tmp_path / "out" / "results.csv").read_text().startswith("model,")

    def test_invalid_config_rejected_before_compute(self, tmp_path):
        config = quick_config(tmp_path / "missing.csv", tmp_path / "out")
        with pytest.raises(ConfigError, match="data file not found"):
            run(config)
        assert not (tmp_path / "out").exists()


class TestCli:
    def test_subset_run_row_count(self, day_csv_path, tmp_path, capsys):
        out = tmp_path / "cli"
        code = main(
            [
                "--data", str(day_csv_path),
                "--models", "seasonal_naive",
                "--targets", "week10",
                "--ratios", "2",
                "--out", str(out),
                "--jobs", "1",
            ]
        )
        assert code == 0
        lines = (out / "results.csv").read_text().strip().split("\n")
        assert len(lines) == 1 + 2  # header + two classes

    def test_missing_data_file_is_config_error(self, tmp_path, capsys):
        code = main(
            ["--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")]
        )
        assert code == 2
        assert not (tmp_path / "o").exists()
        assert "config error" in capsys.readouterr().err

    def test_out_dir_env_fallback(self, day_csv_path, tmp_path, monkeypatch):
        monkeypatch.setenv("HORIZONBENCH_OUT", str(tmp_path / "from-env"))
        code = main(
            [
                "--data", str(day_csv_path),
                "--models", "seasonal_naive",
                "--targets", "week10",
                "--ratios", "2",
                "--classes", "casual",
                "--jobs", "1",
            ]
        )
        assert code == 0
        assert (tmp_path / "from-env" / "results.csv").is_file()

    def test_no_out_dir_anywhere(self, day_csv_path, monkeypatch, capsys):
        monkeypatch.delenv("HORIZONBENCH_OUT", raising=False)
        code = main(["--data", str(day_csv_path)])
        assert code == 2

    def test_calendar_split_flag(self, day_csv_path, tmp_path):
        out = tmp_path / "cal"
        code = main(
            [
                "--data", str(day_csv_path),
                "--models", "seasonal_naive",
                "--targets", "july",
                "--ratios", "2",
                "--calendar-split",
                "--classes", "casual",
                "--out", str(out),
                "--jobs", "1",
            ]
        )
        assert code == 0
        results = (out / "results.csv").read_text()
        assert ",calendar," in results
        assert (out / "table_calendar.csv").is_file()

    def test_week10_start_override(self, day_csv_path, tmp_path):
        out = tmp_path / "override"
        code = main(
            [
                "--data", str(day_csv_path),
                "--models", "seasonal_naive",
                "--targets", "week10",
                "--ratios", "2",
                "--classes", "casual",
                "--week10-start", "2012-03-12",
                "--out", str(out),
                "--jobs", "1",
            ]
        )
        assert code == 0
        manifest = (out / "manifest.txt").read_text()
        assert "2012-03-12" in manifest
