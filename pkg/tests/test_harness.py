import math

import numpy as np
import pytest

from bench.flow import retry_transient_io, task_emit_outputs
from bench.plot import plot_results
from bench.spec import ResultRow, build_experiment_spec
from bench.sweep import run_experiment
from bench.trials import METHOD_REGISTRY, Family, Workbench, build_trial, families_for, sweep_point
from bench.validator import validate_output_csv
from bench.writer import CSV_COLUMNS, emit_outputs, write_results_csv
from util.config_loader import deep_merge, load_config, load_layered
from util.errors import ConfigError, InvalidArgumentError, SingularSystemError


def tiny_spec(tmp_path, experiment=None, scenario=None, output=None):
    cfg = {
        "experiment": {
            "name": "tiny",
            "sweep_variable": "snr-db",
            "sweep_values": [0, 20],
            "methods": ["ls", "oracle-ls", "omp", "laomp", "somp", "3d-mlaomp"],
            "trials": 3,
            "measurements": 8,
            "threads": 1,
            "output_path": str(tmp_path),
        },
        "scenario": {
            "num_bs": 1,
            "num_ris": 2,
            "num_users": 2,
            "bs_antennas": 4,
            "ris_elements": 8,
            "paths_bs_ris": 2,
            "paths_ris_user": 2,
            "rng_seed": 7,
        },
        "estimation": {"grid_ris": 16, "grid_bs": 8, "look_ahead_1d": 3, "look_ahead_aoa": 3},
        "output": {"plot": False, "record_wall_time": False},
    }
    cfg = deep_merge(cfg, {"experiment": experiment or {}, "scenario": scenario or {}, "output": output or {}})
    return build_experiment_spec(deep_merge(load_config(), cfg))


def _rows(methods=("omp", "3d-mlaomp"), values=(0.0, 10.0, 20.0)):
    return [
        ResultRow(m, "snr-db", v, nmse_mean=0.5 / (1 + i + j), trials=4, wall_time_seconds=0.25)
        for i, v in enumerate(values)
        for j, m in enumerate(methods)
    ]


# ---------------------------------------------------------
# Trials
# ---------------------------------------------------------

def test_trials_are_paired_and_stream_separated(tmp_path):
    spec = tiny_spec(tmp_path)
    bench = Workbench.for_spec(spec)
    point = sweep_point(spec, 10)
    families = {Family.CASCADED}

    a = build_trial(bench, point, 1, 0, families)
    b = build_trial(bench, point, 1, 0, families)
    c = build_trial(bench, point, 1, 1, families)

    np.testing.assert_array_equal(a.channels.bs_ris[0][1].entries, b.channels.bs_ris[0][1].entries)
    np.testing.assert_array_equal(a.observations[0].per_bs_tensors[0].data, b.observations[0].per_bs_tensors[0].data)
    assert not np.array_equal(a.channels.bs_ris[0][1].entries, c.channels.bs_ris[0][1].entries)
    assert a.config.noise_power == pytest.approx(0.1)
    assert a.tt_measurements is None


def test_two_timescale_trial_builds_sensing(tmp_path):
    spec = tiny_spec(tmp_path, experiment={"methods": ["tt-cooperative"], "sweep_variable": "measurements", "sweep_values": [3]})
    ctx = build_trial(Workbench.for_spec(spec), sweep_point(spec, 3), 0, 0, {Family.TWOTIMESCALE})
    assert ctx.observations is None
    assert len(ctx.tt_measurements) == 2
    assert ctx.tt_measurements[0][0].shape == (3 * 4, 2)
    assert ctx.tt_stacked[1].shape == (3 * 4, 16)


# ---------------------------------------------------------
# Sweep
# ---------------------------------------------------------

def test_rows_cover_every_method_and_value(tmp_path):
    spec = tiny_spec(tmp_path)
    rows = run_experiment(spec)
    assert len(rows) == 2 * 6
    assert [r.method for r in rows[:6]] == list(spec.methods)
    assert {r.sweep_value for r in rows} == {0.0, 20.0}
    for r in rows:
        assert r.nmse_mean >= 0 and math.isfinite(r.nmse_mean)
        assert r.trials == 3 and r.sweep_name == "snr-db"
        assert r.wall_time_seconds == 0.0


def test_results_do_not_depend_on_thread_count(tmp_path):
    one = run_experiment(tiny_spec(tmp_path, experiment={"threads": 1}))
    many = run_experiment(tiny_spec(tmp_path, experiment={"threads": 3}))
    assert [(r.method, r.sweep_value, r.nmse_mean, r.nmse_std_error) for r in one] == [
        (r.method, r.sweep_value, r.nmse_mean, r.nmse_std_error) for r in many
    ]


def test_seed_changes_results(tmp_path):
    a = run_experiment(tiny_spec(tmp_path, experiment={"methods": ["oracle-ls"]}))
    b = run_experiment(tiny_spec(tmp_path, experiment={"methods": ["oracle-ls"]}, scenario={"rng_seed": 8}))
    assert [r.nmse_mean for r in a] != [r.nmse_mean for r in b]


def test_ls_error_falls_with_snr(tmp_path):
    spec = tiny_spec(tmp_path, experiment={"methods": ["ls"], "sweep_values": [0, 30], "trials": 4})
    low, high = run_experiment(spec)
    assert high.nmse_mean < low.nmse_mean


def test_two_timescale_sweep(tmp_path):
    spec = tiny_spec(
        tmp_path,
        experiment={
            "methods": ["tt-oracle-ls", "tt-individual", "tt-cooperative"],
            "sweep_variable": "measurements",
            "sweep_values": [2, 4],
        },
    )
    rows = run_experiment(spec)
    assert len(rows) == 6
    assert all(r.sweep_name == "measurements" and r.nmse_mean >= 0 for r in rows)


def test_ls_with_too_few_subframes_is_singular(tmp_path):
    spec = tiny_spec(tmp_path, experiment={"methods": ["ls"], "measurements": 4})
    with pytest.raises(SingularSystemError):
        run_experiment(spec)


def test_unknown_method_fails_before_trials(tmp_path, monkeypatch):
    spec = tiny_spec(tmp_path, experiment={"methods": ["omp"]})
    object.__setattr__(spec, "methods", ("omp", "music"))

    def boom(*args, **kwargs):
        raise AssertionError("a trial ran")

    monkeypatch.setattr("bench.sweep.build_trial", boom)
    with pytest.raises(ConfigError):
        run_experiment(spec)


# ---------------------------------------------------------
# Outputs
# ---------------------------------------------------------

def test_csv_layout(tmp_path):
    spec = tiny_spec(tmp_path)
    outputs = emit_outputs(_rows(), spec)
    raw = outputs["csv"].read_bytes()

    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 6
    assert lines[1] == "omp,snr-db,0,0.5,-3.01029996,4,0.25"
    assert "plot" not in outputs


def test_nine_significant_digits(tmp_path):
    row = ResultRow("omp", "snr-db", 12.5, nmse_mean=0.123456789012, trials=1, wall_time_seconds=1.0)
    path = write_results_csv([row], tmp_path / "one.csv")
    fields = path.read_text().splitlines()[1].split(",")
    assert fields[3] == "0.123456789"
    assert fields[2] == "12.5"


def test_rerun_is_byte_identical(tmp_path):
    first = run_experiment(tiny_spec(tmp_path / "a", experiment={"methods": ["omp", "somp"], "trials": 1}))
    second = run_experiment(tiny_spec(tmp_path / "b", experiment={"methods": ["omp", "somp"], "trials": 1}))
    a = write_results_csv(first, tmp_path / "a.csv").read_bytes()
    b = write_results_csv(second, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_plot_has_one_series_per_method(tmp_path):
    spec = tiny_spec(tmp_path, output={"plot": True})
    outputs = emit_outputs(_rows(methods=("omp", "laomp", "3d-mlaomp")), spec)
    assert outputs["plot"].exists()
    assert plot_results(_rows(), spec, tmp_path / "again.png") == 2


def test_unwritable_output_leaves_nothing(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    spec = tiny_spec(blocker / "out")
    with pytest.raises(OSError):
        emit_outputs(_rows(), spec)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["blocker"]


def test_empty_rows_rejected(tmp_path):
    with pytest.raises(InvalidArgumentError):
        emit_outputs([], tiny_spec(tmp_path))


def test_validator(tmp_path):
    path = write_results_csv(_rows(), tmp_path / "r.csv")
    assert validate_output_csv(path)
    assert validate_output_csv(path, expected_rows=6)
    assert not validate_output_csv(path, expected_rows=5)

    broken = tmp_path / "broken.csv"
    broken.write_text(path.read_text().replace("nmse_db", "nmse_dB"))
    assert not validate_output_csv(broken)

    with pytest.raises(FileNotFoundError):
        validate_output_csv(tmp_path / "absent.csv")


# ---------------------------------------------------------
# Trend checks at reduced scale
# ---------------------------------------------------------

def ci_spec(tmp_path, experiment=None, scenario=None):
    cfg = deep_merge(
        load_layered(preset="ci"),
        {
            "experiment": {"output_path": str(tmp_path), **(experiment or {})},
            "scenario": scenario or {},
            "output": {"plot": False, "record_wall_time": False},
        },
    )
    return build_experiment_spec(cfg)


def _paired_nmse(spec, value) -> dict[str, np.ndarray]:
    """Per-trial NMSE of every method on shared realizations."""
    bench = Workbench.for_spec(spec)
    point = sweep_point(spec, value)
    families = families_for(spec.methods)
    scores = {name: [] for name in spec.methods}
    for t in range(spec.trials):
        ctx = build_trial(bench, point, t, 0, families)
        for name in spec.methods:
            scores[name].append(METHOD_REGISTRY[name].run(ctx))
    return {name: np.array(v) for name, v in scores.items()}


def _by_value(rows) -> dict[float, dict[str, ResultRow]]:
    table: dict[float, dict[str, ResultRow]] = {}
    for r in rows:
        table.setdefault(r.sweep_value, {})[r.method] = r
    return table


@pytest.mark.slow
def test_three_dimensional_search_leads_the_baselines(tmp_path):
    spec = ci_spec(
        tmp_path,
        experiment={"methods": ["omp", "laomp", "3d-mlaomp"], "trials": 60},
        scenario={"num_bs": 1},
    )
    scores = _paired_nmse(spec, 10.0)

    gap = scores["3d-mlaomp"] - scores["laomp"]
    assert gap.mean() + 2 * gap.std(ddof=1) / math.sqrt(gap.size) < 0
    assert np.mean(scores["laomp"] - scores["omp"]) < 0


@pytest.mark.slow
def test_oracle_bounds_every_estimator_off_grid(tmp_path):
    spec = tiny_spec(
        tmp_path,
        experiment={
            "methods": ["oracle-ls", "omp", "laomp", "somp", "3d-mlaomp"],
            "sweep_values": [0, 10, 20],
            "trials": 20,
        },
    )
    for value, row in _by_value(run_experiment(spec)).items():
        for name in ("omp", "laomp", "somp", "3d-mlaomp"):
            assert row[name].nmse_mean >= row["oracle-ls"].nmse_mean, (name, value)

    spec = tiny_spec(
        tmp_path,
        experiment={
            "methods": ["tt-oracle-ls", "tt-individual", "tt-cooperative"],
            "sweep_variable": "measurements",
            "sweep_values": [1, 4],
            "trials": 20,
        },
        scenario={"num_bs": 2},
    )
    for value, row in _by_value(run_experiment(spec)).items():
        for name in ("tt-individual", "tt-cooperative"):
            assert row[name].nmse_mean >= row["tt-oracle-ls"].nmse_mean, (name, value)


@pytest.mark.slow
def test_three_dimensional_error_does_not_rise_with_snr(tmp_path):
    spec = tiny_spec(
        tmp_path,
        experiment={
            "methods": ["3d-mlaomp"],
            "sweep_values": [-5, 0, 5, 10, 15, 20],
            "trials": 20,
            "on_grid": True,
        },
    )
    rows = run_experiment(spec)
    for low, high in zip(rows, rows[1:]):
        allowance = math.hypot(low.nmse_std_error, high.nmse_std_error)
        assert high.nmse_mean <= low.nmse_mean + allowance, (low.sweep_value, high.sweep_value)


@pytest.mark.slow
def test_cooperation_beats_individual_estimation(tmp_path):
    spec = tiny_spec(
        tmp_path,
        experiment={
            "methods": ["tt-individual", "tt-cooperative"],
            "sweep_variable": "measurements",
            "sweep_values": [1, 2, 3, 4, 5, 6, 7, 8],
            "snr_db": 10.0,
            "trials": 40,
            "on_grid": True,
        },
        scenario={"num_bs": 3},
    )
    table = _by_value(run_experiment(spec))
    assert sorted(table) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    for value, row in table.items():
        assert row["tt-cooperative"].nmse_mean <= row["tt-individual"].nmse_mean, value
    assert table[1.0]["tt-individual"].nmse_db - table[1.0]["tt-cooperative"].nmse_db >= 3.0


# ---------------------------------------------------------
# Flow retry condition
# ---------------------------------------------------------

class _FinishedState:
    def __init__(self, error: BaseException | None = None):
        self.error = error

    def result(self):
        if self.error is not None:
            raise self.error
        return {"csv": "done.csv"}


@pytest.mark.parametrize(
    "error, retry",
    [
        (OSError("device busy"), True),
        (TimeoutError("share timed out"), True),
        (PermissionError("read-only file system"), False),
        (NotADirectoryError("blocker"), False),
        (FileNotFoundError("gone"), False),
        (InvalidArgumentError("no rows"), False),
        (None, False),
    ],
)
def test_output_retries_only_transient_io(error, retry):
    assert retry_transient_io(None, None, _FinishedState(error)) is retry


def test_output_task_uses_the_retry_condition():
    assert task_emit_outputs.retry_condition_fn is retry_transient_io
    assert task_emit_outputs.retries == 3
