import math
import re

import pandas as pd
import pytest
import yaml

from acsync.bench import METRIC_AVERAGE, run_detection_sweep, run_metric_average
from acsync.config import ExperimentConfig
from acsync.modem import Scheme
from acsync.report import ReportError, emit_csv, emit_plot, report_frame
from acsync.sync import Metric


def _config(**kwargs) -> ExperimentConfig:
    params = dict(
        scheme=Scheme.ACO,
        n_fft=32,
        cp_len=4,
        constellation_order=4,
        metric=Metric.PROPOSED,
        corr_len=16,
        snr_points=(math.inf,),
        trials=4,
        seed=11,
    )
    params.update(kwargs)
    return ExperimentConfig(**params)


@pytest.fixture(scope="module")
def average_report():
    return run_metric_average(_config())


@pytest.fixture(scope="module")
def sweep_report():
    return run_detection_sweep(_config(snr_points=(0.0, 10.0, math.inf)))


def _split(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = [line for line in lines if line.startswith("#")]
    body = lines[len(header) :]
    return header, body


def test_metric_average_csv(tmp_path, average_report):
    path = emit_csv(average_report, tmp_path / "avg.csv")
    header, body = _split(path)
    assert header and all(line.startswith("# ") for line in header)
    assert body[0] == "offset_d,mean_metric,n_trials"
    assert not any(line.startswith("#") for line in body)

    frame = pd.read_csv(path, comment="#")
    series = average_report.averaged_metric
    assert len(frame) == len(series)
    assert frame["offset_d"].tolist() == series.offsets.tolist()
    assert (frame["n_trials"] == 4).all()
    assert frame["mean_metric"].to_numpy() == pytest.approx(series.values)


def test_header_echoes_parameters(tmp_path, average_report):
    header, _ = _split(emit_csv(average_report, tmp_path / "avg.csv"))
    echo = yaml.safe_load("\n".join(line[2:] for line in header))
    assert echo["kind"] == METRIC_AVERAGE
    assert echo["scheme"] == "aco" and echo["metric"] == "proposed"
    assert (echo["n_fft"], echo["cp_len"], echo["corr_len"]) == (32, 4, 16)
    assert (echo["trials"], echo["seed"]) == (4, 11)
    assert echo["snr_points"] == [math.inf]
    assert "snr_reference" in echo and "correlation_cost" in echo


def test_detection_csv(tmp_path, sweep_report):
    path = emit_csv(sweep_report, tmp_path / "out" / "sweep.csv")
    _, body = _split(path)
    assert body[0] == "snr_db,detection_rate,ci_halfwidth,trials"
    frame = pd.read_csv(path, comment="#")
    assert len(frame) == 3
    assert frame["snr_db"].tolist() == [0.0, 10.0, math.inf]
    assert (frame["trials"] == 4).all()
    assert frame["detection_rate"].between(0, 1).all()
    assert frame["ci_halfwidth"].gt(0).all()


def test_report_frame_columns(average_report, sweep_report):
    assert list(report_frame(average_report).columns) == [
        "offset_d",
        "mean_metric",
        "n_trials",
    ]
    assert len(report_frame(sweep_report)) == len(sweep_report.detection)


def test_csv_is_byte_identical_across_runs(tmp_path):
    config = _config(seed=5)
    a = emit_csv(run_metric_average(config), tmp_path / "a.csv")
    b = emit_csv(run_metric_average(config), tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_csv_uses_lf_only(tmp_path, sweep_report):
    data = emit_csv(sweep_report, tmp_path / "s.csv").read_bytes()
    assert b"\r" not in data
    assert data.endswith(b"\n")
    data.decode("utf-8")


def test_unwritable_path_raises(tmp_path, average_report):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    target = blocker / "avg.csv"
    with pytest.raises(ReportError, match=re.escape(str(target))):
        emit_csv(average_report, target)
    with pytest.raises(ReportError, match="Cannot write plot"):
        emit_plot(average_report, blocker / "avg.svg")


def test_plot_is_deterministic(tmp_path, average_report):
    a = emit_plot(average_report, tmp_path / "a.svg")
    b = emit_plot(average_report, tmp_path / "b.svg")
    text = a.read_text(encoding="utf-8")
    assert "<svg" in text
    assert a.read_bytes() == b.read_bytes()


def test_sweep_plot_skips_noise_free_point(tmp_path):
    only_noise_free = run_detection_sweep(_config(trials=2))
    path = emit_plot(only_noise_free, tmp_path / "nf.svg")
    assert "<svg" in path.read_text(encoding="utf-8")
