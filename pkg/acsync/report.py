"""CSV and SVG output for benchmark reports."""

import logging
import math
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import pandas as pd  # noqa: E402
import yaml  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from acsync.bench import METRIC_AVERAGE, TrialReport  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ReportError(OSError):
    """Report file could not be written."""


def report_frame(report: TrialReport) -> pd.DataFrame:
    if report.kind == METRIC_AVERAGE:
        series = report.averaged_metric
        if series is None:
            raise ValueError("metric-average report carries no averaged metric")
        return pd.DataFrame(
            {
                "offset_d": series.offsets,
                "mean_metric": series.values,
                "n_trials": report.config.trials,
            }
        )
    return pd.DataFrame(
        {
            "snr_db": [p.snr_db for p in report.detection],
            "detection_rate": [p.rate for p in report.detection],
            "ci_halfwidth": [p.ci_halfwidth for p in report.detection],
            "trials": [p.trials for p in report.detection],
        }
    )


def _header(report: TrialReport) -> str:
    echo = yaml.safe_dump(report.echo(), sort_keys=False, default_flow_style=None)
    return "".join(f"# {line}\n" for line in echo.splitlines())


def emit_csv(report: TrialReport, path: PathLike) -> Path:
    """Write ``report`` as UTF-8 CSV; the run parameters go first as
    ``#`` comment lines."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(_header(report))
            report_frame(report).to_csv(f, index=False, lineterminator="\n")
    except OSError as e:
        raise ReportError(f"Cannot write report to {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def emit_plot(report: TrialReport, path: PathLike) -> Path:
    path = Path(path)
    config = report.config
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    if report.kind == METRIC_AVERAGE:
        series = report.averaged_metric
        if series is None:
            raise ValueError("metric-average report carries no averaged metric")
        ax.plot(series.offsets, series.values, lw=1)
        ax.set_xlabel("timing offset d (samples)")
        ax.set_ylabel("mean timing metric")
    else:
        # the noise-free point has no place on a dB axis
        points = [p for p in report.detection if math.isfinite(p.snr_db)]
        if points:
            ax.errorbar(
                [p.snr_db for p in points],
                [p.rate for p in points],
                yerr=[p.ci_halfwidth for p in points],
                marker="o",
                capsize=3,
            )
        else:
            logger.warning("No finite SNR points to plot in %s", path)
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("correct detection probability")
        ax.set_ylim(0, 1.05)
    ax.set_title(f"{config.scheme.value} / {config.metric.value}, N={config.n_fft}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with matplotlib.rc_context({"svg.hashsalt": "acsync"}):
            fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as e:
        raise ReportError(f"Cannot write plot to {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path
