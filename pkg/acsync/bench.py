"""Monte-Carlo runners for averaged timing metrics and detection sweeps.

Every trial draws from its own generator seeded by (seed, trial index), so a
run gives the same numbers however the trials are split across workers.
Worker partial sums are reduced in worker order.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from scipy.stats import norm

from acsync.channel import StreamLayout, apply_channel, build_stream
from acsync.config import ExperimentConfig
from acsync.modem import ModemConfig, UnipolarFrame
from acsync.sync import (
    SearchRange,
    SyncConfig,
    TimingMetricSeries,
    compute_metric,
    correlation_cost,
    detect,
    gen_metric_training,
    metric_span,
    peak_offset,
)

logger = logging.getLogger(__name__)

METRIC_AVERAGE = "metric-average"
DETECTION_SWEEP = "detection-sweep"

SNR_REFERENCE = (
    "noise variance 10^(-snr_db/10) relative to unit pre-clipping electrical power"
)


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one trial; ``stream`` separates payloads (0)
    from the noise of each SNR point (1, 2, ...)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, stream)))


def wilson_halfwidth(successes: int, trials: int, confidence: float = 0.95) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    z = float(norm.ppf(0.5 + confidence / 2))
    p = successes / trials
    spread = np.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2))
    return float(z * spread / (1 + z**2 / trials))


@dataclass(frozen=True)
class DetectionPoint:
    snr_db: float
    correct: int
    trials: int

    @property
    def rate(self) -> float:
        return self.correct / self.trials

    @property
    def ci_halfwidth(self) -> float:
        return wilson_halfwidth(self.correct, self.trials)


@dataclass(frozen=True)
class TrialReport:
    kind: str
    config: ExperimentConfig
    averaged_metric: Optional[TimingMetricSeries] = None
    detection: tuple[DetectionPoint, ...] = field(default_factory=tuple)
    wall_time: float = 0.0

    def echo(self) -> dict[str, Any]:
        config = self.config
        return {
            "kind": self.kind,
            **config.echo(),
            "correlation_cost": correlation_cost(
                config.metric, config.n_fft, config.corr_len
            ),
            "snr_reference": SNR_REFERENCE,
        }


def _chunks(trials: int, workers: int) -> list[range]:
    bounds = np.linspace(0, trials, min(workers, trials) + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def _fan_out(
    fn: Callable[[ExperimentConfig, range], NDArray], config: ExperimentConfig
) -> NDArray:
    chunks = _chunks(config.trials, config.workers)
    if len(chunks) == 1:
        partials = [fn(config, chunks[0])]
    else:
        partials = Parallel(n_jobs=len(chunks))(
            delayed(fn)(config, chunk) for chunk in chunks
        )
    total = partials[0]
    for part in partials[1:]:
        total = total + part
    return total


def _trial_stream(
    config: ExperimentConfig, modem: ModemConfig, trial: int
) -> tuple[UnipolarFrame, StreamLayout]:
    rng = trial_rng(config.seed, trial)
    training = gen_metric_training(config.metric, rng, modem)
    return training, build_stream(modem, training, rng)


def average_range(config: ExperimentConfig, layout: StreamLayout) -> SearchRange:
    """Offsets of an averaged-metric curve, [-N - cp, N] by default,
    clipped to where the metric window fits."""
    start, stop = config.search or (-config.n_fft - config.cp_len, config.n_fft)
    wanted = SearchRange(layout.true_start, start, stop)
    return wanted.clamp(*metric_span(config.metric, config.n_fft, len(layout)))


def sweep_range(config: ExperimentConfig, layout: StreamLayout) -> SearchRange:
    """Every offset the metric can be evaluated at, unless ``search`` is set."""
    first, last = metric_span(config.metric, config.n_fft, len(layout))
    full = SearchRange.absolute(first, last, layout.true_start)
    if config.search is None:
        return full
    return SearchRange(layout.true_start, *config.search).clamp(first, last)


def _metric_sum(config: ExperimentConfig, trials: range) -> NDArray:
    modem = config.modem_config()
    channel = config.channel_config(config.snr_points[0])
    total: Optional[NDArray] = None
    for trial in trials:
        training, layout = _trial_stream(config, modem, trial)
        received = apply_channel(layout.samples, channel, trial_rng(config.seed, trial, 1))
        sync = SyncConfig(config.corr_len, average_range(config, layout), training.bipolar)
        values = compute_metric(config.metric, received, modem, sync).values
        total = values if total is None else total + values
    assert total is not None
    return total


def _detection_counts(config: ExperimentConfig, trials: range) -> NDArray:
    modem = config.modem_config()
    channels = [config.channel_config(snr) for snr in config.snr_points]
    expected = peak_offset(config.metric, config.n_fft)
    correct = np.zeros(len(channels), dtype=np.int64)
    for trial in trials:
        training, layout = _trial_stream(config, modem, trial)
        sync = SyncConfig(config.corr_len, sweep_range(config, layout), training.bipolar)
        for j, channel in enumerate(channels):
            noise = trial_rng(config.seed, trial, 1 + j)
            received = apply_channel(layout.samples, channel, noise)
            series = compute_metric(config.metric, received, modem, sync)
            correct[j] += detect(series, expected).correct
    return correct


def _layout_offsets(config: ExperimentConfig) -> NDArray[np.int64]:
    _, layout = _trial_stream(config, config.modem_config(), 0)
    return average_range(config, layout).offsets()


def run_metric_average(config: ExperimentConfig) -> TrialReport:
    """Per-offset mean of the configured metric over ``trials`` random training
    symbols, each between two random data frames, at the first SNR point."""
    logger.info("metric average: %s", config.echo())
    started = time.perf_counter()
    total = _fan_out(_metric_sum, config)
    series = TimingMetricSeries(_layout_offsets(config), total / config.trials)
    wall_time = time.perf_counter() - started
    logger.info("metric average done in %.2fs", wall_time)
    return TrialReport(METRIC_AVERAGE, config, averaged_metric=series, wall_time=wall_time)


def run_detection_sweep(config: ExperimentConfig) -> TrialReport:
    """Exact-index detection rate at every SNR point; the same streams are
    reused across SNR points, only the noise differs."""
    logger.info("detection sweep: %s", config.echo())
    started = time.perf_counter()
    counts = _fan_out(_detection_counts, config)
    points = tuple(
        DetectionPoint(snr, int(c), config.trials)
        for snr, c in zip(config.snr_points, counts)
    )
    for point in points:
        logger.info(
            "snr %.2f dB: detection rate %.4f +/- %.4f",
            point.snr_db,
            point.rate,
            point.ci_halfwidth,
        )
    wall_time = time.perf_counter() - started
    logger.info("detection sweep done in %.2fs", wall_time)
    return TrialReport(DETECTION_SWEEP, config, detection=points, wall_time=wall_time)
