"""Frame timing metrics for asymmetrically clipped OFDM.

The proposed metric rebuilds the bipolar half-symbol from a clipped window
and correlates it with the receiver's copy of the unclipped training body.
Tian's simple metric and real-signal forms of the Schmidl and Park metrics
are kept for comparison. Offsets are relative to the first sample of the
training body (cyclic prefix excluded).
"""

from dataclasses import dataclass
from enum import StrEnum
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray

from acsync.constellation import Constellation
from acsync.modem import (
    ConfigError,
    ModemConfig,
    Scheme,
    UnipolarFrame,
    clipped_frame,
    draw_payload,
    modulate,
)
from acsync.transforms import RealVec, check_length, idft


class SearchRangeError(IndexError):
    """Metric window does not fit inside the received stream."""


class DetectionError(ValueError):
    """Cannot pick a timing estimate."""


class Metric(StrEnum):
    PROPOSED = "proposed"
    TIAN = "tian"
    SCHMIDL = "schmidl"
    PARK = "park"


@dataclass(frozen=True)
class SearchRange:
    """Candidate offsets ``start..stop`` (inclusive) around stream index ``origin``."""

    origin: int
    start: int
    stop: int

    def __post_init__(self) -> None:
        if self.stop < self.start:
            raise SearchRangeError(
                f"Empty search range [{self.start}, {self.stop}]"
            )

    @classmethod
    def absolute(cls, first: int, last: int, origin: int = 0) -> "SearchRange":
        return cls(origin, first - origin, last - origin)

    @property
    def first(self) -> int:
        return self.origin + self.start

    @property
    def last(self) -> int:
        return self.origin + self.stop

    def offsets(self) -> NDArray[np.int64]:
        return np.arange(self.start, self.stop + 1)

    def clamp(self, first: int, last: int) -> "SearchRange":
        """Intersect with the absolute span ``first..last``."""
        return SearchRange.absolute(
            max(self.first, first), min(self.last, last), self.origin
        )

    def __len__(self) -> int:
        return self.stop - self.start + 1


@dataclass(frozen=True)
class TimingMetricSeries:
    offsets: NDArray[np.int64]
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.offsets.shape != self.values.shape:
            raise ValueError("offsets and values must have the same length")
        if len(self.offsets) > 1 and np.any(np.diff(self.offsets) != 1):
            raise ValueError("offsets must be contiguous and increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("metric values must be finite")

    def value_at(self, d: int) -> float:
        i = d - int(self.offsets[0])
        if not 0 <= i < len(self.offsets):
            raise KeyError(f"offset {d} outside [{self.offsets[0]}, {self.offsets[-1]}]")
        return float(self.values[i])

    def __len__(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class SyncConfig:
    """Correlation length, offsets to scan and the receiver's template p(n)."""

    corr_len: int
    search: SearchRange
    template: RealVec

    def __post_init__(self) -> None:
        half = len(self.template) // 2
        if not 1 <= self.corr_len <= half:
            raise ConfigError(
                f"corr_len must lie in [1, {half}], got {self.corr_len}"
            )


@dataclass(frozen=True)
class SyncResult:
    d_hat: int
    peak_value: float
    correct: Optional[bool] = None


def reconstruct_bipolar_aco(window: ArrayLike) -> RealVec:
    """r_BP(n) = w(n) - w(n + N/2) for n < N/2 (also used for DHT-OFDM)."""
    w = np.asarray(window, dtype=np.float64)
    n = check_length(w, "window")
    return w[..., : n // 2] - w[..., n // 2 :]


def reconstruct_bipolar_pamdmt(window: ArrayLike) -> RealVec:
    """r_BP(0) = 0, r_BP(n) = w(n) - w(N - n) for 1 <= n < N/2."""
    w = np.asarray(window, dtype=np.float64)
    n = check_length(w, "window")
    out = np.zeros(w.shape[:-1] + (n // 2,))
    out[..., 1:] = w[..., 1 : n // 2] - w[..., n - 1 : n // 2 : -1]
    return out


def reconstruct_bipolar(scheme: Scheme, window: ArrayLike) -> RealVec:
    if scheme is Scheme.PAM_DMT:
        return reconstruct_bipolar_pamdmt(window)
    return reconstruct_bipolar_aco(window)


def _windows(stream: NDArray, width: int, first: int, last: int) -> NDArray:
    if first < 0 or last + width > len(stream):
        raise SearchRangeError(
            f"windows of {width} samples starting at {first}..{last} "
            f"do not fit a stream of {len(stream)} samples"
        )
    return sliding_window_view(stream, width)[first : last + 1]


def _as_stream(stream: ArrayLike) -> RealVec:
    return np.asarray(stream, dtype=np.float64)


def _normalized(P: NDArray, R: NDArray) -> NDArray:
    # an all-zero energy window scores 0 instead of nan
    out = np.zeros_like(P)
    np.divide(P**2, R**2, out=out, where=R > 0)
    return out


def metric_proposed(
    stream: ArrayLike,
    template: ArrayLike,
    scheme: Scheme,
    n_fft: int,
    corr_len: int,
    search: SearchRange,
) -> TimingMetricSeries:
    """M(d) = (1/L) sum_{n<L} r_BP^(d)(n) p(n), r_BP rebuilt from the window at d."""
    p = np.asarray(template, dtype=np.float64)
    if not 1 <= corr_len <= n_fft // 2 or len(p) < corr_len:
        raise ConfigError(
            f"corr_len must lie in [1, {n_fft // 2}] and not exceed the "
            f"template length {len(p)}, got {corr_len}"
        )
    w = _windows(_as_stream(stream), n_fft, search.first, search.last)
    r = reconstruct_bipolar(Scheme(scheme), w)[:, :corr_len]
    return TimingMetricSeries(search.offsets(), r @ p[:corr_len] / corr_len)


def metric_tian(
    stream: ArrayLike, n_fft: int, search: SearchRange
) -> TimingMetricSeries:
    """M(d) = 1/(N/8-1) sum_{n=1}^{N/4-1} r(d-n) r(d+n) on the raw stream."""
    if n_fft < 16:
        raise ConfigError(f"Tian's metric needs n_fft >= 16, got {n_fft}")
    h = n_fft // 4 - 1
    w = _windows(_as_stream(stream), 2 * h + 1, search.first - h, search.last - h)
    left = w[:, h - 1 :: -1]
    right = w[:, h + 1 :]
    values = np.sum(left * right, axis=1) / (n_fft // 8 - 1)
    return TimingMetricSeries(search.offsets(), values)


def metric_schmidl(
    stream: ArrayLike, n_fft: int, search: SearchRange
) -> TimingMetricSeries:
    """Half-symbol autocorrelation P(d)^2 / R(d)^2 of a real stream."""
    half = n_fft // 2
    w = _windows(_as_stream(stream), n_fft, search.first, search.last)
    first, second = w[:, :half], w[:, half:]
    P = np.sum(first * second, axis=1)
    R = np.sum(second**2, axis=1)
    return TimingMetricSeries(search.offsets(), _normalized(P, R))


def metric_park(
    stream: ArrayLike, n_fft: int, search: SearchRange
) -> TimingMetricSeries:
    """Mirror correlation P(d)^2 / R(d)^2 about the symbol centre d + N/2.

    P(d) = sum_{m=1}^{N/2-1} r(c - m) r(c + m), R(d) = sum r(c + m)^2 with
    c = d + N/2, so the sharp peak lands on the body start.
    """
    half = n_fft // 2
    w = _windows(_as_stream(stream), n_fft - 1, search.first + 1, search.last + 1)
    left = w[:, half - 2 :: -1]
    right = w[:, half:]
    P = np.sum(left * right, axis=1)
    R = np.sum(right**2, axis=1)
    return TimingMetricSeries(search.offsets(), _normalized(P, R))


def metric_span(metric: Metric, n_fft: int, stream_len: int) -> tuple[int, int]:
    """Absolute offsets whose metric window lies inside the stream."""
    if metric is Metric.TIAN:
        h = n_fft // 4 - 1
        return h, stream_len - 1 - h
    return 0, stream_len - n_fft


def peak_offset(metric: Metric, n_fft: int) -> int:
    """Offset of the designed peak: Tian's lands mid-symbol, the rest on the start."""
    return n_fft // 2 if metric is Metric.TIAN else 0


def correlation_cost(metric: Metric, n_fft: int, corr_len: int) -> int:
    """Real multiplications per candidate offset."""
    match metric:
        case Metric.PROPOSED:
            return corr_len
        case Metric.TIAN:
            return n_fft // 4 - 1
        case Metric.SCHMIDL:
            return n_fft
        case Metric.PARK:
            return n_fft - 2
    raise ConfigError(f"Unknown metric {metric!r}")


def compute_metric(
    metric: Metric,
    stream: ArrayLike,
    config: ModemConfig,
    sync: SyncConfig,
) -> TimingMetricSeries:
    match metric:
        case Metric.PROPOSED:
            return metric_proposed(
                stream,
                sync.template,
                config.scheme,
                config.n_fft,
                sync.corr_len,
                sync.search,
            )
        case Metric.TIAN:
            return metric_tian(stream, config.n_fft, sync.search)
        case Metric.SCHMIDL:
            return metric_schmidl(stream, config.n_fft, sync.search)
        case Metric.PARK:
            return metric_park(stream, config.n_fft, sync.search)
    raise ConfigError(f"Unknown metric {metric!r}")


def detect(
    series: TimingMetricSeries, true_offset: Optional[int] = None
) -> SyncResult:
    """Global argmax; ties go to the smallest offset."""
    if len(series) == 0:
        raise DetectionError("Cannot detect on an empty metric series")
    i = int(np.argmax(series.values))
    d_hat = int(series.offsets[i])
    correct = None if true_offset is None else d_hat == true_offset
    return SyncResult(d_hat, float(series.values[i]), correct)


def gen_training(rng: np.random.Generator, config: ModemConfig) -> UnipolarFrame:
    """Random data frame of the configured scheme; its bipolar body is p(n)."""
    return modulate(config, draw_payload(config, rng))


def training_constellation(config: ModemConfig, real: bool) -> Constellation:
    """Constellation for the baseline training symbols.

    ACO-OFDM configs use their QAM, or the sqrt(M)-PAM rail of it when real
    symbols are needed; PAM configs use their PAM, or M^2-QAM when complex.
    """
    M = config.constellation_order
    if config.scheme is Scheme.ACO:
        return Constellation.pam(int(round(np.sqrt(M)))) if real else Constellation.qam(M)
    return Constellation.pam(M) if real else Constellation.qam(M * M)


def _hermitian_training(
    rng: np.random.Generator,
    config: ModemConfig,
    bins: NDArray[np.int64],
    constellation: Constellation,
) -> UnipolarFrame:
    n = config.n_fft
    if len(bins) == 0:
        raise ConfigError(f"n_fft {n} leaves no carriers for this training symbol")
    scale = n / np.sqrt(2 * len(bins))
    values = scale * constellation.draw(rng, len(bins))
    spectrum = np.zeros(n, dtype=np.complex128)
    spectrum[bins] = values
    spectrum[n - bins] = np.conj(values)
    return clipped_frame(idft(spectrum).real, config.cp_len, values)


def gen_tian_training(rng: np.random.Generator, config: ModemConfig) -> UnipolarFrame:
    """Real symbols on the odd carriers below N/2, mirrored unchanged above.

    The unclipped body is even and half-period antisymmetric, so it is also
    mirror-antisymmetric about N/4: x(N/2 - n) = -x(n).
    """
    if config.scheme is not Scheme.ACO:
        raise ConfigError(f"Tian's training symbol is defined for aco, not {config.scheme}")
    bins = np.arange(1, config.n_fft // 2, 2)
    return _hermitian_training(rng, config, bins, training_constellation(config, real=True))


def gen_schmidl_training(rng: np.random.Generator, config: ModemConfig) -> UnipolarFrame:
    """Complex symbols on even carriers only, giving a body of two equal halves."""
    bins = np.arange(2, config.n_fft // 2, 2)
    return _hermitian_training(rng, config, bins, training_constellation(config, real=False))


def gen_park_training(rng: np.random.Generator, config: ModemConfig) -> UnipolarFrame:
    """Real symbols on even carriers: equal halves, each mirror-symmetric."""
    bins = np.arange(2, config.n_fft // 2, 2)
    return _hermitian_training(rng, config, bins, training_constellation(config, real=True))


def gen_metric_training(
    metric: Metric, rng: np.random.Generator, config: ModemConfig
) -> UnipolarFrame:
    match metric:
        case Metric.PROPOSED:
            return gen_training(rng, config)
        case Metric.TIAN:
            return gen_tian_training(rng, config)
        case Metric.SCHMIDL:
            return gen_schmidl_training(rng, config)
        case Metric.PARK:
            return gen_park_training(rng, config)
    raise ConfigError(f"Unknown metric {metric!r}")
