"""Transmit stream assembly and the electrical-equivalent channel.

Noise power is referenced to the unit pre-clipping power the modems are
normalized to: sigma^2 = 10^(-snr_db / 10). ``NOISE_FREE`` (+inf dB) skips
noise generation altogether.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.signal import lfilter

from acsync.modem import ConfigError, ModemConfig, UnipolarFrame, draw_payload, modulate
from acsync.transforms import RealVec

NOISE_FREE = math.inf


class ChannelError(ConfigError):
    """Invalid channel description."""


def is_noise_free(snr_db: float) -> bool:
    return math.isinf(snr_db) and snr_db > 0


def _check_taps(taps: Sequence[float]) -> tuple[float, ...]:
    taps = tuple(float(t) for t in taps)
    if not taps:
        raise ChannelError("FIR channel needs at least one tap")
    if taps[0] == 0:
        raise ChannelError("First FIR tap must be non-zero (reference path)")
    return taps


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float = NOISE_FREE
    taps: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ChannelError(f"snr_db must be a number or +inf, got {self.snr_db}")
        if self.taps is not None:
            object.__setattr__(self, "taps", _check_taps(self.taps))

    @property
    def noise_variance(self) -> float:
        if is_noise_free(self.snr_db):
            return 0.0
        return 10 ** (-self.snr_db / 10)


@dataclass(frozen=True)
class StreamLayout:
    """[data frame | training frame | data frame]; ``true_start`` indexes the
    first sample of the training body, after its cyclic prefix."""

    samples: RealVec
    true_start: int

    def __len__(self) -> int:
        return len(self.samples)


def build_stream(
    config: ModemConfig, training: UnipolarFrame, rng: np.random.Generator
) -> StreamLayout:
    before = modulate(config, draw_payload(config, rng))
    after = modulate(config, draw_payload(config, rng))
    samples = np.concatenate([before.samples, training.samples, after.samples])
    return StreamLayout(samples, len(before) + training.cp_len)


def awgn(x: ArrayLike, snr_db: float, rng: np.random.Generator) -> RealVec:
    signal = np.asarray(x, dtype=np.float64)
    if is_noise_free(snr_db):
        return signal.copy()
    sigma = 10 ** (-snr_db / 20)
    return signal + rng.normal(0.0, sigma, size=signal.shape)


def fir(x: ArrayLike, taps: Sequence[float]) -> RealVec:
    """Causal linear convolution truncated to the input length."""
    b = np.asarray(_check_taps(taps))
    return lfilter(b, [1.0], np.asarray(x, dtype=np.float64))


def apply_channel(
    samples: ArrayLike, channel: ChannelConfig, rng: np.random.Generator
) -> RealVec:
    # noise is receiver-referred, so it goes on after the multipath filter
    x = np.asarray(samples, dtype=np.float64)
    if channel.taps is not None:
        x = fir(x, channel.taps)
    return awgn(x, channel.snr_db, rng)
