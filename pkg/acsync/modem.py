"""Asymmetrically clipped optical OFDM modems: ACO-OFDM, PAM-DMT and DHT-OFDM.

Transmit chain: constellation -> subcarrier mapping -> transform -> cyclic
prefix -> clip negative samples. The receiver strips the prefix, transforms
back and doubles the data carriers, which lost exactly half their amplitude
to clipping.
"""

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from acsync.constellation import Constellation
from acsync.transforms import (
    ComplexVec,
    RealVec,
    SizeError,
    dft,
    dht,
    idft,
    is_power_of_two,
)

PayloadSymbols = NDArray

MIN_NFFT = 4


class ConfigError(ValueError):
    """Invalid modem, channel or experiment parameters."""


class Scheme(StrEnum):
    ACO = "aco"
    PAM_DMT = "pamdmt"
    DHT = "dht"


def payload_count(scheme: Scheme, n_fft: int) -> int:
    match scheme:
        case Scheme.ACO:
            return n_fft // 4
        case Scheme.PAM_DMT:
            return n_fft // 2 - 1
        case Scheme.DHT:
            return n_fft // 2
    raise ConfigError(f"Unknown scheme {scheme!r}")


def constellation_for(scheme: Scheme, order: int) -> Constellation:
    """Square QAM for ACO-OFDM, PAM for the real-symbol schemes."""
    try:
        if scheme is Scheme.ACO:
            return Constellation.qam(order)
        return Constellation.pam(order)
    except ValueError as e:
        raise ConfigError(f"Constellation order {order} invalid for {scheme}: {e}")


@dataclass(frozen=True)
class ModemConfig:
    scheme: Scheme
    n_fft: int
    cp_len: int
    constellation_order: int
    power_scale: float = field(default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not is_power_of_two(self.n_fft) or self.n_fft < MIN_NFFT:
            raise ConfigError(
                f"n_fft must be a power of two >= {MIN_NFFT}, got {self.n_fft}"
            )
        if not 0 <= self.cp_len < self.n_fft:
            raise ConfigError(
                f"cp_len must satisfy 0 <= cp_len < n_fft, got {self.cp_len}"
            )
        constellation_for(self.scheme, self.constellation_order)
        if self.power_scale < 0:
            raise ConfigError(f"power_scale must be positive, got {self.power_scale}")
        # 0.0 means not given
        if self.power_scale == 0:
            object.__setattr__(self, "power_scale", compute_power_scale(self))

    @property
    def frame_len(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def constellation(self) -> Constellation:
        return constellation_for(self.scheme, self.constellation_order)


@dataclass(frozen=True)
class UnipolarFrame:
    """A clipped transmit frame together with what produced it.

    ``samples`` is the CP-prefixed non-negative waveform, ``bipolar`` the
    unclipped body before the prefix was added.
    """

    samples: RealVec
    bipolar: RealVec
    payload: PayloadSymbols
    cp_len: int

    @property
    def body(self) -> RealVec:
        return self.samples[self.cp_len :]

    def __len__(self) -> int:
        return len(self.samples)


def compute_power_scale(config: ModemConfig) -> float:
    """Multiplier on unit-energy constellation points giving E{x^2} = 1.

    Parseval over the active bins: with the 1/N inverse DFT the time power is
    active * s^2 / N^2, with the unitary DHT it is active * s^2 / N.
    """
    n = config.n_fft
    match config.scheme:
        case Scheme.ACO:
            return float(n / np.sqrt(2 * payload_count(Scheme.ACO, n)))
        case Scheme.PAM_DMT:
            return float(n / np.sqrt(2 * payload_count(Scheme.PAM_DMT, n)))
        case Scheme.DHT:
            return float(np.sqrt(n / payload_count(Scheme.DHT, n)))
    raise ConfigError(f"Unknown scheme {config.scheme!r}")


def draw_payload(config: ModemConfig, rng: np.random.Generator) -> PayloadSymbols:
    count = payload_count(config.scheme, config.n_fft)
    return config.power_scale * config.constellation.draw(rng, count)


def _check_payload(payload: NDArray, expected: int, scheme: str) -> None:
    if payload.shape[-1:] != (expected,):
        raise SizeError(
            f"{scheme} payload must hold {expected} symbols, got {payload.shape[-1:]}"
        )


def map_aco(payload: ArrayLike, n_fft: int) -> ComplexVec:
    """Payload on odd bins below N/2, conjugates mirrored for Hermitian symmetry."""
    values = np.asarray(payload, dtype=np.complex128)
    _check_payload(values, n_fft // 4, "ACO-OFDM")
    odd = np.arange(1, n_fft // 2, 2)
    spectrum = np.zeros(n_fft, dtype=np.complex128)
    spectrum[odd] = values
    spectrum[n_fft - odd] = np.conj(values)
    return spectrum


def map_pamdmt(payload: ArrayLike, n_fft: int) -> ComplexVec:
    """Real symbols on the imaginary part of bins 1..N/2-1; DC and N/2 unused."""
    values = np.asarray(payload, dtype=np.float64)
    _check_payload(values, n_fft // 2 - 1, "PAM-DMT")
    bins = np.arange(1, n_fft // 2)
    spectrum = np.zeros(n_fft, dtype=np.complex128)
    spectrum[bins] = 1j * values
    spectrum[n_fft - bins] = -1j * values
    return spectrum


def map_dht(payload: ArrayLike, n_fft: int) -> RealVec:
    """Real symbols on every odd bin, no conjugate half."""
    values = np.asarray(payload, dtype=np.float64)
    _check_payload(values, n_fft // 2, "DHT-OFDM")
    spectrum = np.zeros(n_fft, dtype=np.float64)
    spectrum[1::2] = values
    return spectrum


def clip_negative(x: ArrayLike) -> RealVec:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def add_cp(body: ArrayLike, cp_len: int) -> RealVec:
    x = np.asarray(body)
    n = x.shape[-1]
    if not 0 <= cp_len <= n:
        raise SizeError(f"cp_len {cp_len} exceeds body length {n}")
    return np.concatenate([x[..., n - cp_len :], x], axis=-1)


def remove_cp(frame: ArrayLike, cp_len: int) -> RealVec:
    x = np.asarray(frame)
    if not 0 <= cp_len <= x.shape[-1]:
        raise SizeError(f"cp_len {cp_len} exceeds frame length {x.shape[-1]}")
    return x[..., cp_len:]


def map_payload(scheme: Scheme, payload: ArrayLike, n_fft: int) -> NDArray:
    match scheme:
        case Scheme.ACO:
            return map_aco(payload, n_fft)
        case Scheme.PAM_DMT:
            return map_pamdmt(payload, n_fft)
        case Scheme.DHT:
            return map_dht(payload, n_fft)
    raise ConfigError(f"Unknown scheme {scheme!r}")


def to_time(scheme: Scheme, spectrum: NDArray) -> RealVec:
    if scheme is Scheme.DHT:
        return dht(spectrum)
    return idft(spectrum).real


def clipped_frame(
    bipolar: RealVec, cp_len: int, payload: PayloadSymbols
) -> UnipolarFrame:
    # prefix first, then clip: the order the transmitter applies them
    samples = clip_negative(add_cp(bipolar, cp_len))
    return UnipolarFrame(samples, bipolar, payload, cp_len)


def modulate(config: ModemConfig, payload: ArrayLike) -> UnipolarFrame:
    values = np.asarray(payload)
    bipolar = to_time(config.scheme, map_payload(config.scheme, values, config.n_fft))
    return clipped_frame(bipolar, config.cp_len, values)


def demodulate(config: ModemConfig, frame: ArrayLike) -> PayloadSymbols:
    x = np.asarray(frame, dtype=np.float64)
    if x.shape[-1] != config.frame_len:
        raise SizeError(
            f"Frame must hold {config.frame_len} samples, got {x.shape[-1]}"
        )
    n = config.n_fft
    body = remove_cp(x, config.cp_len)
    match config.scheme:
        case Scheme.ACO:
            return 2 * dft(body)[..., 1 : n // 2 : 2]
        case Scheme.PAM_DMT:
            return 2 * dft(body)[..., 1 : n // 2].imag
        case Scheme.DHT:
            return 2 * dht(body)[..., 1::2]
    raise ConfigError(f"Unknown scheme {config.scheme!r}")
