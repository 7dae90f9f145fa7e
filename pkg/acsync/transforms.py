"""Frequency/time transforms shared by the optical OFDM modems.

``idft``/``dft`` follow the 1/N-on-inverse convention, ``dht`` is the
symmetric 1/sqrt(N) Hartley transform and is its own inverse. All three
work on the last axis, so a stack of symbols can be transformed at once.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray

ComplexVec = NDArray[np.complex128]
RealVec = NDArray[np.float64]


class SizeError(ValueError):
    """Vector length does not fit the requested operation."""


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def check_length(x: NDArray, what: str = "transform") -> int:
    n = x.shape[-1] if x.ndim else 0
    if not is_power_of_two(n):
        raise SizeError(f"{what} length must be a power of two, got {n}")
    return n


def idft(spectrum: ArrayLike) -> NDArray[np.complex128]:
    """x_n = (1/N) sum_k X_k exp(j 2 pi k n / N)."""
    X = np.asarray(spectrum, dtype=np.complex128)
    check_length(X, "idft")
    return np.fft.ifft(X, axis=-1)


def dft(signal: ArrayLike) -> NDArray[np.complex128]:
    """X_k = sum_n x_n exp(-j 2 pi k n / N), no scaling."""
    x = np.asarray(signal, dtype=np.complex128)
    check_length(x, "dft")
    return np.fft.fft(x, axis=-1)


def dht(signal: ArrayLike) -> NDArray[np.float64]:
    """Discrete Hartley transform with cas kernel and 1/sqrt(N) scaling.

    Computed from the FFT as (Re F - Im F) / sqrt(N). Applying it twice
    returns the input.
    """
    x = np.asarray(signal, dtype=np.float64)
    n = check_length(x, "dht")
    F = np.fft.fft(x, axis=-1)
    return (F.real - F.imag) / np.sqrt(n)
