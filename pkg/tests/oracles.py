"""Direct O(N^2) transforms, used as references for the fast ones."""

import numpy as np


def _phase(n: int) -> np.ndarray:
    k = np.arange(n)
    return 2 * np.pi * np.outer(k, k) / n


def direct_idft(spectrum) -> np.ndarray:
    X = np.asarray(spectrum, dtype=np.complex128)
    n = len(X)
    return np.exp(1j * _phase(n)) @ X / n


def direct_dft(signal) -> np.ndarray:
    x = np.asarray(signal, dtype=np.complex128)
    return np.exp(-1j * _phase(len(x))) @ x


def direct_dht(signal) -> np.ndarray:
    x = np.asarray(signal, dtype=np.float64)
    n = len(x)
    out = np.zeros(n)
    for m in range(n):
        for k in range(n):
            angle = 2 * np.pi * k * m / n
            out[m] += x[k] * (np.cos(angle) + np.sin(angle))
    return out / np.sqrt(n)
