"""Gray-mapped square QAM and PAM constellations with unit average energy."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


def gray(n: NDArray[np.int64]) -> NDArray[np.int64]:
    return n ^ (n >> 1)


def _pam_levels(order: int) -> NDArray[np.float64]:
    # levels[label] for Gray labels 0..order-1
    index = np.arange(order)
    levels = np.empty(order, dtype=np.float64)
    levels[gray(index)] = 2 * index + 1 - order
    return levels


@dataclass(frozen=True)
class Constellation:
    name: str
    order: int
    points: NDArray

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.points)

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @classmethod
    def pam(cls, order: int) -> "Constellation":
        if order < 2 or order & (order - 1):
            raise ValueError(f"PAM order must be a power of two >= 2, got {order}")
        levels = _pam_levels(order)
        return cls("PAM", order, levels / np.sqrt(np.mean(levels**2)))

    @classmethod
    def qam(cls, order: int) -> "Constellation":
        side = int(round(np.sqrt(order)))
        if order < 4 or side * side != order or side & (side - 1):
            raise ValueError(
                f"Only square QAM is supported, order must be 4**k, got {order}"
            )
        axis = _pam_levels(side)
        k = side.bit_length() - 1
        labels = np.arange(order)
        # high bits pick the in-phase level, low bits the quadrature level
        points = axis[labels >> k] + 1j * axis[labels & (side - 1)]
        return cls("QAM", order, points / np.sqrt(np.mean(np.abs(points) ** 2)))

    def draw(self, rng: np.random.Generator, count: int) -> NDArray:
        return self.points[rng.integers(0, self.order, size=count)]
