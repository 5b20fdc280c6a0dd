"""The tritter network generating the approximate CV GHZ state.

One momentum-squeezed and two position-squeezed vacua are mixed on two
beam splitters, first T = 1/3 between modes 1 and 2, then T = 1/2 between
modes 2 and 3. In the infinite-squeezing limit the output approaches the
CV GHZ state with zero relative positions and zero total momentum.

:func:`closed_form_ghz_covariance` transcribes the Heisenberg-picture
output quadratures of the lossless network directly:

    x1 = (1/sqrt3) e^{+r1} x1_0 + sqrt(2/3) e^{-r2} x2_0
    x2 = (1/sqrt3) e^{+r1} x1_0 - (1/sqrt6) e^{-r2} x2_0 + (1/sqrt2) e^{-r3} x3_0
    x3 = (1/sqrt3) e^{+r1} x1_0 - (1/sqrt6) e^{-r2} x2_0 - (1/sqrt2) e^{-r3} x3_0

with each p line carrying the same weights and inverted exponents. It is
computed without the beam-splitter matrices on purpose, as an independent
cross-check of :func:`ghz_state`; discrepancies are to be fixed in the
network construction, never in this table.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import ChannelSpec, apply_channel
from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    beamsplitter,
    squeezer,
    vacuum,
)

__all__ = ["NetworkParams", "build_tritter", "ghz_state", "closed_form_ghz_covariance"]


@dataclass(frozen=True)
class NetworkParams:
    """Squeezing parameters of the three inputs plus the output channel."""

    r1: float
    r2: float
    r3: float
    channel: ChannelSpec

    def __post_init__(self) -> None:
        for r in (self.r1, self.r2, self.r3):
            if not np.isfinite(r):
                raise ValueError("squeezing parameters must be finite")
        if self.channel.n_modes != 3:
            raise ValueError("channel must describe exactly 3 modes")
        object.__setattr__(self, "r1", float(self.r1))
        object.__setattr__(self, "r2", float(self.r2))
        object.__setattr__(self, "r3", float(self.r3))

    @classmethod
    def lossless(cls, r1: float, r2: float, r3: float) -> "NetworkParams":
        return cls(r1, r2, r3, ChannelSpec.lossless(3))


@lru_cache(maxsize=1)
def build_tritter() -> SymplecticTransform:
    """The two-beam-splitter network B_23(pi/4) B_12(arccos(1/sqrt3))."""
    first = beamsplitter(3, 0, 1, np.arccos(1.0 / np.sqrt(3.0)))
    second = beamsplitter(3, 1, 2, np.pi / 4.0)
    return second @ first


def ghz_state(params: NetworkParams) -> GaussianState:
    """Tritter output for finite squeezing, degraded by the channel.

    Mode 1 is squeezed in momentum (squeezer with -r1) and modes 2 and 3 in
    position; per-mode loss and phase jitter act on the output modes.
    """
    squeeze = (
        squeezer(3, 0, -params.r1)
        @ squeezer(3, 1, params.r2)
        @ squeezer(3, 2, params.r3)
    )
    state = apply(vacuum(3), build_tritter() @ squeeze)
    return apply_channel(state, params.channel)


def closed_form_ghz_covariance(r1: float, r2: float, r3: float) -> np.ndarray:
    """Lossless output covariance from the Heisenberg-picture coefficients.

    Returns the 6x6 matrix M (I/4) M^T where M maps the input quadratures
    (x1_0, p1_0, x2_0, p2_0, x3_0, p3_0) to the output ones.
    """
    for r in (r1, r2, r3):
        if not np.isfinite(r):
            raise ValueError("squeezing parameters must be finite")
    a = 1.0 / np.sqrt(3.0)
    b = np.sqrt(2.0 / 3.0)
    c = 1.0 / np.sqrt(6.0)
    d = 1.0 / np.sqrt(2.0)
    e1p, e1m = np.exp(r1), np.exp(-r1)
    e2p, e2m = np.exp(r2), np.exp(-r2)
    e3p, e3m = np.exp(r3), np.exp(-r3)
    m = np.array(
        [
            [a * e1p, 0, b * e2m, 0, 0, 0],
            [0, a * e1m, 0, b * e2p, 0, 0],
            [a * e1p, 0, -c * e2m, 0, d * e3m, 0],
            [0, a * e1m, 0, -c * e2p, 0, d * e3p],
            [a * e1p, 0, -c * e2m, 0, -d * e3m, 0],
            [0, a * e1m, 0, -c * e2p, 0, -d * e3p],
        ]
    )
    return 0.25 * (m @ m.T)
