"""Optical degradation channels: loss and residual phase jitter.

Loss with efficiency eta is the usual beam-splitter coupling to a vacuum
ancilla, written in closed form on the covariance matrix. Phase jitter
models imperfect phase locking as an independent zero-mean Gaussian angle
per mode and tracks the second moments of the resulting ensemble; the
averaged matrix stays a valid covariance matrix because the physical set
is convex, but the true ensemble is a non-Gaussian mixture.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import VACUUM_VARIANCE, GaussianState, _check_mode

__all__ = [
    "ChannelSpec",
    "loss",
    "phase_jitter",
    "visibility_to_efficiency",
    "apply_channel",
]


@dataclass(frozen=True)
class ChannelSpec:
    """Per-mode efficiencies and phase-jitter widths (radians)."""

    efficiency: tuple[float, ...]
    phase_sigma: tuple[float, ...]

    def __post_init__(self) -> None:
        eff = tuple(float(e) for e in self.efficiency)
        sig = tuple(float(s) for s in self.phase_sigma)
        if len(eff) != len(sig) or not eff:
            raise ValueError("efficiency and phase_sigma must list the same modes")
        if any(not 0.0 <= e <= 1.0 for e in eff):
            raise ValueError("every efficiency must lie in [0, 1]")
        if any(not (np.isfinite(s) and s >= 0.0) for s in sig):
            raise ValueError("every phase sigma must be finite and >= 0")
        object.__setattr__(self, "efficiency", eff)
        object.__setattr__(self, "phase_sigma", sig)

    @classmethod
    def lossless(cls, n_modes: int) -> "ChannelSpec":
        return cls((1.0,) * n_modes, (0.0,) * n_modes)

    @property
    def n_modes(self) -> int:
        return len(self.efficiency)


def loss(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Pure loss on one mode: V -> X V X^T + Y with X = sqrt(eta) on the mode.

    The target 2x2 block maps to ``eta * V_mm + (1 - eta)/4 * I``, cross
    blocks scale by sqrt(eta), and the mode's mean scales by sqrt(eta);
    identical to mixing with vacuum on a beam splitter of transmittance eta
    and discarding the ancilla.
    """
    _check_mode(state.n_modes, mode)
    if not (np.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise ValueError("eta must lie in [0, 1]")
    dim = 2 * state.n_modes
    scale = np.ones(dim)
    scale[2 * mode : 2 * mode + 2] = np.sqrt(eta)
    cov = state.cov * np.outer(scale, scale)
    noise = np.zeros(dim)
    noise[2 * mode : 2 * mode + 2] = (1.0 - eta) * VACUUM_VARIANCE
    cov = cov + np.diag(noise)
    return GaussianState(state.n_modes, scale * state.mean, cov)


def phase_jitter(state: GaussianState, mode: int, sigma: float) -> GaussianState:
    """Average one mode over a rotation angle drawn from Normal(0, sigma^2).

    Gaussian moments give E[cos 2t] = exp(-2 sigma^2) and
    E[cos t] = exp(-sigma^2 / 2) with the sine moments vanishing, so the
    jittered 2x2 block keeps its trace while its traceless part shrinks by
    exp(-2 sigma^2), cross blocks to other modes shrink by
    exp(-sigma^2 / 2), and the mode's mean shrinks by the same factor.
    """
    _check_mode(state.n_modes, mode)
    if not (np.isfinite(sigma) and sigma >= 0.0):
        raise ValueError("sigma must be finite and >= 0")
    c_cross = np.exp(-0.5 * sigma**2)
    c_block = np.exp(-2.0 * sigma**2)
    dim = 2 * state.n_modes
    scale = np.ones(dim)
    scale[2 * mode : 2 * mode + 2] = c_cross
    cov = state.cov * np.outer(scale, scale)

    block = state.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]
    isotropic = 0.5 * np.trace(block) * np.eye(2)
    cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = (
        isotropic + c_block * (block - isotropic)
    )
    return GaussianState(state.n_modes, scale * state.mean, cov)


def visibility_to_efficiency(visibility: float) -> float:
    """Effective efficiency of an interference with the given visibility: v^2."""
    if not (np.isfinite(visibility) and 0.0 <= visibility <= 1.0):
        raise ValueError("visibility must lie in [0, 1]")
    return visibility * visibility


def apply_channel(state: GaussianState, spec: ChannelSpec) -> GaussianState:
    """Apply per-mode loss, then per-mode phase jitter.

    Loss and jitter on the same mode commute, so the order is a convention.
    """
    if spec.n_modes != state.n_modes:
        raise ValueError("channel and state act on different mode counts")
    for mode, eta in enumerate(spec.efficiency):
        if eta != 1.0:
            state = loss(state, mode, eta)
    for mode, sigma in enumerate(spec.phase_sigma):
        if sigma != 0.0:
            state = phase_jitter(state, mode, sigma)
    return state
