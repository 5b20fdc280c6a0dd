"""Shared helpers: random physical states and the independent channel oracles."""

from __future__ import annotations

import numpy as np

from cvghz import (
    GaussianState,
    apply,
    beamsplitter,
    loss,
    phase_rotation,
    squeezer,
    vacuum,
)


def random_physical_state(
    rng: np.random.Generator,
    n_modes: int = 3,
    n_ops: int = 6,
    mixed: bool = True,
    with_mean: bool = True,
) -> GaussianState:
    """A random physical state built from a random Gaussian circuit."""
    state = vacuum(n_modes)
    for _ in range(n_ops):
        kind = int(rng.integers(0, 3))
        if kind == 0:
            state = apply(
                state,
                squeezer(n_modes, int(rng.integers(n_modes)), float(rng.uniform(-1.2, 1.2))),
            )
        elif kind == 1 and n_modes > 1:
            i, j = (int(v) for v in rng.choice(n_modes, size=2, replace=False))
            state = apply(state, beamsplitter(n_modes, i, j, float(rng.uniform(0, 2 * np.pi))))
        else:
            state = apply(
                state,
                phase_rotation(n_modes, int(rng.integers(n_modes)), float(rng.uniform(0, 2 * np.pi))),
            )
    if mixed:
        state = loss(state, int(rng.integers(n_modes)), float(rng.uniform(0.3, 1.0)))
    if with_mean:
        state = GaussianState(n_modes, rng.normal(0.0, 0.5, 2 * n_modes), state.cov)
    return state


def loss_via_ancilla(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Loss as a beam splitter onto an appended vacuum ancilla, then discard."""
    n = state.n_modes
    dim = 2 * n
    big_cov = np.zeros((dim + 2, dim + 2))
    big_cov[:dim, :dim] = state.cov
    big_cov[dim:, dim:] = 0.25 * np.eye(2)
    big_mean = np.concatenate([state.mean, [0.0, 0.0]])
    big = GaussianState(n + 1, big_mean, big_cov)
    mixed = apply(big, beamsplitter(n + 1, mode, n, np.arccos(np.sqrt(eta))))
    return GaussianState(n, mixed.mean[:dim], mixed.cov[:dim, :dim])


def mc_phase_jitter_cov(
    state: GaussianState,
    mode: int,
    sigma: float,
    draws: int = 1_000_000,
    seed: int = 0,
    chunk: int = 100_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo rotation averaging of the covariance: (mean, standard error).

    Averages R(theta) V R(theta)^T over theta ~ Normal(0, sigma^2) by brute
    force, independently of the closed-form moment average.
    """
    rng = np.random.default_rng(seed)
    dim = 2 * state.n_modes
    cov = state.cov
    total = np.zeros((dim, dim))
    total_sq = np.zeros((dim, dim))
    done = 0
    eye = np.eye(dim)
    while done < draws:
        m = min(chunk, draws - done)
        thetas = rng.normal(0.0, sigma, m)
        c, s = np.cos(thetas), np.sin(thetas)
        rot = np.broadcast_to(eye, (m, dim, dim)).copy()
        rot[:, 2 * mode, 2 * mode] = c
        rot[:, 2 * mode, 2 * mode + 1] = s
        rot[:, 2 * mode + 1, 2 * mode] = -s
        rot[:, 2 * mode + 1, 2 * mode + 1] = c
        rotated = np.einsum("kij,jl,kml->kim", rot, cov, rot)
        total += rotated.sum(axis=0)
        total_sq += (rotated**2).sum(axis=0)
        done += m
    mean = total / draws
    variance = np.maximum(total_sq / draws - mean**2, 0.0)
    return mean, np.sqrt(variance / draws)
