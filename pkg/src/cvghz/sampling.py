"""Homodyne-record simulation: seeded sampling of quadrature combinations.

A measured combination is one scalar per shot, normally distributed with
the analytic mean and variance of the linear form, which is exactly what a
spectrum analyzer integrating the subtracted or summed photocurrents sees
for a Gaussian state. Spectral shape is deliberately not modeled; all
reported numbers are variances relative to vacuum references and those are
fully captured by the covariance matrix.

Reproducibility contract: all draws come from ``numpy.random.default_rng``
(the PCG64 bit generator). Seeds are taken modulo 2^64. Run k of a series
uses the derived seed ``splitmix64(master + (k + 1) * GOLDEN_GAMMA)``, and
combination i inside that run derives its own stream the same way from the
run seed, so results are independent of evaluation order and worker count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .gaussian import GaussianState, QuadCombination, combination_variance

__all__ = [
    "GOLDEN_GAMMA",
    "SampleBatch",
    "VarianceEstimate",
    "MeasurementSeries",
    "derive_seed",
    "sample_combination",
    "estimate_variance",
    "measurement_series",
    "format_combination",
    "state_digest",
    "write_batch_csv",
]

_MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed of sub-stream ``index``: splitmix64 of master + (index+1) * gamma."""
    if index < 0:
        raise ValueError("index must be >= 0")
    return _splitmix64((master_seed + (index + 1) * GOLDEN_GAMMA) & _MASK64)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """A block of combination outcomes, reproducible from (seed, n)."""

    values: np.ndarray
    seed: int
    n: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        if values.ndim != 1 or len(values) != self.n:
            raise ValueError("n must equal the number of values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "n", int(self.n))


class VarianceEstimate(NamedTuple):
    variance: float
    standard_error: float


@dataclass(frozen=True, eq=False)
class MeasurementSeries:
    """Per-run variance estimates for several combinations.

    ``estimates[k, i]`` is run k's estimate for combination i, with the
    matching standard error in ``standard_errors``; ``mean`` and ``sd`` are
    the across-run summary (sample standard deviation, ddof = 1).
    """

    names: tuple[str, ...]
    estimates: np.ndarray
    standard_errors: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    n_per_run: int
    runs: int
    seed: int


def _check_commuting(combination: QuadCombination) -> None:
    mixed = (combination.x_weights != 0.0) & (combination.p_weights != 0.0)
    if np.any(mixed):
        modes = ", ".join(str(m + 1) for m in np.flatnonzero(mixed))
        raise ValueError(
            f"combination mixes x and p on mode(s) {modes}; each mode is read "
            "by one homodyne detector at a single phase"
        )


def sample_combination(
    state: GaussianState, combination: QuadCombination, n: int, seed: int
) -> SampleBatch:
    """Draw n independent outcomes of a quadrature combination.

    The combination must select, per mode, quadratures from one commuting
    set: a mode may contribute x or p, never both.
    """
    if state.n_modes != combination.n_modes:
        raise ValueError("state and combination act on different mode counts")
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_commuting(combination)
    mean = float(combination.coeffs @ state.mean)
    sd = np.sqrt(max(combination_variance(state, combination), 0.0))
    rng = np.random.default_rng(int(seed) & _MASK64)
    values = mean + sd * rng.standard_normal(n)
    return SampleBatch(values=values, seed=int(seed), n=int(n))


def estimate_variance(batch: SampleBatch) -> VarianceEstimate:
    """Unbiased sample variance with its Gaussian-case standard error.

    For normal samples the variance estimator has standard deviation
    ``variance * sqrt(2 / (n - 1))``.
    """
    if batch.n < 2:
        raise ValueError("variance needs at least 2 samples")
    variance = float(np.var(batch.values, ddof=1))
    return VarianceEstimate(variance, variance * np.sqrt(2.0 / (batch.n - 1)))


def measurement_series(
    state: GaussianState,
    combinations: Sequence[QuadCombination],
    n_per_run: int,
    runs: int,
    seed: int,
) -> MeasurementSeries:
    """Repeat the measurement of several combinations over independent runs."""
    if runs < 2:
        raise ValueError("runs must be >= 2")
    if not combinations:
        raise ValueError("at least one combination is required")
    names = tuple(format_combination(c) for c in combinations)
    estimates = np.empty((runs, len(combinations)))
    errors = np.empty_like(estimates)
    for k in range(runs):
        run_seed = derive_seed(seed, k)
        for i, combination in enumerate(combinations):
            batch = sample_combination(state, combination, n_per_run, derive_seed(run_seed, i))
            estimates[k, i], errors[k, i] = estimate_variance(batch)
    estimates.setflags(write=False)
    errors.setflags(write=False)
    mean = estimates.mean(axis=0)
    sd = estimates.std(axis=0, ddof=1)
    mean.setflags(write=False)
    sd.setflags(write=False)
    return MeasurementSeries(
        names=names,
        estimates=estimates,
        standard_errors=errors,
        mean=mean,
        sd=sd,
        n_per_run=int(n_per_run),
        runs=int(runs),
        seed=int(seed),
    )


def format_combination(combination: QuadCombination) -> str:
    """Canonical name of a combination, e.g. ``x1-x2`` or ``p1+p2+0.8*p3``."""
    parts: list[str] = []
    for mode in range(combination.n_modes):
        for offset, symbol in ((0, "x"), (1, "p")):
            weight = float(combination.coeffs[2 * mode + offset])
            if weight == 0.0:
                continue
            sign = "-" if weight < 0.0 else "+"
            magnitude = abs(weight)
            term = f"{symbol}{mode + 1}"
            if magnitude != 1.0:
                term = f"{magnitude:.6g}*{term}"
            parts.append(f"{sign}{term}")
    if not parts:
        return "0"
    head = parts[0][1:] if parts[0][0] == "+" else parts[0]
    return head + "".join(parts[1:])


def state_digest(state: GaussianState) -> str:
    """Short stable hash of a state's mode count, mean and covariance."""
    h = hashlib.sha256()
    h.update(b"gaussian-state-v1")
    h.update(state.n_modes.to_bytes(4, "little"))
    h.update(np.ascontiguousarray(state.mean).tobytes())
    h.update(np.ascontiguousarray(state.cov).tobytes())
    return h.hexdigest()[:16]


def write_batch_csv(
    out: IO[str],
    batch: SampleBatch,
    state: GaussianState,
    combination: QuadCombination,
) -> None:
    """Write a batch as single-column CSV with a provenance comment line."""
    out.write(
        f"# state={state_digest(state)} combination={format_combination(combination)} "
        f"n={batch.n} seed={batch.seed}\n"
    )
    out.write("value\n")
    for value in batch.values:
        out.write(f"{value:.17g}\n")
