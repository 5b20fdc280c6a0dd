"""Fit effective network parameters to measured noise levels.

Targets are dB values relative to the matching vacuum reference: 1/4 for a
single quadrature, 1/2 for a pairwise position difference, 3/4 for the
momentum triple sum. The loss is a weighted mean-square error in dB space
so loud antisqueezed quadratures and quiet squeezed ones count evenly;
weights default to 1 / uncertainty^2 where a measurement carries an
uncertainty and to 1 otherwise.

The optimizer is a deterministic multi-start Nelder-Mead simplex within
box bounds. Each restart cycle polishes the incumbent best point and tries
fresh seeded starts; the fit converges when a full cycle improves the
residual by less than 1e-8 dB, and stops early when the evaluation budget
runs out. Identical (targets, bounds, budget, seed) always give identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.optimize import minimize

from .channels import ChannelSpec
from .criteria import momentum_sum, noise_db, x_difference
from .gaussian import (
    VACUUM_VARIANCE,
    QuadCombination,
    check_physicality,
    combination_variance,
    vacuum_reference,
)
from .network import NetworkParams, ghz_state

__all__ = [
    "COMBINATION_TARGETS",
    "SINGLE_MODE_TARGETS",
    "ALL_TARGET_NAMES",
    "FitTargets",
    "SearchSpace",
    "FitResult",
    "predict_targets",
    "fit",
]

_CONVERGENCE_IMPROVEMENT = 1e-8
_STARTS_PER_CYCLE = 5
_MAXFEV_PER_START = 2000

COMBINATION_TARGETS: dict[str, QuadCombination] = {
    "x1-x2": x_difference(1),
    "x2-x3": x_difference(2),
    "x3-x1": x_difference(3),
    "p1+p2+p3": momentum_sum(1),
}

SINGLE_MODE_TARGETS = tuple(
    f"mode{m}_{kind}" for m in (1, 2, 3) for kind in ("min", "max")
)

ALL_TARGET_NAMES = SINGLE_MODE_TARGETS + tuple(COMBINATION_TARGETS)


@dataclass(frozen=True)
class FitTargets:
    """Measured dB levels to reproduce, with optional uncertainties.

    ``single_mode_db`` maps a 0-based mode index to its (min, max) noise
    levels over the two quadratures; ``combination_db`` maps a canonical
    combination name to its level. ``uncertainties`` and ``weights`` are
    keyed by target name (``mode1_min`` ... ``p1+p2+p3``); missing weights
    are filled in from the uncertainties as described in the module
    docstring.
    """

    single_mode_db: Mapping[int, tuple[float, float]] = field(default_factory=dict)
    combination_db: Mapping[str, float] = field(default_factory=dict)
    uncertainties: Mapping[str, float] = field(default_factory=dict)
    weights: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        single = {int(m): (float(lo), float(hi)) for m, (lo, hi) in self.single_mode_db.items()}
        if any(m not in (0, 1, 2) for m in single):
            raise ValueError("single-mode targets must use mode indices 0..2")
        combos = {str(k): float(v) for k, v in self.combination_db.items()}
        unknown = set(combos) - set(COMBINATION_TARGETS)
        if unknown:
            raise ValueError(f"unknown combination target(s): {sorted(unknown)}")
        if not single and not combos:
            raise ValueError("at least one target is required")
        names = self._names_from(single, combos)
        unc = {str(k): float(v) for k, v in self.uncertainties.items()}
        if set(unc) - set(names):
            raise ValueError("uncertainty given for a target that is not present")
        if any(u <= 0 for u in unc.values()):
            raise ValueError("uncertainties must be positive")
        if self.weights is None:
            weights = {n: (1.0 / unc[n] ** 2 if n in unc else 1.0) for n in names}
        else:
            weights = {str(k): float(v) for k, v in self.weights.items()}
            if set(weights) != set(names):
                raise ValueError("weights must be keyed exactly by the target names")
            if any(w < 0 for w in weights.values()):
                raise ValueError("weights must be >= 0")
            if all(w == 0 for w in weights.values()):
                raise ValueError("weights must not all be zero")
        object.__setattr__(self, "single_mode_db", single)
        object.__setattr__(self, "combination_db", combos)
        object.__setattr__(self, "uncertainties", unc)
        object.__setattr__(self, "weights", weights)

    @staticmethod
    def _names_from(single: dict, combos: dict) -> tuple[str, ...]:
        names = [
            f"mode{m + 1}_{kind}"
            for m in sorted(single)
            for kind in ("min", "max")
        ]
        names.extend(n for n in COMBINATION_TARGETS if n in combos)
        return tuple(names)

    @property
    def target_names(self) -> tuple[str, ...]:
        return self._names_from(dict(self.single_mode_db), dict(self.combination_db))

    def value(self, name: str) -> float:
        if name in COMBINATION_TARGETS:
            return self.combination_db[name]
        mode, kind = name[4:].split("_")
        return self.single_mode_db[int(mode) - 1][0 if kind == "min" else 1]


@dataclass(frozen=True)
class SearchSpace:
    """Box bounds for the fitted parameters.

    Squeezing and efficiency are fitted per mode; phase jitter is fitted
    per mode as well when ``sigma_bounds`` is set and pinned to zero when
    it is None. The defaults cover realistic experimental ranges and are
    configuration, not truth.
    """

    r_bounds: tuple[float, float] = (0.0, 2.0)
    eta_bounds: tuple[float, float] = (0.5, 1.0)
    sigma_bounds: tuple[float, float] | None = (0.0, 0.3)

    def __post_init__(self) -> None:
        for name, bounds in (("r", self.r_bounds), ("eta", self.eta_bounds), ("sigma", self.sigma_bounds)):
            if bounds is None:
                continue
            lo, hi = float(bounds[0]), float(bounds[1])
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
                raise ValueError(f"infeasible {name} bounds: {bounds}")
        if not (0.0 <= self.eta_bounds[0] and self.eta_bounds[1] <= 1.0):
            raise ValueError("eta bounds must stay within [0, 1]")
        if self.sigma_bounds is not None and self.sigma_bounds[0] < 0.0:
            raise ValueError("sigma bounds must be >= 0")

    @property
    def dimension(self) -> int:
        return 6 if self.sigma_bounds is None else 9

    def bounds_list(self) -> list[tuple[float, float]]:
        bounds = [self.r_bounds] * 3 + [self.eta_bounds] * 3
        if self.sigma_bounds is not None:
            bounds += [self.sigma_bounds] * 3
        return bounds

    def to_params(self, vector: np.ndarray) -> NetworkParams:
        sigmas = tuple(vector[6:9]) if self.sigma_bounds is not None else (0.0, 0.0, 0.0)
        channel = ChannelSpec(efficiency=tuple(vector[3:6]), phase_sigma=sigmas)
        return NetworkParams(vector[0], vector[1], vector[2], channel)


@dataclass(frozen=True)
class FitResult:
    """Best parameters found, with residual bookkeeping.

    ``residual`` is the root weighted mean square error in dB and
    ``per_target_residuals`` maps each target to predicted minus measured.
    """

    params: NetworkParams
    residual: float
    per_target_residuals: Mapping[str, float]
    converged: bool
    evaluations: int


def predict_targets(
    params: NetworkParams, targets: FitTargets | None = None
) -> dict[str, float]:
    """Predicted dB level for each target name (all targets when None)."""
    state = ghz_state(params)
    names = targets.target_names if targets is not None else ALL_TARGET_NAMES
    out: dict[str, float] = {}
    for name in names:
        if name in COMBINATION_TARGETS:
            combination = COMBINATION_TARGETS[name]
            variance = combination_variance(state, combination)
            out[name] = noise_db(variance, vacuum_reference(combination))
        else:
            mode = int(name[4]) - 1
            vx, vp = state.mode_variances(mode)
            variance = min(vx, vp) if name.endswith("min") else max(vx, vp)
            out[name] = noise_db(variance, VACUUM_VARIANCE)
    return out


def _weighted_mse(targets: FitTargets, predicted: Mapping[str, float]) -> float:
    total = sum(targets.weights.values())
    acc = 0.0
    for name in targets.target_names:
        acc += targets.weights[name] * (predicted[name] - targets.value(name)) ** 2
    return acc / total


class _BudgetExhausted(Exception):
    pass


def fit(
    targets: FitTargets,
    search_space: SearchSpace | None = None,
    budget: int = 20000,
    seed: int = 0,
) -> FitResult:
    """Minimize the weighted dB residual over the network parameters.

    ``budget`` caps the number of objective evaluations; the first start
    (the center of the bounds) is always evaluated so that a result exists
    even at budget 0, which returns that initial guess unconverged.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    space = search_space if search_space is not None else SearchSpace()
    bounds = space.bounds_list()
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    evaluations = 0
    best_f = np.inf
    best_x = 0.5 * (lo + hi)

    def evaluate(vector: np.ndarray) -> float:
        # All bookkeeping lives here, so the reported best is <= every
        # candidate ever evaluated regardless of what the local search does.
        nonlocal evaluations, best_f, best_x
        evaluations += 1
        clipped = np.clip(vector, lo, hi)
        value = _weighted_mse(targets, predict_targets(space.to_params(clipped), targets))
        if value < best_f:
            best_f = value
            best_x = clipped
        return value

    def guarded(vector: np.ndarray) -> float:
        if evaluations >= budget:
            raise _BudgetExhausted
        return evaluate(vector)

    evaluate(best_x)

    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    converged = False
    while evaluations < budget and not converged:
        cycle_start_f = best_f
        starts = [best_x] + [rng.uniform(lo, hi) for _ in range(_STARTS_PER_CYCLE - 1)]
        exhausted = False
        for x0 in starts:
            remaining = budget - evaluations
            if remaining <= 0:
                exhausted = True
                break
            try:
                minimize(
                    guarded,
                    x0,
                    method="Nelder-Mead",
                    bounds=bounds,
                    options={
                        "maxfev": min(_MAXFEV_PER_START, remaining),
                        "xatol": 1e-10,
                        "fatol": 1e-14,
                    },
                )
            except _BudgetExhausted:
                exhausted = True
                break
        if not exhausted and np.sqrt(cycle_start_f) - np.sqrt(best_f) < _CONVERGENCE_IMPROVEMENT:
            converged = True

    params = space.to_params(best_x)
    if not check_physicality(ghz_state(params)).ok:
        raise RuntimeError("fit produced an unphysical state")  # unreachable for valid bounds
    predicted = predict_targets(params, targets)
    residuals = {
        name: predicted[name] - targets.value(name) for name in targets.target_names
    }
    return FitResult(
        params=params,
        residual=float(np.sqrt(_weighted_mse(targets, predicted))),
        per_target_residuals=residuals,
        converged=converged,
        evaluations=evaluations,
    )
