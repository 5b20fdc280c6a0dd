"""Sum-variance inseparability criteria for three-mode states.

Three inequalities, each bounded below by 1 for states separable across
the corresponding mode splitting:

    I.    Var(x1 - x2) + Var(p1 + p2 + g3 p3) >= 1
    II.   Var(x2 - x3) + Var(g1 p1 + p2 + p3) >= 1
    III.  Var(x3 - x1) + Var(p1 + g2 p2 + p3) >= 1

The gains g_i are arbitrary real parameters. Violating at least two of the
three certifies full inseparability; the criteria are sufficient only, so
a non-violation never proves separability and the verdict is then merely
"undetermined". Violation is the strict comparison lhs < 1; statistical
uncertainty belongs to reporting, not to the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gaussian import GaussianState, QuadCombination, combination_variance

__all__ = [
    "FULLY_INSEPARABLE",
    "UNDETERMINED",
    "GainSet",
    "UNIT_GAINS",
    "CriteriaReport",
    "OptimalGain",
    "x_difference",
    "momentum_sum",
    "inequality_combinations",
    "evaluate_criteria",
    "optimal_gain",
    "numeric_optimal_gain",
    "optimal_gain_set",
    "noise_db",
    "db_to_variance",
]

FULLY_INSEPARABLE = "fully-inseparable"
UNDETERMINED = "undetermined"

# Inequality k: (modes of the position difference, mode carrying the gain).
_INEQUALITIES = (
    ((0, 1), 2),  # I
    ((1, 2), 0),  # II
    ((2, 0), 1),  # III
)

_DEGENERATE_QUADRATIC = 1e-14


@dataclass(frozen=True)
class GainSet:
    """Momentum gains; g1 enters inequality II, g2 III, and g3 I."""

    g1: float
    g2: float
    g3: float

    def __post_init__(self) -> None:
        for g in (self.g1, self.g2, self.g3):
            if not np.isfinite(g):
                raise ValueError("gains must be finite")
        object.__setattr__(self, "g1", float(self.g1))
        object.__setattr__(self, "g2", float(self.g2))
        object.__setattr__(self, "g3", float(self.g3))

    def gain_for(self, which: int) -> float:
        """Gain entering inequality ``which`` (1, 2 or 3)."""
        return (self.g3, self.g1, self.g2)[_check_which(which) - 1]


UNIT_GAINS = GainSet(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class CriteriaReport:
    """Left-hand sides, gains, violation flags and the resulting verdict."""

    lhs_I: float
    lhs_II: float
    lhs_III: float
    gains: GainSet
    violated: tuple[bool, bool, bool]
    verdict: str

    @property
    def lhs(self) -> tuple[float, float, float]:
        return (self.lhs_I, self.lhs_II, self.lhs_III)


class OptimalGain(NamedTuple):
    gain: float
    degenerate: bool


def _check_which(which: int) -> int:
    if which not in (1, 2, 3):
        raise ValueError("inequality index must be 1, 2 or 3")
    return which


def x_difference(which: int) -> QuadCombination:
    """Position difference entering inequality ``which``: x_i - x_j."""
    (i, j), _ = _INEQUALITIES[_check_which(which) - 1]
    return QuadCombination.from_quadratures(3, x={i: 1.0, j: -1.0})


def momentum_sum(which: int, gains: GainSet = UNIT_GAINS) -> QuadCombination:
    """Gained momentum sum entering inequality ``which``."""
    _, gained = _INEQUALITIES[_check_which(which) - 1]
    weights = {mode: 1.0 for mode in range(3)}
    weights[gained] = gains.gain_for(which)
    return QuadCombination.from_quadratures(3, p=weights)


def inequality_combinations(
    which: int, gains: GainSet = UNIT_GAINS
) -> tuple[QuadCombination, QuadCombination]:
    """The (position difference, momentum sum) pair of one inequality."""
    return x_difference(which), momentum_sum(which, gains)


def evaluate_criteria(state: GaussianState, gains: GainSet = UNIT_GAINS) -> CriteriaReport:
    """Evaluate the three inequalities and render the verdict.

    Each left-hand side is the sum of the two combination variances; the
    verdict is fully-inseparable iff at least two strict violations hold.
    """
    if state.n_modes != 3:
        raise ValueError("criteria are defined for 3-mode states")
    lhs = tuple(
        combination_variance(state, x_difference(k))
        + combination_variance(state, momentum_sum(k, gains))
        for k in (1, 2, 3)
    )
    violated = tuple(value < 1.0 for value in lhs)
    verdict = FULLY_INSEPARABLE if sum(violated) >= 2 else UNDETERMINED
    return CriteriaReport(lhs[0], lhs[1], lhs[2], gains, violated, verdict)


def optimal_gain(r1: float, r2: float) -> float:
    """Closed-form gain minimizing a left-hand side in the symmetric case.

    Valid when the two position-squeezed inputs share the same squeezing
    (r2 = r3), which makes the state totally symmetric and the optimum
    independent of the inequality:

        g = (e^{2 r2} - e^{-2 r1}) / (e^{2 r2} + e^{-2 r1} / 2)

    Zero at r1 = r2 = 0 and approaching 1 for large squeezing.
    """
    if not (np.isfinite(r1) and np.isfinite(r2)):
        raise ValueError("squeezing parameters must be finite")
    up = math.exp(2.0 * r2)
    down = math.exp(-2.0 * r1)
    return (up - down) / (up + 0.5 * down)


def _golden_section(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def numeric_optimal_gain(state: GaussianState, which: int) -> OptimalGain:
    """Gain minimizing one inequality's left-hand side on an arbitrary state.

    The left-hand side is quadratic in the gain g, ``a g^2 + b g + const``
    with ``a = Var(p_gained)`` and ``b`` twice the covariance between the
    gained momentum and the rest of the sum, so the minimizer is
    ``-b / (2 a)``. If the quadratic coefficient is numerically degenerate
    (below 1e-14) a golden-section search takes over, or 0 is returned with
    the degenerate flag when the left-hand side does not depend on g at all.
    """
    if state.n_modes != 3:
        raise ValueError("criteria are defined for 3-mode states")
    _, gained = _INEQUALITIES[_check_which(which) - 1]
    unit = np.zeros(6)
    unit[2 * gained + 1] = 1.0
    rest = momentum_sum(which, GainSet(0.0, 0.0, 0.0)).coeffs
    quad = float(unit @ state.cov @ unit)
    lin = 2.0 * float(unit @ state.cov @ rest)
    if quad >= _DEGENERATE_QUADRATIC:
        return OptimalGain(-lin / (2.0 * quad), False)
    if abs(lin) < _DEGENERATE_QUADRATIC:
        return OptimalGain(0.0, True)
    gain = _golden_section(lambda g: quad * g * g + lin * g, -100.0, 100.0)
    return OptimalGain(gain, True)


def optimal_gain_set(state: GaussianState) -> GainSet:
    """Numerically optimal gains for all three inequalities at once."""
    return GainSet(
        g1=numeric_optimal_gain(state, 2).gain,
        g2=numeric_optimal_gain(state, 3).gain,
        g3=numeric_optimal_gain(state, 1).gain,
    )


def noise_db(variance: float, reference: float) -> float:
    """Noise power in dB relative to a reference variance: 10 log10(v/ref)."""
    if not (np.isfinite(reference) and reference > 0.0):
        raise ValueError("reference must be positive")
    if not (np.isfinite(variance) and variance >= 0.0):
        raise ValueError("variance must be >= 0")
    if variance == 0.0:
        return float("-inf")
    return 10.0 * math.log10(variance / reference)


def db_to_variance(db: float, reference: float) -> float:
    """Inverse of :func:`noise_db`: ref * 10^(db/10)."""
    if not (np.isfinite(reference) and reference > 0.0):
        raise ValueError("reference must be positive")
    if math.isnan(db):
        raise ValueError("db must not be NaN")
    return reference * 10.0 ** (db / 10.0)
