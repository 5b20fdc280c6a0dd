"""Multimode Gaussian states and symplectic transforms.

Conventions used throughout the package:

* units-free quadratures with hbar = 1/2, so every vacuum quadrature has
  variance 1/4 and ``[x, p] = i/2``;
* quadratures are ordered mode by mode, ``(x1, p1, x2, p2, ...)``, which
  keeps each mode's 2x2 block contiguous for channel maps;
* a covariance matrix V is physical iff the Hermitian matrix
  ``V + (i/4) * Omega`` is positive semidefinite, with Omega the
  symplectic form in the ordering above.

All values are immutable after construction and safe to share between
threads; every operation is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "GaussianState",
    "SymplecticTransform",
    "QuadCombination",
    "PhysicalityReport",
    "symplectic_form",
    "vacuum",
    "squeezer",
    "beamsplitter",
    "phase_rotation",
    "apply",
    "combination_variance",
    "vacuum_reference",
    "check_physicality",
]

VACUUM_VARIANCE = 0.25


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every validity check in the package."""

    symmetry: float = 1e-12
    symplectic: float = 1e-10
    uncertainty: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form Omega for the mode-interleaved quadrature ordering."""
    if n_modes < 1:
        raise ValueError("n_modes must be a positive integer")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _frozen_array(values, shape, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{what} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an n-mode Gaussian state.

    The covariance matrix is symmetrized on construction ((V + V^T)/2) to
    stop round-off drift; inputs asymmetric beyond the symmetry tolerance
    are rejected. The uncertainty relation is deliberately not enforced
    here so that diagnostic checks can be run on unphysical matrices; use
    :func:`check_physicality`.
    """

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_modes, (int, np.integer)) or self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        dim = 2 * self.n_modes
        mean = _frozen_array(self.mean, (dim,), "mean")
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (dim, dim):
            raise ValueError(f"cov must have shape {(dim, dim)}, got {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ValueError("cov must be finite")
        asymmetry = float(np.max(np.abs(cov - cov.T)))
        if asymmetry > DEFAULT_TOLERANCES.symmetry:
            raise ValueError(f"cov is not symmetric (max asymmetry {asymmetry:.3e})")
        cov = (cov + cov.T) / 2.0
        cov.setflags(write=False)
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def mode_variances(self, mode: int) -> tuple[float, float]:
        """(x, p) variances of one mode."""
        _check_mode(self.n_modes, mode)
        return float(self.cov[2 * mode, 2 * mode]), float(self.cov[2 * mode + 1, 2 * mode + 1])


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """A 2n x 2n linear map on quadratures preserving the symplectic form.

    Construction verifies ``S Omega S^T = Omega`` elementwise to the
    symplectic tolerance, so any instance is a valid Gaussian unitary.
    """

    n_modes: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_modes, (int, np.integer)) or self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        dim = 2 * self.n_modes
        matrix = _frozen_array(self.matrix, (dim, dim), "matrix")
        omega = symplectic_form(self.n_modes)
        defect = float(np.max(np.abs(matrix @ omega @ matrix.T - omega)))
        if defect > DEFAULT_TOLERANCES.symplectic:
            raise ValueError(f"matrix is not symplectic (max defect {defect:.3e})")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "matrix", matrix)

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """Composition: ``(A @ B)`` applies B first, then A."""
        if not isinstance(other, SymplecticTransform):
            return NotImplemented
        if other.n_modes != self.n_modes:
            raise ValueError("cannot compose transforms on different mode counts")
        return SymplecticTransform(self.n_modes, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class QuadCombination:
    """Real coefficients over all quadratures defining a measured linear form.

    ``coeffs`` follows the interleaved ordering, so ``coeffs[2*m]`` weights
    x of mode m and ``coeffs[2*m + 1]`` weights p of mode m.
    """

    n_modes: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_modes, (int, np.integer)) or self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        coeffs = _frozen_array(self.coeffs, (2 * self.n_modes,), "coeffs")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_quadratures(
        cls,
        n_modes: int,
        x: dict[int, float] | None = None,
        p: dict[int, float] | None = None,
    ) -> "QuadCombination":
        """Build a combination from per-mode x and p weights (modes 0-based)."""
        coeffs = np.zeros(2 * n_modes)
        for offset, weights in ((0, x), (1, p)):
            for mode, weight in (weights or {}).items():
                _check_mode(n_modes, mode)
                coeffs[2 * mode + offset] = weight
        return cls(n_modes, coeffs)

    @property
    def x_weights(self) -> np.ndarray:
        return self.coeffs[0::2]

    @property
    def p_weights(self) -> np.ndarray:
        return self.coeffs[1::2]


@dataclass(frozen=True)
class PhysicalityReport:
    """Outcome of a physicality check with its numerical diagnostics."""

    ok: bool
    min_eigenvalue: float
    max_asymmetry: float

    def __bool__(self) -> bool:
        return self.ok


def _check_mode(n_modes: int, mode: int) -> None:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < n_modes:
        raise ValueError(f"mode must be in [0, {n_modes}), got {mode}")


def vacuum(n_modes: int) -> GaussianState:
    """The n-mode vacuum: zero mean, covariance (1/4) * Identity."""
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise ValueError("n_modes must be a positive integer")
    dim = 2 * n_modes
    return GaussianState(int(n_modes), np.zeros(dim), VACUUM_VARIANCE * np.eye(dim))


def squeezer(n_modes: int, mode: int, r: float) -> SymplecticTransform:
    """Single-mode squeezer: x -> exp(-r) x, p -> exp(+r) p on the target mode.

    Positive r squeezes position; pass a negative argument (or conjugate by
    a 90 degree rotation) for a momentum-squeezed mode.
    """
    _check_mode(n_modes, mode)
    if not np.isfinite(r):
        raise ValueError("squeezing parameter must be finite")
    matrix = np.eye(2 * n_modes)
    matrix[2 * mode, 2 * mode] = np.exp(-r)
    matrix[2 * mode + 1, 2 * mode + 1] = np.exp(r)
    return SymplecticTransform(int(n_modes), matrix)


def beamsplitter(n_modes: int, i: int, j: int, theta: float) -> SymplecticTransform:
    """Beam splitter mixing modes i and j, transmittance T = cos^2(theta).

    Acts identically on the x and p blocks:

        a_i -> a_i cos(theta) + a_j sin(theta)
        a_j -> a_i sin(theta) - a_j cos(theta)

    Note the sign convention: theta = 0 leaves mode i unchanged and negates
    mode j.
    """
    _check_mode(n_modes, i)
    _check_mode(n_modes, j)
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = np.cos(theta), np.sin(theta)
    matrix = np.eye(2 * n_modes)
    for q in (0, 1):  # x row, then p row
        qi, qj = 2 * i + q, 2 * j + q
        matrix[qi, qi], matrix[qi, qj] = c, s
        matrix[qj, qi], matrix[qj, qj] = s, -c
    return SymplecticTransform(int(n_modes), matrix)


def phase_rotation(n_modes: int, mode: int, phi: float) -> SymplecticTransform:
    """Phase-space rotation [[cos, sin], [-sin, cos]] on one mode's (x, p)."""
    _check_mode(n_modes, mode)
    if not np.isfinite(phi):
        raise ValueError("phi must be finite")
    c, s = np.cos(phi), np.sin(phi)
    matrix = np.eye(2 * n_modes)
    matrix[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = [[c, s], [-s, c]]
    return SymplecticTransform(int(n_modes), matrix)


def apply(state: GaussianState, transform: SymplecticTransform) -> GaussianState:
    """Conjugate a state by a symplectic map: mean -> S mean, cov -> S cov S^T."""
    if state.n_modes != transform.n_modes:
        raise ValueError("state and transform act on different mode counts")
    s = transform.matrix
    return GaussianState(state.n_modes, s @ state.mean, s @ state.cov @ s.T)


def combination_variance(state: GaussianState, combination: QuadCombination) -> float:
    """Variance of a linear quadrature combination: c^T V c."""
    if state.n_modes != combination.n_modes:
        raise ValueError("state and combination act on different mode counts")
    c = combination.coeffs
    return float(c @ state.cov @ c)


def vacuum_reference(combination: QuadCombination) -> float:
    """Variance of a combination on the vacuum: the reference noise level."""
    c = combination.coeffs
    return VACUUM_VARIANCE * float(c @ c)


def check_physicality(
    state: GaussianState, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> PhysicalityReport:
    """Check symmetry and the uncertainty relation, returning diagnostics.

    The state is physical iff its covariance is symmetric and the minimum
    eigenvalue of ``cov + (i/4) Omega`` is above ``-tolerances.uncertainty``.
    """
    asymmetry = float(np.max(np.abs(state.cov - state.cov.T)))
    herm = state.cov + 0.25j * symplectic_form(state.n_modes)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    ok = asymmetry <= tolerances.symmetry and min_eig >= -tolerances.uncertainty
    return PhysicalityReport(ok=ok, min_eigenvalue=min_eig, max_asymmetry=asymmetry)
