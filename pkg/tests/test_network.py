"""Tritter network construction against the closed-form covariance."""

import numpy as np
import pytest

from cvghz import (
    ChannelSpec,
    NetworkParams,
    QuadCombination,
    build_tritter,
    closed_form_ghz_covariance,
    combination_variance,
    ghz_state,
    symplectic_form,
)

X_INDEX = (0, 2, 4)


def xdiff(i: int, j: int) -> QuadCombination:
    return QuadCombination.from_quadratures(3, x={i: 1.0, j: -1.0})


PSUM = QuadCombination.from_quadratures(3, p={0: 1.0, 1: 1.0, 2: 1.0})


class TestNetworkParams:
    def test_lossless_constructor(self):
        params = NetworkParams.lossless(0.3, 0.4, 0.5)
        assert params.channel == ChannelSpec.lossless(3)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            NetworkParams.lossless(np.inf, 0.0, 0.0)

    def test_wrong_channel_size(self):
        with pytest.raises(ValueError):
            NetworkParams(0.1, 0.1, 0.1, ChannelSpec.lossless(2))


class TestTritter:
    def test_is_symplectic(self):
        omega = symplectic_form(3)
        matrix = build_tritter().matrix
        assert np.max(np.abs(matrix @ omega @ matrix.T - omega)) <= 1e-12

    def test_first_input_spreads_evenly(self):
        matrix = build_tritter().matrix
        column = matrix[list(X_INDEX), 0]
        assert np.allclose(column, 1.0 / np.sqrt(3.0), atol=1e-14)

    def test_second_input_coefficient_into_first_output(self):
        matrix = build_tritter().matrix
        assert matrix[0, 2] == pytest.approx(np.sqrt(2.0 / 3.0), abs=1e-14)


class TestGhzState:
    def test_no_squeezing_gives_vacuum(self):
        state = ghz_state(NetworkParams.lossless(0.0, 0.0, 0.0))
        assert np.max(np.abs(state.cov - 0.25 * np.eye(6))) <= 1e-14

    @pytest.mark.parametrize("r", [0.2, 0.5, 1.3])
    def test_momentum_sum_law(self, r):
        state = ghz_state(NetworkParams.lossless(r, r, r))
        assert combination_variance(state, PSUM) == pytest.approx(
            0.75 * np.exp(-2 * r), abs=1e-13
        )

    @pytest.mark.parametrize("r", [0.2, 0.5, 1.3])
    def test_position_difference_law(self, r):
        # depends only on the two position-squeezed inputs
        state = ghz_state(NetworkParams.lossless(2.0 * r, r, r))
        assert combination_variance(state, xdiff(0, 1)) == pytest.approx(
            0.5 * np.exp(-2 * r), abs=1e-13
        )


class TestClosedFormCovariance:
    def test_zero_squeezing(self):
        assert np.max(np.abs(closed_form_ghz_covariance(0, 0, 0) - 0.25 * np.eye(6))) <= 1e-15

    def test_first_position_variance_entry(self):
        r1, r2 = 0.6, 0.9
        cov = closed_form_ghz_covariance(r1, r2, 0.3)
        expected = (np.exp(2 * r1) / 3 + 2 * np.exp(-2 * r2) / 3) / 4
        assert cov[0, 0] == pytest.approx(expected, abs=1e-14)

    def test_matches_network_for_random_parameters(self):
        rng = np.random.default_rng(20260810)
        worst = 0.0
        for _ in range(100):
            r1, r2, r3 = rng.uniform(0.0, 2.0, 3)
            state = ghz_state(NetworkParams.lossless(r1, r2, r3))
            worst = max(worst, float(np.max(np.abs(state.cov - closed_form_ghz_covariance(r1, r2, r3)))))
        assert worst <= 1e-12


class TestSymmetry:
    def test_exchange_of_modes_two_and_three(self):
        state = ghz_state(NetworkParams.lossless(0.8, 0.5, 0.5))
        perm = np.zeros((6, 6))
        for old, new in ((0, 0), (1, 1), (2, 4), (3, 5), (4, 2), (5, 3)):
            perm[new, old] = 1.0
        swapped = perm @ state.cov @ perm.T
        assert np.max(np.abs(swapped - state.cov)) <= 1e-12

    def test_pairwise_differences_equal_when_symmetric(self):
        state = ghz_state(NetworkParams.lossless(0.6, 0.6, 0.6))
        values = [combination_variance(state, xdiff(i, j)) for i, j in ((0, 1), (1, 2), (2, 0))]
        assert max(values) - min(values) <= 1e-12


class TestSingleModeNoise:
    @pytest.mark.xfail(
        strict=True,
        reason="false as stated: the symmetric lossless output dips below "
        "vacuum in x for 0 < r < ln(2)/2, e.g. r = ln(2)/4",
    )
    def test_diagonal_never_below_vacuum_for_all_r(self):
        for r in np.arange(0.05, 2.0001, 0.05):
            state = ghz_state(NetworkParams.lossless(r, r, r))
            assert np.all(np.diag(state.cov) >= 0.25 - 1e-12)

    def test_diagonal_threshold_is_half_log_two(self):
        # Var(x_i) = (e^{2r} + 2 e^{-2r}) / 12 >= 1/4 iff r = 0 or r >= ln(2)/2
        threshold = 0.5 * np.log(2.0)
        for r in (0.0, threshold, threshold + 0.05, 0.8, 2.0):
            state = ghz_state(NetworkParams.lossless(r, r, r))
            assert np.all(np.diag(state.cov) >= 0.25 - 1e-12)
        for r in (0.05, np.log(2.0) / 4.0, threshold - 0.05):
            state = ghz_state(NetworkParams.lossless(r, r, r))
            assert np.min(np.diag(state.cov)) < 0.25

    def test_momentum_diagonals_always_above_vacuum(self):
        for r in np.arange(0.05, 2.0001, 0.1):
            state = ghz_state(NetworkParams.lossless(r, r, r))
            assert np.all(np.diag(state.cov)[1::2] >= 0.25 - 1e-12)


class TestChannelPlacement:
    def test_loss_reduces_violation(self):
        clean = ghz_state(NetworkParams.lossless(0.8, 0.8, 0.8))
        lossy = ghz_state(
            NetworkParams(0.8, 0.8, 0.8, ChannelSpec(efficiency=(0.7, 0.7, 0.7), phase_sigma=(0, 0, 0)))
        )
        assert combination_variance(lossy, PSUM) > combination_variance(clean, PSUM)

    def test_jitter_reduces_violation(self):
        clean = ghz_state(NetworkParams.lossless(0.8, 0.8, 0.8))
        jittered = ghz_state(
            NetworkParams(0.8, 0.8, 0.8, ChannelSpec(efficiency=(1, 1, 1), phase_sigma=(0.2, 0.2, 0.2)))
        )
        assert combination_variance(jittered, PSUM) > combination_variance(clean, PSUM)
