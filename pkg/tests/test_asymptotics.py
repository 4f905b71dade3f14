import math

import numpy as np
import pytest

from noisyspins import asymptotics as asym


def test_symmetric_closed_form_at_zero_field():
    for dy in (1.0, 2.0, 3.7):
        dp = asym.solve_delta(dy, math.inf)
        expected = dy * math.atanh(1 / math.sqrt(2)) / (2 * math.pi)
        assert abs(dp.delta_plus - expected) < 1e-10
        assert abs(dp.delta_minus - expected) < 1e-10
        assert abs(expected / dy - 0.1402750) < 1e-6


def test_finite_field_orders_the_offsets():
    dp = asym.solve_delta(2.0, 50.0)
    assert dp.delta_minus > dp.delta_plus > 0


def test_residuals_vanish_at_solution():
    for g in (math.inf, 200.0, 25.0):
        dp = asym.solve_delta(2.0, g)
        inv_g = 0.0 if math.isinf(g) else 1.0 / g
        res = asym.delta_residual(dp.delta_plus, dp.delta_minus, 2.0, inv_g)
        assert np.abs(res).max() < 1e-12


def test_offset_gap_grows_with_inverse_coupling():
    gaps = []
    for inv_g in np.linspace(0.0, 0.05, 8):
        g = math.inf if inv_g == 0 else 1.0 / inv_g
        dp = asym.solve_delta(2.0, g)
        gaps.append(dp.delta_minus - dp.delta_plus)
    assert all(b > a for a, b in zip(gaps, gaps[1:]))


def test_scale_covariance():
    s = 2.5
    a = asym.solve_delta(2.0, 40.0)
    b = asym.solve_delta(s * 2.0, s * 40.0)
    assert abs(b.delta_plus - s * a.delta_plus) < 1e-9
    assert abs(b.delta_minus - s * a.delta_minus) < 1e-9


def test_rate_prediction_zero_at_zero_field():
    dp = asym.solve_delta(2.0, math.inf)
    assert asym.rate_prediction(dp, 60) == pytest.approx(0.0, abs=1e-9)


def test_rate_prediction_linear_in_inverse_coupling():
    dy = 2.0
    inv_g = np.array([0.002, 0.004, 0.008])
    rate = np.array([
        -asym.rate_prediction(asym.solve_delta(dy, 1.0 / x), 60) for x in inv_g
    ])
    slopes = rate / inv_g
    assert np.ptp(slopes) / slopes.mean() < 0.02


def test_rate_prediction_matches_finite_n_solver():
    from noisyspins import bethe
    from noisyspins.params import uniform_ladder

    dy = 2.0
    grid = [0.002, 0.01, 0.05]
    p = uniform_ladder(60, dy, -63.0, 1.0)
    sols = bethe.continuation_string_state(p, [1.0 / x for x in grid])
    for sol, inv_g in zip(sols, grid):
        pred = -asym.rate_prediction(asym.solve_delta(dy, 1.0 / inv_g), 60)
        rate = -sol.eigenvalue.real
        assert abs(rate - pred) / pred < 0.05


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        asym.solve_delta(-1.0, 10.0)
    with pytest.raises(ValueError):
        asym.solve_delta(2.0, 0.0)
