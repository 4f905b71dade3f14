"""Infinite-ladder limit of the string-state decay rate.

For uniformly spaced detunings (spacing delta_y, poles spaced i*delta_y/2
after halving) the string roots condense onto two vertical lines at real
parts +delta_plus and -delta_minus.  Summing the root equations over the
infinite ladder gives the closed pair

    (2 pi / D) tanh(2 pi d+ / D) = (pi / D) coth(pi (d+ + d-) / D) - 1/g,
    (2 pi / D) tanh(2 pi d- / D) = (pi / D) coth(pi (d+ + d-) / D) + 1/g,

with D = delta_y.  At 1/g = 0 the symmetric solution is
d = (D / 2 pi) artanh(1/sqrt(2)).

The decay-rate reconstruction n*(d- - d+) (n/2 roots on each side) is a
prediction that must be validated against the finite-n solver before use;
see `rate_prediction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

_SYM_CONST = math.atanh(1.0 / math.sqrt(2.0)) / (2.0 * math.pi)  # ~0.140272


@dataclass(frozen=True)
class DeltaPair:
    delta_plus: float
    delta_minus: float
    delta_y: float
    g_plus: float


def delta_residual(delta_plus: float, delta_minus: float, delta_y: float,
                   inv_g: float) -> np.ndarray:
    D = delta_y
    coth_arg = math.pi * (delta_plus + delta_minus) / D
    coth = 1.0 / math.tanh(coth_arg)
    f1 = (2 * math.pi / D) * math.tanh(2 * math.pi * delta_plus / D) \
        - (math.pi / D) * coth + inv_g
    f2 = (2 * math.pi / D) * math.tanh(2 * math.pi * delta_minus / D) \
        - (math.pi / D) * coth - inv_g
    return np.array([f1, f2])


def _delta_jacobian(dp: float, dm: float, D: float) -> np.ndarray:
    k = math.pi / D
    sech2_p = 1.0 / math.cosh(2 * k * dp) ** 2
    sech2_m = 1.0 / math.cosh(2 * k * dm) ** 2
    csch2 = 1.0 / math.sinh(k * (dp + dm)) ** 2
    # d/dx coth(x) = -csch^2(x); the -coth term contributes +k^2 csch^2
    return np.array([
        [4 * k ** 2 * sech2_p + k ** 2 * csch2, k ** 2 * csch2],
        [k ** 2 * csch2, 4 * k ** 2 * sech2_m + k ** 2 * csch2],
    ])


def solve_delta(delta_y: float, g_plus: float) -> DeltaPair:
    """Damped Newton on the charge-offset pair from the symmetric start."""
    if delta_y <= 0:
        raise ValueError("delta_y must be positive")
    if not g_plus > 0:
        raise ValueError("g_plus must be positive (may be inf)")
    inv_g = 0.0 if math.isinf(g_plus) else 1.0 / g_plus
    D = delta_y
    sym = _SYM_CONST * D
    x = np.array([sym, sym])
    F = delta_residual(x[0], x[1], D, inv_g)
    for _ in range(100):
        if np.abs(F).max() < 1e-12:
            return DeltaPair(float(x[0]), float(x[1]), D, g_plus)
        J = _delta_jacobian(x[0], x[1], D)
        step = np.linalg.solve(J, -F)
        alpha = 1.0
        for _ in range(40):
            trial = x + alpha * step
            trial = np.abs(trial)  # reflect negative iterates
            trial = np.maximum(trial, 1e-14 * D)
            F_trial = delta_residual(trial[0], trial[1], D, inv_g)
            if np.abs(F_trial).max() < np.abs(F).max():
                x, F = trial, F_trial
                break
            alpha /= 2
        else:
            raise ConvergenceError(
                f"charge-offset solve stalled, residuals {F.tolist()}"
            )
    raise ConvergenceError(f"charge-offset solve did not converge, residuals {F.tolist()}")


def symmetric_offset(delta_y: float) -> float:
    """Zero-field closed form (delta_y / 2 pi) artanh(1/sqrt(2))."""
    return _SYM_CONST * delta_y


def rate_prediction(dp: DeltaPair, n: int) -> float:
    """Predicted dominant real part n*(delta_plus - delta_minus) (<= 0).

    Assumes the finite-n string splits its roots evenly between the two
    sides, which holds for even n on the uniform ladder; callers must
    validate against the finite-n solver before trusting the value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * (dp.delta_plus - dp.delta_minus)
