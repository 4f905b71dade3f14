"""Physical parameter set shared by every module.

A model instance is a register of spins precessing at frequencies
``omega_big + omega[j]`` and coupled to a common noise source with
transverse rate ``g_plus`` and dephasing rate ``g_zero``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the noisy-spin model.

    ``g_plus`` may be ``math.inf``, meaning the zero-field limit of the
    root equations (1/g_plus = 0); matrix-building operations reject it.
    """

    n_spins: int
    omega_big: float
    omega: tuple[float, ...]
    g_plus: float
    g_zero: float = 0.0

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError(f"n_spins must be >= 1, got {self.n_spins}")
        object.__setattr__(self, "omega", tuple(float(w) for w in self.omega))
        if len(self.omega) != self.n_spins:
            raise ValueError(
                f"omega has length {len(self.omega)}, expected n_spins={self.n_spins}"
            )
        if not all(math.isfinite(w) for w in self.omega):
            raise ValueError("omega entries must be finite")
        if not (self.g_plus >= 0):
            raise ValueError(f"g_plus must be >= 0, got {self.g_plus}")
        if not (self.g_zero >= 0) or not math.isfinite(self.g_zero):
            raise ValueError(f"g_zero must be finite and >= 0, got {self.g_zero}")
        if not math.isfinite(self.omega_big):
            raise ValueError("omega_big must be finite")

    @property
    def omega_array(self) -> np.ndarray:
        return np.asarray(self.omega, dtype=float)

    @property
    def precessions(self) -> np.ndarray:
        """Per-spin precession frequencies omega_big + omega_j."""
        return self.omega_big + self.omega_array

    @property
    def inv_g_plus(self) -> float:
        return 0.0 if math.isinf(self.g_plus) else 1.0 / self.g_plus

    def with_g_plus(self, g_plus: float) -> "ModelParams":
        return replace(self, g_plus=g_plus)

    def with_omega(self, omega: Sequence[float]) -> "ModelParams":
        return replace(self, omega=tuple(float(w) for w in omega))

    def rate_scale(self) -> float:
        """Coarse magnitude scale of the generator, used for tolerances."""
        scales = [abs(self.omega_big), self.g_zero] + [abs(w) for w in self.omega]
        if math.isfinite(self.g_plus):
            scales.append(self.g_plus)
        return max(scales + [1e-300])


def uniform_ladder(n: int, delta_y: float, omega_big: float,
                   g_plus: float, g_zero: float = 0.0) -> ModelParams:
    """Model with uniformly spaced detunings omega_j = j*delta_y, j = 1..n."""
    return ModelParams(
        n_spins=n,
        omega_big=omega_big,
        omega=tuple(delta_y * j for j in range(1, n + 1)),
        g_plus=g_plus,
        g_zero=g_zero,
    )
