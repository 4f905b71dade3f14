"""Elementary spin operator algebra.

Spin-1/2 and spin-1 matrices in Cartesian and spherical bases plus
tensor-product embedding into many-site spaces.

Conventions fixed here and used by the whole package:

* site 0 is the leftmost tensor factor (most significant index digit);
* Cartesian axis order is (x, y, z);
* the spherical single-site spin-1 basis is ordered (m=+1, m=0, m=-1)
  with the Condon-Shortley phase choice
  ``|+1> = -(e_x + i e_y)/sqrt(2)``, ``|0> = e_z``,
  ``|-1> = (e_x - i e_y)/sqrt(2)``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import DimensionMismatchError

AXES = ("x", "y", "z")
AXIS_LABELS = ("0", "x", "y", "z")

_SQRT2 = np.sqrt(2.0)

PAULI = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_EPS_SIGN = {
    ("x", "y", "z"): 1, ("y", "z", "x"): 1, ("z", "x", "y"): 1,
    ("x", "z", "y"): -1, ("z", "y", "x"): -1, ("y", "x", "z"): -1,
}


def levi_civita(a: str, b: str, c: str) -> int:
    return _EPS_SIGN.get((a, b, c), 0)


def spin_half(a: str) -> np.ndarray:
    """2x2 spin-1/2 matrix s^a = sigma^a / 2; '0' gives the identity."""
    if a == "0":
        return PAULI["0"].copy()
    if a not in AXES:
        raise ValueError(f"axis must be one of {AXIS_LABELS}, got {a!r}")
    return PAULI[a] / 2.0


def spin_one_adjoint(a: str) -> np.ndarray:
    """3x3 spin-1 matrix in the Cartesian basis, (S^a)_bc = -i eps_abc."""
    if a not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {a!r}")
    M = np.zeros((3, 3), dtype=complex)
    for i, b in enumerate(AXES):
        for j, c in enumerate(AXES):
            s = levi_civita(a, b, c)
            if s:
                M[i, j] = -1j * s
    return M


def cartesian_to_spherical() -> np.ndarray:
    """Unitary U mapping Cartesian components to the (m=+1, 0, -1) basis.

    U @ S^a_cartesian @ U.conj().T equals the standard spin-1 matrices in
    the eigenbasis of S^z (Condon-Shortley phases).
    """
    inv = 1.0 / _SQRT2
    return np.array(
        [
            [-inv, 1j * inv, 0.0],
            [0.0, 0.0, 1.0],
            [inv, 1j * inv, 0.0],
        ],
        dtype=complex,
    )


def spin_one_spherical(a: str) -> np.ndarray:
    """Standard spin-1 matrices in the (m=+1, 0, -1) basis."""
    if a == "z":
        return np.diag([1.0, 0.0, -1.0]).astype(complex)
    sp = spin_one_raising()
    if a == "+":
        return sp
    if a == "-":
        return sp.T.copy()
    if a == "x":
        return (sp + sp.T) / 2.0
    if a == "y":
        return (sp - sp.T) / 2j
    raise ValueError(f"axis must be one of x, y, z, +, -; got {a!r}")


def spin_one_raising() -> np.ndarray:
    """S^+ in the spherical basis: S^+|m> = sqrt(2 - m(m+1)) |m+1>."""
    return _SQRT2 * np.array(
        [[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex
    )


def kron_chain(ops) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, site: int, n: int, local_dim: int) -> np.ndarray:
    """identity x ... x op x ... x identity with op at `site` (0 = leftmost)."""
    op = np.asarray(op)
    if op.shape != (local_dim, local_dim):
        raise DimensionMismatchError(
            f"operator shape {op.shape} does not match local_dim={local_dim}"
        )
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for n={n}")
    eye = np.eye(local_dim, dtype=complex)
    return kron_chain([op if j == site else eye for j in range(n)])
