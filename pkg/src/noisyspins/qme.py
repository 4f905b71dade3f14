"""Lindblad master equation of the noisy-spin model.

Builds the Hamiltonian and (Hermitian) jump operators for N spin-1/2
particles in a common noise field, integrates the master equation with
fixed-step RK4, and extracts spin correlation tensors.

Correlator convention: ``c_{a1..aN} = tr[rho sigma^{a1} x ... x sigma^{aN}]``
with Pauli matrices (sigma^0 = identity).  This expansion is self-inverse,
``rho = 2^{-N} sum_c c sigma x ... x sigma``, and rescales each fixed-rank
block of the tensor uniformly, so generator spectra are unaffected by the
choice.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalError
from .params import ModelParams
from .spinalg import AXES, PAULI, cartesian_to_spherical, embed, kron_chain, spin_half

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class CorrelationTensor:
    """Full rank-N correlation tensor under the Pauli convention.

    ``values`` has shape (4,)*N indexed by (a_1, ..., a_N) with axis order
    (0, x, y, z) per site.
    """

    n_sites: int
    values: np.ndarray
    convention: str = "pauli"


def validate_density_matrix(rho: np.ndarray, *, check_positivity: bool = True) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got {rho.shape}")
    if np.linalg.norm(rho - rho.conj().T, np.inf) > HERMITICITY_TOL:
        raise NumericalError("density matrix is not Hermitian to tolerance")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise NumericalError(f"density matrix trace {np.trace(rho)} != 1")
    if check_positivity:
        lo = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
        if lo < -POSITIVITY_TOL:
            raise NumericalError(f"density matrix has eigenvalue {lo} < -{POSITIVITY_TOL}")


def build_model(p: ModelParams) -> tuple[np.ndarray, list[np.ndarray]]:
    """Hamiltonian and jump operators [L_x, L_y, L_z] of the model.

    H = sum_j (omega_big + omega_j) s_j^z, L_{x,y} = sqrt(g_plus) sum_j s_j^{x,y},
    L_z = sqrt(g_zero) sum_j s_j^z.  The Hermitian transverse jump operators
    are the equal-up-down-rate form of the raising/lowering pair.
    """
    n = p.n_spins
    if not np.isfinite(p.g_plus):
        raise ValueError("g_plus must be finite to build the 2^N model")
    sz = [embed(spin_half("z"), j, n, 2) for j in range(n)]
    sx_tot = sum(embed(spin_half("x"), j, n, 2) for j in range(n))
    sy_tot = sum(embed(spin_half("y"), j, n, 2) for j in range(n))
    sz_tot = sum(sz)
    H = sum(p.precessions[j] * sz[j] for j in range(n))
    lindblads = [
        np.sqrt(p.g_plus) * sx_tot,
        np.sqrt(p.g_plus) * sy_tot,
        np.sqrt(p.g_zero) * sz_tot,
    ]
    return H, lindblads


def lindblad_rhs(rho: np.ndarray, H: np.ndarray, lindblads) -> np.ndarray:
    """-i[H, rho] + sum_a (L rho L+ - {L+ L, rho}/2)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != H.shape:
        raise DimensionMismatchError(f"rho {rho.shape} vs H {H.shape}")
    out = -1j * (H @ rho - rho @ H)
    for L in lindblads:
        if L.shape != rho.shape:
            raise DimensionMismatchError(f"lindblad {L.shape} vs rho {rho.shape}")
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def evolve_rk4(rho0: np.ndarray, p: ModelParams, t_final: float, dt: float,
               *, check_every: int = 25) -> np.ndarray:
    """Classical RK4 integration of the master equation.

    The state is re-symmetrized each step; trace and positivity are
    monitored (not enforced) and violations abort with diagnostics.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    scale = p.rate_scale()
    if dt * scale > 0.1:
        warnings.warn(
            f"dt*scale = {dt * scale:.3g} > 0.1; integration may be inaccurate",
            stacklevel=2,
        )
    H, lindblads = build_model(p)
    rho = np.asarray(rho0, dtype=complex).copy()
    validate_density_matrix(rho)
    n_steps = int(round(t_final / dt))

    def f(r):
        return lindblad_rhs(r, H, lindblads)

    for step in range(n_steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * dt * k1)
        k3 = f(rho + 0.5 * dt * k2)
        k4 = f(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = (rho + rho.conj().T) / 2
        if not np.all(np.isfinite(rho)):
            raise NumericalError(f"non-finite state at step {step + 1} (t={dt*(step+1):.4g})")
        if (step + 1) % check_every == 0 or step == n_steps - 1:
            tr = np.trace(rho)
            if abs(tr - 1.0) > 1e-8:
                raise NumericalError(f"trace drift {abs(tr-1.0):.3e} at step {step + 1}")
            lo = np.linalg.eigvalsh(rho).min()
            if lo < -POSITIVITY_TOL:
                raise NumericalError(
                    f"positivity violation: min eigenvalue {lo:.3e} at step {step + 1}"
                )
    return rho


def correlator(rho: np.ndarray, indices) -> float:
    """tr[rho sigma^{a1} x ... x sigma^{aN}], sigma^0 = identity."""
    indices = list(indices)
    n = len(indices)
    rho = np.asarray(rho)
    if rho.shape != (2 ** n, 2 ** n):
        raise DimensionMismatchError(
            f"rho shape {rho.shape} does not match {n} index labels"
        )
    op = kron_chain([PAULI[a] for a in indices])
    val = np.trace(rho @ op)
    if abs(val.imag) > 1e-10:
        raise NumericalError(f"correlator has imaginary part {val.imag:.3e}")
    return float(val.real)


def _n_sites_of(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = int(round(np.log2(d)))
    if 2 ** n != d:
        raise DimensionMismatchError(f"dimension {d} is not a power of 2")
    return n


def correlation_tensor(rho: np.ndarray) -> CorrelationTensor:
    """All 4^N Pauli correlators of rho, as a (4,)*N real tensor."""
    n = _n_sites_of(np.asarray(rho))
    sig = np.stack([PAULI[a] for a in "0xyz"])  # (4, 2, 2)
    work = np.asarray(rho, dtype=complex).reshape((2,) * (2 * n))
    # interleave to (row_1, col_1, row_2, col_2, ...)
    perm = [ax for k in range(n) for ax in (k, n + k)]
    work = work.transpose(perm)
    # c_a = sum_{ij} rho_{ij} sigma^a_{ji}, one site at a time; each Pauli
    # axis is appended last, so the result ends up ordered (a_1, ..., a_n).
    for _ in range(n):
        work = np.einsum("aji,ij...->...a", sig, work)
    out = work.real
    if np.abs(work.imag).max() > 1e-10:
        raise NumericalError("correlation tensor has imaginary entries")
    return CorrelationTensor(n_sites=n, values=out)


def density_from_tensor(tensor: CorrelationTensor) -> np.ndarray:
    """Reconstruct rho = 2^{-N} sum_c c_{a1..aN} sigma^{a1} x ... x sigma^{aN}."""
    n = tensor.n_sites
    sig = np.stack([PAULI[a] for a in "0xyz"])
    work = np.asarray(tensor.values, dtype=complex)
    # expand leading Pauli axis into a (row, col) pair appended at the end;
    # after n steps the axes are interleaved (row_1, col_1, ...).
    for _ in range(n):
        work = np.einsum("aij,a...->...ij", sig, work)
    inv = [ax for k in range(n) for ax in (2 * k,)] + [2 * k + 1 for k in range(n)]
    work = work.transpose(inv)
    return work.reshape(2 ** n, 2 ** n) / 2 ** n


def rank_n_block(tensor: CorrelationTensor, sites, *, basis: str = "cartesian") -> np.ndarray:
    """The 3^k sub-vector with Cartesian indices on `sites`, 0 elsewhere.

    Ordering matches the tensor-product convention: sites[0] is the most
    significant base-3 digit.  With basis="spherical" the vector is rotated
    per site into the (m=+1, 0, -1) basis.
    """
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    n = tensor.n_sites
    if any(not 0 <= s < n for s in sites):
        raise ValueError(f"sites out of range for n={n}")
    k = len(sites)
    vec = np.zeros(3 ** k, dtype=complex)
    for pos, cart in enumerate(itertools.product((1, 2, 3), repeat=k)):
        idx = [0] * n
        for s, a in zip(sites, cart):
            idx[s] = a
        vec[pos] = tensor.values[tuple(idx)]
    if basis == "spherical":
        U = cartesian_to_spherical()
        vec = kron_chain([U] * k) @ vec
    elif basis != "cartesian":
        raise ValueError(f"unknown basis {basis!r}")
    return vec


def werner_state(c_dot: float) -> np.ndarray:
    """Two-qubit rotationally invariant state (1/4) I + c_dot s1.s2."""
    if not -1.0 <= c_dot <= 1.0 / 3.0:
        raise ValueError(f"c_dot must lie in [-1, 1/3], got {c_dot}")
    rho = np.eye(4, dtype=complex) / 4
    for a in AXES:
        s = spin_half(a)
        rho += c_dot * np.kron(s, s)
    return rho


def random_density_matrix(n_spins: int, rng) -> np.ndarray:
    """Full-rank random state from a Ginibre factor (deterministic in rng)."""
    d = 2 ** n_spins
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real
