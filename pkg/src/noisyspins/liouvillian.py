"""Collective spin-1 generator of correlation-tensor dynamics.

``build`` constructs the non-Hermitian long-range XX(+Z) generator

    L = i sum_j (omega_big + omega_j) S^z_j
        - g_plus [ (S^x_tot)^2 + (S^y_tot)^2 ] - g_zero (S^z_tot)^2,

whose n=1 spectrum is {i*phi - g_plus, -2 g_plus, -i*phi - g_plus}.  The
double sums over sites include the j=k terms, which is what makes the
equal-detuning limit collapse onto total-spin Casimir form.

Normalization note: the exact generator of Pauli-correlator dynamics under
the master equation in :mod:`noisyspins.qme` is this operator evaluated at
reversed precession signs and halved couplings; use
:func:`correlator_generator` whenever that physical correspondence matters.
Both conventions share every spectral property used here (the spectrum of
one is the complex conjugate of the other's at doubled couplings, and both
are closed under conjugation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError
from .params import ModelParams
from .spinalg import AXES, embed, spin_one_adjoint, spin_one_spherical

MAX_DENSE_SITES = 9


@dataclass(frozen=True)
class LiouvillianMatrix:
    n_sites: int
    basis: str  # "cartesian" | "spherical"
    mat: np.ndarray
    params: ModelParams


@dataclass(frozen=True)
class SpectrumRecord:
    """Eigenvalues with optional per-eigenvalue S^z_tot sector labels."""

    eigenvalues: np.ndarray
    sectors: Optional[np.ndarray]
    params: ModelParams
    seed: Optional[int] = None


def _local_ops(basis: str) -> dict[str, np.ndarray]:
    if basis == "cartesian":
        return {a: spin_one_adjoint(a) for a in AXES}
    if basis == "spherical":
        return {a: spin_one_spherical(a) for a in AXES}
    raise ValueError(f"unknown basis {basis!r}")


def build(p: ModelParams, basis: str = "spherical") -> LiouvillianMatrix:
    """Dense 3^n generator; refuses n > MAX_DENSE_SITES."""
    n = p.n_spins
    if n > MAX_DENSE_SITES:
        raise ValueError(
            f"n={n} gives a dense dimension 3^{n} = {3 ** n}; refusing "
            f"(limit n <= {MAX_DENSE_SITES})"
        )
    if not np.isfinite(p.g_plus):
        raise ValueError("g_plus must be finite to build a dense generator")
    ops = _local_ops(basis)
    sz = [embed(ops["z"], j, n, 3) for j in range(n)]
    sx_tot = sum(embed(ops["x"], j, n, 3) for j in range(n))
    sy_tot = sum(embed(ops["y"], j, n, 3) for j in range(n))
    sz_tot = sum(sz)
    mat = sum(1j * p.precessions[j] * sz[j] for j in range(n))
    mat = mat - p.g_plus * (sx_tot @ sx_tot + sy_tot @ sy_tot) - p.g_zero * (sz_tot @ sz_tot)
    return LiouvillianMatrix(n_sites=n, basis=basis, mat=mat, params=p)


def correlator_generator(p: ModelParams, basis: str = "cartesian") -> LiouvillianMatrix:
    """Exact generator of the Pauli correlation-tensor dynamics.

    Equals :func:`build` at reversed precession signs and halved couplings;
    validated against finite differences of the master-equation flow.
    """
    bridged = replace(
        p,
        omega_big=-p.omega_big,
        omega=tuple(-w for w in p.omega),
        g_plus=p.g_plus / 2,
        g_zero=p.g_zero / 2,
    )
    lm = build(bridged, basis=basis)
    # carry the physical parameters, not the bridged ones
    return LiouvillianMatrix(n_sites=lm.n_sites, basis=basis, mat=lm.mat, params=p)


def sector_basis(n: int, sz_tot: int) -> list[tuple[int, ...]]:
    """m-tuples (site-ordered, m in {+1,0,-1}) with sum sz_tot, in the order
    induced by the full spherical product basis."""
    if not -n <= sz_tot <= n:
        raise ValueError(f"sz_tot={sz_tot} out of range for n={n}")
    # digit d = 1 - m; lexicographic order in digits == full-space index order
    return [
        tuple(1 - d for d in digits)
        for digits in itertools.product((0, 1, 2), repeat=n)
        if n - sum(digits) == sz_tot
    ]


def sector_indices(n: int, sz_tot: int) -> list[int]:
    """Indices into the 3^n spherical product basis with total m = sz_tot."""
    out = []
    for idx, digits in enumerate(itertools.product((0, 1, 2), repeat=n)):
        if n - sum(digits) == sz_tot:
            out.append(idx)
    return out


_SQRT2 = np.sqrt(2.0)


def _amp_raise(m: int) -> float:
    return _SQRT2 if m < 1 else 0.0


def _amp_lower(m: int) -> float:
    return _SQRT2 if m > -1 else 0.0


def build_sector(p: ModelParams, sz_tot: int) -> np.ndarray:
    """The S^z_tot = sz_tot block of the spherical-basis generator.

    Assembled directly on the sector basis (no 3^n intermediate), so it
    stays cheap out to n well beyond the dense limit of :func:`build`.
    """
    if not np.isfinite(p.g_plus):
        raise ValueError("g_plus must be finite to build a sector block")
    n = p.n_spins
    states = sector_basis(n, sz_tot)
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)
    phi = p.precessions
    A = np.zeros((dim, dim), dtype=complex)
    for state, col in index.items():
        diag = 1j * sum(phi[j] * state[j] for j in range(n))
        diag -= p.g_plus * sum(2 - m * m for m in state)
        diag -= p.g_zero * sz_tot ** 2
        A[col, col] += diag
        # hopping: sum_{j != k} S^+_j S^-_k with coefficient -g_plus
        for j in range(n):
            aj = _amp_raise(state[j])
            if aj == 0.0:
                continue
            for k in range(n):
                if k == j:
                    continue
                ak = _amp_lower(state[k])
                if ak == 0.0:
                    continue
                target = list(state)
                target[j] += 1
                target[k] -= 1
                A[index[tuple(target)], col] += -p.g_plus * aj * ak
    return A


def spectrum(L: LiouvillianMatrix, want_vectors: bool = False):
    """Dense nonsymmetric eigendecomposition of the full generator.

    Returns a SpectrumRecord (sector labels filled when the basis is
    spherical), plus the eigenvector matrix when requested.  Labels come
    from eigenvector support, so they are only meaningful when the
    spectrum is non-degenerate; `spectrum_by_sectors` labels exactly.
    """
    eigvals, vecs = np.linalg.eig(L.mat)
    order = np.lexsort((eigvals.imag, eigvals.real))
    eigvals = eigvals[order]
    vecs = vecs[:, order]
    sectors = None
    if L.basis == "spherical":
        n = L.n_sites
        labels = np.empty(3 ** n, dtype=int)
        for m_tot in range(-n, n + 1):
            labels[sector_indices(n, m_tot)] = m_tot
        # assign each eigenvector the sector carrying its weight
        weights = np.abs(vecs) ** 2
        sectors = np.array([
            int(labels[np.argmax(weights[:, k])]) for k in range(weights.shape[1])
        ])
    rec = SpectrumRecord(eigenvalues=eigvals, sectors=sectors, params=L.params)
    if want_vectors:
        norm = np.linalg.norm(L.mat)
        resid = np.linalg.norm(L.mat @ vecs - vecs * eigvals[None, :], axis=0)
        if np.any(resid > 1e-8 * max(norm, 1e-300)):
            raise ConvergenceError(
                f"eigenvector residual {resid.max():.3e} exceeds 1e-8*|L|"
            )
        return rec, vecs
    return rec


def spectrum_by_sectors(p: ModelParams, sectors: Optional[Sequence[int]] = None) -> SpectrumRecord:
    """Full (or partial) spectrum assembled from S^z_tot blocks."""
    n = p.n_spins
    secs = range(-n, n + 1) if sectors is None else sorted(sectors)
    vals, labels = [], []
    for m_tot in secs:
        try:
            ev = np.linalg.eigvals(build_sector(p, m_tot))
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"eigendecomposition failed in the S^z_tot={m_tot} block"
            ) from exc
        order = np.lexsort((ev.imag, ev.real))
        vals.append(ev[order])
        labels.append(np.full(ev.size, m_tot))
    return SpectrumRecord(
        eigenvalues=np.concatenate(vals),
        sectors=np.concatenate(labels),
        params=p,
    )


def omega_zero_spectrum(n: int, Omega: float, g_plus: float):
    """Analytic equal-detuning spectrum.

    Returns (S, M, eigenvalue, multiplicity) tuples with eigenvalue
    i*Omega*M - g_plus*[S(S+1) - M^2]; multiplicities from the spin-1
    coupling table; total count (with degeneracies) is 3^n.
    """
    from .combinatorics import spin1_multiplicities

    if n < 1:
        raise ValueError("n must be >= 1")
    table = spin1_multiplicities(n).by_spin
    out = []
    for S, mult in sorted(table.items()):
        for M in range(-S, S + 1):
            lam = 1j * Omega * M - g_plus * (S * (S + 1) - M * M)
            out.append((S, M, lam, mult))
    return out


def dominant_eigenvalue(rec: SpectrumRecord, exclude_zero_tol: float = 0.0) -> complex:
    """Eigenvalue with the largest real part.

    Eigenvalues with |lambda| < exclude_zero_tol are dropped first (for
    equal-detuning studies where exact zero modes exist).  Ties resolve to
    the smallest |Im|, preferring Im >= 0.
    """
    ev = np.asarray(rec.eigenvalues)
    if exclude_zero_tol > 0:
        ev = ev[np.abs(ev) >= exclude_zero_tol]
    if ev.size == 0:
        raise ValueError("all eigenvalues excluded")
    order = sorted(
        range(ev.size),
        key=lambda k: (-ev[k].real, abs(ev[k].imag), 0 if ev[k].imag >= 0 else 1),
    )
    return complex(ev[order[0]])


def dominant_rate(p: ModelParams, exclude_zero_tol: float = 0.0) -> float:
    """Relaxation rate: magnitude of the dominant eigenvalue's real part."""
    lam = dominant_eigenvalue(spectrum_by_sectors(p), exclude_zero_tol)
    return -lam.real


def multiset_defect(a: np.ndarray, b: np.ndarray) -> float:
    """Largest matched distance under an optimal pairing of two spectra.

    Robust against reordering of near-degenerate eigenvalues, unlike an
    elementwise comparison of lexicographically sorted lists.
    """
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"multisets differ in size: {a.shape} vs {b.shape}")
    dist = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(dist)
    return float(dist[rows, cols].max())


def conjugation_defect(eigenvalues: np.ndarray) -> float:
    """max_i min_j |conj(lambda_i) - lambda_j|: 0 for a self-conjugate set."""
    ev = np.asarray(eigenvalues)
    defect = 0.0
    for lam in ev.conj():
        defect = max(defect, float(np.abs(ev - lam).min()))
    return defect


def near_zero_cluster(eigenvalues: np.ndarray, max_cluster: Optional[int] = None):
    """Split off the near-zero cluster by the largest ratio gap in |lambda|.

    Returns (indices, threshold).  The threshold is the geometric mean of
    the two |lambda| values across the widest ratio gap among the smallest
    magnitudes; `max_cluster` caps how deep the search looks.
    """
    ev = np.asarray(eigenvalues)
    mags = np.sort(np.abs(ev))
    if ev.size < 2:
        raise ValueError("need at least two eigenvalues")
    floor = 1e-300
    top = ev.size - 1 if max_cluster is None else min(max_cluster, ev.size - 1)
    ratios = [
        (np.log(max(mags[i], floor)) - np.log(max(mags[i - 1], floor)), i)
        for i in range(1, top + 1)
    ]
    _, split = max(ratios)
    threshold = float(np.sqrt(max(mags[split - 1], floor) * mags[split]))
    idx = np.flatnonzero(np.abs(ev) < threshold)
    return idx, threshold


def match_eigenvalues(prev: np.ndarray, curr: np.ndarray,
                      predicted: Optional[np.ndarray] = None,
                      ambiguity_ratio: float = 2.0) -> np.ndarray:
    """Permutation aligning `curr` to `prev` (or to extrapolated positions).

    Greedy nearest-neighbour first; falls back to an optimal assignment when
    the greedy choice is ambiguous (second-nearest closer than
    `ambiguity_ratio` times the nearest) or collides.
    """
    ref = prev if predicted is None else predicted
    ncur = len(curr)
    if len(ref) != ncur:
        raise DimensionMismatchError("eigenvalue sets differ in size")
    dist = np.abs(ref[:, None] - curr[None, :])
    perm = np.full(ncur, -1, dtype=int)
    taken = np.zeros(ncur, dtype=bool)
    ambiguous = False
    for i in range(ncur):
        order = np.argsort(dist[i])
        best = order[0]
        if ncur > 1:
            ratio = dist[i, order[1]] / max(dist[i, best], 1e-300)
            if ratio < ambiguity_ratio:
                ambiguous = True
                break
        if taken[best]:
            ambiguous = True
            break
        perm[i] = best
        taken[best] = True
    if ambiguous:
        from scipy.optimize import linear_sum_assignment

        rows, cols = linear_sum_assignment(dist)
        perm = np.empty(ncur, dtype=int)
        perm[rows] = cols
    return perm
