import numpy as np
import pytest

from noisyspins.errors import DimensionMismatchError
from noisyspins.spinalg import (
    AXES,
    cartesian_to_spherical,
    embed,
    kron_chain,
    levi_civita,
    spin_half,
    spin_one_adjoint,
    spin_one_raising,
    spin_one_spherical,
)

TOL = 1e-13


def comm(a, b):
    return a @ b - b @ a


def test_spin_half_z_diagonal():
    assert np.allclose(spin_half("z"), np.diag([0.5, -0.5]), atol=TOL)


def test_spin_half_identity_label():
    assert np.allclose(spin_half("0"), np.eye(2), atol=0)


def test_spin_half_su2_algebra():
    for a, b, c in [("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")]:
        lhs = comm(spin_half(a), spin_half(b)) - 1j * spin_half(c)
        assert np.abs(lhs).max() < TOL


def test_spin_half_casimir():
    total = sum(spin_half(a) @ spin_half(a) for a in AXES)
    assert np.abs(total - 0.75 * np.eye(2)).max() < TOL


def test_spin_one_adjoint_entries():
    Sz = spin_one_adjoint("z")
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = -1j  # (z)_{xy} = -i
    expected[1, 0] = 1j
    assert np.abs(Sz - expected).max() < TOL


def test_spin_one_adjoint_su2_algebra_and_casimir():
    for a, b, c in [("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")]:
        lhs = comm(spin_one_adjoint(a), spin_one_adjoint(b)) - 1j * spin_one_adjoint(c)
        assert np.abs(lhs).max() < TOL
    total = sum(spin_one_adjoint(a) @ spin_one_adjoint(a) for a in AXES)
    assert np.abs(total - 2.0 * np.eye(3)).max() < TOL


def test_spin_one_adjoint_antisymmetric_imaginary():
    for a in AXES:
        S = spin_one_adjoint(a)
        assert np.abs(S.T + S).max() < TOL
        assert np.abs(S.real).max() < TOL


def test_levi_civita_values():
    assert levi_civita("x", "y", "z") == 1
    assert levi_civita("y", "x", "z") == -1
    assert levi_civita("x", "x", "z") == 0


def test_cartesian_to_spherical_unitary():
    U = cartesian_to_spherical()
    assert np.abs(U @ U.conj().T - np.eye(3)).max() < TOL


def test_cartesian_to_spherical_diagonalizes_sz():
    U = cartesian_to_spherical()
    out = U @ spin_one_adjoint("z") @ U.conj().T
    assert np.abs(out - np.diag([1.0, 0.0, -1.0])).max() < TOL


def test_spherical_matrices_match_conjugated_cartesian():
    U = cartesian_to_spherical()
    for a in AXES:
        lhs = U @ spin_one_adjoint(a) @ U.conj().T
        assert np.abs(lhs - spin_one_spherical(a)).max() < TOL


def test_raising_action_on_lowest_state():
    # (S^x + i S^y) |m=-1> = sqrt(2) |m=0> in the spherical basis
    U = cartesian_to_spherical()
    Sp_cart = spin_one_adjoint("x") + 1j * spin_one_adjoint("y")
    Sp = U @ Sp_cart @ U.conj().T
    lowest = np.array([0.0, 0.0, 1.0])
    out = Sp @ lowest
    expected = np.array([0.0, np.sqrt(2.0), 0.0])
    assert np.abs(out - expected).max() < TOL
    assert np.abs(Sp - spin_one_raising()).max() < TOL


def test_conjugated_algebra_survives_basis_change():
    U = cartesian_to_spherical()
    S = {a: U @ spin_one_adjoint(a) @ U.conj().T for a in AXES}
    assert np.abs(comm(S["x"], S["y"]) - 1j * S["z"]).max() < TOL
    total = sum(S[a] @ S[a] for a in AXES)
    assert np.abs(total - 2.0 * np.eye(3)).max() < TOL


def test_embed_single_site_is_identity_map():
    sz = spin_half("z")
    assert np.abs(embed(sz, 0, 1, 2) - sz).max() == 0


def test_embed_total_sz_eigenvalue():
    sz = spin_half("z")
    total = embed(sz, 0, 2, 2) + embed(sz, 1, 2, 2)
    up_up = np.zeros(4)
    up_up[0] = 1.0
    assert np.abs(total @ up_up - 1.0 * up_up).max() < TOL


def test_embed_trace_factorization():
    rng = np.random.default_rng(0)
    op = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    for n, site in [(2, 0), (3, 1), (3, 2)]:
        emb = embed(op, site, n, 3)
        assert abs(np.trace(emb) - np.trace(op) * 3 ** (n - 1)) < 1e-10


def test_embed_linearity():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    lhs = embed(A + B, 1, 3, 2)
    rhs = embed(A, 1, 3, 2) + embed(B, 1, 3, 2)
    assert np.abs(lhs - rhs).max() < TOL


def test_embed_rejects_bad_shapes():
    with pytest.raises(DimensionMismatchError):
        embed(np.eye(2), 0, 2, 3)
    with pytest.raises(ValueError):
        embed(np.eye(2), 2, 2, 2)


def test_site_zero_is_most_significant_factor():
    sz = spin_half("z")
    emb = embed(sz, 0, 2, 2)
    assert np.allclose(emb, np.kron(sz, np.eye(2)))
    assert np.allclose(kron_chain([sz, np.eye(2)]), emb)
