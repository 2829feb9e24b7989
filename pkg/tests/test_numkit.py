"""Kernel tests. numpy.linalg serves as the independent oracle here; the
library itself never touches it on the production path."""

import numpy as np
import pytest

from mmwlink import numkit


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


# ---------------------------------------------------------------------------
# kron / frobenius
# ---------------------------------------------------------------------------


def test_kron_identity_blocks():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = numkit.kron(np.eye(2), a)
    expected = np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), a]])
    assert np.allclose(out, expected, atol=0.0)


def test_kron_mixed_product_property():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a, b = random_complex(rng, 2), random_complex(rng, 3)
        c, d = random_complex(rng, 2), random_complex(rng, 3)
        left = numkit.kron(a @ c, b @ d)
        right = numkit.kron(a, b) @ numkit.kron(c, d)
        assert np.allclose(left, right, rtol=1e-12, atol=1e-12)


def test_frobenius_norm_sq_values():
    assert numkit.frobenius_norm_sq(np.eye(4)) == pytest.approx(4.0)
    assert numkit.frobenius_norm_sq(np.array([[3.0j]])) == pytest.approx(9.0)
    rng = np.random.default_rng(3)
    a = random_complex(rng, 5)
    assert numkit.frobenius_norm_sq(a) == pytest.approx(
        np.trace(a @ a.conj().T).real, rel=1e-13
    )


# ---------------------------------------------------------------------------
# svd
# ---------------------------------------------------------------------------


def test_svd_diagonal_example():
    res = numkit.svd(np.diag([3.0, 1.0]))
    assert np.allclose(res.sigma, [3.0, 1.0], atol=1e-14)
    assert np.allclose(res.u @ np.diag(res.sigma) @ res.v.conj().T,
                       np.diag([3.0, 1.0]), atol=1e-13)


def test_svd_zero_matrix():
    res = numkit.svd(np.zeros((3, 3), dtype=complex))
    assert np.allclose(res.sigma, 0.0, atol=0.0)
    assert np.allclose(res.u @ res.u.conj().T, np.eye(3), atol=1e-14)
    assert np.allclose(res.v @ res.v.conj().T, np.eye(3), atol=1e-14)


def test_svd_random_reconstruction_and_unitarity():
    rng = np.random.default_rng(42)
    for n in (1, 2, 3, 4, 6, 8):
        a = random_complex(rng, n)
        res = numkit.svd(a)
        scale = np.sqrt(numkit.frobenius_norm_sq(a))
        recon = res.u @ np.diag(res.sigma) @ res.v.conj().T
        assert np.sqrt(numkit.frobenius_norm_sq(recon - a)) <= 1e-12 * scale
        assert np.sqrt(numkit.frobenius_norm_sq(
            res.u.conj().T @ res.u - np.eye(n))) <= 1e-12
        assert np.sqrt(numkit.frobenius_norm_sq(
            res.v.conj().T @ res.v - np.eye(n))) <= 1e-12
        assert np.all(np.diff(res.sigma) <= 1e-15)
        # oracle comparison on the spectrum
        assert np.allclose(res.sigma, np.linalg.svd(a, compute_uv=False),
                           rtol=1e-10, atol=1e-12)


def test_svd_rank_deficient_zeros_last():
    a = np.diag([2.0, 0.0, 1.0]).astype(complex)
    res = numkit.svd(a)
    assert np.allclose(res.sigma, [2.0, 1.0, 0.0], atol=1e-14)
    assert np.allclose(res.u @ res.u.conj().T, np.eye(3), atol=1e-13)
    recon = res.u @ np.diag(res.sigma) @ res.v.conj().T
    assert np.allclose(recon, a, atol=1e-13)


def test_svd_phase_convention_and_determinism():
    rng = np.random.default_rng(11)
    a = random_complex(rng, 4)
    r1 = numkit.svd(a)
    r2 = numkit.svd(a.copy())
    # bitwise reproducible
    assert np.array_equal(r1.u, r2.u)
    assert np.array_equal(r1.sigma, r2.sigma)
    assert np.array_equal(r1.v, r2.v)
    for j in range(4):
        col = r1.v[:, j]
        lead = np.argmax(np.abs(col) > 1e-12 * np.abs(col).max())
        assert col[lead].real >= 0.0
        assert abs(col[lead].imag) <= 1e-12 * abs(col[lead])


def test_svd_rejects_nonsquare():
    with pytest.raises(numkit.NumericalError):
        numkit.svd(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# herm_eig
# ---------------------------------------------------------------------------


def test_herm_eig_diagonal_example():
    w, v = numkit.herm_eig(np.diag([2.0, 5.0]))
    assert np.allclose(w, [5.0, 2.0], atol=1e-14)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, np.diag([2.0, 5.0]),
                       atol=1e-13)


def test_herm_eig_identity():
    w, v = numkit.herm_eig(np.eye(3))
    assert np.allclose(w, 1.0, atol=1e-15)
    assert np.allclose(v @ v.conj().T, np.eye(3), atol=1e-14)


def test_herm_eig_random_residual():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4, 6):
        m = random_complex(rng, n)
        a = m @ m.conj().T + np.eye(n)  # Hermitian, well conditioned
        w, v = numkit.herm_eig(a)
        scale = np.sqrt(numkit.frobenius_norm_sq(a))
        resid = v @ np.diag(w) @ v.conj().T - a
        assert np.sqrt(numkit.frobenius_norm_sq(resid)) <= 1e-11 * scale
        assert np.all(np.diff(w) <= 1e-12 * abs(w[0]))
        assert np.allclose(np.sort(w), np.linalg.eigvalsh(a), rtol=1e-10)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(numkit.NumericalError):
        numkit.herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


# ---------------------------------------------------------------------------
# inv_sqrt_psd
# ---------------------------------------------------------------------------


def test_inv_sqrt_psd_examples():
    assert np.allclose(numkit.inv_sqrt_psd(np.eye(3)), np.eye(3), atol=1e-13)
    out = numkit.inv_sqrt_psd(np.diag([4.0, 9.0]))
    assert np.allclose(out, np.diag([0.5, 1.0 / 3.0]), atol=1e-13)


def test_inv_sqrt_psd_defining_property():
    rng = np.random.default_rng(9)
    for n in (2, 3, 5):
        m = random_complex(rng, n)
        a = m.conj().T @ m + 0.1 * np.eye(n)
        b = numkit.inv_sqrt_psd(a)
        assert np.sqrt(numkit.frobenius_norm_sq(b @ a @ b - np.eye(n))) <= 1e-10
        assert np.sqrt(numkit.frobenius_norm_sq(b - b.conj().T)) <= 1e-12


def test_inv_sqrt_psd_rejections():
    with pytest.raises(numkit.NumericalError):
        numkit.inv_sqrt_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(numkit.NumericalError):
        numkit.inv_sqrt_psd(np.diag([1.0, 0.0]))  # rank deficient
    with pytest.raises(numkit.NumericalError):
        numkit.inv_sqrt_psd(-np.eye(2))
    with pytest.raises(numkit.NumericalError):
        numkit.inv_sqrt_psd(np.diag([1.0, 1e-15]))  # below the 1e-12 floor
