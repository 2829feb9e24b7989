"""Small dense complex linear-algebra kernels.

Everything the capacity pipeline needs on tiny complex matrices: SVD,
Hermitian eigendecomposition, PSD inverse square root, Kronecker products
and Frobenius norms. The iterative kernels are hand-rolled Jacobi sweeps:
matrices here are at most a few dozen rows, so bit-for-bit reproducibility
across runs and machines matters more than asymptotic speed. Results must
not depend on BLAS vendor or thread count, hence no LAPACK on the hot path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericalError",
    "SvdResult",
    "frobenius_norm_sq",
    "herm_eig",
    "inv_sqrt_psd",
    "kron",
    "svd",
]

# Jacobi iteration limits. 100 sweeps is far beyond what any conditioned
# input needs (quadratic convergence kicks in after ~3); hitting the cap
# means the input is pathological and must be reported, never truncated.
_SWEEP_CAP = 100
_OFFDIAG_RTOL = 1e-14
# Column entries below this fraction of the column max do not qualify as the
# "first nonzero" component when fixing eigenvector/singular-vector phases.
_PHASE_RTOL = 1e-12


class NumericalError(RuntimeError):
    """An iterative kernel failed to converge or an input is unusable."""


@dataclass(frozen=True)
class SvdResult:
    """Full SVD a = u @ diag(sigma) @ v.conj().T with sigma descending."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray


def _as_square_complex(a: np.ndarray, op: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NumericalError(f"{op} expects a square matrix, got shape {a.shape}")
    return a


def frobenius_norm_sq(a) -> float:
    """Sum of squared magnitudes of all entries."""
    a = np.asarray(a, dtype=complex)
    return float(np.vdot(a, a).real)


def kron(a, b) -> np.ndarray:
    """Kronecker product. Pure index bookkeeping, delegated to numpy."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    """2x2 unitary J with (J^H A J) diagonal for A = [[app, apq], [apq*, aqq]].

    app, aqq are real (Hermitian diagonal). Returns J as a 2x2 array
    [[c, -s*phase], [s*conj(phase), c]] with c, s real, c^2 + s^2 = 1.
    """
    r = abs(apq)
    phase = apq / r
    tau = (aqq - app) / (2.0 * r)
    # Smaller-magnitude root of t^2 - 2*tau*t - 1 = 0 keeps the rotation
    # angle below pi/4, which is what makes cyclic Jacobi converge.
    if tau == 0.0:
        t = 1.0
    elif tau > 0.0:
        t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return np.array([[c, -s * phase], [s * np.conj(phase), c]], dtype=complex)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.vdot(off, off).real))


def _fix_column_phases(*mats_by_ref: np.ndarray, reference: np.ndarray) -> None:
    """Rotate each column of every matrix by the scalar that makes the first
    significant entry of the corresponding `reference` column real >= 0.

    All matrices are modified in place and share one scalar per column, so
    products like u @ diag(s) @ v^H are unchanged.
    """
    n = reference.shape[1]
    for j in range(n):
        col = reference[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        lead = int(np.argmax(mags > _PHASE_RTOL * top))
        pivot = col[lead]
        if pivot == 0.0:
            continue
        xi = np.conj(pivot) / abs(pivot)
        for m in mats_by_ref:
            m[:, j] *= xi


def herm_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Parameters
    ----------
    a : (n, n) array_like, Hermitian.

    Returns
    -------
    w : (n,) float array, eigenvalues in descending order.
    v : (n, n) complex array, unitary, a = v @ diag(w) @ v.conj().T.

    Raises
    ------
    NumericalError
        If `a` is not square/Hermitian or the sweep cap is exceeded.
    """
    a = _as_square_complex(a, "herm_eig")
    n = a.shape[0]
    norm = np.sqrt(frobenius_norm_sq(a))
    if norm > 0.0 and frobenius_norm_sq(a - a.conj().T) > (1e-10 * norm) ** 2:
        raise NumericalError("herm_eig expects a Hermitian matrix")
    w = 0.5 * (a + a.conj().T)  # kill roundoff skew
    v = np.eye(n, dtype=complex)
    if n > 1 and norm > 0.0:
        off_tol = _OFFDIAG_RTOL * norm
        # Entries below rot_tol cannot lift the off-diagonal mass above
        # off_tol even if all n^2 of them sit at the threshold.
        rot_tol = off_tol / (2.0 * n * n)
        for _ in range(_SWEEP_CAP):
            if _offdiag_norm(w) <= off_tol:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(w[p, q]) <= rot_tol:
                        continue
                    j = _jacobi_rotation(w[p, p].real, w[q, q].real, w[p, q])
                    w[:, [p, q]] = w[:, [p, q]] @ j
                    w[[p, q], :] = j.conj().T @ w[[p, q], :]
                    v[:, [p, q]] = v[:, [p, q]] @ j
        else:
            if _offdiag_norm(w) > off_tol:
                raise NumericalError("herm_eig did not converge within 100 sweeps")
    eigvals = np.diag(w).real.copy()
    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    v = v[:, order]
    _fix_column_phases(v, reference=v)
    return eigvals, v


def svd(a) -> SvdResult:
    """Full SVD of a square complex matrix by one-sided (Hestenes) Jacobi.

    Columns of a working copy are orthogonalized pairwise; their final norms
    are the singular values. Zero singular values are kept and ordered last,
    with the corresponding u columns filled by deterministic orthonormal
    completion so u stays unitary.

    Raises
    ------
    NumericalError
        If `a` is not square or the sweep cap is exceeded.
    """
    a = _as_square_complex(a, "svd")
    n = a.shape[0]
    w = a.copy()
    v = np.eye(n, dtype=complex)
    for _ in range(_SWEEP_CAP):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                cpq = complex(np.vdot(w[:, p], w[:, q]))
                npp = float(np.vdot(w[:, p], w[:, p]).real)
                nqq = float(np.vdot(w[:, q], w[:, q]).real)
                if abs(cpq) <= _OFFDIAG_RTOL * np.sqrt(npp * nqq):
                    continue
                j = _jacobi_rotation(npp, nqq, cpq)
                w[:, [p, q]] = w[:, [p, q]] @ j
                v[:, [p, q]] = v[:, [p, q]] @ j
                rotated = True
        if not rotated:
            break
    else:
        raise NumericalError("svd did not converge within 100 sweeps")

    sigma = np.sqrt(np.sum(np.abs(w) ** 2, axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    v = v[:, order]

    # Normalize the range columns; complete the null space deterministically.
    u = np.zeros((n, n), dtype=complex)
    sigma_floor = _OFFDIAG_RTOL * (float(sigma[0]) if n else 0.0)
    rank = int(np.sum(sigma > sigma_floor))
    for k in range(rank):
        u[:, k] = w[:, k] / sigma[k]
    filled = rank
    for basis_idx in range(n):
        if filled == n:
            break
        cand = np.zeros(n, dtype=complex)
        cand[basis_idx] = 1.0
        cand -= u[:, :filled] @ (u[:, :filled].conj().T @ cand)
        cnorm = np.sqrt(float(np.vdot(cand, cand).real))
        if cnorm > 0.5:  # basis vector mostly outside the current span
            u[:, filled] = cand / cnorm
            filled += 1
    if filled < n:
        raise NumericalError("svd failed to complete an orthonormal basis")

    _fix_column_phases(u[:, :rank], v[:, :rank], reference=v[:, :rank])
    _fix_column_phases(u[:, rank:], reference=u[:, rank:])
    _fix_column_phases(v[:, rank:], reference=v[:, rank:])
    return SvdResult(u=u, sigma=sigma, v=v)


def inv_sqrt_psd(a, eps: float | None = None) -> np.ndarray:
    """Inverse principal square root of a Hermitian positive definite matrix.

    Parameters
    ----------
    a : (n, n) array_like, Hermitian PSD.
    eps : float, optional
        Relative eigenvalue floor (default 1e-12). Any eigenvalue at or
        below eps * lambda_max is treated as rank deficiency.

    Returns
    -------
    b : (n, n) complex Hermitian with b @ a @ b = identity.

    Raises
    ------
    NumericalError
        If `a` is not Hermitian, has a meaningfully negative eigenvalue, or
        is rank deficient at the requested floor.
    """
    a = _as_square_complex(a, "inv_sqrt_psd")
    norm = np.sqrt(frobenius_norm_sq(a))
    if norm == 0.0:
        raise NumericalError("inv_sqrt_psd: rank deficient (zero matrix)")
    if frobenius_norm_sq(a - a.conj().T) > (1e-10 * norm) ** 2:
        raise NumericalError("inv_sqrt_psd expects a Hermitian matrix")
    if eps is None:
        eps = 1e-12
    w, v = herm_eig(a)
    lam_max = float(w[0])
    if lam_max <= 0.0:
        raise NumericalError("inv_sqrt_psd: matrix is not positive definite")
    if float(w[-1]) <= eps * lam_max:
        raise NumericalError(
            "inv_sqrt_psd: rank deficient "
            f"(min eigenvalue {w[-1]:.3e} vs max {lam_max:.3e})"
        )
    b = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    return 0.5 * (b + b.conj().T)
