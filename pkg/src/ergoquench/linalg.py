"""Dense complex matrix kernel.

Everything downstream (operators, Liouvillians, propagators, spectra) is
built on the four routines in this module: Kronecker products, Hermitian
eigendecomposition, the matrix exponential and Hermitian null spaces.

The eigensolver is a cyclic complex Jacobi iteration and the exponential is
Pade(13) scaling-and-squaring; both are implemented here so that the only
runtime dependency is the ndarray container itself.  System sizes never
exceed 16x16 for states and 256x256 for superoperators, where Jacobi is
both simple and accurate (residuals ~1e-14).
"""

from __future__ import annotations

import numpy as np

# Tolerances, fixed repo-wide.
HERM_TOL = 1e-12   # admissible Hermiticity defect of eigensolver inputs
EIG_TOL = 1e-10    # guaranteed eigen-residual, relative to the matrix scale
NULL_TOL = 1e-10   # default eigenvalue cutoff for null spaces

_JACOBI_SWEEP_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 60


class LinalgError(RuntimeError):
    """Raised when a kernel routine cannot satisfy its contract."""


def kron(a, b) -> np.ndarray:
    """Kronecker product with the left factor as the slow index.

    (a (x) b)[i*P + k, j*Q + l] = a[i, j] * b[k, l] for b of shape (P, Q);
    chains built left-to-right put site 1 in the leftmost factor.
    """
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m) -> np.ndarray:
    """Conjugate transpose (of a matrix or a batch of matrices)."""
    m = np.asarray(m)
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius(m) -> float:
    """Frobenius norm."""
    return float(np.sqrt((np.abs(np.asarray(m)) ** 2).sum()))


def one_norm(m) -> float:
    """Maximum absolute column sum."""
    return float(np.abs(np.asarray(m)).sum(axis=0).max())


def hermiticity_defect(m) -> float:
    """Largest absolute entry of m - m^dagger."""
    m = np.asarray(m)
    return float(np.abs(m - dagger(m)).max())


def hermitian_eig(m, check: bool = True):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : (D, D) array_like
        Hermitian within HERM_TOL (relative to its largest entry); the
        input is symmetrized before the iteration.
    check : bool
        Skip the Hermiticity check when the caller already guarantees it.

    Returns
    -------
    vals : (D,) float ndarray, ascending
    vecs : (D, D) complex ndarray, unitary, columns are eigenvectors

    Raises
    ------
    LinalgError
        If the input is not Hermitian within tolerance.
    """
    vals, vecs = hermitian_eig_batch(np.asarray(m, dtype=complex)[None], check=check)
    return vals[0], vecs[0]


def hermitian_eig_batch(ms, check: bool = True):
    """Cyclic complex Jacobi diagonalization of a batch of Hermitian matrices.

    Every matrix in the (B, D, D) batch is rotated with the same (p, q)
    sweep pattern; per-matrix angles differ.  Converges when the
    off-diagonal Frobenius mass drops below 1e-14 of each matrix's norm.
    """
    a = np.array(ms, dtype=complex)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise LinalgError(f"expected a (B, D, D) batch, got shape {a.shape}")
    nb, d = a.shape[0], a.shape[1]
    if check:
        defect = np.abs(a - dagger(a)).max() if a.size else 0.0
        scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
        if defect > HERM_TOL * scale:
            raise LinalgError(
                f"input not Hermitian: defect {defect:.3e} exceeds "
                f"{HERM_TOL:.0e} * scale")
    a = 0.5 * (a + dagger(a))
    vecs = np.broadcast_to(np.eye(d, dtype=complex), (nb, d, d)).copy()
    if d == 1:
        return a[:, 0, 0].real.copy().reshape(nb, 1), vecs

    fro = np.sqrt((np.abs(a) ** 2).sum(axis=(1, 2)))
    floor = np.maximum(fro, 1e-300)
    offmask = ~np.eye(d, dtype=bool)
    # rotations on pairs already below this threshold cannot affect convergence
    skip_thr = float((_JACOBI_SWEEP_TOL * floor).min()) / d

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt((np.abs(a[:, offmask]) ** 2).sum(axis=1))
        if np.all(off <= _JACOBI_SWEEP_TOL * floor):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                r = np.abs(apq)
                if not np.any(r > skip_thr):
                    continue
                active = r > 0.0
                phase = np.where(active, apq / np.where(active, r, 1.0), 1.0 + 0j)
                rs = np.where(active, r, 1.0)
                tau = (a[:, p, p].real - a[:, q, q].real) / (2.0 * rs)
                t = np.sign(tau) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(tau == 0.0, 1.0, t)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = np.where(active, t * c, 0.0)
                c = np.where(active, c, 1.0)
                cs = c[:, None]
                sp = (s * phase)[:, None]
                spc = (s * np.conj(phase))[:, None]
                # A <- U^dag (A U) with U = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = cs * colp + spc * colq
                a[:, :, q] = -sp * colp + cs * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = cs * rowp + sp * rowq
                a[:, q, :] = -spc * rowp + cs * rowq
                vp = vecs[:, :, p].copy()
                vq = vecs[:, :, q].copy()
                vecs[:, :, p] = cs * vp + spc * vq
                vecs[:, :, q] = -sp * vp + cs * vq
    else:
        raise LinalgError("Jacobi iteration failed to converge")

    vals = np.diagonal(a, axis1=1, axis2=2).real.copy()
    order = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    vecs = np.take_along_axis(vecs, order[:, None, :], axis=2)
    return vals, vecs


def solve(a, b) -> np.ndarray:
    """Solve a x = b by Gaussian elimination with partial pivoting."""
    a = np.array(a, dtype=complex)
    x = np.array(b, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or x.shape[0] != n:
        raise LinalgError(f"incompatible shapes {a.shape} and {x.shape}")
    vector_rhs = x.ndim == 1
    if vector_rhs:
        x = x[:, None]
    for k in range(n):
        piv = int(np.argmax(np.abs(a[k:, k]))) + k
        if np.abs(a[piv, k]) == 0.0:
            raise LinalgError("singular matrix in solve()")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            x[[k, piv]] = x[[piv, k]]
        factor = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= factor[:, None] * a[k, k:]
        x[k + 1:] -= factor[:, None] * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x[:, 0] if vector_rhs else x


# Pade(13) numerator coefficients (Higham's scaling-and-squaring method).
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
    33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def expm(m) -> np.ndarray:
    """Matrix exponential by Pade(13) with scaling and squaring."""
    a = np.asarray(m, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise LinalgError(f"expm expects a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("expm input has non-finite entries")
    nrm = one_norm(a)
    squarings = max(0, int(np.ceil(np.log2(nrm / _THETA13)))) if nrm > _THETA13 else 0
    a = a / (2.0 ** squarings)

    b = _PADE13
    eye = np.eye(n, dtype=complex)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye)
    x = solve(v - u, v + u)
    for _ in range(squarings):
        x = x @ x
    return x


def null_space_hermitian(m, tol: float = NULL_TOL) -> np.ndarray:
    """Orthonormal basis of the small-eigenvalue subspace of a Hermitian PSD matrix.

    Returns the eigenvectors whose eigenvalue is below ``tol`` as the
    columns of a (D, k) array (k may be zero).
    """
    vals, vecs = hermitian_eig(m)
    return vecs[:, vals < tol]
