"""Dense complex linear algebra on deterministic Jacobi rotation kernels.

Everything downstream (PPT tests, triangular factors, joint diagonalization,
trace-norms) routes through the two kernels in sepfactory.backend: a cyclic
two-sided Jacobi for Hermitian eigenproblems and a one-sided Jacobi (Hestenes)
for singular values. Both are deterministic: fixed sweep order, no pivoting,
fixed phase conventions, so identical inputs give identical output bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD

MAX_SWEEPS = 64
OFF_DIAG_REL = 1e-14  # two-sided convergence: off-diagonal mass vs ||M||_F
ORTHO_REL = 1e-14  # one-sided convergence: column-pair orthogonality
DEFAULT_RANK_TOL = 1e-10
RECON_TOL = 1e-10


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and copy input into a fresh complex128 2-D array."""
    a = np.array(m, dtype=np.complex128, order="C", copy=True)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def fro_norm(m: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


@dataclass(frozen=True)
class Spectral:
    """Eigensystem of a Hermitian matrix, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)


def _eig_order(w: np.ndarray, v: np.ndarray):
    # descending eigenvalues; exact ties broken by the eigenvector column,
    # compared lexicographically entry by entry on (re, im)
    order = np.argsort(-w, kind="stable")
    ws = w[order]
    if ws.size < 2 or not np.any(ws[1:] == ws[:-1]):
        return order

    def key(k):
        col = v[:, k]
        return (-w[k],) + tuple(
            part for c in col for part in (c.real, c.imag)
        )

    return sorted(range(len(w)), key=key)


def hermitian_eig(m, tol: float = 1e-10) -> Spectral:
    """Full eigensystem of a Hermitian matrix by cyclic Jacobi rotations.

    Raises NotHermitian when the symmetry defect exceeds tol * ||M||_F and
    NoConvergence when the sweep budget is exhausted or the reconstruction
    residual exceeds 1e-10 * max(1, ||M||_F).
    """
    m = as_square(m)
    n = m.shape[0]
    fro = fro_norm(m)
    if fro_norm(m - m.conj().T) > tol * fro:
        raise NotHermitian(
            f"symmetry defect exceeds {tol:g} * ||M||_F"
        )
    h = np.ascontiguousarray(hermitize(m))
    v = np.eye(n, dtype=np.complex128)
    _, _, converged = backend.jacobi_sweeps(h, v, MAX_SWEEPS, OFF_DIAG_REL * fro)
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(h).real.copy()
    order = _eig_order(w, v)
    w = w[order]
    v = np.ascontiguousarray(v[:, order])
    recon = (v * w) @ v.conj().T
    if fro_norm(recon - m) > RECON_TOL * max(1.0, fro):
        raise NoConvergence("eigendecomposition reconstruction residual too large")
    return Spectral(w, v)


def psd_sqrt(m, tol: float | None = None) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-tol, 0) are clamped to 0.

    tol defaults to 1e-10 * ||M||_op. Raises NotPSD below -tol.
    """
    spec = hermitian_eig(m)
    w = spec.eigenvalues
    if tol is None:
        opn = float(np.max(np.abs(w))) if w.size else 0.0
        tol = 1e-10 * opn
    if w.size and w[-1] < -tol:
        raise NotPSD(f"minimum eigenvalue {w[-1]:.3e} below -{tol:.3e}")
    root = np.sqrt(np.maximum(w, 0.0))
    v = spec.eigenvectors
    return hermitize((v * root) @ v.conj().T)


def _one_sided(m: np.ndarray):
    # returns (columns, right_vectors, singular_values) sorted descending
    a = np.array(m, dtype=np.complex128, order="C", copy=True)
    n = a.shape[1]
    v = np.eye(n, dtype=np.complex128)
    _, converged = backend.hestenes_sweeps(a, v, MAX_SWEEPS, ORTHO_REL)
    if not converged:
        raise NoConvergence(f"one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")
    s = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    order = np.argsort(-s, kind="stable")
    return a[:, order], v[:, order], s[order]


def singular_values(m) -> np.ndarray:
    """All min(rows, cols) singular values, descending."""
    m = as_matrix(m)
    if m.shape[0] < m.shape[1]:
        m = m.conj().T
    _, _, s = _one_sided(m)
    return s


def svd_compact(m, rank_tol: float = DEFAULT_RANK_TOL):
    """Compact SVD (u, s, v) with m ~ u @ diag(s) @ v^H.

    Columns with singular value <= rank_tol * s_max are dropped; one-sided
    Jacobi keeps small singular values accurate to high relative precision,
    so the cutoff is meaningful even near rank deficiency.
    """
    m = as_matrix(m)
    if m.shape[0] < m.shape[1]:
        u, s, v = svd_compact(m.conj().T, rank_tol)
        return v, s, u
    cols, v, s = _one_sided(m)
    smax = s[0] if s.size else 0.0
    keep = s > rank_tol * smax if smax > 0 else np.zeros(s.shape, dtype=bool)
    u = cols[:, keep] / s[keep]
    return u, s[keep].copy(), v[:, keep]


def pinv(m, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with cutoff at rank_tol * s_max."""
    m = as_matrix(m)
    u, s, v = svd_compact(m, rank_tol)
    if s.size == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    return (v / s) @ u.conj().T


def qr_full(m):
    """Householder QR of a square matrix, R with real nonnegative diagonal."""
    a = as_square(m)
    n = a.shape[0]
    qh = np.eye(n, dtype=np.complex128)
    for k in range(n):
        x = a[k:, k]
        nx = float(np.sqrt(np.real(np.vdot(x, x))))
        if nx == 0.0:
            continue
        x0 = a[k, k]
        ph = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
        w = x.copy()
        w[0] -= -ph * nx
        wn2 = float(np.real(np.vdot(w, w)))
        if wn2 == 0.0:
            continue
        f = 2.0 / wn2
        a[k:, :] -= np.outer(w, f * (w.conj() @ a[k:, :]))
        qh[k:, :] -= np.outer(w, f * (w.conj() @ qh[k:, :]))
    il, jl = np.tril_indices(n, -1)
    a[il, jl] = 0.0
    d = np.diag(a).copy()
    ph = np.ones(n, dtype=np.complex128)
    nz = d != 0
    ph[nz] = d[nz] / np.abs(d[nz])
    a *= ph.conj()[:, None]
    qh *= ph.conj()[:, None]
    a[np.arange(n), np.arange(n)] = np.abs(d)
    return qh.conj().T, a


def qr_upper(m) -> np.ndarray:
    """Upper-triangular R with R^H R = M^H M and real nonnegative diagonal."""
    return qr_full(m)[1]


def norms(m):
    """(trace_norm, fro_norm, op_norm) via singular values."""
    m = as_matrix(m)
    s = singular_values(m)
    tn = float(np.sum(s))
    op = float(s[0]) if s.size else 0.0
    return tn, fro_norm(m), op


def trace_norm(m) -> float:
    return norms(m)[0]


def op_norm(m) -> float:
    m = as_matrix(m)
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def commutator_residual(a, b) -> float:
    """||AB - BA||_F; zero exactly only for commuting inputs."""
    a = as_square(a, "A")
    b = as_square(b, "B")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return fro_norm(a @ b - b @ a)
