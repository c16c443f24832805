"""Upper-triangular operator-matrix certificates for bipartite states.

A certificate holds the diagonal operators X_1..X_m (m = dim_a, each acting
on the B space) and the coefficient operators S_ij (1 <= i < j <= m), encoding
the block-triangular factor X with row k equal to
(0, ..., 0, X_k, S_{k,k+1} X_k, ..., S_{k,m} X_k); the state is X^H X
normalized. S_kk is the identity by convention and never stored; missing
(i, j) pairs are the zero operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bipartite import BipartiteOperator, partial_transpose
from .errors import (
    DimensionMismatch,
    NotHermitian,
    PreconditionFailed,
    RangeMismatch,
    ZeroOperator,
)

EXTRACT_CONSISTENCY_TOL = 1e-8
DEFAULT_COMMUTATOR_TOL = 1e-8


def _fro2(m: np.ndarray) -> float:
    return float(np.sum(np.abs(m) ** 2))


@dataclass(frozen=True)
class CholeskyCertificate:
    """Triangular-factor data; row_norms are derived on construction."""

    dim_a: int
    dim_b: int
    x_ops: tuple
    s_ops: dict
    row_norms: tuple = field(default=())

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise DimensionMismatch("subsystem dimensions must be >= 1")
        if len(self.x_ops) != self.dim_a:
            raise DimensionMismatch(
                f"expected {self.dim_a} diagonal operators, got {len(self.x_ops)}"
            )
        xs = []
        for k, x in enumerate(self.x_ops, start=1):
            x = linalg.as_square(x, f"X_{k}")
            if x.shape[0] != self.dim_b:
                raise DimensionMismatch(f"X_{k} must be {self.dim_b}x{self.dim_b}")
            x.setflags(write=False)
            xs.append(x)
        ss = {}
        for key, s in self.s_ops.items():
            i, j = key
            if not (1 <= i < j <= self.dim_a):
                raise DimensionMismatch(f"coefficient index {key} out of range")
            s = linalg.as_square(s, f"S_{i}{j}")
            if s.shape[0] != self.dim_b:
                raise DimensionMismatch(f"S_{i}{j} must be {self.dim_b}x{self.dim_b}")
            s.setflags(write=False)
            ss[(int(i), int(j))] = s
        norms = []
        for k in range(1, self.dim_a + 1):
            mass = _fro2(xs[k - 1])
            for j in range(k + 1, self.dim_a + 1):
                if (k, j) in ss:
                    mass += _fro2(ss[(k, j)] @ xs[k - 1])
            norms.append(mass)
        object.__setattr__(self, "x_ops", tuple(xs))
        object.__setattr__(self, "s_ops", ss)
        object.__setattr__(self, "row_norms", tuple(norms))

    def s(self, i: int, j: int) -> np.ndarray:
        """S_ij, with missing pairs read as the zero operator."""
        if (i, j) in self.s_ops:
            return self.s_ops[(i, j)]
        return np.zeros((self.dim_b, self.dim_b), dtype=np.complex128)

    def row_family(self, k: int) -> list:
        """Stored (j, S_kj) pairs of row k, ascending in j."""
        return [
            (j, self.s_ops[(k, j)])
            for j in range(k + 1, self.dim_a + 1)
            if (k, j) in self.s_ops
        ]


@dataclass(frozen=True)
class RowCheck:
    k: int
    max_normality: float
    max_cross: float
    worst_pair: tuple | None
    scale: float
    ok: bool


@dataclass(frozen=True)
class SemiSspptReport:
    rows: tuple
    verdict: bool
    tol: float

    def worst_residual(self) -> float:
        return max(
            (max(r.max_normality, r.max_cross) for r in self.rows), default=0.0
        )


def assemble_factor(cert: CholeskyCertificate) -> np.ndarray:
    """The full block-triangular factor X as one matrix."""
    da, db = cert.dim_a, cert.dim_b
    x = np.zeros((da * db, da * db), dtype=np.complex128)
    for k in range(1, da + 1):
        rk = (k - 1) * db
        x[rk : rk + db, rk : rk + db] = cert.x_ops[k - 1]
        for j, s in cert.row_family(k):
            cj = (j - 1) * db
            x[rk : rk + db, cj : cj + db] = s @ cert.x_ops[k - 1]
    return x


def assemble_state(cert: CholeskyCertificate):
    """(state, norm) with state = X^H X / Tr(X^H X) and norm = Tr(X^H X)."""
    x = assemble_factor(cert)
    gram = x.conj().T @ x
    norm = float(np.trace(gram).real)
    if norm <= 0.0:
        raise ZeroOperator("certificate assembles to the zero operator")
    rho = linalg.hermitize(gram) / norm
    return BipartiteOperator(cert.dim_a, cert.dim_b, rho), norm


def block_cholesky(rho: BipartiteOperator, tol: float = 1e-9) -> list:
    """Upper-triangular block grid U with U^H U = rho, via QR of the PSD root.

    The QR route stays valid for singular rho, where the classical recursion
    breaks down; the diagonal of the underlying factor is real nonnegative,
    making the output deterministic.
    """
    m = rho.matrix
    fro = linalg.fro_norm(m)
    if linalg.fro_norm(m - m.conj().T) > tol * max(1.0, fro):
        raise NotHermitian("input operator is not Hermitian within tol")
    root = linalg.psd_sqrt(linalg.hermitize(m), tol=tol)
    r = linalg.qr_upper(root)
    db = rho.dim_b
    grid = []
    for i in range(rho.dim_a):
        row = []
        for j in range(rho.dim_a):
            row.append(r[i * db : (i + 1) * db, j * db : (j + 1) * db].copy())
        grid.append(row)
    return grid


def grid_matrix(grid: list, db: int) -> np.ndarray:
    """Flatten a block grid into one matrix."""
    da = len(grid)
    out = np.zeros((da * db, da * db), dtype=np.complex128)
    for i in range(da):
        for j in range(da):
            out[i * db : (i + 1) * db, j * db : (j + 1) * db] = grid[i][j]
    return out


def extract_operators(grid: list, rank_tol: float = linalg.DEFAULT_RANK_TOL,
                      ridge: float = 0.0) -> CholeskyCertificate:
    """Recover {X_i} and {S_ij} from an upper-triangular block grid.

    S_ij is the least-squares solution of S_ij X_i = U_ij; if the solution
    fails the consistency bound, the row has no coefficient-operator form in
    this basis and RangeMismatch(i, j) is raised. The optional ridge
    regularizes the solve (exploratory use only, default off).
    """
    da = len(grid)
    if da == 0 or any(len(row) != da for row in grid):
        raise DimensionMismatch("grid must be square")
    db = grid[0][0].shape[0]
    full = grid_matrix(grid, db)
    scale = max(1.0, linalg.fro_norm(full))
    for i in range(1, da):
        for j in range(i):
            if _fro2(grid[i][j]) > (1e-12 * scale) ** 2:
                raise DimensionMismatch(
                    f"grid is not upper-triangular: block ({i + 1},{j + 1}) nonzero"
                )
    x_ops = []
    s_ops = {}
    for i in range(1, da + 1):
        x = np.array(grid[i - 1][i - 1], dtype=np.complex128)
        x_ops.append(x)
        for j in range(i + 1, da + 1):
            b = np.array(grid[i - 1][j - 1], dtype=np.complex128)
            if _fro2(b) == 0.0:
                continue
            if ridge > 0.0:
                gram = x @ x.conj().T + ridge * np.eye(db)
                s = b @ x.conj().T @ linalg.pinv(gram, rank_tol)
            else:
                s = b @ linalg.pinv(x, rank_tol)
            residual = linalg.fro_norm(s @ x - b)
            if residual > EXTRACT_CONSISTENCY_TOL * scale:
                raise RangeMismatch(i, j, residual)
            s_ops[(i, j)] = s
    return CholeskyCertificate(da, db, tuple(x_ops), s_ops)


def verify_semi_ssppt(cert: CholeskyCertificate,
                      tol: float = DEFAULT_COMMUTATOR_TOL) -> SemiSspptReport:
    """Check the row-commutation condition [S_ki, S_kj^H] = 0 for k < i <= j.

    The i = j case is the normality residual of S_ki. Residuals are compared
    against tol * max(1, max row ||S||_op^2); verification never raises.
    """
    rows = []
    verdict = True
    for k in range(1, cert.dim_a):
        family = cert.row_family(k)
        scale = 1.0
        for _, s in family:
            scale = max(scale, linalg.op_norm(s) ** 2)
        max_norm = 0.0
        max_cross = 0.0
        worst = None
        worst_val = -1.0
        for a in range(len(family)):
            i, s_i = family[a]
            for b in range(a, len(family)):
                j, s_j = family[b]
                residual = linalg.fro_norm(
                    s_i @ s_j.conj().T - s_j.conj().T @ s_i
                )
                if i == j:
                    max_norm = max(max_norm, residual)
                else:
                    max_cross = max(max_cross, residual)
                if residual > worst_val:
                    worst_val = residual
                    worst = (i, j)
        ok = max(max_norm, max_cross) <= tol * scale
        verdict = verdict and ok
        rows.append(RowCheck(k, max_norm, max_cross, worst, scale, ok))
    return SemiSspptReport(tuple(rows), verdict, tol)


def check_transpose_refactorization(cert2: CholeskyCertificate, rho: BipartiteOperator,
                     tol: float = 1e-8,
                     rank_tol: float = linalg.DEFAULT_RANK_TOL) -> bool:
    """Two-row certificate check: X_1 full rank plus the partial-transpose
    refactorization Y^H Y = rho^{T_A}, where Y swaps S_12 for its adjoint.

    When both hold, returns whether S_12 is normal within tol (which the
    two conditions force in exact arithmetic). Raises PreconditionFailed if
    the certificate does not assemble to rho.
    """
    if cert2.dim_a != 2:
        raise DimensionMismatch("check requires a two-row certificate")
    assembled, norm = assemble_state(cert2)
    if (assembled.dim_a, assembled.dim_b) != (rho.dim_a, rho.dim_b):
        raise PreconditionFailed("certificate dimensions do not match the state")
    if linalg.fro_norm(assembled.matrix - rho.matrix) > tol * max(
        1.0, linalg.fro_norm(rho.matrix)
    ):
        raise PreconditionFailed("certificate does not assemble to the given state")
    x1 = cert2.x_ops[0]
    s = linalg.singular_values(x1)
    full_rank = bool(s.size and s[-1] > rank_tol * s[0])
    if not full_rank:
        return False
    y_cert = CholeskyCertificate(
        2, cert2.dim_b, cert2.x_ops, {(1, 2): cert2.s(1, 2).conj().T}
    )
    y = assemble_factor(y_cert)
    gram_x = assemble_factor(cert2)
    gram_x = gram_x.conj().T @ gram_x
    target = partial_transpose(
        BipartiteOperator(2, cert2.dim_b, gram_x), "A"
    ).matrix
    if linalg.fro_norm(y.conj().T @ y - target) > tol * max(
        1.0, linalg.fro_norm(gram_x)
    ):
        return False
    s12 = cert2.s(1, 2)
    scale = max(1.0, linalg.op_norm(s12) ** 2)
    residual = linalg.fro_norm(
        s12 @ s12.conj().T - s12.conj().T @ s12
    )
    return bool(residual <= tol * scale)
