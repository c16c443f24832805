"""Operators on a tensor-product space at finite dimension.

Index convention is A-major throughout: product basis index (i, j) maps to
i * dim_b + j, so the B-side block (k, l) of an operator is the contiguous
dim_b x dim_b submatrix at rows k * dim_b and columns l * dim_b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, ZeroTrace

PPT_TOL = 1e-9


@dataclass(frozen=True)
class BipartiteOperator:
    """A matrix on the product space tagged with its (dim_a, dim_b) split."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise DimensionMismatch("subsystem dimensions must be >= 1")
        m = linalg.as_square(self.matrix)
        if m.shape[0] != self.dim_a * self.dim_b:
            raise DimensionMismatch(
                f"matrix side {m.shape[0]} != dim_a * dim_b = {self.dim_a * self.dim_b}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def _view(self) -> np.ndarray:
        return self.matrix.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)


@dataclass(frozen=True)
class StateCheck:
    is_hermitian: bool
    min_eigenvalue: float
    trace: complex
    verdict: str  # valid_state | not_normalized | not_psd | not_hermitian


def kron(a, b) -> BipartiteOperator:
    """Tensor product of two square matrices, tagged with their sizes."""
    a = linalg.as_square(a, "A")
    b = linalg.as_square(b, "B")
    return BipartiteOperator(a.shape[0], b.shape[0], np.kron(a, b))


def blocks(rho: BipartiteOperator, side: str = "A") -> list:
    """Block grid of rho: side A gives the dim_a x dim_a grid of B-space
    blocks, side B the dim_b x dim_b grid of A-space blocks."""
    r = rho._view()
    if side == "A":
        return [
            [r[k, :, l, :].copy() for l in range(rho.dim_a)]
            for k in range(rho.dim_a)
        ]
    if side == "B":
        return [
            [r[:, k, :, l].copy() for l in range(rho.dim_b)]
            for k in range(rho.dim_b)
        ]
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def from_blocks(grid: list, side: str = "A",
                dims: tuple | None = None) -> BipartiteOperator:
    """Inverse of blocks(); bit-exact round trip."""
    outer = len(grid)
    inner = grid[0][0].shape[0]
    if dims is None:
        dims = (outer, inner) if side == "A" else (inner, outer)
    dim_a, dim_b = dims
    out = np.zeros((dim_a, dim_b, dim_a, dim_b), dtype=np.complex128)
    for k in range(outer):
        for l in range(outer):
            if side == "A":
                out[k, :, l, :] = grid[k][l]
            else:
                out[:, k, :, l] = grid[k][l]
    n = dim_a * dim_b
    return BipartiteOperator(dim_a, dim_b, out.reshape(n, n))


def partial_transpose(rho: BipartiteOperator, side: str) -> BipartiteOperator:
    """Transpose one tensor factor; an exact involution."""
    r = rho._view()
    if side == "A":
        out = r.transpose(2, 1, 0, 3)
    elif side == "B":
        out = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    n = rho.dim_a * rho.dim_b
    return BipartiteOperator(rho.dim_a, rho.dim_b, out.reshape(n, n).copy())


def partial_trace(rho: BipartiteOperator, side: str) -> np.ndarray:
    """Trace out the named subsystem."""
    r = rho._view()
    if side == "B":
        return np.einsum("ijkj->ik", r)
    if side == "A":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def swap_subsystems(rho: BipartiteOperator) -> BipartiteOperator:
    """Exchange the roles of A and B (exact relabeling)."""
    out = rho._view().transpose(1, 0, 3, 2)
    n = rho.dim_a * rho.dim_b
    return BipartiteOperator(rho.dim_b, rho.dim_a, out.reshape(n, n).copy())


def is_ppt(rho: BipartiteOperator, tol: float = PPT_TOL):
    """(flag, min_eig_TA, min_eig_TB); flag true iff both minima >= -tol.

    Raises NotHermitian when rho itself is not Hermitian within tol.
    """
    min_ta = linalg.hermitian_eig(
        partial_transpose(rho, "A").matrix, tol=tol
    ).eigenvalues[-1]
    min_tb = linalg.hermitian_eig(
        partial_transpose(rho, "B").matrix, tol=tol
    ).eigenvalues[-1]
    flag = bool(min_ta >= -tol and min_tb >= -tol)
    return flag, float(min_ta), float(min_tb)


def truncate(rho: BipartiteOperator, k_a: int, k_b: int) -> BipartiteOperator:
    """Normalized compression onto the leading k_a and k_b basis vectors,
    returned as a k_a (x) k_b state. Raises ZeroTrace if the compression
    annihilates rho."""
    if not (1 <= k_a <= rho.dim_a and 1 <= k_b <= rho.dim_b):
        raise DimensionMismatch(
            f"truncation ({k_a},{k_b}) out of range for {rho.dim_a}x{rho.dim_b}"
        )
    sub = rho._view()[:k_a, :k_b, :k_a, :k_b].reshape(k_a * k_b, k_a * k_b)
    tr = float(np.trace(sub).real)
    full = abs(float(np.trace(rho.matrix).real))
    if tr <= 1e-14 * max(full, 1e-300):
        raise ZeroTrace(f"compression to ({k_a},{k_b}) has trace {tr:.3e}")
    return BipartiteOperator(k_a, k_b, sub / tr)


def embed(rho: BipartiteOperator, dim_a: int, dim_b: int) -> BipartiteOperator:
    """Zero-pad back onto the leading basis vectors of a larger space."""
    if dim_a < rho.dim_a or dim_b < rho.dim_b:
        raise DimensionMismatch("embedding target smaller than source")
    out = np.zeros((dim_a, dim_b, dim_a, dim_b), dtype=np.complex128)
    out[: rho.dim_a, : rho.dim_b, : rho.dim_a, : rho.dim_b] = rho._view()
    n = dim_a * dim_b
    return BipartiteOperator(dim_a, dim_b, out.reshape(n, n))


def trace_distance(x: BipartiteOperator, y: BipartiteOperator) -> float:
    if (x.dim_a, x.dim_b) != (y.dim_a, y.dim_b):
        raise DimensionMismatch("operands live on different product spaces")
    return linalg.trace_norm(x.matrix - y.matrix)


def check_state(rho: BipartiteOperator, tol: float = 1e-10) -> StateCheck:
    """Classify rho as a state; reports instead of raising."""
    m = rho.matrix
    fro = linalg.fro_norm(m)
    hermitian = linalg.fro_norm(m - m.conj().T) <= tol * max(1.0, fro)
    w = linalg.hermitian_eig(linalg.hermitize(m)).eigenvalues
    min_eig = float(w[-1])
    trace = complex(np.trace(m))
    if not hermitian:
        verdict = "not_hermitian"
    elif min_eig < -tol:
        verdict = "not_psd"
    elif abs(trace - 1.0) > tol:
        verdict = "not_normalized"
    else:
        verdict = "valid_state"
    return StateCheck(hermitian, min_eig, trace, verdict)
