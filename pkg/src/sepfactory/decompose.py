"""Product-ensemble extraction from certified triangular-factor data.

The pipeline splits the factor into single-row components, diagonalizes each
row's commuting normal coefficient family in one unitary basis, and reads off
one rank-one product term per row and basis vector. A dedicated two-row
pathway factors states through contraction solves when one subsystem is a
qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .bipartite import (
    BipartiteOperator,
    blocks,
    check_state,
    swap_subsystems,
    trace_distance,
)
from .cholesky import CholeskyCertificate, assemble_state, verify_semi_ssppt
from .errors import (
    ConditionFailed,
    DimensionMismatch,
    NoConvergence,
    NormalityFailed,
    NotCommuting,
    NotSemiSsppt,
    PreconditionFailed,
    Unsolvable,
    ZeroOperator,
)
from .rng import Prng, derive_seed

ROW_DROP_REL = 1e-14
WEIGHT_PRUNE_TOL = 1e-12
DOUGLAS_RESIDUAL_TOL = 1e-8
CLUSTER_REL = 1e-8
SCALAR_REL = 1e-12
INNER_SPLIT_RETRIES = 8


@dataclass(frozen=True)
class RowComponent:
    """One nonzero row of the factor: diagonal operator, coefficients, mass."""

    k: int
    x_op: np.ndarray
    s_row: tuple  # ((j, S_kj), ...) for stored j > k
    p: float


@dataclass(frozen=True)
class JointEigenbasis:
    """Common unitary eigenbasis of a commuting normal family.

    values[i, w] is the eigenvalue of family member i on basis column w;
    residual bounds ||V^H S_i V - diag(values[i])||_F over the family.
    """

    basis: np.ndarray
    values: np.ndarray
    residual: float


@dataclass(frozen=True)
class ProductTerm:
    weight: float
    ket_a: np.ndarray
    ket_b: np.ndarray


@dataclass(frozen=True)
class ProductEnsemble:
    """Convex mixture of pure product states: sum of w |a><a| (x) |b><b|."""

    dim_a: int
    dim_b: int
    terms: tuple

    def __post_init__(self):
        total = 0.0
        for t in self.terms:
            if t.weight < 0:
                raise ValueError("ensemble weights must be nonnegative")
            if t.ket_a.shape != (self.dim_a,) or t.ket_b.shape != (self.dim_b,):
                raise DimensionMismatch("ensemble term has wrong vector shape")
            for ket in (t.ket_a, t.ket_b):
                if abs(np.sqrt(np.sum(np.abs(ket) ** 2)) - 1.0) > 1e-12:
                    raise ValueError("ensemble factors must be unit norm")
            total += t.weight
        if self.terms and abs(total - 1.0) > 1e-10:
            raise ValueError(f"ensemble weights sum to {total!r}, not 1")


def row_split(cert: CholeskyCertificate) -> list:
    """Nonzero single-row components; the component Gram matrices sum back
    to the unnormalized assembled operator."""
    total = sum(cert.row_norms)
    out = []
    for k in range(1, cert.dim_a + 1):
        p = cert.row_norms[k - 1]
        if p <= ROW_DROP_REL * total:
            continue
        out.append(
            RowComponent(k, cert.x_ops[k - 1], tuple(cert.row_family(k)), p)
        )
    return out


def component_operator(rc: RowComponent, dim_a: int, dim_b: int) -> np.ndarray:
    """The full-size Gram matrix C_k^H C_k of one row component."""
    blks = {rc.k: rc.x_op}
    for j, s in rc.s_row:
        blks[j] = s @ rc.x_op
    out = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=np.complex128)
    for i, bi in blks.items():
        for j, bj in blks.items():
            out[
                (i - 1) * dim_b : i * dim_b, (j - 1) * dim_b : j * dim_b
            ] = bi.conj().T @ bj
    return out


class _SplitFailed(Exception):
    pass


def _spread(m: np.ndarray) -> float:
    n = m.shape[0]
    centered = m - (np.trace(m) / n) * np.eye(n)
    return linalg.fro_norm(centered)


def _simdiag(mats: list, rng: Prng) -> np.ndarray:
    """Recursive common eigenbasis of commuting Hermitian matrices."""
    n = mats[0].shape[0]
    if n == 1:
        return np.eye(1, dtype=np.complex128)
    active = [m for m in mats if _spread(m) > SCALAR_REL * max(1.0, linalg.fro_norm(m))]
    if not active:
        return np.eye(n, dtype=np.complex128)
    for _ in range(INNER_SPLIT_RETRIES):
        coefs = rng.uniform(1.0, 2.0, len(active))
        probe = np.zeros((n, n), dtype=np.complex128)
        for c, m in zip(coefs, active):
            probe += c * m
        spec = linalg.hermitian_eig(linalg.hermitize(probe))
        w, v = spec.eigenvalues, spec.eigenvectors
        delta = CLUSTER_REL * max(1.0, float(np.max(np.abs(w))))
        clusters = []
        start = 0
        for idx in range(1, n):
            if w[idx - 1] - w[idx] > delta:
                clusters.append((start, idx))
                start = idx
        clusters.append((start, n))
        if len(clusters) == 1:
            # no resolvable spectral gap: either the members are all nearly
            # scalar here (any basis is fine; the post-hoc residual decides)
            # or the combination cancelled, which a fresh draw fixes
            if _spread(probe) <= delta * np.sqrt(n):
                return np.eye(n, dtype=np.complex128)
            continue
        out = np.array(v)
        for lo, hi in clusters:
            if hi - lo == 1:
                continue
            q = v[:, lo:hi]
            compressed = [linalg.hermitize(q.conj().T @ m @ q) for m in active]
            wsub = _simdiag(compressed, rng)
            out[:, lo:hi] = q @ wsub
        return out
    raise _SplitFailed


def joint_diagonalize(family: list, tol: float = 1e-8, max_retries: int = 5,
                      seed: int = 0) -> JointEigenbasis:
    """One unitary basis diagonalizing a commuting family of normal matrices.

    Preconditions (NotCommuting otherwise): every member normal within tol,
    every pair satisfying ||[S_i, S_j^H]||_F and ||[S_i, S_j]||_F within
    tol * scale, scale = max(1, max ||S||_op^2). The probe is a random real
    combination of the Hermitian parts with coefficients uniform on [1, 2];
    degenerate eigenspaces are refined recursively and the result is verified
    post hoc, retried with fresh coefficients up to max_retries, then
    NoConvergence.
    """
    if not family:
        raise ValueError("family must contain at least one matrix")
    mats = [linalg.as_square(m, f"family[{i}]") for i, m in enumerate(family)]
    n = mats[0].shape[0]
    if any(m.shape[0] != n for m in mats):
        raise DimensionMismatch("family members must share one size")
    scale = 1.0
    for m in mats:
        scale = max(scale, linalg.op_norm(m) ** 2)
    for i, a in enumerate(mats):
        for j in range(i, len(mats)):
            b = mats[j]
            adj = linalg.fro_norm(a @ b.conj().T - b.conj().T @ a)
            plain = linalg.fro_norm(a @ b - b @ a)
            if max(adj, plain) > tol * scale:
                raise NotCommuting(
                    f"members {i} and {j}: residual {max(adj, plain):.3e} "
                    f"exceeds {tol:g} * {scale:.3e}"
                )
    herm_parts = []
    for m in mats:
        herm_parts.append(linalg.hermitize(m))
        herm_parts.append(linalg.hermitize((m - m.conj().T) / 2j))
    for attempt in range(max_retries):
        rng = Prng(derive_seed(seed, 0x5D, attempt))
        try:
            v = _simdiag(herm_parts, rng)
        except _SplitFailed:
            continue
        values = np.empty((len(mats), n), dtype=np.complex128)
        residual = 0.0
        for i, m in enumerate(mats):
            conj = v.conj().T @ m @ v
            values[i] = np.diag(conj)
            off = conj - np.diag(values[i])
            residual = max(residual, linalg.fro_norm(off))
        if residual <= tol * scale:
            return JointEigenbasis(v, values, residual)
    raise NoConvergence(
        f"no common eigenbasis within tolerance after {max_retries} attempts"
    )


def extract_ensemble(cert: CholeskyCertificate, tol: float = 1e-8,
                     seed: int = 0,
                     prune_tol: float = WEIGHT_PRUNE_TOL) -> ProductEnsemble:
    """Explicit product ensemble realizing the certified state.

    Row k contributes one term per joint eigenvector e_w of its coefficient
    family: the A factor has components conj(f_ki(w)) for i >= k (f_kk = 1),
    zero below k; the B factor is X_k^H e_w. Terms with relative weight below
    prune_tol are dropped and the weights renormalized; the term count is at
    most dim_a * dim_b.
    """
    report = verify_semi_ssppt(cert, tol)
    if not report.verdict:
        raise NotSemiSsppt(
            f"worst row residual {report.worst_residual():.3e} at tol {tol:g}"
        )
    total_mass = sum(cert.row_norms)
    raw = []
    for rc in row_split(cert):
        family_js = [j for j, _ in rc.s_row]
        family = [s for _, s in rc.s_row]
        if family:
            jd = joint_diagonalize(
                family, tol=tol, seed=derive_seed(seed, rc.k)
            )
            basis, values = jd.basis, jd.values
        else:
            basis = np.eye(cert.dim_b, dtype=np.complex128)
            values = np.zeros((0, cert.dim_b), dtype=np.complex128)
        b_mat = rc.x_op.conj().T @ basis
        for w in range(cert.dim_b):
            a_vec = np.zeros(cert.dim_a, dtype=np.complex128)
            a_vec[rc.k - 1] = 1.0
            for t, j in enumerate(family_js):
                a_vec[j - 1] = np.conj(values[t, w])
            b_vec = b_mat[:, w]
            a2 = float(np.sum(np.abs(a_vec) ** 2))
            b2 = float(np.sum(np.abs(b_vec) ** 2))
            weight = a2 * b2
            if weight <= prune_tol * total_mass:
                continue
            raw.append(
                (weight, a_vec / np.sqrt(a2), b_vec / np.sqrt(b2))
            )
    if not raw:
        raise ZeroOperator("certificate carries no weight to decompose")
    total = sum(w for w, _, _ in raw)
    terms = tuple(
        ProductTerm(w / total, a, b) for w, a, b in raw
    )
    return ProductEnsemble(cert.dim_a, cert.dim_b, terms)


def reconstruct(ensemble: ProductEnsemble) -> BipartiteOperator:
    """Mix the product terms back into a density matrix."""
    n = ensemble.dim_a * ensemble.dim_b
    out = np.zeros((n, n), dtype=np.complex128)
    for t in ensemble.terms:
        out += t.weight * np.kron(
            np.outer(t.ket_a, t.ket_a.conj()), np.outer(t.ket_b, t.ket_b.conj())
        )
    return BipartiteOperator(ensemble.dim_a, ensemble.dim_b, linalg.hermitize(out))


def douglas_solve(a_root: np.ndarray, b: np.ndarray,
                  rank_tol: float = linalg.DEFAULT_RANK_TOL):
    """Solve a_root @ G = b in the least-squares sense; (G, ||G||_op).

    Raises Unsolvable when the residual exceeds 1e-8 * max(1, ||b||_F),
    i.e. when the range condition ran(b) within ran(a_root) fails.
    """
    a_root = linalg.as_square(a_root, "a_root")
    b = linalg.as_matrix(b, "b")
    g = linalg.pinv(a_root, rank_tol) @ b
    residual = linalg.fro_norm(a_root @ g - b)
    if residual > DOUGLAS_RESIDUAL_TOL * max(1.0, linalg.fro_norm(b)):
        raise Unsolvable(
            f"factor equation residual {residual:.3e}; "
            "right-hand side leaves the root's range"
        )
    return g, linalg.op_norm(g)


def _row_swap(rho: BipartiteOperator) -> BipartiteOperator:
    perm = np.kron(
        np.array([[0, 1], [1, 0]], dtype=np.complex128), np.eye(rho.dim_b)
    )
    return BipartiteOperator(rho.dim_a, rho.dim_b, perm @ rho.matrix @ perm)


def _qubit_construct(rho: BipartiteOperator, tol, rank_tol, seed):
    grid = blocks(rho, side="A")
    r11, r12, r22 = grid[0][0], grid[0][1], grid[1][1]
    root1 = linalg.psd_sqrt(linalg.hermitize(r11), tol=tol)
    root2 = linalg.psd_sqrt(linalg.hermitize(r22), tol=tol)
    s_contr, _ = douglas_solve(root1, root2, rank_tol)
    g1, _ = douglas_solve(root1, r12, rank_tol)
    t_contr = g1 @ linalg.pinv(root2, rank_tol)
    if linalg.fro_norm(t_contr @ root2 - g1) > DOUGLAS_RESIDUAL_TOL * max(
        1.0, linalg.fro_norm(g1)
    ):
        raise Unsolvable("off-diagonal block leaves the range of the root pair")
    if linalg.fro_norm(root1 @ t_contr @ root2 - r12) > DOUGLAS_RESIDUAL_TOL * max(
        1.0, linalg.fro_norm(r12)
    ):
        raise Unsolvable("two-sided contraction solve failed on the off-diagonal")
    s12 = t_contr @ s_contr.conj().T
    x2_sq = linalg.hermitize(r22 - root1 @ s12.conj().T @ s12 @ root1)
    x2 = linalg.psd_sqrt(x2_sq, tol=tol)
    cert = CholeskyCertificate(2, rho.dim_b, (root1, x2), {(1, 2): s12})
    assembled, _ = assemble_state(cert)
    if trace_distance(assembled, rho) > tol:
        raise Unsolvable("constructed certificate does not reproduce the state")
    scale = max(1.0, linalg.op_norm(s12) ** 2)
    normality = linalg.fro_norm(s12 @ s12.conj().T - s12.conj().T @ s12)
    if normality > tol * scale:
        raise NormalityFailed(
            f"coefficient operator normality residual {normality:.3e}"
        )
    ensemble = extract_ensemble(cert, tol=tol, seed=seed)
    return cert, ensemble


def qubit_pathway(rho: BipartiteOperator, tol: float = 1e-8,
                  rank_tol: float = linalg.DEFAULT_RANK_TOL, seed: int = 0):
    """Separable decomposition of a 2 (x) n state under block ordering.

    Requires rho_11 >= rho_22 - tol or the reverse (rows are swapped for the
    reverse; the returned certificate is then expressed in the swapped basis
    while the ensemble is mapped back). A 2-dimensional B side is handled by
    exchanging subsystem roles the same way. Builds the contractions S and T
    with least-squares solves, sets S_12 = T S^H, X_1 = sqrt(rho_11), X_2 the
    clamped root of rho_22 - sqrt(rho_11) S_12^H S_12 sqrt(rho_11), checks the
    certificate reproduces rho and that S_12 is normal, then extracts the
    ensemble.
    """
    if rho.dim_a != 2:
        if rho.dim_b != 2:
            raise DimensionMismatch("one subsystem must be 2-dimensional")
        cert, ens = qubit_pathway(swap_subsystems(rho), tol, rank_tol, seed)
        flipped = tuple(
            ProductTerm(t.weight, t.ket_b, t.ket_a) for t in ens.terms
        )
        return cert, ProductEnsemble(rho.dim_a, rho.dim_b, flipped)
    verdict = check_state(rho, tol=max(tol, 1e-8)).verdict
    if verdict != "valid_state":
        raise PreconditionFailed(f"input is {verdict}")
    grid = blocks(rho, side="A")
    diff = linalg.hermitize(grid[0][0] - grid[1][1])
    spec = linalg.hermitian_eig(diff)
    if spec.eigenvalues[-1] >= -tol:
        return _qubit_construct(rho, tol, rank_tol, seed)
    if spec.eigenvalues[0] <= tol:
        cert, ens = _qubit_construct(_row_swap(rho), tol, rank_tol, seed)
        perm = np.array([[0, 1], [1, 0]], dtype=np.complex128)
        back = tuple(
            ProductTerm(t.weight, perm @ t.ket_a, t.ket_b) for t in ens.terms
        )
        return cert, ProductEnsemble(2, rho.dim_b, back)
    raise ConditionFailed(
        "neither diagonal-block ordering holds within tolerance"
    )
