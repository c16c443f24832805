"""Finite-rank entanglement witnesses from negative partial-transpose modes.

The witness for a state with a negative partial-transpose eigenvalue is the
partial transpose of the projector onto the offending eigenvector: it pairs
nonnegatively with every positive product operator and evaluates to that
negative eigenvalue on the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .bipartite import BipartiteOperator, partial_transpose
from .errors import NotHermitian
from .rng import Prng, derive_seed

_PAIRING_TAG = 0x57


@dataclass(frozen=True)
class WitnessReport:
    witness: BipartiteOperator
    side: str  # which partial transpose exposed the negativity
    value_on_target: float
    pairing_min: float | None
    samples: int


def npt_witness(rho: BipartiteOperator, tol: float = 1e-9, samples: int = 0,
                seed: int = 0):
    """Decomposable witness for an NPT state, or None when both partial
    transposes are positive within tol. With samples > 0 the product-pairing
    minimum is estimated and included in the report."""
    for side in ("B", "A"):
        spec = linalg.hermitian_eig(partial_transpose(rho, side).matrix)
        min_eig = float(spec.eigenvalues[-1])
        if min_eig < -tol:
            phi = spec.eigenvectors[:, -1]
            proj = BipartiteOperator(
                rho.dim_a, rho.dim_b, np.outer(phi, phi.conj())
            )
            witness = partial_transpose(proj, side)
            pairing = (
                product_pairing_min(witness, samples, seed)
                if samples > 0
                else None
            )
            return WitnessReport(witness, side, min_eig, pairing, samples)
    return None


def product_pairing_min(witness: BipartiteOperator, samples: int,
                        seed: int = 0) -> float:
    """Minimum of Tr(W (|u><u| (x) |v><v|)) over random pure product pairs.

    By convexity the minimum over all positive product pairs of unit trace is
    attained on pure products, so sampling pure pairs suffices.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    w = witness.matrix
    if linalg.fro_norm(w - w.conj().T) > 1e-12 * max(1.0, linalg.fro_norm(w)):
        raise NotHermitian("witness must be Hermitian")
    rng = Prng(derive_seed(seed, _PAIRING_TAG))
    da, db = witness.dim_a, witness.dim_b
    best = np.inf
    remaining = samples
    while remaining > 0:
        batch = min(remaining, 4096)
        ua = rng.complex_matrix(da, batch)
        vb = rng.complex_matrix(db, batch)
        ua /= np.sqrt(np.sum(np.abs(ua) ** 2, axis=0))
        vb /= np.sqrt(np.sum(np.abs(vb) ** 2, axis=0))
        prod = (ua[:, None, :] * vb[None, :, :]).reshape(da * db, batch)
        vals = np.real(np.sum(prod.conj() * (w @ prod), axis=0))
        best = min(best, float(vals.min()))
        remaining -= batch
    return best
