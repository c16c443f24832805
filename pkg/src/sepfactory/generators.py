"""Seeded state generators: certified families, entangled controls, randoms.

Every generator is a pure function of its parameters and 64-bit seed; kinds
are decorrelated by folding a kind tag into the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bipartite import BipartiteOperator
from .cholesky import CholeskyCertificate, assemble_state
from .errors import DegenerateDraw, DimensionMismatch, NotContraction, NotPSD
from .rng import Prng, derive_seed

_KIND_TAGS = {
    "example1": 1,
    "example2": 2,
    "random_ssppt": 3,
    "random_density": 4,
    "maximally_entangled": 5,
}

CONTRACTION_CLIP = 1e-12


@dataclass(frozen=True)
class GeneratorSpec:
    """Deterministic recipe for one generated instance."""

    kind: str
    dim_a: int = 0
    dim_b: int = 0
    seed: int = 0
    n: int = 0  # example1 row count
    rank: int = 0  # random_density / example2 base rank (0 = full)
    mode: str = "finite"  # example1 tail handling: finite | geometric
    contraction: float = 1.0  # example2 operator-norm budget for D and T
    extra: dict = field(default_factory=dict)


def random_unitary(rng: Prng, n: int) -> np.ndarray:
    """Householder QR of a complex Gaussian draw, phase-fixed diagonal."""
    q, _ = linalg.qr_full(rng.complex_matrix(n, n))
    return q


def random_normal_matrix(rng: Prng, n: int) -> np.ndarray:
    """Random normal matrix: unitary conjugate of a random complex diagonal."""
    u = random_unitary(rng, n)
    d = rng.complex_normals(n)
    return (u * d) @ u.conj().T


def _fro2(m: np.ndarray) -> float:
    return float(np.sum(np.abs(m) ** 2))


def geometric_tail(i: int, n: int | None = None) -> float:
    """Sum of 4^-j for j = i+1 .. n (closed form 4^-i / 3 when n is None)."""
    if n is None:
        return 0.25**i / 3.0
    return (0.25**i - 0.25**n) / 3.0


def example1_state(n: int, dim_b: int, seed: int = 0, mode: str = "finite"):
    """Geometric coefficient family S_ij = S_i / 2^j with S_i normal.

    The diagonal operators are rescaled so their total mass is 1/2 and, in
    "finite" mode, the off-diagonal mass is rescaled row by row to carry the
    other 1/2 exactly, so the factor has unit trace norm squared. "geometric"
    mode fixes each row's raw coefficient mass at 9/2 (the closed-form choice
    for infinitely many rows), leaving a trace deficit of 4^-n (3n+1)/2 at
    finite n. Returns (state, certificate).
    """
    if n < 1 or dim_b < 1:
        raise DimensionMismatch("n and dim_b must be >= 1")
    if mode not in ("finite", "geometric"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = Prng(derive_seed(seed, _KIND_TAGS["example1"]))
    xs = []
    ss = []
    for i in range(1, n + 1):
        x = _draw_until(
            lambda: rng.complex_matrix(dim_b, dim_b),
            lambda m: _fro2(m) > 0.0,
            what=f"X_{i}",
        )
        xs.append(x)
        if i < n:
            s = _draw_until(
                lambda: random_normal_matrix(rng, dim_b),
                lambda m: _fro2(m @ x) > 0.0,
                what=f"S_{i}",
            )
            ss.append(s)
    if n == 1:
        xs[0] = xs[0] / np.sqrt(_fro2(xs[0]))
        cert = CholeskyCertificate(1, dim_b, tuple(xs), {})
        rho, _ = assemble_state(cert)
        return rho, cert
    mass = sum(_fro2(x) for x in xs)
    xs = [x * np.sqrt(0.5 / mass) for x in xs]
    row_mass = [_fro2(x) for x in xs]
    den = sum(row_mass[:-1])
    s_ops = {}
    for i in range(1, n):
        tail = geometric_tail(i, n)
        raw = _fro2(ss[i - 1] @ xs[i - 1])
        if mode == "finite":
            target = 0.5 * row_mass[i - 1] / den
        else:
            target = 4.5 * tail
        s_i = ss[i - 1] * np.sqrt(target / (raw * tail))
        for j in range(i + 1, n + 1):
            s_ops[(i, j)] = s_i * (0.5**j)
    cert = CholeskyCertificate(n, dim_b, tuple(xs), s_ops)
    rho, _ = assemble_state(cert)
    return rho, cert


def _draw_until(draw, accept, attempts: int = 5, what: str = "draw"):
    for _ in range(attempts):
        x = draw()
        if accept(x):
            return x
    raise DegenerateDraw(f"{what} degenerated after {attempts} attempts")


def _clip_contraction(m: np.ndarray, name: str) -> np.ndarray:
    norm = linalg.op_norm(m)
    if norm > 1.0 + CONTRACTION_CLIP:
        raise NotContraction(f"||{name}||_op = {norm!r} exceeds 1")
    if norm > 1.0:
        return m / norm
    return m


def example2_state(rho11, d_op, t_op) -> BipartiteOperator:
    """Two-row block state from a PSD base block and two contractions.

    The lower diagonal block is sqrt(rho11) D D^H sqrt(rho11), automatically
    dominated by rho11; the off-diagonal couples through T. Inputs at most
    1e-12 above unit operator norm are rescaled; larger ones raise
    NotContraction.
    """
    rho11 = linalg.as_square(rho11, "rho11")
    d_op = _clip_contraction(linalg.as_square(d_op, "D"), "D")
    t_op = _clip_contraction(linalg.as_square(t_op, "T"), "T")
    root = linalg.psd_sqrt(rho11)
    if float(np.trace(rho11).real) <= 0.0:
        raise NotPSD("rho11 must be nonzero PSD")
    rho22 = linalg.hermitize(root @ d_op @ d_op.conj().T @ root)
    root22 = linalg.psd_sqrt(rho22)
    rho12 = root @ t_op @ root22
    db = rho11.shape[0]
    out = np.zeros((2 * db, 2 * db), dtype=np.complex128)
    out[:db, :db] = rho11
    out[:db, db:] = rho12
    out[db:, :db] = rho12.conj().T
    out[db:, db:] = rho22
    out /= float(np.trace(rho11).real + np.trace(rho22).real)
    return BipartiteOperator(2, db, out)


def random_semi_ssppt(dim_a: int, dim_b: int, seed: int = 0,
                      well_conditioned: bool = False):
    """Certificate satisfying the row-commutation condition by construction:
    each row's coefficients share one unitary eigenbasis. Returns
    (state, certificate); well_conditioned draws diagonal operators with
    singular values in [1/2, 3/2]."""
    if dim_a < 1 or dim_b < 1:
        raise DimensionMismatch("dimensions must be >= 1")
    rng = Prng(derive_seed(seed, _KIND_TAGS["random_ssppt"]))
    xs = []
    for _ in range(dim_a):
        if well_conditioned:
            u = random_unitary(rng, dim_b)
            w = random_unitary(rng, dim_b)
            sv = 0.5 + rng.uniforms(dim_b)
            xs.append((u * sv) @ w.conj().T)
        else:
            xs.append(rng.complex_matrix(dim_b, dim_b))
    mass = sum(_fro2(x) for x in xs)
    xs = [x / np.sqrt(mass) for x in xs]
    s_ops = {}
    for k in range(1, dim_a):
        basis = random_unitary(rng, dim_b)
        for j in range(k + 1, dim_a + 1):
            d = rng.complex_normals(dim_b)
            s_ops[(k, j)] = (basis * d) @ basis.conj().T
    cert = CholeskyCertificate(dim_a, dim_b, tuple(xs), s_ops)
    rho, _ = assemble_state(cert)
    return rho, cert


def random_density(dim_a: int, dim_b: int, rank: int = 0,
                   seed: int = 0) -> BipartiteOperator:
    """Random mixed state of the given rank (0 = full rank)."""
    n = dim_a * dim_b
    if rank == 0:
        rank = n
    if not 1 <= rank <= n:
        raise DimensionMismatch(f"rank must be in 1..{n}")
    rng = Prng(derive_seed(seed, _KIND_TAGS["random_density"]))
    g = rng.complex_matrix(n, rank)
    m = g @ g.conj().T
    return BipartiteOperator(dim_a, dim_b, m / float(np.trace(m).real))


def maximally_entangled(d: int) -> BipartiteOperator:
    """Rank-one projector onto the uniform diagonal superposition on d (x) d."""
    if d < 2:
        raise DimensionMismatch("d must be >= 2")
    psi = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        psi[i * d + i] = 1.0 / np.sqrt(d)
    return BipartiteOperator(d, d, np.outer(psi, psi.conj()))


def generate(spec: GeneratorSpec):
    """Dispatch a GeneratorSpec; returns (state, certificate_or_None, meta)."""
    meta = {"kind": spec.kind, "seed": spec.seed}
    if spec.kind == "example1":
        n = spec.n or spec.dim_a
        rho, cert = example1_state(n, spec.dim_b, spec.seed, spec.mode)
        meta.update(n=n, dim_b=spec.dim_b, mode=spec.mode)
        return rho, cert, meta
    if spec.kind == "example2":
        db = spec.dim_b
        rank = spec.rank or db
        rng = Prng(derive_seed(spec.seed, _KIND_TAGS["example2"]))
        g = rng.complex_matrix(db, rank)
        rho11 = g @ g.conj().T
        d_draw = rng.complex_matrix(db, db)
        t_draw = rng.complex_matrix(db, db)
        d_op = spec.contraction * d_draw / linalg.op_norm(d_draw)
        t_op = spec.contraction * t_draw / linalg.op_norm(t_draw)
        rho = example2_state(rho11, d_op, t_op)
        meta.update(dim_b=db, rank=rank, contraction=spec.contraction)
        return rho, None, meta
    if spec.kind == "random_ssppt":
        rho, cert = random_semi_ssppt(spec.dim_a, spec.dim_b, spec.seed)
        meta.update(dim_a=spec.dim_a, dim_b=spec.dim_b)
        return rho, cert, meta
    if spec.kind == "random_density":
        rho = random_density(spec.dim_a, spec.dim_b, spec.rank, spec.seed)
        meta.update(dim_a=spec.dim_a, dim_b=spec.dim_b, rank=spec.rank)
        return rho, None, meta
    if spec.kind == "maximally_entangled":
        d = spec.dim_a or spec.dim_b
        rho = maximally_entangled(d)
        meta.update(d=d)
        return rho, None, meta
    raise ValueError(f"unknown generator kind {spec.kind!r}")
