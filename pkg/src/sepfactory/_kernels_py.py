"""Pure-Python fallback kernels, mirroring sepfactory._kernels_cy.

Rotation formulas and loop order match the compiled kernels statement by
statement; only the vector updates are delegated to numpy slices.
"""

import math

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_MULT = 0x2545F4914F6CDD1D


def _off2(a):
    d = np.abs(a) ** 2
    np.fill_diagonal(d, 0.0)
    return float(d.sum())


def _tangent(tau):
    if tau >= 0.0:
        return 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    return -1.0 / (-tau + math.sqrt(1.0 + tau * tau))


def jacobi_sweeps(a, v, max_sweeps, off_target):
    """Cyclic two-sided Jacobi on a Hermitian matrix, in place."""
    n = a.shape[0]
    target2 = off_target * off_target
    sweep = 0
    while True:
        off2 = _off2(a)
        if off2 <= target2:
            return sweep, math.sqrt(off2), True
        if sweep >= max_sweeps:
            return sweep, math.sqrt(off2), False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                ab = abs(apq)
                ph = apq / ab
                tau = (a[q, q].real - a[p, p].real) / (2.0 * ab)
                t = _tangent(tau)
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = (t * c) * ph
                cs = s.conjugate()
                colp = a[:, p].copy()
                a[:, p] = c * colp - cs * a[:, q]
                a[:, q] = s * colp + c * a[:, q]
                rowp = a[p, :].copy()
                a[p, :] = c * rowp - s * a[q, :]
                a[q, :] = cs * rowp + c * a[q, :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                v[:, p] = c * vp - cs * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        sweep += 1


def hestenes_sweeps(a, v, max_sweeps, rel_tol):
    """One-sided Jacobi: orthogonalize the columns of `a` in place."""
    n = a.shape[1]
    sweep = 0
    while sweep < max_sweeps:
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                cp = a[:, p]
                cq = a[:, q]
                alpha = float(np.real(np.vdot(cp, cp)))
                beta = float(np.real(np.vdot(cq, cq)))
                g = complex(np.vdot(cp, cq))
                gab = abs(g)
                if gab == 0.0 or gab * gab <= rel_tol * rel_tol * alpha * beta:
                    continue
                rotated += 1
                ph = g / gab
                tau = (beta - alpha) / (2.0 * gab)
                t = _tangent(tau)
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = (t * c) * ph
                cs = s.conjugate()
                colp = a[:, p].copy()
                a[:, p] = c * colp - cs * a[:, q]
                a[:, q] = s * colp + c * a[:, q]
                vp = v[:, p].copy()
                v[:, p] = c * vp - cs * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        sweep += 1
        if rotated == 0:
            return sweep, True
    return sweep, False


def xorshift_block(state, count):
    """Generate `count` xorshift64* outputs; returns (new_state, uint64 array)."""
    s = state & _MASK64
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        out[i] = (s * _MULT) & _MASK64
    return s, out
