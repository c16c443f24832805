# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cyclic Jacobi rotations and the raw PRNG stream.

The rotation loops here mirror sepfactory._kernels_py statement by statement;
both backends must keep the same operation order so results stay deterministic
within each backend.
"""

import numpy as np

from libc.math cimport hypot, sqrt


def jacobi_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                  int max_sweeps, double off_target):
    """Cyclic two-sided Jacobi on a Hermitian matrix, in place.

    `a` is driven to diagonal form, `v` (preloaded with the identity)
    accumulates the rotations so that v @ diag(a) @ v^H reconstructs the
    input. Returns (sweeps_done, off_diagonal_norm, converged).
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off2, are, aim, app, aqq, ab, tau, t, c, sigma
    cdef double target2 = off_target * off_target
    cdef double complex apq, ph, s, cs, xp, xq

    while True:
        off2 = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    are = a[p, q].real
                    aim = a[p, q].imag
                    off2 += are * are + aim * aim
        if off2 <= target2:
            return sweep, sqrt(off2), True
        if sweep >= max_sweeps:
            return sweep, sqrt(off2), False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                are = apq.real
                aim = apq.imag
                if are == 0.0 and aim == 0.0:
                    continue
                ab = hypot(are, aim)
                ph = apq / ab
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * ab)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                sigma = t * c
                s = sigma * ph
                cs = s.conjugate()
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - cs * xq
                    a[k, q] = s * xp + c * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * xq
                    a[q, k] = cs * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - cs * xq
                    v[k, q] = s * xp + c * xq
        sweep += 1


def hestenes_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                    int max_sweeps, double rel_tol):
    """One-sided Jacobi: orthogonalize the columns of `a` in place.

    `v` (preloaded with the identity) accumulates the right-hand rotations,
    so input = a_out @ v^H with a_out having pairwise-orthogonal columns.
    A sweep with no rotations means convergence. Returns (sweeps, converged).
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef long rotated
    cdef double alpha, beta, gre, gim, gab, tau, t, c, sigma
    cdef double complex g, ph, s, cs, xp, xq

    while sweep < max_sweeps:
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gre = 0.0
                gim = 0.0
                for k in range(m):
                    xp = a[k, p]
                    xq = a[k, q]
                    alpha += xp.real * xp.real + xp.imag * xp.imag
                    beta += xq.real * xq.real + xq.imag * xq.imag
                    g = xp.conjugate() * xq
                    gre += g.real
                    gim += g.imag
                gab = hypot(gre, gim)
                if gab == 0.0 or gab * gab <= rel_tol * rel_tol * alpha * beta:
                    continue
                rotated += 1
                g = gre + 1j * gim
                ph = g / gab
                tau = (beta - alpha) / (2.0 * gab)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                sigma = t * c
                s = sigma * ph
                cs = s.conjugate()
                for k in range(m):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - cs * xq
                    a[k, q] = s * xp + c * xq
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - cs * xq
                    v[k, q] = s * xp + c * xq
        sweep += 1
        if rotated == 0:
            return sweep, True
    return sweep, False


def xorshift_block(state, Py_ssize_t count):
    """Generate `count` xorshift64* outputs; returns (new_state, uint64 array)."""
    cdef unsigned long long s = state
    cdef unsigned long long mult = 0x2545F4914F6CDD1DULL
    cdef Py_ssize_t i
    out = np.empty(count, dtype=np.uint64)
    cdef unsigned long long[::1] o = out
    for i in range(count):
        s ^= s >> 12
        s ^= s << 25
        s ^= s >> 27
        o[i] = s * mult
    return s, out
