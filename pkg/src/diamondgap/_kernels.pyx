# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cyclic Jacobi eigensolver and schedule-grid scan.

Must stay arithmetically identical to ``_purekernels.py`` (same
expression shapes and reduction order); the build disables FMA
contraction so results are bit-identical across backends.
"""

from libc.math cimport fabs, sqrt, INFINITY

BACKEND = "compiled"

cdef double _EPS_OFF = 1e-14


def jacobi_rotate(double[:, ::1] a, double[:, ::1] v, int max_sweeps=100):
    """Diagonalize symmetric ``a`` in place by cyclic Jacobi rotations.

    ``v`` must be the identity on entry; on return its columns are the
    eigenvectors.  Returns the number of sweeps used.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweeps = 0
    cdef double anorm, tol, off, x, apq, dpq, g, t, theta, c, s, tau, h
    cdef double akp, akq, nkp, nkq, vkp, vkq
    if n == 1:
        return 0
    anorm = 0.0
    for p in range(n):
        for q in range(n):
            x = fabs(a[p, q])
            if x > anorm:
                anorm = x
    if anorm == 0.0:
        return 0
    tol = _EPS_OFF * anorm
    with nogil:
        while sweeps < max_sweeps:
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    x = fabs(a[p, q])
                    if x > off:
                        off = x
            if off <= tol:
                break
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    dpq = a[q, q] - a[p, p]
                    g = 100.0 * fabs(apq)
                    if fabs(dpq) + g == fabs(dpq):
                        t = apq / dpq
                    else:
                        theta = dpq / (2.0 * apq)
                        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    h = t * apq
                    a[p, p] = a[p, p] - h
                    a[q, q] = a[q, q] + h
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        akp = a[k, p]
                        akq = a[k, q]
                        nkp = akp - s * (akq + tau * akp)
                        nkq = akq + s * (akp - tau * akq)
                        a[k, p] = nkp
                        a[p, k] = nkp
                        a[k, q] = nkq
                        a[q, k] = nkq
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = vkp - s * (vkq + tau * vkp)
                        v[k, q] = vkq + s * (vkp - tau * vkq)
    return sweeps


def simplex_grid_max(double c01, double c02, double c13, double c23,
                     double c13p, double c23p, double cmacp, long steps):
    """Scan the time-sharing simplex on a uniform grid.

    Same candidate set and arithmetic as the pure fallback: three relay
    rate-split corners per grid point, objective
    min(t1*c01, t2*c13 + t3*r1) + min(t2*c02, t1*c23 + t3*r2).
    """
    cdef double inv = 1.0 / steps
    cdef double a1 = c13p
    cdef double a2 = cmacp - c13p
    cdef double b1 = cmacp - c23p
    cdef double b2 = c23p
    cdef double e1 = c13p if c13p < cmacp else cmacp
    cdef double rem = cmacp - e1
    cdef double e2 = c23p if c23p < rem else rem
    cdef double best = -INFINITY
    cdef long i, j
    cdef double t1, t2, t3, u1, u4, v1, v2, lhs, rhs, val
    with nogil:
        for i in range(steps + 1):
            t1 = i * inv
            u1 = t1 * c01
            u4 = t1 * c23
            for j in range(steps - i + 1):
                t2 = j * inv
                t3 = (steps - i - j) * inv
                v1 = t2 * c13
                v2 = t2 * c02

                rhs = v1 + t3 * a1
                lhs = u1 if u1 < rhs else rhs
                rhs = u4 + t3 * a2
                val = lhs + (v2 if v2 < rhs else rhs)
                if val > best:
                    best = val

                rhs = v1 + t3 * b1
                lhs = u1 if u1 < rhs else rhs
                rhs = u4 + t3 * b2
                val = lhs + (v2 if v2 < rhs else rhs)
                if val > best:
                    best = val

                rhs = v1 + t3 * e1
                lhs = u1 if u1 < rhs else rhs
                rhs = u4 + t3 * e2
                val = lhs + (v2 if v2 < rhs else rhs)
                if val > best:
                    best = val
    return best
