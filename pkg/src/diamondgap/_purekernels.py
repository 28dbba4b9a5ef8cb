"""Pure-Python fallback for the hot kernels.

Arithmetic here is kept operation-for-operation identical to the
compiled versions in ``_kernels.pyx`` (same expression shapes, same
reduction order), so both backends produce bit-identical results.
The compiled extension is built with FMA contraction disabled for the
same reason.
"""

import math

import numpy as np

BACKEND = "pure"

_EPS_OFF = 1e-14  # relative off-diagonal threshold for Jacobi convergence


def jacobi_rotate(a, v, max_sweeps=100):
    """Diagonalize symmetric ``a`` in place by cyclic Jacobi rotations.

    ``a`` and ``v`` are C-contiguous float64 (n, n) arrays; ``v`` must be
    the identity on entry.  On return ``a`` is (numerically) diagonal and
    the columns of ``v`` are the eigenvectors.  Returns sweeps used.
    """
    n = a.shape[0]
    if n == 1:
        return 0
    # Work on nested lists: elementwise float ops match the C kernel and
    # avoid per-access numpy scalar overhead.
    aa = [[float(a[i, j]) for j in range(n)] for i in range(n)]
    vv = [[float(v[i, j]) for j in range(n)] for i in range(n)]

    anorm = 0.0
    for i in range(n):
        for j in range(n):
            x = abs(aa[i][j])
            if x > anorm:
                anorm = x
    sweeps = 0
    if anorm > 0.0:
        tol = _EPS_OFF * anorm
        while sweeps < max_sweeps:
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    x = abs(aa[p][q])
                    if x > off:
                        off = x
            if off <= tol:
                break
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = aa[p][q]
                    if apq == 0.0:
                        continue
                    dpq = aa[q][q] - aa[p][p]
                    g = 100.0 * abs(apq)
                    if abs(dpq) + g == abs(dpq):
                        t = apq / dpq
                    else:
                        theta = dpq / (2.0 * apq)
                        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    h = t * apq
                    aa[p][p] = aa[p][p] - h
                    aa[q][q] = aa[q][q] + h
                    aa[p][q] = 0.0
                    aa[q][p] = 0.0
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        akp = aa[k][p]
                        akq = aa[k][q]
                        nkp = akp - s * (akq + tau * akp)
                        nkq = akq + s * (akp - tau * akq)
                        aa[k][p] = nkp
                        aa[p][k] = nkp
                        aa[k][q] = nkq
                        aa[q][k] = nkq
                    for k in range(n):
                        vkp = vv[k][p]
                        vkq = vv[k][q]
                        vv[k][p] = vkp - s * (vkq + tau * vkp)
                        vv[k][q] = vkq + s * (vkp - tau * vkq)
    for i in range(n):
        for j in range(n):
            a[i, j] = aa[i][j]
            v[i, j] = vv[i][j]
    return sweeps


def simplex_grid_max(c01, c02, c13, c23, c13p, c23p, cmacp, steps):
    """Scan the time-sharing simplex on a uniform grid.

    For each grid point (t1, t2, t3) = (i, j, steps-i-j)/steps the relay
    rate-split (r1, r2) is tried at three pentagon corners (both vertices
    of the dominant face plus the box corner), and

        min(t1*c01, t2*c13 + t3*r1) + min(t2*c02, t1*c23 + t3*r2)

    is maximized over everything.  Returns the best value found.
    """
    inv = 1.0 / steps
    a1 = c13p
    a2 = cmacp - c13p
    b1 = cmacp - c23p
    b2 = c23p
    e1 = c13p if c13p < cmacp else cmacp
    rem = cmacp - e1
    e2 = c23p if c23p < rem else rem

    t_all = np.arange(steps + 1, dtype=np.int64) * inv
    v1_all = t_all * c13
    v2_all = t_all * c02
    best = -math.inf
    for i in range(steps + 1):
        t1 = float(t_all[i])
        u1 = t1 * c01
        u4 = t1 * c23
        m = steps - i
        v1 = v1_all[: m + 1]
        v2 = v2_all[: m + 1]
        t3 = t_all[m::-1]
        val = np.minimum(u1, v1 + t3 * a1) + np.minimum(v2, u4 + t3 * a2)
        row = float(val.max())
        if row > best:
            best = row
        val = np.minimum(u1, v1 + t3 * b1) + np.minimum(v2, u4 + t3 * b2)
        row = float(val.max())
        if row > best:
            best = row
        val = np.minimum(u1, v1 + t3 * e1) + np.minimum(v2, u4 + t3 * e2)
        row = float(val.max())
        if row > best:
            best = row
    return best
