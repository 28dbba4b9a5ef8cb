"""Dense symmetric-matrix kernels: Jacobi eigendecomposition, log-det
helpers, and PSD whitening.

All exposed log quantities are base 2 (bits).  Eigendecomposition uses
cyclic Jacobi rotations via the active kernel backend; matrices here are
small (n <= a few dozen), so robustness and determinism beat raw speed.
"""

import math

import numpy as np

from . import _backend
from .errors import DomainError, SingularMatrixError

_LN2 = math.log(2.0)

# relative tolerances (see module contracts)
SYM_TOL = 1e-8        # allowed asymmetry |M - M^T|_max / max(1, |M|_max)
PSD_CLAMP = 1e-9      # eigenvalues in [-PSD_CLAMP*scale, 0) clamp to 0
PD_FLOOR = 1e-12      # smallest eigenvalue admitted by inv_sqrt_psd


def log2_1p(x: float) -> float:
    """log2(1 + x), accurate near x = 0."""
    return math.log1p(x) / _LN2


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite float64 2-D array."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DomainError(f"{name}: expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name}: non-finite entries")
    return a


def symmetrize(m: np.ndarray) -> np.ndarray:
    """(M + M^T)/2; removes round-off asymmetry, exact on symmetric input."""
    return 0.5 * (m + m.T)


def check_symmetric(m: np.ndarray, name: str = "matrix") -> None:
    if m.shape[0] != m.shape[1]:
        raise DomainError(f"{name}: not square, shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    asym = float(np.max(np.abs(m - m.T)))
    if asym > SYM_TOL * scale:
        raise DomainError(f"{name}: not symmetric (|M - M^T|_max = {asym:g})")


def sym_eig(m, name: str = "matrix"):
    """Eigendecomposition of a symmetric matrix.

    Returns (w, V) with eigenvalues descending and eigenvectors in the
    columns of V.  Input is symmetrized as (M + M^T)/2 first; genuinely
    asymmetric input raises DomainError.
    """
    a = as_matrix(m, name)
    check_symmetric(a, name)
    a = np.ascontiguousarray(symmetrize(a))
    n = a.shape[0]
    v = np.eye(n)
    _backend.jacobi_rotate(a, v)
    w = np.diagonal(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])


def clamp_psd_eigs(w: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Clamp round-off-negative eigenvalues to 0; reject indefinite input.

    Tolerance: eigenvalues >= -1e-9 * max(1, largest eigenvalue).
    """
    scale = max(1.0, float(w[0])) if w.size else 1.0
    floor = -PSD_CLAMP * scale
    if float(w[-1]) < floor:
        raise DomainError(
            f"{name}: not PSD (eigenvalue {float(w[-1]):g} < {floor:g})")
    return np.where(w < 0.0, 0.0, w)


def logdet_i_plus(m, name: str = "matrix") -> float:
    """log2 det(I + M) for PSD M, via eigenvalues (descending-order sum)."""
    w, _ = sym_eig(m, name)
    w = clamp_psd_eigs(w, name)
    total = 0.0
    for x in w:
        total += log2_1p(float(x))
    return total


def logdet_pd(m, name: str = "matrix") -> float:
    """log2 det(M) for symmetric positive definite M."""
    w, _ = sym_eig(m, name)
    if float(w[-1]) <= 0.0:
        raise SingularMatrixError(
            f"{name}: not positive definite (min eigenvalue {float(w[-1]):g})")
    total = 0.0
    for x in w:
        total += math.log2(float(x))
    return total


def inv_sqrt_psd(m, name: str = "matrix") -> np.ndarray:
    """Inverse symmetric square root R with R @ M @ R = I.

    Requires M positive definite: smallest eigenvalue > 1e-12.
    """
    w, v = sym_eig(m, name)
    if float(w[-1]) <= PD_FLOOR:
        raise SingularMatrixError(
            f"{name}: singular to working precision "
            f"(min eigenvalue {float(w[-1]):g} <= {PD_FLOOR:g})")
    r = (v / np.sqrt(w)) @ v.T
    return symmetrize(r)
