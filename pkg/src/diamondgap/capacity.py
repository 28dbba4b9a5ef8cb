"""Water-filling capacities.

All rates are bits per real channel use and carry the 1/2 prefactor:
C(H, P) = max_{Q PSD, tr Q <= P} (1/2) log2 det(I + H Q H^T).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import (as_matrix, clamp_psd_eigs, inv_sqrt_psd, log2_1p,
                     logdet_i_plus, logdet_pd, sym_eig, symmetrize)


@dataclass(frozen=True)
class WaterfillResult:
    covariance: np.ndarray      # n_t x n_t PSD, trace <= P (+ round-off)
    capacity_bits: float
    water_level: float
    active_modes: int


@dataclass(frozen=True)
class MacSumResult:
    c_sum: float
    q1: np.ndarray
    q2: np.ndarray
    iterations: int
    converged: bool


def _fill_levels(gains: np.ndarray, p: float):
    """Exact water level over descending positive gains.

    Picks the largest k with mu_k * g_k > 1 where
    mu_k = (P + sum_{i<=k} 1/g_i) / k; modes with zero gain get no power.
    """
    best_k = 0
    best_mu = 0.0
    s = 0.0
    for k in range(1, gains.size + 1):
        g = float(gains[k - 1])
        if g <= 0.0:
            break
        s += 1.0 / g
        mu = (p + s) / k
        if mu * g > 1.0:
            best_k = k
            best_mu = mu
    powers = np.zeros(gains.size)
    for i in range(best_k):
        powers[i] = max(best_mu - 1.0 / float(gains[i]), 0.0)
    return powers, best_mu, best_k


def waterfill(h, p: float, name: str = "H") -> WaterfillResult:
    """Capacity-achieving power allocation for y = Hx + z, white noise.

    Maximizes (1/2) log2 det(I + H Q H^T) over PSD Q with tr Q <= P by
    pouring power over the eigenmodes of H^T H.
    """
    h = as_matrix(h, name)
    if not p > 0.0:
        raise DomainError(f"power budget must be positive, got {p}")
    nt = h.shape[1]
    gram = symmetrize(h.T @ h)
    w, v = sym_eig(gram, name)
    w = clamp_psd_eigs(w, name)
    if float(w[0]) <= 0.0:
        # dead channel: any allocation works, use the uniform one
        return WaterfillResult((p / nt) * np.eye(nt), 0.0, 0.0, 0)
    powers, mu, k = _fill_levels(w, p)
    q = symmetrize((v * powers) @ v.T)
    cap = 0.0
    for i in range(k):
        cap += log2_1p(float(w[i]) * float(powers[i]))
    return WaterfillResult(q, 0.5 * cap, mu, k)


def waterfill_colored(h, n_cov, p: float, name: str = "H") -> WaterfillResult:
    """Water-filling against colored noise with covariance N.

    Whitens by N^(-1/2), water-fills, and reports the rate in the
    colored domain: (1/2)[log2 det(N + H Q H^T) - log2 det(N)].
    """
    h = as_matrix(h, name)
    n_cov = as_matrix(n_cov, "N")
    if n_cov.shape[0] != h.shape[0]:
        raise DomainError(
            f"noise covariance is {n_cov.shape} but {name} has {h.shape[0]} rows")
    r = inv_sqrt_psd(n_cov, "N")
    res = waterfill(r @ h, p, name)
    q = res.covariance
    s = symmetrize(n_cov + h @ q @ h.T)
    cap = 0.5 * (logdet_pd(s) - logdet_pd(n_cov, "N"))
    return WaterfillResult(q, cap, res.water_level, res.active_modes)


def mac_sum_capacity(h1, h2, p1: float, p2: float,
                     tol_bits: float = 1e-9, max_iter: int = 10000) -> MacSumResult:
    """Two-user MAC sum capacity by iterative water-filling.

    Alternates colored water-filling of each user against the other's
    current interference-plus-noise until the sum rate improves by less
    than tol_bits.  The sum-rate sequence is nondecreasing; the first
    iteration reproduces the one-step covariance choice (user 1 against
    white noise, then user 2 against user 1's interference).
    """
    h1 = as_matrix(h1, "H1")
    h2 = as_matrix(h2, "H2")
    if h1.shape[0] != h2.shape[0]:
        raise DomainError(f"receiver dimension mismatch: {h1.shape} vs {h2.shape}")
    if not (p1 > 0.0 and p2 > 0.0):
        raise DomainError(f"power budgets must be positive, got {p1}, {p2}")
    if not tol_bits > 0.0:
        raise DomainError(f"tol_bits must be positive, got {tol_bits}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    nr = h1.shape[0]
    eye = np.eye(nr)
    q1 = np.zeros((h1.shape[1], h1.shape[1]))
    q2 = np.zeros((h2.shape[1], h2.shape[1]))
    c_sum = 0.0
    iterations = 0
    converged = False
    for it in range(1, max_iter + 1):
        q1 = waterfill_colored(h1, symmetrize(eye + h2 @ q2 @ h2.T), p1, "H1").covariance
        q2 = waterfill_colored(h2, symmetrize(eye + h1 @ q1 @ h1.T), p2, "H2").covariance
        new = 0.5 * logdet_i_plus(symmetrize(h1 @ q1 @ h1.T + h2 @ q2 @ h2.T))
        iterations = it
        improved = new - c_sum
        c_sum = new
        if improved < tol_bits:
            converged = True
            break
    return MacSumResult(c_sum, q1, q2, iterations, converged)
