"""Two-relay multihop achievability: MAC covariance selection, the
scheduling LP, its closed-form solution, and a brute-force grid oracle.

The protocol time-shares three states: state 1 (relay 1 listens,
relay 2 talks), state 2 (mirrored), state 3 (both relays talk to the
destination over a MAC).  For fixed MAC covariances the achievable rate
is the optimum of a small LP over (t1, t2, t3) on the simplex:

    max R  s.t.  R <= t1*C01 + t2*C02                 (op1)
                 R <= t2*(C02 + C13) + t3*C'13        (op2)
                 R <= t1*(C01 + C23) + t3*C'23        (op3)
                 R <= t1*C23 + t2*C13 + t3*C'MAC      (op4)
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _backend
from .capacity import waterfill_colored
from .channel import DiamondChannel, DiamondParams, derive_params
from .errors import DomainError, NotApplicableError
from .linalg import logdet_i_plus, symmetrize

logger = logging.getLogger(__name__)


class GammaForm(Enum):
    CORRECTED = "corrected"
    LITERAL = "literal"


class Branch(Enum):
    BRANCH1 = 1   # gamma' <= 0
    BRANCH2 = 2   # gamma' > 0


class Method(Enum):
    CLOSED_FORM = "closed_form"
    LP_FALLBACK = "lp_fallback"


@dataclass(frozen=True)
class MacPentagon:
    """MAC rate region for fixed relay covariances (q1, q2):
    r1 <= c13p, r2 <= c23p, r1 + r2 <= cmacp."""
    c13p: float
    c23p: float
    cmacp: float
    q1: np.ndarray
    q2: np.ndarray
    branch: Branch


@dataclass(frozen=True)
class Schedule:
    t1: float
    t2: float
    t3: float


@dataclass(frozen=True)
class AchievabilityReport:
    schedule: Schedule
    r1: float
    r2: float
    r_mac: float
    method: Method
    pentagon: MacPentagon


def gamma_prime(p: DiamondParams, form: GammaForm = GammaForm.CORRECTED) -> float:
    """Branch selector.

    Literal form: C02*(C123 - C23) - C01*(C123 - C23), which factors to
    (C02 - C01)*(C123 - C23).  Corrected form:
    C02*(C123 - C23) - C01*(C123 - C13), antisymmetric under the relay
    swap.  Its sign is exactly the dual-feasibility condition of the
    cut-set LP basis behind each upper-bound branch (gamma' <= 0 makes
    the branch-1 vertex dominate the LP optimum, so r_up1 is a valid
    capacity upper bound; mirror for branch 2).  Default: corrected.
    """
    form = GammaForm(form)
    if form is GammaForm.LITERAL:
        return p.c02 * (p.c123 - p.c23) - p.c01 * (p.c123 - p.c23)
    return p.c02 * (p.c123 - p.c23) - p.c01 * (p.c123 - p.c13)


def branch_for(gamma: float) -> Branch:
    return Branch.BRANCH1 if gamma <= 0.0 else Branch.BRANCH2


def select_pentagon(dc: DiamondChannel, p: DiamondParams, branch: Branch) -> MacPentagon:
    """One-step MAC covariance choice.

    Branch1: q1 = K13 (so c13p reproduces C13) and q2 water-fills H23
    against noise I + H13 K13 H13^T; Branch2 is the mirror image.
    """
    eye = np.eye(dc.n)
    if branch is Branch.BRANCH1:
        q1 = p.k13
        n_cov = symmetrize(eye + dc.h13 @ q1 @ dc.h13.T)
        q2 = waterfill_colored(dc.h23, n_cov, 1.0, "H23").covariance
    else:
        q2 = p.k23
        n_cov = symmetrize(eye + dc.h23 @ q2 @ dc.h23.T)
        q1 = waterfill_colored(dc.h13, n_cov, 1.0, "H13").covariance
    g1 = symmetrize(dc.h13 @ q1 @ dc.h13.T)
    g2 = symmetrize(dc.h23 @ q2 @ dc.h23.T)
    c13p = 0.5 * logdet_i_plus(g1)
    c23p = 0.5 * logdet_i_plus(g2)
    cmacp = 0.5 * logdet_i_plus(symmetrize(g1 + g2))
    return MacPentagon(c13p, c23p, cmacp, q1, q2, branch)


def _constraint_rows(p: DiamondParams, pent: MacPentagon):
    """LP constraints in (t1, t2, R) after substituting t3 = 1 - t1 - t2,
    as rows (a, b) of a*x <= b.  Order: op1..op4, t1 >= 0, t2 >= 0, t3 >= 0."""
    a = np.array([
        [-p.c01, -p.c02, 1.0],
        [pent.c13p, pent.c13p - (p.c02 + p.c13), 1.0],
        [pent.c23p - (p.c01 + p.c23), pent.c23p, 1.0],
        [pent.cmacp - p.c23, pent.cmacp - p.c13, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [1.0, 1.0, 0.0],
    ])
    b = np.array([0.0, pent.c13p, pent.c23p, pent.cmacp, 0.0, 0.0, 1.0])
    return a, b


_COMBOS = list(itertools.combinations(range(7), 3))


def _recover_split(p: DiamondParams, pent: MacPentagon,
                   t1: float, t2: float, t3: float, r: float):
    """Lexicographically smallest (r1, r2) in t3 * pentagon meeting the
    full (pre-elimination) constraints at the given schedule and rate."""
    r1 = max(0.0,
             r - t2 * (p.c02 + p.c13),
             r - t1 * p.c23 - t2 * p.c13 - t3 * pent.c23p)
    r1 = min(r1, t3 * pent.c13p)
    r2 = max(0.0,
             r - t1 * (p.c01 + p.c23),
             r - t1 * p.c23 - t2 * p.c13 - r1)
    r2 = min(r2, t3 * pent.c23p, t3 * pent.cmacp - r1)
    return r1, max(0.0, r2)


def lp_rmac(p: DiamondParams, pent: MacPentagon) -> AchievabilityReport:
    """Exact LP optimum by vertex enumeration.

    All 3-subsets of the 7 constraints are intersected; the optimum is
    the maximum R over feasible intersections.  The LP is always
    feasible (t = (1/3, 1/3, 1/3), R = 0) and bounded by op1.
    """
    a, b = _constraint_rows(p, pent)
    scale = max(1.0, float(np.max(np.abs(b))), p.c01, p.c02)
    tol = 1e-10 * scale
    mats = a[_COMBOS]                      # (35, 3, 3)
    rhs = b[np.array(_COMBOS)]             # (35, 3)
    dets = np.linalg.det(mats)
    mask = np.abs(dets) > 1e-12
    sols = np.linalg.solve(mats[mask], rhs[mask][..., None])[..., 0]
    feas = np.all(sols @ a.T <= b + tol, axis=1)
    cand = sols[feas]
    if cand.shape[0] == 0:
        raise AssertionError("scheduling LP vertex enumeration found no feasible vertex")
    best = cand[np.argmax(cand[:, 2])]
    t1 = max(0.0, float(best[0]))
    t2 = max(0.0, float(best[1]))
    t3 = max(0.0, 1.0 - t1 - t2)
    r = float(best[2])
    r1, r2 = _recover_split(p, pent, t1, t2, t3, r)
    return AchievabilityReport(Schedule(t1, t2, t3), r1, r2, r,
                               Method.LP_FALLBACK, pent)


def closed_form_schedule(p: DiamondParams, pent: MacPentagon, branch: Branch):
    """Schedule from the 4x4 equality system.

    Branch1 sets op1, op2, op4 and the simplex constraint to equality
    (Branch2 swaps op2 for op3) and solves for (t1, t2, t3, R).  Returns
    None unless the solution is LP-optimal: the system must be
    nonsingular, the fractions nonnegative, the omitted inequality
    satisfied (primal feasibility), and the binding pattern's dual
    multipliers nonnegative (the equality system is only a feasible
    vertex by construction; optimality of the basis is not automatic).
    """
    if branch is Branch.BRANCH1:
        mid = [0.0, p.c02 + p.c13, pent.c13p, -1.0]
        omitted = (p.c01 + p.c23, 0.0, pent.c23p)
        basis = (0, 1, 3)
    else:
        mid = [p.c01 + p.c23, 0.0, pent.c23p, -1.0]
        omitted = (0.0, p.c02 + p.c13, pent.c13p)
        basis = (0, 2, 3)
    a = np.array([
        [p.c01, p.c02, 0.0, -1.0],
        mid,
        [p.c23, p.c13, pent.cmacp, -1.0],
        [1.0, 1.0, 1.0, 0.0],
    ])
    b = np.array([0.0, 0.0, 0.0, 1.0])
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        logger.debug("closed-form system singular for branch %s", branch)
        return None
    if not np.all(np.isfinite(x)):
        return None
    t = x[:3]
    r = float(x[3])
    if np.any(t < -1e-12) or np.any(t > 1.0 + 1e-9):
        return None
    scale = max(1.0, p.c01, p.c02, pent.cmacp)
    if max(abs(float(a[i] @ x - b[i])) for i in range(4)) > 1e-9 * scale:
        return None
    t1, t2, t3 = (max(0.0, float(v)) for v in t)
    # primal feasibility of the omitted inequality
    if r > omitted[0] * t1 + omitted[1] * t2 + omitted[2] * t3 + 1e-9 * scale:
        return None
    # dual feasibility of the binding pattern: lambda >= 0 solving
    # sum_i lambda_i * grad(active_i) = grad(objective)
    rows, _ = _constraint_rows(p, pent)
    try:
        lam = np.linalg.solve(rows[list(basis)].T, np.array([0.0, 0.0, 1.0]))
    except np.linalg.LinAlgError:
        return None
    if np.any(lam < -1e-9):
        return None
    return Schedule(t1, t2, t3), r


def brute_force_rmac(p: DiamondParams, pent: MacPentagon, grid_steps: int) -> float:
    """Grid oracle for the max-min schedule rate.

    Scans the simplex grid t_i = k_i/grid_steps, trying (r1, r2) at both
    dominant-face vertices of the t3-scaled pentagon plus the box corner,
    and maximizes min(t1*C01, t2*C13 + r1) + min(t2*C02, t1*C23 + r2).
    """
    if grid_steps < 10:
        raise DomainError(f"grid_steps must be >= 10, got {grid_steps}")
    return float(_backend.simplex_grid_max(
        p.c01, p.c02, p.c13, p.c23,
        pent.c13p, pent.c23p, pent.cmacp, int(grid_steps)))


def resolve_rate(p: DiamondParams, pent: MacPentagon, branch: Branch) -> AchievabilityReport:
    """Closed form when available and LP-optimal, else the LP itself.

    The closed form is never trusted alone: its rate must match the
    vertex-enumeration optimum within 1e-8 bits or the LP report wins.
    """
    lp = lp_rmac(p, pent)
    cf = closed_form_schedule(p, pent, branch)
    if cf is not None:
        sched, r = cf
        if abs(r - lp.r_mac) <= 1e-8:
            r1, r2 = _recover_split(p, pent, sched.t1, sched.t2, sched.t3, r)
            return AchievabilityReport(sched, r1, r2, r, Method.CLOSED_FORM, pent)
        logger.warning(
            "closed-form rate %.12g disagrees with LP optimum %.12g; using LP",
            r, lp.r_mac)
    return lp


def achievable_rate(dc: DiamondChannel,
                    gamma_form: GammaForm = GammaForm.CORRECTED,
                    params: DiamondParams | None = None) -> AchievabilityReport:
    """Full achievability pipeline for a delta > 0 channel."""
    p = params if params is not None else derive_params(dc)
    if not p.delta > 0.0:
        raise NotApplicableError(
            f"delta = {p.delta:.12g} <= 0: the multihop-MAC analysis does not apply")
    branch = branch_for(gamma_prime(p, gamma_form))
    pent = select_pentagon(dc, p, branch)
    return resolve_rate(p, pent, branch)
