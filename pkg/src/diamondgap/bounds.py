"""Upper bounds, the achievability gap, and certification checks for the
supporting inequalities (one-step MAC loss, super-additivity excess,
determinant bounds, and the scalar sup identity).

Checks return records (pass/fail plus the compared values), never raise
on a falsification, so ensemble runs always complete and can report
aggregate counts.
"""

import math
from dataclasses import dataclass

import numpy as np

from .capacity import MacSumResult, mac_sum_capacity
from .channel import DiamondChannel, DiamondParams, derive_params
from .errors import DegenerateChannelError, DomainError, NotApplicableError
from .linalg import logdet_i_plus, sym_eig, symmetrize
from .protocol import (AchievabilityReport, Branch, GammaForm, MacPentagon,
                       Method, Schedule, branch_for, gamma_prime,
                       resolve_rate, select_pentagon)

_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    lhs: float
    rhs: float
    margin: float           # rhs - lhs
    near_equality: bool = False


@dataclass(frozen=True)
class LemmaDiffRecord:
    """One-step MAC loss bound and its proof intermediates."""
    lemma1: CheckRecord     # C123 - C'MAC < (n/2) log2(4n)
    c123bound: CheckRecord  # C123 <= (1/2) log2 det(I + 2A)
    csumbound: CheckRecord  # C_sum >= (1/2) log2 det(I + A/n)
    equnif: CheckRecord     # C123 - C_sum <= (n/2) log2(2n)
    eqmac: CheckRecord      # C_sum - C'MAC <= n/2
    c123: float
    c_sum: float
    cmacp: float

    @property
    def passed(self) -> bool:
        return (self.lemma1.passed and self.c123bound.passed
                and self.csumbound.passed and self.equnif.passed
                and self.eqmac.passed)


@dataclass(frozen=True)
class GapReport:
    n: int
    delta: float
    delta_term: float
    gamma: float
    gamma_form: GammaForm
    branch: Branch
    gamma_tie: bool
    r_ach: float
    r_up: float
    kappa: float
    kappa_formula: float
    kappa_consistent: bool
    theorem_bound: float
    lemma1_lhs: float
    lemma1_bound: float
    lemma2_bound: float
    method: Method
    schedule: Schedule
    lemma_checks: LemmaDiffRecord
    lemma2_check: CheckRecord
    all_checks_pass: bool
    ach1: AchievabilityReport
    ach2: AchievabilityReport
    r_up1: float
    r_up2: float


def lemma1_bound(n: int) -> float:
    return 0.5 * n * math.log2(4.0 * n)


def lemma2_bound(n: int) -> float:
    return 0.5 * n * math.log2(2.0 * n)


def theorem_bound(n: int) -> float:
    return n * math.log2(math.sqrt(8.0) * n)


def delta_term(p: DiamondParams) -> float:
    """Super-additivity excess of the joint second hop:
    max(C123 - (C13 + C23), 0)."""
    return max(p.c123 - (p.c13 + p.c23), 0.0)


def upper_bound(p: DiamondParams, branch: Branch) -> float:
    """Cut-set-based upper bound for the selected branch."""
    d = delta_term(p)
    if branch is Branch.BRANCH1:
        d1 = p.c01 + p.c13
        d2 = p.c123 - p.c13 + p.c02
        if d1 <= 0.0 or d2 <= 0.0:
            raise DegenerateChannelError(
                f"upper bound undefined: C01+C13 = {d1:g}, C123-C13+C02 = {d2:g}")
        return p.c01 * (p.c02 + p.c13) / d1 + (-p.c02 * p.delta) / (d2 * d1) + d
    d1 = p.c02 + p.c23
    d2 = p.c123 - p.c23 + p.c01
    if d1 <= 0.0 or d2 <= 0.0:
        raise DegenerateChannelError(
            f"upper bound undefined: C02+C23 = {d1:g}, C123-C23+C01 = {d2:g}")
    return p.c02 * (p.c01 + p.c23) / d1 + (-p.c01 * p.delta) / (d2 * d1) + d


def kappa_formula(p: DiamondParams, pent: MacPentagon, branch: Branch) -> float:
    """Closed-form gap expression for the branch's equality-system rate."""
    d = delta_term(p)
    if branch is Branch.BRANCH1:
        den = ((p.c01 + p.c13) * (pent.cmacp - p.c13 + p.c02)
               * (p.c123 - p.c13 + p.c02))
        num = p.c02 * (p.c123 - pent.cmacp) * p.delta
    else:
        den = ((p.c02 + p.c23) * (pent.cmacp - p.c23 + p.c01)
               * (p.c123 - p.c23 + p.c01))
        num = p.c01 * (p.c123 - pent.cmacp) * p.delta
    if den == 0.0:
        return math.nan
    return num / den + d


def verify_lemma_diff(dc: DiamondChannel, pent: MacPentagon,
                      params: DiamondParams | None = None,
                      mac: MacSumResult | None = None) -> LemmaDiffRecord:
    """Certify C123 - C'MAC < (n/2) log2(4n) and its proof chain."""
    p = params if params is not None else derive_params(dc)
    if mac is None:
        mac = mac_sum_capacity(dc.h13, dc.h23, 1.0, 1.0)
    n = dc.n
    h123 = np.hstack([dc.h13, dc.h23])
    a = symmetrize(h123 @ h123.T)

    l1_lhs = p.c123 - pent.cmacp
    l1_rhs = lemma1_bound(n)
    strict = l1_lhs <= l1_rhs - 1e-12
    lemma1 = CheckRecord("lemma1", l1_lhs <= l1_rhs, l1_lhs, l1_rhs,
                         l1_rhs - l1_lhs, near_equality=not strict)

    cb_rhs = 0.5 * logdet_i_plus(2.0 * a)
    c123bound = CheckRecord("c123bound", p.c123 <= cb_rhs + _CHECK_TOL,
                            p.c123, cb_rhs, cb_rhs - p.c123)

    sb_lhs = 0.5 * logdet_i_plus(a / n)
    csumbound = CheckRecord("csumbound", mac.c_sum >= sb_lhs - _CHECK_TOL,
                            sb_lhs, mac.c_sum, mac.c_sum - sb_lhs)

    eu_lhs = p.c123 - mac.c_sum
    eu_rhs = lemma2_bound(n)
    equnif = CheckRecord("equnif", eu_lhs <= eu_rhs + _CHECK_TOL,
                         eu_lhs, eu_rhs, eu_rhs - eu_lhs)

    em_lhs = mac.c_sum - pent.cmacp
    em_rhs = 0.5 * n
    eqmac = CheckRecord("eqmac", em_lhs <= em_rhs + _CHECK_TOL,
                        em_lhs, em_rhs, em_rhs - em_lhs)

    return LemmaDiffRecord(lemma1, c123bound, csumbound, equnif, eqmac,
                           p.c123, mac.c_sum, pent.cmacp)


def check_lemma2(p: DiamondParams, n: int) -> CheckRecord:
    """delta <= (n/2) log2(2n)."""
    lhs = delta_term(p)
    rhs = lemma2_bound(n)
    return CheckRecord("lemma2", lhs <= rhs + _CHECK_TOL, lhs, rhs, rhs - lhs)


def check_delta_ratio(a, b) -> CheckRecord:
    """det(I + 2A + 2B) / [det(I + A/n) det(I + B/n)] <= (2n)^n,
    compared in the log2 domain."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"incompatible shapes {a.shape} and {b.shape}")
    n = a.shape[0]
    lhs = (logdet_i_plus(2.0 * symmetrize(a + b))
           - logdet_i_plus(a / n) - logdet_i_plus(b / n))
    rhs = n * math.log2(2.0 * n)
    tol = _CHECK_TOL * max(1.0, abs(rhs))
    return CheckRecord("delta_ratio", lhs <= rhs + tol, lhs, rhs, rhs - lhs,
                       near_equality=abs(rhs - lhs) <= tol)


def check_fiedler(a, b) -> CheckRecord:
    """det(A + B) <= prod_i (a_i + b_{n+1-i}) for PSD A, B with
    eigenvalues sorted descending (opposite pairing on the right side)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"incompatible shapes {a.shape} and {b.shape}")
    ea, _ = sym_eig(a, "A")
    eb, _ = sym_eig(b, "B")
    es, _ = sym_eig(symmetrize(a + b), "A+B")
    lhs = 1.0
    for x in es:
        lhs *= float(x)
    rhs = 1.0
    n = a.shape[0]
    for i in range(n):
        rhs *= float(ea[i]) + float(eb[n - 1 - i])
    tol = _CHECK_TOL * max(1.0, abs(rhs))
    return CheckRecord("fiedler", lhs <= rhs + tol, lhs, rhs, rhs - lhs,
                       near_equality=abs(rhs - lhs) <= tol)


def check_prop1(n: int) -> CheckRecord:
    """f(x, y) = (1 + 2x + 2y) / [(1 + x/n)(1 + y/n)] stays below 2n on
    a log-spaced grid and approaches 2n along y = 0 as x grows."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    xs = np.concatenate([[0.0], np.logspace(-6.0, 9.0, 301)])
    gx, gy = np.meshgrid(xs, xs)
    f = (1.0 + 2.0 * gx + 2.0 * gy) / ((1.0 + gx / n) * (1.0 + gy / n))
    worst = float(np.max(f))
    sup = 2.0 * n
    grid_ok = worst <= sup + _CHECK_TOL
    x_lim = 1e9
    f_lim = (1.0 + 2.0 * x_lim) / (1.0 + x_lim / n)
    limit_ok = f_lim >= sup - 6e-9 * n * n
    return CheckRecord(f"prop1[n={n}]", grid_ok and limit_ok,
                       worst, sup, sup - worst,
                       near_equality=sup - worst <= 1e-6)


def gap_report(dc: DiamondChannel,
               gamma_form: GammaForm = GammaForm.CORRECTED,
               params: DiamondParams | None = None) -> GapReport:
    """Achievable rate vs upper bound with all certification checks.

    Both branches are fully evaluated; the branch selector picks the
    active one (gamma' <= 0 -> branch 1).  When gamma' = 0 exactly the
    smaller of the two upper bounds is recorded and the tie is flagged.
    """
    p = params if params is not None else derive_params(dc)
    if not p.delta > 0.0:
        raise NotApplicableError(
            f"delta = {p.delta:.12g} <= 0: gap analysis requires delta > 0")
    gamma_form = GammaForm(gamma_form)
    gamma = gamma_prime(p, gamma_form)
    pent1 = select_pentagon(dc, p, Branch.BRANCH1)
    pent2 = select_pentagon(dc, p, Branch.BRANCH2)
    ach1 = resolve_rate(p, pent1, Branch.BRANCH1)
    ach2 = resolve_rate(p, pent2, Branch.BRANCH2)
    r_up1 = upper_bound(p, Branch.BRANCH1)
    r_up2 = upper_bound(p, Branch.BRANCH2)

    tie = gamma == 0.0
    if tie:
        branch = Branch.BRANCH1 if r_up1 <= r_up2 else Branch.BRANCH2
    else:
        branch = branch_for(gamma)
    if branch is Branch.BRANCH1:
        ach, pent, r_up = ach1, pent1, r_up1
    else:
        ach, pent, r_up = ach2, pent2, r_up2

    r_ach = ach.r_mac
    kappa = r_up - r_ach
    kf = kappa_formula(p, pent, branch)
    kappa_consistent = math.isfinite(kf) and abs(kf - kappa) <= 1e-7

    n = dc.n
    mac = mac_sum_capacity(dc.h13, dc.h23, 1.0, 1.0)
    lemmas = verify_lemma_diff(dc, pent, params=p, mac=mac)
    lemma2 = check_lemma2(p, n)
    t_bound = theorem_bound(n)
    sound = kappa >= -1e-7
    all_pass = (kappa <= t_bound) and sound and lemmas.passed and lemma2.passed

    return GapReport(
        n=n, delta=p.delta, delta_term=delta_term(p), gamma=gamma,
        gamma_form=gamma_form, branch=branch, gamma_tie=tie,
        r_ach=r_ach, r_up=r_up, kappa=kappa, kappa_formula=kf,
        kappa_consistent=kappa_consistent, theorem_bound=t_bound,
        lemma1_lhs=lemmas.lemma1.lhs, lemma1_bound=lemmas.lemma1.rhs,
        lemma2_bound=lemma2.rhs, method=ach.method, schedule=ach.schedule,
        lemma_checks=lemmas, lemma2_check=lemma2, all_checks_pass=all_pass,
        ach1=ach1, ach2=ach2, r_up1=r_up1, r_up2=r_up2)
