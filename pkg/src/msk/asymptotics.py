"""Radial growth of model-space kernels on dyadic radii.

Rows are taken at ``rho_N = 1 - 2**-N``.  The squared kernel norm is compared
with the upper envelope ``phi(1-rho)/(1-rho)^2`` and its growth exponent is
fitted by least squares in log-log coordinates.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from .conditions import ConditionReport, Verdict, phi_condition_sum
from .evaluation import kernel_norm_sq
from .inner_core import (AdmissiblePhi, DomainError, InnerFunctionSpec, make_section3_measure,
                         phi_eval)
from .series import DEFAULT_POLICY

N_CAP = 40
MONOTONE_SLACK = 1.05


@dataclass(frozen=True)
class GrowthRow:
    N: int
    rho: float
    ksq: float
    bound: float
    ratio: float
    tail_bound: float = 0.0


@dataclass(frozen=True)
class GrowthTable:
    rows: Tuple[GrowthRow, ...]
    phi: AdmissiblePhi

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def trivial(self):
        return all(r.ksq == 0.0 for r in self.rows)


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of ``log ksq`` against ``log(1/(1-rho))``.

    ``slope`` is the exponent of the squared norm; ``norm_slope`` is the
    exponent of the norm itself (half of it).
    """

    slope: float
    intercept: float
    stderr: float
    n_points: int

    @property
    def norm_slope(self):
        return 0.5 * self.slope


def _check_range(N_min, N_max):
    if not (isinstance(N_min, (int, np.integer)) and isinstance(N_max, (int, np.integer))):
        raise DomainError("N_min and N_max must be integers")
    if not 1 <= N_min < N_max <= N_CAP:
        raise DomainError(f"need 1 <= N_min < N_max <= {N_CAP}, got [{N_min}, {N_max}]")


def kernel_growth_table(spec, phi, N_min, N_max, pol=DEFAULT_POLICY, angle=0.0):
    """One row per ``N``: ``||k_rho||^2``, ``phi(1-rho)/(1-rho)^2`` and their ratio."""
    _check_range(N_min, N_max)
    rows = []
    for N in range(N_min, N_max + 1):
        gap = 2.0 ** -N
        rho = 1.0 - gap
        k = kernel_norm_sq(spec, rho, pol, angle)
        bound = phi_eval(phi, gap) / (gap * gap)
        rows.append(GrowthRow(N, rho, float(k.value), bound, float(k.value) / bound,
                              float(k.tail_bound)))
    return GrowthTable(tuple(rows), phi)


def fit_growth_exponent(table):
    """OLS slope of ``log ksq`` versus ``log(1/(1-rho))``."""
    rows = [r for r in table.rows if r.ksq > 0.0]
    if len(rows) < 3:
        raise DomainError("need at least 3 rows with ksq > 0 to fit")
    x = np.array([r.N * math.log(2.0) for r in rows])
    y = np.log([r.ksq for r in rows])
    if np.ptp(x) == 0.0:
        raise DomainError("degenerate table: all radii equal")
    fit = stats.linregress(x, y)
    return FitResult(float(fit.slope), float(fit.intercept), float(fit.stderr), len(rows))


def _last_half(values):
    return values[len(values) // 2:]


def ratio_monotone(ratios, slack=MONOTONE_SLACK):
    """``ratio[i+1] <= slack * ratio[i]`` over the last half of the rows."""
    tail = _last_half(np.asarray(ratios, dtype=float))
    return bool(np.all(tail[1:] <= slack * tail[:-1]))


def ratio_increasing(ratios):
    tail = _last_half(np.asarray(ratios, dtype=float))
    return bool(np.all(tail[1:] > tail[:-1]))


@dataclass(frozen=True)
class UpperBoundCheck:
    sup_ratio: float
    monotone_flag: bool
    increasing_flag: bool
    condition: ConditionReport
    table: GrowthTable
    warning: Optional[str] = None


def verify_upper_bound(spec, phi, N_min, N_max, pol=DEFAULT_POLICY, angle=0.0):
    """Check that ``ksq (1-rho)^2 / phi(1-rho)`` stays bounded along the radius.

    The envelope is only guaranteed when the phi-condition holds at the
    radius endpoint; a divergent condition is reported as a warning.
    """
    cond = phi_condition_sum(spec, phi, angle, pol)
    warning = None
    if cond.verdict is Verdict.DivergentCertified:
        warning = f"hypothesis fails: phi-condition is {cond.verdict} for phi = {phi.describe()}"
    elif cond.verdict is Verdict.Inconclusive:
        warning = "hypothesis not certified: phi-condition is Inconclusive"
    table = kernel_growth_table(spec, phi, N_min, N_max, pol, angle)
    ratios = table.column("ratio")
    return UpperBoundCheck(float(np.max(ratios)), ratio_monotone(ratios),
                           ratio_increasing(ratios), cond, table, warning)


def split_sum_check(eps, N):
    """Direct Poisson-type sum against its dyadic split at ``2**N``.

    Returns ``(direct, split)`` where ``direct = sum alpha_n / ((1-rho)^2 + theta_n^2)``
    and ``split = sum_{n <= 2^N} alpha_n n^2 + 2^{2N} sum_{n > 2^N} alpha_n``; the
    far tail of both uses the integral of the leading power.
    """
    cut = 2 ** N
    big = 64 * cut
    n = np.arange(1, big + 1, dtype=float)
    alpha = n ** (-1.0 - eps)
    gap = 2.0 ** -N
    direct = float(np.sum(alpha / (gap * gap + n ** -2.0)))
    near = float(np.sum(alpha[:cut] * n[:cut] ** 2))
    far_mass = float(np.sum(alpha[cut:])) + big ** -eps / eps
    direct += big ** -eps / eps / (gap * gap)
    return direct, near + 4.0 ** N * far_mass


@dataclass(frozen=True)
class Section3Report:
    eps: float
    gamma: float
    condition: ConditionReport
    table: GrowthTable
    fit: FitResult
    theory_slope: float
    ceiling_slope: float

    @property
    def below_ceiling(self):
        return self.fit.slope < self.ceiling_slope

    def summary(self):
        return (f"fitted ksq slope {self.fit.slope:.2f} "
                f"(theory 2-eps = {self.theory_slope:.2f}; "
                f"upper-bound ceiling 2-gamma = {self.ceiling_slope:.2f})")


def section3_experiment(eps, gamma, N_min=8, N_max=24, pol=DEFAULT_POLICY):
    """Condition, growth table and fit for the section3 measure with ``phi = x**gamma``."""
    if not 1.0 < eps < 2.0:
        raise DomainError(f"epsilon must lie in (1, 2), got {eps}")
    if not 1.0 < gamma < 2.0:
        raise DomainError(f"gamma must lie in (1, 2), got {gamma}")
    spec = InnerFunctionSpec(singular=make_section3_measure(eps))
    phi = AdmissiblePhi.power(gamma)
    cond = phi_condition_sum(spec, phi, 0.0, pol)
    table = kernel_growth_table(spec, phi, N_min, N_max, pol)
    return Section3Report(eps, gamma, cond, table, fit_growth_exponent(table),
                          2.0 - eps, 2.0 - gamma)
