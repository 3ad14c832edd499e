"""Lower-growth construction from elementary singular factors.

The inner function is the product of ``I_n = exp(alpha_n (z + zeta_n)/(z - zeta_n))``
over the section3 atoms ``zeta_n = e^{i/n}``, ``alpha_n = n**-(1+eps)``.  The
sampling points ``lambda_n = (1 - 1/n) e^{i/n}`` sit in a Stolz angle at 1, and

    f_beta = sum_n beta_n k_n / ||k_n||,   k_n = kernel of I_n at lambda_n,

is evaluated at ``lambda_N``.  Terms for ``n >> N`` behave like
``N n**-(1 + (eps+eta)/2)`` for ``beta_n = n**-((1+eta)/2)``; that exponent is
checked on a sample before the adaptive tail engine relies on it.
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import kernels
from .evaluation import elementary_inner_value
from .inner_core import CircleAtom, DomainError, UnitDiskPoint
from .series import DEFAULT_POLICY, EvalResult, TermSeries, TruncationError, sum_series

MAJORANT_FACTOR = 8.0


def _check_eps(eps):
    if not 1.0 < eps < 2.0:
        raise DomainError(f"epsilon must lie in (1, 2), got {eps}")


@dataclass(frozen=True)
class SamplingPoint:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("sampling index must be >= 1")

    @property
    def radius(self):
        return 1.0 - 1.0 / self.n

    @property
    def angle(self):
        return 1.0 / self.n

    @property
    def point(self):
        return UnitDiskPoint.from_complex(self.radius * complex(math.cos(self.angle),
                                                                math.sin(self.angle)))


@dataclass(frozen=True)
class PowerDecay:
    """beta_n = n**-((1+eta)/2)."""

    eta: float

    def __post_init__(self):
        if not self.eta > 0.0:
            raise DomainError("eta must be positive")

    def values(self, n0, n1):
        return np.arange(n0, n1, dtype=float) ** (-0.5 * (1.0 + self.eta))

    def square_sum(self, pol=DEFAULT_POLICY):
        """sum_n beta_n^2 with a certified tail."""
        e = 1.0 + self.eta
        s = sum_series(TermSeries(lambda x: x ** -e, decay=-e), pol)
        return EvalResult(float(s.value), s.tail_bound, s.terms_used)


@dataclass(frozen=True)
class Explicit:
    """beta_1, ..., beta_m given explicitly; zero beyond."""

    values_: Tuple[float, ...]

    def __post_init__(self):
        v = np.asarray(self.values_, dtype=float)
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise DomainError("coefficients must be finite and non-negative")

    @classmethod
    def indicator(cls, N):
        return cls(tuple([0.0] * (N - 1) + [1.0]))

    def values(self, n0, n1):
        out = np.zeros(max(n1 - n0, 0))
        v = np.asarray(self.values_, dtype=float)
        lo, hi = max(n0, 1), min(n1, v.size + 1)
        if hi > lo:
            out[lo - n0:hi - n0] = v[lo - 1:hi - 1]
        return out

    def square_sum(self, pol=DEFAULT_POLICY):
        return EvalResult(float(np.sum(np.square(self.values_))), 0.0, len(self.values_))


CoefficientSeq = PowerDecay | Explicit


def elementary_kernel_norm(eps, n):
    """||k_{lambda_n}^{I_n}|| from the exact value of I_n at lambda_n."""
    _check_eps(eps)
    if n < 1:
        raise DomainError("n must be >= 1")
    p = SamplingPoint(int(n))
    atom = CircleAtom(p.angle, n ** (-1.0 - eps))
    # I_n(lambda_n) is real: log I_n = -(2 - 1/n) n**-eps
    log_i = math.log(abs(elementary_inner_value(atom, p.point.z)))
    inv_n = 1.0 / n
    return math.sqrt(-math.expm1(2.0 * log_i) / (inv_n * (2.0 - inv_n)))


def elementary_exponent(eps, n):
    """log I_n(lambda_n) = -(2 - 1/n) / n**eps."""
    return -(2.0 - 1.0 / n) * n ** -eps


def f_beta_decay(eps, eta):
    return -1.0 - 0.5 * (eps + eta)


def fbeta_term_values(eps, N, n, beta):
    return kernels.fbeta_terms(eps, N, np.asarray(n, dtype=float), beta)


@dataclass(frozen=True)
class MajorantCheck:
    ok: bool
    spread: float
    constant: float


def validate_term_majorant(eps, eta, N, n_max=None):
    """Check ``|term_n| ~ C N n**decay`` for ``n >= 2N`` up to ``n_max``.

    ``spread`` is the ratio between the largest and the smallest value of
    ``|term_n| / (N n**decay)`` on a geometric sample; the decay law is
    accepted when it stays within ``MAJORANT_FACTOR``.
    """
    d = f_beta_decay(eps, eta)
    n_max = n_max or max(64 * N, 1 << 16) * 64
    n = np.unique(np.geomspace(2 * N, n_max, 200).round())
    beta = n ** (-0.5 * (1.0 + eta))
    t = np.abs(fbeta_term_values(eps, N, n, beta)) / (N * n ** d)
    spread = float(t.max() / t.min())
    return MajorantCheck(spread <= MAJORANT_FACTOR, spread, float(t.max()))


def eval_f_beta(eps, coeffs, N, pol=DEFAULT_POLICY):
    """f_beta(lambda_N); ``tail_bound`` covers the truncated part of the series."""
    _check_eps(eps)
    if N < 1:
        raise DomainError("N must be >= 1")
    if isinstance(coeffs, Explicit):
        m = len(coeffs.values_)
        v = complex(kernels.backend.fbeta_block(eps, N, 1, coeffs.values(1, m + 1)))
        return EvalResult(v, 0.0, m)
    if not isinstance(coeffs, PowerDecay):
        raise TypeError(f"unsupported coefficients {type(coeffs).__name__}")

    eta = coeffs.eta
    m_start = max(1024, 4 * N)
    block = lambda a, b: kernels.backend.fbeta_block(eps, N, a, coeffs.values(a, b))
    series = TermSeries(lambda x: fbeta_term_values(eps, N, x, x ** (-0.5 * (1.0 + eta))),
                        decay=f_beta_decay(eps, eta), scale=float(N), m_start=m_start,
                        block=block)
    check = validate_term_majorant(eps, eta, N)
    if check.ok:
        s = sum_series(series, pol)
        return EvalResult(complex(s.value), float(s.tail_bound), s.terms_used)
    # decay law not confirmed: plain partial sum with the empirical majorant tail
    M = pol.max_terms
    partial = complex(series.block_sum(1, M + 1))
    a = -f_beta_decay(eps, eta) - 1.0
    bound = check.constant * N * M ** -a / a
    if bound > pol.rel_tol * abs(partial) + pol.abs_tol:
        raise TruncationError("decay majorant not validated and max_terms too small",
                              partial, bound, M)
    return EvalResult(partial, bound, M)


@dataclass(frozen=True)
class LowerBoundRow:
    N: int
    re_f: float
    norm_ratio: float
    tail_bound: float


@dataclass(frozen=True)
class LowerBoundRun:
    eps: float
    eta: float
    rows: Tuple[LowerBoundRow, ...]

    @property
    def exponent(self):
        return 1.0 - 0.5 * self.eps - 0.5 * self.eta

    @property
    def bounded_below(self):
        r = np.array([row.norm_ratio for row in self.rows])
        return bool(r.size and np.all(r > 0) and r.min() >= 0.1 * np.median(r))

    @property
    def verdict(self):
        return "bounded below" if self.bounded_below else "not bounded below"


def lower_growth_check(eps, eta, N_list, pol=DEFAULT_POLICY, coeffs=None):
    """Rows ``(N, Re f_beta(lambda_N), Re f_beta(lambda_N) (1/N)**(1 - eps/2 - eta/2))``."""
    _check_eps(eps)
    N_list = [int(N) for N in N_list]
    if not N_list or any(b <= a for a, b in zip(N_list, N_list[1:])) or N_list[0] < 1:
        raise DomainError("N_list must be a non-empty increasing list of positive integers")
    coeffs = PowerDecay(eta) if coeffs is None else coeffs
    expo = 1.0 - 0.5 * eps - 0.5 * eta
    rows = []
    for N in N_list:
        f = eval_f_beta(eps, coeffs, N, pol)
        re_f = float(f.value.real)
        rows.append(LowerBoundRow(N, re_f, re_f * (1.0 / N) ** expo, f.tail_bound))
    return LowerBoundRun(float(eps), float(eta), tuple(rows))


# --- geometric facts about the sampling sequence ---------------------------

@dataclass(frozen=True)
class StolzReport:
    sup_ratio: float
    argmax: int
    last_ratio: float
    bound: float

    @property
    def inside(self):
        return self.sup_ratio <= self.bound


def stolz_ratios(n):
    """``|1 - lambda_n| / (1 - |lambda_n|)`` computed without cancellation."""
    n = np.asarray(n, dtype=float)
    gap = 1.0 / n
    s = np.sin(0.5 * gap)
    return np.sqrt(gap * gap + 4.0 * (1.0 - gap) * s * s) / gap


def stolz_membership_check(N_max, bound=2.0):
    if N_max < 2:
        raise DomainError("N_max must be >= 2")
    r = stolz_ratios(np.arange(1, N_max + 1))
    k = int(np.argmax(r))
    return StolzReport(float(r[k]), k + 1, float(r[-1]), float(bound))


def distance_to_atom(N, n):
    """|lambda_N - zeta_n|."""
    n = np.asarray(n, dtype=float)
    gap = 1.0 / N
    s = np.sin(0.5 * (1.0 / N - 1.0 / n))
    return np.sqrt(gap * gap + 4.0 * (1.0 - gap) * s * s)


def distance_dichotomy(N, n_far: Sequence[int], n_near: Sequence[int]):
    """Scaled distances ``N |lambda_N - zeta_n|`` (far atoms, n >= 2N) and
    ``n |lambda_N - zeta_n|`` (near atoms, n <= N/2)."""
    far = N * distance_to_atom(N, n_far)
    near = np.asarray(n_near, dtype=float) * distance_to_atom(N, n_near)
    return far, near


def real_part_dominance(eps, eta, N, n):
    """max ``|term_n| / Re(term_n)`` over the given indices."""
    n = np.asarray(n, dtype=float)
    t = fbeta_term_values(eps, N, n, n ** (-0.5 * (1.0 + eta)))
    if np.any(t.real <= 0):
        return math.inf
    return float(np.max(np.abs(t) / t.real))

