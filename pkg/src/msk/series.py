"""Adaptive summation of slowly convergent positive-index series.

A series is summed exactly up to an index ``M`` and the remainder
``sum_{n>M} f(n)`` is replaced by its first-order Euler-Maclaurin estimate

    int_M^inf f(x) dx - f(M)/2 - f'(M)/12,

whose error is at most ``(1/12) int_M^inf |f''|``.  That integral is the
total variation of ``f'`` on ``[M, inf)``; it is measured on a geometric grid
that reaches well into the pure power-law regime of the terms, beyond which
``f'`` is monotone.  ``M`` grows geometrically until the bound meets the
policy tolerance.

Plain integral-comparison majorants (``sum_{n>M} n**a <= M**(a+1)/|a+1|``)
are far too weak for the slowly decaying series met here: they would need
``~1e14`` terms for a 1e-10 relative tolerance at radius ``1 - 2**-24``.
"""
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

_GRID_PER_DECADE = 50
_TV_SAFETY = 1.25


@dataclass(frozen=True)
class TruncationPolicy:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_terms: int = 10_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    tail_bound: float
    terms_used: int
    log_value: Optional[float] = None


class TruncationError(RuntimeError):
    """Raised when ``max_terms`` is exhausted before the tolerance is met."""

    def __init__(self, message, partial, tail_bound, terms_used):
        super().__init__(message)
        self.partial = partial
        self.tail_bound = tail_bound
        self.terms_used = terms_used


@dataclass(frozen=True)
class TermSeries:
    """Terms ``f(n)``, ``n >= start``, with a smooth continuation to real ``x``.

    ``decay`` and ``log_power`` describe the asymptotic size
    ``f(x) ~ x**decay * log(x)**log_power``; ``scale`` is the index beyond which
    that regime has set in (up to a constant factor).
    """

    terms: Callable[[np.ndarray], np.ndarray]
    decay: float
    log_power: float = 0.0
    scale: float = 1.0
    start: int = 1
    m_start: int = 1024
    block: Optional[Callable[[int, int], complex]] = None

    @property
    def convergent(self):
        if abs(self.decay + 1.0) < 1e-12:
            return self.log_power < -1.0
        return self.decay < -1.0

    def block_sum(self, n0, n1):
        """Exact sum of the terms with ``n0 <= n < n1``."""
        if n1 <= n0:
            return 0.0
        if self.block is not None:
            return self.block(n0, n1)
        total = 0.0
        for lo in range(n0, n1, 1 << 20):
            x = np.arange(lo, min(lo + (1 << 20), n1), dtype=float)
            total = total + np.sum(self.terms(x))
        return total


@dataclass(frozen=True)
class SeriesSum:
    value: complex
    partial: complex
    tail_estimate: complex
    tail_bound: float
    terms_used: int


def _split(fn):
    """Real-valued views of a possibly complex vectorised function."""
    probe = np.asarray(fn(np.array([2.0])))
    if np.iscomplexobj(probe):
        return [lambda x: np.real(fn(x)), lambda x: np.imag(fn(x))], True
    return [lambda x: np.real(fn(x))], False


def _quad_panels(g, g_scaled, alpha, edges):
    """QAWS on ``[0, edges[0]]`` with weight ``u**alpha``, plain quad above."""
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v, e = integrate.quad(g_scaled, 0.0, edges[0], weight="alg", wvar=(alpha, 0.0),
                              epsabs=0.0, epsrel=1e-13, limit=200)
        total += v
        err += e
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = integrate.quad(g, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
            total += v
            err += e
    return total, err


def _geometric_edges(lo, hi):
    edges = [lo]
    while edges[-1] * 10.0 < hi:
        edges.append(edges[-1] * 10.0)
    edges.append(hi)
    return edges


def _tail_integral(f, decay, M, scale, log_power=0.0):
    """int_M^inf f(x) dx for a real f, with an error estimate."""
    if abs(decay + 1.0) < 1e-12:
        return _tail_integral_log(f, log_power, M, scale)
    alpha = -decay - 2.0  # integrand ~ u**alpha after x = 1/u

    def g(u):
        x = 1.0 / u
        return f(np.array([x]))[0] * x * x

    def g_scaled(u):
        # g(u) / u**alpha evaluated in x to dodge under/overflow; the
        # endpoint u = 0 takes the limit value
        x = 1.0 / max(u, u_floor)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            val = f(np.array([x]))[0] * x ** (2.0 + alpha)
        return val if math.isfinite(val) else 0.0

    u_top = 1.0 / M
    u_bot = min(u_top, 1.0 / scale) * 1e-3
    u_floor = u_bot * 1e-12
    return _quad_panels(g, g_scaled, alpha, _geometric_edges(u_bot, u_top))


def _log_reach(f):
    """Largest t in a short ladder with f(exp(t)) exp(t) finite and non-zero."""
    for t in (600.0, 300.0, 150.0, 80.0, 40.0, 20.0):
        with np.errstate(all="ignore"):
            v = f(np.array([math.exp(t)]))[0] * math.exp(t)
        if math.isfinite(v) and v != 0.0:
            return t
    return 10.0


def _tail_integral_log(f, log_power, M, scale):
    """Borderline case f ~ x**-1 log(x)**b, b < -1: substitute x = exp(1/v).

    Beyond the largest representable ``t = log x`` the slowly varying factor
    ``f(x) x log(x)**-b`` is frozen; its drift over the last doubling of ``t``
    times the weight mass of the frozen panel is added to the error.
    """
    alpha = -log_power - 2.0
    t_max = max(_log_reach(f), 2.0 * math.log(M))

    def slow(t):
        x = math.exp(t)
        return f(np.array([x]))[0] * x * t ** (-log_power)

    def g(v):
        t = 1.0 / v
        x = math.exp(t)
        return f(np.array([x]))[0] * x * t * t

    def g_scaled(v):
        return slow(min(1.0 / max(v, 1.0 / t_max), t_max))

    v_top = 1.0 / math.log(M)
    v_bot = max(min(v_top, 1.0 / math.log(max(scale, math.e))) * 0.1, 1.0 / t_max)
    if v_bot >= v_top:
        v_bot = 0.5 * v_top
    total, err = _quad_panels(g, g_scaled, alpha, _geometric_edges(v_bot, v_top))
    drift = abs(slow(t_max) - slow(0.5 * t_max))
    err += drift * (1.0 / t_max) ** (alpha + 1.0) / (alpha + 1.0)
    return total, err


def _derivative(f, x):
    h = 1e-5 * x
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _variation_of_derivative(f, M, scale):
    x_end = max(float(M), scale) * 1e4
    n = max(int(_GRID_PER_DECADE * math.log10(x_end / M)), 8)
    x = np.geomspace(float(M), x_end, n + 1)
    d = _derivative(f, x)
    return float(np.sum(np.abs(np.diff(d))) + abs(d[-1]))


def tail_estimate(series, M):
    """Estimate and error bound for ``sum_{n > M} f(n)``."""
    parts, is_complex = _split(series.terms)
    ests = []
    bound = 0.0
    m = np.array([float(M)])
    for f in parts:
        integral, qerr = _tail_integral(f, series.decay, M, series.scale, series.log_power)
        fm = f(m)[0]
        dfm = _derivative(f, m)[0]
        ests.append(integral - 0.5 * fm - dfm / 12.0)
        tv = _variation_of_derivative(f, M, series.scale)
        bound += _TV_SAFETY * tv / 12.0 + 2.0 * qerr
    est = complex(ests[0], ests[1]) if is_complex else ests[0]
    return est, bound


def sum_series(series, policy=DEFAULT_POLICY):
    """Sum a convergent :class:`TermSeries` to the policy tolerance."""
    if not series.convergent:
        raise ValueError("series is not convergent")
    start = series.start
    M = min(max(series.m_start, start), start + policy.max_terms - 1)
    partial = series.block_sum(start, M + 1)
    while True:
        est, bound = tail_estimate(series, M)
        total = partial + est
        used = M - start + 1
        if bound <= policy.rel_tol * abs(total) + policy.abs_tol:
            return SeriesSum(total, partial, est, bound, used)
        if not math.isfinite(bound):
            raise TruncationError(f"tail bound not finite after {used} terms",
                                  partial, math.inf, used)
        if used >= policy.max_terms:
            raise TruncationError(
                f"tolerance not met after {used} terms (tail bound {bound:.3g})",
                partial, bound, used)
        M_new = min(4 * M, start + policy.max_terms - 1)
        partial = partial + series.block_sum(M + 1, M_new + 1)
        M = M_new


def partial_sum(series, n_terms):
    """Plain partial sum of the first ``n_terms`` terms."""
    return series.block_sum(series.start, series.start + n_terms)
