"""Evaluation of inner functions and model-space kernels.

Moduli are handled as logarithms throughout; the one unavoidable subtraction
``1 - |I|^2`` is done as ``-expm1(2 log|I|)``.  Radial quantities accept an
``angle`` so that ``r`` may run along any radius ``r e^{i angle}``.
"""
import cmath
import math

import numpy as np

from .inner_core import (BlaschkeFamily, DomainError, ExplicitAtoms, ExplicitZeros,
                         MeasureFamily, UnitDiskPoint, blaschke_factor_array,
                         neg_log_factor_modulus)
from .series import DEFAULT_POLICY, EvalResult, sum_series


def _complex(p):
    return p.z if isinstance(p, UnitDiskPoint) else complex(p)


def _check_radius(r):
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {r}")


def cexpm1(w):
    """exp(w) - 1 for complex w without cancellation; exp(-inf + iy) - 1 = -1."""
    x, y = w.real, w.imag
    s = math.sin(0.5 * y)
    re = math.expm1(x) * math.cos(y) - 2.0 * s * s
    im = math.exp(x) * math.sin(y) if x != -math.inf else 0.0
    return complex(re, im)


def blaschke_factor(lam, z):
    """b_lam(z) = (|lam|/lam) (lam - z)/(1 - conj(lam) z), with b_0(z) = z."""
    lam, z = _complex(lam), complex(z)
    if abs(lam) >= 1.0:
        raise DomainError(f"zero {lam} not in the open disk")
    if abs(z) > 1.0:
        raise DomainError(f"point {z} outside the closed disk")
    den = 1.0 - lam.conjugate() * z
    if den == 0.0:
        raise DomainError("pole of the Blaschke factor")
    if lam == 0.0:
        return z
    # unit factor from the phase stays unimodular even for subnormal lam
    return cmath.exp(-1j * cmath.phase(lam)) * (lam - z) / den


def one_minus_factor_modsq(lam, r):
    """1 - |b_lam(r)|^2 = (1-r^2)(1-|lam|^2)/|1 - r conj(lam)|^2."""
    lam = _complex(lam)
    rho = abs(lam)
    one_m_rho = (1.0 - lam.real * lam.real - lam.imag * lam.imag) / (1.0 + rho)
    s = math.sin(0.5 * cmath.phase(lam)) if rho else 0.0
    den = ((1.0 - r) + r * one_m_rho) ** 2 + 4.0 * r * rho * s * s
    return (1.0 - r) * (1.0 + r) * one_m_rho * (1.0 + rho) / den


def _zero_arrays(zeros):
    lam = zeros.as_array()
    rho = np.abs(lam)
    gap = (1.0 - lam.real ** 2 - lam.imag ** 2) / (1.0 + rho)
    return gap, np.angle(lam)


def log_abs_blaschke(spec, r, pol=DEFAULT_POLICY, angle=0.0):
    """sum_n log|b_n(r e^{i angle})| with a certified tail bound for families."""
    _check_radius(r)
    b = spec.blaschke
    if isinstance(b, ExplicitZeros):
        if not b.zeros:
            return EvalResult(0.0, 0.0, 0)
        gap, theta = _zero_arrays(b)
        if np.any(gap <= 0):
            raise DomainError("zero not in open disk")
        return EvalResult(-float(np.sum(neg_log_factor_modulus(gap, theta - angle, r))),
                          0.0, len(b.zeros))
    if isinstance(b, BlaschkeFamily):
        s = sum_series(b.logmod_series(r, angle), pol)
        return EvalResult(-float(s.value), s.tail_bound, s.terms_used)
    raise TypeError(f"unsupported blaschke spec {type(b).__name__}")


def log_abs_singular(spec, r, pol=DEFAULT_POLICY, angle=0.0):
    """log|S_mu(r e^{i angle})| = -sum_k alpha_k (1-r^2)/|zeta_k - r e^{i angle}|^2."""
    _check_radius(r)
    s = spec.singular
    if isinstance(s, ExplicitAtoms):
        if not s.atoms:
            return EvalResult(0.0, 0.0, 0)
        sn = np.sin(0.5 * (s.thetas() - angle))
        terms = s.masses() * ((1.0 - r) * (1.0 + r)) / ((1.0 - r) ** 2 + 4.0 * r * sn * sn)
        return EvalResult(-float(np.sum(terms)), 0.0, len(s.atoms))
    if isinstance(s, MeasureFamily):
        res = sum_series(s.poisson_series(r, angle), pol)
        return EvalResult(-float(res.value), res.tail_bound, res.terms_used)
    raise TypeError(f"unsupported singular spec {type(s).__name__}")


def _log_modulus(spec, r, pol, angle):
    lb = log_abs_blaschke(spec, r, pol, angle)
    ls = log_abs_singular(spec, r, pol, angle)
    return (lb.value + ls.value, lb.tail_bound + ls.tail_bound,
            lb.terms_used + ls.terms_used)


def inner_modulus(spec, r, pol=DEFAULT_POLICY, angle=0.0):
    """|I(r e^{i angle})|; ``log_value`` carries log|I| at full precision."""
    L, dL, used = _log_modulus(spec, r, pol, angle)
    value = math.exp(L)
    return EvalResult(value, value * math.expm1(dL), used, log_value=L)


def kernel_norm_sq(spec, r, pol=DEFAULT_POLICY, angle=0.0):
    """||k_r^I||^2 = (1 - |I(r)|^2)/(1 - r^2)."""
    L, dL, used = _log_modulus(spec, r, pol, angle)
    one_m_r2 = (1.0 - r) * (1.0 + r)
    value = (0.0 - math.expm1(2.0 * L)) / one_m_r2
    if dL:
        lo = -math.expm1(2.0 * min(L + dL, 0.0)) / one_m_r2
        hi = -math.expm1(2.0 * (L - dL)) / one_m_r2
        bound = max(hi - value, value - lo)
    else:
        bound = 0.0
    return EvalResult(value, bound, used, log_value=L)


def elementary_inner_value(atom, z):
    """exp(alpha (z + zeta)/(z - zeta)), zeta = e^{i theta}."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"point {z} not in the open disk")
    zeta = cmath.exp(1j * atom.theta)
    return cmath.exp(atom.mass * (z + zeta) / (z - zeta))


def inner_log(spec, z, pol=DEFAULT_POLICY):
    """A complex logarithm of I(z), its error bound and terms used.

    The imaginary part is an arbitrary branch; only ``exp`` of it is meaningful.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"point {z} not in the open disk")
    total, bound, used = 0j, 0.0, 0
    b = spec.blaschke
    if isinstance(b, ExplicitZeros):
        if b.zeros:
            lam = b.as_array()
            gap, theta = _zero_arrays(b)
            mod = -neg_log_factor_modulus(gap, theta - cmath.phase(z), abs(z))
            with np.errstate(divide="ignore", invalid="ignore"):
                arg = np.angle(blaschke_factor_array(lam, z))
            total += complex(float(np.sum(mod)), float(np.sum(arg)))
            used += lam.size
    else:
        s = sum_series(b.log_value_series(z), pol)
        total, bound, used = total + s.value, bound + s.tail_bound, used + s.terms_used
    m = spec.singular
    if isinstance(m, ExplicitAtoms):
        if m.atoms:
            zeta = np.exp(1j * m.thetas())
            total += complex(np.sum(m.masses() * (z + zeta) / (z - zeta)))
            used += len(m.atoms)
    else:
        s = sum_series(m.exponent_series(z), pol)
        total, bound, used = total + s.value, bound + s.tail_bound, used + s.terms_used
    return total, bound, used


def inner_value(spec, z, pol=DEFAULT_POLICY):
    w, _, _ = inner_log(spec, z, pol)
    return cmath.exp(w) if w.real != -math.inf else 0j


def kernel_eval(spec, lam, z, pol=DEFAULT_POLICY):
    """k_lam^I(z) = (1 - conj(I(lam)) I(z))/(1 - conj(lam) z)."""
    lam, z = _complex(lam), _complex(z)
    if abs(lam) >= 1.0 or abs(z) >= 1.0:
        raise DomainError("kernel points must lie in the open disk")
    wl, _, _ = inner_log(spec, lam, pol)
    if z == lam:
        rho = abs(lam)
        return complex(-math.expm1(2.0 * wl.real) / ((1.0 - rho) * (1.0 + rho)), 0.0)
    wz, _, _ = inner_log(spec, z, pol)
    return -cexpm1(wl.conjugate() + wz) / (1.0 - lam.conjugate() * z)


def pythag_ratio(rho, theta):
    """|1 - rho e^{i theta}|^2 / ((1-rho)^2 + theta^2), vectorised."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    gap = 1.0 - rho
    s = np.sin(0.5 * theta)
    return (gap * gap + 4.0 * rho * s * s) / (gap * gap + theta * theta)
