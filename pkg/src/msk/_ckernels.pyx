# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the block-sum kernels in ``_pykernels``.

Sums are accumulated in ascending index order with Neumaier compensation.
"""
from libc.math cimport sin, cos, exp, expm1, log, pow, fabs, sqrt, INFINITY

import numpy as np


cdef inline void _acc(double *s, double *comp, double v) noexcept nogil:
    cdef double t = s[0] + v
    if fabs(s[0]) >= fabs(v):
        comp[0] += (s[0] - t) + v
    else:
        comp[0] += (v - t) + s[0]
    s[0] = t


cdef inline double _phi(double p, double c, double knee, double d) noexcept nogil:
    cdef double below, val
    if c == 0.0:
        return pow(d, p)
    below = d if d < knee else knee
    val = pow(below, p) * pow(log(1.0 / below), c)
    if d <= knee:
        return val
    return val * pow(d / knee, p)


def poisson_block(double eps, double delta, double r, long n0, long n1):
    cdef double s = 0.0, comp = 0.0, one_m = 1.0 - r, num, sn, x
    cdef long n
    num = one_m * (1.0 + r)
    with nogil:
        for n in range(n0, n1):
            x = <double>n
            sn = sin(0.5 * (1.0 / x + delta))
            _acc(&s, &comp, pow(x, -1.0 - eps) * num / (one_m * one_m + 4.0 * r * sn * sn))
    return s + comp


def chord_phi_block(double eps, double delta, double p, double c, double knee,
                    long n0, long n1):
    cdef double s = 0.0, comp = 0.0, x, chord
    cdef long n
    with nogil:
        for n in range(n0, n1):
            x = <double>n
            chord = 2.0 * fabs(sin(0.5 * (1.0 / x + delta)))
            _acc(&s, &comp, pow(x, -1.0 - eps) / _phi(p, c, knee, chord))
    return s + comp


def cv_cutoff(long n, long kmin):
    return max(4 * n, kmin)


def cv_partial_sums(double eps, long n_lo, long n_hi, long kmin):
    out = np.empty(n_hi - n_lo)
    cdef double[::1] o = out
    cdef long n, k, kmax
    cdef double s, comp, an, sn, xn, xk
    with nogil:
        for n in range(n_lo, n_hi):
            s = 0.0
            comp = 0.0
            xn = <double>n
            an = pow(xn, -1.0 - eps)
            kmax = 4 * n if 4 * n > kmin else kmin
            for k in range(1, kmax + 1):
                if k == n:
                    continue
                xk = <double>k
                sn = sin(0.5 * (1.0 / xn - 1.0 / xk))
                _acc(&s, &comp, an * pow(xk, -1.0 - eps) / (4.0 * sn * sn))
            o[n - n_lo] = s + comp
    return out


def fbeta_block(double eps, long N, long n0, double[::1] betas):
    cdef double inv_N = 1.0 / N, r_N = 1.0 - 1.0 / N
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    cdef double x, inv_n, a, ang, sh, e_re, e_im, u_re, u_im, p_re, p_im
    cdef double q, w_re, w_im, em, cy, ez_re, ez_im, rho_m, d_re, d_im
    cdef double ksq, scale, t_re, t_im, dd
    cdef long j, m = betas.shape[0]
    with nogil:
        for j in range(m):
            if betas[j] == 0.0:
                continue
            x = <double>(n0 + j)
            inv_n = 1.0 / x
            a = -(2.0 - inv_n) * pow(x, -eps)
            ang = inv_N - inv_n
            sh = sin(0.5 * ang)
            # 1 - e^{i ang}
            e_re = 2.0 * sh * sh
            e_im = -sin(ang)
            # 1 - u with u = r_N e^{i ang}
            u_re = inv_N + r_N * e_re
            u_im = r_N * e_im
            # w = -alpha_n (1 + u) / (1 - u)
            p_re = 2.0 - u_re
            p_im = -u_im
            q = u_re * u_re + u_im * u_im
            w_re = -pow(x, -1.0 - eps) * (p_re * u_re + p_im * u_im) / q
            w_im = -pow(x, -1.0 - eps) * (p_im * u_re - p_re * u_im) / q
            # -(exp(a + w) - 1)
            em = expm1(a + w_re)
            cy = sin(0.5 * w_im)
            ez_re = -(em * cos(w_im) - 2.0 * cy * cy)
            ez_im = -(exp(a + w_re) * sin(w_im))
            # 1 - rho e^{i ang}
            rho_m = inv_n + inv_N - inv_n * inv_N
            d_re = rho_m + (1.0 - rho_m) * e_re
            d_im = (1.0 - rho_m) * e_im
            ksq = -expm1(2.0 * a) / (inv_n * (2.0 - inv_n))
            scale = betas[j] / sqrt(ksq)
            dd = d_re * d_re + d_im * d_im
            t_re = scale * (ez_re * d_re + ez_im * d_im) / dd
            t_im = scale * (ez_im * d_re - ez_re * d_im) / dd
            _acc(&sr, &cr, t_re)
            _acc(&si, &ci, t_im)
    return complex(sr + cr, si + ci)
