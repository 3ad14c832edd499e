"""Pure numpy implementation of the hot summation kernels.

Every public function here has a twin with the same signature in the
compiled ``_ckernels`` module.  The ``*_terms`` functions are vectorised
over a float index array and are also used by the tail machinery in
:mod:`msk.series`, which needs the terms at non-integer indices.

Index conventions for the section-3 measure: the n-th atom sits at angle
``1/n + shift`` and carries mass ``n**-(1+eps)``.  Evaluation happens along
the radius at angle ``psi``; only ``delta = shift - psi`` enters.
"""
import numpy as np

_CHUNK = 1 << 20


def atom_mass(eps, x):
    return x ** (-1.0 - eps)


def phi_values(p, c, knee, d):
    """phi(d) = d**p * log(1/d)**c below ``knee``, power continuation above."""
    d = np.asarray(d, dtype=float)
    if c == 0.0:
        return d ** p
    below = np.minimum(d, knee)
    val = below ** p * np.log(1.0 / below) ** c
    return np.where(d <= knee, val, val * (d / knee) ** p)


def poisson_terms(eps, delta, r, x):
    one_m = 1.0 - r
    s = np.sin(0.5 * (1.0 / x + delta))
    return x ** (-1.0 - eps) * (one_m * (1.0 + r)) / (one_m * one_m + 4.0 * r * s * s)


def chord_phi_terms(eps, delta, p, c, knee, x):
    chord = 2.0 * np.abs(np.sin(0.5 * (1.0 / x + delta)))
    return x ** (-1.0 - eps) / phi_values(p, c, knee, chord)


def cv_terms(eps, n, k):
    s = np.sin(0.5 * (1.0 / n - 1.0 / k))
    return (n * k) ** (-1.0 - eps) / (4.0 * s * s)


def fbeta_terms(eps, N, x, beta):
    """beta_n * k_n(lambda_N) / ||k_n||  for the elementary kernels k_n."""
    x = np.asarray(x, dtype=float)
    inv_n = 1.0 / x
    inv_N = 1.0 / N
    a = -(2.0 - inv_n) * x ** (-eps)
    ang = inv_N - inv_n
    sh = np.sin(0.5 * ang)
    one_minus_e = 2.0 * sh * sh - 1j * np.sin(ang)
    one_minus_u = inv_N + (1.0 - inv_N) * one_minus_e
    w = -x ** (-1.0 - eps) * (2.0 - one_minus_u) / one_minus_u
    num = -np.expm1(a + w)
    one_minus_rho = inv_n + inv_N - inv_n * inv_N
    den = one_minus_rho + (1.0 - one_minus_rho) * one_minus_e
    ksq = -np.expm1(2.0 * a) / (inv_n * (2.0 - inv_n))
    return beta * num / den / np.sqrt(ksq)


def _blocks(n0, n1):
    for lo in range(n0, n1, _CHUNK):
        yield np.arange(lo, min(lo + _CHUNK, n1), dtype=float)


def poisson_block(eps, delta, r, n0, n1):
    return float(sum(np.sum(poisson_terms(eps, delta, r, x)) for x in _blocks(n0, n1)))


def chord_phi_block(eps, delta, p, c, knee, n0, n1):
    return float(sum(np.sum(chord_phi_terms(eps, delta, p, c, knee, x))
                     for x in _blocks(n0, n1)))


def cv_cutoff(n, kmin):
    return max(4 * n, kmin)


def cv_partial_sums(eps, n_lo, n_hi, kmin):
    out = np.empty(n_hi - n_lo)
    for i, n in enumerate(range(n_lo, n_hi)):
        k = np.arange(1, cv_cutoff(n, kmin) + 1, dtype=float)
        k = k[k != n]
        out[i] = np.sum(cv_terms(eps, float(n), k))
    return out


def fbeta_block(eps, N, n0, betas):
    betas = np.asarray(betas, dtype=float)
    total = 0j
    for lo in range(0, betas.size, _CHUNK):
        b = betas[lo:lo + _CHUNK]
        x = np.arange(n0 + lo, n0 + lo + b.size, dtype=float)
        total += np.sum(fbeta_terms(eps, N, x, b))
    return complex(total)
