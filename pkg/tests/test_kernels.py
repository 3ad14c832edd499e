"""Compiled and numpy kernels must agree; the numpy block sums are checked
against plain term sums."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msk import _pykernels as py
from msk import kernels

needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="extension not built")
eps_st = st.floats(1.01, 1.99)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(eps=eps_st, delta=st.floats(-3.0, 3.0), r=st.floats(0.0, 0.999999),
       n0=st.integers(1, 5000), length=st.integers(0, 3000))
def test_poisson_block_agrees(eps, delta, r, n0, length):
    a = py.poisson_block(eps, delta, r, n0, n0 + length)
    b = kernels.compiled.poisson_block(eps, delta, r, n0, n0 + length)
    assert b == pytest.approx(a, rel=1e-12, abs=1e-300)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(eps=eps_st, delta=st.floats(0.001, 3.0), p=st.floats(1.0, 2.0),
       c=st.sampled_from([0.0, 1.0, -1.0, 2.5]), n0=st.integers(1, 5000),
       length=st.integers(0, 3000))
def test_chord_phi_block_agrees(eps, delta, p, c, n0, length):
    knee = np.exp(-abs(c) / p) if c else np.inf
    a = py.chord_phi_block(eps, delta, p, c, knee, n0, n0 + length)
    b = kernels.compiled.chord_phi_block(eps, delta, p, c, knee, n0, n0 + length)
    assert b == pytest.approx(a, rel=1e-11)


@needs_compiled
@settings(max_examples=25, deadline=None)
@given(eps=eps_st, n_lo=st.integers(1, 400), count=st.integers(1, 20),
       kmin=st.integers(1, 200))
def test_cv_partial_sums_agree(eps, n_lo, count, kmin):
    a = py.cv_partial_sums(eps, n_lo, n_lo + count, kmin)
    b = kernels.compiled.cv_partial_sums(eps, n_lo, n_lo + count, kmin)
    np.testing.assert_allclose(b, a, rtol=1e-12)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(eps=eps_st, N=st.integers(1, 10**6), n0=st.integers(1, 10**6),
       length=st.integers(1, 2000), eta=st.floats(0.01, 3.0))
def test_fbeta_block_agrees(eps, N, n0, length, eta):
    beta = np.arange(n0, n0 + length, dtype=float) ** (-0.5 * (1 + eta))
    a = py.fbeta_block(eps, N, n0, beta)
    b = kernels.compiled.fbeta_block(eps, N, n0, beta)
    assert abs(b - a) <= 1e-11 * np.sum(np.abs(py.fbeta_terms(eps, N, np.arange(n0, n0 + length), beta)))


def test_cv_cutoff():
    assert py.cv_cutoff(3, 64) == 64
    assert py.cv_cutoff(100, 64) == 400


def test_block_matches_terms():
    x = np.arange(5, 905, dtype=float)
    assert py.poisson_block(1.5, 0.0, 0.99, 5, 905) == pytest.approx(
        np.sum(py.poisson_terms(1.5, 0.0, 0.99, x)), rel=1e-13)


def test_cv_partial_sum_by_hand():
    # n = 1, k = 2..64 (kmin dominates 4n)
    k = np.arange(2, 65, dtype=float)
    want = np.sum((2.0 * k) ** 0 * k ** -2.5 / (4 * np.sin(0.5 * (1 - 1 / k)) ** 2))
    assert py.cv_partial_sums(1.5, 1, 2, 64)[0] == pytest.approx(want, rel=1e-13)


def test_backend_selection_reports_name():
    assert kernels.BACKEND in ("cython", "python")
