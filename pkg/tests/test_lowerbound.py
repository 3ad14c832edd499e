import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msk.lowerbound import (Explicit, PowerDecay, SamplingPoint, distance_dichotomy,
                            elementary_exponent, elementary_kernel_norm, eval_f_beta,
                            lower_growth_check, real_part_dominance, stolz_membership_check,
                            stolz_ratios, validate_term_majorant)
from msk.inner_core import DomainError
from msk.series import TruncationPolicy


def test_sampling_point():
    p = SamplingPoint(4)
    assert p.radius == 0.75 and p.angle == 0.25
    assert abs(p.point.z) == pytest.approx(0.75)
    assert SamplingPoint(1).point.z == 0


class TestKernelNorm:
    def test_n_one(self):
        assert elementary_kernel_norm(1.5, 1) == pytest.approx(math.sqrt(1 - math.exp(-2)))

    @pytest.mark.parametrize("n", [10**4, 10**5, 10**6, 10**8])
    def test_asymptotic(self, n):
        ratio = elementary_kernel_norm(1.5, n) / (math.sqrt(2) * n ** -0.25)
        assert 0.98 <= ratio <= 1.02

    def test_exponent_to_zero(self):
        vals = [abs(elementary_exponent(1.5, n)) for n in (1, 10, 100, 10**4)]
        assert vals[0] == 1.0 and all(b < a for a, b in zip(vals, vals[1:]))


class TestFBeta:
    def test_indicator(self, backend):
        for N in (1, 3, 50):
            f = eval_f_beta(1.5, Explicit.indicator(N), N)
            assert f.value.imag == pytest.approx(0.0, abs=1e-15)
            assert f.value.real == pytest.approx(elementary_kernel_norm(1.5, N), rel=1e-12)

    def test_zero_coefficients(self):
        assert eval_f_beta(1.5, Explicit((0.0,) * 10), 4).value == 0

    @settings(max_examples=20, deadline=None)
    @given(a=st.lists(st.floats(0, 5), min_size=1, max_size=40),
           b=st.lists(st.floats(0, 5), min_size=1, max_size=40), N=st.integers(1, 60))
    def test_linear(self, a, b, N):
        m = max(len(a), len(b))
        a = a + [0.0] * (m - len(a))
        b = b + [0.0] * (m - len(b))
        s = [x + y for x, y in zip(a, b)]
        fa = eval_f_beta(1.5, Explicit(tuple(a)), N).value
        fb = eval_f_beta(1.5, Explicit(tuple(b)), N).value
        fs = eval_f_beta(1.5, Explicit(tuple(s)), N).value
        assert abs(fs - (fa + fb)) <= 1e-10 * max(abs(fa) + abs(fb), 1e-300)

    def test_power_decay_against_long_sum(self, backend):
        eps, eta, N = 1.5, 0.1, 30
        f = eval_f_beta(eps, PowerDecay(eta), N)
        head = Explicit(tuple(np.arange(1, 2_000_001, dtype=float) ** (-0.5 * (1 + eta))))
        h = eval_f_beta(eps, head, N).value
        # tail beyond M: C N M^-(eps+eta)/2 / ((eps+eta)/2), C from the sampled constant
        C = validate_term_majorant(eps, eta, N).constant
        a = 0.5 * (eps + eta)
        assert abs(f.value - h) <= C * N * 2e6 ** -a / a

    def test_positive_real_part(self):
        for N in (2, 10, 100, 1000):
            assert eval_f_beta(1.5, PowerDecay(0.1), N).value.real > 0

    def test_doubling_ratio(self):
        eps, eta = 1.5, 0.1
        want = 2 ** (1 - eps / 2 - eta / 2)
        for N in (1000, 10_000):
            r = (eval_f_beta(eps, PowerDecay(eta), 2 * N).value.real
                 / eval_f_beta(eps, PowerDecay(eta), N).value.real)
            assert abs(r / want - 1) <= 0.25

    def test_majorant_validated(self):
        for N in (10, 1000, 10**5):
            assert validate_term_majorant(1.5, 0.1, N).ok

    def test_domain(self):
        with pytest.raises(DomainError):
            eval_f_beta(2.0, PowerDecay(0.1), 10)
        with pytest.raises(DomainError):
            PowerDecay(0.0)
        with pytest.raises(DomainError):
            Explicit((1.0, -1.0))

    def test_square_sum(self):
        s = PowerDecay(1.0).square_sum()
        assert s.value == pytest.approx(math.pi ** 2 / 6, rel=1e-10)


class TestGrowth:
    def test_bounded_below(self):
        run = lower_growth_check(1.5, 0.1, [100, 1000, 10_000])
        assert run.bounded_below and run.verdict == "bounded below"

    def test_large_eta_grows(self):
        run = lower_growth_check(1.5, 3.0, [100, 1000, 10_000])
        r = [row.norm_ratio for row in run.rows]
        assert all(x > 0 for x in r) and r[0] < r[1] < r[2]

    def test_zero_coefficients(self):
        run = lower_growth_check(1.5, 0.1, [10, 20], coeffs=Explicit((0.0,) * 30))
        assert all(row.re_f == 0.0 for row in run.rows)

    def test_list_validation(self):
        with pytest.raises(DomainError):
            lower_growth_check(1.5, 0.1, [100, 10])


class TestGeometry:
    def test_stolz(self):
        assert stolz_ratios([1])[0] == 1.0
        rep = stolz_membership_check(10**6)
        assert rep.inside and rep.sup_ratio < 2
        assert rep.last_ratio == pytest.approx(math.sqrt(2), rel=1e-6)

    def test_stolz_limit(self):
        # n |1 - lambda_n| -> sqrt(2) with O(1/n) error
        n = np.array([1e3, 1e4, 1e5])
        err = np.abs(stolz_ratios(n) - math.sqrt(2))
        assert np.all(err[1:] < err[:-1])

    @pytest.mark.parametrize("N", [10, 100, 1000])
    def test_distance_dichotomy(self, N):
        far, near = distance_dichotomy(N, np.arange(2 * N, 200 * N, 7), np.arange(1, N // 2 + 1))
        for v in (far, near):
            assert v.min() >= 0.25 and v.max() <= 4.0

    @pytest.mark.parametrize("N", [10, 100, 1000])
    def test_real_part_dominance(self, N):
        assert real_part_dominance(1.5, 0.1, N, np.arange(2 * N, 1000 * N, 13)) <= 8.0


def test_fallback_without_validated_majorant(monkeypatch):
    import msk.lowerbound as lb
    monkeypatch.setattr(lb, "MAJORANT_FACTOR", 1.0)
    pol = TruncationPolicy(max_terms=1000)
    with pytest.raises(lb.TruncationError):
        lb.eval_f_beta(1.5, PowerDecay(0.1), 10, pol)
