import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from msk.inner_core import (AdmissiblePhi, CircleAtom, DomainError, ExplicitAtoms,
                            ExplicitZeros, InnerFunctionSpec, PowerZeros, Section3Measure,
                            UnitDiskPoint, make_section3_measure, phi_admissibility_check,
                            phi_eval, validate_spec, wrap_angle)
from msk.series import sum_series


class TestValidateSpec:
    def test_empty_spec_is_trivial(self):
        rep = validate_spec(InnerFunctionSpec())
        assert rep.ok
        assert any("I == 1" in m for m in rep.messages("info"))

    def test_boundary_zero_rejected(self):
        rep = validate_spec(InnerFunctionSpec(ExplicitZeros((UnitDiskPoint(1.0, 0.0),))))
        assert not rep.ok
        assert "not in open disk" in rep.messages("error")[0]

    def test_section3_ok(self):
        rep = validate_spec(InnerFunctionSpec(singular=make_section3_measure(1.5)))
        assert rep.ok

    def test_all_findings_reported(self):
        spec = InnerFunctionSpec(
            ExplicitZeros((UnitDiskPoint(2.0, 0.0), UnitDiskPoint(0.0, 1.0))),
            ExplicitAtoms((CircleAtom(0.5, -1.0), CircleAtom(0.5, 1.0), CircleAtom(4.0, 1.0))))
        errors = validate_spec(spec).messages("error")
        assert len(errors) == 5

    def test_bad_family_params(self):
        rep = validate_spec(InnerFunctionSpec(singular=Section3Measure(2.5)))
        assert not rep.ok
        rep = validate_spec(InnerFunctionSpec(PowerZeros(s=0.9)))
        assert not rep.ok

    def test_idempotent(self):
        spec = InnerFunctionSpec(ExplicitZeros.from_complex([0.5, 2.0]))
        assert validate_spec(spec) == validate_spec(spec)


class TestSection3:
    def test_atom_values(self):
        m = make_section3_measure(1.5)
        assert m.theta(2) == 0.5
        assert m.mass(2) == pytest.approx(2 ** -2.5)
        assert m.mass(2) == pytest.approx(0.17678, abs=1e-5)

    @pytest.mark.parametrize("eps", [1.0, 2.0, 0.5, 2.5])
    def test_eps_range(self, eps):
        with pytest.raises(DomainError):
            make_section3_measure(eps)

    def test_total_mass_matches_zeta(self):
        res = sum_series(make_section3_measure(1.5).mass_series())
        z = special.zeta(2.5)
        assert z - 1e-6 <= res.value <= z + 1e-12
        assert res.value == pytest.approx(z, rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(eps=st.floats(1.01, 1.99), n=st.integers(1, 10**9))
    def test_mass_identity(self, eps, n):
        m = make_section3_measure(eps)
        assert m.mass(n) * float(n) ** (1 + eps) == pytest.approx(1.0, rel=1e-13)

    def test_tail_majorant_dominates(self):
        m = make_section3_measure(1.5)
        for M in (10, 100, 1000):
            assert special.zeta(2.5, M + 1) <= m.tail_majorant(M)

    def test_atom_index(self):
        m = Section3Measure(1.5, shift=0.0)
        assert m.atom_index_at(0.25) == 4
        assert m.atom_index_at(0.0) is None
        assert m.atom_index_at(0.3) is None


class TestPhi:
    def test_values(self):
        assert phi_eval(AdmissiblePhi.power(1.5), 0.25) == pytest.approx(0.125)
        assert phi_eval(AdmissiblePhi.power(1.0), 0.3) == 0.3
        assert phi_eval(AdmissiblePhi.power_log(1.5, 1, "+"), math.exp(-1)) == pytest.approx(
            math.exp(-1.5))

    def test_sign_convention(self):
        # "+" multiplies by the log, "-" divides
        x = 1e-4
        L = math.log(1 / x)
        assert phi_eval(AdmissiblePhi.power_log(1.5, 2, "+"), x) == pytest.approx(x ** 1.5 * L ** 2)
        assert phi_eval(AdmissiblePhi.power_log(1.5, 2, "-"), x) == pytest.approx(x ** 1.5 / L ** 2)

    def test_knee_continuation(self):
        phi = AdmissiblePhi.power_log(1.5, 1, "-")
        k = phi.knee
        assert k == pytest.approx(math.exp(-2))
        assert phi_eval(phi, 0.5) == pytest.approx(phi_eval(phi, k) * (0.5 / k) ** 1.5)
        assert phi_admissibility_check(phi).ok

    @pytest.mark.parametrize("x", [0.0, -1.0, 2.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            phi_eval(AdmissiblePhi.power(1.5), x)

    def test_admissibility_triage(self):
        assert phi_admissibility_check(AdmissiblePhi.power(1.5)).ok
        r = phi_admissibility_check(AdmissiblePhi.power(2.5))
        assert not r.ok and "condition (2)" in r.messages("error")[0]
        r = phi_admissibility_check(AdmissiblePhi.power(0.5))
        assert not r.ok and "condition (1)" in r.messages("error")[0]

    def test_endpoints(self):
        assert phi_admissibility_check(AdmissiblePhi.power(1.0)).ok
        rep = phi_admissibility_check(AdmissiblePhi.power(2.0))
        assert rep.ok and rep.messages("warning")

    def test_x2_log(self):
        # x^2 log(1/x): phi/x^2 = log(1/x) decreases, phi/x -> 0
        assert phi_admissibility_check(AdmissiblePhi.power_log(2.0, 1.0, "+")).ok
        # x log(1/x): phi/x unbounded
        assert not phi_admissibility_check(AdmissiblePhi.power_log(1.0, 1.0, "+")).ok

    def test_bad_grid(self):
        rep = phi_admissibility_check(AdmissiblePhi.power(1.5), grid=[0.1, 0.2, 0.3])
        assert not rep.ok

    @settings(max_examples=40, deadline=None)
    @given(p=st.floats(1.0, 2.0), c=st.floats(0.0, 3.0), sign=st.sampled_from("+-"),
           log_kind=st.booleans())
    def test_accepted_phi_is_monotone(self, p, c, sign, log_kind):
        phi = AdmissiblePhi.power_log(p, c, sign) if log_kind else AdmissiblePhi.power(p)
        if not phi_admissibility_check(phi).ok:
            return
        x = np.geomspace(1e-10, 2.0, 400)
        v = phi.values(x)
        assert np.all(np.diff(v) >= -1e-15 * v[1:])
        r2 = v / x ** 2
        assert np.all(r2[1:] <= r2[:-1] * (1 + 1e-10))


def test_wrap_angle():
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.1) == 0.1


def test_power_zeros_majorant():
    b = PowerZeros(c=0.5, s=1.5)
    x = np.arange(101, 200001, dtype=float)
    assert np.sum(b.gap(x)) <= b.tail_majorant(100)
