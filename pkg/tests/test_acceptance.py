"""Acceptance criteria 1-10, one test per criterion.

Each test records a single PASS/FAIL line that is echoed in the pytest
terminal summary.  Run directly with ``python tests/test_acceptance.py``.
"""
import cmath
import math
import sys
import time

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from msk.asymptotics import fit_growth_exponent, kernel_growth_table, verify_upper_bound
from msk.conditions import (Verdict, carleson_vasyunin_discrete, frostman_sum,
                            phi_condition_sum)
from msk.evaluation import (elementary_inner_value, inner_modulus, kernel_norm_sq,
                            one_minus_factor_modsq, pythag_ratio)
from msk.inner_core import (AdmissiblePhi, CircleAtom, ExplicitAtoms, ExplicitZeros,
                            InnerFunctionSpec, Section3Measure, phi_admissibility_check)
from msk.lowerbound import elementary_kernel_norm, lower_growth_check


def record(k, ok, detail):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[f"{k:02d}"] = line
    print(line)
    assert ok, line


def section3(eps):
    return InnerFunctionSpec(singular=Section3Measure(eps))


def random_explicit_spec(rng, max_zeros=20, max_atoms=5):
    nz, na = rng.integers(0, max_zeros + 1), rng.integers(0, max_atoms + 1)
    rad = 0.99 * np.sqrt(rng.uniform(size=nz))
    zeros = rad * np.exp(1j * rng.uniform(-np.pi, np.pi, nz))
    thetas = rng.uniform(-np.pi, np.pi, na)
    masses = rng.uniform(0.05, 1.0, na)
    return InnerFunctionSpec(ExplicitZeros.from_complex(list(zeros)),
                             ExplicitAtoms.from_pairs(list(zip(thetas, masses))))


# --- independent oracles ---------------------------------------------------

def product_value(zeros, atoms, z):
    """I(z) from the raw factor formulas, evaluated pointwise in complex128."""
    v = np.ones_like(z)
    for lam in zeros:
        if lam == 0:
            v = v * z
        else:
            v = v * (abs(lam) / lam) * (lam - z) / (1 - np.conj(lam) * z)
    for theta, mass in atoms:
        zeta = cmath.exp(1j * theta)
        v = v * np.exp(mass * (z + zeta) / (z - zeta))
    return v


def circle_kernel_norm_sq(zeros, atoms, r, nodes=4096):
    """Mean of |k_r(e^{it})|^2 over equispaced nodes.

    On the circle |I| = 1, so |k_r|^2 = (1 + |c|^2 - 2 Re(conj(c) I)) / |1 - r e^{it}|^2
    with c = I(r).  The cross term is an analytic contour integral; it is moved
    to |z| = sqrt(r), away from the atoms, where the trapezoid rule is spectral.
    """
    t = 2.0 * np.pi * np.arange(nodes) / nodes
    w = np.exp(1j * t)
    A = np.mean(1.0 / np.abs(1.0 - r * w) ** 2)
    c = product_value(zeros, atoms, np.array([r + 0j]))[0]
    z = math.sqrt(r) * w
    B = np.mean(product_value(zeros, atoms, z) * z / ((1.0 - r * z) * (z - r)))
    return float(A * (1.0 + abs(c) ** 2) - 2.0 * (np.conj(c) * B).real)


def direct_one_minus_modsq(lam, r):
    with mpmath.workdps(50):
        lam = mpmath.mpc(lam.real, lam.imag)
        b = (lam - r) / (1 - mpmath.conj(lam) * r)
        return float(1 - abs(b) ** 2)


# --- criteria ----------------------------------------------------------------

def test_01_section3_two_sided_exponent():
    parts, ok = [], True
    for eps in (1.2, 1.5, 1.8):
        t0 = time.perf_counter()
        table = kernel_growth_table(section3(eps), AdmissiblePhi.power(2.0), 8, 24)
        fit = fit_growth_exponent(table)
        dt = time.perf_counter() - t0
        ok &= abs(fit.slope - (2.0 - eps)) <= 0.1 and dt < 60.0
        parts.append(f"eps={eps}: slope {fit.slope:.4f} vs {2 - eps:.2f} ({dt:.2f} s)")
    record(1, ok, "; ".join(parts) + "; tolerance 0.1")


def test_02_upper_bound_ratio():
    s = section3(1.5)
    good = verify_upper_bound(s, AdmissiblePhi.power(1.4), 8, 24)
    bad = verify_upper_bound(s, AdmissiblePhi.power(1.6), 8, 24)
    ok = good.monotone_flag and bad.increasing_flag
    record(2, ok, f"Power(1.4) non-increasing within 5%: {good.monotone_flag} "
                  f"(sup ratio {good.sup_ratio:.4g}); Power(1.6) increasing: {bad.increasing_flag}")


def test_03_radial_modulus_to_one():
    s = section3(1.5)
    Ns = np.arange(1, 41)
    mod = np.array([inner_modulus(s, 1.0 - 2.0 ** -int(N)).value for N in Ns])
    increasing = bool(np.all(np.diff(mod) > 0))
    above = mod >= 0.99
    N0 = next((int(N) for i, N in enumerate(Ns) if above[i:].all()), None)
    ok = increasing and N0 is not None and N0 <= 30
    record(3, ok, f"|I(rho_N)| increasing on N<=40: {increasing}; >= 0.99 from N0 = {N0} "
                  f"(|I(rho_40)| = {mod[-1]:.8f})")


def test_04_quadrature_oracle():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        spec = random_explicit_spec(rng)
        zeros = list(spec.blaschke.as_array())
        atoms = list(zip(spec.singular.thetas(), spec.singular.masses()))
        for r in (0.5, 0.9, 0.99):
            want = circle_kernel_norm_sq(zeros, atoms, r)
            got = kernel_norm_sq(spec, r).value
            worst = max(worst, abs(got - want) / abs(want))
    record(4, worst <= 1e-6, f"50 specs x 3 radii: worst relative error {worst:.3g} (<= 1e-6)")


def test_05_cv_bound():
    rep = carleson_vasyunin_discrete(Section3Measure(1.5), (1, 100_001))
    upper = rep.value + rep.tail_bound
    limit = math.pi ** 2 / 3 + 0.01
    record(5, upper <= limit, f"sup_(n<=1e5) CV sum in [{rep.value:.6f}, {upper:.6f}] at "
                              f"n={rep.argmax}; limit pi^2/3+0.01 = {limit:.6f}")


def test_06_elementary_kernel_norms():
    ns = np.unique(np.geomspace(1e4, 1e9, 60).round().astype(np.int64))
    ratios = np.array([elementary_kernel_norm(1.5, int(n)) / (math.sqrt(2) * n ** -0.25)
                       for n in ns])
    ok = bool(np.all((ratios >= 0.98) & (ratios <= 1.02)))
    record(6, ok, f"n in [1e4, 1e9]: ratio in [{ratios.min():.6f}, {ratios.max():.6f}]")


def test_07_lower_growth():
    t0 = time.perf_counter()
    run = lower_growth_check(1.5, 0.1, [100, 1000, 10_000, 100_000])
    dt = time.perf_counter() - t0
    r = np.array([row.norm_ratio for row in run.rows])
    ok = bool(np.all(r > 0) and r.min() >= 0.1 * np.median(r) and dt < 300)
    record(7, ok, "norm_ratio " + ", ".join(f"{x:.4f}" for x in r)
                  + f" (min/median {r.min() / np.median(r):.3f}; {dt:.2f} s)")


def test_08_condition_algebra():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        spec = random_explicit_spec(rng)
        psi = float(rng.uniform(-np.pi, np.pi))
        a = phi_condition_sum(spec, AdmissiblePhi.power(1.0), psi).value
        b = frostman_sum(spec, psi).value
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    flips = []
    for eps in (1.2, 1.5, 1.8):
        v = [phi_condition_sum(section3(eps), AdmissiblePhi.power(g)).verdict
             for g in (eps - 0.2, eps - 0.05, eps + 0.05)]
        flips.append(v == [Verdict.ConvergentCertified] * 2 + [Verdict.DivergentCertified])
    ok = worst <= 1e-12 and all(flips)
    record(8, ok, f"Power(1) vs Frostman worst rel {worst:.2g}; verdict flips at gamma=eps "
                  f"for eps 1.2/1.5/1.8: {flips}")


def test_09_admissibility_triage():
    r15 = phi_admissibility_check(AdmissiblePhi.power(1.5))
    r05 = phi_admissibility_check(AdmissiblePhi.power(0.5))
    r25 = phi_admissibility_check(AdmissiblePhi.power(2.5))
    ok = (r15.ok and not r05.ok and not r25.ok
          and any("condition (1)" in m for m in r05.messages("error"))
          and any("condition (2)" in m for m in r25.messages("error")))
    record(9, ok, f"Power(1.5) ok={r15.ok}; Power(0.5) rejected by (1)={not r05.ok}; "
                  f"Power(2.5) rejected by (2)={not r25.ok}")


def test_10_identity_suite():
    rng = np.random.default_rng(3)
    lam = np.sqrt(rng.uniform(0, 1, 1000)) * 0.999999 * np.exp(1j * rng.uniform(-np.pi, np.pi,
                                                                                 1000))
    rs = rng.uniform(0, 0.999999, 1000)
    e1 = max(abs(one_minus_factor_modsq(complex(l), float(r)) - direct_one_minus_modsq(l, r))
             / direct_one_minus_modsq(l, r) for l, r in zip(lam, rs))

    rho, theta = np.meshgrid(1 - np.geomspace(1e-12, 0.1, 400), np.linspace(-0.3, 0.3, 401))
    q = pythag_ratio(rho, theta)
    e2 = (float(q.min()), float(q.max()))

    e3 = 0.0
    for _ in range(1000):
        atom = CircleAtom(float(rng.uniform(-np.pi, np.pi)), float(rng.uniform(0.01, 3.0)))
        z = complex(*rng.uniform(-0.7, 0.7, 2))
        zeta = cmath.exp(1j * atom.theta)
        want = math.exp(-atom.mass * (1 - abs(z) ** 2) / abs(zeta - z) ** 2)
        e3 = max(e3, abs(abs(elementary_inner_value(atom, z)) - want) / want)
    ok = e1 <= 1e-12 and 0.25 <= e2[0] and e2[1] <= 4.0 and e3 <= 1e-12
    record(10, ok, f"1-|b|^2 worst rel {e1:.2g}; Pythag ratio in [{e2[0]:.4f}, {e2[1]:.4f}]; "
                   f"|I_elem| worst rel {e3:.2g}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
