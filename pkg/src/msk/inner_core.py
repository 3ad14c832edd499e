"""Domain types: zeros, singular measures, inner functions, weight functions.

Types are lenient on construction; :func:`validate_spec` reports every
violated invariant instead of stopping at the first.  Operations that
cannot run on invalid input raise :class:`DomainError`.
"""
import math
from dataclasses import dataclass, field
from typing import Mapping, Tuple, Union

import numpy as np

from . import kernels
from .series import TermSeries


class DomainError(ValueError):
    """An argument is outside the domain of an operation."""


def wrap_angle(theta):
    """Representative of ``theta`` in (-pi, pi]."""
    t = math.remainder(theta, 2.0 * math.pi)
    return math.pi if t == -math.pi else t


@dataclass(frozen=True)
class UnitDiskPoint:
    re: float
    im: float

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def z(self):
        return complex(self.re, self.im)

    @property
    def inside(self):
        return self.re * self.re + self.im * self.im < 1.0


@dataclass(frozen=True)
class CircleAtom:
    theta: float
    mass: float


# --- zero sets -------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitZeros:
    """Finitely many zeros; multiplicity by repetition."""

    zeros: Tuple[UnitDiskPoint, ...] = ()

    @classmethod
    def from_complex(cls, values):
        return cls(tuple(UnitDiskPoint.from_complex(v) for v in values))

    def as_array(self):
        return np.array([p.z for p in self.zeros], dtype=complex)


class BlaschkeFamily:
    """Infinite zero sequence given by a formula in ``n``.

    Subclasses provide the term series the evaluators need, each with its
    asymptotic decay, plus a closed-form majorant of ``sum_{n>M} (1-|lambda_n|)``.
    """

    name = ""

    @property
    def params(self) -> Mapping[str, float]:
        raise NotImplementedError

    def param_errors(self):
        return []

    def tail_majorant(self, M):
        raise NotImplementedError


@dataclass(frozen=True)
class PowerZeros(BlaschkeFamily):
    """lambda_n = (1 - c n**-s) * exp(i (d n**-t + shift)), s > 1."""

    c: float = 1.0
    s: float = 2.0
    d: float = 1.0
    t: float = 1.0
    shift: float = 0.0
    n_cut: int = 1024
    name: str = field(default="power", init=False)

    @property
    def params(self):
        return {"c": self.c, "s": self.s, "d": self.d, "t": self.t, "shift": self.shift}

    def param_errors(self):
        errs = []
        if not 0.0 < self.c <= 1.0:
            errs.append("c must lie in (0, 1]")
        if not self.s > 1.0:
            errs.append("s must exceed 1 (Blaschke condition)")
        if not self.t > 0.0:
            errs.append("t must be positive")
        if not all(math.isfinite(v) for v in (self.d, self.shift)):
            errs.append("d and shift must be finite")
        if self.n_cut < 1:
            errs.append("n_cut must be >= 1")
        return errs

    def tail_majorant(self, M):
        return self.c * M ** (1.0 - self.s) / (self.s - 1.0)

    def gap(self, x):
        return self.c * np.asarray(x, dtype=float) ** -self.s

    def angle(self, x):
        return self.d * np.asarray(x, dtype=float) ** -self.t + self.shift

    def zeros(self, n0, n1):
        x = np.arange(n0, n1, dtype=float)
        return (1.0 - self.gap(x)) * np.exp(1j * self.angle(x))

    def _order(self):
        return self.s if self.d == 0.0 else min(self.s, self.t)

    def _aligned(self, psi):
        return abs(wrap_angle(self.shift - psi)) < 1e-15

    def logmod_series(self, r, psi=0.0):
        """Terms ``-log|b_n(r e^{i psi})|`` (non-negative)."""
        def terms(x):
            gap = self.gap(x)
            return neg_log_factor_modulus(gap, self.angle(x) - psi, r)

        scale = 1.0
        if self._aligned(psi):
            scale = max(1.0, (1.0 / (1.0 - r)) ** (1.0 / self._order()))
        return TermSeries(terms, decay=-self.s, scale=scale, m_start=self.n_cut)

    def weighted_series(self, phi, psi=0.0):
        """Terms ``(1-|lambda_n|) / phi(|zeta - lambda_n|)``."""
        def terms(x):
            gap = self.gap(x)
            dist = np.sqrt(gap * gap + 4.0 * (1.0 - gap) * np.sin(0.5 * (self.angle(x) - psi)) ** 2)
            return gap / phi.values(dist)

        if self._aligned(psi):
            decay, logp = -self.s + phi.p * self._order(), -phi.signed_c
        else:
            decay, logp = -self.s, 0.0
        return TermSeries(terms, decay=decay, log_power=logp, m_start=self.n_cut)

    def log_value_series(self, z):
        """Terms ``log b_n(z)`` (complex) for a point inside the disk."""
        def terms(x):
            lam = (1.0 - self.gap(x)) * np.exp(1j * self.angle(x))
            return np.log(blaschke_factor_array(lam, z))

        return TermSeries(terms, decay=-self.s, scale=max(1.0, 1.0 / (1.0 - abs(z))),
                          m_start=self.n_cut)


BlaschkeSpec = Union[ExplicitZeros, BlaschkeFamily]


# --- singular measures -----------------------------------------------------

@dataclass(frozen=True)
class ExplicitAtoms:
    atoms: Tuple[CircleAtom, ...] = ()

    @classmethod
    def from_pairs(cls, pairs):
        return cls(tuple(CircleAtom(float(t), float(m)) for t, m in pairs))

    def thetas(self):
        return np.array([a.theta for a in self.atoms], dtype=float)

    def masses(self):
        return np.array([a.mass for a in self.atoms], dtype=float)


class MeasureFamily:
    """Infinite discrete measure given by a formula in ``n``."""

    name = ""

    @property
    def params(self) -> Mapping[str, float]:
        raise NotImplementedError

    def param_errors(self):
        return []

    def tail_majorant(self, M):
        raise NotImplementedError


@dataclass(frozen=True)
class Section3Measure(MeasureFamily):
    """Atoms at angle ``1/n + shift`` with mass ``n**-(1+eps)``, 1 < eps < 2."""

    eps: float
    n_cut: int = 1024
    shift: float = 0.0
    name: str = field(default="section3", init=False)

    @property
    def params(self):
        return {"epsilon": self.eps, "shift": self.shift}

    def param_errors(self):
        errs = []
        if not 1.0 < self.eps < 2.0:
            errs.append("epsilon must lie in (1, 2)")
        if self.n_cut < 1:
            errs.append("n_cut must be >= 1")
        if not math.isfinite(self.shift):
            errs.append("shift must be finite")
        return errs

    def tail_majorant(self, M):
        """sum_{n>M} n**-(1+eps) <= int_M^inf."""
        return M ** -self.eps / self.eps

    def theta(self, n):
        return 1.0 / np.asarray(n, dtype=float) + self.shift

    def mass(self, n):
        return kernels.atom_mass(self.eps, np.asarray(n, dtype=float))

    def offset(self, psi):
        """Angle offset ``delta`` with ``theta_n - psi = 1/n + delta``."""
        delta = wrap_angle(self.shift - psi)
        return 0.0 if abs(delta) < 1e-15 else delta

    def atom_index_at(self, psi):
        """Index ``n`` of an atom sitting exactly at angle ``psi``, else None."""
        delta = self.offset(psi)
        if delta >= 0.0:
            return None
        n = round(-1.0 / delta)
        if n >= 1 and abs(1.0 / n + delta) <= 1e-14:
            return n
        return None

    def _start(self, delta):
        # sum exactly through the atoms that pass the evaluation direction
        if delta < 0.0:
            return max(self.n_cut, int(min(4.0 / -delta, 1e6)))
        return self.n_cut

    def mass_series(self):
        eps = self.eps
        return TermSeries(
            lambda x: kernels.atom_mass(eps, x), decay=-1.0 - eps, m_start=self.n_cut,
            block=lambda a, b: kernels.backend.chord_phi_block(eps, 0.0, 0.0, 0.0, math.inf, a, b))

    def poisson_series(self, r, psi=0.0):
        """Terms ``alpha_n (1 - r^2) / |zeta_n - r e^{i psi}|^2``."""
        eps, delta = self.eps, self.offset(psi)
        scale = 1.0 / (1.0 - r) if delta == 0.0 else 1.0
        return TermSeries(
            lambda x: kernels.poisson_terms(eps, delta, r, x), decay=-1.0 - eps,
            scale=max(scale, 1.0), m_start=self._start(delta),
            block=lambda a, b: kernels.backend.poisson_block(eps, delta, r, a, b))

    def weighted_series(self, phi, psi=0.0):
        """Terms ``alpha_n / phi(|zeta - zeta_n|)``."""
        eps, delta = self.eps, self.offset(psi)
        p, c, knee = phi.p, phi.signed_c, phi.knee
        if delta == 0.0:
            decay, logp = p - 1.0 - eps, -c
        else:
            decay, logp = -1.0 - eps, 0.0
        return TermSeries(
            lambda x: kernels.chord_phi_terms(eps, delta, p, c, knee, x),
            decay=decay, log_power=logp, m_start=self._start(delta),
            block=lambda a, b: kernels.backend.chord_phi_block(eps, delta, p, c, knee, a, b))

    def exponent_series(self, z):
        """Terms ``alpha_n (z + zeta_n) / (z - zeta_n)`` (complex)."""
        eps, shift = self.eps, self.shift

        def terms(x):
            zeta = np.exp(1j * (1.0 / x + shift))
            return kernels.atom_mass(eps, x) * (z + zeta) / (z - zeta)

        return TermSeries(terms, decay=-1.0 - eps, scale=max(1.0, 1.0 / (1.0 - abs(z))),
                          m_start=self.n_cut)


SingularMeasureSpec = Union[ExplicitAtoms, MeasureFamily]


@dataclass(frozen=True)
class InnerFunctionSpec:
    """I = B * S_mu; both parts empty means I == 1."""

    blaschke: BlaschkeSpec = ExplicitZeros()
    singular: SingularMeasureSpec = ExplicitAtoms()

    @property
    def is_trivial(self):
        return (isinstance(self.blaschke, ExplicitZeros) and not self.blaschke.zeros
                and isinstance(self.singular, ExplicitAtoms) and not self.singular.atoms)


def make_section3_measure(eps, n_cut=1024):
    if not 1.0 < eps < 2.0:
        raise DomainError(f"epsilon must lie in (1, 2), got {eps}")
    if n_cut < 1:
        raise DomainError("n_cut must be >= 1")
    return Section3Measure(float(eps), int(n_cut))


# --- scalar factor helpers shared by eval and the families -----------------

def neg_log_factor_modulus(gap, angle, r):
    """``-log|b_lambda(r)|`` for ``lambda = (1-gap) e^{i angle}``, vectorised.

    Uses ``1 - |b|^2 = (1-r^2)(1-|lambda|^2)/|1 - r conj(lambda)|^2`` while that
    quantity is small and the direct ratio ``|lambda - r| / |1 - r conj(lambda)|``
    otherwise.
    """
    gap = np.asarray(gap, dtype=float)
    rho = 1.0 - gap
    s2 = np.sin(0.5 * np.asarray(angle, dtype=float)) ** 2
    one_m_r = 1.0 - r
    den = (gap + rho * one_m_r) ** 2 + 4.0 * r * rho * s2  # |1 - r conj(lambda)|^2
    q = one_m_r * (1.0 + r) * gap * (1.0 + rho) / den
    num = (rho - r) ** 2 + 4.0 * r * rho * s2  # |lambda - r|^2
    with np.errstate(divide="ignore"):
        near = -0.5 * np.log(num / den)
    return np.where(q < 0.5, -0.5 * np.log1p(-np.minimum(q, 0.5)), near)


def blaschke_factor_array(lam, z):
    lam = np.asarray(lam, dtype=complex)
    absl = np.abs(lam)
    unit = np.where(absl == 0.0, -1.0 + 0j, np.exp(-1j * np.angle(lam)))
    return unit * (lam - z) / (1.0 - np.conj(lam) * z)


# --- weight functions ------------------------------------------------------

@dataclass(frozen=True)
class AdmissiblePhi:
    """phi(x) = x**p (kind "power") or x**p * log(1/x)**(+-c) (kind "power_log").

    Sign "+" multiplies by ``log(1/x)**c`` and sign "-" divides by it.  The
    log form is only monotone near 0, so above a knee ``x_c`` it is continued
    as ``phi(x_c) (x/x_c)**p``: ``x_c = exp(-c/p)`` when multiplying (where the
    log form stops increasing) and ``x_c = exp(-c/(2-p))`` when dividing
    (where ``phi/x^2`` stops decreasing).
    """

    kind: str = "power"
    p: float = 1.5
    c: float = 0.0
    sign: str = "+"

    @classmethod
    def power(cls, p):
        return cls("power", float(p))

    @classmethod
    def power_log(cls, p, c, sign="+"):
        return cls("power_log", float(p), float(c), sign)

    @property
    def signed_c(self):
        if self.kind == "power":
            return 0.0
        return self.c if self.sign == "+" else -self.c

    @property
    def knee(self):
        c = self.signed_c
        if c == 0.0:
            return math.inf
        if c > 0.0:
            k = math.exp(-c / self.p) if self.p > 0 else math.exp(-1.0)
        else:
            k = math.exp(c / (2.0 - self.p)) if self.p < 2.0 else math.exp(-1.0)
        # keep log(1/knee) > 0 for tiny c
        return min(k, math.nextafter(1.0, 0.0))

    def values(self, x):
        return kernels.phi_values(self.p, self.signed_c, self.knee, x)

    def describe(self):
        if self.kind == "power":
            return f"x^{self.p:g}"
        return f"x^{self.p:g} log(1/x)^{self.signed_c:+g}"


def phi_eval(phi, x):
    if not 0.0 < x <= 2.0:
        raise DomainError(f"phi is evaluated on (0, 2], got {x}")
    return float(phi.values(np.array([x]))[0])


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    findings: Tuple[Tuple[str, str], ...] = ()

    @classmethod
    def from_findings(cls, findings):
        findings = tuple(findings)
        return cls(not any(sev == "error" for sev, _ in findings), findings)

    def messages(self, severity):
        return [msg for sev, msg in self.findings if sev == severity]


def default_phi_grid():
    return np.geomspace(1e-12, 2.0, 256)


def phi_admissibility_check(phi, grid=None):
    """Grid check of the three admissibility conditions.

    (1) ``phi(x)/x`` bounded: the log-log slope of ``phi(x)/x`` over the
        lowest decade of the grid must not be negative;
    (2) ``phi(x)/x^2`` non-increasing, relative slack 1e-12 (constant ratio
        is accepted with a warning);
    (3) doubling ``phi(2x) <= 8 phi(x)`` as a stand-in for ``phi(x+o(x)) ~ phi(x)``.
    """
    x = default_phi_grid() if grid is None else np.asarray(grid, dtype=float)
    findings = []
    if (x.size < 16 or np.any(np.diff(x) <= 0) or x[0] <= 0 or x[-1] > 2.0
            or math.log10(x[-1] / x[0]) < 4.0):
        return ValidationReport.from_findings([(
            "error", "grid must be strictly increasing in (0, 2], >= 16 points, >= 4 decades")])
    if phi.kind not in ("power", "power_log") or phi.sign not in ("+", "-"):
        return ValidationReport.from_findings([("error", f"unknown phi {phi}")])

    v = phi.values(x)
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        findings.append(("error", "phi must be positive and finite on the grid"))
        return ValidationReport.from_findings(findings)
    if np.any(np.diff(v) < 0):
        findings.append(("error", "phi is not increasing"))

    ratio1 = v / x
    low = x <= x[0] * 10.0
    slope = np.polyfit(np.log(x[low]), np.log(ratio1[low]), 1)[0] if low.sum() >= 2 else 0.0
    findings.append(("info", f"sup phi(x)/x on grid = {ratio1.max():.6g}"))
    if slope < -1e-9:
        findings.append(("error", f"condition (1) fails: phi(x)/x grows like x^{slope:.3g} as x -> 0"))

    ratio2 = v / (x * x)
    steps = ratio2[1:] / ratio2[:-1]
    if np.any(steps > 1.0 + 1e-12):
        findings.append(("error", "condition (2) fails: phi(x)/x^2 increases"))
    elif np.all(np.abs(steps - 1.0) <= 1e-12):
        findings.append(("warning", "phi(x)/x^2 is constant (non-strict decrease)"))

    half = x[x <= 1.0]
    doubling = float(np.max(phi.values(2.0 * half) / phi.values(half)))
    findings.append(("info", f"max phi(2x)/phi(x) = {doubling:.6g}"))
    if doubling > 8.0:
        findings.append(("error", "condition (3) fails: doubling constant exceeds 8"))
    return ValidationReport.from_findings(findings)


# --- spec validation -------------------------------------------------------

def validate_spec(spec):
    findings = []
    b = spec.blaschke
    if isinstance(b, ExplicitZeros):
        for i, p in enumerate(b.zeros):
            if not (math.isfinite(p.re) and math.isfinite(p.im)) or not p.inside:
                findings.append(("error", f"zero {i} not in open disk: ({p.re}, {p.im})"))
    elif isinstance(b, BlaschkeFamily):
        findings.extend(("error", f"blaschke family {b.name}: {m}") for m in b.param_errors())
        findings.extend(_majorant_findings(b, "blaschke"))
    else:
        findings.append(("error", f"unknown blaschke spec {type(b).__name__}"))

    s = spec.singular
    if isinstance(s, ExplicitAtoms):
        seen = set()
        for i, a in enumerate(s.atoms):
            if not (math.isfinite(a.mass) and a.mass > 0):
                findings.append(("error", f"atom {i} has non-positive mass {a.mass}"))
            if not (math.isfinite(a.theta) and -math.pi < a.theta <= math.pi):
                findings.append(("error", f"atom {i} angle {a.theta} outside (-pi, pi]"))
            if a.theta in seen:
                findings.append(("error", f"atom {i} duplicates angle {a.theta}"))
            seen.add(a.theta)
    elif isinstance(s, MeasureFamily):
        findings.extend(("error", f"measure family {s.name}: {m}") for m in s.param_errors())
        findings.extend(_majorant_findings(s, "measure"))
        if isinstance(s, Section3Measure) and not s.param_errors():
            findings.append(("info", f"total mass <= {1.0 + 1.0 / s.eps:.6g}"))
    else:
        findings.append(("error", f"unknown singular spec {type(s).__name__}"))

    if spec.is_trivial:
        findings.append(("info", "empty spec: I == 1"))
    return ValidationReport.from_findings(findings)


def _majorant_findings(family, what):
    if family.param_errors():
        return []
    try:
        tails = [family.tail_majorant(M) for M in (1, 10, 100, 1000, 10**6)]
    except NotImplementedError:
        return [("error", f"{what} family {family.name} has no tail majorant")]
    ok = all(math.isfinite(t) and t >= 0 for t in tails) and all(
        b <= a for a, b in zip(tails, tails[1:])) and tails[-1] < tails[0] * 1e-2
    if not ok:
        return [("error", f"{what} family {family.name}: tail majorant not decreasing to 0")]
    return []
