"""Command-line driver: ``msk <command> --config <path|json> [options]``.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 precondition
violated, 4 truncation budget exhausted.  Angles are in radians.
"""
import argparse
import csv
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from . import asymptotics, conditions, evaluation, lowerbound
from .inner_core import (AdmissiblePhi, DomainError, ExplicitAtoms, ExplicitZeros,
                         InnerFunctionSpec, PowerZeros, Section3Measure, validate_spec)
from .series import DEFAULT_POLICY, TruncationError, TruncationPolicy

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_TRUNCATION = 0, 1, 2, 3, 4
COMMANDS = ("evaluate", "check", "growth", "example3", "lowerbound")
_TOP_KEYS = {"blaschke", "singular", "phi", "zeta_angle", "experiment", "policy", "radii"}
_EXPERIMENT_KEYS = {"epsilon", "gamma", "eta", "N_list", "coefficients", "cv_n_max"}


class ConfigError(ValueError):
    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


@dataclass(frozen=True)
class RunConfig:
    spec: InnerFunctionSpec
    phi: Optional[AdmissiblePhi] = None
    zeta_angle: float = 0.0
    policy: TruncationPolicy = DEFAULT_POLICY
    experiment: Dict[str, Any] = field(default_factory=dict)
    radii: Optional[List[float]] = None


# --- parsing ---------------------------------------------------------------

def _number(v, ptr, lo=-math.inf, hi=math.inf, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(ptr, "expected a number")
    if integer and not isinstance(v, int):
        raise ConfigError(ptr, "expected an integer")
    if not (math.isfinite(v) and lo <= v <= hi):
        raise ConfigError(ptr, f"value {v} out of range [{lo}, {hi}]")
    return v


def _obj(v, ptr, keys):
    if not isinstance(v, dict):
        raise ConfigError(ptr, "expected an object")
    for k in v:
        if k not in keys:
            raise ConfigError(f"{ptr}/{k}", "unknown key")
    return v


def _list(v, ptr):
    if not isinstance(v, list):
        raise ConfigError(ptr, "expected an array")
    return v


def _parse_blaschke(v, ptr):
    if v is None:
        return ExplicitZeros()
    if isinstance(v, dict) and "zeros" in v:
        _obj(v, ptr, {"zeros"})
        pts = []
        for i, z in enumerate(_list(v["zeros"], f"{ptr}/zeros")):
            p = f"{ptr}/zeros/{i}"
            if not (isinstance(z, list) and len(z) == 2):
                raise ConfigError(p, "expected [re, im]")
            re, im = _number(z[0], f"{p}/0"), _number(z[1], f"{p}/1")
            if re * re + im * im >= 1.0:
                raise ConfigError(p, "zero not in open disk")
            pts.append(complex(re, im))
        return ExplicitZeros.from_complex(pts)
    if isinstance(v, dict) and "family" in v:
        _obj(v, ptr, {"family", "params"})
        if v["family"] != "power":
            raise ConfigError(f"{ptr}/family", f"unknown blaschke family {v['family']!r}")
        params = _obj(v.get("params", {}), f"{ptr}/params", {"c", "s", "d", "t", "shift"})
        fam = PowerZeros(**{k: float(_number(x, f"{ptr}/params/{k}")) for k, x in params.items()})
        errs = fam.param_errors()
        if errs:
            raise ConfigError(f"{ptr}/params", "; ".join(errs))
        return fam
    raise ConfigError(ptr, "expected {\"zeros\": [...]} or {\"family\": ..., \"params\": {...}}")


def _parse_singular(v, ptr):
    if v is None:
        return ExplicitAtoms()
    if isinstance(v, dict) and "atoms" in v:
        _obj(v, ptr, {"atoms"})
        pairs, seen = [], set()
        for i, a in enumerate(_list(v["atoms"], f"{ptr}/atoms")):
            p = f"{ptr}/atoms/{i}"
            _obj(a, p, {"theta", "mass"})
            if "theta" not in a or "mass" not in a:
                raise ConfigError(p, "atom needs theta and mass")
            theta = _number(a["theta"], f"{p}/theta")
            if not -math.pi < theta <= math.pi:
                raise ConfigError(f"{p}/theta", "angle must lie in (-pi, pi]")
            mass = _number(a["mass"], f"{p}/mass")
            if mass <= 0:
                raise ConfigError(f"{p}/mass", "mass must be positive")
            if theta in seen:
                raise ConfigError(f"{p}/theta", "duplicate atom angle")
            seen.add(theta)
            pairs.append((theta, mass))
        return ExplicitAtoms.from_pairs(pairs)
    if isinstance(v, dict) and "family" in v:
        _obj(v, ptr, {"family", "params"})
        if v["family"] != "section3":
            raise ConfigError(f"{ptr}/family", f"unknown measure family {v['family']!r}")
        params = _obj(v.get("params", {}), f"{ptr}/params", {"epsilon", "shift", "n_cut"})
        if "epsilon" not in params:
            raise ConfigError(f"{ptr}/params", "missing epsilon")
        eps = _number(params["epsilon"], f"{ptr}/params/epsilon")
        if not 1.0 < eps < 2.0:
            raise ConfigError(f"{ptr}/params/epsilon", "epsilon must lie in (1, 2)")
        n_cut = _number(params.get("n_cut", 1024), f"{ptr}/params/n_cut", 1, integer=True)
        shift = float(_number(params.get("shift", 0.0), f"{ptr}/params/shift"))
        return Section3Measure(float(eps), n_cut, shift)
    raise ConfigError(ptr, "expected {\"atoms\": [...]} or {\"family\": \"section3\", ...}")


def _parse_phi(v, ptr):
    if v is None:
        return None
    _obj(v, ptr, {"kind", "p", "c", "sign"})
    kind = v.get("kind")
    if kind == "power":
        _obj(v, ptr, {"kind", "p"})
        return AdmissiblePhi.power(_number(v.get("p"), f"{ptr}/p", 0.0))
    if kind == "power_log":
        sign = str(v.get("sign", "+")).replace("−", "-")
        if sign not in ("+", "-"):
            raise ConfigError(f"{ptr}/sign", "sign must be '+' or '-'")
        return AdmissiblePhi.power_log(_number(v.get("p"), f"{ptr}/p", 0.0),
                                       _number(v.get("c"), f"{ptr}/c", 0.0), sign)
    raise ConfigError(f"{ptr}/kind", "kind must be 'power' or 'power_log'")


def _parse_experiment(v, ptr):
    if v is None:
        return {}
    _obj(v, ptr, _EXPERIMENT_KEYS)
    out = {}
    for k in ("epsilon", "gamma", "eta"):
        if k in v:
            out[k] = float(_number(v[k], f"{ptr}/{k}"))
    if "N_list" in v:
        out["N_list"] = [_number(x, f"{ptr}/N_list/{i}", 1, integer=True)
                         for i, x in enumerate(_list(v["N_list"], f"{ptr}/N_list"))]
    if "coefficients" in v:
        out["coefficients"] = [float(_number(x, f"{ptr}/coefficients/{i}", 0.0))
                               for i, x in enumerate(_list(v["coefficients"],
                                                           f"{ptr}/coefficients"))]
    if "cv_n_max" in v:
        out["cv_n_max"] = _number(v["cv_n_max"], f"{ptr}/cv_n_max", 2, integer=True)
    return out


def _parse_policy(v, ptr):
    if v is None:
        return DEFAULT_POLICY
    _obj(v, ptr, {"rel_tol", "abs_tol", "max_terms"})
    kw = {}
    for k in ("rel_tol", "abs_tol"):
        if k in v:
            kw[k] = float(_number(v[k], f"{ptr}/{k}", 0.0))
    if "max_terms" in v:
        kw["max_terms"] = _number(v["max_terms"], f"{ptr}/max_terms", 1, integer=True)
    try:
        return TruncationPolicy(**kw)
    except ValueError as exc:
        raise ConfigError(ptr, str(exc)) from None


def parse_config(text):
    """Parse a JSON document into a :class:`RunConfig`; errors carry a JSON pointer."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    _obj(doc, "", _TOP_KEYS)
    spec = InnerFunctionSpec(_parse_blaschke(doc.get("blaschke"), "/blaschke"),
                             _parse_singular(doc.get("singular"), "/singular"))
    report = validate_spec(spec)
    if not report.ok:
        raise ConfigError("", "; ".join(report.messages("error")))
    radii = None
    if doc.get("radii") is not None:
        radii = [float(_number(r, f"/radii/{i}", 0.0, math.nextafter(1.0, 0.0)))
                 for i, r in enumerate(_list(doc["radii"], "/radii"))]
    return RunConfig(spec=spec, phi=_parse_phi(doc.get("phi"), "/phi"),
                     zeta_angle=float(_number(doc.get("zeta_angle", 0.0), "/zeta_angle")),
                     policy=_parse_policy(doc.get("policy"), "/policy"),
                     experiment=_parse_experiment(doc.get("experiment"), "/experiment"),
                     radii=radii)


def load_config(source):
    """``source`` is inline JSON (starting with '{') or a file path."""
    if source.lstrip().startswith("{"):
        return parse_config(source)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read config: {exc}") from None
    return parse_config(text)


# --- output ----------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _atomic_write(path, write):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".msk-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    _atomic_write(path, write)


def write_svg(path, xs, ys, xlabel, ylabel, width=480, height=320, pad=40):
    """Log-log polyline of positive data; non-positive points are dropped."""
    pts = [(math.log10(x), math.log10(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        pts = pts or [(0.0, 0.0)]
        pts = pts + [(pts[0][0] + 1.0, pts[0][1])]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    coords = " ".join(f"{pad + (x - x0) * sx:.2f},{height - pad - (y - y0) * sy:.2f}"
                      for x, y in pts)

    def write(fh):
        fh.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n')
        fh.write(f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
                 f'height="{height - 2 * pad}" fill="none" stroke="#888"/>\n')
        fh.write(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="2" points="{coords}"/>\n')
        fh.write(f'<text x="{width / 2}" y="{height - 8}" text-anchor="middle" '
                 f'font-size="12">log10 {xlabel}</text>\n')
        fh.write(f'<text x="12" y="{height / 2}" font-size="12" '
                 f'transform="rotate(-90 12 {height / 2})" text-anchor="middle">'
                 f'log10 {ylabel}</text>\n')
        fh.write("</svg>\n")
    _atomic_write(path, write)


# --- commands --------------------------------------------------------------

@dataclass
class Outcome:
    header: List[str]
    rows: List[list]
    summary: List[str]
    plot: Optional[tuple] = None  # (xs, ys, xlabel, ylabel)


def _n_range(args, default):
    lo = args.n_min if args.n_min is not None else default[0]
    hi = args.n_max if args.n_max is not None else default[1]
    return lo, hi


def _section3_eps(cfg):
    if "epsilon" in cfg.experiment:
        return cfg.experiment["epsilon"]
    if isinstance(cfg.spec.singular, Section3Measure):
        return cfg.spec.singular.eps
    raise DomainError("epsilon needed: set experiment.epsilon or a section3 singular part")


def cmd_evaluate(cfg, args):
    if cfg.radii is not None:
        radii = [(None, r) for r in cfg.radii]
    else:
        lo, hi = _n_range(args, (1, 20))
        if not 1 <= lo <= hi <= asymptotics.N_CAP:
            raise DomainError(f"need 1 <= n-min <= n-max <= {asymptotics.N_CAP}")
        radii = [(N, 1.0 - 2.0 ** -N) for N in range(lo, hi + 1)]
    rows = []
    for N, r in radii:
        m = evaluation.inner_modulus(cfg.spec, r, cfg.policy, cfg.zeta_angle)
        k = evaluation.kernel_norm_sq(cfg.spec, r, cfg.policy, cfg.zeta_angle)
        rows.append(["" if N is None else N, r, m.log_value, m.value, k.value,
                     k.tail_bound, k.terms_used])
    last = rows[-1]
    summary = [f"evaluated {len(rows)} radii; |I(r)| = {last[3]:.6g} and "
               f"||k_r||^2 = {last[4]:.6g} at r = {last[1]:.17g}"]
    return Outcome(["N", "r", "log_modulus", "modulus", "ksq", "ksq_tail_bound", "terms_used"],
                   rows, summary, ([1.0 / (1.0 - row[1]) for row in rows],
                                   [row[4] for row in rows], "1/(1-r)", "ksq"))


def _condition_row(name, rep):
    tb = "" if rep.tail_bound is None else rep.tail_bound
    return [name, rep.value, rep.partial_value, tb, str(rep.verdict), rep.terms_used]


def cmd_check(cfg, args):
    psi = cfg.zeta_angle
    rows = [_condition_row("frostman", conditions.frostman_sum(cfg.spec, psi, cfg.policy)),
            _condition_row("ahern_clark", conditions.ahern_clark_sum(cfg.spec, psi, cfg.policy))]
    if cfg.phi is not None:
        rows.append(_condition_row(
            "grcond", conditions.phi_condition_sum(cfg.spec, cfg.phi, psi, cfg.policy)))
    s = cfg.spec.singular
    if isinstance(s, Section3Measure) or (isinstance(s, ExplicitAtoms) and len(s.atoms) >= 2):
        n_max = cfg.experiment.get("cv_n_max", 100_000)
        rows.append(_condition_row("cv_discrete",
                                   conditions.carleson_vasyunin_discrete(s, (1, n_max + 1))))
    summary = [f"{row[0]}: {row[4]}" for row in rows]
    return Outcome(["condition", "value", "partial_value", "tail_bound", "verdict",
                    "terms_used"], rows, summary)


def _growth_outcome(table, summary):
    rows = [[r.N, r.rho, r.ksq, r.bound, r.ratio] for r in table.rows]
    plot = ([2.0 ** r.N for r in table.rows], [r.ksq for r in table.rows], "1/(1-rho)", "ksq")
    return Outcome(["N", "rho", "ksq", "bound", "ratio"], rows, summary, plot)


def cmd_growth(cfg, args):
    phi = cfg.phi or AdmissiblePhi.power(2.0)
    lo, hi = _n_range(args, (8, 24))
    if cfg.spec.is_trivial:
        table = asymptotics.kernel_growth_table(cfg.spec, phi, lo, hi, cfg.policy,
                                                cfg.zeta_angle)
        return _growth_outcome(table, ["trivial model space"])
    check = asymptotics.verify_upper_bound(cfg.spec, phi, lo, hi, cfg.policy, cfg.zeta_angle)
    summary = [f"grcond: {check.condition.verdict}"]
    if check.warning:
        summary.append(f"warning: {check.warning}")
    if sum(r.ksq > 0 for r in check.table.rows) >= 3:
        fit = asymptotics.fit_growth_exponent(check.table)
        summary.append(f"fitted ksq slope {fit.slope:.2f} (norm slope {fit.norm_slope:.2f}, "
                       f"stderr {fit.stderr:.2g})")
    summary.append(f"sup ratio {check.sup_ratio:.6g}; ratio non-increasing (5% slack): "
                   f"{'yes' if check.monotone_flag else 'no'}")
    return _growth_outcome(check.table, summary)


def cmd_example3(cfg, args):
    eps = _section3_eps(cfg)
    if "gamma" in cfg.experiment:
        gamma = cfg.experiment["gamma"]
    elif cfg.phi is not None and cfg.phi.kind == "power":
        gamma = cfg.phi.p
    else:
        raise DomainError("gamma needed: set experiment.gamma or a power phi")
    lo, hi = _n_range(args, (8, 24))
    rep = asymptotics.section3_experiment(eps, gamma, lo, hi, cfg.policy)
    return _growth_outcome(rep.table, [f"grcond: {rep.condition.verdict}", rep.summary()])


def cmd_lowerbound(cfg, args):
    eps = _section3_eps(cfg) if ("epsilon" in cfg.experiment or
                                 isinstance(cfg.spec.singular, Section3Measure)) else 1.5
    eta = cfg.experiment.get("eta", 0.1)
    if args.n_min is not None or args.n_max is not None:
        lo, hi = _n_range(args, (100, 100_000))
        if not 1 <= lo <= hi:
            raise DomainError("need 1 <= n-min <= n-max")
        N_list, N = [], lo
        while N <= hi:
            N_list.append(N)
            N *= 2
    else:
        N_list = cfg.experiment.get("N_list", [100, 1000, 10_000, 100_000])
    coeffs = None
    if "coefficients" in cfg.experiment:
        coeffs = lowerbound.Explicit(tuple(cfg.experiment["coefficients"]))
    run = lowerbound.lower_growth_check(eps, eta, N_list, cfg.policy, coeffs)
    stolz = lowerbound.stolz_membership_check(max(2, max(N_list)))
    rows = [[r.N, r.re_f, r.norm_ratio] for r in run.rows]
    summary = [f"norm_ratio {run.verdict} (exponent 1-eps/2-eta/2 = {run.exponent:.3g})",
               f"Stolz ratio sup |1-lambda_n|/(1-|lambda_n|) = {stolz.sup_ratio:.6f}"]
    return Outcome(["N", "re_f", "norm_ratio"], rows, summary,
                   ([r.N for r in run.rows], [r.norm_ratio for r in run.rows], "N",
                    "norm_ratio"))


HANDLERS = {"evaluate": cmd_evaluate, "check": cmd_check, "growth": cmd_growth,
            "example3": cmd_example3, "lowerbound": cmd_lowerbound}


def run_command(cmd, cfg, args):
    outcome = HANDLERS[cmd](cfg, args)
    if args.out:
        write_csv(args.out, outcome.header, outcome.rows)
    if args.svg and outcome.plot is not None:
        write_svg(args.svg, *outcome.plot)
    return outcome


def build_parser():
    p = argparse.ArgumentParser(
        prog="msk",
        description="Inner functions and model-space kernels on the unit disk. "
                    "All angles are in radians.",
        epilog="exit codes: 0 ok, 1 I/O error, 2 config error, 3 precondition violated, "
               "4 truncation budget exhausted")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True,
                   help="JSON config file, or inline JSON starting with '{'")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--svg", help="optional SVG log-log polyline")
    p.add_argument("--n-min", type=int, dest="n_min", help="smallest N (dyadic radius 1-2^-N)")
    p.add_argument("--n-max", type=int, dest="n_max", help="largest N")
    p.add_argument("--rel-tol", type=float, dest="rel_tol", help="series relative tolerance")
    p.add_argument("--max-terms", type=int, dest="max_terms", help="series term budget")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.rel_tol is not None or args.max_terms is not None:
            try:
                pol = TruncationPolicy(
                    rel_tol=cfg.policy.rel_tol if args.rel_tol is None else args.rel_tol,
                    abs_tol=cfg.policy.abs_tol,
                    max_terms=cfg.policy.max_terms if args.max_terms is None else args.max_terms)
            except ValueError as exc:
                raise ConfigError("/policy", str(exc)) from None
            cfg = RunConfig(cfg.spec, cfg.phi, cfg.zeta_angle, pol, cfg.experiment, cfg.radii)
        outcome = run_command(args.command, cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except DomainError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in outcome.summary:
        print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
