"""End-to-end analysis of a manifest: open loop, closed loop, Nyquist, cross-checks."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import __version__
from . import expr as ex
from .nyquist import SweepError, nyquist_verdict
from .singularities import (ContourSingularity, InconclusiveCount, build_inventory,
                            check_A3)
from .stability import OUT_OF_CLASS, assess_closed_loop, assess_open_loop

__all__ = ["analyze", "render_text", "jsonable", "AnalysisError"]


class AnalysisError(RuntimeError):
    pass


def jsonable(x):
    """Plain-JSON copy of report data (Fractions, complex and numpy scalars converted)."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (Fraction, float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(x.real), jsonable(x.imag)]
    return x


def analyze(manifest, omega_max=None, puncture_eps=None, tol_rad=None, delta=None):
    """Run every check on ``manifest``; command-line overrides win over manifest options."""
    opts = dict(manifest.options)
    for k, v in (("omega_max", omega_max), ("puncture_eps", puncture_eps),
                 ("tol_rad", tol_rad), ("delta", delta)):
        if v is not None:
            opts[k] = v
    f = manifest.f
    a3 = check_A3(f, opts["delta"])
    try:
        inv = build_inventory(f, manifest.declarations, rhp_poles=manifest.rhp_poles)
    except (ContourSingularity, InconclusiveCount) as e:
        raise AnalysisError(f"open-loop pole count failed: {e}") from e
    open_rep = assess_open_loop(inv, a3)
    report = {
        "tool": {"name": "irrstab", "version": __version__},
        "manifest": {"sha256": manifest.digest, "name": manifest.name,
                     "expr": ex.to_string(f)},
        "options": dict(opts),
        "open_loop": open_rep.to_dict(),
    }
    if open_rep.verdict == OUT_OF_CLASS:
        report["closed_loop"] = None
        report["nyquist"] = None
        report["checks"] = {"note": "open loop outside the admitted class"}
        return report
    om = opts["omega_max"]
    try:
        nyq = nyquist_verdict(f, inv, omega_max=om, eps=opts["puncture_eps"],
                              tol=opts["tol_rad"])
    except SweepError as e:
        raise AnalysisError(f"Nyquist sweep failed: {e}") from e
    try:
        closed = assess_closed_loop(inv, f, a3, omega_max=nyq.sweep.omega_max)
    except (ContourSingularity, InconclusiveCount) as e:
        raise AnalysisError(f"closed-loop pole count failed: {e}") from e
    report["closed_loop"] = closed.to_dict()
    nd = nyq.to_dict()
    nd["sweep"] = nyq.sweep.to_dict()
    report["nyquist"] = nd
    identity = nyq.measured_delta + np.pi * (2 * closed.P_plus + closed.P_j + closed.B_j)
    report["checks"] = {
        "verdicts_agree": closed.stable == nyq.stable,
        "P_cl_plus_agrees": nyq.decomposition["P_cl_plus"] == closed.P_plus,
        "identity_lhs": float(identity),
        "identity_rhs": nyq.required_delta,
        "identity_holds": bool(abs(identity - nyq.required_delta) < opts["tol_rad"]),
    }
    return report


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def render_text(report):
    """Human-readable summary of :func:`analyze` output."""
    lines = [f"irrstab {report['tool']['version']}",
             f"manifest sha256 {report['manifest']['sha256']}",
             f"F(s) = {report['manifest']['expr']}", ""]
    for key, title in (("open_loop", "open loop"), ("closed_loop", "closed loop")):
        r = report.get(key)
        if not r:
            continue
        lines.append(f"[{title}] verdict: {r['verdict']}")
        lines.append(f"  P+ = {r['P_plus']}  Pj = {r['P_j']}  Bj = {_fmt(r['B_j'])}  "
                     f"kappa* = {_fmt(r['kappa_star'])}")
        for rec in r["records"]:
            b = rec["b"]
            lines.append(f"  point {b[0]:g}{b[1]:+g}j: {rec['class']} ({rec['source']})")
        if r["tail"]:
            t = r["tail"][0]
            lines.append(f"  dominant tail term: ({t['coeff'][0]:.6g}{t['coeff'][1]:+.6g}j) "
                         f"exp(j {t['omega']:g} t) / t^{t['p']:g}")
        for n in r["notes"]:
            lines.append(f"  note: {n}")
        lines.append("")
    n = report.get("nyquist")
    if n:
        lines.append(f"[nyquist] measured = {n['measured'] / np.pi:.6f} pi, "
                     f"required = {n['required'] / np.pi:.6f} pi, "
                     f"stable = {n['stable']}")
        d = n["decomposition"]
        lines.append(f"  residual = {n['residual'] / np.pi:.6f} pi -> P_cl+ = {d['P_cl_plus']}, "
                     f"P_cl,j = {d['P_cl_j']}, B_cl,j = {_fmt(d['B_cl_j'])}")
        lines.append(f"  extrapolated total = {n['sweep']['extrapolated_delta'] / np.pi:.6f} pi")
        for note in n["notes"] + n["sweep"]["notes"]:
            lines.append(f"  note: {note}")
        lines.append("")
    c = report.get("checks")
    if c:
        lines.append("[checks]")
        for k in sorted(c):
            lines.append(f"  {k}: {_fmt(c[k])}")
    return "\n".join(lines) + "\n"
