"""BIBO verdicts for open and closed loops, and sampled-integral stability tests.

A system in the admitted class is BIBO stable iff it has no poles in the
closed right half-plane and every imaginary-axis branch point is regular
(smallest exponent >= 0).  The impulse-response tail then decays like
``t**-(kappa*+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from . import expr as ex
from .asymptotics import (InsufficientTruncation, Kind, SingularityClass, closed_loop_map,
                          is_integer, kappa_star, time_domain_terms)
from .laplace import SampledSignal, TailFit, fit_tail_exponent
from .singularities import (CLOSED_LOOP, OPEN_LOOP, SingularityInventory, SingularityRecord,
                            axis_zeros, branch_number, default_region, winding_number,
                            _snap_count)

__all__ = [
    "StabilityReport", "IntegralTests", "assess_open_loop", "assess_closed_loop",
    "integral_tests", "STABLE", "UNSTABLE", "OUT_OF_CLASS",
]

STABLE = "BIBO-stable"
UNSTABLE = "unstable"
OUT_OF_CLASS = "out-of-class"

P_MARGIN = 0.05


@dataclass
class StabilityReport:
    role: str
    verdict: str
    P_plus: int
    P_j: int
    B_j: float
    kappa_star: float | None
    tail: list
    assumptions: dict
    records: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def stable(self):
        return self.verdict == STABLE

    @property
    def dominant(self):
        return self.tail[0] if self.tail else None

    def to_dict(self):
        return {
            "role": self.role,
            "verdict": self.verdict,
            "P_plus": self.P_plus,
            "P_j": self.P_j,
            "B_j": self.B_j,
            "kappa_star": self.kappa_star,
            "tail": [{"omega": t.omega, "p": float(t.p),
                      "coeff": [t.coeff.real, t.coeff.imag], "divergent": t.divergent}
                     for t in self.tail],
            "records": [{"b": [r.location.real, r.location.imag], "class": str(r.cls),
                         "source": r.source, "expansion": r.expansion.to_dict()}
                        for r in self.records],
            "assumptions": self.assumptions,
            "notes": list(self.notes),
        }


def _tail(records):
    terms = []
    for r in records:
        if abs(r.location.real) > 0:
            continue
        terms.extend(time_domain_terms(r.expansion))
    return sorted(terms, key=lambda t: (float(t.p), t.omega))


def _kstar(records):
    k = kappa_star([r.expansion for r in records if r.on_axis])
    return None if k is None else float(k)


def _decay_note(ks):
    if ks is None:
        return "no non-integer exponent on the axis: tail set by the left half-plane"
    return f"f(t) = t**-{ks + 1:g} * O(1) as t -> inf"


def assess_open_loop(inventory, a3):
    """Verdict for the open loop from its singularity inventory and the A3 check."""
    records = list(inventory.imaginary_branch_points) + \
        [r for r in inventory.other_records if r.on_axis]
    B = float(branch_number(inventory.imaginary_branch_points, OPEN_LOOP))
    polar = [r for r in inventory.imaginary_branch_points if r.cls.kind is Kind.POLAR_BRANCH]
    ks = _kstar(records)
    notes = list(inventory.notes)
    assumptions = {"A3_pass": bool(a3.passed), "A3": a3.to_dict(),
                   "A1": "assumed (not checkable from F alone)"}
    if inventory.out_of_class or not a3.passed:
        for loc, why in inventory.out_of_class:
            notes.append(f"out of class at {loc}: {why}")
        if not a3.passed:
            notes.append("A3 fails: " + "; ".join(a3.notes))
        verdict = OUT_OF_CLASS
    elif inventory.P_plus == 0 and inventory.P_j == 0 and B == 0 and not polar:
        verdict = STABLE
    else:
        verdict = UNSTABLE
    if verdict == STABLE:
        notes.append(_decay_note(ks))
    return StabilityReport(OPEN_LOOP, verdict, inventory.P_plus, inventory.P_j, B, ks,
                           _tail(records), assumptions, records, notes)


def closed_loop_records(records):
    """Map open-loop axis records through ``F/(1+F)``.

    Returns ``(records, extra_poles)``; a Case-3 point with an integer second
    exponent is a closed-loop pole and is returned in ``extra_poles`` instead.
    """
    out, poles = [], []
    for r in records:
        mapped = closed_loop_map(r.expansion)
        rec = SingularityRecord.from_expansion(mapped, r.source, role=CLOSED_LOOP,
                                               notes=r.notes)
        a = r.expansion
        k1 = a.terms[1][0] if len(a.terms) > 1 else None
        if a.terms[0][0] == 0 and a.coeff_equals(a.terms[0][1], -1) and is_integer(k1):
            # leading -1/c1 (s-b)**-k1: a pole of order k1 whatever follows
            poles.append((rec.location, int(k1)))
        elif rec.cls.kind is Kind.POLE:
            poles.append((rec.location, rec.cls.order))
        out.append(rec)
    return out, poles


def assess_closed_loop(open_inventory, f, a3, region=None, omega_max=1e3,
                       rhp_zero_count=None):
    """Verdict for ``F/(1+F)`` from the open-loop inventory and ``F`` itself."""
    notes = []
    assumptions = {"A3_pass": bool(a3.passed), "A3_preserved": True}
    open_axis = list(open_inventory.imaginary_branch_points) + \
        [r for r in open_inventory.other_records if r.on_axis]
    if open_inventory.out_of_class or not a3.passed:
        notes.append("open loop outside the admitted class; no closed-loop verdict")
        return StabilityReport(CLOSED_LOOP, OUT_OF_CLASS, 0, 0, 0.0, None, [], assumptions,
                               [], notes)
    try:
        recs, case3_poles = closed_loop_records(open_axis)
    except InsufficientTruncation as e:
        notes.append(str(e))
        return StabilityReport(CLOSED_LOOP, OUT_OF_CLASS, 0, 0, 0.0, None, [], assumptions,
                               [], notes)
    g = ex.add(ex.ONE, f)
    locs = [r.location for r in open_axis]
    hints = sorted({z.imag for z in locs})
    if rhp_zero_count is None:
        region = region or default_region(locs)
        w = winding_number(g, region, hints=hints)
        # zeros of 1+F = winding + poles of F in the region
        P_plus = _snap_count(w, "closed-loop pole count") + open_inventory.P_plus
        notes.append(f"right half-plane zeros of 1+F from winding {w:.6f} "
                     f"+ {open_inventory.P_plus} open-loop pole(s)")
    else:
        P_plus = int(rhp_zero_count)
    zeros = axis_zeros(g, omega_max, exclude=hints)
    P_j = sum(m for _, m in zeros) + sum(m for _, m in case3_poles)
    for w0, m in zeros:
        notes.append(f"1+F vanishes on the axis at omega = {w0:.12g} (order {m})")
    for loc, m in case3_poles:
        notes.append(f"c0 = -1 with integer next exponent at {loc}: closed-loop pole of order {m}")
    B = float(branch_number(open_axis, CLOSED_LOOP))
    polar = [r for r in recs if r.cls.kind is Kind.POLAR_BRANCH]
    if P_plus == 0 and P_j == 0 and B == 0 and not polar:
        verdict = STABLE
    else:
        verdict = UNSTABLE
    ks = _kstar(recs)
    if verdict == STABLE:
        notes.append(_decay_note(ks))
    notes.append("verdict relies on the declared imaginary-axis singularities being exhaustive")
    return StabilityReport(CLOSED_LOOP, verdict, P_plus, P_j, B, ks, _tail(recs),
                           assumptions, recs, notes)


# -- sampled-integral tests -------------------------------------------------------------

@dataclass
class IntegralTests:
    sr: bool | None
    bibo: bool | None
    beta_exp: bool | None
    values: dict
    fit: TailFit | None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"sr": self.sr, "bibo": self.bibo, "beta_exp": self.beta_exp,
                "values": self.values, "fit": None if self.fit is None else self.fit.to_dict(),
                "notes": list(self.notes), "estimates": "numerical"}


def _integral(t, y):
    """Composite Simpson on the grid plus a rectangle for ``[0, t0]``."""
    return float(np.real_if_close(simpson(y, x=t))) + float(t[0] * y[0]) if np.isrealobj(y) \
        else complex(simpson(y, x=t) + t[0] * y[0])


def _decade_increments(t, y, n=3):
    """Integrals of ``y`` over the last ``n`` decades of the grid."""
    T = t[-1]
    out = []
    for k in range(n, 0, -1):
        lo, hi = T / 10 ** k, T / 10 ** (k - 1)
        m = (t >= lo) & (t <= hi)
        if m.sum() < 3:
            return None
        out.append(float(simpson(y[m], x=t[m])))
    return out


def _verdict_from_p(p):
    if p is None:
        return None
    if p > 1 + P_MARGIN:
        return True
    if p < 1 - P_MARGIN:
        return False
    return None


def integral_tests(sig, beta=0.0):
    """SR, BIBO and beta-exponential tests on a sampled impulse response."""
    if not isinstance(sig, SampledSignal):
        sig = SampledSignal(*sig)
    t, g = sig.times, sig.values
    notes = []
    if t[-1] < 10 * t[0]:
        return IntegralTests(None, None, None, {}, None, ["inconclusive: grid spans less "
                                                          "than one decade"])
    absg = np.abs(g)
    bounded = bool(np.all(np.isfinite(absg)))
    M = float(np.max(absg)) if bounded else math.inf
    fit = fit_tail_exponent(sig)
    notes += [f"tail fit: {n}" for n in fit.notes]
    I_g = _integral(t, g)
    I_abs = _integral(t, absg)
    values = {"int_g": None, "int_abs_g": None, "int_weighted": None, "max_abs_g": M,
              "T": float(t[-1]), "p_fit": fit.p, "tail_kind": fit.kind}

    # BIBO: absolute integrability
    if fit.kind == "super-polynomial" or _finite_support(g):
        bibo = True
        tail_abs = 0.0
    else:
        bibo = _verdict_from_p(fit.p)
        tail_abs = 0.0
        if bibo and fit.p is not None:
            tail_abs = _power_tail(t, absg, fit.p)
        if bibo is None and fit.p is not None:
            inc = _decade_increments(t, absg)
            if inc and min(inc) > 0:
                ratios = [b / a for a, b in zip(inc, inc[1:])]
                if all(0.8 < r < 1.25 for r in ratios):
                    bibo = False
                    notes.append("integral of |g| grows by a constant amount per decade "
                                 "(logarithmic divergence)")
                else:
                    notes.append("p within 1 +- 0.05 and no logarithmic growth: inconclusive")
    values["int_abs_g"] = I_abs + tail_abs if bibo else None

    # SR: simple convergence of the integral of g
    if bibo:
        sr = True
        I_full = I_g + (_power_tail(t, g, fit.p) if fit.kind == "power-law" and fit.p else 0.0)
    elif fit.oscillatory and fit.p is not None and fit.p > P_MARGIN:
        sr = True
        I_full = _oscillation_mean(t, g, I_g)
        notes.append("oscillatory tail with decaying envelope: integral of g taken as the "
                     "mean of the cumulative integral over the final oscillations")
    elif fit.oscillatory and fit.p is not None:
        sr = False
        I_full = None
    else:
        sr = _verdict_from_p(fit.p)
        I_full = I_g + _power_tail(t, g, fit.p) if sr else None
    values["int_g"] = _jsonable(I_full)

    # beta-exponential: bounded and integrable against exp(-beta1 t), beta1 = beta - 0.1
    beta1 = beta - 0.1
    rate = _exp_rate(t, absg)
    values["exp_rate"] = rate
    if _finite_support(g):
        beta_exp = bounded
    elif rate is None:
        beta_exp = None
    else:
        beta_exp = bounded and rate + beta1 > 0
        if beta_exp:
            w = absg * np.exp(-beta1 * t)
            values["int_weighted"] = _integral(t, w)
            values["envelope"] = {"M": M, "a": rate}
    return IntegralTests(sr, bibo, beta_exp, values, fit, notes)


def _jsonable(x):
    if x is None:
        return None
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


def _finite_support(g):
    nz = np.flatnonzero(np.abs(g) > 0)
    return len(nz) > 0 and nz[-1] < len(g) - 10


def _power_tail(t, y, p):
    """Remainder integral beyond the grid for ``y ~ y(T) (T/t)**p``, p > 1."""
    if p is None or p <= 1:
        return 0.0
    T = t[-1]
    return y[-1] * T / (p - 1)


def _oscillation_mean(t, g, total):
    """Average of the cumulative integral over its last few oscillations."""
    cum = cumulative_simpson(g, x=t, initial=0.0) + t[0] * g[0]
    x = np.real(g)
    cross = np.flatnonzero(np.sign(x[1:]) != np.sign(x[:-1]))
    if len(cross) < 6:
        return total
    # extrema of the cumulative integral sit at the zeros of g
    ext = cum[cross[-6:]]
    return float(np.mean(0.5 * (ext[1:] + ext[:-1])))


def _exp_rate(t, absg):
    """Decay rate ``a`` of ``|g| ~ M exp(-a t)`` from the last nonzero decade."""
    nz = absg > 1e-300
    if nz.sum() < 8:
        return None
    tt, yy = t[nz], absg[nz]
    sel = tt >= tt[-1] / 10
    if sel.sum() < 4:
        sel = slice(-8, None)
    tt, ly = tt[sel], np.log(yy[sel])
    A = np.vstack([tt, np.ones_like(tt)]).T
    (slope, _), *_ = np.linalg.lstsq(A, ly, rcond=None)
    return float(-slope)
