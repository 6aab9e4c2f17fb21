"""Generalized Nyquist test on the punctured imaginary axis.

The sweep follows ``arg(1 + F(j w))`` for ``w`` from ``-Omega`` to ``Omega``
with small intervals removed around every imaginary-axis singularity and
every zero of ``1 + F``.  Each segment is unwrapped separately.  Two totals
are produced:

* a limit total, where each segment end at a puncture is replaced by the
  one-sided limit phase of the dominant term of ``1 + F`` there, and
* an extrapolated total, Richardson-extrapolated from raw sample totals at
  puncture radii ``eps, eps/2, eps/4``.

The total over ``(-inf, inf)`` is then compared with
``pi * (2 P+ + Pj + Bj)`` of the open loop.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import expr as ex
from .asymptotics import AsymExpansion, Kind, add as asym_add, is_integer
from .singularities import (CLOSED_LOOP, OPEN_LOOP, TruncationFailure,
                            UnsupportedSingularity, axis_zeros, branch_number,
                            estimate_expansion)

__all__ = [
    "NyquistSweep", "Segment", "Puncture", "NyquistVerdict", "SweepError",
    "UndeclaredSingularity", "OmegaTooSmall", "sweep_argument",
    "semicircle_increment", "verify_semicircle_numeric", "nyquist_verdict",
    "export_nyquist_data", "write_nyquist_csv", "limit_phase",
]

MAX_STEP = np.pi / 4        # refinement target, half the guaranteed bound
TAIL_LIMIT = 0.01


class SweepError(ArithmeticError):
    pass


class UndeclaredSingularity(SweepError):
    pass


class OmegaTooSmall(SweepError):
    pass


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class Puncture:
    """A removed point ``j*omega`` and the dominant term ``c (s - j omega)**kappa`` of 1+F."""
    omega: float
    kappa: Fraction | float
    coeff: complex
    origin: str              # "declared" or "zero of 1+F"
    multiplicity: int = 0    # for zeros of 1+F

    def phase(self, side):
        """Limit of arg(1+F(j w)) as w -> omega from above (+1) or below (-1)."""
        return limit_phase(self.coeff, self.kappa, side)


def limit_phase(c, kappa, side):
    # (s - b) = j (w - omega) has principal argument +-pi/2
    return float(np.angle(c) + float(kappa) * side * np.pi / 2)


@dataclass
class Segment:
    lo: float                 # -inf / puncture omega
    hi: float
    omega: np.ndarray
    values: np.ndarray        # 1 + F(j omega)
    raw_change: float         # unwrapped change across the samples
    change: float             # with the end limits attached

    @property
    def max_step(self):
        if len(self.values) < 2:
            return 0.0
        return float(np.max(np.abs(_wrap(np.diff(np.angle(self.values))))))


@dataclass
class NyquistSweep:
    segments: list
    total_delta: float
    extrapolated_delta: float
    punctures: list
    eps: float
    omega_max: float
    tail_bound: float
    raw_totals: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def discrepancy(self):
        return abs(self.total_delta - self.extrapolated_delta)

    def to_dict(self):
        return {
            "total_delta": self.total_delta,
            "extrapolated_delta": self.extrapolated_delta,
            "raw_totals": self.raw_totals,
            "eps": self.eps,
            "omega_max": self.omega_max,
            "tail_bound": self.tail_bound,
            "punctures": [{"omega": p.omega, "kappa": float(p.kappa),
                           "origin": p.origin} for p in self.punctures],
            "segments": [{"lo": s.lo, "hi": s.hi, "change": s.change,
                          "points": int(len(s.omega)), "max_step": s.max_step}
                         for s in self.segments],
            "notes": list(self.notes),
        }


# -- puncture bookkeeping ---------------------------------------------------------

def _leading_of_one_plus(expansion):
    one = AsymExpansion.constant(1, expansion.location)
    total = asym_add(one, expansion)
    if expansion.estimated and total.terms:
        # an estimated c0 = -1 leaves rounding debris in the constant
        k0, c0 = expansion.terms[0]
        if k0 == 0 and expansion.coeff_equals(c0, -1):
            total = AsymExpansion(expansion.location, expansion.terms[1:],
                                  expansion.kappa_max, True)
    if not total.terms:
        raise TruncationFailure(f"1+F vanishes identically to the known order at "
                                f"{expansion.location}")
    return total.terms[0]


def collect_punctures(f, records, omega_max, find_zeros=True, exclude_radius=1e-6):
    """Punctures from declared axis records plus zeros of ``1 + F`` on the axis."""
    out = {}
    for r in records:
        if abs(r.location.real) > 0:
            continue
        k, c = _leading_of_one_plus(r.expansion)
        out[r.location.imag] = Puncture(r.location.imag, k, c, "declared")
    if find_zeros:
        g = ex.add(ex.ONE, f)
        for w0, m in axis_zeros(g, omega_max, exclude=sorted(out), exclude_radius=exclude_radius):
            try:
                est = estimate_expansion(g, 1j * w0, n_terms=1, eps_min=1e-7, eps_max=1e-3)
                k, c = est.terms[0]
            except (UnsupportedSingularity, TruncationFailure):
                k, c = Fraction(m), complex(ex.evaluate(ex.derivative(g), 1j * w0))
            out[w0] = Puncture(w0, k, c, "zero of 1+F", multiplicity=m)
    return [out[w] for w in sorted(out)]


# -- the sweep ------------------------------------------------------------------------

def _initial_grid(lo, hi, near_lo, near_hi, eps):
    span = hi - lo
    pts = [np.linspace(lo, hi, 257)]
    if near_lo:
        pts.append(lo + np.geomspace(min(eps, span / 4), span, 121) - min(eps, span / 4))
    if near_hi:
        pts.append(hi - np.geomspace(min(eps, span / 4), span, 121) + min(eps, span / 4))
    # logarithmic coverage in |w| for wide segments
    top = max(abs(lo), abs(hi))
    if top > 10:
        mags = np.geomspace(1e-3, top, 241)
        both = np.concatenate([-mags, mags])
        pts.append(both[(both > lo) & (both < hi)])
    grid = np.unique(np.concatenate(pts))
    return grid[(grid >= lo) & (grid <= hi)]


def _eval_one_plus(f, w):
    with np.errstate(all="ignore"):
        v = 1.0 + ex.evaluate(f, 1j * w, check=False)
    return v


def _refine(f, w, max_points=2_000_000):
    v = _eval_one_plus(f, w)
    while True:
        bad_val = ~np.isfinite(v) | (v == 0)
        if bad_val.any():
            where = float(w[np.flatnonzero(bad_val)[0]])
            raise UndeclaredSingularity(f"undeclared singularity near omega = {where:.10g}")
        steps = np.abs(_wrap(np.diff(np.angle(v))))
        bad = np.flatnonzero(steps >= MAX_STEP)
        if len(bad) == 0:
            return w, v
        gap = w[bad + 1] - w[bad]
        tiny = gap < 1e-13 * np.maximum(1.0, np.abs(w[bad]))
        if tiny.any() or len(w) > max_points:
            where = float(w[bad[np.argmax(tiny)] if tiny.any() else bad[0]])
            raise UndeclaredSingularity(
                f"undeclared singularity near omega = {where:.10g} "
                "(phase step stays >= pi/2 after refinement)")
        mids = 0.5 * (w[bad] + w[bad + 1])
        vm = _eval_one_plus(f, mids)
        order = np.argsort(np.concatenate([w, mids]), kind="stable")
        w = np.concatenate([w, mids])[order]
        v = np.concatenate([v, vm])[order]


def _segments(punctures, omega_max, eps):
    bounds = [(-omega_max, None)] + [(p.omega, p) for p in punctures] + [(omega_max, None)]
    out = []
    for (a, pa), (b, pb) in zip(bounds, bounds[1:]):
        lo = a + eps if pa is not None else a
        hi = b - eps if pb is not None else b
        if hi <= lo:
            raise ValueError(f"puncture radius {eps} too large for spacing near {a}..{b}")
        out.append((lo, hi, pa, pb))
    return out


def _run(f, punctures, omega_max, eps):
    segs = []
    for lo, hi, pa, pb in _segments(punctures, omega_max, eps):
        w, v = _refine(f, _initial_grid(lo, hi, pa is not None, pb is not None, eps))
        ph = np.angle(v)
        raw = float(np.sum(_wrap(np.diff(ph))))
        start = pa.phase(+1) if pa is not None else 0.0   # arg -> 0 beyond -Omega
        end = pb.phase(-1) if pb is not None else 0.0
        change = float(_wrap(ph[0] - start)) + raw + float(_wrap(end - ph[-1]))
        # raw total includes the tail closure at +-Omega but not the puncture limits
        raw_total = raw
        if pa is None:
            raw_total += float(_wrap(ph[0]))
        if pb is None:
            raw_total += float(_wrap(-ph[-1]))
        segs.append((Segment(pa.omega if pa else -math.inf, pb.omega if pb else math.inf,
                             w, v, raw_total, change)))
    return segs


def _richardson(t):
    """Limit of t(eps), t(eps/2), t(eps/4) assuming t = T + A eps**q."""
    t0, t1, t2 = t
    d1, d2 = t0 - t1, t1 - t2
    if abs(d2) < 1e-14 or abs(d1) < 1e-14 or d1 * d2 <= 0:
        return t2, None
    r = d1 / d2
    if r <= 1.0:
        return t2, None
    q = math.log2(r)
    return t2 - d2 / (2 ** q - 1), q


def auto_omega(f, punctures, start=1e3, limit=1e9):
    top = max([abs(p.omega) for p in punctures] + [0.0])
    om = max(start, 10 * top)
    while om <= limit:
        if max(abs(complex(ex.evaluate(f, 1j * om, check=False))),
               abs(complex(ex.evaluate(f, -1j * om, check=False)))) < 1e-3:
            return om
        om *= 10
    raise OmegaTooSmall(f"|F(j omega)| does not fall below 1e-3 up to omega = {limit:g}")


def sweep_argument(f, punctures, omega_max=None, eps=1e-3):
    """Punctured-axis argument sweep of ``1 + f(j w)``.

    ``punctures`` is a list of :class:`Puncture` (see :func:`collect_punctures`).
    """
    punctures = sorted(punctures, key=lambda p: p.omega)
    if omega_max is None:
        omega_max = auto_omega(f, punctures)
    notes = []
    top = max([abs(p.omega) for p in punctures] + [0.0])
    if top and omega_max < 10 * top:
        raise OmegaTooSmall(f"Omega = {omega_max:g} must exceed 10x the largest puncture "
                            f"frequency {top:g}")
    spacing = min(np.diff([p.omega for p in punctures]), default=math.inf)
    if eps >= spacing / 2:
        raise ValueError(f"puncture radius {eps} not below half the puncture spacing {spacing:g}")
    tail = max(abs(complex(ex.evaluate(f, 1j * omega_max, check=False))),
               abs(complex(ex.evaluate(f, -1j * omega_max, check=False))))
    if not tail <= TAIL_LIMIT:
        raise OmegaTooSmall(f"Omega too small: |F(j Omega)| = {tail:.3g} > {TAIL_LIMIT}")
    tail_bound = math.asin(min(1.0, tail))
    segs = _run(f, punctures, omega_max, eps)
    total = float(sum(s.change for s in segs))
    raws = [float(sum(s.raw_change for s in segs))]
    if punctures:
        for k in (2, 4):
            raws.append(float(sum(s.raw_change for s in _run(f, punctures, omega_max, eps / k))))
        extrap, q = _richardson(raws)
        if q is not None:
            notes.append(f"eps-extrapolation order {q:.3f}")
    else:
        raws = raws * 3
        extrap = raws[0]
    if abs(total - extrap) > 1e-3:
        notes.append(f"limit total {total:.6f} and extrapolated total {extrap:.6f} "
                     "differ by more than 1e-3")
    return NyquistSweep(segs, total, float(extrap), punctures, eps, float(omega_max),
                        tail_bound, raws, notes)


# -- semicircles ----------------------------------------------------------------------

def semicircle_increment(record=None, *, expansion=None, zero_order=None):
    """Closed-form argument increment of ``1+F`` on a small right semicircle.

    Pass a :class:`SingularityRecord` (or a bare expansion of F), or
    ``zero_order=k`` for a zero of ``1 + F`` of order k.
    """
    if zero_order is not None:
        return zero_order * np.pi
    a = expansion if expansion is not None else record.expansion
    if record is not None and record.cls.kind is Kind.POLE:
        return -record.cls.order * np.pi
    if not a.terms:
        return 0.0
    k0, c0 = a.terms[0]
    if k0 < 0:
        # pole (integer k0) or polar branch point
        return float(k0) * np.pi
    if k0 == 0 and a.coeff_equals(c0, -1):
        if len(a.terms) < 2:
            raise TruncationFailure("insufficient truncation: c0 = -1 needs the next term")
        return float(a.terms[1][0]) * np.pi
    return 0.0


_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def _arc_integral(f, df, a, rho, panels=64):
    """Imaginary part of the integral of F'/(1+F) over a + rho e^{j phi}, |phi| <= pi/2."""
    edges = np.linspace(-np.pi / 2, np.pi / 2, panels + 1)
    total = 0j
    for p0, p1 in zip(edges, edges[1:]):
        phi = 0.5 * (p1 - p0) * _GL_X + 0.5 * (p1 + p0)
        s = a + rho * np.exp(1j * phi)
        ds = 1j * rho * np.exp(1j * phi)
        val = ex.evaluate(df, s) / (1.0 + ex.evaluate(f, s)) * ds
        total += 0.5 * (p1 - p0) * np.dot(_GL_W, val)
    return float(total.imag)


def verify_semicircle_numeric(f, location, rho=1e-4):
    """Numeric semicircle increment at ``location``, extrapolated over rho, rho/2, rho/4."""
    df = ex.derivative(f)
    a = complex(location)
    vals = [_arc_integral(f, df, a, rho / k) for k in (1, 2, 4)]
    limit, q = _richardson(vals)
    return {"value": float(limit), "samples": vals, "order": q}


# -- verdict ----------------------------------------------------------------------------

@dataclass
class NyquistVerdict:
    measured_delta: float
    required_delta: float
    stable: bool
    residual: float
    decomposition: dict
    tol: float
    sweep: NyquistSweep | None = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"measured": self.measured_delta, "required": self.required_delta,
                "stable": self.stable, "residual": self.residual,
                "decomposition": self.decomposition, "tol": self.tol,
                "notes": list(self.notes)}


def nyquist_verdict(f, inventory, omega_max=None, eps=1e-3, tol=0.05, sweep=None):
    """Compare the punctured sweep with ``pi (2 P+ + Pj + Bj)`` of the open loop."""
    records = list(inventory.imaginary_branch_points)
    records += [r for r in inventory.other_records if r.on_axis]
    if sweep is None:
        om = omega_max
        if om is None:
            declared = collect_punctures(f, records, 1.0, find_zeros=False)
            om = auto_omega(f, declared)
        punctures = collect_punctures(f, records, om)
        sweep = sweep_argument(f, punctures, om, eps)
    B_o = branch_number(inventory.imaginary_branch_points, OPEN_LOOP)
    required = np.pi * (2 * inventory.P_plus + inventory.P_j + float(B_o))
    measured = sweep.total_delta
    residual = measured - required
    stable = abs(residual) < tol
    # closed-loop bookkeeping: -residual/pi = 2 Pcl+ + Pcl,j + Bcl,j
    zero_mult = sum(p.multiplicity for p in sweep.punctures if p.origin == "zero of 1+F")
    case3_poles = 0
    for r in records:
        a = r.expansion
        if a.terms and a.terms[0][0] == 0 and a.coeff_equals(a.terms[0][1], -1) \
                and len(a.terms) > 1 and is_integer(a.terms[1][0]):
            case3_poles += int(round(float(a.terms[1][0])))
    P_clj = zero_mult + case3_poles
    B_cl = float(branch_number(records, CLOSED_LOOP))
    two_p = -residual / np.pi - P_clj - B_cl
    P_cl_plus = two_p / 2
    notes = []
    consistent = abs(P_cl_plus - round(P_cl_plus)) < tol / (2 * np.pi) * 2 and round(P_cl_plus) >= 0
    if not consistent:
        notes.append(f"residual does not decompose into a nonnegative integer P_cl+ "
                     f"(got {P_cl_plus:.4f})")
    if sweep.discrepancy > 1e-3:
        notes.append(f"limit-based and extrapolated totals differ by {sweep.discrepancy:.2e}")
    decomposition = {"P_cl_plus": int(round(P_cl_plus)) if consistent else P_cl_plus,
                     "P_cl_j": P_clj, "B_cl_j": B_cl, "consistent": bool(consistent)}
    return NyquistVerdict(measured, float(required), bool(stable), float(residual),
                          decomposition, tol, sweep, notes)


# -- plot data --------------------------------------------------------------------------

def export_nyquist_data(f, omegas):
    """Rows ``(omega, Re F(j w), Im F(j w))``; singular points are skipped and noted."""
    rows, skipped = [], []
    for w in np.asarray(omegas, dtype=float):
        try:
            z = complex(ex.evaluate(f, 1j * w))
        except ex.EvaluationError:
            skipped.append(float(w))
            continue
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            skipped.append(float(w))
            continue
        rows.append((float(w), z.real, z.imag))
    return rows, skipped


def write_nyquist_csv(path, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["omega", "re", "im"])
        for w, re_, im_ in rows:
            wr.writerow([repr(w), repr(re_), repr(im_)])
