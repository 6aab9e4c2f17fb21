"""Truncated generalized power series ``sum c_k (s - b)**kappa_k`` at a point.

An :class:`AsymExpansion` stores finitely many terms with strictly
increasing real exponents plus a truncation order ``kappa_max``: the stored
terms are exact for every exponent ``<= kappa_max`` and nothing is known
beyond it.  ``kappa_max = inf`` means the finite sum *is* the function.

Exponents are kept as :class:`fractions.Fraction` whenever they are
(numerically) rational with a small denominator, otherwise as floats that
merge under a 1e-12 tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import rgamma

__all__ = [
    "AsymExpansion", "SingularityClass", "Kind", "TimeTerm",
    "InsufficientTruncation", "as_exponent", "is_integer", "is_natural",
    "add", "mul", "reciprocal", "closed_loop_map", "classify",
    "time_domain_terms", "kappa_star", "DEFAULT_HORIZON",
]

EXP_TOL = 1e-12
ESTIMATED_DROP = 1e-10
ESTIMATED_COEFF_TOL = 1e-9
# relative order kept when inverting an exact (untruncated) multi-term series
DEFAULT_HORIZON = Fraction(4)

INF = math.inf


class InsufficientTruncation(ValueError):
    pass


def as_exponent(x):
    """Exact rational exponent when ``x`` is one (denominator <= 1000)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    x = float(x)
    if math.isinf(x):
        return x
    if not math.isfinite(x):
        raise ValueError("exponent must be finite")
    q = Fraction(x).limit_denominator(1000)
    return q if abs(float(q) - x) < EXP_TOL else x


def _same(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) < EXP_TOL


def is_integer(k):
    if isinstance(k, Fraction):
        return k.denominator == 1
    return abs(k - round(k)) < EXP_TOL


def is_natural(k):
    """True for kappa in {0, 1, 2, ...}."""
    return is_integer(k) and round(float(k)) >= 0


def _le(a, b):
    return a <= b or _same(a, b)


class Kind(str, enum.Enum):
    ANALYTIC = "analytic"
    POLE = "pole"
    REGULAR_BRANCH = "regular-branch-point"
    POLAR_BRANCH = "polar-branch-point"
    REMOVABLE = "removable"


@dataclass(frozen=True)
class SingularityClass:
    kind: Kind
    order: int | None = None

    def __post_init__(self):
        if self.kind is Kind.POLE and (self.order is None or self.order < 1):
            raise ValueError("pole order must be a positive integer")

    def __str__(self):
        if self.kind is Kind.POLE:
            return f"pole({self.order})"
        return self.kind.value


@dataclass(frozen=True)
class TimeTerm:
    """One summand ``coeff * exp(j*omega*t) / t**p`` of the impulse-response tail."""
    omega: float
    p: Fraction | float
    coeff: complex
    divergent: bool = False


@dataclass(frozen=True)
class AsymExpansion:
    location: complex
    terms: tuple = ()
    kappa_max: Fraction | float = INF
    estimated: bool = False
    diagnostics: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "location", complex(self.location))
        kmax = as_exponent(self.kappa_max)
        object.__setattr__(self, "kappa_max", kmax)
        raw = sorted(((as_exponent(k), complex(c)) for k, c in self.terms),
                     key=lambda kc: float(kc[0]))
        merged = []
        for k, c in raw:
            if merged and _same(merged[-1][0], k):
                merged[-1] = (merged[-1][0], merged[-1][1] + c)
            else:
                merged.append((k, c))
        scale = max((abs(c) for _, c in merged), default=0.0)
        kept = []
        for k, c in merged:
            if not _le(k, kmax):
                continue
            if c == 0 or (self.estimated and abs(c) < ESTIMATED_DROP * scale):
                continue
            kept.append((k, c))
        object.__setattr__(self, "terms", tuple(kept))

    # -- convenience -------------------------------------------------------
    @classmethod
    def constant(cls, value, location, kappa_max=INF):
        return cls(location, ((Fraction(0), value),), kappa_max)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def exponents(self):
        return [k for k, _ in self.terms]

    @property
    def coefficients(self):
        return [c for _, c in self.terms]

    @property
    def leading(self):
        if not self.terms:
            raise ValueError("empty expansion has no leading term")
        return self.terms[0]

    @property
    def kappa0(self):
        return self.terms[0][0] if self.terms else self.kappa_max

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __call__(self, s):
        """Finite-sum value at ``s`` (principal branch of each power)."""
        z = np.asarray(s, dtype=complex) - self.location
        out = np.zeros_like(z)
        logz = np.log(np.where(z == 0, 1.0, z))
        for k, c in self.terms:
            out = out + c * np.exp(float(k) * logz)
        return complex(out) if np.ndim(s) == 0 else out

    def truncated(self, kappa_max):
        return AsymExpansion(self.location, self.terms,
                             _min(self.kappa_max, as_exponent(kappa_max)),
                             self.estimated, self.diagnostics)

    def coeff_equals(self, c, target):
        if self.estimated:
            return abs(c - target) <= ESTIMATED_COEFF_TOL * max(1.0, abs(target))
        return c == target

    # -- serialization -----------------------------------------------------
    def to_dict(self):
        return {
            "b": [self.location.real, self.location.imag],
            "terms": [{"kappa": float(k), "c": [c.real, c.imag]} for k, c in self.terms],
            "kappa_max": None if self.kappa_max == INF else float(self.kappa_max),
        }

    @classmethod
    def from_dict(cls, d, location=None):
        b = d.get("b", location)
        if b is None:
            raise ValueError("expansion needs a location 'b'")
        loc = complex(*b) if isinstance(b, (list, tuple)) else complex(b)
        terms = []
        for t in d.get("terms", []):
            c = t["c"]
            terms.append((t["kappa"], complex(*c) if isinstance(c, (list, tuple)) else complex(c)))
        kmax = d.get("kappa_max")
        return cls(loc, tuple(terms), INF if kmax is None else kmax,
                   estimated=bool(d.get("estimated", False)))


def _min(a, b):
    return a if a <= b else b


def _check_same_location(a, b):
    if a.location != b.location:
        raise ValueError(f"mismatched locations {a.location} and {b.location}")


def _combine_flags(a, b):
    return a.estimated or b.estimated


def add(a, b):
    """Sum; the truncation order is the smaller of the two."""
    _check_same_location(a, b)
    return AsymExpansion(a.location, a.terms + b.terms, _min(a.kappa_max, b.kappa_max),
                         _combine_flags(a, b))


def mul(a, b):
    """Product; every pairwise exponent sum up to the joint truncation is kept."""
    _check_same_location(a, b)
    kmax = _min(a.kappa_max + b.kappa0, b.kappa_max + a.kappa0)
    terms = [(ka + kb, ca * cb) for ka, ca in a.terms for kb, cb in b.terms
             if _le(ka + kb, kmax)]
    return AsymExpansion(a.location, tuple(terms), kmax, _combine_flags(a, b))


def _scale_shift(a, factor, shift):
    return AsymExpansion(a.location, tuple((k + shift, c * factor) for k, c in a.terms),
                         a.kappa_max + shift, a.estimated)


def reciprocal(a, horizon=DEFAULT_HORIZON):
    """``1/a`` by factoring out the leading term and a truncated geometric series.

    When ``a`` is an exact multi-term sum the inverse is an infinite series;
    it is then cut ``horizon`` above the leading order.
    """
    if not a.terms:
        raise ZeroDivisionError("reciprocal of an empty expansion")
    k0, c0 = a.terms[0]
    rest = a.terms[1:]
    rel_max = a.kappa_max - k0
    if rest:
        rel_max = _min(rel_max, as_exponent(horizon))
    u = AsymExpansion(a.location, tuple((k - k0, -c / c0) for k, c in rest),
                      rel_max, a.estimated)
    total = AsymExpansion.constant(1, a.location, rel_max)
    power = AsymExpansion.constant(1, a.location, rel_max)
    if u.terms:
        step = u.terms[0][0]
        n = int(math.floor(float(rel_max) / float(step) + 1e-9)) if rel_max != INF else 0
        for _ in range(n):
            power = mul(power, u).truncated(rel_max)
            total = add(total, power)
    return _scale_shift(total, 1 / c0, -k0)


def closed_loop_map(a, horizon=DEFAULT_HORIZON):
    """Expansion of ``a/(1+a)`` at the same point.

    The leading term follows the four-case table: ``kappa0 < 0`` gives 1,
    ``kappa0 = 0, c0 != -1`` gives ``c0/(1+c0)``, ``kappa0 = 0, c0 = -1`` gives
    ``-1/c1 (s-b)**(-kappa1)`` and ``kappa0 > 0`` leaves ``c0 (s-b)**kappa0``.
    """
    if not a.terms:
        raise ValueError("closed_loop_map needs a nonempty expansion")
    k0, c0 = a.terms[0]
    case3 = _same(k0, 0) and a.coeff_equals(c0, -1)
    if case3:
        if len(a.terms) < 2:
            raise InsufficientTruncation(
                "insufficient truncation order: c0 = -1 needs the next term")
        # the constant cancels exactly against the loop's 1
        denom = AsymExpansion(a.location, a.terms[1:], a.kappa_max, a.estimated)
    else:
        denom = add(AsymExpansion.constant(1, a.location), a)
    out = mul(a, reciprocal(denom, horizon))
    if k0 < 0 and not _same(k0, 0):
        lead = (Fraction(0), complex(1))
    elif case3:
        k1, c1 = a.terms[1]
        lead = (-k1, -1 / c1)
    elif _same(k0, 0):
        lead = (Fraction(0), c0 / (1 + c0))
    else:
        lead = (k0, c0)
    if not out.terms or not _same(out.terms[0][0], lead[0]):
        raise InsufficientTruncation("truncation too low to resolve the leading term")
    return AsymExpansion(a.location, (lead,) + out.terms[1:], out.kappa_max, out.estimated)


def classify(a):
    if not a.terms:
        return SingularityClass(Kind.ANALYTIC)
    ks = a.exponents
    k0 = ks[0]
    if all(is_natural(k) for k in ks):
        return SingularityClass(Kind.ANALYTIC)
    if all(is_integer(k) for k in ks):
        return SingularityClass(Kind.POLE, int(round(-float(k0))))
    if k0 < 0:
        return SingularityClass(Kind.POLAR_BRANCH)
    return SingularityClass(Kind.REGULAR_BRANCH)


def time_domain_terms(a):
    """Tail terms of the impulse response contributed by an imaginary-axis point.

    Each exponent ``kappa`` maps to ``c / Gamma(-kappa) * exp(j w t) / t**(kappa+1)``;
    nonnegative integer exponents contribute nothing.
    """
    b = a.location
    if abs(b.real) > 1e-9:
        raise ValueError(f"location {b} is not on the imaginary axis")
    out = []
    for k, c in a.terms:
        if is_natural(k):
            continue
        out.append(TimeTerm(omega=b.imag, p=k + 1, coeff=c * float(rgamma(-float(k))),
                            divergent=k < 0))
    return out


def kappa_star(expansions):
    """Smallest exponent outside {0, 1, 2, ...} over all expansions, or None."""
    ks = [k for a in expansions for k in a.exponents if not is_natural(k)]
    return min(ks, key=float) if ks else None
