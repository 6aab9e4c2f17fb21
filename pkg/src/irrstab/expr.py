"""Transfer-function expressions in the Laplace variable ``s``.

Expressions are small immutable trees built by :func:`parse` (or by hand)
and evaluated on the principal branch: every non-integer power ``E^k`` is
computed as ``exp(k * Log E)`` with the logarithm cut along the negative
real axis of ``E``.  For a base ``s - b`` that puts the cut on the
horizontal ray running left from ``b``.

Grammar (EBNF)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ['^' exponent]
    exponent := number | '-' number
              | '(' ['-'] number ['/' number] ')'
    atom     := number | 's' | 'j' | NAME | 'exp' '(' expr ')' | '(' expr ')'

``NAME`` must be bound through the ``constants`` mapping.  Sub-trees made
only of constants are folded into a single constant at construction time;
no other simplification is done.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import mpmath
import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Add", "Mul", "Div", "Pow", "Exp",
    "ExprSyntaxError", "EvaluationError", "PoleHit", "NonFiniteValue",
    "parse", "evaluate", "evaluate_mp", "derivative", "to_string", "split_fraction",
    "branch_powers", "has_real_coefficients",
]


class ExprSyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvaluationError(ArithmeticError):
    pass


class PoleHit(EvaluationError, ZeroDivisionError):
    pass


class NonFiniteValue(EvaluationError):
    pass


def _exponent(value):
    """Normalise a power exponent: exact Fraction when it is a decimal literal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    value = float(value)
    if not np.isfinite(value):
        raise ValueError("power exponent must be finite")
    return Fraction(repr(value))


def _is_int(k):
    return isinstance(k, Fraction) and k.denominator == 1


class Expr:
    """Base node.  Subclasses are frozen dataclasses."""

    def __call__(self, s):
        return evaluate(self, s)

    def __str__(self):
        return to_string(self)

    def _eval(self, s):
        raise NotImplementedError

    def _diff(self):
        raise NotImplementedError

    def children(self):
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (np.isfinite(v.real) and np.isfinite(v.imag)):
            raise ValueError("constants must be finite")
        object.__setattr__(self, "value", v)

    def _eval(self, s):
        return np.full(np.shape(s), self.value, dtype=complex)

    def _diff(self):
        return ZERO

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Var(Expr):
    def _eval(self, s):
        return np.asarray(s, dtype=complex)

    def _diff(self):
        return ONE

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Add(Expr):
    terms: tuple

    def children(self):
        return self.terms

    def _eval(self, s):
        out = self.terms[0]._eval(s)
        for t in self.terms[1:]:
            out = out + t._eval(s)
        return out

    def _diff(self):
        return add(*(t._diff() for t in self.terms))

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    factors: tuple

    def children(self):
        return self.factors

    def _eval(self, s):
        out = self.factors[0]._eval(s)
        for f in self.factors[1:]:
            out = out * f._eval(s)
        return out

    def _diff(self):
        parts = []
        for i, f in enumerate(self.factors):
            df = f._diff()
            if df == ZERO:
                continue
            parts.append(mul(*self.factors[:i], df, *self.factors[i + 1:]))
        return add(*parts)

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Div(Expr):
    num: Expr
    den: Expr

    def __post_init__(self):
        if isinstance(self.den, Const) and self.den.value == 0:
            raise ZeroDivisionError("quotient with literal zero denominator")

    def children(self):
        return (self.num, self.den)

    def _eval(self, s):
        d = self.den._eval(s)
        if np.any(d == 0):
            raise PoleHit("pole hit: denominator vanishes")
        return self.num._eval(s) / d

    def _diff(self):
        dn, dd = self.num._diff(), self.den._diff()
        top = add(mul(dn, self.den), negate(mul(self.num, dd)))
        if top == ZERO:
            return ZERO
        return div(top, power(self.den, 2))

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", _exponent(self.exponent))

    def children(self):
        return (self.base,)

    def _eval(self, s):
        z = self.base._eval(s)
        k = self.exponent
        if _is_int(k):
            return _int_power(z, int(k))
        zero = z == 0
        if k < 0 and np.any(zero):
            raise PoleHit("pole hit: singular power of a vanishing base")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(float(k) * np.log(np.where(zero, 1.0, z)))
        return np.where(zero, 0.0, out)

    def _diff(self):
        db = self.base._diff()
        if db == ZERO:
            return ZERO
        k = self.exponent
        return mul(Const(complex(k)), power(self.base, k - 1), db)

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Exp(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)

    def _eval(self, s):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(self.arg._eval(s))

    def _diff(self):
        da = self.arg._diff()
        if da == ZERO:
            return ZERO
        return mul(self, da)

    __str__ = Expr.__str__


ZERO = Const(0)
ONE = Const(1)
S = Var()


def _int_power(z, n):
    if n < 0:
        if np.any(z == 0):
            raise PoleHit("pole hit: negative power of a vanishing base")
        return 1.0 / _int_power(z, -n)
    out = np.ones_like(z)
    base = z
    while n:
        if n & 1:
            out = out * base
        base = base * base
        n >>= 1
    return out


# -- smart constructors (flatten + fold constants, nothing else) ----------

def _fold(node):
    if all(isinstance(c, Const) for c in node.children()):
        return Const(complex(node._eval(0.0)))
    return node


def add(*terms):
    flat = []
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        elif not (isinstance(t, Const) and t.value == 0):
            flat.append(t)
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return _fold(Add(tuple(flat)))


def mul(*factors):
    flat = []
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        elif isinstance(f, Const) and f.value == 0:
            return ZERO
        elif not (isinstance(f, Const) and f.value == 1):
            flat.append(f)
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return _fold(Mul(tuple(flat)))


def div(num, den):
    if den == ONE:
        return num
    return _fold(Div(num, den))


def power(base, k):
    k = _exponent(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    return _fold(Pow(base, k))


def negate(e):
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        head = -e.factors[0].value
        if head == 1:
            return mul(*e.factors[1:])
        return Mul((Const(head),) + e.factors[1:])
    return mul(Const(-1), e)


def exp(arg):
    return _fold(Exp(arg))


# -- evaluation --------------------------------------------------------------

def evaluate(f, s, check=True):
    """Evaluate ``f`` at ``s`` (scalar or array) on the principal branch.

    With ``check=False`` division by zero and overflow propagate as inf/nan
    instead of raising, which is what vectorised sweeps want.
    """
    scalar = np.ndim(s) == 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if check:
            out = f._eval(s)
        else:
            try:
                out = f._eval(s)
            except PoleHit:
                out = _eval_unchecked(f, s)
    if check and not np.all(np.isfinite(out)):
        raise NonFiniteValue(f"non-finite value of {to_string(f)}")
    return complex(out) if scalar else np.asarray(out)


def _eval_unchecked(f, s):
    # pointwise fallback so one singular sample does not poison the array
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty(s.shape, dtype=complex)
    for i, si in np.ndenumerate(s):
        try:
            out[i] = complex(f._eval(si))
        except PoleHit:
            out[i] = complex(np.inf, np.nan)
    return out


def evaluate_mp(f, s):
    """Scalar evaluation in mpmath at the current ``mpmath.mp`` precision."""
    if isinstance(f, Const):
        return mpmath.mpc(f.value)
    if isinstance(f, Var):
        return mpmath.mpc(s)
    if isinstance(f, Add):
        return mpmath.fsum(evaluate_mp(t, s) for t in f.terms)
    if isinstance(f, Mul):
        out = mpmath.mpc(1)
        for c in f.factors:
            out *= evaluate_mp(c, s)
        return out
    if isinstance(f, Div):
        d = evaluate_mp(f.den, s)
        if d == 0:
            raise PoleHit("pole hit: denominator vanishes")
        return evaluate_mp(f.num, s) / d
    if isinstance(f, Pow):
        z = evaluate_mp(f.base, s)
        k = f.exponent
        if _is_int(k):
            if z == 0 and k < 0:
                raise PoleHit("pole hit: negative power of a vanishing base")
            return z ** int(k)
        if z == 0:
            if k < 0:
                raise PoleHit("pole hit: singular power of a vanishing base")
            return mpmath.mpc(0)
        return mpmath.exp(mpmath.mpf(k.numerator) / k.denominator * mpmath.log(z))
    if isinstance(f, Exp):
        return mpmath.exp(evaluate_mp(f.arg, s))
    raise TypeError(f"not an expression node: {f!r}")


def derivative(f):
    """Symbolic d/ds of ``f``; constants are folded, zero terms dropped."""
    return f._diff()


# -- canonical printer -------------------------------------------------------

def _num(x):
    r = repr(float(x))
    return r


def _const_str(v, context):
    if v.imag == 0:
        text = _num(v.real)
        if v.real < 0 or (v.real == 0 and np.signbit(v.real)):
            return f"({text})"
        return text
    im = f"{_num(abs(v.imag))}*j"
    if v.real == 0:
        sign = "-" if v.imag < 0 else ""
        return f"({sign}{im})"
    sign = "-" if v.imag < 0 else "+"
    return f"({_num(v.real)} {sign} {im})"


def _exp_str(k):
    if _is_int(k):
        return str(k.numerator) if k >= 0 else f"({k.numerator})"
    return f"({k.numerator}/{k.denominator})"


def _negative_lead(t):
    if isinstance(t, Const):
        return t.value.imag == 0 and t.value.real < 0
    return (isinstance(t, Mul) and isinstance(t.factors[0], Const)
            and t.factors[0].value.imag == 0 and t.factors[0].value.real < 0)


def to_string(f):
    """Deterministic, fully re-parseable rendering of ``f``."""
    if isinstance(f, Const):
        return _const_str(f.value, None)
    if isinstance(f, Var):
        return "s"
    if isinstance(f, Add):
        out = []
        for i, t in enumerate(f.terms):
            if _negative_lead(t):
                body = to_string(negate(t)) if not isinstance(t, Mul) else _term_str(negate(t))
                out.append(("-" if i == 0 else " - ") + body)
            else:
                out.append(("" if i == 0 else " + ") + _term_str(t))
        return "".join(out)
    if isinstance(f, Mul):
        parts = []
        for i, c in enumerate(f.factors):
            if isinstance(c, (Add, Div)) or (isinstance(c, Mul)):
                parts.append(f"({to_string(c)})")
            else:
                parts.append(to_string(c))
        return "*".join(parts)
    if isinstance(f, Div):
        num = to_string(f.num)
        if isinstance(f.num, Add):
            num = f"({num})"
        den = to_string(f.den)
        if isinstance(f.den, (Add, Mul, Div)):
            den = f"({den})"
        return f"{num}/{den}"
    if isinstance(f, Pow):
        base = to_string(f.base)
        if not isinstance(f.base, (Var, Exp)):
            if not (isinstance(f.base, Const) and base[0] == "("):
                base = f"({base})"
        return f"{base}^{_exp_str(f.exponent)}"
    if isinstance(f, Exp):
        return f"exp({to_string(f.arg)})"
    raise TypeError(f"not an expression node: {f!r}")


def _term_str(t):
    if isinstance(t, Add):
        return f"({to_string(t)})"
    return to_string(t)


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, constants):
        self.tokens = _tokenize(text)
        self.i = 0
        self.constants = constants

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self, value=None):
        kind, text, pos = self.tok
        if value is not None and text != value:
            what = text or "end of input"
            raise ExprSyntaxError(f"expected {value!r}, found {what!r}", pos)
        self.i += 1
        return kind, text, pos

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = add(node, rhs if op == "+" else negate(rhs))
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                node = mul(node, rhs)
            else:
                if isinstance(rhs, Const) and rhs.value == 0:
                    raise ExprSyntaxError("division by literal zero", self.tok[2])
                node = div(node, rhs)
        return node

    def unary(self):
        if self.tok[1] == "-":
            self.take()
            return negate(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.tok[1] == "^":
            self.take()
            node = power(node, self.exponent())
        return node

    def _number(self):
        kind, text, pos = self.tok
        if kind != "num":
            raise ExprSyntaxError("exponent must be a real literal", pos)
        self.take()
        return Fraction(text)

    def exponent(self):
        if self.tok[1] == "(":
            self.take()
            sign = -1 if self.tok[1] == "-" and self.take() else 1
            k = self._number()
            if self.tok[1] == "/":
                self.take()
                d = self._number()
                if d == 0:
                    raise ExprSyntaxError("zero denominator in exponent", self.tok[2])
                k = k / d
            self.take(")")
            return sign * k
        if self.tok[1] == "-":
            self.take()
            return -self._number()
        return self._number()

    def atom(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.take()
            return Const(float(text))
        if kind == "name":
            self.take()
            if text == "s":
                return S
            if text == "j":
                return Const(1j)
            if text == "exp":
                self.take("(")
                arg = self.expr()
                self.take(")")
                return exp(arg)
            if text in self.constants:
                return Const(complex(self.constants[text]))
            raise ExprSyntaxError(f"unbound name {text!r}", pos)
        if text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        what = text or "end of input"
        raise ExprSyntaxError(f"unexpected {what!r}", pos)


def parse(text, constants=None):
    """Parse ``text`` into an expression tree.

    >>> to_string(parse("K/(s^1.5*(s+1))", {"K": 1.0}))
    '1.0/(s^(3/2)*(s + 1.0))'
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    p = _Parser(text, dict(constants or {}))
    node = p.expr()
    kind, tok, pos = p.tok
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {tok!r}", pos)
    return node


# -- structural queries -------------------------------------------------------

def has_real_coefficients(f):
    return all(n.value.imag == 0 for n in f.walk() if isinstance(n, Const))


def branch_powers(f):
    """All power nodes with a non-integer exponent (candidate branch points)."""
    return [n for n in f.walk() if isinstance(n, Pow) and not _is_int(n.exponent)]


def split_fraction(f):
    """Rewrite ``f`` as ``num/den`` with division-free ``num`` and ``den``.

    Non-integer powers and ``exp`` nodes are kept as opaque atoms, so the
    zeros of ``den`` in the right half-plane are the candidate poles of ``f``.
    """
    if isinstance(f, (Const, Var, Exp)):
        return f, ONE
    if isinstance(f, Add):
        num, den = split_fraction(f.terms[0])
        for t in f.terms[1:]:
            n2, d2 = split_fraction(t)
            if den == d2:
                num = add(num, n2)
            else:
                num, den = add(mul(num, d2), mul(n2, den)), mul(den, d2)
        return num, den
    if isinstance(f, Mul):
        nums, dens = zip(*(split_fraction(c) for c in f.factors))
        return mul(*nums), mul(*dens)
    if isinstance(f, Div):
        n1, d1 = split_fraction(f.num)
        n2, d2 = split_fraction(f.den)
        return mul(n1, d2), mul(d1, n2)
    if isinstance(f, Pow):
        k = f.exponent
        if _is_int(k):
            n, d = split_fraction(f.base)
            m = int(k)
            if m > 0:
                return power(n, m), power(d, m)
            return power(d, -m), power(n, -m)
        if k > 0:
            return f, ONE
        return ONE, power(f.base, -k)
    raise TypeError(f"not an expression node: {f!r}")
