import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irrstab import expr as ex

from conftest import near_cut, random_expr


def test_parse_example_loop():
    f = ex.parse("K/(s^1.5*(s+1))", {"K": 1.0})
    pows = ex.branch_powers(f)
    assert len(pows) == 1 and float(pows[0].exponent) == 1.5
    assert ex.to_string(f) == "1.0/(s^(3/2)*(s + 1.0))"


def test_parse_variable_and_shifted_power():
    assert ex.parse("s") == ex.S
    f = ex.parse("(s - j*2)^0.5")
    (p,) = ex.branch_powers(f)
    assert ex.evaluate(p.base, 0) == pytest.approx(-2j)


@pytest.mark.parametrize("text", ["", "   ", "s+", "s^t", "(s", "s)", "q*s", "s^(1/0)"])
def test_parse_errors(text):
    with pytest.raises(ex.ExprSyntaxError):
        ex.parse(text)


def test_syntax_error_has_position():
    with pytest.raises(ex.ExprSyntaxError) as e:
        ex.parse("s + * 2")
    assert e.value.position == 4


@pytest.mark.parametrize("text", [
    "K/(s^1.5*(s+1))", "(s - j*2)^0.5", "exp(-2*s)/(s+1)", "1/(s^2+1)",
    "(s^0.5 - 1)/(s+1)^2", "-s^(1/3) + 2*s - 3", "s/(s - 1)/(s + 2)",
])
def test_round_trip(text):
    f = ex.parse(text, {"K": 2.0})
    g = ex.parse(ex.to_string(f))
    assert ex.to_string(g) == ex.to_string(f)
    for s in (0.3 + 0.7j, 2.0 - 1j, 5j + 0.01):
        assert ex.evaluate(g, s) == pytest.approx(ex.evaluate(f, s), rel=1e-14)


def test_eval_examples():
    assert ex.evaluate(ex.parse("s^1.5"), 1j) == pytest.approx(cmath.exp(0.75j * math.pi), rel=1e-15)
    assert ex.evaluate(ex.parse("1/(s^1.5*(s+1))"), 1j) == pytest.approx(-1 / math.sqrt(2), rel=1e-15)
    assert ex.evaluate(ex.parse("1/(s+1)"), 0) == 1


def test_eval_errors():
    with pytest.raises(ex.PoleHit):
        ex.evaluate(ex.parse("1/(s+1)"), -1)
    with pytest.raises(ex.NonFiniteValue):
        ex.evaluate(ex.parse("exp(s)"), 1000)


def test_eval_unchecked_array():
    v = ex.evaluate(ex.parse("1/(s+1)"), np.array([0.0, -1.0, 1.0]), check=False)
    assert v[0] == 1 and not np.isfinite(v[1]) and v[2] == 0.5


def test_cut_runs_left_of_branch_point():
    f = ex.parse("(s - 2*j)^0.5")
    above = ex.evaluate(f, -1 + 2j + 1e-12j)
    below = ex.evaluate(f, -1 + 2j - 1e-12j)
    assert above == pytest.approx(1j, abs=1e-6) and below == pytest.approx(-1j, abs=1e-6)
    # no jump across the horizontal line to the right of the branch point
    assert ex.evaluate(f, 1 + 2.000001j) == pytest.approx(ex.evaluate(f, 1 + 1.999999j), abs=1e-5)


def test_derivative_examples():
    assert ex.evaluate(ex.derivative(ex.parse("s^1.5")), 1) == pytest.approx(1.5)
    assert ex.evaluate(ex.derivative(ex.parse("1/(s+1)")), 0) == pytest.approx(-1)
    f = ex.parse("K/(s^1.5*(s+1))", {"K": 1.0})
    h = 1e-6 * 3
    fd = (ex.evaluate_mp(f, 2 + h) - ex.evaluate_mp(f, 2 - h)) / (2 * h)
    assert ex.evaluate(ex.derivative(f), 2) == pytest.approx(complex(fd), rel=1e-6)


def _central_difference(f, s):
    h = 1e-6 * (1 + abs(s))
    with mpmath.workdps(40):
        d = (ex.evaluate_mp(f, s + h) - ex.evaluate_mp(f, s - h)) / (2 * h)
    return complex(d)


def test_derivative_vs_finite_difference_100(rng):
    done = 0
    while done < 100:
        f = random_expr(rng)
        s = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if near_cut(f, s) or near_cut(f, s + 1e-6 * (1 + abs(s))) or near_cut(f, s - 1e-6 * (1 + abs(s))):
            continue
        try:
            exact = ex.evaluate(ex.derivative(f), s)
            fd = _central_difference(f, s)
        except ex.EvaluationError:
            continue
        scale = max(abs(exact), abs(ex.evaluate(f, s)), 1e-300)
        assert abs(exact - fd) <= 1e-6 * max(abs(exact), 1e-3 * scale), (ex.to_string(f), s)
        done += 1


def test_evaluate_mp_matches_float(rng):
    for _ in range(50):
        f = random_expr(rng)
        s = complex(rng.uniform(0.1, 2), rng.uniform(-2, 2))
        try:
            v = ex.evaluate(f, s)
        except ex.EvaluationError:
            continue
        assert complex(ex.evaluate_mp(f, s)) == pytest.approx(v, rel=1e-10, abs=1e-12)


def test_has_real_coefficients():
    assert ex.has_real_coefficients(ex.parse("2/(s^0.5+1)"))
    assert not ex.has_real_coefficients(ex.parse("(s - j*2)^0.5"))


def test_split_fraction_value():
    f = ex.parse("1/(s^1.5*(s+1)) + 2/(s-3)")
    num, den = ex.split_fraction(f)
    for s in (0.5 + 1j, 2 - 3j):
        assert ex.evaluate(num, s) / ex.evaluate(den, s) == pytest.approx(ex.evaluate(f, s), rel=1e-12)


def test_constants_fold():
    assert ex.parse("2*3 + 1") == ex.Const(7)
    assert ex.mul(ex.ZERO, ex.S) == ex.ZERO
    assert ex.add(ex.S, ex.ZERO) == ex.S


finite = st.floats(min_value=-5, max_value=5, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.05, 5), y=finite, dx=st.floats(-1e-7, 1e-7), dy=st.floats(-1e-7, 1e-7))
def test_principal_branch_continuity(x, y, dx, dy):
    f = ex.parse("(s - 1)^(2/3) * (s + 2)^0.5")
    s = complex(x + 1, y)
    a, b = ex.evaluate(f, s), ex.evaluate(f, s + complex(dx, dy))
    assert abs(a - b) <= 1e-5 * (1 + abs(a))


@settings(max_examples=200, deadline=None)
@given(x=finite, y=st.floats(0.01, 5), seed=st.integers(0, 10_000))
def test_conjugate_symmetry(x, y, seed):
    rng = np.random.default_rng(seed)
    f = random_expr(rng)
    while not ex.has_real_coefficients(f):
        f = random_expr(rng)
    s = complex(x, y)
    try:
        a, b = ex.evaluate(f, s), ex.evaluate(f, s.conjugate())
    except ex.EvaluationError:
        return
    if near_cut(f, s):
        return
    assert b == pytest.approx(a.conjugate(), rel=1e-12, abs=1e-12)
