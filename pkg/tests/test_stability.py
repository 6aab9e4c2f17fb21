import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irrstab import expr as ex
from irrstab import singularities as sg
from irrstab import stability as st_
from irrstab.analysis import analyze
from irrstab.asymptotics import AsymExpansion as AE, Kind
from irrstab.laplace import SampledSignal
from irrstab.manifest import load_manifest

from conftest import corpus_paths

SQPI = math.sqrt(math.pi)
A3_OK = sg.A3Result(K=0j, passed=True, rays={}, failing=[], notes=[])


def loop(K=1.0):
    return ex.parse("K/(s^(3/2)*(s+1))", {"K": K})


def inventory(f, *decls, **kw):
    return sg.build_inventory(f, list(decls), **kw)


# -- open loop ---------------------------------------------------------------------

def test_open_loop_fractional_loop_unstable():
    f = loop()
    r = st_.assess_open_loop(inventory(f, sg.Declaration(0, auto=True)), sg.check_A3(f))
    assert r.verdict == st_.UNSTABLE and r.B_j == 1.5 and r.P_plus == 0


def test_open_loop_regular_branch_point_stable():
    rec = sg.SingularityRecord.from_expansion(AE(0, ((0, 2), (Fr(1, 2), -2 * SQPI))))
    inv = sg.SingularityInventory(imaginary_branch_points=[rec])
    r = st_.assess_open_loop(inv, A3_OK)
    assert r.verdict == st_.STABLE and r.kappa_star == 0.5
    assert r.dominant.p == 1.5 and r.dominant.coeff == pytest.approx(1, rel=1e-14)
    assert any("t**-1.5" in n for n in r.notes)


def test_open_loop_rhp_pole():
    f = ex.parse("1/(s-1)")
    r = st_.assess_open_loop(inventory(f), sg.check_A3(f))
    assert r.verdict == st_.UNSTABLE and r.P_plus == 1


def test_open_loop_axis_pole():
    f = ex.parse("1/(s^2+1)")
    inv = inventory(f, sg.Declaration(1j, pole_order=1), sg.Declaration(-1j, pole_order=1))
    r = st_.assess_open_loop(inv, sg.check_A3(f))
    assert r.verdict == st_.UNSTABLE and r.P_j == 2


def test_open_loop_out_of_class():
    f = ex.parse("exp(-s)/(s+1)")
    r = st_.assess_open_loop(inventory(f, count_poles=False), sg.check_A3(f))
    assert r.verdict == st_.OUT_OF_CLASS
    inv = sg.SingularityInventory(out_of_class=[(0j, "not algebraic-type")])
    assert st_.assess_open_loop(inv, A3_OK).verdict == st_.OUT_OF_CLASS


# -- closed loop ---------------------------------------------------------------------

def test_closed_loop_k1_stable():
    f = loop()
    inv = inventory(f, sg.Declaration(0, auto=True))
    r = st_.assess_closed_loop(inv, f, sg.check_A3(f))
    assert r.verdict == st_.STABLE and r.P_plus == 0
    (rec,) = r.records
    assert rec.cls.kind is Kind.REGULAR_BRANCH
    k0, c0 = rec.expansion.leading
    assert k0 == 0 and abs(c0 - 1) < 1e-9


def test_closed_loop_k2_unstable():
    f = loop(2.0)
    r = st_.assess_closed_loop(inventory(f, sg.Declaration(0, auto=True)), f, sg.check_A3(f))
    assert r.verdict == st_.UNSTABLE and r.P_plus == 2


def test_closed_loop_case3_polar():
    rec = sg.SingularityRecord.from_expansion(AE(0, ((0, -1), (Fr(1, 2), 1))))
    (mapped,), poles = st_.closed_loop_records([rec])
    assert mapped.cls.kind is Kind.POLAR_BRANCH and poles == []
    f = ex.parse("(s^0.5 - 1)/(s+1)^2")
    inv = sg.SingularityInventory(imaginary_branch_points=[rec])
    r = st_.assess_closed_loop(inv, f, sg.check_A3(f, 0.25))
    assert r.verdict == st_.UNSTABLE and r.B_j == 0.5


def test_closed_loop_case3_integer_pole():
    rec = sg.SingularityRecord.from_expansion(AE(0, ((0, -1), (1, 2), (Fr(3, 2), 1))))
    _, poles = st_.closed_loop_records([rec])
    assert poles == [(0j, 1)]


def test_closed_loop_truncation_error_is_reported():
    rec = sg.SingularityRecord.from_expansion(AE(0, ((0, -1),), Fr(1, 2)))
    inv = sg.SingularityInventory(imaginary_branch_points=[rec])
    r = st_.assess_closed_loop(inv, ex.parse("1/(s+1)"), A3_OK, rhp_zero_count=0)
    assert r.verdict == st_.OUT_OF_CLASS and "insufficient" in r.notes[0]


def test_stable_reports_have_positive_kappa_star():
    for p in corpus_paths():
        rep = analyze(load_manifest(p))
        for role in ("open_loop", "closed_loop"):
            r = rep[role]
            if r and r["verdict"] == st_.STABLE and r["kappa_star"] is not None:
                assert r["kappa_star"] > 0
                # dominant decay term is t**-(kappa*+1)
                assert r["tail"][0]["p"] == pytest.approx(r["kappa_star"] + 1)


def test_corpus_criterion_matches_nyquist():
    for p in corpus_paths():
        m = load_manifest(p)
        rep = analyze(m)
        exp = m.expected
        assert rep["open_loop"]["verdict"] == exp["open"], m.name
        assert rep["closed_loop"]["verdict"] == exp["closed"], m.name
        assert rep["checks"]["verdicts_agree"], m.name
        assert (rep["closed_loop"]["verdict"] == st_.STABLE) == rep["nyquist"]["stable"]


# -- integral tests --------------------------------------------------------------------

@pytest.fixture(scope="module")
def long_grid():
    return np.unique(np.concatenate([np.geomspace(1e-6, 10, 400),
                                     np.arange(10, 1e6 + 0.1, 0.25)]))


def test_sinc_sr_not_bibo(long_grid):
    t = long_grid
    res = st_.integral_tests(SampledSignal(t, 2 / np.pi * np.sinc(t / np.pi), grid="mixed"))
    assert res.sr is True and res.bibo is False
    assert abs(res.values["int_g"] - 1) < 1e-2
    assert res.fit.p < 1


def test_power_tail_bibo_not_exponential(long_grid):
    t = long_grid
    res = st_.integral_tests(SampledSignal(t, (t + 1) ** -1.5, grid="mixed"))
    assert (res.sr, res.bibo, res.beta_exp) == (True, True, False)
    assert res.values["int_abs_g"] == pytest.approx(2, rel=1e-3)


def test_exponential_all_true():
    t = np.geomspace(1e-8, 60, 20000)
    res = st_.integral_tests(SampledSignal(t, np.exp(-t)))
    assert (res.sr, res.bibo, res.beta_exp) == (True, True, True)
    assert abs(res.values["int_g"] - 1) < 1e-6
    env = res.values["envelope"]
    assert env["a"] > 0 and env["M"] == pytest.approx(1, abs=1e-6)


def test_beta_exponential_respects_beta():
    t = np.geomspace(1e-6, 200, 5000)
    g = np.exp(-0.5 * t)
    assert st_.integral_tests(SampledSignal(t, g), beta=0.0).beta_exp is True
    assert st_.integral_tests(SampledSignal(t, g), beta=-1.0).beta_exp is False


def test_growing_signal_unstable():
    t = np.geomspace(1e-3, 1e4, 3000)
    res = st_.integral_tests(SampledSignal(t, np.sqrt(t)))
    assert res.bibo is False and res.sr is False


def test_short_grid_inconclusive():
    t = np.linspace(1, 5, 100)
    res = st_.integral_tests(SampledSignal(t, np.exp(-t)))
    assert res.sr is None and "inconclusive" in res.notes[0]


_SIGNALS = {
    "power": lambda t: (t + 1) ** -1.5,
    "exp": lambda t: np.exp(-t),
    "slow": lambda t: (t + 1) ** -0.5,
    "sinc": lambda t: np.sinc(t / np.pi),
}
_SHORT = np.unique(np.concatenate([np.geomspace(1e-4, 10, 200), np.arange(10, 2e4, 0.25)]))


@settings(max_examples=12, deadline=None)
@given(name=st.sampled_from(sorted(_SIGNALS)),
       c=st.floats(1e-3, 1e3) .map(float) | st.floats(-1e3, -1e-3))
def test_integral_tests_scale_invariant(name, c):
    g = _SIGNALS[name](_SHORT)
    a = st_.integral_tests(SampledSignal(_SHORT, g, grid="mixed"))
    b = st_.integral_tests(SampledSignal(_SHORT, c * g, grid="mixed"))
    assert (a.sr, a.bibo, a.beta_exp) == (b.sr, b.bibo, b.beta_exp)


def test_report_dict_round_trip():
    f = loop()
    r = st_.assess_open_loop(inventory(f, sg.Declaration(0, auto=True)), sg.check_A3(f))
    d = r.to_dict()
    assert d["verdict"] == st_.UNSTABLE and d["assumptions"]["A3_pass"]
    assert d["records"][0]["class"] == "polar-branch-point"
