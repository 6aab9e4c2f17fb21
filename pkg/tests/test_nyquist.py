import csv
import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from irrstab import expr as ex
from irrstab import nyquist as nq
from irrstab import singularities as sg
from irrstab.asymptotics import AsymExpansion as AE

PI = math.pi


def loop(K=1.0):
    return ex.parse("K/(s^(3/2)*(s+1))", {"K": K})


def loop_inventory(K=1.0):
    f = loop(K)
    return f, sg.build_inventory(f, [sg.Declaration(0, auto=True, n_terms=3)])


def sweep_for(f, inv, eps=1e-3, omega_max=None):
    records = inv.imaginary_branch_points + [r for r in inv.other_records if r.on_axis]
    om = omega_max or 1e3
    return nq.sweep_argument(f, nq.collect_punctures(f, records, om), om, eps)


@pytest.mark.parametrize("K,expected", [(1.0, 1.5), (2.0, -2.5), (math.sqrt(2), -0.5)])
def test_sweep_fractional_loop(K, expected):
    f, inv = loop_inventory(K)
    sw = sweep_for(f, inv)
    assert abs(sw.extrapolated_delta - expected * PI) < 1e-3
    assert abs(sw.total_delta - expected * PI) < 1e-3
    assert all(s.max_step < PI / 2 for s in sw.segments)


def test_sweep_first_order_no_punctures():
    sw = nq.sweep_argument(ex.parse("1/(s+1)"), [], 1e3)
    assert abs(sw.total_delta) < 1e-9 and sw.punctures == []


def test_limit_phases_at_origin():
    assert nq.limit_phase(1, Fr(-3, 2), +1) == pytest.approx(-3 * PI / 4)
    assert nq.limit_phase(1, Fr(-3, 2), -1) == pytest.approx(3 * PI / 4)
    f, inv = loop_inventory()
    (p,) = nq.collect_punctures(f, inv.imaginary_branch_points, 1e3)
    assert p.phase(+1) == pytest.approx(-3 * PI / 4, abs=1e-9)
    assert p.phase(-1) == pytest.approx(3 * PI / 4, abs=1e-9)
    # the sampled phase of 1 + F near 0 approaches the limits
    for side in (+1, -1):
        v = 1 + ex.evaluate(f, 1j * side * 1e-8)
        assert np.angle(v) == pytest.approx(p.phase(side), abs=1e-3)


def test_boundary_gain_punctures_at_unit_frequency():
    f, inv = loop_inventory(math.sqrt(2))
    ps = nq.collect_punctures(f, inv.imaginary_branch_points, 1e3)
    zeros = [p for p in ps if p.origin == "zero of 1+F"]
    assert [round(p.omega, 9) for p in zeros] == [-1.0, 1.0]
    assert all(p.kappa == 1 and p.multiplicity == 1 for p in zeros)


def test_sweep_errors():
    f, inv = loop_inventory()
    ps = nq.collect_punctures(f, inv.imaginary_branch_points, 1e3)
    with pytest.raises(nq.OmegaTooSmall):
        nq.sweep_argument(f, ps, omega_max=5.0)
    with pytest.raises(nq.OmegaTooSmall):
        nq.sweep_argument(ex.parse("1/(s^0.5+1)"), [], omega_max=100.0)
    # 1/(s^2+1) swept without declaring its poles at +-j
    with pytest.raises(nq.SweepError):
        nq.sweep_argument(ex.parse("1/(s^2+1)"), [], omega_max=1e3)


def test_conjugate_symmetry_of_sweep():
    for K in (1.0, 2.0, math.sqrt(2)):
        f, inv = loop_inventory(K)
        sw = sweep_for(f, inv)
        neg = sum(s.change for s in sw.segments if s.hi <= 0)
        pos = sum(s.change for s in sw.segments if s.lo >= 0)
        assert neg == pytest.approx(pos, abs=1e-9)
        assert neg + pos == pytest.approx(sw.total_delta, abs=1e-12)


def test_eps_stability():
    f, inv = loop_inventory()
    a = sweep_for(f, inv, eps=1e-3)
    b = sweep_for(f, inv, eps=5e-4)
    assert abs(a.total_delta - b.total_delta) < 1e-3
    assert abs(a.raw_totals[0] - a.raw_totals[1]) < 1e-3


# -- semicircles ---------------------------------------------------------------------

def _rec(*terms, b=0):
    return sg.SingularityRecord.from_expansion(AE(b, tuple(terms)))


def test_semicircle_closed_forms():
    assert nq.semicircle_increment(_rec((-2, 1), (0, 3))) == pytest.approx(-2 * PI)
    assert nq.semicircle_increment(_rec((Fr(-3, 2), 1))) == pytest.approx(-1.5 * PI)
    assert nq.semicircle_increment(_rec((0, 2), (Fr(1, 2), 1))) == 0
    assert nq.semicircle_increment(_rec((0, -1), (Fr(1, 2), 3))) == pytest.approx(0.5 * PI)
    assert nq.semicircle_increment(_rec((Fr(1, 2), 1))) == 0
    assert nq.semicircle_increment(zero_order=2) == pytest.approx(2 * PI)
    with pytest.raises(sg.TruncationFailure):
        nq.semicircle_increment(expansion=AE(0, ((0, -1),), Fr(1, 2)))


SEMICIRCLE_CASES = [
    # (expression, location, closed-form increment)
    ("1/(s^2+1)", 1j, -PI),                                 # pole, k = 1
    ("1/((s^2+1)^2)", 1j, -2 * PI),                         # pole, k = 2
    ("1/(s^(3/2)*(s+1))", 0, -1.5 * PI),                    # polar branch point
    ("s^0.5", 0, 0.0),                                      # regular, kappa0 > 0
    ("(2 + s^0.5)/(s+1)", 0, 0.0),                          # regular, c0 != -1
    ("(s^0.5 - 1)/(s+1)^2", 0, 0.5 * PI),                   # regular, c0 = -1
    ("1.4142135623730951/(s^(3/2)*(s+1))", 1j, PI),         # zero of 1 + F
]


@pytest.mark.parametrize("text,b,want", SEMICIRCLE_CASES)
def test_semicircle_numeric_matches_closed_form(text, b, want):
    f = ex.parse(text)
    got = nq.verify_semicircle_numeric(f, b)["value"]
    assert abs(got - want) < 2e-2
    if not (text.startswith("1.414")):
        est = sg.estimate_expansion(f, b, n_terms=2)
        assert abs(nq.semicircle_increment(expansion=est) - want) < 1e-9


# -- verdicts ---------------------------------------------------------------------------

def test_verdict_k1():
    f, inv = loop_inventory()
    v = nq.nyquist_verdict(f, inv)
    assert v.required_delta == pytest.approx(1.5 * PI)
    assert v.stable and abs(v.residual) < 1e-3


def test_verdict_k2_decomposition():
    f, inv = loop_inventory(2.0)
    v = nq.nyquist_verdict(f, inv)
    assert not v.stable
    assert v.residual == pytest.approx(-4 * PI, abs=1e-2)
    assert v.decomposition["P_cl_plus"] == 2 and v.decomposition["consistent"]


def test_verdict_boundary_gain():
    f, inv = loop_inventory(math.sqrt(2))
    v = nq.nyquist_verdict(f, inv)
    assert not v.stable
    d = v.decomposition
    assert (d["P_cl_plus"], d["P_cl_j"], d["B_cl_j"]) == (0, 2, 0.0)


def test_verdict_first_order():
    f = ex.parse("1/(s+1)")
    inv = sg.build_inventory(f, [])
    v = nq.nyquist_verdict(f, inv)
    assert v.stable and v.required_delta == 0 and abs(v.measured_delta) < 1e-9


def test_verdict_json_shape():
    f, inv = loop_inventory()
    d = nq.nyquist_verdict(f, inv).to_dict()
    assert {"measured", "required", "stable", "residual", "decomposition"} <= set(d)


# -- plot data ----------------------------------------------------------------------------

def test_export_examples(tmp_path):
    f = loop()
    w = np.array([-1.0, 0.0, 1.0, 1e3])
    rows, skipped = nq.export_nyquist_data(f, w)
    assert skipped == [0.0]
    by_w = {r[0]: r for r in rows}
    assert by_w[1.0][1] == pytest.approx(-1 / math.sqrt(2), rel=1e-12)
    assert abs(by_w[1.0][2]) < 1e-15
    assert by_w[-1.0][1] == pytest.approx(-1 / math.sqrt(2), rel=1e-12)
    assert math.hypot(*by_w[1e3][1:]) <= 1.1 / 1e3 ** 2
    path = tmp_path / "n.csv"
    nq.write_nyquist_csv(path, rows)
    data = list(csv.reader(path.open()))
    assert data[0] == ["omega", "re", "im"] and len(data) == 4
    assert float(data[2][1]) == by_w[1.0][1]


def test_export_large_omega_decay():
    f = loop(3.0)
    w = np.geomspace(10, 1e5, 50)
    rows, _ = nq.export_nyquist_data(f, w)
    for om, re_, im_ in rows:
        assert math.hypot(re_, im_) <= 1.1 * 3.0 / om ** 2
