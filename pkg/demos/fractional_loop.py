"""Walk through the loop K/(s^(3/2)(s+1)) for three gains.

Run:  python3 demos/fractional_loop.py
"""

import math

import numpy as np

from irrstab import expr as ex
from irrstab import nyquist as nq
from irrstab import singularities as sg
from irrstab import stability as st

for K in (1.0, 2.0, math.sqrt(2)):
    f = ex.parse("K/(s^(3/2)*(s+1))", {"K": K})
    print(f"\n=== K = {K:.6g}:  F(s) = {ex.to_string(f)}")

    # the origin is a branch point; estimate its expansion from F itself
    inv = sg.build_inventory(f, [sg.Declaration(0, auto=True, n_terms=3)])
    (bp,) = inv.imaginary_branch_points
    terms = ", ".join(f"{c.real:+.6f} s^{float(k):g}" for k, c in bp.expansion.terms)
    print(f"expansion at 0: {terms}  ->  {bp.cls}")
    print(f"B_o,j = {float(sg.branch_number([bp])):g}, P_o+ = {inv.P_plus}")

    a3 = sg.check_A3(f, 0.5)
    print(f"A3: pass={a3.passed}, K estimate {a3.K.real:g}")

    z = ex.evaluate(f, 1j)
    print(f"locus crosses the negative real axis at F(j) = {z.real:.12f}")

    openr = st.assess_open_loop(inv, a3)
    closed = st.assess_closed_loop(inv, f, a3)
    v = nq.nyquist_verdict(f, inv)
    print(f"open loop:   {openr.verdict}")
    print(f"closed loop: {closed.verdict}  (P_cl+ = {closed.P_plus}, P_cl,j = {closed.P_j}, "
          f"B_cl,j = {closed.B_j:g})")
    print(f"sweep: measured {v.measured_delta / np.pi:+.6f} pi, required "
          f"{v.required_delta / np.pi:+.6f} pi, extrapolated "
          f"{v.sweep.extrapolated_delta / np.pi:+.6f} pi")
    print(f"residual decomposition: {v.decomposition}")
    for p in v.sweep.punctures:
        print(f"  puncture at omega = {p.omega:+.9f} ({p.origin}), "
              f"limit phases {p.phase(-1) / np.pi:+.3f} pi / {p.phase(+1) / np.pi:+.3f} pi")

# increments on small right semicircles, closed form against quadrature
print("\n=== semicircle increments")
for label, f, b, rec_or_order in [
    ("polar branch point at 0", ex.parse("1/(s^(3/2)*(s+1))"), 0, None),
    ("pole of 1/(s^2+1) at j", ex.parse("1/(s^2+1)"), 1j, None),
    ("zero of 1+F at j, K = sqrt 2", ex.parse("1.4142135623730951/(s^(3/2)*(s+1))"), 1j, 1),
]:
    if rec_or_order is None:
        closed_form = nq.semicircle_increment(expansion=sg.estimate_expansion(f, b, 2))
    else:
        closed_form = nq.semicircle_increment(zero_order=rec_or_order)
    num = nq.verify_semicircle_numeric(f, b)
    print(f"{label:32s} closed form {closed_form / np.pi:+.4f} pi, "
          f"quadrature {num['value'] / np.pi:+.6f} pi")
