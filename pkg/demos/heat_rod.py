"""Heat conduction in a rod: F(s) = sinh(x sqrt s)/sinh(sqrt s), x = 0.5.

The square roots cancel in the ratio, so s = 0 is only an apparent branch
point.  Poles sit at s = -k^2 pi^2 on the negative real axis.

Run:  python3 demos/heat_rod.py
"""

import numpy as np

from irrstab import expr as ex
from irrstab import laplace as lp
from irrstab import singularities as sg
from irrstab import stability as st

x = 0.5
f = ex.parse("(exp(s^0.5*x) - exp(-(s^0.5)*x))/(exp(s^0.5) - exp(-(s^0.5)))", {"x": x})

rec = sg.record_from_point(f, 0, n_terms=3)
print("class at s = 0:", rec.cls)
for k, c in rec.expansion.terms:
    print(f"  s^{float(k):g}: {c.real:+.10f}")
print("expected c0 = x =", x, " c1 = x(x^2-1)/6 =", x * (x * x - 1) / 6)

poles = [sg.Declaration(-(k * np.pi) ** 2, pole_order=1) for k in (1, 2, 3)]
inv = sg.build_inventory(f, [sg.Declaration(0, auto=True)] + poles)
a3 = sg.check_A3(f, 0.5)
rep = st.assess_open_loop(inv, a3)
print("open loop:", rep.verdict, f"(P+ = {rep.P_plus}, P_j = {rep.P_j})")

# the impulse response at the rod midpoint, from the Bromwich integral
t = np.array([0.02, 0.05, 0.1, 0.2, 0.5, 1.0])
sig = lp.invert(f, t)
# eigenfunction series: 2 pi sum (-1)^(k+1) k sin(k pi x) exp(-k^2 pi^2 t)
k = np.arange(1, 200)[:, None]
series = 2 * np.pi * np.sum((-1.0) ** (k + 1) * k * np.sin(k * np.pi * x)
                            * np.exp(-(k * np.pi) ** 2 * t), axis=0)
for ti, g, s in zip(t, sig.values, series):
    print(f"t = {ti:5.2f}  inverted {g:+.10f}  series {s:+.10f}")
