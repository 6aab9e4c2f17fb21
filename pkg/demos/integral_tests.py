"""SR versus BIBO on sampled impulse responses.

(2/pi) sin(t)/t integrates to 1 but not absolutely; (t+1)^-1.5 is absolutely
integrable but decays too slowly for any exponential envelope.

Run:  python3 demos/integral_tests.py
"""

import numpy as np

from irrstab.laplace import SampledSignal
from irrstab.stability import integral_tests

t = np.unique(np.concatenate([np.geomspace(1e-6, 10, 400), np.arange(10, 1e6 + 0.1, 0.25)]))
signals = {
    "(2/pi) sin(t)/t": 2 / np.pi * np.sinc(t / np.pi),
    "(t+1)^-1.5": (t + 1) ** -1.5,
    "exp(-t)": np.exp(-t),
}
for name, g in signals.items():
    r = integral_tests(SampledSignal(t, g, grid="mixed"))
    print(f"{name:18s} SR={r.sr!s:5s} BIBO={r.bibo!s:5s} beta-exp(0)={r.beta_exp!s:5s} "
          f"int g={r.values['int_g']}  tail p={r.fit.p}")
    for n in r.notes:
        print("    ", n)
