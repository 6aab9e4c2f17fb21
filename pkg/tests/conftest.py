import glob
import os

import numpy as np
import pytest

from irrstab import expr as ex

CORPUS = os.path.join(os.path.dirname(__file__), os.pardir, "src", "irrstab", "corpus")


def corpus_paths():
    return sorted(glob.glob(os.path.join(CORPUS, "*.json")))


def random_expr(rng, depth=3):
    """Random expression over s with real or complex constants."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return ex.S
        c = complex(rng.uniform(0.2, 3.0) * rng.choice([-1, 1]),
                    rng.uniform(-1, 1) if rng.random() < 0.3 else 0.0)
        return ex.Const(c)
    op = rng.choice(["add", "mul", "div", "pow", "exp"], p=[0.3, 0.3, 0.2, 0.15, 0.05])
    if op == "add":
        return ex.add(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == "mul":
        return ex.mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == "div":
        return ex.div(random_expr(rng, depth - 1),
                      ex.add(random_expr(rng, depth - 1), ex.Const(rng.uniform(1, 3))))
    if op == "pow":
        k = rng.choice(["1/2", "3/2", "-1/2", "2", "-1", "1/3", "5/4"])
        return ex.power(ex.add(random_expr(rng, depth - 1), ex.Const(rng.uniform(0.5, 2))), k)
    return ex.exp(ex.mul(ex.Const(-0.3), random_expr(rng, depth - 1)))


def near_cut(f, s, margin=0.1):
    """True when some power base at ``s`` is close to its cut or to zero."""
    for node in ex.branch_powers(f):
        try:
            z = complex(ex.evaluate(node.base, s))
        except ex.EvaluationError:
            return True
        if abs(z) < 1e-3 or abs(np.angle(z)) > np.pi - margin:
            return True
    return False


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
