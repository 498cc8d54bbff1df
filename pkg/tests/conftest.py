"""Independent brute-force oracles shared by the tests.

Nothing here goes through the closed-form code paths it is used to check:
gauges come from the full signed-permutation orbit of every row, derivatives
from the active members of that orbit, vertices from an H-representation
brute force.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest


def signed_orbit(row):
    n = len(row)
    seen = set()
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            v = tuple(s * row[p] for s, p in zip(signs, perm))
            if v not in seen:
                seen.add(v)
                yield v


def dual_functionals(body):
    out = []
    for row in body.weights:
        out.extend(signed_orbit(row))
    return sorted(set(out))


def oracle_norm(body, x):
    return max(sum(a * b for a, b in zip(v, x)) for v in dual_functionals(body))


def oracle_derivative(body, x, y):
    """max <v, y> over dual functionals active at x (Danskin)."""
    funcs = dual_functionals(body)
    vals = [sum(a * b for a, b in zip(v, x)) for v in funcs]
    top = max(vals)
    return max(sum(a * b for a, b in zip(v, y)) for v, val in zip(funcs, vals) if val == top)


def oracle_vertices(body):
    """Vertices of {x : <v, x> <= 1 for all dual functionals v} by brute force."""
    funcs = dual_functionals(body)
    n = body.n
    a = np.array([[float(t) for t in v] for v in funcs])
    found = set()
    for rows in itertools.combinations(range(len(funcs)), n):
        m = a[list(rows)]
        if abs(np.linalg.det(m)) < 1e-9:
            continue
        sol = np.linalg.solve(m, np.ones(n))
        x = tuple(Fraction(float(s)).limit_denominator(1000) for s in sol)
        if x in found:
            continue
        vals = [sum(p * q for p, q in zip(v, x)) for v in funcs]
        if max(vals) != 1:
            continue
        tight = [v for v, val in zip(funcs, vals) if val == 1]
        if np.linalg.matrix_rank(np.array([[float(t) for t in v] for v in tight])) == n:
            found.add(x)
    return sorted(found)


def brute_trial_prob(n, k):
    """Average over all C(n, 2k-1) * 2^n equally likely (support, sign) outcomes."""
    y_support = tuple(range(k))
    y_signs = tuple((-1) ** i for i in range(k))
    hits = total = 0
    for support in itertools.combinations(range(n), 2 * k - 1):
        for signs in itertools.product((-1, 1), repeat=n):
            total += 1
            if set(y_support) <= set(support) and all(signs[i] == s for i, s in zip(y_support, y_signs)):
                hits += 1
    return Fraction(hits, total)


@pytest.fixture
def tmp_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


# -- acceptance reporting -------------------------------------------------------

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
