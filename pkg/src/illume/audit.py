"""Batch property audits over a body: sign and ordering lemmas for normals,
the norm-implication bound, and the norm axioms."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bodies import SymBody, norm_eval, to_boundary
from .certify import enumerate_vertices, sample_boundary_points
from .directions import norm_implication_check
from .exceptions import LemmaViolation
from .randomized import DEFAULT_SEED
from .subdiff import extreme_subgradients, lp_gradient

__all__ = [
    "AuditRow",
    "run_audit",
    "lemma_audit",
    "norm_implication_audit",
    "norm_axiom_audit",
    "admissible_directions",
    "suite_bodies",
    "sign_violations",
    "ordering_violations",
]

FLOAT_TOL = 1e-12


@dataclass
class AuditRow:
    check: str
    samples: int = 0
    violations: int = 0

    def as_tuple(self):
        return (self.check, self.samples, self.violations)


def suite_bodies(n: int) -> dict[str, SymBody]:
    """The reference bodies used throughout the test-suite."""
    return {
        "cube": SymBody.cube(n),
        "ell1": SymBody.ell1(n),
        "topk2": SymBody.topk(n, 2),
        "topk3": SymBody.topk(n, 3),
        "cube_cap_l1(3/2)": SymBody.cube_cap_l1(n, Fraction(3, 2)),
        "cube_cap_l1(2)": SymBody.cube_cap_l1(n, 2),
        "cube_cap_l1(3)": SymBody.cube_cap_l1(n, 3),
    }


def sign_violations(x: Sequence, v: Sequence, tol=0) -> int:
    return sum(1 for a, b in zip(x, v) if a * b < -tol)


def ordering_violations(x: Sequence, v: Sequence, tol=0) -> int:
    bad = 0
    for (xi, vi), (xj, vj) in itertools.permutations(zip(x, v), 2):
        if abs(xi) > abs(xj) + tol and abs(vi) < abs(vj) - tol:
            bad += 1
    return bad


def _rand_int_vector(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> list[int]:
    while True:
        v = [rng.randint(lo, hi) for _ in range(n)]
        if any(v):
            return v


def lemma_audit(body: SymBody, samples: int, seed: int = DEFAULT_SEED, cap: int = 6) -> list[AuditRow]:
    """Sign and ordering lemmas on (boundary point, outer normal) pairs.

    Two independent routes for polyhedral bodies: enumerated extreme
    subgradients at random boundary points, and random functionals ``u``
    paired with the vertices maximizing them (so ``u`` is a normal there).
    """
    rng = random.Random(seed)
    rows = {name: AuditRow(name) for name in ("always_positive", "ordering", "normal_cone_sign", "normal_cone_ordering")}
    n = body.n
    if body.polyhedral:
        for _ in range(samples):
            x = to_boundary(body, _rand_int_vector(rng, n))
            for w in extreme_subgradients(body, x, limit=64):
                rows["always_positive"].samples += 1
                rows["ordering"].samples += 1
                rows["always_positive"].violations += sign_violations(x, w.v) > 0
                rows["ordering"].violations += ordering_violations(x, w.v) > 0
        if n <= cap:
            verts = enumerate_vertices(body, cap)
            for _ in range(samples):
                u = _rand_int_vector(rng, n, -5, 5)
                vals = [sum(a * b for a, b in zip(u, x)) for x in verts]
                top = max(vals)
                for x, val in zip(verts, vals):
                    if val == top:
                        rows["normal_cone_sign"].samples += 1
                        rows["normal_cone_ordering"].samples += 1
                        rows["normal_cone_sign"].violations += sign_violations(x, u) > 0
                        rows["normal_cone_ordering"].violations += ordering_violations(x, u) > 0
    else:
        for _ in range(samples):
            x = to_boundary(body, [rng.gauss(0, 1) for _ in range(n)])
            v = lp_gradient(body, x)
            rows["always_positive"].samples += 1
            rows["ordering"].samples += 1
            rows["always_positive"].violations += sign_violations(x, v, FLOAT_TOL) > 0
            rows["ordering"].violations += ordering_violations(x, v, FLOAT_TOL) > 0
    return list(rows.values())


def admissible_directions(x: Sequence):
    """Every y in {-1,0,1}^n with y_i = -sign(x_i) on the support of x."""
    zero = [i for i, v in enumerate(x) if not v]
    base = [(-1 if v > 0 else 1) if v else 0 for v in x]
    for fill in itertools.product((-1, 0, 1), repeat=len(zero)):
        y = list(base)
        for i, f in zip(zero, fill):
            y[i] = f
        yield y


def norm_implication_audit(body: SymBody, seed: int = DEFAULT_SEED, cap: int = 6, smooth_points: int = 200) -> AuditRow:
    row = AuditRow("norm_implication")
    if body.n > cap:
        return row
    if body.polyhedral:
        pts = enumerate_vertices(body, cap)
    else:
        pts = sample_boundary_points(body, smooth_points, seed, cap)
    for x in pts:
        for y in admissible_directions(x):
            row.samples += 1
            try:
                norm_implication_check(body, x, y)
            except LemmaViolation:
                row.violations += 1
    return row


def norm_axiom_audit(body: SymBody, samples: int, seed: int = DEFAULT_SEED) -> list[AuditRow]:
    rng = random.Random(seed)
    rows = {name: AuditRow(name) for name in ("homogeneity", "triangle", "symmetry", "monotonicity", "normalization")}
    exact = body.polyhedral
    n = body.n

    def close(a, b) -> bool:
        return a == b if exact else math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)

    def leq(a, b) -> bool:
        return a <= b if exact else a <= b * (1 + 1e-12) + 1e-12

    def rnd() -> list:
        v = _rand_int_vector(rng, n, -6, 6)
        return [Fraction(a, rng.randint(1, 4)) for a in v] if exact else [a / 3 for a in v]

    for _ in range(samples):
        x, z = rnd(), rnd()
        nx = norm_eval(body, x)
        lam = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if not exact:
            lam = float(lam)
        rows["homogeneity"].samples += 1
        rows["homogeneity"].violations += not close(norm_eval(body, [lam * a for a in x]), abs(lam) * nx)
        rows["triangle"].samples += 1
        rows["triangle"].violations += not leq(norm_eval(body, [a + b for a, b in zip(x, z)]), nx + norm_eval(body, z))
        perm = list(range(n))
        rng.shuffle(perm)
        signs = [rng.choice((-1, 1)) for _ in range(n)]
        rows["symmetry"].samples += 1
        rows["symmetry"].violations += not close(norm_eval(body, [s * x[i] for s, i in zip(signs, perm)]), nx)
        big = [a + (1 if a >= 0 else -1) * abs(b) for a, b in zip(x, z)]
        rows["monotonicity"].samples += 1
        rows["monotonicity"].violations += not leq(nx, norm_eval(body, big))
    rows["normalization"].samples += 1
    rows["normalization"].violations += not close(norm_eval(body, [1] + [0] * (n - 1)), 1)
    return list(rows.values())


def run_audit(body: SymBody, samples: int = 10_000, seed: int = DEFAULT_SEED, cap: int = 6) -> list[AuditRow]:
    """All audits; the vertex-based ones are exhaustive when ``n <= cap``."""
    return (
        lemma_audit(body, samples, seed, cap)
        + [norm_implication_audit(body, seed, cap)]
        + norm_axiom_audit(body, samples, seed + 1)
    )
