"""1-symmetric norms and their unit balls.

A polyhedral body is stored in *dual-orbit* form: a matrix ``W`` whose rows
are nonnegative and sorted nonincreasing, with gauge

    ||x||_B = max_j <W[j], sort_desc(|x|)>.

Every signed permutation of a row is then a supporting functional of ``B``.
Smooth bodies are the ell_p balls for rational ``1 < p < inf``; ``p = 1`` and
``p = inf`` are rewritten in dual-orbit form so they stay exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ._rational import as_vector, format_fraction, to_fraction
from .exceptions import BodyParseError, DimensionError, InvariantError

__all__ = [
    "SymBody",
    "parse_body",
    "serialize_body",
    "norm_eval",
    "distance_to_cube",
    "is_cube",
    "to_boundary",
]

INF = math.inf


@dataclass(frozen=True)
class SymBody:
    """Unit ball of a 1-symmetric norm on R^n.

    Exactly one of ``weights`` (dual-orbit matrix) and ``p`` (ell_p exponent)
    is set.  Use the constructors below rather than calling this directly;
    they validate and normalize so that ``||e_1||_B == 1``.
    """

    n: int
    weights: tuple[tuple[Fraction, ...], ...] | None = None
    p: Fraction | None = None

    @property
    def polyhedral(self) -> bool:
        return self.weights is not None

    @property
    def family(self) -> str:
        return "dual_orbit" if self.polyhedral else "lp"

    # -- constructors -----------------------------------------------------

    @classmethod
    def dual_orbit(cls, n: int, weights: Sequence[Sequence]) -> "SymBody":
        n = _check_n(n)
        rows = [as_vector(r) for r in weights]
        if not rows:
            raise InvariantError("weight matrix has no rows")
        for r in rows:
            if len(r) != n:
                raise DimensionError(f"weight row of length {len(r)} for n={n}")
            if any(w < 0 for w in r):
                raise InvariantError(f"negative weight in row {_fmt(r)}")
            if any(a < b for a, b in zip(r, r[1:])):
                raise InvariantError(f"row {_fmt(r)} is not sorted nonincreasing")
            if r[0] == 0:
                raise InvariantError("all-zero weight row")
        scale = max(r[0] for r in rows)
        normalized: list[tuple[Fraction, ...]] = []
        for r in rows:
            r = tuple(w / scale for w in r)
            if r not in normalized:
                normalized.append(r)
        return cls(n=n, weights=tuple(normalized))

    @classmethod
    def lp(cls, n: int, p) -> "SymBody":
        n = _check_n(n)
        if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "+inf"):
            return cls.cube(n)
        if isinstance(p, float) and math.isinf(p) and p > 0:
            return cls.cube(n)
        p = to_fraction(p)
        if p < 1:
            raise InvariantError(f"p must be >= 1, got {format_fraction(p)}")
        if p == 1:
            return cls.ell1(n)
        return cls(n=n, p=p)

    @classmethod
    def cube(cls, n: int) -> "SymBody":
        n = _check_n(n)
        return cls.dual_orbit(n, [[1] + [0] * (n - 1)])

    @classmethod
    def ell1(cls, n: int) -> "SymBody":
        n = _check_n(n)
        return cls.dual_orbit(n, [[1] * n])

    @classmethod
    def topk(cls, n: int, k: int) -> "SymBody":
        """Sum of the ``k`` largest moduli (``k >= n`` gives ell_1)."""
        n = _check_n(n)
        if not isinstance(k, int) or k < 1:
            raise InvariantError(f"topk needs an integer k >= 1, got {k!r}")
        k = min(k, n)
        return cls.dual_orbit(n, [[1] * k + [0] * (n - k)])

    @classmethod
    def cube_cap_l1(cls, n: int, r) -> "SymBody":
        """Cube intersected with the ell_1 ball of radius ``r``."""
        n = _check_n(n)
        r = to_fraction(r)
        if r <= 0:
            raise InvariantError("cube_cap_l1 radius must be positive")
        return cls.dual_orbit(n, [[1] + [0] * (n - 1), [1 / r] * n])

    def __str__(self) -> str:
        return serialize_body(self)


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise BodyParseError(f"dimension must be an integer, got {n!r}")
    if n < 2:
        raise InvariantError(f"dimension must be >= 2, got {n}")
    return n


def _fmt(v) -> str:
    return "(" + ", ".join(format_fraction(x) for x in v) + ")"


# -- text format ------------------------------------------------------------

_FAMILY_KEYS = {
    "dual_orbit": {"weights"},
    "lp": {"p"},
    "cube": set(),
    "ell1": set(),
    "topk": {"k"},
    "cube_cap_l1": {"r"},
}


def parse_body(spec: str | Mapping) -> SymBody:
    """Build a body from JSON text (or an already-decoded mapping).

    Examples of accepted records::

        {"n": 3, "family": "dual_orbit", "weights": [["1", "1", "0"]]}
        {"n": 3, "family": "cube_cap_l1", "r": "2"}
        {"n": 4, "family": "lp", "p": "3/2"}
    """
    if isinstance(spec, (str, bytes)):
        try:
            data = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise BodyParseError(f"body spec is not valid JSON: {exc}") from exc
    else:
        data = spec
    if not isinstance(data, Mapping):
        raise BodyParseError("body spec must be a JSON object")
    family = data.get("family")
    if family not in _FAMILY_KEYS:
        raise BodyParseError(f"unknown family {family!r}")
    if "n" not in data:
        raise BodyParseError("body spec is missing 'n'")
    extra = set(data) - {"n", "family"} - _FAMILY_KEYS[family]
    if extra:
        raise BodyParseError(f"unexpected keys for {family}: {sorted(extra)}")
    missing = _FAMILY_KEYS[family] - set(data)
    if missing:
        raise BodyParseError(f"missing keys for {family}: {sorted(missing)}")
    n = data["n"]
    if family == "dual_orbit":
        weights = data["weights"]
        if not isinstance(weights, list) or not all(isinstance(r, list) for r in weights):
            raise BodyParseError("weights must be a list of rows")
        return SymBody.dual_orbit(n, weights)
    if family == "lp":
        return SymBody.lp(n, data["p"])
    if family == "cube":
        return SymBody.cube(n)
    if family == "ell1":
        return SymBody.ell1(n)
    if family == "topk":
        return SymBody.topk(n, data["k"])
    return SymBody.cube_cap_l1(n, data["r"])


def serialize_body(body: SymBody) -> str:
    """Canonical JSON text; ``parse_body(serialize_body(b)) == b``."""
    if body.polyhedral:
        record = {
            "family": "dual_orbit",
            "n": body.n,
            "weights": [[format_fraction(w) for w in row] for row in body.weights],
        }
    else:
        record = {"family": "lp", "n": body.n, "p": format_fraction(body.p)}
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


# -- evaluation -------------------------------------------------------------


def _checked(body: SymBody, x: Sequence) -> Sequence:
    if len(x) != body.n:
        raise DimensionError(f"vector of length {len(x)} for body of dimension {body.n}")
    return x


def row_values(body: SymBody, x: Sequence) -> list[Fraction]:
    """Value of every dual-orbit row at ``x`` (polyhedral bodies only)."""
    xs = sorted((abs(to_fraction(v)) for v in _checked(body, x)), reverse=True)
    return [sum((w * a for w, a in zip(row, xs) if w), Fraction(0)) for row in body.weights]


def norm_eval(body: SymBody, x: Sequence):
    """Gauge of ``x``: exact Fraction for polyhedral bodies, float for ell_p."""
    if body.polyhedral:
        return max(row_values(body, x))
    return _lp_norm(_checked(body, x), float(body.p))


def _lp_norm(x: Sequence, p: float) -> float:
    a = [abs(float(v)) for v in x]
    m = max(a)
    if m == 0.0:
        return 0.0
    return m * math.fsum((v / m) ** p for v in a) ** (1.0 / p)


def distance_to_cube(body: SymBody):
    """Ratio ||e_1 + ... + e_n||_B / ||e_1||_B (the denominator is 1)."""
    return norm_eval(body, [1] * body.n)


def is_cube(body: SymBody) -> bool:
    return body.polyhedral and distance_to_cube(body) == 1


def to_boundary(body: SymBody, x: Sequence) -> tuple:
    """Radial projection of a nonzero ``x`` onto the boundary."""
    if body.polyhedral:
        x = as_vector(x)
    else:
        x = tuple(float(v) for v in x)
    r = norm_eval(body, x)
    if r == 0:
        raise InvariantError("cannot project the zero vector to the boundary")
    return tuple(v / r for v in x)
