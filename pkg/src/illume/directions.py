"""Deterministic direction families and the near-cube strategy predicates."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from ._rational import as_vector, format_fraction, sign, to_fraction
from .bodies import SymBody, distance_to_cube, norm_eval
from .exceptions import BodyParseError, InadmissibleDirectionError, InvariantError, LemmaViolation
from .subdiff import check_boundary, directional_derivative

__all__ = [
    "DirectionSet",
    "gen_direction_set",
    "in_t1",
    "pair_condition",
    "Strategy",
    "select_strategy",
    "NormImplication",
    "norm_implication_check",
    "read_directions",
    "write_directions",
    "FIXED_LABELS",
]

FIXED_LABELS = ("T", "T1", "T2", "CubeCorners")


@dataclass(frozen=True)
class DirectionSet:
    """A finite, canonically ordered list of nonzero directions in R^n."""

    label: str
    n: int
    vectors: tuple[tuple, ...]

    def __post_init__(self):
        for v in self.vectors:
            if len(v) != self.n:
                raise InvariantError(f"direction of length {len(v)} in a set for n={self.n}")
            if not any(v):
                raise InvariantError("zero vector in a direction set")

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    @property
    def distinct_count(self) -> int:
        return len(set(self.vectors))

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence], n: int, label: str = "Custom", dedup: bool = True) -> "DirectionSet":
        vecs = [tuple(_normalize_entry(x) for x in v) for v in vectors]
        if dedup:
            vecs = sorted(set(vecs))
        return cls(label=label, n=n, vectors=tuple(vecs))

    def union(self, other: "DirectionSet", label: str | None = None) -> "DirectionSet":
        return DirectionSet.from_vectors(
            list(self.vectors) + list(other.vectors), self.n, label or f"{self.label}+{other.label}"
        )


def _normalize_entry(x):
    q = to_fraction(x)
    return q.numerator if q.denominator == 1 else q


def _signs(m: int):
    return itertools.product((-1, 1), repeat=m)


def gen_direction_set(label: str, n: int) -> DirectionSet:
    """One of the fixed families, in lexicographic order.

    ``T``: {-1,1}^(n-1) x {0}.  ``T1``: sign vectors with a -1 among the first
    n-1 coordinates, plus e_1+...+e_(n-1).  ``T2``: ``T`` plus +-e_n.
    ``CubeCorners``: all of {-1,1}^n.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise InvariantError(f"direction sets need n >= 2, got {n!r}")
    if label == "CubeCorners":
        vecs = list(_signs(n))
    elif label == "T":
        vecs = [s + (0,) for s in _signs(n - 1)]
    elif label == "T2":
        en = (0,) * (n - 1)
        vecs = [s + (0,) for s in _signs(n - 1)] + [en + (1,), en + (-1,)]
    elif label == "T1":
        vecs = [s for s in _signs(n) if -1 in s[:-1]]
        vecs.append((1,) * (n - 1) + (0,))
    else:
        raise InvariantError(f"unknown direction family {label!r}")
    return DirectionSet(label=label, n=n, vectors=tuple(sorted(vecs)))


def in_t1(y: Sequence) -> bool:
    """Membership in T1 by its set-builder definition."""
    n = len(y)
    if all(v in (-1, 1) for v in y) and any(v == -1 for v in y[: n - 1]):
        return True
    return tuple(y) == (1,) * (n - 1) + (0,)


def pair_condition(body: SymBody) -> bool:
    """Whether ||e_i + e_j||_B > ||e_i||_B; one pair decides all by symmetry."""
    e12 = [1, 1] + [0] * (body.n - 2)
    return norm_eval(body, e12) > norm_eval(body, [1] + [0] * (body.n - 1))


class Strategy(str, enum.Enum):
    CUBE = "Cube"
    NEAR_T2 = "NearT2"
    NEAR_T1 = "NearT1"
    FAR = "Far"


def select_strategy(body: SymBody) -> Strategy:
    d = distance_to_cube(body)
    if body.polyhedral and d == 1:
        return Strategy.CUBE
    if d < 2:
        return Strategy.NEAR_T2 if pair_condition(body) else Strategy.NEAR_T1
    return Strategy.FAR


@dataclass(frozen=True)
class NormImplication:
    """Outcome of the norm-implication check.

    ``illuminated`` is True when ``y`` illuminates ``x``; otherwise ``value``
    is ||sum of e_i over supp(y)||_B, already checked to be >= 2/||x||_inf.
    """

    illuminated: bool
    value: Fraction | float | None = None
    bound: Fraction | float | None = None


def norm_implication_check(body: SymBody, x: Sequence, y: Sequence) -> NormImplication:
    if body.polyhedral:
        x = as_vector(x)
    check_boundary(body, x)
    if len(y) != body.n or any(v not in (-1, 0, 1) for v in y):
        raise InadmissibleDirectionError("y must be a {-1,0,1} vector of matching length")
    for xi, yi in zip(x, y):
        if xi and yi != -sign(xi):
            raise InadmissibleDirectionError("y_i must equal -sign(x_i) wherever x_i != 0")
    d = directional_derivative(body, x, y)
    if (d < 0) if body.polyhedral else (d < -1e-9):
        return NormImplication(illuminated=True)
    value = norm_eval(body, [1 if v else 0 for v in y])
    bound = 2 / max(abs(v) for v in x)
    if body.polyhedral:
        ok = value >= bound
    else:
        ok = value >= bound - 1e-9
    if not ok:
        raise LemmaViolation(
            f"x={list(map(str, x))} not illuminated by y={list(y)} but "
            f"||1_supp(y)||_B = {value} < {bound}"
        )
    return NormImplication(illuminated=False, value=value, bound=bound)


# -- file format --------------------------------------------------------------


def _fmt_entry(x) -> str:
    return format_fraction(Fraction(x))


def write_directions(dset: DirectionSet, path: str | Path | None = None) -> str:
    lines = [f"# label={dset.label} n={dset.n} count={len(dset)}"]
    lines += [" ".join(_fmt_entry(x) for x in v) for v in dset.vectors]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_directions(source: str | Path, label: str = "Custom") -> DirectionSet:
    """Parse a directions file (path or text): one vector per line, '#' comments."""
    if isinstance(source, Path) or ("\n" not in source and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    vecs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vecs.append(as_vector(line.split()))
        except BodyParseError as exc:
            raise BodyParseError(f"line {lineno}: {exc}") from exc
    if not vecs:
        raise InvariantError("directions file holds no vectors")
    n = len(vecs[0])
    if any(len(v) != n for v in vecs):
        raise InvariantError("directions of differing lengths")
    return DirectionSet.from_vectors(vecs, n, label=label, dedup=False)
