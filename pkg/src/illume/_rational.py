"""Small helpers for exact rational vectors."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import BodyParseError

Vector = tuple  # tuple of Fraction (or float for smooth bodies)


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction, float or ``"p/q"`` string to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise BodyParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise BodyParseError(f"not a finite rational: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise BodyParseError(f"malformed rational {value!r}") from exc
    raise BodyParseError(f"not a rational: {value!r}")


def as_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in values)


def format_fraction(q: Fraction) -> str:
    """Render as ``"p/q"`` (or a plain integer when the denominator is 1)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_vector(v: Sequence) -> list[str]:
    return [format_fraction(x) if not isinstance(x, float) else repr(x) for x in v]


def sign(x) -> int:
    return (x > 0) - (x < 0)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def rank(rows: Iterable[Sequence], target: int | None = None) -> int:
    """Exact rank of a set of rational vectors by incremental elimination.

    Stops early once ``target`` independent rows have been found.
    """
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot column, reduced row)
    for row in rows:
        r = [Fraction(x) for x in row]
        for piv, b in basis:
            if r[piv]:
                f = r[piv] / b[piv]
                r = [a - f * c for a, c in zip(r, b)]
        piv = next((i for i, a in enumerate(r) if a), None)
        if piv is not None:
            basis.append((piv, r))
            if target is not None and len(basis) >= target:
                break
    return len(basis)


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve a square system exactly; ``None`` when singular."""
    size = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][size] for r in range(size)]
