"""Subdifferential calculus of 1-symmetric gauges.

For a polyhedral body the one-sided derivative of the gauge at ``x`` along
``y`` has a closed form: group the coordinates of ``x`` into blocks of equal
modulus, and for every active dual-orbit row pair each block's
``sign(x_i) * y_i`` values (sorted descending) with the row's weight segment
for that block.  The zero block pairs ``|y_i|`` instead.  The derivative is
the largest such pairing over active rows, which is the max of ``<y, v>``
over the subdifferential.  A direction illuminates a boundary point exactly
when this derivative is negative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from more_itertools import distinct_permutations

from ._rational import as_vector, rank, sign
from .bodies import SymBody, norm_eval, row_values
from .exceptions import DimensionError, InvariantError, NotOnBoundaryError

__all__ = [
    "BlockDecomposition",
    "SubgradientWitness",
    "SubgradientEnumeration",
    "block_decompose",
    "directional_derivative",
    "DerivativeEvaluator",
    "illuminates_point",
    "extreme_subgradients",
    "is_vertex",
    "linearity_radius",
    "lp_gradient",
]

LP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BlockDecomposition:
    """Sign/zero/tie structure of a vector.

    ``blocks`` lists ``(indices, modulus)`` with moduli strictly decreasing
    and positive; ``zero`` holds the indices where the vector vanishes.
    Indices are 0-based.
    """

    blocks: tuple[tuple[tuple[int, ...], Fraction], ...]
    zero: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def top(self) -> tuple[int, ...]:
        """Coordinates attaining the sup-norm (empty for the zero vector)."""
        return self.blocks[0][0] if self.blocks else ()

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(i for idx, _ in self.blocks for i in idx))

    def segments(self) -> list[tuple[int, int]]:
        """Half-open position ranges each block occupies in the sorted vector."""
        out, pos = [], 0
        for idx, _ in self.blocks:
            out.append((pos, pos + len(idx)))
            pos += len(idx)
        return out


def block_decompose(x: Sequence) -> BlockDecomposition:
    groups: dict = {}
    for i, v in enumerate(x):
        if v:
            groups.setdefault(abs(v), []).append(i)
    blocks = tuple((tuple(groups[m]), m) for m in sorted(groups, reverse=True))
    zero = tuple(i for i, v in enumerate(x) if not v)
    return BlockDecomposition(blocks=blocks, zero=zero, signs=tuple(sign(v) for v in x))


# -- directional derivative -------------------------------------------------


def _positive_prefix(seg: Sequence[int]) -> tuple[int, ...]:
    return tuple(w for w in seg if w > 0)


class DerivativeEvaluator:
    """Derivative of the gauge at a fixed ``x`` along many directions.

    The block structure and active rows are computed once, so certifying a
    point against a long direction list stays cheap.
    """

    def __init__(self, body: SymBody, x: Sequence):
        if len(x) != body.n:
            raise DimensionError(f"point of length {len(x)} for body of dimension {body.n}")
        self.body = body
        if body.polyhedral:
            self.x = as_vector(x)
            if not any(self.x):
                raise InvariantError("directional derivative undefined at the origin")
            self.value = norm_eval(body, self.x)
            self.decomposition = dec = block_decompose(self.x)
            values = row_values(body, self.x)
            self.active_rows = tuple(j for j, v in enumerate(values) if v == self.value)
            self._blocks = [(idx, tuple(dec.signs[i] for i in idx)) for idx, _ in dec.blocks]
            ranges = dec.segments()
            end = ranges[-1][1]
            # each active row is scaled to integer weights; the scale is undone once per call
            self._plans = []
            for j in self.active_rows:
                row = body.weights[j]
                scale = math.lcm(*(w.denominator for w in row))
                irow = [w.numerator * (scale // w.denominator) for w in row]
                segs = [_positive_prefix(irow[a:b]) for a, b in ranges]
                self._plans.append((segs, _positive_prefix(irow[end:]), scale))
        else:
            self.x = tuple(float(v) for v in x)
            if not any(self.x):
                raise InvariantError("directional derivative undefined at the origin")
            self.value = norm_eval(body, self.x)
            self.gradient = lp_gradient(body, self.x)

    def _row_totals(self, y: Sequence) -> Iterator[tuple]:
        zero = self.decomposition.zero
        for segs, zseg, scale in self._plans:
            total = 0
            for (idx, sg), seg in zip(self._blocks, segs):
                if not seg:
                    continue
                if len(seg) == 1:
                    total += seg[0] * max(s * y[i] for i, s in zip(idx, sg))
                else:
                    vals = sorted((s * y[i] for i, s in zip(idx, sg)), reverse=True)
                    total += sum(w * v for w, v in zip(seg, vals))
            if zseg and zero:
                vals = sorted((abs(y[i]) for i in zero), reverse=True)
                total += sum(w * v for w, v in zip(zseg, vals))
            yield total, scale

    def __call__(self, y: Sequence):
        if len(y) != self.body.n:
            raise DimensionError(f"direction of length {len(y)} for body of dimension {self.body.n}")
        if not self.body.polyhedral:
            return sum(float(a) * g for a, g in zip(y, self.gradient))
        best = None
        for total, scale in self._row_totals(y):
            total = Fraction(total, scale) if isinstance(total, int) else Fraction(total) / scale
            if best is None or total > best:
                best = total
        return best

    def negative(self, y: Sequence, tol: float = LP_TOLERANCE) -> bool:
        """``D(x; y) < 0`` (exact), or ``< -tol`` for smooth bodies."""
        if not self.body.polyhedral:
            return self(y) < -tol
        return all(total < 0 for total, _ in self._row_totals(y))


def directional_derivative(body: SymBody, x: Sequence, y: Sequence):
    """One-sided derivative of ``||.||_B`` at ``x`` along ``y``.

    Exact Fraction for polyhedral bodies; float for ell_p bodies.
    """
    return DerivativeEvaluator(body, x)(y)


def lp_gradient(body: SymBody, x: Sequence[float]) -> tuple[float, ...]:
    p = float(body.p)
    r = norm_eval(body, x)
    return tuple(sign(v) * (abs(v) / r) ** (p - 1) for v in x)


def check_boundary(body: SymBody, x: Sequence, tol: float = LP_TOLERANCE) -> None:
    value = norm_eval(body, x if not body.polyhedral else as_vector(x))
    if body.polyhedral:
        if value != 1:
            raise NotOnBoundaryError(f"||x||_B = {value}, expected 1")
    elif abs(value - 1.0) > tol:
        raise NotOnBoundaryError(f"||x||_B = {value!r}, expected 1 within {tol}")


def illuminates_point(body: SymBody, x: Sequence, y: Sequence, tol: float = LP_TOLERANCE) -> bool:
    """Whether direction ``y`` illuminates the boundary point ``x``.

    Polyhedral bodies use the exact sign of the derivative; ell_p bodies
    require it to be below ``-tol``.
    """
    check_boundary(body, x, tol)
    if not any(y):
        raise InvariantError("zero direction")
    d = directional_derivative(body, x, y)
    return d < 0 if body.polyhedral else d < -tol


def linearity_radius(body: SymBody, x: Sequence, y: Sequence) -> Fraction:
    """A ``t* > 0`` with ``||x + t y|| = ||x|| + t * D(x; y)`` for all ``0 < t < t*``.

    Derived from the gaps between block moduli (so order and signs are kept)
    and the slack of inactive rows.  Polyhedral bodies only.
    """
    x, y = as_vector(x), as_vector(y)
    my = max(abs(v) for v in y)
    if my == 0:
        return Fraction(1)
    mods = sorted({abs(v) for v in x if v}, reverse=True) + [Fraction(0)]
    radius = min(a - b for a, b in zip(mods, mods[1:])) / (2 * my)
    values = row_values(body, x)
    top = max(values)
    slack = [top - v for v in values if v != top]
    if slack:
        radius = min(radius, min(slack) / (2 * norm_eval(body, y)))
    return radius


# -- subgradients -----------------------------------------------------------


@dataclass(frozen=True)
class SubgradientWitness:
    """An extreme point ``v`` of the subdifferential together with its origin."""

    v: tuple[Fraction, ...]
    row: int
    zero_signs: tuple[int, ...] = field(default=())


@dataclass
class SubgradientEnumeration:
    witnesses: list[SubgradientWitness]
    truncated: bool = False

    def __iter__(self) -> Iterator[SubgradientWitness]:
        return iter(self.witnesses)

    def __len__(self) -> int:
        return len(self.witnesses)

    @property
    def vectors(self) -> list[tuple[Fraction, ...]]:
        return [w.v for w in self.witnesses]


def _iter_subgradients(body: SymBody, x: Sequence) -> Iterator[SubgradientWitness]:
    if not body.polyhedral:
        raise InvariantError("subgradient enumeration needs a polyhedral body")
    ev = DerivativeEvaluator(body, x)
    dec = ev.decomposition
    ranges = dec.segments()
    end = ranges[-1][1]
    seen = set()
    for j in ev.active_rows:
        row = body.weights[j]
        block_choices = [
            list(distinct_permutations(row[a:b])) for a, b in ranges
        ]
        zero_perms = list(distinct_permutations(row[end:])) if dec.zero else [()]
        for combo in itertools.product(*block_choices):
            v = [Fraction(0)] * body.n
            for (idx, _), assignment in zip(dec.blocks, combo):
                for i, w in zip(idx, assignment):
                    v[i] = dec.signs[i] * w
            for zp in zero_perms:
                nz = [t for t, w in enumerate(zp) if w]
                for signs in itertools.product((1, -1), repeat=len(nz)):
                    u = list(v)
                    zs = [0] * len(zp)
                    for t, s in zip(nz, signs):
                        zs[t] = s
                    for t, i in enumerate(dec.zero):
                        u[i] = zs[t] * zp[t]
                    key = tuple(u)
                    if key not in seen:
                        seen.add(key)
                        yield SubgradientWitness(v=key, row=j, zero_signs=tuple(zs))


def extreme_subgradients(body: SymBody, x: Sequence, limit: int | None = None) -> SubgradientEnumeration:
    """Generators of the subdifferential of ``||.||_B`` at ``x``.

    Enumerates active rows, within-block weight assignments and zero-block
    signs.  Their convex hull is the subdifferential unless ``limit`` cut
    the enumeration short (``truncated`` is then set).
    """
    out: list[SubgradientWitness] = []
    for w in _iter_subgradients(body, x):
        if limit is not None and len(out) >= limit:
            return SubgradientEnumeration(out, truncated=True)
        out.append(w)
    return SubgradientEnumeration(out)


def is_vertex(body: SymBody, x: Sequence) -> bool:
    """True iff the normal cone at the boundary point ``x`` is full-dimensional."""
    check_boundary(body, x)
    return rank((w.v for w in _iter_subgradients(body, x)), target=body.n) == body.n
