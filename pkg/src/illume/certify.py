"""Whole-body illumination certificates.

A polytope is illuminated by a direction set as soon as every vertex is,
because the normal cone at any boundary point contains the normal cone at
some vertex of the face it lies in.  Certification is therefore exhaustive
over vertices for polyhedral bodies and a labelled, non-exhaustive sample
for smooth ones.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from more_itertools import distinct_permutations

from ._rational import as_vector, format_fraction, solve, to_fraction
from .bodies import SymBody, norm_eval, parse_body, serialize_body, to_boundary
from .directions import DirectionSet, Strategy, gen_direction_set, select_strategy
from .exceptions import CapExceededError, IllumeError, InvariantError, NotOnBoundaryError
from .randomized import DEFAULT_SEED, RNG_NAME, build_Rk, check_Ek, default_count, make_rng
from .subdiff import LP_TOLERANCE, DerivativeEvaluator, check_boundary, is_vertex

__all__ = [
    "enumerate_vertices",
    "sample_boundary_points",
    "PointRecord",
    "IlluminationCertificate",
    "certify_directions",
    "verify_certificate",
    "prune_to_cover",
    "AutoResult",
    "illuminate_auto",
    "MinIlluminationResult",
    "UncoverableVertexError",
    "min_illumination_search",
    "body_digest",
]

DEFAULT_CAP = 8
CERT_FORMAT = "illume-certificate/1"


# -- vertices -----------------------------------------------------------------


def _compositions(total: int, max_parts: int):
    for parts in range(1, min(total, max_parts) + 1):
        for cuts in itertools.combinations(range(1, total), parts - 1):
            bounds = (0,) + cuts + (total,)
            yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def _orbit(rep: Sequence[Fraction]):
    for perm in distinct_permutations(rep):
        idx = [i for i, v in enumerate(perm) if v]
        for signs in itertools.product((1, -1), repeat=len(idx)):
            v = list(perm)
            for i, s in zip(idx, signs):
                v[i] = s * v[i]
            yield tuple(v)


def vertex_representatives(body: SymBody, cap: int = DEFAULT_CAP) -> list[tuple[Fraction, ...]]:
    """Nonnegative, nonincreasing vertices (one per signed-permutation orbit)."""
    if not body.polyhedral:
        raise InvariantError("vertex enumeration needs a polyhedral body")
    n = body.n
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the vertex enumeration cap {cap}")
    rows = body.weights
    reps = set()
    for s in range(1, n + 1):
        for comp in _compositions(s, len(rows)):
            b = len(comp)
            bounds = list(itertools.accumulate((0,) + comp))
            seg = [[sum(r[a:c], Fraction(0)) for a, c in zip(bounds, bounds[1:])] for r in rows]
            for subset in itertools.combinations(range(len(rows)), b):
                sol = solve([seg[j] for j in subset], [Fraction(1)] * b)
                if sol is None or sol[-1] <= 0 or any(a <= c for a, c in zip(sol, sol[1:])):
                    continue
                x = tuple(itertools.chain.from_iterable([v] * c for v, c in zip(sol, comp))) + (Fraction(0),) * (n - s)
                if x in reps or norm_eval(body, x) != 1:
                    continue
                if is_vertex(body, x):
                    reps.add(x)
    if not reps:
        raise IllumeError("no vertices found for a polyhedral body (internal error)")
    return sorted(reps, reverse=True)


def enumerate_vertices(body: SymBody, cap: int = DEFAULT_CAP) -> list[tuple[Fraction, ...]]:
    """All vertices of a polyhedral body, in lexicographic order.

    Representatives come from block compositions of the sorted vector and
    square subsystems of active rows; each is expanded to its full orbit
    under coordinate permutations and sign changes.
    """
    out = set()
    for rep in vertex_representatives(body, cap):
        out.update(_orbit(rep))
    return sorted(out)


def sample_boundary_points(body: SymBody, count: int = 2000, seed: int = DEFAULT_SEED, cap: int = DEFAULT_CAP) -> list[tuple]:
    """Random boundary points plus every {-1,0,1} tie pattern projected to the boundary.

    The patterns are only added when ``n <= cap``.  Points are floats for
    smooth bodies and exact Fractions otherwise.
    """
    n = body.n
    rng = make_rng(seed, 0xB0)
    pts = []
    for g in rng.standard_normal((count, n)):
        if body.polyhedral:
            g = [Fraction(int(round(v * 1000)), 1000) for v in g]
            if not any(g):
                continue
        pts.append(to_boundary(body, g))
    if n <= cap:
        for pat in itertools.product((-1, 0, 1), repeat=n):
            if any(pat):
                pts.append(to_boundary(body, pat))
    return sorted(set(pts))


# -- certificates ---------------------------------------------------------------


def body_digest(body: SymBody) -> str:
    return hashlib.sha256(serialize_body(body).encode("utf-8")).hexdigest()


@dataclass
class PointRecord:
    """A checked boundary point.

    ``witness`` indexes the first direction with negative derivative; when
    the point is uncovered it is ``None`` and ``derivative`` is the least
    derivative seen over all directions.
    """

    point: tuple
    witness: int | None
    derivative: Fraction | float


@dataclass
class IlluminationCertificate:
    body: SymBody
    directions: DirectionSet
    records: list[PointRecord]
    strategy: str = "Custom"
    mode: str | None = None
    exhaustive: bool = True
    seed: int | None = None
    counts: dict = field(default_factory=dict)

    @property
    def uncovered(self) -> list[tuple]:
        return [r.point for r in self.records if r.witness is None]

    @property
    def certified(self) -> bool:
        return bool(self.records) and not self.uncovered

    @property
    def status(self) -> str:
        return "Certified" if self.certified else "Uncovered"

    @property
    def distinct_count(self) -> int:
        return self.directions.distinct_count

    @property
    def digest(self) -> str:
        return body_digest(self.body)

    def to_dict(self) -> dict:
        exact = self.body.polyhedral

        def enc(v):
            return format_fraction(v) if exact else float(v)

        return {
            "format": CERT_FORMAT,
            "body": json.loads(serialize_body(self.body)),
            "digest": self.digest,
            "strategy": self.strategy,
            "mode": self.mode,
            "seed": self.seed,
            "rng": RNG_NAME if self.seed is not None else None,
            "exhaustive": self.exhaustive,
            "status": self.status,
            "directions": [[format_fraction(Fraction(x)) for x in v] for v in self.directions],
            "direction_label": self.directions.label,
            "distinct_directions": self.distinct_count,
            "points": [
                {
                    "point": [enc(x) for x in r.point],
                    "witness": r.witness,
                    "derivative": enc(r.derivative),
                }
                for r in self.records
                if r.witness is not None
            ],
            "uncovered": [
                {"point": [enc(x) for x in r.point], "best_derivative": enc(r.derivative)}
                for r in self.records
                if r.witness is None
            ],
            "counts": self.counts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "IlluminationCertificate":
        if data.get("format") != CERT_FORMAT:
            raise IllumeError(f"not a certificate file (format={data.get('format')!r})")
        body = parse_body(data["body"])
        dec = as_vector if body.polyhedral else (lambda v: tuple(float(x) for x in v))
        scalar = to_fraction if body.polyhedral else float
        dirs = DirectionSet.from_vectors(data["directions"], body.n, label=data.get("direction_label", "Custom"), dedup=False)
        records = [PointRecord(dec(p["point"]), p["witness"], scalar(p["derivative"])) for p in data["points"]]
        records += [PointRecord(dec(p["point"]), None, scalar(p["best_derivative"])) for p in data["uncovered"]]
        records.sort(key=lambda r: r.point)
        return cls(
            body=body,
            directions=dirs,
            records=records,
            strategy=data["strategy"],
            mode=data.get("mode"),
            exhaustive=data["exhaustive"],
            seed=data.get("seed"),
            counts=data.get("counts", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "IlluminationCertificate":
        return cls.from_dict(json.loads(text))


def _negative(body: SymBody, d, tol: float) -> bool:
    return d < 0 if body.polyhedral else d < -tol


def _default_points(body: SymBody, points, cap: int):
    if points is not None:
        pts = [as_vector(p) if body.polyhedral else tuple(float(v) for v in p) for p in points]
        return sorted(set(pts)), False
    if not body.polyhedral:
        raise InvariantError("smooth bodies need explicit points (see sample_boundary_points)")
    return enumerate_vertices(body, cap), True


def certify_directions(
    body: SymBody,
    directions: DirectionSet,
    points: Iterable[Sequence] | None = None,
    cap: int = DEFAULT_CAP,
    tol: float = LP_TOLERANCE,
    strategy: str = "Custom",
) -> IlluminationCertificate:
    """Find, for every point, the first direction (in list order) that illuminates it.

    ``points`` defaults to all vertices for polyhedral bodies, making the
    certificate exhaustive.
    """
    if not len(directions):
        raise InvariantError("empty direction list")
    if directions.n != body.n:
        raise InvariantError(f"directions live in R^{directions.n}, body in R^{body.n}")
    pts, exhaustive = _default_points(body, points, cap)
    records = []
    for x in pts:
        check_boundary(body, x, tol)
        ev = DerivativeEvaluator(body, x)
        for idx, y in enumerate(directions.vectors):
            if ev.negative(y, tol):
                records.append(PointRecord(x, idx, ev(y)))
                break
        else:
            records.append(PointRecord(x, None, min(ev(y) for y in directions.vectors)))
    return IlluminationCertificate(
        body=body,
        directions=directions,
        records=records,
        strategy=strategy,
        exhaustive=exhaustive and body.polyhedral,
        counts={"points": len(records), "directions": len(directions)},
    )


def verify_certificate(cert: IlluminationCertificate | str, cap: int = DEFAULT_CAP, tol: float = LP_TOLERANCE, check_points: bool = True) -> bool:
    """Re-run only the derivative checks recorded in a certificate.

    Returns True iff the recomputed status equals the recorded one and every
    stored derivative value is reproduced exactly.  For exhaustive
    certificates the point list must also equal the vertex set.
    """
    if isinstance(cert, str):
        data = json.loads(cert)
        claimed = data["status"]
        cert = IlluminationCertificate.from_dict(data)
        if data.get("digest") != cert.digest:
            return False
    else:
        claimed = cert.status
    body, dirs = cert.body, cert.directions.vectors
    if check_points and cert.exhaustive and body.polyhedral:
        if [r.point for r in cert.records] != enumerate_vertices(body, max(cap, body.n)):
            return False
    for r in cert.records:
        try:
            check_boundary(body, r.point, tol)
        except NotOnBoundaryError:
            return False
        ev = DerivativeEvaluator(body, r.point)
        if r.witness is not None:
            if not 0 <= r.witness < len(dirs):
                return False
            d = ev(dirs[r.witness])
            if d != r.derivative or not _negative(body, d, tol):
                return False
            if any(_negative(body, ev(y), tol) for y in dirs[: r.witness]):
                return False
        else:
            values = [ev(y) for y in dirs]
            if any(_negative(body, d, tol) for d in values) or min(values) != r.derivative:
                return False
    return ("Certified" if cert.records and all(r.witness is not None for r in cert.records) else "Uncovered") == claimed


# -- covers ---------------------------------------------------------------------


def _cover_masks(body: SymBody, dirs: Sequence[tuple], pts: Sequence[tuple], tol: float) -> list[int]:
    masks = [0] * len(dirs)
    for p, x in enumerate(pts):
        ev = DerivativeEvaluator(body, x)
        bit = 1 << p
        for d, y in enumerate(dirs):
            if ev.negative(y, tol):
                masks[d] |= bit
    return masks


def _greedy(masks: list[int], full: int) -> list[int] | None:
    chosen, covered = [], 0
    while covered != full:
        gain, pick = max(((bin(m & ~covered).count("1"), -i) for i, m in enumerate(masks)), default=(0, 0))
        if gain == 0:
            return None
        chosen.append(-pick)
        covered |= masks[-pick]
    return sorted(chosen)


def prune_to_cover(body: SymBody, directions: DirectionSet, points: Sequence[tuple], tol: float = LP_TOLERANCE, exact_limit: int = 0) -> DirectionSet:
    """Greedy sub-cover of ``directions`` that still illuminates every point.

    When ``exact_limit`` is positive and the greedy cover is larger than
    allowed by it, an exact minimum cover is searched instead.
    """
    dirs = list(directions.vectors)
    masks = _cover_masks(body, dirs, points, tol)
    full = (1 << len(points)) - 1
    chosen = _greedy(masks, full)
    if chosen is None:
        raise InvariantError("direction set does not cover the points; nothing to prune")
    if exact_limit and len(chosen) >= exact_limit:
        chosen = _exact_cover(masks, full, chosen)
    return DirectionSet.from_vectors([dirs[i] for i in chosen], body.n, label=f"{directions.label}*")


def _exact_cover(masks: list[int], full: int, incumbent: list[int]) -> list[int]:
    # drop directions whose cover is contained in another's (first one wins on ties)
    keep = []
    for i, m in enumerate(masks):
        if m and not any((m | o) == o and (o != m or j < i) for j, o in enumerate(masks) if j != i):
            keep.append(i)
    npts = full.bit_length()
    by_point = [[i for i in keep if masks[i] >> p & 1] for p in range(npts)]
    for lst in by_point:
        lst.sort(key=lambda i: (-bin(masks[i]).count("1"), i))
    best = list(incumbent)
    max_cover = max(bin(masks[i]).count("1") for i in keep)

    def rec(covered: int, chosen: list[int]) -> None:
        nonlocal best
        if covered == full:
            if len(chosen) < len(best):
                best = sorted(chosen)
            return
        left = bin(full & ~covered).count("1")
        if len(chosen) + math.ceil(left / max_cover) >= len(best):
            return
        p = min((p for p in range(npts) if not covered >> p & 1), key=lambda p: len(by_point[p]))
        for i in by_point[p]:
            chosen.append(i)
            rec(covered | masks[i], chosen)
            chosen.pop()

    rec(0, [])
    return best


class UncoverableVertexError(IllumeError):
    def __init__(self, vertex):
        super().__init__(f"no pool direction illuminates vertex {[format_fraction(v) for v in vertex]}")
        self.vertex = vertex


@dataclass
class MinIlluminationResult:
    size: int
    directions: DirectionSet
    certificate: IlluminationCertificate


def min_illumination_search(body: SymBody, pool: DirectionSet, cap: int = DEFAULT_CAP) -> MinIlluminationResult:
    """Smallest subset of ``pool`` illuminating every vertex (exact branch and bound).

    The size is an upper bound on the illumination number, restricted to
    directions from the pool.
    """
    if not body.polyhedral:
        raise InvariantError("min_illumination_search needs a polyhedral body")
    if not len(pool):
        raise InvariantError("empty pool")
    verts = enumerate_vertices(body, cap)
    if body.n > 4 and len(verts) * len(pool) > 10**6:
        raise CapExceededError("pool x vertices exceeds 10^6")
    dirs = list(pool.vectors)
    masks = _cover_masks(body, dirs, verts, LP_TOLERANCE)
    covered = 0
    for m in masks:
        covered |= m
    for p, v in enumerate(verts):
        if not covered >> p & 1:
            raise UncoverableVertexError(v)
    full = (1 << len(verts)) - 1
    chosen = _exact_cover(masks, full, _greedy(masks, full))
    subset = DirectionSet.from_vectors([dirs[i] for i in chosen], body.n, label="MinCover")
    cert = certify_directions(body, subset, strategy="MinCover")
    return MinIlluminationResult(len(chosen), subset, cert)


# -- driver ---------------------------------------------------------------------


@dataclass
class AutoResult:
    """Outcome of :func:`illuminate_auto`; ``attempts`` logs every tried family."""

    directions: DirectionSet
    certificate: IlluminationCertificate
    strategy: Strategy
    attempts: list[dict] = field(default_factory=list)
    ek_status: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.certificate.certified

    @property
    def within_budget(self) -> bool:
        """Cube output, or fewer than ``2^n`` distinct directions."""
        return self.strategy is Strategy.CUBE or self.directions.distinct_count < 2**self.certificate.body.n

    def __iter__(self):
        return iter((self.directions, self.certificate))


def _far_set(n: int, count: int, seed: int, stream: int) -> tuple[DirectionSet, list]:
    dset = gen_direction_set("T", n)
    vecs = list(dset.vectors)
    reals = []
    for k in range(1, (n + 1) // 2 + 1):
        r = build_Rk(n, k, count, seed, stream)
        reals.append(r)
        vecs.extend(r.vectors)
    return DirectionSet.from_vectors(vecs, n, label="Far"), reals


def illuminate_auto(
    body: SymBody,
    seed: int = DEFAULT_SEED,
    mode: str = "adaptive",
    cap: int = DEFAULT_CAP,
    max_rounds: int = 12,
    points: Iterable[Sequence] | None = None,
    lp_samples: int = 2000,
    tol: float = LP_TOLERANCE,
    ek_cap: int = 12,
    refine_cap: int = 5,
) -> AutoResult:
    """Pick a direction family for ``body``, certify it, and escalate on failure.

    Near-cube bodies try T2 and/or T1, then fall back to the randomized
    family; far bodies go straight to ``T`` plus the sets ``R_k``.  In
    ``faithful`` mode ``R_k`` has ``floor(2^n/n^2)`` trials and a single
    draw; ``adaptive`` mode doubles the count on fresh substreams until the
    set certifies or ``max_rounds`` is reached.  Any certified non-cube set
    with ``2^n`` or more distinct directions is pruned to a sub-cover.

    At small ``n`` the randomized family can be too coarse: its ternary
    vectors may admit no sub-cover below ``2^n``.  Adaptive mode then, for
    ``n <= refine_cap``, searches a cover in the pool ``{-2,...,2}^n``.
    """
    if mode not in ("faithful", "adaptive"):
        raise InvariantError(f"unknown mode {mode!r}")
    n = body.n
    budget = 2**n
    strategy = select_strategy(body)
    if points is None:
        if body.polyhedral:
            pts = enumerate_vertices(body, cap)
        else:
            pts = sample_boundary_points(body, lp_samples, seed, cap)
    else:
        pts = list(points)
    attempts: list[dict] = []

    def run(dset: DirectionSet, label: str) -> IlluminationCertificate:
        cert = certify_directions(body, dset, pts, cap=cap, tol=tol, strategy=label)
        cert.exhaustive = body.polyhedral and points is None
        cert.mode = mode
        attempts.append({"strategy": label, "directions": len(dset), "status": cert.status})
        return cert

    def within_budget(cert: IlluminationCertificate) -> IlluminationCertificate | None:
        if cert.distinct_count < budget:
            return cert
        pruned = prune_to_cover(body, cert.directions, [r.point for r in cert.records], tol, exact_limit=budget)
        if pruned.distinct_count >= budget:
            attempts.append({"strategy": cert.strategy, "directions": len(pruned), "status": "OverBudget"})
            return None
        out = run(pruned, cert.strategy)
        out.counts["pruned_from"] = len(cert.directions)
        return out

    if strategy is Strategy.CUBE:
        dset = gen_direction_set("CubeCorners", n)
        cert = run(dset, strategy.value)
        return AutoResult(dset, cert, strategy, attempts)

    chain = {
        Strategy.NEAR_T2: [("T2", Strategy.NEAR_T2), ("T1", Strategy.NEAR_T1)],
        Strategy.NEAR_T1: [("T1", Strategy.NEAR_T1)],
        Strategy.FAR: [],
    }[strategy]
    last = None
    for label, strat in chain:
        cert = run(gen_direction_set(label, n), strat.value)
        last = (cert, strat)
        if cert.certified:
            ok = within_budget(cert)
            if ok is not None:
                return AutoResult(ok.directions, ok, strat, attempts)

    ek_status: dict = {}
    base = max(default_count(n), 1) if mode == "adaptive" else default_count(n)
    rounds = max_rounds if mode == "adaptive" else 1
    over_budget = False
    for r in range(rounds):
        count = base * 2**r
        dset, reals = _far_set(n, count, seed, r)
        cert = run(dset, Strategy.FAR.value)
        cert.seed = seed
        cert.counts.update({"round": r, "trials_per_k": count, "T": 2 ** (n - 1)})
        if n <= ek_cap:
            ek_status = {f"E_{x.k}": check_Ek(x, cap=ek_cap).covered for x in reals}
        last = (cert, Strategy.FAR)
        if cert.certified:
            ok = within_budget(cert)
            if ok is not None:
                ok.seed = seed
                ok.counts.update({"round": r, "trials_per_k": count, "T": 2 ** (n - 1)})
                return AutoResult(ok.directions, ok, Strategy.FAR, attempts, ek_status)
            # the minimum sub-cover already needs 2^n directions
            over_budget = True
            break
    if mode == "adaptive" and n <= refine_cap and (over_budget or not last[0].certified):
        pool = DirectionSet.from_vectors(
            [v for v in itertools.product(range(-2, 3), repeat=n) if any(v)], n, label="Refined"
        )
        masks = _cover_masks(body, list(pool.vectors), pts, tol)
        full = (1 << len(pts)) - 1
        chosen = _greedy(masks, full)
        if chosen is not None:
            if len(chosen) >= budget:
                chosen = _exact_cover(masks, full, chosen)
            if len(chosen) < budget:
                dset = DirectionSet.from_vectors([pool.vectors[i] for i in chosen], n, label="Refined")
                cert = run(dset, "Far/refined")
                cert.seed = seed
                cert.counts["refined_pool"] = len(pool)
                return AutoResult(dset, cert, Strategy.FAR, attempts, ek_status)
    cert, strat = last
    return AutoResult(cert.directions, cert, strat, attempts, ek_status)
