"""Random sign-and-projection direction sets and their coverage probabilities.

A *trial* draws a uniformly random support ``S`` of size ``2k - 1`` and a
uniform sign vector ``X`` in {-1,1}^n; its direction is ``X`` restricted to
``S``.  ``R_k`` is a multiset of ``floor(2^n / n^2)`` independent trials.  A
fixed sign pattern ``y`` with ``k`` nonzeros is *hit* by a trial when
``supp(y)`` is inside ``S`` and ``X`` agrees with ``y`` there.

Randomness: numpy's PCG64 bit generator seeded through ``SeedSequence``
with ``spawn_key=(k, stream)``, so every ``(seed, k, stream)`` triple owns an
independent, platform-stable substream.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .exceptions import BodyParseError, CapExceededError, InvariantError

__all__ = [
    "RNG_NAME",
    "DEFAULT_SEED",
    "make_rng",
    "Trial",
    "sample_trial",
    "default_count",
    "RandomSetRealization",
    "build_Rk",
    "EkResult",
    "check_Ek",
    "trial_success_prob",
    "rate_function",
    "ProbabilityReport",
    "bound_chain",
    "MonteCarloResult",
    "monte_carlo_hit_frequency",
    "ThresholdScan",
    "estimate_threshold_n",
    "union_size_holds",
]

RNG_NAME = "numpy.PCG64+SeedSequence/v1"
DEFAULT_SEED = 20160601
LN2 = math.log(2.0)
CHAIN_RTOL = 1e-12


def make_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def _check_nk(n: int, k: int) -> None:
    if n < 1 or not 1 <= k <= (n + 1) // 2:
        raise InvariantError(f"need 1 <= k <= ceil(n/2), got n={n}, k={k}")


def _draw(n: int, m: int, count: int, rng: np.random.Generator):
    """``count`` trials: sorted m-subsets (partial Fisher-Yates) and sign rows."""
    perm = np.tile(np.arange(n), (count, 1))
    rows = np.arange(count)
    for i in range(m):
        j = rng.integers(i, n, size=count)
        tmp = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = tmp
    supports = np.sort(perm[:, :m], axis=1)
    signs = rng.integers(0, 2, size=(count, n), dtype=np.int8) * 2 - 1
    return supports, signs


@dataclass(frozen=True)
class Trial:
    support: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def vector(self) -> tuple[int, ...]:
        s = set(self.support)
        return tuple(x if i in s else 0 for i, x in enumerate(self.signs))


def sample_trial(n: int, k: int, rng: np.random.Generator) -> Trial:
    _check_nk(n, k)
    supports, signs = _draw(n, 2 * k - 1, 1, rng)
    return Trial(tuple(int(i) for i in supports[0]), tuple(int(s) for s in signs[0]))


def default_count(n: int) -> int:
    return 2**n // n**2


@dataclass(frozen=True)
class RandomSetRealization:
    """A seeded outcome of ``R_k``: one support and sign vector per trial."""

    n: int
    k: int
    seed: int | None
    supports: tuple[tuple[int, ...], ...]
    signs: tuple[tuple[int, ...], ...]
    stream: int = 0

    @property
    def count(self) -> int:
        return len(self.supports)

    @property
    def degenerate(self) -> bool:
        return self.count == 0

    @property
    def trials(self) -> list[Trial]:
        return [Trial(s, x) for s, x in zip(self.supports, self.signs)]

    @property
    def vectors(self) -> list[tuple[int, ...]]:
        return [t.vector for t in self.trials]

    @property
    def distinct_count(self) -> int:
        return len(set(self.vectors))

    def dumps(self) -> str:
        lines = [f"{self.n} {self.k} {self.count} {self.seed if self.seed is not None else -1}"]
        for s, x in zip(self.supports, self.signs):
            lines.append(
                "S:" + ",".join(str(i + 1) for i in s) + ";X:" + ",".join("+1" if v > 0 else "-1" for v in x)
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RandomSetRealization":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        try:
            n, k, count, seed = (int(t) for t in lines[0].split())
            supports, signs = [], []
            for ln in lines[1:]:
                s_part, x_part = ln.split(";")
                supports.append(tuple(int(i) - 1 for i in s_part[2:].split(",")))
                signs.append(tuple(int(v) for v in x_part[2:].split(",")))
        except (ValueError, IndexError) as exc:
            raise BodyParseError(f"malformed realization dump: {exc}") from exc
        if len(supports) != count:
            raise BodyParseError(f"header announces {count} trials, found {len(supports)}")
        return cls(n, k, None if seed < 0 else seed, tuple(supports), tuple(signs))


def build_Rk(n: int, k: int, count: int | None = None, seed: int = DEFAULT_SEED, stream: int = 0) -> RandomSetRealization:
    """Draw ``R_k`` with ``count`` trials (default ``floor(2^n / n^2)``)."""
    _check_nk(n, k)
    if count is None:
        count = default_count(n)
    if count < 0:
        raise InvariantError("trial count must be nonnegative")
    supports, signs = _draw(n, 2 * k - 1, count, make_rng(seed, k, stream))
    return RandomSetRealization(
        n=n,
        k=k,
        seed=seed,
        supports=tuple(tuple(int(i) for i in row) for row in supports),
        signs=tuple(tuple(int(v) for v in row) for row in signs),
        stream=stream,
    )


# -- coverage event ---------------------------------------------------------


@dataclass
class EkResult:
    covered: bool
    missing: list[tuple[int, ...]]
    checked: int
    sampled: bool = False


def _pattern(n: int, support: Sequence[int], signs: Sequence[int]) -> tuple[int, ...]:
    out = [0] * n
    for i, s in zip(support, signs):
        out[i] = s
    return tuple(out)


def check_Ek(realization: RandomSetRealization, cap: int = 20, sample: int | None = None, seed: int = DEFAULT_SEED) -> EkResult:
    """Whether every sign pattern with ``k`` nonzeros is hit by some trial.

    Exhaustive up to dimension ``cap``; beyond it ``sample`` random patterns
    are tested instead (and the result is flagged as sampled).
    """
    n, k = realization.n, realization.k
    if n > cap:
        if sample is None:
            raise CapExceededError(f"n={n} exceeds the E_k enumeration cap {cap}; pass sample=")
        return _check_Ek_sampled(realization, sample, seed)
    hit = set()
    for s, x in zip(realization.supports, realization.signs):
        for sub in itertools.combinations(s, k):
            hit.add((sub, tuple(x[i] for i in sub)))
    missing = []
    for sub in itertools.combinations(range(n), k):
        for sg in itertools.product((-1, 1), repeat=k):
            if (sub, sg) not in hit:
                missing.append(_pattern(n, sub, sg))
    missing.sort()
    return EkResult(covered=not missing, missing=missing, checked=comb(n, k) * 2**k)


def _check_Ek_sampled(realization: RandomSetRealization, sample: int, seed: int) -> EkResult:
    n, k = realization.n, realization.k
    rng = make_rng(seed, 0xE, k)
    supp, sg = _draw(n, k, sample, rng)
    mask = np.zeros((realization.count, n), dtype=bool)
    for t, s in enumerate(realization.supports):
        mask[t, list(s)] = True
    signs = np.array(realization.signs, dtype=np.int8).reshape(realization.count, n)
    missing = []
    for row, srow in zip(supp, sg):
        sel = mask[:, row].all(axis=1) & (signs[:, row] == srow[row]).all(axis=1)
        if not sel.any():
            missing.append(_pattern(n, row.tolist(), srow[row].tolist()))
    missing = sorted(set(missing))
    return EkResult(covered=not missing, missing=missing, checked=sample, sampled=True)


# -- probabilities ------------------------------------------------------------


def trial_success_prob(n: int, k: int) -> Fraction:
    """Exact probability that one trial hits a fixed pattern with ``k`` nonzeros."""
    _check_nk(n, k)
    return Fraction(comb(n - k, k - 1), comb(n, 2 * k - 1) * 2**k)


def rate_function(t: float) -> float:
    """``2^t (1-t)^(1-t) t^t`` on [0, 1]; minimal at t = 1/3 with value 2/3."""
    if t in (0.0, 1.0):
        return 2.0**t
    return 2.0**t * (1 - t) ** (1 - t) * t**t


def _log_comb(n: int, k: int) -> float:
    if n <= 1000:
        return math.log(comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_q(n: int, k: int) -> float:
    return _log_comb(n - k, k - 1) - _log_comb(n, 2 * k - 1) - k * LN2


def _log_stirling(n: int, k: int) -> float:
    t = k / n
    return k * LN2 - math.log(2 * n * n) + (n - k) * math.log1p(-t) + k * math.log(t)


def _log_final(n: int) -> float:
    return n * math.log(2.0 / 3.0) - math.log(2 * n * n)


def _geq(log_a: float, log_b: float) -> bool:
    return log_a >= log_b + math.log1p(-CHAIN_RTOL)


@dataclass
class ProbabilityReport:
    """Per-trial hit probability and its two lower bounds for one ``(n, k)``."""

    n: int
    k: int
    q: Fraction
    stirling: float
    final: float
    log_q: float
    log_stirling: float
    log_final: float
    trials: int
    q_ge_stirling: bool
    stirling_ge_final: bool
    mc_frequency: float | None = None
    mc_radius: float | None = None

    @property
    def chain_holds(self) -> bool:
        return self.q_ge_stirling and self.stirling_ge_final


def bound_chain(n: int, k: int) -> ProbabilityReport:
    if n < 2:
        raise InvariantError("bound chain needs n >= 2")
    _check_nk(n, k)
    lq, ls, lf = _log_q(n, k), _log_stirling(n, k), _log_final(n)
    return ProbabilityReport(
        n=n,
        k=k,
        q=trial_success_prob(n, k),
        stirling=math.exp(ls),
        final=math.exp(lf),
        log_q=lq,
        log_stirling=ls,
        log_final=lf,
        trials=default_count(n),
        q_ge_stirling=_geq(lq, ls),
        stirling_ge_final=_geq(ls, lf),
    )


@dataclass
class MonteCarloResult:
    n: int
    k: int
    pattern: tuple[int, ...]
    trials: int
    hits: int
    q: Fraction

    @property
    def frequency(self) -> float:
        return self.hits / self.trials

    @property
    def sigma(self) -> float:
        q = float(self.q)
        return math.sqrt(q * (1 - q) / self.trials)

    @property
    def z(self) -> float:
        return (self.frequency - float(self.q)) / self.sigma

    def within(self, nsigma: float = 3.0) -> bool:
        return abs(self.z) <= nsigma


def monte_carlo_hit_frequency(
    n: int, k: int, trials: int, seed: int = DEFAULT_SEED, pattern: Sequence[int] | None = None, chunk: int = 200_000
) -> MonteCarloResult:
    """Empirical hit rate of a fixed pattern (default: first k coords, alternating signs)."""
    _check_nk(n, k)
    if pattern is None:
        pattern = tuple(((-1) ** i if i < k else 0) for i in range(n))
    pattern = tuple(int(v) for v in pattern)
    supp = [i for i, v in enumerate(pattern) if v]
    if len(supp) != k:
        raise InvariantError(f"pattern must have exactly {k} nonzeros")
    want = np.array([pattern[i] for i in supp], dtype=np.int8)
    rng = make_rng(seed, k, 0x3C)
    hits, done = 0, 0
    while done < trials:
        m = min(chunk, trials - done)
        supports, signs = _draw(n, 2 * k - 1, m, rng)
        contains = np.ones(m, dtype=bool)
        for i in supp:
            contains &= (supports == i).any(axis=1)
        agree = (signs[:, supp] == want).all(axis=1)
        hits += int((contains & agree).sum())
        done += m
    return MonteCarloResult(n, k, pattern, trials, hits, trial_success_prob(n, k))


# -- threshold scan ---------------------------------------------------------


def union_size_holds(n: int) -> bool:
    """ceil(n/2) * floor(2^n / n^2) < 2^(n-1), exactly."""
    return ((n + 1) // 2) * default_count(n) < 2 ** (n - 1)


@dataclass
class ThresholdScan:
    """Per-n worst margin (log RHS - log LHS) of the coverage inequality.

    A nonnegative margin means
    ``(1 - q)^floor(2^n/n^2) <= 2^-k e^(-2n) / C(n, k)`` for that ``(n, k)``.
    """

    rows: list[dict] = field(default_factory=list)
    n0: int | None = None

    def to_csv(self) -> str:
        head = "n,trials,worst_k,worst_margin,holds,union_bound,union_holds"
        out = [head]
        for r in self.rows:
            out.append(
                f"{r['n']},{r['trials']},{r['worst_k']},{r['worst_margin']!r},"
                f"{int(r['holds'])},{r['union_bound']},{int(r['union_holds'])}"
            )
        return "\n".join(out) + "\n"


def _log_lhs(n: int, k: int, trials: int) -> float:
    if trials == 0:
        return 0.0
    lq = _log_q(n, k)
    if lq > -30:
        log_u = math.log(-math.log1p(-math.exp(lq)))
    else:
        log_u = lq
    e = math.log(trials) + log_u
    return -math.inf if e > 700 else -math.exp(e)


def estimate_threshold_n(n_min: int = 2, n_max: int = 500) -> ThresholdScan:
    if n_min < 2 or n_max < n_min or n_max > 10_000:
        raise InvariantError("scan range must satisfy 2 <= n_min <= n_max <= 10^4")
    scan = ThresholdScan()
    for n in range(n_min, n_max + 1):
        trials = default_count(n)
        worst_k, worst = None, math.inf
        for k in range(1, (n + 1) // 2 + 1):
            log_rhs = -k * LN2 - 2 * n - _log_comb(n, k)
            margin = log_rhs - _log_lhs(n, k, trials)
            if margin < worst:
                worst_k, worst = k, margin
        ub = ((n + 1) // 2) * trials
        scan.rows.append(
            dict(
                n=n,
                trials=trials,
                worst_k=worst_k,
                worst_margin=worst,
                holds=worst >= 0,
                union_bound=ub,
                union_holds=ub < 2 ** (n - 1),
            )
        )
    n0 = None
    for r in reversed(scan.rows):
        if not r["holds"]:
            break
        n0 = r["n"]
    scan.n0 = n0
    return scan
