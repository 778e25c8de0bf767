"""Exponent estimates from dyadic ladders ``Q = 2**k0, ..., 2**k1``.

At each rung the best value ``v(Q)`` is turned into a slope
``log(1/v) / log Q`` (divided by ``m`` for the multiplicative objective).
The ordinary exponent is read off as the largest slope over a trailing
window of rungs and the uniform exponent as the smallest. The estimate keeps
the full ladder so that callers can apply their own tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Matrix, TargetShift, as_matrix, as_shift
from .errors import DomainError, InsufficientLadder
from .search import ApproxWitness, Objective, SearchConfig, min_ladder

MIN_RUNGS = 4
DEFAULT_TAIL = Fraction(1, 4)


class Kind(enum.Enum):
    ORDINARY = "ordinary"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class LadderSpec:
    k0: int
    k1: int

    def __post_init__(self):
        if not (0 <= self.k0 < self.k1):
            raise DomainError("ladder needs 0 <= k0 < k1")

    @classmethod
    def parse(cls, text: str) -> LadderSpec:
        try:
            a, b = text.split(":")
            return cls(int(a), int(b))
        except ValueError as exc:
            raise DomainError(f"ladder must look like k0:k1, got {text!r}") from exc

    def values(self) -> list[int]:
        return [1 << k for k in range(self.k0, self.k1 + 1)]

    def __str__(self) -> str:
        return f"{self.k0}:{self.k1}"


@dataclass(frozen=True)
class RungStat:
    Q: int
    value: Fraction | None
    slope: float | None
    q: tuple[int, ...] | None = None
    error: str | None = None


@dataclass(frozen=True)
class ExponentEstimate:
    kind: Kind
    objective: Objective
    value: float
    rungs: tuple[RungStat, ...]
    window: tuple[int, int] | None  # (first Q, last Q) of the trailing window
    window_min: float | None
    window_max: float | None
    last_octave_range: float | None
    exact_hit: bool = False
    witness: ApproxWitness | None = None

    @property
    def ordinary(self) -> float:
        return math.inf if self.exact_hit else self.window_max

    @property
    def uniform(self) -> float:
        return math.inf if self.exact_hit else self.window_min

    @property
    def window_range(self) -> float:
        if self.exact_hit or self.window_min is None:
            return 0.0
        return self.window_max - self.window_min

    @property
    def slopes(self) -> list[tuple[int, float]]:
        return [(r.Q, r.slope) for r in self.rungs if r.slope is not None]

    def as_record(self) -> dict:
        return {
            "kind": self.kind.value,
            "objective": self.objective.value,
            "value": _fmt(self.value),
            "exact_hit": self.exact_hit,
            "window": list(self.window) if self.window else None,
            "window_min": _fmt(self.window_min),
            "window_max": _fmt(self.window_max),
            "last_octave_range": _fmt(self.last_octave_range),
            "witness_q": list(self.witness.q) if self.witness else None,
            "ladder": [
                {"Q": r.Q, "value": None if r.value is None else str(r.value),
                 "slope": _fmt(r.slope), "q": None if r.q is None else list(r.q),
                 "error": r.error}
                for r in self.rungs
            ],
        }


def _fmt(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf"
    return round(float(x), 12)


def log_ratio(value: Fraction, Q: int) -> float:
    """``log(1/value) / log(Q)`` without underflow for tiny rationals."""
    v = Fraction(value)
    return (math.log(v.denominator) - math.log(v.numerator)) / math.log(Q)


def _tail(slopes: list[tuple[int, float]], tail: Fraction) -> list[tuple[int, float]]:
    size = max(MIN_RUNGS, math.ceil(len(slopes) * tail))
    return slopes[-size:]


def estimate_exponent(X, theta=None, kind: Kind = Kind.ORDINARY,
                      objective: Objective = Objective.SUPNORM,
                      ladder: LadderSpec | str | Sequence[int] = LadderSpec(1, 20),
                      cfg: SearchConfig | None = None,
                      tail: Fraction = DEFAULT_TAIL) -> ExponentEstimate:
    """Estimate the ordinary or uniform exponent of ``(X, theta)``."""
    X = as_matrix(X)
    theta = as_shift(theta, X.m)
    if isinstance(ladder, str):
        ladder = LadderSpec.parse(ladder)
    Qs = ladder.values() if isinstance(ladder, LadderSpec) else list(ladder)
    div = X.m if objective is Objective.MULTIPLICATIVE else 1

    rungs: list[RungStat] = []
    for rung in _run_until_exact(X, theta, objective, Qs, cfg):
        w = rung.witness
        if w is None:
            rungs.append(RungStat(rung.Q, None, None, None, rung.error))
            continue
        if w.exact_solution:
            rungs.append(RungStat(rung.Q, w.value, math.inf, w.q))
            return ExponentEstimate(kind, objective, math.inf, tuple(rungs), None,
                                    None, None, None, exact_hit=True, witness=w)
        slope = None
        if rung.Q > 1 and rung.running_min > 0:
            slope = log_ratio(rung.running_min, rung.Q) / div
        rungs.append(RungStat(rung.Q, rung.running_min, slope, w.q))

    slopes = [(r.Q, r.slope) for r in rungs if r.slope is not None]
    if len(slopes) < MIN_RUNGS:
        raise InsufficientLadder(f"only {len(slopes)} usable rungs, need {MIN_RUNGS}")
    window = _tail(slopes, tail)
    lo = min(s for _, s in window)
    hi = max(s for _, s in window)
    octave = abs(slopes[-1][1] - slopes[-2][1])
    value = hi if kind is Kind.ORDINARY else lo
    return ExponentEstimate(kind, objective, value, tuple(rungs), (window[0][0], window[-1][0]),
                            lo, hi, octave)


def _run_until_exact(X, theta, objective, Qs, cfg):
    # rungs are independent; stop at the first exact hit since later values stay 0
    for Q in Qs:
        (rung,) = min_ladder(X, theta, objective, [Q], cfg)
        yield rung
        if rung.witness is not None and rung.witness.exact_solution:
            return


def specialize_simultaneous(x: Sequence, theta=None, kind: Kind = Kind.ORDINARY,
                            ladder: LadderSpec | str | Sequence[int] = LadderSpec(1, 20),
                            cfg: SearchConfig | None = None,
                            tail: Fraction = DEFAULT_TAIL) -> ExponentEstimate:
    """Simultaneous exponent of a point ``x`` in R^n: a single column, ``q >= 1``."""
    base = cfg or SearchConfig()
    cfg = SearchConfig(base.strategy, base.precision_bits, base.max_precision_bits,
                       base.node_budget, positive_q=True)
    return estimate_exponent(Matrix.column(x), theta, kind, Objective.SUPNORM, ladder, cfg, tail)


def specialize_dual(x: Sequence, theta=None, kind: Kind = Kind.ORDINARY,
                    ladder: LadderSpec | str | Sequence[int] = LadderSpec(1, 20),
                    cfg: SearchConfig | None = None,
                    tail: Fraction = DEFAULT_TAIL) -> ExponentEstimate:
    """Dual exponent of ``x`` in R^n: the linear form ``q . x`` with a scalar shift."""
    if theta is not None and not isinstance(theta, (list, tuple, TargetShift)):
        theta = (theta,)
    return estimate_exponent(Matrix.row(x), theta, kind, Objective.SUPNORM, ladder, cfg, tail)
