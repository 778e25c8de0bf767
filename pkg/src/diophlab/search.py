"""Finite-range minimisation of ``||Xq + theta||`` and ``Pi<Xq + theta>``.

Both objectives are solved over an integer model of the problem: every entry
of ``X`` and ``theta`` is written over one common denominator ``D`` so that
``D * (Xq + theta) = Aq + B`` with integer ``A`` and ``B``. Exact inputs give
exact answers. Irrational inputs are pinned to a dyadic approximation whose
error is tracked; the search raises the precision until the minimiser is
separated from every competitor by more than the accumulated error.

Two strategies share the model:

``EXHAUSTIVE``
    vectorised evaluation of every admissible ``q``; always available and
    used as the oracle.
``REDUCTION``
    close-vector enumeration on an LLL-reduced lattice. The enumeration
    radius is bracketed between an empty ball and one holding a solution,
    so the answer is the true minimum, not a heuristic one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    Matrix,
    TargetShift,
    as_matrix,
    as_shift,
    plus_product,
)
from .errors import BudgetExceeded, ConfigError, DiophlabError, DomainError, PrecisionExhausted
from .lattice import EnumerationCut, enumerate_close, lll_reduce


class Strategy(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    REDUCTION = "reduction"


class Objective(enum.Enum):
    SUPNORM = "supnorm"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class SearchConfig:
    """Search knobs.

    ``positive_q`` restricts to vectors whose first nonzero coordinate is
    positive; for a single column this is the restriction to ``q >= 1``.
    """

    strategy: Strategy = Strategy.REDUCTION
    precision_bits: int = DEFAULT_PRECISION_BITS
    max_precision_bits: int = MAX_PRECISION_BITS
    node_budget: int = 2_000_000
    positive_q: bool = False

    def __post_init__(self):
        if self.precision_bits < 8 or self.max_precision_bits < self.precision_bits:
            raise ConfigError("precision_bits must be >= 8 and <= max_precision_bits")
        if self.node_budget < 1:
            raise ConfigError("node_budget must be positive")


@dataclass(frozen=True)
class ApproxWitness:
    """A minimiser ``q`` with realising ``p``: the objective equals ``value``.

    ``value`` is exact for exact inputs; otherwise it is the objective of the
    dyadic approximation at ``bits`` and lies within ``value_error`` of the
    true objective.
    """

    q: tuple[int, ...]
    p: tuple[int, ...]
    value: Fraction
    Q: int
    objective: Objective
    exact_solution: bool = False
    value_error: Fraction = Fraction(0)
    bits: int | None = None

    def as_row(self) -> dict:
        return {
            "Q": self.Q,
            "q": " ".join(map(str, self.q)),
            "p": " ".join(map(str, self.p)),
            "value": str(self.value),
            "value_float": float(self.value),
            "value_error": str(self.value_error),
            "exact_solution": self.exact_solution,
            "bits": "" if self.bits is None else self.bits,
        }


# ---------------------------------------------------------------------------
# Integer model


@dataclass(frozen=True)
class IntegerModel:
    A: tuple[tuple[int, ...], ...]
    B: tuple[int, ...]
    D: int
    col_err: tuple[tuple[Fraction, ...], ...]  # |X_ji - A_ji/D|
    shift_err: tuple[Fraction, ...]
    exact: bool
    period: int | None  # q -> q + period*e_i leaves every value unchanged (exact X only)

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0])

    @classmethod
    def build(cls, X: Matrix, theta: TargetShift, bits: int) -> IntegerModel:
        vals, errs = X.approx(bits)
        tvals, terrs = theta.approx(bits)
        xden = 1
        for row in vals:
            for v in row:
                xden = math.lcm(xden, v.denominator)
        D = xden
        for v in tvals:
            D = math.lcm(D, v.denominator)
        A = tuple(tuple(int(v * D) for v in row) for row in vals)
        B = tuple(int(v * D) for v in tvals)
        exact = X.is_exact and theta.is_exact
        return cls(A, B, D, tuple(map(tuple, errs)), tuple(terrs), exact,
                   xden if X.is_exact else None)

    def residues(self, q: Sequence[int]) -> tuple[list[int], list[int]]:
        """Integer representatives ``r`` in [-D/2, D/2) and ``p`` with ``D(Xq+p+theta) = r``."""
        reps, ps = [], []
        D = self.D
        for row, b in zip(self.A, self.B):
            N = sum(a * qi for a, qi in zip(row, q)) + b
            k = (2 * N + D) // (2 * D)
            reps.append(N - D * k)
            ps.append(-k)
        return reps, ps

    def coord_errors(self, q: Sequence[int]) -> list[Fraction]:
        return [sum((e * abs(qi) for e, qi in zip(row, q)), Fraction(0)) + te
                for row, te in zip(self.col_err, self.shift_err)]

    def error_bound(self, box: int, objective: Objective) -> Fraction:
        """Worst objective error over every q with |q_i| <= box."""
        if self.exact:
            return Fraction(0)
        E = max(self.coord_errors([box] * self.n))
        if objective is Objective.SUPNORM:
            return E
        half = Fraction(1, 2)
        return (half + E) ** self.m - half ** self.m

    def objective_error(self, q: Sequence[int], objective: Objective) -> Fraction:
        if self.exact:
            return Fraction(0)
        errs = self.coord_errors(q)
        if objective is Objective.SUPNORM:
            return max(errs)
        reps, _ = self.residues(q)
        hi = lo = Fraction(1)
        for r, e in zip(reps, errs):
            y = Fraction(abs(r), self.D)
            hi *= y + e
            lo *= y
        return hi - lo


def _numerator(model: IntegerModel, q: Sequence[int], objective: Objective) -> int:
    reps, _ = model.residues(q)
    if objective is Objective.SUPNORM:
        return max(abs(r) for r in reps)
    out = 1
    for r in reps:
        out *= abs(r)
    return out


def _scale(model: IntegerModel, objective: Objective) -> int:
    return model.D if objective is Objective.SUPNORM else model.D ** model.m


def _canonical_positive(q: Sequence[int]) -> bool:
    for v in q:
        if v:
            return v > 0
    return False


def tie_key(num: int, q: Sequence[int]) -> tuple:
    """Total order used to pick among minimisers."""
    return (num, max(abs(v) for v in q), 0 if _canonical_positive(q) else 1, tuple(q))


# ---------------------------------------------------------------------------
# Exhaustive strategy


def _int_dtype(model: IntegerModel, bound: int, objective: Objective):
    row_sum = max(sum(abs(a) for a in row) for row in model.A)
    peak = 2 * (row_sum * bound + max(abs(b) for b in model.B)) + model.D
    if objective is Objective.MULTIPLICATIVE:
        peak = max(peak, (model.D // 2 + 1) ** model.m)
    return np.int64 if peak < 2 ** 62 else object


def _box_grid(bounds: Sequence[int]) -> np.ndarray:
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _plus_region(n: int, cap: int, _cache: dict | None = None) -> np.ndarray:
    """All q in Z^n with prod max(1, |q_i|) <= cap."""
    cache = {} if _cache is None else _cache
    key = (n, cap)
    if key in cache:
        return cache[key]
    if n == 1:
        out = np.arange(-cap, cap + 1, dtype=np.int64).reshape(-1, 1)
    else:
        blocks = []
        for first in range(-cap, cap + 1):
            sub = _plus_region(n - 1, cap // max(1, abs(first)), cache)
            head = np.full((sub.shape[0], 1), first, dtype=np.int64)
            blocks.append(np.hstack([head, sub]))
        out = np.vstack(blocks)
    cache[key] = out
    return out


def _plus_region_size(n: int, cap: int) -> int:
    if n == 1:
        return 2 * cap + 1
    total = _plus_region_size(n - 1, cap)  # first coordinate 0
    for a in range(1, cap + 1):
        total += 2 * _plus_region_size(n - 1, cap // a)
    return total


def _evaluate_grid(model: IntegerModel, qs: np.ndarray, objective: Objective, dtype) -> np.ndarray:
    A = np.array(model.A, dtype=dtype)
    B = np.array(model.B, dtype=dtype).reshape(-1, 1)
    qq = qs.astype(dtype).T
    N = A @ qq + B
    D = model.D
    reps = N - D * ((2 * N + D) // (2 * D))
    absr = np.abs(reps)
    if objective is Objective.SUPNORM:
        return absr.max(axis=0)
    return np.prod(absr, axis=0)


def _exhaustive(model: IntegerModel, Q: int, objective: Objective, cfg: SearchConfig,
                slack: int) -> list[tuple[int, tuple[int, ...]]]:
    n = model.n
    if objective is Objective.SUPNORM:
        bound = Q if model.period is None else min(Q, model.period)
        size = (2 * bound + 1) ** n
        if size > cfg.node_budget:
            raise BudgetExceeded(f"exhaustive box has {size} points, budget {cfg.node_budget}")
        qs = _box_grid([bound] * n)
        cap = bound
    else:
        cap = Q ** n
        size = _plus_region_size(n, cap)
        if size > cfg.node_budget:
            raise BudgetExceeded(f"exhaustive region has {size} points, budget {cfg.node_budget}")
        qs = _plus_region(n, cap)
    keep = np.any(qs != 0, axis=1)
    if cfg.positive_q:
        first = np.zeros(len(qs), dtype=np.int64)
        for col in range(n - 1, -1, -1):
            first = np.where(qs[:, col] != 0, qs[:, col], first)
        keep &= first > 0
    qs = qs[keep]
    vals = _evaluate_grid(model, qs, objective, _int_dtype(model, cap, objective))
    best = vals.min()
    idx = np.nonzero(np.asarray(vals <= best + slack, dtype=bool))[0]
    out = [(int(vals[i]), tuple(int(x) for x in qs[i])) for i in idx]
    return sorted(out, key=lambda t: tie_key(*t))


# ---------------------------------------------------------------------------
# Reduction strategy


LOCAL_BUDGET = 4_000


def _box_candidates(model: IntegerModel, bounds: Sequence[int], radius: int,
                    budget: int) -> list[tuple[int, ...]]:
    """Every nonzero q with |q_i| <= bounds_i and ||D(Xq+theta)||_inf <= radius (integer units).

    Raises :class:`EnumerationCut` past ``budget`` nodes; its ``partial``
    attribute then holds the admissible q found so far.
    """
    m, n, D = model.m, model.n, model.D
    radius = max(1, radius)
    L = 1
    for b in bounds:
        L = math.lcm(L, b)
    weights = [radius * (L // b) for b in bounds]
    rows = []
    for i in range(n):
        rows.append([L * model.A[j][i] for j in range(m)] + [weights[i] if k == i else 0 for k in range(n)])
    for j in range(m):
        rows.append([L * D if k == j else 0 for k in range(m)] + [0] * n)
    target = [-L * b for b in model.B] + [0] * n
    R = L * radius

    def admissible(vecs):
        out = []
        for v in vecs:
            q = tuple(v[m + i] // weights[i] for i in range(n))
            if not any(q) or any(abs(qi) > b for qi, b in zip(q, bounds)):
                continue
            if all(abs(v[j] - target[j]) <= R for j in range(m)):
                out.append(q)
        return out

    red = lll_reduce(rows)
    try:
        vecs = enumerate_close(red, target, (m + n) * R * R, budget)
    except EnumerationCut as cut:
        cut.partial = admissible(cut.partial)
        raise
    return admissible(vecs)


def _initial_radius(model: IntegerModel, Q: int) -> int:
    # D * Q^(-n/m), the homogeneous Dirichlet value
    m, n, D = model.m, model.n, model.D
    root = _iroot(Q ** n, m)
    return max(1, D // max(1, root))


def _iroot(x: int, k: int) -> int:
    if x < 2:
        return x
    r = int(round(x ** (1.0 / k))) if x.bit_length() < 1000 else 1 << (x.bit_length() // k)
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def _filter_positive(qs: Iterable[tuple[int, ...]], positive: bool) -> list[tuple[int, ...]]:
    return [q for q in qs if not positive or _canonical_positive(q)]


def _scored(model, qs, objective, positive, radius):
    out = [(_numerator(model, q, objective), q) for q in set(_filter_positive(qs, positive))]
    return [t for t in out if t[0] <= radius]


def _reduction_supnorm(model: IntegerModel, Q: int, cfg: SearchConfig,
                       slack: int) -> list[tuple[int, tuple[int, ...]]]:
    """Bracket the optimal radius, then enumerate everything inside it.

    ``empty`` is the largest radius known to hold no solution, ``upper`` the
    value of the best solution seen so far and ``crowded`` the smallest
    radius whose ball overflowed the current node budget. A crowded ball
    need not contain a solution: the Euclidean ball is wider than the
    sup-norm box. Once the bracket is tight the budget grows instead.
    """
    bound = Q if model.period is None else min(Q, model.period)
    bounds = [bound] * model.n
    half = model.D // 2 + 1
    radius = min(_initial_radius(model, bound), half)
    empty, upper, crowded = 0, None, None
    budget = min(LOCAL_BUDGET, cfg.node_budget)
    sup = Objective.SUPNORM
    while True:
        try:
            scored = _scored(model, _box_candidates(model, bounds, radius, budget), sup,
                             cfg.positive_q, radius)
        except EnumerationCut as cut:
            found = _scored(model, cut.partial, sup, cfg.positive_q, radius)
            if found:
                best = min(t[0] for t in found) + slack
                upper = best if upper is None else min(upper, best)
            crowded = radius if crowded is None else min(crowded, radius)
            if _tight(empty, crowded):
                if budget >= cfg.node_budget:
                    raise BudgetExceeded(str(cut)) from None
                budget = min(cfg.node_budget, 4 * budget)
            radius = _next_radius(empty, upper, crowded, half)
            continue
        if scored:
            best = min(t[0] for t in scored)
            if best + slack > radius:
                radius = best + slack
                continue
            keep = [t for t in scored if t[0] <= best + slack]
            return sorted(keep, key=lambda t: tie_key(*t))
        if radius >= half:
            raise DiophlabError("no admissible q found")  # unreachable for Q >= 1
        empty = radius
        if crowded is not None and crowded <= empty:
            crowded = None
        radius = _next_radius(empty, upper, crowded, half)


def _tight(empty: int, hi: int) -> bool:
    return hi - empty <= max(1, empty >> 16)


def _next_radius(empty: int, upper: int | None, crowded: int | None, half: int) -> int:
    # geometric bisection of (empty, hi]; the first shrink from nothing jumps down by 2^8
    known = [x for x in (upper, crowded) if x is not None]
    if not known:
        return min(2 * max(empty, 1), half)
    hi = min(known)
    if _tight(empty, hi):
        return hi
    mid = hi >> 8 if empty == 0 else math.isqrt(empty * hi)
    return max(empty + 1, min(mid, hi))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _reduction_multiplicative(model: IntegerModel, Q: int, cfg: SearchConfig,
                              slack: int) -> list[tuple[int, tuple[int, ...]]]:
    """Cover Pi_+(q) <= Q^n by dyadic boxes, each searched at the incumbent radius."""
    if model.m != 1:
        return _exhaustive(model, Q, Objective.MULTIPLICATIVE, cfg, slack)
    n = model.n
    cap = Q ** n
    if n == 1:
        return _reduction_supnorm(model, Q, cfg, slack)
    radius = _reduction_supnorm(model, Q, cfg, 0)[0][0] + slack
    top = cap.bit_length() - 1  # largest S with 2^S <= Q^n
    mult = Objective.MULTIPLICATIVE
    seen: set[tuple[int, ...]] = set()
    restart = True
    while restart:
        restart = False
        seen.clear()
        for shape in _compositions(top, n):
            bounds = [min((1 << (li + 1)) - 1, cap) for li in shape]
            try:
                qs = _box_candidates(model, bounds, radius, min(LOCAL_BUDGET, cfg.node_budget))
            except EnumerationCut as cut:
                better = [t for t in _scored(model, [q for q in cut.partial if plus_product(q) <= cap],
                                             mult, cfg.positive_q, radius)]
                if better and min(t[0] for t in better) + slack < radius:
                    radius = min(t[0] for t in better) + slack
                    restart = True
                    break
                try:
                    qs = _box_candidates(model, bounds, radius, cfg.node_budget)
                except EnumerationCut as cut2:
                    raise BudgetExceeded(str(cut2)) from None
            seen.update(q for q in qs if plus_product(q) <= cap)
    scored = _scored(model, seen, mult, cfg.positive_q, radius)
    best = min(t[0] for t in scored)
    keep = [t for t in scored if t[0] <= best + slack]
    return sorted(keep, key=lambda t: tie_key(*t))


# ---------------------------------------------------------------------------
# Public entry points



def _solve(model: IntegerModel, Q: int, objective: Objective, cfg: SearchConfig, slack: int):
    if cfg.strategy is Strategy.EXHAUSTIVE:
        return _exhaustive(model, Q, objective, cfg, slack)
    if objective is Objective.SUPNORM:
        return _reduction_supnorm(model, Q, cfg, slack)
    return _reduction_multiplicative(model, Q, cfg, slack)


def _same_class(q1: Sequence[int], q2: Sequence[int], symmetric: bool) -> bool:
    return tuple(q1) == tuple(q2) or (symmetric and tuple(q1) == tuple(-v for v in q2))


def _best(X, theta, Q: int, objective: Objective, cfg: SearchConfig | None) -> ApproxWitness:
    cfg = cfg or SearchConfig()
    X = as_matrix(X)
    theta = as_shift(theta, X.m)
    if not isinstance(Q, int) or Q < 1:
        raise DomainError("Q must be a positive integer")
    bits = cfg.precision_bits
    while True:
        model = IntegerModel.build(X, theta, bits)
        scale = _scale(model, objective)
        if model.exact:
            num, q = _solve(model, Q, objective, cfg, 0)[0]
            _, p = model.residues(q)
            return ApproxWitness(q, tuple(p), Fraction(num, scale), Q, objective,
                                 exact_solution=(num == 0))
        # worst-case error over the admissible region bounds the slack
        box = Q ** (X.n if objective is Objective.MULTIPLICATIVE else 1)
        err = model.error_bound(box, objective)
        slack = math.ceil(2 * err * scale)
        contenders = _solve(model, Q, objective, cfg, slack)
        num, q = contenders[0]
        symmetric = theta.is_zero
        # equal approximations are treated as genuine ties (e.g. a rational column)
        rivals = [c for c in contenders[1:] if not _same_class(c[1], q, symmetric) and c[0] != num]
        if not rivals:
            _, p = model.residues(q)
            err = model.objective_error(q, objective)
            # an exactly vanishing factor (e.g. a zero row) is a genuine exact solution
            return ApproxWitness(q, tuple(p), Fraction(num, scale), Q, objective,
                                 exact_solution=(num == 0 and err == 0),
                                 value_error=err, bits=bits)
        bits *= 2
        if bits > cfg.max_precision_bits:
            raise PrecisionExhausted(
                f"minimiser at Q={Q} not separated at {cfg.max_precision_bits} bits")


def best_supnorm(X, theta, Q: int, cfg: SearchConfig | None = None) -> ApproxWitness:
    """Minimise ``||Xq + theta||`` over nonzero ``q`` with ``|q| <= Q``."""
    return _best(X, theta, Q, Objective.SUPNORM, cfg)


def best_multiplicative(X, theta, Q: int, cfg: SearchConfig | None = None) -> ApproxWitness:
    """Minimise ``Pi<Xq + theta>`` over nonzero ``q`` with ``Pi_+(q) <= Q**n``."""
    return _best(X, theta, Q, Objective.MULTIPLICATIVE, cfg)


@dataclass(frozen=True)
class LadderRung:
    Q: int
    witness: ApproxWitness | None
    running_min: Fraction | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.witness is not None


def min_ladder(X, theta, objective: Objective, ladder: Sequence[int],
               cfg: SearchConfig | None = None) -> list[LadderRung]:
    """Best values along an increasing ladder; a failing rung is recorded, not raised."""
    ladder = list(ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise DomainError("ladder must be strictly increasing")
    X = as_matrix(X)
    theta = as_shift(theta, X.m)
    solver = best_supnorm if objective is Objective.SUPNORM else best_multiplicative
    out: list[LadderRung] = []
    running = None
    for Q in ladder:
        try:
            w = solver(X, theta, Q, cfg)
        except (PrecisionExhausted, BudgetExceeded) as exc:
            out.append(LadderRung(Q, None, running, f"{type(exc).__name__}: {exc}"))
            continue
        running = w.value if running is None else min(running, w.value)
        out.append(LadderRung(Q, w, running))
    return out
