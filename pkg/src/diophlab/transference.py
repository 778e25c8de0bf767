"""Weighted times, diagonal flows and the two-way reduction between
inhomogeneous approximation rates and shrinking-target membership.

A weighted time ``t`` is built from ``s in Z_+^m`` and ``l in Z_+^n`` by
shifting both blocks by ``zeta = (sigma(s) - lam sigma(l)) / (m + lam n)``,
which makes the first block sum to ``lam`` times the second. The flow
``g_t`` scales the first ``m`` coordinates by ``2^{t_j}`` and the last ``n``
by ``2^{-t_{m+i}}``; since ``t`` is rational these factors are carried as
:class:`~diophlab.core.ScaledPow2` so that every comparison stays exact.

:func:`step1_reduce` turns a good approximation ``(p, q)`` at scale ``Q``
into a weighted time whose target set contains ``X``; :func:`step2_reduce`
goes back from membership to an approximation. :func:`round_trip` chains
the two.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    Matrix,
    ScaledPow2,
    TargetShift,
    as_matrix,
    as_shift,
    compare_power,
    plus_product,
    pow2,
    render,
)
from .errors import (
    ConstructionError,
    DimensionError,
    DomainError,
    PrecisionExhausted,
    PreconditionFailed,
)
from .search import ApproxWitness


class RateKind(enum.Enum):
    MULTIPLICATIVE = "multiplicative"
    ORDINARY = "ordinary"


@dataclass(frozen=True)
class LambdaParam:
    """The weight ``lam`` tying the two blocks of a weighted time together.

    ``rate`` is the approximation rate ``v`` it came from, with
    ``lam = (m/n) v``. The ordinary kind restricts ``s`` and ``l`` to constant
    blocks.
    """

    value: Fraction
    kind: RateKind = RateKind.MULTIPLICATIVE

    def __post_init__(self):
        v = Fraction(self.value)
        if v <= 0:
            raise DomainError("lambda must be positive")
        object.__setattr__(self, "value", v)
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", RateKind(self.kind))

    @classmethod
    def from_rate(cls, rate, m: int, n: int, kind: RateKind = RateKind.MULTIPLICATIVE) -> LambdaParam:
        return cls(Fraction(m, n) * Fraction(rate), kind)

    def rate(self, m: int, n: int) -> Fraction:
        return self.value * Fraction(n, m)

    @property
    def ordinary(self) -> bool:
        return self.kind is RateKind.ORDINARY


def _as_lambda(lam) -> LambdaParam:
    return lam if isinstance(lam, LambdaParam) else LambdaParam(Fraction(lam))


@dataclass(frozen=True)
class WeightedTime:
    s: tuple[int, ...]
    l: tuple[int, ...]
    lam: Fraction

    def __post_init__(self):
        s = tuple(int(x) for x in self.s)
        l = tuple(int(x) for x in self.l)
        lam = Fraction(self.lam)
        if not s or not l:
            raise DimensionError("both blocks need at least one coordinate")
        if min(s) < 0 or min(l) < 0:
            raise DomainError("s and l must be nonnegative")
        if lam <= 0:
            raise DomainError("lambda must be positive")
        if sum(s) < lam * sum(l):
            raise DomainError("sigma(s) < lambda sigma(l): not a member")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "lam", lam)

    @property
    def m(self) -> int:
        return len(self.s)

    @property
    def n(self) -> int:
        return len(self.l)

    @property
    def sigma_s(self) -> int:
        return sum(self.s)

    @property
    def sigma_l(self) -> int:
        return sum(self.l)

    @property
    def zeta(self) -> Fraction:
        return (self.sigma_s - self.lam * self.sigma_l) / (self.m + self.lam * self.n)

    @property
    def t(self) -> tuple[Fraction, ...]:
        z = self.zeta
        return tuple(x - z for x in self.s) + tuple(x + z for x in self.l)

    @property
    def sigma_t(self) -> Fraction:
        return sum(self.t, Fraction(0))

    @property
    def head_sum(self) -> Fraction:
        return sum(self.t[: self.m], Fraction(0))

    @property
    def tail_sum(self) -> Fraction:
        return sum(self.t[self.m:], Fraction(0))

    def check_identities(self) -> dict[str, bool]:
        """The exact identities every member satisfies, by name."""
        lam, m, n = self.lam, self.m, self.n
        st, ss, sl = self.sigma_t, self.sigma_s, self.sigma_l
        return {
            "block_balance": self.head_sum == lam * self.tail_sum,
            "sigma_identity": st == ss + sl + (n - m) * self.zeta,
            "sigma_sandwich": (lam + 1) * sl <= st <= (lam + 1) / lam * ss,
            "sigma_floor": st >= (lam + 1) / (m + n * lam) * (ss + sl),
            "head_nonnegative": self.head_sum == lam / (1 + lam) * st and self.head_sum >= 0,
        }

    def as_row(self) -> dict:
        return {
            "s": " ".join(map(str, self.s)),
            "l": " ".join(map(str, self.l)),
            "zeta": render(self.zeta),
            "t": " ".join(render(x) for x in self.t),
            "sigma_t": render(self.sigma_t),
        }


# ---------------------------------------------------------------------------
# Enumeration


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative integer vectors of length ``parts`` summing to ``total``, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_T(m: int, n: int, lam, sigma_cap) -> list[WeightedTime]:
    """Every weighted time with ``sigma(t) <= sigma_cap``, sorted by ``(sigma(t), s, l)``.

    Uses ``sigma(t) = (lam+1)(m sigma(l) + n sigma(s)) / (m + lam n)`` to bound
    the block sums before expanding them into compositions.
    """
    lam = _as_lambda(lam)
    if m < 1 or n < 1:
        raise DimensionError("m and n must be positive")
    cap = Fraction(sigma_cap)
    if cap <= 0:
        raise DomainError("sigma_cap must be positive")
    lv = lam.value
    budget = cap * (m + lv * n) / (lv + 1)  # bound on n sigma(s) + m sigma(l)
    out = []
    for sl in range(math.floor(budget / m) + 1):
        for ss in range(math.floor((budget - m * sl) / n) + 1):
            if ss < lv * sl:
                continue
            if lam.ordinary:
                if ss % m or sl % n:
                    continue
                s_blocks = [(ss // m,) * m]
                l_blocks = [(sl // n,) * n]
            else:
                s_blocks = _compositions(ss, m)
                l_blocks = list(_compositions(sl, n))
            for s in s_blocks:
                for l in l_blocks:
                    out.append(WeightedTime(s, l, lv))
    out.sort(key=lambda w: (w.sigma_t, w.s, w.l))
    return out


# ---------------------------------------------------------------------------
# Flow, lattice map and target sets


def g_t_apply(t: WeightedTime, v: Sequence) -> tuple[ScaledPow2, ...]:
    """``g_t v`` with exact dyadic factors; integral exponents fold into the coefficient."""
    if len(v) != t.m + t.n:
        raise DimensionError(f"expected a vector of length {t.m + t.n}")
    tt = t.t
    signs = [1] * t.m + [-1] * t.n
    return tuple(ScaledPow2(Fraction(x), sgn * e) for x, e, sgn in zip(v, tt, signs))


def psi_eta(t: WeightedTime, eta) -> ScaledPow2:
    """``2^(-eta sigma(t))``."""
    return pow2(-Fraction(eta) * t.sigma_t)


def psi_partial_sums(m: int, n: int, lam, eta, caps: Sequence) -> list[tuple[Fraction, int, float]]:
    """Rows ``(cap, members, sum of psi)`` for increasing caps."""
    caps = sorted(Fraction(c) for c in caps)
    members = enumerate_T(m, n, lam, caps[-1])
    rows = []
    for cap in caps:
        inside = [w for w in members if w.sigma_t <= cap]
        rows.append((cap, len(inside), math.fsum(float(psi_eta(w, eta)) for w in inside)))
    return rows


@dataclass(frozen=True)
class AffineLatticeMap:
    """``alpha = (p, q) -> (Xq + p + theta, q)``."""

    X: Matrix
    theta: TargetShift

    @classmethod
    def of(cls, X, theta=None) -> AffineLatticeMap:
        X = as_matrix(X)
        return cls(X, as_shift(theta, X.m))

    def residual_bounds(self, p: Sequence[int], q: Sequence[int],
                        bits: int) -> list[tuple[Fraction, Fraction]]:
        """Interval ``[lo, hi]`` containing ``|X_j q + p_j + theta_j|`` for each row."""
        if len(p) != self.X.m or len(q) != self.X.n:
            raise DimensionError("alpha has the wrong shape")
        vals, errs = self.X.approx(bits)
        tvals, terrs = self.theta.approx(bits)
        out = []
        for row, err, pj, tv, te in zip(vals, errs, p, tvals, terrs):
            r = sum((x * qi for x, qi in zip(row, q)), Fraction(0)) + pj + tv
            e = sum((ex * abs(qi) for ex, qi in zip(err, q)), Fraction(0)) + te
            out.append((max(Fraction(0), abs(r) - e), abs(r) + e))
        return out


@dataclass(frozen=True)
class DeltaQuery:
    t: WeightedTime
    p: tuple[int, ...]
    q: tuple[int, ...]
    epsilon: ScaledPow2

    def __post_init__(self):
        if not any(self.q):
            raise DomainError("q must be nonzero")
        object.__setattr__(self, "epsilon", ScaledPow2.of(self.epsilon))


@dataclass(frozen=True)
class Membership:
    """Outcome of a strict sup-norm test ``|g_t M alpha| < epsilon``.

    ``margin`` is ``log2(epsilon / |g_t M alpha|)`` as a float (positive
    inside); ``bits`` is the precision at which the decision separated.
    """

    member: bool
    margin: float
    bits: int | None


def _precision_ladder(start: int, cap: int) -> Iterator[int]:
    bits = start
    while bits <= cap:
        yield bits
        bits *= 2


def delta_membership(X, query: DeltaQuery, theta=None,
                     bits: int = DEFAULT_PRECISION_BITS,
                     max_bits: int = MAX_PRECISION_BITS) -> Membership:
    """Decide ``|g_t M_X^theta alpha| < epsilon`` exactly, raising precision as needed."""
    amap = AffineLatticeMap.of(X, theta)
    t = query.t
    if (amap.X.m, amap.X.n) != (t.m, t.n):
        raise DimensionError("weighted time does not match the matrix shape")
    eps = query.epsilon
    q_part = [ScaledPow2(Fraction(abs(qi)), -e) for qi, e in zip(query.q, t.t[t.m:])]
    q_inside = all(x < eps for x in q_part)
    for b in _precision_ladder(bits, max_bits):
        bounds = amap.residual_bounds(query.p, query.q, b)
        hi = [ScaledPow2(h, e) for (_, h), e in zip(bounds, t.t[: t.m])]
        lo = [ScaledPow2(lw, e) for (lw, _), e in zip(bounds, t.t[: t.m])]
        if all(x < eps for x in hi):
            member = q_inside
        elif any(x >= eps for x in lo):
            member = False
        else:
            continue
        biggest = max(max(hi), max(q_part))
        margin = math.inf if biggest == 0 else eps.log2() - biggest.log2()
        return Membership(member, margin, b)
    raise PrecisionExhausted(f"membership undecided at {max_bits} bits")


def plane_neighborhood_contains(X, a: Sequence, b: Sequence, eps: Sequence,
                                unit_tol: float = 1e-9) -> bool:
    """Whether ``|X_j a + b_j| < eps_j`` for every row ``j`` (``a`` a unit vector)."""
    X = as_matrix(X)
    if len(a) != X.n or len(b) != X.m or len(eps) != X.m:
        raise DimensionError("a, b and eps must match the matrix shape")
    if abs(math.fsum(float(x) ** 2 for x in a) - 1.0) > unit_tol:
        raise DomainError("a must be a unit vector")
    if any(float(e) <= 0 for e in eps):
        raise DomainError("eps must be positive")
    for row, bj, ej in zip(X.rows, b, eps):
        val = math.fsum(float(x) * float(ai) for x, ai in zip(row, a)) + float(bj)
        if not abs(val) < float(ej):
            return False
    return True


# ---------------------------------------------------------------------------
# Step 1: approximation -> membership


def eta0(lam, m: int, n: int, epsilon) -> Fraction:
    """``lam / (2 (lam+1) (m + n lam)) * min(1, epsilon)``."""
    lv = _as_lambda(lam).value
    eps = Fraction(epsilon)
    if eps <= 0:
        raise DomainError("epsilon must be positive")
    return lv / (2 * (lv + 1) * (m + n * lv)) * min(Fraction(1), eps)


def _is_pow2(Q: int) -> bool:
    return Q > 0 and Q & (Q - 1) == 0


def _power(Q: int, c: Fraction) -> ScaledPow2 | None:
    """``Q^c`` as an exact dyadic power when ``Q`` is a power of two."""
    if _is_pow2(Q):
        return pow2((Q.bit_length() - 1) * c)
    return None


def _cmp_power(x: Fraction, Q: int, c: Fraction) -> int:
    """Sign of ``x - Q^c`` for ``x >= 0`` and integer ``Q >= 2``."""
    p = _power(Q, c)
    if p is not None:
        return ScaledPow2.of(x)._cmp(p)
    return compare_power(x, Fraction(Q), c)


def _floor_log2_power(Q: int, c: Fraction) -> int:
    """``floor(log2(Q^c))``, exactly."""
    L = math.floor(float(c) * math.log2(Q))
    while _cmp_power(Fraction(2) ** L, Q, c) > 0:
        L -= 1
    while _cmp_power(Fraction(2) ** (L + 1), Q, c) <= 0:
        L += 1
    return L


def _floor_log2(x: Fraction) -> int:
    L = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** L > x:
        L -= 1
    while Fraction(2) ** (L + 1) <= x:
        L += 1
    return L


@dataclass(frozen=True)
class Step1Result:
    t: WeightedTime
    query: DeltaQuery
    eta0: Fraction
    membership: Membership
    Q: int
    bits: int


def _witness_alpha(witness: ApproxWitness, X: Matrix, theta: TargetShift):
    q = tuple(witness.q)
    p = tuple(witness.p)
    if len(q) != X.n or len(p) != X.m:
        raise DimensionError("witness does not match the matrix shape")
    return p, q


def _step1_brackets(bounds, Q: int, floor_c: Fraction, lam: LambdaParam):
    """Dyadic exponents ``s_j`` of ``max(|r_j|, Q^floor_c)``; None when undecided."""
    floor_exp = _floor_log2_power(Q, floor_c)
    if lam.ordinary:
        bounds = [(max(lo for lo, _ in bounds), max(hi for _, hi in bounds))] * len(bounds)
    s = []
    for lo, hi in bounds:
        cmp_hi = _cmp_power(hi, Q, floor_c)
        if cmp_hi <= 0:
            # the floor dominates (ties do not move the bracket)
            s.append(-floor_exp)
            continue
        if _cmp_power(lo, Q, floor_c) <= 0:
            return None
        L_lo, L_hi = _floor_log2(lo), _floor_log2(hi)
        if L_lo != L_hi:
            return None
        s.append(-L_lo)
    return tuple(s)


def _approximation_hypothesis(bounds, q, Q: int, c: Fraction, lam: LambdaParam, m: int, n: int):
    """Three-valued check of the approximation hypothesis at integer scale ``Q``."""
    if lam.ordinary:
        if max(abs(x) for x in q) > Q:
            return False
        lo = max(l for l, _ in bounds)
        hi = max(h for _, h in bounds)
        target_c = -(1 + c) * lam.rate(m, n)
    else:
        if plus_product(q) > Q ** n:
            return False
        lo = math.prod(l for l, _ in bounds)
        hi = math.prod(h for _, h in bounds)
        target_c = -(1 + c) * m * lam.rate(m, n)
    if _cmp_power(hi, Q, target_c) < 0:
        return True
    if _cmp_power(lo, Q, target_c) >= 0:
        return False
    return None


def step1_reduce(X, theta, witness: ApproxWitness, epsilon_rate, lam,
                 bits: int = DEFAULT_PRECISION_BITS,
                 max_bits: int = MAX_PRECISION_BITS) -> Step1Result:
    """Turn an approximation at scale ``Q`` into a weighted time and a target-set query.

    The hypothesis on ``witness`` (``alpha = (p, q)`` at ``Q = witness.Q``):
    multiplicative kind, ``Pi(Xq+p+theta) < Q^(-(1+eps) m v)`` with
    ``Pi_+(q) <= Q^n``; ordinary kind, ``|Xq+p+theta| < Q^(-(1+eps) v)`` with
    ``|q| <= Q``; here ``v = (n/m) lam``. Each row residual is bracketed
    against the floor ``Q^(-(1+eps) v)``, and ``q`` coordinate-wise against 1.
    """
    X = as_matrix(X)
    theta = as_shift(theta, X.m)
    lam = _as_lambda(lam)
    eps = Fraction(epsilon_rate)
    if eps <= 0:
        raise DomainError("epsilon_rate must be positive")
    m, n, Q = X.m, X.n, witness.Q
    if Q < 2:
        raise ConstructionError("the scale Q must exceed 1")
    p, q = _witness_alpha(witness, X, theta)
    if not any(q):
        raise ConstructionError("q must be nonzero")
    floor_c = -(1 + eps) * lam.rate(m, n)

    amap = AffineLatticeMap(X, theta)
    for b in _precision_ladder(bits, max_bits):
        bounds = amap.residual_bounds(p, q, b)
        if max(lo for lo, _ in bounds) > Fraction(1, 2):
            raise ConstructionError("residual exceeds 1/2")
        ok = _approximation_hypothesis(bounds, q, Q, eps, lam, m, n)
        if ok is None:
            continue
        if not ok:
            raise ConstructionError("witness fails the approximation hypothesis at its scale")
        s = _step1_brackets(bounds, Q, floor_c, lam)
        if s is None:
            continue
        break
    else:
        raise PrecisionExhausted(f"step 1 brackets undecided at {max_bits} bits")

    if lam.ordinary:
        l_one = max(1, max(abs(x) for x in q)).bit_length() - 1
        l = (l_one,) * n
    else:
        l = tuple(max(1, abs(x)).bit_length() - 1 for x in q)
    try:
        t = WeightedTime(s, l, lam.value)
    except DomainError as exc:
        raise ConstructionError(f"bracketed (s, l) = ({s}, {l}) is not a member: {exc}") from exc
    e0 = eta0(lam, m, n, eps)
    if not t.zeta > e0 * t.sigma_t:
        raise ConstructionError(f"zeta = {t.zeta} does not exceed eta0 sigma(t) = {e0 * t.sigma_t}")
    query = DeltaQuery(t, p, q, ScaledPow2(Fraction(2), -t.zeta))
    membership = delta_membership(X, query, theta, bits, max_bits)
    if not membership.member:
        raise ConstructionError("the bracketed weighted time does not capture X")
    return Step1Result(t, query, e0, membership, Q, b)


# ---------------------------------------------------------------------------
# Step 2: membership -> approximation


@dataclass(frozen=True)
class Step2Result:
    Q: ScaledPow2
    epsilon: Fraction
    witness_check: bool
    log2_Q: Fraction


def step2_reduce(X, theta, t: WeightedTime, p: Sequence[int], q: Sequence[int], eta, lam,
                 bits: int = DEFAULT_PRECISION_BITS,
                 max_bits: int = MAX_PRECISION_BITS) -> Step2Result:
    """From ``|g_t M alpha| < 2^(-eta sigma(t))`` to an approximation at ``Q = 2^(sigma(t)/(n(1+lam)))``.

    The approximation rate gains ``eps = ((lam+1)/lam) m eta``; the returned
    ``witness_check`` is the exact verdict on that approximation.
    """
    X = as_matrix(X)
    theta = as_shift(theta, X.m)
    lam = _as_lambda(lam)
    eta = Fraction(eta)
    if eta <= 0:
        raise DomainError("eta must be positive")
    if lam.value != t.lam:
        raise DomainError("lambda does not match the weighted time")
    m, n = X.m, X.n
    log2_Q = t.sigma_t / (n * (1 + lam.value))
    if log2_Q <= 0:
        raise PreconditionFailed("the scale Q = 1 is excluded")
    p, q = tuple(p), tuple(q)
    query = DeltaQuery(t, p, q, psi_eta(t, eta))
    if not delta_membership(X, query, theta, bits, max_bits).member:
        raise PreconditionFailed("alpha is not in the target set at this rate")
    eps = (lam.value + 1) / lam.value * m * eta
    v = lam.rate(m, n)
    amap = AffineLatticeMap(X, theta)
    for b in _precision_ladder(bits, max_bits):
        bounds = amap.residual_bounds(p, q, b)
        if lam.ordinary:
            hi = ScaledPow2.of(max(h for _, h in bounds))
            lo = ScaledPow2.of(max(lw for lw, _ in bounds))
            target = pow2(-(1 + eps) * v * log2_Q)
            q_ok = pow2(0) * max(abs(x) for x in q) < pow2(log2_Q)
        else:
            hi = ScaledPow2.of(math.prod(h for _, h in bounds))
            lo = ScaledPow2.of(math.prod(lw for lw, _ in bounds))
            target = pow2(-(1 + eps) * m * v * log2_Q)
            q_ok = ScaledPow2.of(plus_product(q)) < pow2(n * log2_Q)
        if hi < target:
            return Step2Result(pow2(log2_Q), eps, q_ok, log2_Q)
        if lo >= target:
            return Step2Result(pow2(log2_Q), eps, False, log2_Q)
    raise PrecisionExhausted(f"step 2 check undecided at {max_bits} bits")


# ---------------------------------------------------------------------------
# Round trip


class RoundTripStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    BELOW_RANGE = "below_range"  # zeta <= 1: 2 * 2^-zeta cannot beat 2^-(eta sigma(t)) yet
    REJECTED = "rejected"        # the witness does not meet the hypothesis of step 1


@dataclass(frozen=True)
class RoundTripRecord:
    status: RoundTripStatus
    Q_in: int
    t: WeightedTime | None = None
    eta0: Fraction | None = None
    eta: Fraction | None = None
    log2_Q_out: Fraction | None = None
    epsilon_out: Fraction | None = None
    detail: str = ""

    def as_row(self) -> dict:
        row = {
            "status": self.status.value,
            "Q_in": self.Q_in,
            "eta0": "" if self.eta0 is None else render(self.eta0),
            "eta": "" if self.eta is None else render(self.eta),
            "log2_Q_out": "" if self.log2_Q_out is None else render(self.log2_Q_out),
            "epsilon_out": "" if self.epsilon_out is None else render(self.epsilon_out),
            "detail": self.detail,
        }
        if self.t is not None:
            row.update(self.t.as_row())
        else:
            row.update({"s": "", "l": "", "zeta": "", "t": "", "sigma_t": ""})
        return row


def round_trip(X, theta, witness: ApproxWitness, epsilon_rate, lam,
               bits: int = DEFAULT_PRECISION_BITS,
               max_bits: int = MAX_PRECISION_BITS) -> RoundTripRecord:
    """Step 1 then step 2 at ``eta = min(eta0, (zeta - 1)/sigma(t)) / 2``.

    That choice of ``eta`` is the largest safe one that makes
    ``2 * 2^-zeta <= 2^-(eta sigma(t))``, so the membership found by step 1
    feeds step 2 directly. Small scales where ``zeta <= 1`` are reported as
    below range rather than as failures.
    """
    try:
        r1 = step1_reduce(X, theta, witness, epsilon_rate, lam, bits, max_bits)
    except ConstructionError as exc:
        return RoundTripRecord(RoundTripStatus.REJECTED, witness.Q, detail=str(exc))
    t = r1.t
    if t.zeta <= 1:
        return RoundTripRecord(RoundTripStatus.BELOW_RANGE, witness.Q, t, r1.eta0,
                               detail="zeta <= 1")
    eta = min(r1.eta0, (t.zeta - 1) / t.sigma_t) / 2
    try:
        r2 = step2_reduce(X, theta, t, r1.query.p, r1.query.q, eta, lam, bits, max_bits)
    except PreconditionFailed as exc:
        return RoundTripRecord(RoundTripStatus.FAIL, witness.Q, t, r1.eta0, eta, detail=str(exc))
    status = RoundTripStatus.PASS if r2.witness_check else RoundTripStatus.FAIL
    return RoundTripRecord(status, witness.Q, t, r1.eta0, eta, r2.log2_Q, r2.epsilon)


@dataclass(frozen=True)
class SuiteCase:
    name: str
    X: Matrix
    theta: TargetShift
    witness: ApproxWitness
    epsilon_rate: Fraction
    lam: LambdaParam


def _fixture_shapes():
    from .core import PrecisionReal
    from .witnesses import liouville_number

    phi = PrecisionReal.golden_ratio()
    sqrt2, sqrt3 = PrecisionReal.sqrt(2), PrecisionReal.sqrt(3)
    liou = liouville_number(2, 5).value
    ordinary, mult = RateKind.ORDINARY, RateKind.MULTIPLICATIVE
    # (name, X, theta, kind, top exponent of the ladder)
    return [
        ("phi", Matrix(((phi,),)), None, ordinary, 24),
        ("phi shifted by 1/3", Matrix(((phi,),)), (Fraction(1, 3),), ordinary, 24),
        ("liouville tau=2", Matrix(((liou,),)), None, ordinary, 40),
        ("liouville tau=2 product", Matrix(((liou,),)), None, mult, 40),
        ("1/3", Matrix(((Fraction(1, 3),),)), None, ordinary, 12),
        ("column sqrt2 sqrt3", Matrix(((sqrt2,), (sqrt3,))), None, ordinary, 16),
        ("row sqrt2 sqrt3 shifted by 1/5", Matrix(((sqrt2, sqrt3),)), (Fraction(1, 5),), ordinary, 12),
        ("row sqrt2 sqrt3 product", Matrix(((sqrt2, sqrt3),)), None, mult, 10),
    ]


def round_trip_suite(k0: int = 3, rate_scales: Sequence = (1, Fraction(3, 2)),
                     cfg=None) -> list[SuiteCase]:
    """Witnesses from best-approximation ladders that satisfy the step 1 hypothesis.

    For each fixture and rung the rate ``v`` runs over ``rate_scales`` times
    the generic value ``n/m``; ``epsilon_rate`` is set to half the margin by
    which the witness beats ``v`` (rounded down to a multiple of 1/1000), and
    rungs with no margin are left out.
    """
    from .search import SearchConfig, best_multiplicative, best_supnorm

    base = cfg or SearchConfig()

    cases = []
    for name, X, theta, kind, k1 in _fixture_shapes():
        th = as_shift(theta, X.m)
        m, n = X.m, X.n
        col_cfg = SearchConfig(base.strategy, base.precision_bits, base.max_precision_bits,
                               base.node_budget, positive_q=n == 1)
        for k in range(k0, k1 + 1):
            Q = 1 << k
            if kind is RateKind.ORDINARY:
                w = best_supnorm(X, th, Q, col_cfg)
                per = 1
            else:
                w = best_multiplicative(X, th, Q, base)
                per = m
            for scale in rate_scales:
                v = Fraction(n, m) * Fraction(scale)
                if w.value == 0:
                    eps = Fraction(1)
                else:
                    achieved = (math.log2(w.value.denominator) - math.log2(w.value.numerator)) / (k * per)
                    margin = (achieved / float(v) - 1) / 2
                    eps = Fraction(math.floor(margin * 1000), 1000)
                if eps <= 0:
                    continue
                cases.append(SuiteCase(f"{name} Q=2^{k} v={render(v)}", X, th, w, eps,
                                       LambdaParam.from_rate(v, m, n, kind)))
    return cases
