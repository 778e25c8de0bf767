"""Fixtures with known exponents, plus a brute-force check of each claim.

A claimed exponent is never trusted on its own: :func:`verify_oracle` runs
the estimator on the fixture and records the tail slopes next to the claim.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    INF,
    MAX_PRECISION_BITS,
    DEFAULT_PRECISION_BITS,
    PrecisionReal,
    Scalar,
    as_scalar,
    dot,
    ext_real,
    render,
)
from .errors import DimensionError, DomainError, PrecisionError
from .estimator import LadderSpec, estimate_exponent, specialize_simultaneous
from .search import SearchConfig


@dataclass(frozen=True)
class ConstructedPoint:
    """A scalar (or vector) fixture with its claimed exponent.

    ``ladder_cap`` is the largest ``Q`` at which truncation effects are
    invisible; estimates must not run past it.
    """

    name: str
    value: Scalar | tuple
    claimed_exponent: Fraction | float
    construction_log: tuple = ()
    ladder_cap: int | None = None

    @property
    def ladder_cap_exponent(self) -> int | None:
        return None if self.ladder_cap is None else self.ladder_cap.bit_length() - 1


def liouville_levels(tau, levels: int) -> list[int]:
    """Exponents a_1 = 2, a_{k+1} = ceil((tau + 1) a_k)."""
    tau = Fraction(tau)
    a = [2]
    for _ in range(levels - 1):
        a.append(math.ceil((tau + 1) * a[-1]))
    return a


def liouville_number(tau, levels: int = 5,
                     precision: int = MAX_PRECISION_BITS) -> ConstructedPoint:
    """The dyadic number sum_{k <= levels} 2^(-a_k), whose exponent is ``tau``.

    At ``q = 2^(a_k)`` the distance to the nearest integer is about
    ``2^(a_k - a_{k+1})``, giving slopes ``(a_{k+1} - a_k)/a_k -> tau``.
    """
    tau = Fraction(tau)
    if tau <= 1:
        raise DomainError("tau must exceed 1")
    if levels < 3:
        raise DomainError("at least three levels are needed")
    a = liouville_levels(tau, levels)
    if a[-1] > precision:
        raise PrecisionError(f"2^-{a[-1]} does not fit in {precision} bits")
    partial = []
    x = Fraction(0)
    for ak in a:
        x += Fraction(1, 1 << ak)
        partial.append(x)
    return ConstructedPoint(f"liouville({render(tau)},{levels})", x, tau,
                            tuple(zip(a, partial)), 1 << a[-2])


class QuadraticSeed(enum.Enum):
    GOLDEN_RATIO = (1, 1, 5, 2)
    SQRT2 = (0, 1, 2, 1)
    SQRT3 = (0, 1, 3, 1)
    SQRT5 = (0, 1, 5, 1)
    SILVER_RATIO = (1, 1, 2, 1)


def quadratic_irrational(seed: QuadraticSeed | str = QuadraticSeed.GOLDEN_RATIO,
                         precision: int = DEFAULT_PRECISION_BITS) -> ConstructedPoint:
    """A quadratic irrational; its exponent is 1 (continued fraction is periodic)."""
    if isinstance(seed, str):
        seed = QuadraticSeed[seed.upper()]
    a, b, c, d = seed.value
    name = {"GOLDEN_RATIO": "phi"}.get(seed.name, seed.name.lower())
    x = PrecisionReal.surd(a, b, c, d, name=name, bits=precision)
    return ConstructedPoint(name, x, Fraction(1))


def continued_fraction(x: Fraction, terms: int) -> list[int]:
    """Partial quotients of a rational, truncated to ``terms``."""
    out = []
    x = Fraction(x)
    for _ in range(terms):
        a = math.floor(x)
        out.append(a)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def convergents(x: Scalar, terms: int, bits: int = 512) -> list[Fraction]:
    """Convergents p/q of ``x``; irrational inputs are expanded from a ``bits``-bit approximation."""
    if isinstance(x, PrecisionReal):
        x = x.at(bits).value
    cf = continued_fraction(Fraction(x), terms)
    h0, h1, k0, k1 = 1, cf[0], 0, 1
    out = [Fraction(h1, k1)]
    for a in cf[1:]:
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
    return out


# ---------------------------------------------------------------------------
# Hyperplanes


class HyperplaneForm(enum.Enum):
    LINEAR = "linear"
    AFFINE = "affine"


@dataclass(frozen=True)
class HyperplaneSpec:
    """Hyperplane y -> (a . y [+ a_n], y) in R^n."""

    n: int
    a: tuple
    form: HyperplaneForm = HyperplaneForm.LINEAR
    oracle: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError("a hyperplane needs n >= 2")
        object.__setattr__(self, "a", tuple(as_scalar(v) for v in self.a))
        want = self.n - 1 if self.form is HyperplaneForm.LINEAR else self.n
        if len(self.a) != want:
            raise DimensionError(f"{self.form.value} form needs {want} parameters, got {len(self.a)}")

    @property
    def s_count(self) -> int:
        """One plus the number of nonzero coefficients among a_1..a_{n-1}."""
        return 1 + sum(1 for v in self.a[: self.n - 1] if not (isinstance(v, Fraction) and v == 0))


def hyperplane_point(spec: HyperplaneSpec, y: Sequence) -> tuple:
    if len(y) != spec.n - 1:
        raise DimensionError(f"expected {spec.n - 1} parameters, got {len(y)}")
    y = [as_scalar(v) for v in y]
    const = spec.a[-1] if spec.form is HyperplaneForm.AFFINE else Fraction(0)
    lead = _linear_form(spec.a[: spec.n - 1], y, const)
    return (lead, *y)


def _linear_form(coeffs: Sequence[Scalar], ys: Sequence[Scalar], const: Scalar) -> Scalar:
    # products of two irrationals get their own approximant
    terms = []
    total_const = Fraction(0)
    for c, v in zip(coeffs, ys):
        if isinstance(c, Fraction) and isinstance(v, Fraction):
            total_const += c * v
        elif isinstance(c, Fraction):
            terms.append((c, v))
        elif isinstance(v, Fraction):
            terms.append((v, c))
        else:
            terms.append((Fraction(1), _product(c, v)))
    if isinstance(const, PrecisionReal):
        terms.append((Fraction(1), const))
    else:
        total_const += const
    if not terms:
        return total_const
    return PrecisionReal.linear(total_const, terms)


def _product(x: PrecisionReal, y: PrecisionReal) -> PrecisionReal:
    def digits(prec: int) -> int:
        guard = prec + 8 + max(1, abs(round(float(x.at(64).value))) + 1).bit_length() \
            + max(1, abs(round(float(y.at(64).value))) + 1).bit_length()
        v = Fraction(x.digits(guard), 1 << guard) * Fraction(y.digits(guard), 1 << guard)
        return round(v * (1 << prec))

    return PrecisionReal(f"{x.name}*{y.name}", digits, max(x.bits, y.bits))


class ParamTarget(enum.Enum):
    DUAL_A = "dual"  # the dual exponent of a in R^(n-1)
    SIM_A = "sim"    # the simultaneous exponent of a in R^(n-1)


def hyperplane_with_exponent(n: int, target: ParamTarget | str, w, levels: int = 3,
                             precision: int = DEFAULT_PRECISION_BITS) -> HyperplaneSpec:
    """A hyperplane whose parameter vector has exponent ``w`` for ``target``.

    For ``n = 2`` the parameter is a single number: the golden ratio when
    ``w == 1`` and a truncated Liouville number otherwise. For larger ``n``
    the construction is heuristic; the oracle ladder is the only evidence.
    """
    if isinstance(target, str):
        target = ParamTarget(target)
    w = ext_real(w)
    if w == INF:
        raise DomainError("use a rational parameter for an infinite exponent")
    d = n - 1
    if target is ParamTarget.SIM_A and w < Fraction(1, d):
        raise DomainError(f"simultaneous exponent of a point in R^{d} is at least 1/{d}")
    if target is ParamTarget.DUAL_A and w < d:
        raise DomainError(f"dual exponent of a point in R^{d} is at least {d}")

    def scalar(tau):
        if tau == 1:
            return quadratic_irrational(QuadraticSeed.GOLDEN_RATIO, precision)
        return liouville_number(tau, levels)

    if d == 1:
        pt = scalar(w)
        return HyperplaneSpec(n, (pt.value,), oracle=(("a", pt.name, str(w)),))
    if target is ParamTarget.SIM_A:
        # integer multiples of one number share its exponent
        if w < 1:
            raise DomainError("this construction realises simultaneous exponents >= 1 only")
        pt = scalar(w)
        coords = tuple(pt.value if k == 1 else _scaled(k, pt.value) for k in range(1, d + 1))
        return HyperplaneSpec(n, coords, oracle=(("a", f"multiples of {pt.name}", str(w)),))
    pt = scalar(w)
    surds = [PrecisionReal.sqrt(c, precision) for c in (2, 3, 5, 6, 7, 10, 11)[: d - 1]]
    return HyperplaneSpec(n, (pt.value, *surds), oracle=(("a", f"{pt.name} with surds", str(w)),))


def _scaled(k: int, v: Scalar) -> Scalar:
    if isinstance(v, PrecisionReal):
        return PrecisionReal.linear(0, [(Fraction(k), v)], name=f"{k}*{v.name}", bits=v.bits)
    return k * v


# ---------------------------------------------------------------------------
# Oracle records


@dataclass(frozen=True)
class OracleRecord:
    name: str
    claimed: Fraction | float
    ladder: str
    slopes: tuple
    tail_max: float
    tail_min: float
    tolerance: float
    passed: bool

    def as_record(self) -> dict:
        return {
            "name": self.name,
            "claimed": render(self.claimed),
            "ladder": self.ladder,
            "tail_max": round(self.tail_max, 12),
            "tail_min": round(self.tail_min, 12),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "slopes": [[Q.bit_length() - 1, round(s, 12)] for Q, s in self.slopes],
        }


def verify_oracle(point: ConstructedPoint, ladder: LadderSpec | None = None,
                  rel_tolerance: float = 0.1, cfg: SearchConfig | None = None) -> OracleRecord:
    """Run the brute-force ladder on a scalar fixture and compare with its claim."""
    if ladder is None:
        top = point.ladder_cap_exponent or 32
        ladder = LadderSpec(1, top)
    if point.ladder_cap is not None and (1 << ladder.k1) > point.ladder_cap:
        raise DomainError("ladder runs past the truncation cap of the fixture")
    value = point.value if isinstance(point.value, tuple) else (point.value,)
    if len(value) == 1:
        est = estimate_exponent([[value[0]]], None, ladder=ladder, cfg=cfg)
    else:
        est = specialize_simultaneous(value, None, ladder=ladder, cfg=cfg)
    claimed = float(point.claimed_exponent)
    tol = rel_tolerance * claimed
    ok = est.exact_hit if math.isinf(claimed) else abs(est.ordinary - claimed) <= tol
    return OracleRecord(point.name, point.claimed_exponent, str(ladder), tuple(est.slopes),
                        est.ordinary, est.uniform, tol, ok)
