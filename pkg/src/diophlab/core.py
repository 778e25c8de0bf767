"""Exact and tracked-precision scalars, matrices and reduction mod Z.

Every exponent computation in the package is built on two kinds of scalar:

* :class:`fractions.Fraction` for exact rationals (integers are accepted and
  promoted), and
* :class:`PrecisionReal` for irrational inputs, which can be approximated by a
  dyadic rational to any number of bits with a guaranteed error bound.

Extended reals (exponent values which may be infinite) are represented by a
``Fraction`` or the float ``math.inf``; :func:`ext_real` validates them.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

import mpmath

from .errors import DimensionError, DomainError

DEFAULT_PRECISION_BITS = 256
MAX_PRECISION_BITS = 8192

INF = math.inf

ExtReal = Union[Fraction, float]


def ext_real(x) -> ExtReal:
    """Coerce ``x`` to an extended real: a nonnegative Fraction or +inf."""
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "oo"):
            return INF
        x = Fraction(s)
    if isinstance(x, float):
        if math.isnan(x):
            raise DomainError("extended reals are never NaN")
        if math.isinf(x):
            if x < 0:
                raise DomainError("extended reals are nonnegative")
            return INF
        x = Fraction(x)
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"extended reals are nonnegative, got {x}")
    return x


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def render(x) -> str:
    """Render a rational as ``p/q`` (or ``p``), and infinity as ``inf``."""
    if x is None:
        return ""
    if is_inf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, PrecisionReal):
        return x.name
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# PrecisionReal


@dataclass(frozen=True)
class PrecisionReal:
    """A real number known through dyadic approximations.

    ``digits(b)`` returns an integer ``N`` with ``|x - N / 2**b| <= 2**-b``.
    An instance is pinned at ``bits``; :meth:`at` re-pins it.
    """

    name: str
    digits: Callable[[int], int] = field(repr=False, compare=False)
    bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if self.bits < 1:
            raise DomainError("precision must be at least one bit")

    def at(self, bits: int) -> PrecisionReal:
        return PrecisionReal(self.name, self.digits, bits)

    @property
    def value(self) -> Fraction:
        return Fraction(self.digits(self.bits), 1 << self.bits)

    @property
    def error_bound(self) -> Fraction:
        return Fraction(1, 1 << self.bits)

    def interval(self) -> tuple[Fraction, Fraction]:
        v, e = self.value, self.error_bound
        return v - e, v + e

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.name

    @classmethod
    def surd(cls, a, b, c: int, d=1, name: str | None = None,
             bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
        """The quadratic irrational ``(a + b*sqrt(c)) / d`` with integers a, b, c, d."""
        a, b, c, d = int(a), int(b), int(c), int(d)
        if c < 0 or d == 0:
            raise DomainError("surd needs c >= 0 and d != 0")
        if d < 0:
            a, b, d = -a, -b, -d

        @lru_cache(maxsize=64)
        def digits(prec: int) -> int:
            w = prec + 2
            root = math.isqrt(b * b * c << (2 * w))
            s = root if b >= 0 else -root
            m = (a * (1 << w) + s) // d
            return (m + 2) >> 2

        if name is None:
            name = f"({a}+{b}*sqrt({c}))/{d}"
        return cls(name, digits, bits)

    @classmethod
    def sqrt(cls, c: int, bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
        return cls.surd(0, 1, c, 1, name=f"sqrt({c})", bits=bits)

    @classmethod
    def golden_ratio(cls, bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
        return cls.surd(1, 1, 5, 2, name="phi", bits=bits)

    @classmethod
    def from_mpmath(cls, name: str, fn: Callable[[], "mpmath.mpf"],
                    bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
        """Wrap an mpmath constant; ``fn`` is evaluated under a raised working precision."""

        @lru_cache(maxsize=64)
        def digits(prec: int) -> int:
            with mpmath.workprec(prec + 32):
                return int(mpmath.nint(mpmath.ldexp(fn(), prec)))

        return cls(name, digits, bits)

    @classmethod
    def uniform(cls, key: str, bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
        """A pseudo-random real in [0, 1) whose binary digits are the SHAKE-256 stream of ``key``.

        Every precision sees a prefix of the same stream, so the number is
        well defined and has no finite binary expansion in practice.
        """
        seed = key.encode()

        def digits(prec: int) -> int:
            nbytes = (prec + 7) // 8
            raw = int.from_bytes(hashlib.shake_256(seed).digest(nbytes), "big")
            return raw >> (8 * nbytes - prec)

        return cls(f"uniform({key})", digits, bits)

    @classmethod
    def linear(cls, const, terms: Sequence[tuple[Fraction, "PrecisionReal"]],
               name: str | None = None, bits: int | None = None) -> PrecisionReal:
        """``const + sum(c * x for c, x in terms)`` with rational ``const`` and ``c``."""
        const = Fraction(const)
        terms = tuple((Fraction(c), x) for c, x in terms if c != 0)
        weight = sum(abs(c) for c, _ in terms)
        guard = max(1, math.ceil(weight)).bit_length() + 2

        @lru_cache(maxsize=64)
        def digits(prec: int) -> int:
            sub = prec + guard
            total = const + sum(c * Fraction(x.digits(sub), 1 << sub) for c, x in terms)
            return round(total * (1 << prec))

        if name is None:
            parts = [render(const)] if const else []
            parts += [f"{render(c)}*{x.name}" for c, x in terms]
            name = " + ".join(parts) or "0"
        if bits is None:
            bits = max([x.bits for _, x in terms], default=DEFAULT_PRECISION_BITS)
        return cls(name, digits, bits)


Scalar = Union[Fraction, PrecisionReal]


def as_scalar(x) -> Scalar:
    if isinstance(x, PrecisionReal):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError("scalars must be finite")
    return Fraction(x)


def is_exact(x) -> bool:
    return not isinstance(x, PrecisionReal)


def scalar_approx(x: Scalar, bits: int) -> tuple[Fraction, Fraction]:
    """(approximation, error bound) of a scalar at ``bits``; exact scalars have zero error."""
    if isinstance(x, PrecisionReal):
        y = x.at(bits)
        return y.value, y.error_bound
    return Fraction(x), Fraction(0)


def scale(c, x: Scalar) -> Scalar:
    c = Fraction(c)
    if isinstance(x, PrecisionReal):
        return PrecisionReal.linear(0, [(c, x)], name=f"{render(c)}*{x.name}", bits=x.bits)
    return c * x


def add(x: Scalar, y: Scalar) -> Scalar:
    if is_exact(x) and is_exact(y):
        return Fraction(x) + Fraction(y)
    terms = []
    const = Fraction(0)
    for z in (x, y):
        if isinstance(z, PrecisionReal):
            terms.append((Fraction(1), z))
        else:
            const += z
    return PrecisionReal.linear(const, terms)


def dot(coeffs: Sequence, xs: Sequence[Scalar], const=0) -> Scalar:
    """``const + sum(coeffs[i] * xs[i])`` with rational coefficients."""
    const = Fraction(const)
    terms = []
    for c, x in zip(coeffs, xs):
        c = Fraction(c)
        if isinstance(x, PrecisionReal):
            terms.append((c, x))
        else:
            const += c * x
    if not terms:
        return const
    return PrecisionReal.linear(const, terms)


def less_than(x: Scalar, y: Scalar, bits: int = DEFAULT_PRECISION_BITS) -> bool | None:
    """Three-valued ``x < y``: None when the intervals at ``bits`` overlap."""
    xa, xe = scalar_approx(x, bits)
    ya, ye = scalar_approx(y, bits)
    if xa + xe < ya - ye:
        return True
    if xa - xe >= ya + ye:
        return False
    if xe == 0 and ye == 0:
        return xa < ya
    return None


_CONSTANTS = {
    "phi": PrecisionReal.golden_ratio,
    "pi": lambda bits=DEFAULT_PRECISION_BITS: PrecisionReal.from_mpmath("pi", lambda: +mpmath.pi, bits),
    "e": lambda bits=DEFAULT_PRECISION_BITS: PrecisionReal.from_mpmath("e", lambda: +mpmath.e, bits),
}

_SQRT_RE = re.compile(r"^(?:(?P<coef>[-+]?\d+(?:/\d+)?)\*)?sqrt\((?P<c>\d+)\)$")


def parse_scalar(text: str, bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Parse ``1/3``, ``0.25``, ``-2``, ``phi``, ``pi``, ``e``, ``sqrt(2)``, ``3/7*sqrt(5)``.

    ``uniform(key)`` is the seeded pseudo-random real of
    :meth:`PrecisionReal.uniform`. ``liouville(tau,levels)`` yields the exact truncated Liouville-type series
    built by :func:`diophlab.witnesses.liouville_number`.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise DomainError("empty scalar")
    low = s.lower()
    if low in _CONSTANTS:
        return _CONSTANTS[low](bits=bits)
    m = _SQRT_RE.match(low)
    if m:
        c = int(m.group("c"))
        r = math.isqrt(c)
        coef = Fraction(m.group("coef") or 1)
        if r * r == c:
            return coef * r
        root = PrecisionReal.sqrt(c, bits)
        return root if coef == 1 else scale(coef, root)
    if low.startswith("uniform(") and s.endswith(")"):
        return PrecisionReal.uniform(s[len("uniform("):-1], bits)
    if low.startswith("liouville(") and low.endswith(")"):
        from .witnesses import liouville_number

        tau, levels = low[len("liouville("):-1].split(",")
        return liouville_number(Fraction(tau), int(levels)).value
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse scalar {text!r}") from exc


# ---------------------------------------------------------------------------
# Vectors and matrices


def sup_norm(q: Iterable[int]) -> int:
    return max((abs(int(x)) for x in q), default=0)


@dataclass(frozen=True)
class TargetShift:
    """The inhomogeneous shift theta in R^m."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_scalar(v) for v in self.values))
        if not self.values:
            raise DimensionError("a shift needs at least one coordinate")

    @classmethod
    def zero(cls, m: int) -> TargetShift:
        return cls((Fraction(0),) * m)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def is_zero(self) -> bool:
        return all(is_exact(v) and v == 0 for v in self.values)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    def approx(self, bits: int) -> tuple[list[Fraction], list[Fraction]]:
        pairs = [scalar_approx(v, bits) for v in self.values]
        return [a for a, _ in pairs], [e for _, e in pairs]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __str__(self) -> str:
        return "(" + ", ".join(render(v) for v in self.values) + ")"


def as_shift(theta, m: int) -> TargetShift:
    if theta is None:
        return TargetShift.zero(m)
    if not isinstance(theta, TargetShift):
        if isinstance(theta, (str, int, float, Fraction, PrecisionReal)):
            theta = (theta,)
        theta = TargetShift(tuple(theta))
    if theta.dim != m:
        raise DimensionError(f"shift has dimension {theta.dim}, matrix has {m} rows")
    return theta


@dataclass(frozen=True)
class Matrix:
    """An m x n real matrix whose entries are exact rationals or PrecisionReals."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_scalar(x) for x in row) for row in self.rows)
        if not rows or not rows[0]:
            raise DimensionError("matrix must be at least 1 x 1")
        if any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged matrix rows")
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def is_exact(self) -> bool:
        return all(is_exact(x) for row in self.rows for x in row)

    @classmethod
    def column(cls, x: Sequence) -> Matrix:
        return cls(tuple((v,) for v in x))

    @classmethod
    def row(cls, x: Sequence) -> Matrix:
        return cls((tuple(x),))

    @classmethod
    def parse(cls, text: str, bits: int = DEFAULT_PRECISION_BITS) -> Matrix:
        """Rows separated by ``;``, entries by ``,``; e.g. ``1/3, 1/5; phi, 0``."""
        text = text.strip().strip("[]")
        if not text:
            raise DimensionError("empty matrix")
        rows = []
        for chunk in text.split(";"):
            chunk = chunk.strip().strip("[]")
            rows.append(tuple(parse_scalar(tok, bits) for tok in split_entries(chunk)))
        return cls(tuple(rows))

    def transpose(self) -> Matrix:
        return Matrix(tuple(zip(*self.rows)))

    def approx(self, bits: int) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
        vals, errs = [], []
        for row in self.rows:
            pairs = [scalar_approx(x, bits) for x in row]
            vals.append([a for a, _ in pairs])
            errs.append([e for _, e in pairs])
        return vals, errs

    def exact_at(self, bits: int) -> Matrix:
        """The exact dyadic matrix obtained by pinning every PrecisionReal at ``bits``."""
        vals, _ = self.approx(bits)
        return Matrix(tuple(tuple(r) for r in vals))

    def apply(self, q: Sequence[int], theta: TargetShift | None = None) -> tuple:
        """The vector Xq + theta with exact (or PrecisionReal) coordinates."""
        if len(q) != self.n:
            raise DimensionError("q has the wrong length")
        th = theta.values if theta is not None else (0,) * self.m
        return tuple(dot(q, row, 0) if is_exact(t) else add(dot(q, row, 0), t)
                     for row, t in zip(self.rows, th))

    def __str__(self) -> str:
        return "; ".join(", ".join(render(x) for x in row) for row in self.rows)


def split_entries(chunk: str) -> list[str]:
    # commas inside parentheses belong to a single entry, e.g. liouville(3,5)
    out, depth, cur = [], 0, []
    for ch in chunk:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [t for t in (s.strip() for s in out) if t]


def as_matrix(X) -> Matrix:
    if isinstance(X, Matrix):
        return X
    if isinstance(X, str):
        return Matrix.parse(X)
    return Matrix(tuple(tuple(r) for r in X))


# ---------------------------------------------------------------------------
# Reduction to the fundamental domain


def _exact(y):
    if isinstance(y, float):
        if not math.isfinite(y):
            raise DomainError("input must be finite")
        return y
    if isinstance(y, PrecisionReal):
        raise DomainError("pin PrecisionReal inputs with .value before reducing mod Z")
    return Fraction(y)


def fundamental_representative(y: Sequence) -> tuple:
    """The unique point of [-1/2, 1/2)^m congruent to ``y`` mod Z^m."""
    out = []
    for v in y:
        v = _exact(v)
        out.append(v - math.floor(v + Fraction(1, 2) if not isinstance(v, float) else v + 0.5))
    return tuple(out)


def nearest_integer_distance(y) -> Fraction | float:
    """Distance from ``y`` to the nearest integer, in [0, 1/2]."""
    return abs(fundamental_representative((y,))[0])


def product_norm(y: Sequence) -> Fraction | float:
    """Product of absolute values of the coordinates."""
    out = Fraction(1)
    for v in y:
        out *= abs(_exact(v))
    return out


def plus_product(q: Sequence[int]) -> int:
    """Product of max(1, |q_i|); equals 1 on the zero vector."""
    out = 1
    for v in q:
        out *= max(1, abs(int(v)))
    return out


# ---------------------------------------------------------------------------
# Exact numbers of the form c * 2**e with rational c and e


@dataclass(frozen=True)
class ScaledPow2:
    """The real number ``coeff * 2**exponent``; all comparisons are exact.

    Needed because the diagonal flow uses dyadic powers with rational
    exponents. Comparing ``c1 2^e1 < c2 2^e2`` reduces to comparing
    ``(c1/c2)^den`` with ``2^num`` where ``e2 - e1 = num/den``.
    """

    coeff: Fraction
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        c = Fraction(self.coeff)
        e = Fraction(self.exponent)
        if c == 0:
            e = Fraction(0)
        elif e.denominator == 1 and e != 0:
            # fold integral exponents into the coefficient
            c = c * (Fraction(2) ** int(e))
            e = Fraction(0)
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def of(cls, x) -> ScaledPow2:
        return x if isinstance(x, ScaledPow2) else cls(Fraction(x), Fraction(0))

    def exact(self) -> Fraction | None:
        return self.coeff if self.exponent == 0 else None

    def __float__(self) -> float:
        if self.coeff == 0:
            return 0.0
        lg = _log2_abs(self.coeff) + float(self.exponent)
        if lg > 1000:
            return math.copysign(math.inf, self.coeff)
        return math.copysign(2.0 ** lg, self.coeff)

    def log2(self) -> float:
        if self.coeff <= 0:
            raise DomainError("log2 of a nonpositive number")
        return _log2_abs(self.coeff) + float(self.exponent)

    def __abs__(self):
        return ScaledPow2(abs(self.coeff), self.exponent)

    def __neg__(self):
        return ScaledPow2(-self.coeff, self.exponent)

    def __mul__(self, other):
        o = ScaledPow2.of(other)
        return ScaledPow2(self.coeff * o.coeff, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ScaledPow2.of(other)
        return ScaledPow2(self.coeff / o.coeff, self.exponent - o.exponent)

    def __pow__(self, k: int):
        return ScaledPow2(self.coeff ** k, self.exponent * k)

    def _cmp(self, other) -> int:
        o = ScaledPow2.of(other)
        sa, sb = _sign(self.coeff), _sign(o.coeff)
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        # same nonzero sign: compare magnitudes, flip for negatives
        mag = _cmp_pos(abs(self.coeff), self.exponent, abs(o.coeff), o.exponent)
        return mag if sa > 0 else -mag

    def __eq__(self, other):
        if not isinstance(other, (ScaledPow2, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.coeff, self.exponent))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __str__(self) -> str:
        if self.exponent == 0:
            return render(self.coeff)
        return f"{render(self.coeff)}*2^({render(self.exponent)})"


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _log2_abs(x: Fraction) -> float:
    x = abs(Fraction(x))
    return math.log2(x.numerator) - math.log2(x.denominator)


def _cmp_pos(c1: Fraction, e1: Fraction, c2: Fraction, e2: Fraction) -> int:
    # compare c1 2^e1 with c2 2^e2, all coefficients positive
    gap = _log2_abs(c1) - _log2_abs(c2) + float(e1 - e2)
    if gap > 1e-6:
        return 1
    if gap < -1e-6:
        return -1
    r = e2 - e1
    num, den = r.numerator, r.denominator
    ratio = c1 / c2
    lhs_n, lhs_d = ratio.numerator ** den, ratio.denominator ** den
    # ratio^den vs 2^num
    if num >= 0:
        a, b = lhs_n, lhs_d << num
    else:
        a, b = lhs_n << (-num), lhs_d
    return (a > b) - (a < b)


def pow2(exponent) -> ScaledPow2:
    return ScaledPow2(Fraction(1), Fraction(exponent))


def rational_pow(base: Fraction, exponent: Fraction) -> ScaledPow2:
    """``base ** exponent`` for a positive power of two base; general bases raise."""
    base = Fraction(base)
    if base <= 0:
        raise DomainError("base must be positive")
    n, d = base.numerator, base.denominator
    if n & (n - 1) == 0 and d & (d - 1) == 0:
        return pow2((n.bit_length() - d.bit_length()) * Fraction(exponent))
    raise DomainError("rational_pow only handles dyadic bases; use compare_power")


def compare_power(x: Fraction, base: Fraction, exponent: Fraction) -> int:
    """Exact sign of ``x - base**exponent`` for positive rational ``base`` and ``x >= 0``."""
    x, base, exponent = Fraction(x), Fraction(base), Fraction(exponent)
    if base <= 0:
        raise DomainError("base must be positive")
    if x <= 0:
        return -1
    num, den = exponent.numerator, exponent.denominator
    # x^den vs base^num
    lhs = x ** den
    rhs = base ** num
    return (lhs > rhs) - (lhs < rhs)
