"""Closed-form exponent formulas and transference bounds in exact arithmetic.

Every function takes and returns extended reals: a ``Fraction`` or
``math.inf``. Values at infinity are monotone limits of the finite formula.
Inputs below the generic (Dirichlet) value of the exponent they describe
raise :class:`DomainError`.

Naming of dimensions follows each formula: for the matrix bounds the generic
value of ``v`` is ``m/n`` in :func:`matrix_inhom_lower` and ``n/m`` in
:func:`matrix_mult_inhom_lower`, the points at which each collapses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .core import INF, ext_real, is_inf, render
from .errors import DomainError


@dataclass(frozen=True)
class BoundInterval:
    """A closed interval ``[lower, upper]`` of extended reals.

    ``provenance`` names the calculators composed to produce it. A vacuous
    endpoint (nonpositive denominator) is replaced by the trivial bound and
    flagged.
    """

    lower: Fraction | float
    upper: Fraction | float
    provenance: tuple[str, ...] = ()
    lower_vacuous: bool = False
    upper_vacuous: bool = False

    def contains(self, x, tol: float = 0.0) -> bool:
        return float(self.lower) - tol <= float(x) <= float(self.upper) + tol

    def as_record(self) -> dict:
        return {
            "lower": render(self.lower),
            "upper": render(self.upper),
            "lower_vacuous": self.lower_vacuous,
            "upper_vacuous": self.upper_vacuous,
            "provenance": list(self.provenance),
        }

    def __str__(self) -> str:
        return f"{render(self.lower)}, {render(self.upper)}"


def _dim(n: int, least: int = 1, name: str = "n") -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < least:
        raise DomainError(f"{name} must be an integer >= {least}")
    return n


def _at_least(w, floor, what: str):
    w = ext_real(w)
    if w < floor:
        raise DomainError(f"{what} = {render(w)} is below its generic value {render(floor)}")
    return w


def _max(*xs):
    return max(xs)


def _min(*xs):
    return min(xs)


# ---------------------------------------------------------------------------
# Hyperplane formulas


def kleinbock_hyperplane_dual(omega0_a, n: int):
    """Dual exponent of the hyperplane with parameter a in R^(n-1): max(n, omega0(a))."""
    _dim(n, 2)
    w = _at_least(omega0_a, Fraction(1, n - 1), "omega0(a)")
    return _max(Fraction(n), w)


def zhang_hyperplane_sim(omega_dual_a, n: int):
    """Simultaneous exponent of the hyperplane: max(1/n, w / (n + (n-1) w))."""
    _dim(n, 2)
    w = _at_least(omega_dual_a, n - 1, "omega_dual(a)")
    if is_inf(w):
        return Fraction(1, n - 1)
    return _max(Fraction(1, n), w / (n + (n - 1) * w))


def zhang_hyperplane_mult(omega0_a, n: int, s: int):
    """Multiplicative dual exponent of the affine hyperplane: max(n, (n/s) omega0(a))."""
    _dim(n, 2)
    if not isinstance(s, int) or not 1 <= s <= n:
        raise DomainError(f"s must lie in [1, {n}]")
    w = _at_least(omega0_a, Fraction(1, n), "omega0(a)")
    if is_inf(w):
        return INF
    return _max(Fraction(n), Fraction(n, s) * w)


# ---------------------------------------------------------------------------
# Transference inequalities


def bl_lower(uniform_exponent_transpose):
    """Reciprocal lower bound 1/u on the inhomogeneous exponent; 1/inf is 0."""
    u = ext_real(uniform_exponent_transpose)
    if u == 0:
        raise DomainError("the reciprocal bound is undefined at 0")
    if is_inf(u):
        return Fraction(0)
    return 1 / u


def german_hat_bounds_sim(omega_hat_dual, n: int) -> BoundInterval:
    """Uniform simultaneous exponent from the uniform dual one, for x in R^n."""
    _dim(n, 2)
    w = _at_least(omega_hat_dual, n, "uniform dual exponent")
    if is_inf(w):
        lo, hi = Fraction(1, n - 1), Fraction(1)
    else:
        lo = (w - 1) / ((n - 1) * w)
        hi = (w - (n - 1)) / w
    return BoundInterval(lo, hi, ("german_hat_bounds_sim",))


def german_hat_transpose_lower(omega_hat, m: int, n: int):
    """Lower bound on the uniform exponent of the transpose from the uniform exponent.

    ``(n-1)/(m - w)`` when ``w <= 1`` and ``(n - 1/w)/(m - 1)`` when ``w >= 1``.
    """
    _dim(m), _dim(n)
    w = ext_real(omega_hat)
    if w <= 1:
        if m - w <= 0:
            raise DomainError("denominator m - w is not positive")
        return Fraction(n - 1) / (m - w)
    if m == 1:
        raise DomainError("denominator m - 1 vanishes")
    if is_inf(w):
        return Fraction(n, m - 1)
    return (n - 1 / w) / (m - 1)


def german_mult_hat_upper(omega_hat_mult_transpose, m: int, n: int):
    """Upper bound (m u - n + 1) / (n - (m-1) u) on a uniform multiplicative exponent."""
    _dim(m), _dim(n)
    u = ext_real(omega_hat_mult_transpose)
    if is_inf(u):
        if m == 1:
            return INF
        raise DomainError("denominator is negative at infinity")
    den = n - (m - 1) * u
    if den <= 0:
        raise DomainError("denominator n - (m-1)u is not positive: the bound is vacuous")
    return (m * u - n + 1) / den


# ---------------------------------------------------------------------------
# Lower bounds on inhomogeneous exponents


def manifold_inhom_lower_sim(omega0_M, n: int):
    """max(0, 1 - (n-1) w) for the simultaneous exponent w of a manifold in R^n."""
    _dim(n, 2)
    w = _at_least(omega0_M, Fraction(1, n), "omega0(M)")
    if is_inf(w):
        return Fraction(0)
    return _max(Fraction(0), 1 - (n - 1) * w)


def manifold_inhom_lower_dual(omega_dual_M, n: int):
    """w / (w - n + 1) for the dual exponent w >= n of a manifold in R^n."""
    _dim(n, 2)
    w = _at_least(omega_dual_M, n, "omega_dual(M)")
    if is_inf(w):
        return Fraction(1)
    return w / (w - n + 1)


class HatBranch(enum.Enum):
    HAT_LE_1 = "le1"  # uniform exponent of the transpose at most 1
    HAT_GE_1 = "ge1"


def _member(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise DomainError(f"{value!r} is not one of {choices}") from None


def matrix_inhom_lower(v, m: int, n: int, branch: HatBranch | str):
    """Lower bound for an m x n matrix with homogeneous exponent v, clamped at 0.

    ``v / (n v - m + 1)`` on the ``HAT_LE_1`` branch, ``m - (n-1) v`` on
    ``HAT_GE_1``; both equal ``m/n`` at ``v = m/n``.
    """
    _dim(m), _dim(n)
    branch = _member(HatBranch, branch)
    v = _at_least(v, Fraction(m, n), "v")
    if branch is HatBranch.HAT_LE_1:
        if is_inf(v):
            return Fraction(1, n)
        den = n * v - m + 1
        if den <= 0:
            raise DomainError("denominator n v - m + 1 is not positive")
        return _max(Fraction(0), v / den)
    if is_inf(v):
        return Fraction(0) if n > 1 else Fraction(m)
    return _max(Fraction(0), m - (n - 1) * v)


def matrix_mult_inhom_lower(v_mult, m: int, n: int):
    """max(0, (n - (m-1) v) / (m v - n + 1)), which equals n/m at v = n/m."""
    _dim(m), _dim(n)
    v = _at_least(v_mult, Fraction(n, m), "v")
    if is_inf(v):
        return Fraction(0)
    den = m * v - n + 1
    if den <= 0:
        raise DomainError("denominator m v - n + 1 is not positive")
    return _max(Fraction(0), (n - (m - 1) * v) / den)


def manifold_mult_inhom_lower_sim(omega0x_M, n: int):
    """(1 - (n-1) w) / (n w), clamped at 0, for a multiplicative simultaneous exponent w."""
    _dim(n, 2)
    w = _at_least(omega0x_M, Fraction(1, n), "omega0x(M)")
    if is_inf(w):
        return Fraction(0)
    return _max(Fraction(0), (1 - (n - 1) * w) / (n * w))


def manifold_mult_inhom_lower_dual(omega_dualx_M, n: int):
    """n / (w - (n-1)) for a multiplicative dual exponent w >= n."""
    _dim(n, 2)
    w = _at_least(omega_dualx_M, n, "omega_dualx(M)")
    if is_inf(w):
        return Fraction(0)
    return Fraction(n) / (w - (n - 1))


# ---------------------------------------------------------------------------
# Sandwich intervals for points on a hyperplane


class SandwichTarget(enum.Enum):
    SIM_INHOM = "sim"
    DUAL_INHOM = "dual"
    DUAL_MULT_INHOM = "dualmult"


def _s_param(s, n: int) -> int:
    if s is None:
        raise DomainError("this interval needs the parameter s")
    if not isinstance(s, int) or not 1 <= s <= n:
        raise DomainError(f"s must lie in [1, {n}]")
    return s


def _lower_dual_branch(w, n: int, s: int):
    # min(n, n s / (n w - (n-1) s)); a nonpositive denominator makes it vacuous
    if is_inf(w):
        return Fraction(0), False
    den = n * w - (n - 1) * s
    if den <= 0:
        return Fraction(0), True
    return _min(Fraction(n), Fraction(n * s) / den), False


def sandwich_hyperplane(omega, n: int, target: SandwichTarget | str,
                        s: int | None = None) -> BoundInterval:
    """Interval for an inhomogeneous exponent of a generic point on a hyperplane.

    ``SIM_INHOM``: ``omega`` is the dual exponent of a in R^(n-1).
    ``DUAL_INHOM``: ``omega`` is the simultaneous exponent of a; the lower
    endpoint needs the explicit integer ``s``.
    ``DUAL_MULT_INHOM``: ``omega`` is the simultaneous exponent of a in R^n
    (affine form) and ``s - 1`` counts nonzero a_1..a_{n-1}.
    """
    _dim(n, 2)
    target = _member(SandwichTarget, target)

    if target is SandwichTarget.SIM_INHOM:
        w = _at_least(omega, n - 1, "omega_dual(a)")
        if is_inf(w):
            lo, hi = Fraction(0), Fraction(1, n - 1)
        else:
            lo = _min(Fraction(1, n), Fraction(n) / (n + (n - 1) * w))
            hi = _max(Fraction(1, n), w / (n + (n - 1) * w))
        return BoundInterval(lo, hi, ("zhang_hyperplane_sim", "manifold_inhom_lower_sim"))

    if target is SandwichTarget.DUAL_INHOM:
        s = _s_param(s, n)
        w = _at_least(omega, Fraction(1, n - 1), "omega0(a)")
        lo, lo_vac = _lower_dual_branch(w, n, s)
        if is_inf(w):
            hi, hi_vac = Fraction(n), False
        elif w - n + 1 <= 0:
            hi, hi_vac = INF, True
        else:
            hi, hi_vac = _max(Fraction(n), w / (w - n + 1)), False
        return BoundInterval(lo, hi, ("kleinbock_hyperplane_dual", "manifold_inhom_lower_dual"),
                             lo_vac, hi_vac)

    s = _s_param(s, n)
    w = _at_least(omega, Fraction(1, n), "omega0(a)")
    lo, lo_vac = _lower_dual_branch(w, n, s)
    hi = zhang_hyperplane_mult(w, n, s)
    return BoundInterval(lo, hi, ("zhang_hyperplane_mult", "manifold_mult_inhom_lower_dual"),
                         lo_vac, False)
