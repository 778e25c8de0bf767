"""Integer lattice reduction and exact close-vector enumeration.

The reduction is the all-integer LLL variant (Cohen, *A Course in
Computational Algebraic Number Theory*, Algorithm 2.6.7), which keeps the
Gram determinants ``d_i`` and the scaled coefficients ``lambda_ij`` as exact
integers. Enumeration reuses those integers, so every pruning decision is
exact: no lattice point inside the search ball is ever missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceeded, DimensionError

DEFAULT_DELTA = Fraction(99, 100)


@dataclass
class ReducedBasis:
    """An LLL-reduced basis with its exact Gram-Schmidt data.

    ``gram_det[i]`` is the Gram determinant of the first ``i`` vectors
    (``gram_det[0] == 1``) and ``lam[k][j]`` equals ``mu_kj * gram_det[j+1]``.
    """

    basis: list[list[int]]
    gram_det: list[int]
    lam: list[list[int]]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def gs_sqnorm(self, i: int) -> Fraction:
        return Fraction(self.gram_det[i + 1], self.gram_det[i])

    def mu(self, k: int, j: int) -> Fraction:
        return Fraction(self.lam[k][j], self.gram_det[j + 1])


class EnumerationCut(BudgetExceeded):
    """The node budget ran out; ``partial`` holds the vectors found so far."""

    def __init__(self, message: str, partial: list[list[int]]):
        super().__init__(message)
        self.partial = partial


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b for b > 0, ties toward +inf
    return (2 * a + b) // (2 * b)


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = DEFAULT_DELTA) -> ReducedBasis:
    """LLL-reduce a list of linearly independent integer row vectors."""
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n == 0:
        raise DimensionError("empty basis")
    dn, dd = delta.numerator, delta.denominator
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * n for _ in range(n)]

    def inc_gs(k: int) -> None:
        for j in range(k + 1):
            u = _dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise DimensionError("basis vectors are linearly dependent")
                d[k + 1] = u

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = _round_div(lam[k][l], d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int, kmax: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        big = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
            lam[i][k - 1] = (big * t + lk * lam[i][k]) // d[k + 1]
        d[k] = big

    inc_gs(0)
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            inc_gs(k)
        red(k, k - 1)
        # Lovasz condition in integer form: d_{k+1} d_{k-1} < delta d_k^2 - lam^2
        if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return ReducedBasis(b, d, [row[:] for row in lam])


def _solve_coordinates(basis: list[list[int]], target: Sequence[int]) -> list[Fraction]:
    """Exact coordinates x with x @ basis == target (basis square, full rank)."""
    n = len(basis)
    # columns of the system are basis rows: solve basis^T x = target
    a = [[Fraction(basis[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _isqrt_floor(x: Fraction) -> int:
    """floor(sqrt(x)) for x >= 0."""
    if x <= 0:
        return 0
    num, den = x.numerator, x.denominator
    r = math.isqrt(num * den) // den
    while (r + 1) ** 2 * den <= num:
        r += 1
    while r * r * den > num:
        r -= 1
    return r


def _range_around(c: Fraction, r2: Fraction) -> tuple[int, int]:
    # integers x with (x - c)^2 <= r2
    if r2 < 0:
        return 1, 0
    s = _isqrt_floor(r2)
    lo = math.ceil(c - s - 1)
    hi = math.floor(c + s + 1)
    while lo <= hi and (lo - c) ** 2 > r2:
        lo += 1
    while hi >= lo and (hi - c) ** 2 > r2:
        hi -= 1
    return lo, hi


def enumerate_close(red: ReducedBasis, target: Sequence[int], radius_sq: Fraction | int,
                    node_budget: int = 1_000_000) -> list[list[int]]:
    """All lattice vectors ``v`` with ``|v - target|^2 <= radius_sq`` (exact)."""
    n = red.dim
    if len(target) != len(red.basis[0]):
        raise DimensionError("target has the wrong length")
    radius_sq = Fraction(radius_sq)
    xt = _solve_coordinates(red.basis, target)
    bstar = [red.gs_sqnorm(i) for i in range(n)]
    mu = [[red.mu(k, j) if j < k else Fraction(0) for j in range(n)] for k in range(n)]
    found: list[list[int]] = []
    x = [0] * n
    nodes = 0

    def walk(level: int, partial: Fraction) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise EnumerationCut(f"enumeration exceeded {node_budget} nodes", _to_vectors(found))
        c = xt[level] - sum((mu[i][level] * (x[i] - xt[i]) for i in range(level + 1, n)), Fraction(0))
        lo, hi = _range_around(c, (radius_sq - partial) / bstar[level])
        for v in range(lo, hi + 1):
            x[level] = v
            if level == 0:
                nodes += 1
                if nodes > node_budget:
                    raise EnumerationCut(f"enumeration exceeded {node_budget} nodes", _to_vectors(found))
                found.append(list(x))
            else:
                walk(level - 1, partial + bstar[level] * (v - c) ** 2)

    def _to_vectors(coeff_list):
        return [[sum(xi * bi[col] for xi, bi in zip(coeffs, red.basis)) for col in range(len(target))]
                for coeffs in coeff_list]

    walk(n - 1, Fraction(0))
    return _to_vectors(found)


def gauss_reduce(u: Sequence[int], v: Sequence[int]) -> tuple[list[int], list[int]]:
    """Lagrange-Gauss reduction of a rank-2 integer lattice; returns (shortest, second)."""
    u, v = list(map(int, u)), list(map(int, v))
    if _dot(u, u) > _dot(v, v):
        u, v = v, u
    while True:
        nu = _dot(u, u)
        if nu == 0:
            raise DimensionError("basis vectors are linearly dependent")
        q = _round_div(_dot(u, v), nu)
        v = [a - q * b for a, b in zip(v, u)]
        if _dot(v, v) >= nu:
            return u, v
        u, v = v, u
