"""Exact Bernoulli and generalised Euler polynomial machinery.

The generalised Euler polynomials are the Strodt polynomials of the uniform
discrete weight on {0, ..., k-1}: the unique polynomials with

    (1/k) * (E_{k,n}(x) + E_{k,n}(x+1) + ... + E_{k,n}(x+k-1)) = x^n.

They are built from that averaging property by an exact O(n^2) recurrence;
the generating series k e^{xt} / (1 + e^t + ... + e^{(k-1)t}) is demoted to
a test oracle.  k = 2 recovers the classical Euler polynomials.  Everything
here is exact rational arithmetic on big integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import mpmath as mp

from .rootsofunity import RotationNumber

__all__ = [
    "RationalPolynomial",
    "InnerProductCoeff",
    "bernoulli_number",
    "bernoulli_polynomial",
    "bernoulli_sup_bound",
    "power_sum",
    "gen_euler_polynomial",
    "gen_euler_at_zero",
    "gen_euler_at_one",
    "sup_bound",
    "periodic_gen_euler_eval",
    "inner_product",
]


class RationalPolynomial:
    """A polynomial with exact Fraction coefficients, index = degree."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self._coeffs = tuple(coeffs)

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        return isinstance(other, RationalPolynomial) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __add__(self, other):
        n = max(len(self._coeffs), len(other._coeffs))
        return RationalPolynomial(
            [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    def __sub__(self, other):
        n = max(len(self._coeffs), len(other._coeffs))
        return RationalPolynomial(
            [self.coeff(i) - other.coeff(i) for i in range(n)]
        )

    def __mul__(self, other):
        if isinstance(other, RationalPolynomial):
            out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs))
            for i, a in enumerate(self._coeffs):
                for j, b in enumerate(other._coeffs):
                    out[i + j] += a * b
            return RationalPolynomial(out)
        return RationalPolynomial([c * Fraction(other) for c in self._coeffs])

    __rmul__ = __mul__

    def coeff(self, i: int) -> Fraction:
        return self._coeffs[i] if i < len(self._coeffs) else Fraction(0)

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(
            [i * c for i, c in enumerate(self._coeffs)][1:]
        )

    def compose_affine(self, a, b) -> "RationalPolynomial":
        """p(a*x + b), exact."""
        a, b = Fraction(a), Fraction(b)
        out = RationalPolynomial([])
        lin = RationalPolynomial([b, a])
        power = RationalPolynomial([1])
        for c in self._coeffs:
            out = out + power * c
            power = power * lin
        return out

    def __call__(self, x):
        """Horner evaluation; exact for Fraction x, rounded for mpf/mpc."""
        if isinstance(x, (Fraction, int)):
            acc = Fraction(0)
            for c in reversed(self._coeffs):
                acc = acc * x + c
            return acc
        acc = mp.mpf(0)
        for c in reversed(self._coeffs):
            acc = acc * x + mp.mpf(c.numerator) / c.denominator
        return acc

    def coeff_abs_sum(self) -> Fraction:
        return sum((abs(c) for c in self._coeffs), Fraction(0))

    def __repr__(self):
        return f"RationalPolynomial({list(self._coeffs)!r})"


@lru_cache(maxsize=None)
def bernoulli_number(j: int) -> Fraction:
    """Exact B_j with the B_1 = -1/2 convention (so B_j = B_j(0))."""
    if j < 0:
        raise ValueError("Bernoulli index must be >= 0")
    if j == 0:
        return Fraction(1)
    if j >= 3 and j % 2 == 1:
        return Fraction(0)
    total = Fraction(0)
    for i in range(j):
        total += math.comb(j + 1, i) * bernoulli_number(i)
    return -total / (j + 1)


@lru_cache(maxsize=None)
def bernoulli_polynomial(j: int) -> RationalPolynomial:
    """B_j(x) = sum_i binom(j, i) B_i x^(j-i)."""
    coeffs = [Fraction(0)] * (j + 1)
    for i in range(j + 1):
        coeffs[j - i] = math.comb(j, i) * bernoulli_number(i)
    return RationalPolynomial(coeffs)


def bernoulli_sup_bound(j: int) -> Fraction:
    """Coefficient-sum upper bound for max |B_j(x)| on [0, 1]."""
    return bernoulli_polynomial(j).coeff_abs_sum()


@lru_cache(maxsize=None)
def power_sum(k: int, d: int) -> int:
    """S_k(d) = 0^d + 1^d + ... + (k-1)^d with the 0^0 = 1 convention."""
    if d == 0:
        return k
    return sum(j ** d for j in range(1, k))


@lru_cache(maxsize=None)
def gen_euler_polynomial(k: int, n: int) -> RationalPolynomial:
    """E_{k,n}(x), from the averaging recurrence

        E_{k,n}(x) = x^n - (1/k) sum_{m<n} binom(n, m) S_k(n-m) E_{k,m}(x).
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if n < 0:
        raise ValueError("polynomial index must be >= 0")
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    poly = RationalPolynomial(coeffs)
    for m in range(n):
        c = Fraction(math.comb(n, m) * power_sum(k, n - m), k)
        poly = poly - gen_euler_polynomial(k, m) * c
    return poly


def gen_euler_at_zero(k: int, n: int) -> Fraction:
    return gen_euler_polynomial(k, n).coeff(0)


def gen_euler_at_one(k: int, n: int) -> Fraction:
    return gen_euler_polynomial(k, n)(Fraction(1))


def sup_bound(k: int, n: int) -> Fraction:
    """Coefficient-sum upper bound for max |E_{k,n}(x)| on [0, 1]."""
    return gen_euler_polynomial(k, n).coeff_abs_sum()


def _require_primitive(k: int, zeta: RotationNumber):
    if k < 2 or zeta.order != k:
        raise ValueError(f"{zeta} is not a primitive {k}-th root of unity")


def periodic_gen_euler_eval(k: int, zeta: RotationNumber, n: int, x):
    """The quasi-periodic extension: zeta^(-floor(x)) * E_{k,n}(x - floor(x))."""
    _require_primitive(k, zeta)
    x = mp.mpf(x)
    m = int(mp.floor(x))
    phase = (zeta ** (-m)).value()
    return phase * gen_euler_polynomial(k, n)(x - m)


def inner_product(k: int, zeta: RotationNumber, i: int, j: int):
    """<v_{i,j}, w_{i,j}> = sum_{a=i..j} zeta^(i+j-a) * (a/k - 1).

    The weight vector w is real, so no conjugation question arises; the
    expansion is evaluated verbatim.
    """
    if not 1 <= i <= j <= k - 1:
        raise ValueError(f"need 1 <= i <= j <= k-1, got i={i}, j={j}, k={k}")
    _require_primitive(k, zeta)
    powers = zeta.power_values()
    total = mp.mpc(0)
    for a in range(i, j + 1):
        w = Fraction(a, k) - 1
        total += powers[(i + j - a) % k] * w.numerator / w.denominator
    return total


@dataclass(frozen=True)
class InnerProductCoeff:
    """One boundary coefficient <v_{i,j}, w_{i,j}> of the twisted summation formula."""

    k: int
    zeta: RotationNumber
    i: int
    j: int
    value: object

    @classmethod
    def compute(cls, k: int, zeta: RotationNumber, i: int, j: int) -> "InnerProductCoeff":
        return cls(k=k, zeta=zeta, i=i, j=j, value=inner_product(k, zeta, i, j))
