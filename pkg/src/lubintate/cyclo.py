"""Exact arithmetic in Z[zeta_p] and additive characters of F_{p^m}.

An element is a coefficient vector (c_0, ..., c_{p-2}) in the power basis
1, zeta, ..., zeta^{p-2}; zeta^{p-1} is rewritten as -(1 + ... + zeta^{p-2}).
Coefficients are Python ints (or Fractions when dividing), so sums over huge
point sets never overflow.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .ffield import FieldError, FiniteField, FqElem

TOL = 1e-9


@dataclass(frozen=True)
class CycSum:
    p: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != max(self.p - 1, 1):
            raise ValueError(f"Z[zeta_{self.p}] elements need {max(self.p - 1, 1)} coefficients")

    # -- constructors
    @classmethod
    def from_int(cls, p: int, k) -> "CycSum":
        return cls(p, (k,) + (0,) * (max(p - 1, 1) - 1))

    @classmethod
    def zeta_power(cls, p: int, t: int) -> "CycSum":
        """zeta^t."""
        return cls.from_exponent_counts(p, {t % p: 1})

    @classmethod
    def from_exponent_counts(cls, p: int, counts) -> "CycSum":
        """sum_t counts[t] * zeta^t, with counts a mapping or length-p sequence."""
        items = counts.items() if hasattr(counts, "items") else enumerate(counts)
        full = [0] * p
        for t, c in items:
            full[int(t) % p] += int(c) if not isinstance(c, Fraction) else c
        return cls._reduce_full(p, full)

    @staticmethod
    def _reduce_full(p: int, full: Sequence) -> "CycSum":
        # full has length p, coefficient of zeta^{p-1} folded in
        if p == 2:
            return CycSum(2, (full[0] - full[1],))
        top = full[p - 1]
        return CycSum(p, tuple(full[i] - top for i in range(p - 1)))

    def _full(self) -> list:
        if self.p == 2:
            return [self.coeffs[0], 0]
        return list(self.coeffs) + [0]

    # -- ring operations
    def _coerce(self, other) -> "CycSum":
        if isinstance(other, CycSum):
            if other.p != self.p:
                raise ValueError(f"mismatched primes {self.p} and {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycSum.from_int(self.p, other)
        raise TypeError(type(other))

    def __add__(self, other):
        o = self._coerce(other)
        return CycSum(self.p, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycSum(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        p = self.p
        a, b = self._full(), o._full()
        out = [0] * p
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % p] += x * y
        return CycSum._reduce_full(p, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r, b = CycSum.from_int(self.p, 1), self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def galois(self, j: int) -> "CycSum":
        """Apply zeta -> zeta^j (j prime to p)."""
        if j % self.p == 0:
            raise ValueError("galois exponent must be prime to p")
        full = self._full()
        out = [0] * self.p
        for i, c in enumerate(full):
            out[(i * j) % self.p] += c
        return CycSum._reduce_full(self.p, out)

    def conj(self) -> "CycSum":
        return self.galois(-1)

    def norm(self):
        """Absolute norm to Q (a rational)."""
        r = CycSum.from_int(self.p, 1)
        for j in range(1, self.p):
            r = r * self.galois(j)
        return r.rational_value()

    def inverse(self) -> "CycSum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        rest = CycSum.from_int(self.p, 1)
        for j in range(2, self.p):
            rest = rest * self.galois(j)
        nm = (rest * self).rational_value()
        return CycSum(self.p, tuple(Fraction(c) / nm for c in rest.coeffs))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycSum.from_int(self.p, other)
        if not isinstance(other, CycSum):
            return NotImplemented
        return self.p == other.p and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.p, tuple(self.coeffs)))

    # -- complex embeddings
    def embed(self, j: int = 1) -> complex:
        """Image under zeta -> exp(2 pi i j / p)."""
        w = cmath.exp(2j * cmath.pi * j / self.p)
        return complex(sum(complex(float(c)) * w ** i for i, c in enumerate(self.coeffs)))

    def embeddings(self) -> list[complex]:
        return [self.embed(j) for j in range(1, self.p)]

    def to_list(self) -> list:
        return [int(c) if isinstance(c, int) or c.denominator == 1 else str(c) for c in self.coeffs]

    def __repr__(self):
        return f"CycSum(p={self.p}, {self.to_list()})"


def abs_square(a: CycSum) -> dict:
    """a * conj(a) together with its values under every complex embedding.

    ``exact`` holds the rational value when the product is rational, else None;
    ``values`` are the real parts at each embedding (they agree with each other
    only when the product is rational).
    """
    prod = a * a.conj()
    vals = [z.real for z in prod.embeddings()]
    exact = prod.rational_value() if prod.is_rational() else None
    direct = [abs(a.embed(j)) ** 2 for j in range(1, a.p)]
    if any(abs(u - v) > TOL * max(1.0, abs(v)) for u, v in zip(vals, direct)):
        raise ArithmeticError("embedding of a*conj(a) disagrees with |embedding of a|^2")
    return {"product": prod, "exact": exact, "values": vals}


def cyc_arith(a: CycSum, b: CycSum | None, op: str) -> CycSum:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "conj":
        return a.conj()
    raise ValueError(f"unknown operation {op!r}")


class AdditiveCharacter:
    """psi_a(x) = zeta^{Tr_{F_{p^m}/F_p}(a x)} on F_{p^m}.

    ``a`` is the twisting scalar; a = 0 gives the trivial character.  With
    a = 1 this is the standard character sending 1 in F_p to exp(2 pi i / p).
    """

    def __init__(self, source: FiniteField, scalar: int | FqElem = 1):
        self.source = source
        self.p = source.p
        self.scalar = source(scalar if isinstance(scalar, FqElem) else int(scalar))
        # exponent of zeta at every element of the source field
        xs = source.elements()
        tw = source.mul_v(xs, self.scalar.value)
        tr = source.trace_v(tw, 1)
        # prime-field elements encode as their integer value
        self.exponents = tr.astype(np.int64)

    @property
    def trivial(self) -> bool:
        return self.scalar.value == 0

    def __call__(self, x: FqElem) -> CycSum:
        return char_eval(self, x)

    def exponent(self, x: FqElem) -> int:
        if x.field is not self.source:
            tower = x.field.tower
            if tower is None or tower is not self.source.tower:
                raise FieldError("argument not embeddable into the character's field")
            x = tower.restrict(x, self.source) if x.field.degree % self.source.degree == 0 \
                else tower.embed(x, self.source)
        return int(self.exponents[x.value])

    def __repr__(self):
        return f"psi[{self.scalar.value}] on {self.source!r}"


def char_eval(psi: AdditiveCharacter, x: FqElem) -> CycSum:
    return CycSum.zeta_power(psi.p, psi.exponent(x))


def all_characters(source: FiniteField) -> list[AdditiveCharacter]:
    """The p^m characters psi_a, indexed by a in encoding order (a = 0 trivial)."""
    return [AdditiveCharacter(source, a) for a in range(source.order)]
