"""Finite-field towers over F_p with table-driven arithmetic.

Elements of F_{p^s} are encoded as integers sum_i c_i p^i, where c_i is the
coefficient of x^i modulo the field's defining polynomial.  Every field in a
tower carries exp/log tables so that bulk operations run on numpy arrays.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

MAX_FIELD_ORDER = 1 << 22


class ParamError(ValueError):
    """Raised when a parameter tuple violates one of its invariants."""


class FieldError(ValueError):
    """Raised on cross-field arithmetic or a bad subfield request."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class ParamSet:
    """The tuple (p, f, e, n') and its derived quantities.

    q = p^f, n = p^e n', m = gcd(e, f), n1 = gcd(n, p^m - 1).
    """

    p: int
    f: int
    e: int
    nprime: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ParamError(f"p must be prime (got p={self.p})")
        for name in ("f", "e", "nprime"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ParamError(f"{name} must be a positive integer (got {name}={v})")
        if math.gcd(self.nprime, self.p) != 1:
            raise ParamError(
                f"nprime must be coprime to p: gcd(nprime={self.nprime}, p={self.p}) != 1")

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def pe(self) -> int:
        return self.p ** self.e

    @property
    def n(self) -> int:
        return self.pe * self.nprime

    @property
    def m(self) -> int:
        return math.gcd(self.e, self.f)

    @property
    def n1(self) -> int:
        return math.gcd(self.n, self.p ** self.m - 1)

    @property
    def eps0(self) -> int:
        # (n'+1)/2 when p^e = 2, else 0
        return (self.nprime + 1) // 2 if self.pe == 2 else 0

    @property
    def eps1(self) -> int:
        return 1 if self.pe == 2 else 0

    def derived(self) -> dict:
        return {"q": self.q, "n": self.n, "m": self.m, "n1": self.n1}

    def as_dict(self) -> dict:
        return {"p": self.p, "f": self.f, "e": self.e, "nprime": self.nprime, **self.derived()}

    def __str__(self):
        return f"({self.p},{self.f},{self.e},{self.nprime})"


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, low degree first

def _ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = [c % p for c in a]
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(_ptrim(a)) - 1 >= df:
        a = _ptrim(a)
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
    return _ptrim(a)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _pgcd(a, b, p):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppow_mod(base, k, f, p):
    result, base = [1], _pmod(base, f, p)
    while k:
        if k & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        k >>= 1
    return result


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin test for a polynomial given low-degree-first."""
    f = _ptrim([c % p for c in coeffs])
    s = len(f) - 1
    if s < 1:
        return False
    if s == 1:
        return True
    x = [0, 1]
    if _psub(_ppow_mod(x, p ** s, f, p), x, p):
        return False
    for r in prime_factors(s):
        h = _psub(_ppow_mod(x, p ** (s // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def least_irreducible(p: int, s: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree s over F_p.

    Candidates are ordered by the integer sum_{i<s} c_i p^i, i.e. lexicographically
    on (c_{s-1}, ..., c_0).
    """
    if s == 1:
        return (0, 1)
    for code in range(p ** s):
        low = [(code // p ** i) % p for i in range(s)]
        if low[0] == 0:
            continue
        cand = low + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------

class FiniteField:
    """F_{p^s} = F_p[x]/(modulus) with exp/log tables.

    Bulk methods (suffix ``_v``) take and return int64 numpy arrays of encoded
    elements.
    """

    def __init__(self, p: int, s: int, modulus: Sequence[int] | None = None, tower=None):
        if not is_prime(p):
            raise ParamError(f"p must be prime (got p={p})")
        if p ** s > MAX_FIELD_ORDER:
            raise FieldError(f"F_{p}^{s} exceeds the table limit of {MAX_FIELD_ORDER} elements")
        if modulus is None:
            modulus = least_irreducible(p, s)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != s + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {s}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {list(modulus)} is reducible over F_{p}")
        self.p, self.degree, self.modulus = p, s, modulus
        self.order = p ** s
        self.tower = tower
        self._pw = np.array([p ** i for i in range(s)], dtype=np.int64)
        self._build_tables()

    # -- scalar polynomial helpers on encoded ints
    def _digits(self, x: int) -> list[int]:
        return [(x // self.p ** i) % self.p for i in range(self.degree)]

    def _encode(self, digits) -> int:
        return sum(int(d) % self.p * self.p ** i for i, d in enumerate(digits))

    def _slow_mul(self, x: int, y: int) -> int:
        return self._encode(_pmod(_pmul(_ptrim(self._digits(x)), _ptrim(self._digits(y)), self.p),
                                  list(self.modulus), self.p))

    def _build_tables(self):
        N = self.order
        # smallest primitive element by encoded value
        facs = prime_factors(N - 1) if N > 2 else []
        g = None
        for cand in range(1, N):
            if cand == 1 and N > 2:
                continue
            ok = True
            for r in facs:
                if self._slow_pow(cand, (N - 1) // r) == 1:
                    ok = False
                    break
            if ok:
                g = cand
                break
        self.primitive = g
        # exp table by doubling: exp[K:2K] = exp[:K] * g^K
        exp = np.zeros(max(N - 1, 1), dtype=np.int64)
        exp[0] = 1
        K, gK = 1, g
        while K < N - 1:
            L = min(K, N - 1 - K)
            exp[K:K + L] = self._mul_const_v(exp[:L], gK)
            gK = self._slow_mul(gK, gK)
            K += L
        log = np.full(N, -1, dtype=np.int64)
        log[exp] = np.arange(N - 1, dtype=np.int64)
        self._exp, self._log = exp, log
        self._add_table = None
        if self.p != 2 and N <= 1024:
            a = np.arange(N, dtype=np.int64)
            self._add_table = self._add_digits(a[:, None], a[None, :])

    def _slow_pow(self, x: int, k: int) -> int:
        r = self._encode(_ppow_mod(_ptrim(self._digits(x)), k, list(self.modulus), self.p)) if x else 0
        return 1 if k == 0 else r

    def _mul_const_v(self, xs: np.ndarray, c: int) -> np.ndarray:
        # multiplication by a constant is F_p-linear: combine images of the basis
        basis = [self._slow_mul(self.p ** i, c) for i in range(self.degree)]
        out = np.zeros_like(xs)
        for i, b in enumerate(basis):
            d = (xs // self._pw[i]) % self.p
            for t in range(1, self.p):
                sel = d == t
                if sel.any():
                    out[sel] = self._add_digits(out[sel], np.int64(self._slow_mul(b, t)))
        return out

    def _add_digits(self, x, y):
        if self.p == 2:
            return np.bitwise_xor(x, y)
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        for i in range(self.degree):
            w = self._pw[i]
            out += (((x // w) % self.p + (y // w) % self.p) % self.p) * w
        return out

    # -- bulk arithmetic
    def add_v(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor(x, y)
        if self._add_table is not None:
            return self._add_table[x, y]
        return self._add_digits(x, y)

    def smul_v(self, x, k: int):
        """Multiply by the prime-field integer k."""
        x = np.asarray(x, dtype=np.int64)
        k %= self.p
        if k == 0:
            return np.zeros_like(x)
        if k == 1:
            return x.copy()
        out = np.zeros_like(x)
        for i in range(self.degree):
            w = self._pw[i]
            out += (((x // w) % self.p) * k % self.p) * w
        return out

    def neg_v(self, x):
        return self.smul_v(x, -1)

    def sub_v(self, x, y):
        return self.add_v(x, self.neg_v(y))

    def mul_v(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        x, y = np.broadcast_arrays(x, y)
        nz = (x != 0) & (y != 0)
        out = np.zeros(x.shape, dtype=np.int64)
        out[nz] = self._exp[(self._log[x[nz]] + self._log[y[nz]]) % (self.order - 1)]
        return out

    def pow_v(self, x, k: int):
        x = np.asarray(x, dtype=np.int64)
        if k == 0:
            return np.ones_like(x)
        nz = x != 0
        if k < 0 and not nz.all():
            raise ZeroDivisionError("negative power of zero")
        out = np.zeros_like(x)
        out[nz] = self._exp[(self._log[x[nz]] * (k % (self.order - 1))) % (self.order - 1)]
        return out

    def inv_v(self, x):
        return self.pow_v(x, -1)

    def frob_v(self, x, j: int = 1):
        """x -> x^{p^j}; negative j gives the inverse Frobenius."""
        j %= self.degree
        return self.pow_v(x, self.p ** j) if j else np.asarray(x, dtype=np.int64).copy()

    def trace_v(self, x, t: int = 1):
        """Tr_{F_{p^s}/F_{p^t}}, values left encoded in this field."""
        if self.degree % t:
            raise FieldError(f"F_{self.p}^{t} is not a subfield of F_{self.p}^{self.degree}")
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for i in range(self.degree // t):
            acc = self.add_v(acc, self.frob_v(x, t * i))
        return acc

    def subfield_mask(self, t: int) -> np.ndarray:
        """Boolean mask over encodings of the elements of the subfield F_{p^t}."""
        a = np.arange(self.order, dtype=np.int64)
        return self.frob_v(a, t) == a

    # -- scalar API
    def __call__(self, x) -> "FqElem":
        if isinstance(x, FqElem):
            if x.field is not self:
                raise FieldError("element belongs to a different field")
            return x
        if isinstance(x, (list, tuple)):
            if len(x) > self.degree:
                raise FieldError("too many coefficients")
            return FqElem(self, self._encode(x))
        x = int(x)
        if not 0 <= x < self.order:
            raise FieldError(f"encoding {x} out of range for F_{self.p}^{self.degree}")
        return FqElem(self, x)

    def from_int(self, k: int) -> "FqElem":
        """Image of the integer k under Z -> F_p."""
        return FqElem(self, k % self.p)

    @property
    def zero(self):
        return FqElem(self, 0)

    @property
    def one(self):
        return FqElem(self, 1)

    @property
    def gen(self):
        """The class of x."""
        return FqElem(self, self.p if self.degree > 1 else (-self.modulus[0]) % self.p)

    def enumerate(self) -> Iterator["FqElem"]:
        """All p^s elements in increasing encoding order."""
        for i in range(self.order):
            yield FqElem(self, i)

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def unit_group_elements(self, d: int) -> np.ndarray:
        """Encodings of mu_d (requires d | p^s - 1), ordered by discrete log."""
        if (self.order - 1) % d:
            raise FieldError(f"mu_{d} is not contained in F_{self.p}^{self.degree}")
        step = (self.order - 1) // d
        return self._exp[np.arange(d) * step]

    def __repr__(self):
        return f"F_{self.p}^{self.degree}"


@dataclass(frozen=True)
class FqElem:
    field: FiniteField = field(repr=False)
    value: int

    def _check(self, other):
        if isinstance(other, int):
            return self.field.from_int(other).value
        if not isinstance(other, FqElem):
            return NotImplemented
        if other.field is not self.field:
            raise FieldError(f"cross-field arithmetic {self.field!r} vs {other.field!r}; embed first")
        return other.value

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return FqElem(self.field, int(self.field.add_v(self.value, o)))

    __radd__ = __add__

    def __neg__(self):
        return FqElem(self.field, int(self.field.neg_v(self.value)))

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return FqElem(self.field, int(self.field.sub_v(self.value, o)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return FqElem(self.field, int(self.field.mul_v(self.value, o)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return FqElem(self.field, int(self.field.pow_v(self.value, k)))

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return self ** -1

    def __truediv__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self * FqElem(self.field, o).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def frob(self, j: int = 1):
        return FqElem(self.field, int(self.field.frob_v(self.value, j)))

    def is_zero(self):
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def coeffs(self) -> list[int]:
        return self.field._digits(self.value)

    def __repr__(self):
        return f"{self.field!r}({self.value})"


# ---------------------------------------------------------------------------

class Tower:
    """Compatible family of fields F_{p^s} for all s dividing a top degree.

    Each F_{p^s} is embedded in the top field by sending its generator x to the
    root of its modulus with least discrete logarithm (with respect to the top
    field's primitive element) among those generating the degree-s subfield.
    Embeddings F_{p^a} -> F_{p^b} are derived from these, so compatibility along
    any chain a | b | c holds by construction.
    """

    def __init__(self, p: int, degrees: Sequence[int], polynomials: dict | None = None):
        if not is_prime(p):
            raise ParamError(f"p must be prime (got p={p})")
        degrees = sorted(set(int(d) for d in degrees))
        if not degrees or degrees[0] < 1:
            raise FieldError("degrees must be positive integers")
        self.p = p
        self.top = reduce(lambda a, b: a * b // math.gcd(a, b), degrees)
        self.requested = degrees
        polynomials = dict(polynomials or {})
        for s in polynomials:
            if self.top % int(s):
                raise FieldError(f"polynomial supplied for degree {s} outside the tower")
        self._fields: dict[int, FiniteField] = {}
        self._polys = {int(k): tuple(v) for k, v in polynomials.items()}
        self._embed_top: dict[int, np.ndarray] = {}
        self._top_to_sub: dict[int, np.ndarray] = {}
        self.field(self.top)

    def field(self, s: int) -> FiniteField:
        if self.top % s:
            raise FieldError(f"degree {s} does not divide the tower's top degree {self.top}")
        if s not in self._fields:
            self._fields[s] = FiniteField(self.p, s, self._polys.get(s), tower=self)
        return self._fields[s]

    def degrees(self) -> list[int]:
        return divisors(self.top)

    def _embedding_into_top(self, s: int) -> np.ndarray:
        """Array mapping each encoding of F_{p^s} to its image in the top field."""
        if s in self._embed_top:
            return self._embed_top[s]
        F, T = self.field(s), self.field(self.top)
        if s == self.top:
            img = np.arange(T.order, dtype=np.int64)
        elif s == 1:
            img = np.arange(self.p, dtype=np.int64)
        else:
            # generators of the subfield in the top field, by discrete log
            step = (T.order - 1) // (F.order - 1)
            cand = T._exp[np.arange(F.order - 1) * step]
            # evaluate modulus at all candidates
            val = np.zeros_like(cand)
            for c in reversed(F.modulus):
                val = T.add_v(T.mul_v(val, cand), T.smul_v(np.ones_like(cand), c))
            roots = cand[val == 0]
            root = int(roots[0])
            # image of sum c_i x^i is sum c_i root^i
            powers = [int(T.pow_v(root, i)) for i in range(s)]
            img = np.zeros(F.order, dtype=np.int64)
            codes = np.arange(F.order, dtype=np.int64)
            for i in range(s):
                d = (codes // F._pw[i]) % self.p
                img = T.add_v(img, T.mul_v(powers[i], d))
        self._embed_top[s] = img
        inv = np.full(T.order, -1, dtype=np.int64)
        inv[img] = np.arange(F.order, dtype=np.int64)
        self._top_to_sub[s] = inv
        return img

    def embed_v(self, xs, a: int, b: int) -> np.ndarray:
        """Embed encodings of F_{p^a} into F_{p^b} (a | b)."""
        if b % a:
            raise FieldError(f"F_{self.p}^{a} is not a subfield of F_{self.p}^{b}")
        up = self._embedding_into_top(a)[np.asarray(xs, dtype=np.int64)]
        self._embedding_into_top(b)
        down = self._top_to_sub[b][up]
        assert (down >= 0).all()
        return down

    def embed(self, x: FqElem, target: FiniteField) -> FqElem:
        a, b = x.field.degree, target.degree
        if x.field is not self.field(a) or target is not self.field(b):
            raise FieldError("fields are not registered in this tower")
        return FqElem(target, int(self.embed_v(x.value, a, b)))

    def restrict_v(self, xs, b: int, a: int) -> np.ndarray:
        """Inverse of embed_v: encodings in F_{p^b} of elements lying in F_{p^a}."""
        if b % a:
            raise FieldError(f"F_{self.p}^{a} is not a subfield of F_{self.p}^{b}")
        up = self._embedding_into_top(b)[np.asarray(xs, dtype=np.int64)]
        self._embedding_into_top(a)
        down = self._top_to_sub[a][up]
        if (down < 0).any():
            raise FieldError(f"element does not lie in F_{self.p}^{a}")
        return down

    def restrict(self, x: FqElem, target: FiniteField) -> FqElem:
        return FqElem(target, int(self.restrict_v(x.value, x.field.degree, target.degree)))

    def trace(self, x: FqElem, target: FiniteField) -> FqElem:
        """Tr_{F(x)/target}(x) as an element of target."""
        s, t = x.field.degree, target.degree
        if s % t:
            raise FieldError(f"{target!r} is not a subfield of {x.field!r}")
        tr = x.field.trace_v(x.value, t)
        return FqElem(target, int(self.restrict_v(tr, s, t)))

    def trace_v(self, xs, s: int, t: int) -> np.ndarray:
        """Bulk relative trace F_{p^s} -> F_{p^t}, returned as F_{p^t} encodings."""
        return self.restrict_v(self.field(s).trace_v(xs, t), s, t)

    def to_json(self) -> str:
        ds = self.degrees()
        return json.dumps({"p": self.p, "degrees": ds,
                           "polynomials": {str(d): list(self.field(d).modulus) for d in ds}},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Tower":
        d = json.loads(text)
        return cls(d["p"], d["degrees"], {int(k): v for k, v in d["polynomials"].items()})


def init_tower(params: ParamSet, degrees: Sequence[int], polynomials: dict | None = None) -> Tower:
    """Tower over F_p containing F_{p^s} for every s in `degrees` (and their divisors)."""
    return Tower(params.p, degrees, polynomials)


def trace_map(x: FqElem, target: FiniteField) -> FqElem:
    if x.field.tower is None:
        raise FieldError("trace_map needs fields registered in a tower")
    return x.field.tower.trace(x, target)


def solve_artin_schreier(t: FqElem, m: int) -> list[FqElem]:
    """All z in t's field with z^{p^m} - z = t, in increasing encoding order.

    There are p^m of them when Tr_{F/F_{p^m}}(t) = 0 and none otherwise.
    """
    F = t.field
    if F.degree % m:
        raise FieldError(f"{F!r} does not contain F_{F.p}^{m}")
    z = F.elements()
    lhs = F.sub_v(F.frob_v(z, m), z)
    return [FqElem(F, int(v)) for v in z[lhs == t.value]]


def enumerate_field(F: FiniteField) -> Iterator[FqElem]:
    return F.enumerate()
