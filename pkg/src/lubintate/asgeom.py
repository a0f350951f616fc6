"""Artin-Schreier hypersurfaces, point counts and exponential sums.

X : z^{p^m} - z = y^{p^e+1} - (1/n') sum_{1<=i<=j<=n-2} y_i y_j   (n coordinates)
Y : z^{2^m} - z = sum_{1<=i<=j<=n-2} y_i y_j                       (p = 2, n even >= 4)

Both have the shape z^{p^m} - z = Phi(y), and a point count over F_{p^{mk}} is
p^m times the number of y with Tr_{F_{p^{mk}}/F_{p^m}} Phi(y) = 0.  Everything
here is driven by the trace histogram

    H_k[tau] = #{ y in F_{p^{mk}}^{n-1} : Tr Phi(y) = tau },   tau in F_{p^m},

computed as a fold over the coordinates.  The quadratic block is folded one
variable at a time with state (partial sum s, trace of the partial form), using
Q(y_1..y_j) = Q(y_1..y_{j-1}) + y_j (y_1 + ... + y_{j-1}) + y_j^2.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .cyclo import AdditiveCharacter, CycSum, all_characters
from .ffield import FieldError, FiniteField, FqElem, ParamError, ParamSet, Tower

DEFAULT_BUDGET = 1 << 26


class BudgetExceeded(RuntimeError):
    """Raised when a fold would exceed its work budget."""


class NotOnVariety(ValueError):
    pass


@lru_cache(maxsize=None)
def level_tower(p: int, degree: int) -> Tower:
    return Tower(p, [degree])


@dataclass(frozen=True)
class VarietySpec:
    params: ParamSet
    kind: str = "X"

    def __post_init__(self):
        if self.kind not in ("X", "Y"):
            raise ParamError(f"variety kind must be X or Y (got {self.kind!r})")
        if self.kind == "Y":
            n = self.params.n
            if self.params.p != 2 or n % 2 or n < 4:
                raise ParamError("Y needs p = 2 and n even with n >= 4")

    @property
    def p(self):
        return self.params.p

    @property
    def m(self):
        return self.params.m

    @property
    def n_quad(self) -> int:
        """Number of variables in the quadratic block."""
        return self.params.n - 2

    @property
    def n_coords(self) -> int:
        return self.params.n if self.kind == "X" else self.params.n - 1

    @property
    def kappa(self) -> int:
        """Prime-field coefficient of the quadratic block."""
        if self.kind == "Y":
            return 1
        return (-pow(self.params.nprime, -1, self.p)) % self.p

    @property
    def has_y(self) -> bool:
        return self.kind == "X"

    def field(self, k: int = 1) -> FiniteField:
        """F_{p^{mk}}, the field of level k."""
        return level_tower(self.p, self.m * k).field(self.m * k)

    def base_field(self) -> FiniteField:
        """F_{p^m}, where the trace histogram and the characters live."""
        return level_tower(self.p, self.m).field(self.m)


# ---------------------------------------------------------------------------
# pointwise evaluation

def phi_v(spec: VarietySpec, F: FiniteField, y, ys: Sequence) -> np.ndarray:
    """Phi on arrays: y is ignored for kind Y (pass None)."""
    acc = None
    s = None
    for yi in ys:
        yi = np.asarray(yi, dtype=np.int64)
        term = F.mul_v(yi, yi if s is None else F.add_v(s, yi))
        acc = term if acc is None else F.add_v(acc, term)
        s = yi if s is None else F.add_v(s, yi)
    out = None
    if acc is not None:
        out = F.smul_v(acc, spec.kappa)
    if spec.has_y:
        yp = F.pow_v(np.asarray(y, dtype=np.int64), spec.params.pe + 1)
        out = yp if out is None else F.add_v(yp, out)
    if out is None:
        out = np.zeros(1, dtype=np.int64)
    return out


def phi_eval(spec: VarietySpec, y_coords: Sequence[FqElem]) -> FqElem:
    """Phi(y, y_1, ..., y_{n-2}) (kind X) or Phi(y_1, ..., y_{n-2}) (kind Y)."""
    expected = spec.n_coords - 1
    if len(y_coords) != expected:
        raise ValueError(f"expected {expected} coordinates, got {len(y_coords)}")
    F = y_coords[0].field if y_coords else spec.base_field()
    if any(c.field is not F for c in y_coords):
        raise FieldError("coordinates must share one field")
    if F.degree % spec.m:
        raise FieldError(f"{F!r} does not contain F_{spec.p}^{spec.m}")
    vals = [c.value for c in y_coords]
    if spec.has_y:
        out = phi_v(spec, F, vals[0], vals[1:])
    else:
        out = phi_v(spec, F, None, vals)
    return FqElem(F, int(np.asarray(out).reshape(-1)[0]))


def on_variety_v(spec: VarietySpec, F: FiniteField, z, y, ys) -> np.ndarray:
    lhs = F.sub_v(F.frob_v(z, spec.m), z)
    return lhs == phi_v(spec, F, y, ys)


def on_variety(spec: VarietySpec, point: Sequence[FqElem]) -> bool:
    F = point[0].field
    if any(c.field is not F for c in point):
        raise FieldError("coordinates must share one field")
    if len(point) != spec.n_coords:
        raise ValueError(f"expected {spec.n_coords} coordinates")
    z = point[0].value
    rest = [c.value for c in point[1:]]
    y, ys = (rest[0], rest[1:]) if spec.has_y else (None, rest)
    return bool(np.asarray(on_variety_v(spec, F, z, y, ys)).reshape(-1)[0])


# ---------------------------------------------------------------------------
# the fold

def fold_cost(spec: VarietySpec, k: int) -> int:
    """Work units of the trace-histogram fold at level k.

    One unit per y value, per seeded quadratic variable, and per (s, y) pair of
    each later quadratic variable.
    """
    N = spec.p ** (spec.m * k)
    r = spec.n_quad
    cost = N if spec.has_y else 0
    if r >= 1:
        cost += N + (r - 1) * N * N
    return max(cost, 1)


def _base_add_table(P: FiniteField) -> np.ndarray:
    a = P.elements()
    return P.add_v(a[:, None], a[None, :])


def _quad_hist(spec: VarietySpec, k: int, first_values: np.ndarray) -> np.ndarray:
    """Histogram over F_{p^m} of Tr(kappa Q(y_1..y_r)) with y_1 restricted to first_values."""
    F = spec.field(k)
    P = spec.base_field()
    tw = level_tower(spec.p, spec.m * k)
    r = spec.n_quad
    N, Pn = F.order, P.order
    addP = _base_add_table(P)
    big = spec.p ** (spec.m * k * max(r, 1)) >= (1 << 62)
    dtype = object if big else np.int64

    def tr(vals):
        return tw.trace_v(vals, spec.m * k, spec.m)

    if r == 0:
        h = np.zeros(Pn, dtype=dtype)
        h[0] = len(first_values)
        return h
    # state D[s, tau]
    D = np.zeros((N, Pn), dtype=dtype)
    y1 = np.asarray(first_values, dtype=np.int64)
    t1 = tr(F.smul_v(F.mul_v(y1, y1), spec.kappa))
    np.add.at(D, (y1, t1), 1)
    taus = np.arange(Pn)
    for _ in range(r - 1):
        new = np.zeros_like(D)
        live = np.nonzero(D.any(axis=1))[0]
        Dl = D[live]
        for y in range(N):
            snew = F.add_v(live, y)
            # increment kappa (y s + y^2) with s the previous partial sum
            inc = tr(F.smul_v(F.mul_v(y, F.add_v(live, y)), spec.kappa))
            cols = addP[inc[:, None], taus[None, :]]
            new[snew[:, None], cols] += Dl
        D = new
    return D.sum(axis=0)


def _y_hist(spec: VarietySpec, k: int, values: np.ndarray) -> np.ndarray:
    F = spec.field(k)
    P = spec.base_field()
    tw = level_tower(spec.p, spec.m * k)
    t = tw.trace_v(F.pow_v(values, spec.params.pe + 1), spec.m * k, spec.m)
    return np.bincount(t, minlength=P.order).astype(np.int64)


def _convolve(P: FiniteField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    addP = _base_add_table(P)
    out = np.zeros(P.order, dtype=object)
    for i in range(P.order):
        for j in range(P.order):
            if a[i] and b[j]:
                out[addP[i, j]] += int(a[i]) * int(b[j])
    return out


def trace_histogram(spec: VarietySpec, k: int, budget: int = DEFAULT_BUDGET,
                    partitions: int = 1, workers: int = 1) -> list[int]:
    """H_k as a list of Python ints indexed by F_{p^m} encodings.

    The first folded coordinate is split into `partitions` contiguous chunks;
    chunk histograms are summed in chunk order, so the result is independent of
    `partitions` and `workers`.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    cost = fold_cost(spec, k)
    if cost > budget:
        raise BudgetExceeded(f"fold at level k={k} needs {cost} work units > budget {budget}")
    F = spec.field(k)
    P = spec.base_field()
    chunks = np.array_split(F.elements(), max(1, partitions))
    if spec.n_quad >= 1:
        quad = lambda ch: _quad_hist(spec, k, ch)  # noqa: E731
        with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
            parts = list(ex.map(quad, chunks))
        qh = np.zeros(P.order, dtype=object)
        for h in parts:
            qh = qh + h.astype(object)
        yh = _y_hist(spec, k, F.elements()) if spec.has_y else _delta(P)
    else:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
            parts = list(ex.map(lambda ch: _y_hist(spec, k, ch), chunks))
        yh = np.zeros(P.order, dtype=object)
        for h in parts:
            yh = yh + h.astype(object)
        qh = _delta(P)
    return [int(v) for v in _convolve(P, yh, qh)]


def _delta(P: FiniteField) -> np.ndarray:
    d = np.zeros(P.order, dtype=object)
    d[0] = 1
    return d


def count_points(spec: VarietySpec, k: int, budget: int = DEFAULT_BUDGET,
                 partitions: int = 1, workers: int = 1) -> int:
    """#points over F_{p^{mk}}: p^m times the trace-zero part of the histogram."""
    H = trace_histogram(spec, k, budget, partitions, workers)
    return spec.p ** spec.m * H[0]


def exp_sum_from_hist(psi: AdditiveCharacter, H: Sequence[int]) -> CycSum:
    counts = [0] * psi.p
    for tau, c in enumerate(H):
        if c:
            counts[int(psi.exponents[tau])] += c
    return CycSum.from_exponent_counts(psi.p, counts)


def exp_sum(spec: VarietySpec, psi: AdditiveCharacter, k: int,
            budget: int = DEFAULT_BUDGET) -> CycSum:
    """S_k(psi) = sum over y in F_{p^{mk}}^{n-1} of psi(Tr Phi(y))."""
    _check_character(spec, psi)
    return exp_sum_from_hist(psi, trace_histogram(spec, k, budget))


def exp_sums(spec: VarietySpec, k: int, budget: int = DEFAULT_BUDGET) -> list[CycSum]:
    """S_k(psi_a) for every a in F_{p^m}, in encoding order (a = 0 is trivial)."""
    H = trace_histogram(spec, k, budget)
    return [exp_sum_from_hist(psi, H) for psi in all_characters(spec.base_field())]


def _check_character(spec: VarietySpec, psi: AdditiveCharacter):
    B = spec.base_field()
    if psi.p != spec.p or psi.source.degree != spec.m or psi.source.modulus != B.modulus:
        raise FieldError("character must be defined on F_{p^m} of this variety")


# ---------------------------------------------------------------------------
# brute-force oracles (independent of the fold)

def iter_points(spec: VarietySpec, k: int, chunk: int = 1 << 16):
    """Yield arrays (z, y-or-None, [y_i]) of all points over F_{p^{mk}} by direct search."""
    F = spec.field(k)
    N = F.order
    ncoord = spec.n_coords
    if N ** ncoord > 1 << 24:
        raise BudgetExceeded("brute-force enumeration larger than 2^24 candidates")
    total = N ** ncoord
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coords = []
        for _ in range(ncoord):
            coords.append(idx % N)
            idx = idx // N
        z, rest = coords[0], coords[1:]
        y, ys = (rest[0], rest[1:]) if spec.has_y else (None, rest)
        ok = on_variety_v(spec, F, z, y, ys)
        if ok.any():
            yield (z[ok], None if y is None else y[ok], [v[ok] for v in ys])


def count_points_bruteforce(spec: VarietySpec, k: int) -> int:
    return sum(len(z) for z, _, _ in iter_points(spec, k))


def exp_sum_bruteforce(spec: VarietySpec, psi: AdditiveCharacter, k: int) -> CycSum:
    """Direct sum of psi(Tr Phi(y)) over all y."""
    F = spec.field(k)
    tw = level_tower(spec.p, spec.m * k)
    nvar = spec.n_coords - 1
    if F.order ** nvar > 1 << 24:
        raise BudgetExceeded("brute-force sum larger than 2^24 terms")
    grids = np.meshgrid(*[F.elements()] * nvar, indexing="ij") if nvar else []
    flat = [g.reshape(-1) for g in grids]
    y, ys = (flat[0], flat[1:]) if spec.has_y else (None, flat)
    t = tw.trace_v(phi_v(spec, F, y, ys), spec.m * k, spec.m)
    counts = np.bincount(psi.exponents[t], minlength=psi.p)
    return CycSum.from_exponent_counts(psi.p, [int(c) for c in counts])


def factor_sums(spec: VarietySpec, psi: AdditiveCharacter, k: int) -> tuple[CycSum, CycSum]:
    """The y-factor and the quadratic factor of S_k(psi), each by direct summation."""
    F = spec.field(k)
    tw = level_tower(spec.p, spec.m * k)
    ys = F.elements()
    if spec.has_y:
        t = tw.trace_v(F.pow_v(ys, spec.params.pe + 1), spec.m * k, spec.m)
        yfac = CycSum.from_exponent_counts(psi.p, np.bincount(psi.exponents[t], minlength=psi.p))
    else:
        yfac = CycSum.from_int(psi.p, 1)
    r = spec.n_quad
    if r == 0:
        return yfac, CycSum.from_int(psi.p, 1)
    if F.order ** r > 1 << 24:
        raise BudgetExceeded("quadratic factor larger than 2^24 terms")
    grids = [g.reshape(-1) for g in np.meshgrid(*[ys] * r, indexing="ij")]
    acc = np.zeros_like(grids[0])
    for i in range(r):
        for j in range(i, r):
            acc = F.add_v(acc, F.mul_v(grids[i], grids[j]))
    t = tw.trace_v(F.smul_v(acc, spec.kappa), spec.m * k, spec.m)
    qfac = CycSum.from_exponent_counts(psi.p, np.bincount(psi.exponents[t], minlength=psi.p))
    return yfac, qfac


# ---------------------------------------------------------------------------
# minimal recurrence and its roots

def berlekamp_massey(seq: Sequence) -> list:
    """Connection polynomial [1, c_1, ..., c_L] of the shortest recurrence
    s_j + c_1 s_{j-1} + ... + c_L s_{j-L} = 0 over a field.

    Entries need +, -, * and .inverse(); works on CycSum (over Q(zeta_p)).
    """
    zero = seq[0] * 0
    one = zero + 1
    C, B = [one], [one]
    L, mgap, b = 0, 1, one
    for i in range(len(seq)):
        d = seq[i]
        for j in range(1, L + 1):
            d = d + C[j] * seq[i - j]
        if d.is_zero():
            mgap += 1
            continue
        coef = d * b.inverse()
        T = list(C)
        if len(C) < len(B) + mgap:
            C = C + [zero] * (len(B) + mgap - len(C))
        for j, bj in enumerate(B):
            C[j + mgap] = C[j + mgap] - coef * bj
        if 2 * L <= i:
            L, B, b, mgap = i + 1 - L, T, d, 1
        else:
            mgap += 1
    C = C[:L + 1] + [zero] * max(0, L + 1 - len(C))
    return C


@dataclass
class EigenReport:
    degree: int
    connection: list
    roots: dict            # embedding index -> list of complex roots
    magnitudes: dict
    expected_magnitude: float
    sums: list

    def magnitudes_ok(self, tol: float = 1e-6) -> bool:
        return all(abs(abs(z) - self.expected_magnitude) <= tol
                   for rs in self.roots.values() for z in rs)


def recurrence_eigendata(spec: VarietySpec, psi: AdditiveCharacter, k_max: int,
                         budget: int = DEFAULT_BUDGET) -> EigenReport:
    """Minimal recurrence of k -> S_k(psi) over Q(zeta_p) and its roots.

    Roots are the reciprocals of the roots of the connection polynomial, taken
    under every complex embedding of Q(zeta_p).
    """
    _check_character(spec, psi)
    if psi.trivial:
        raise ValueError("recurrence eigendata needs a nontrivial character")
    pe = spec.params.pe
    if k_max < 2 * pe + 2:
        raise ValueError(f"k_max must be at least 2 p^e + 2 = {2 * pe + 2}")
    sums = [exp_sum(spec, psi, k, budget) for k in range(1, k_max + 1)]
    C = berlekamp_massey(sums)
    L = len(C) - 1
    if 2 * L > k_max:
        raise ArithmeticError(f"no recurrence of degree <= {k_max // 2} found")
    roots, mags = {}, {}
    for j in range(1, spec.p):
        # characteristic polynomial x^L + c_1 x^{L-1} + ... + c_L
        coeffs = [c.embed(j) if hasattr(c, "embed") else complex(c) for c in C]
        rs = list(np.roots(coeffs)) if L else []
        rs.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        roots[j] = [complex(z) for z in rs]
        mags[j] = [abs(z) for z in rs]
    expected = spec.p ** (spec.m * (spec.n_coords - 1) / 2)
    return EigenReport(L, C, roots, mags, expected, sums)
