import numpy as np
import pytest
from hypothesis import given, strategies as st

from lubintate.ffield import (FieldError, FiniteField, ParamError, ParamSet, Tower,
                              divisors, is_irreducible, is_prime, least_irreducible,
                              prime_factors, solve_artin_schreier, trace_map)

FIELDS = [(2, 1), (2, 3), (2, 4), (3, 2), (5, 1), (7, 2)]


def _field(spec):
    return Tower(spec[0], [spec[1]]).field(spec[1])


@st.composite
def field_and_elements(draw, count=3):
    F = _field(draw(st.sampled_from(FIELDS)))
    return F, [F(draw(st.integers(0, F.order - 1))) for _ in range(count)]


def test_integer_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_factors(360) == [2, 3, 5]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_paramset_derived_values():
    ps = ParamSet(3, 1, 1, 2)
    assert (ps.q, ps.n, ps.m, ps.n1, ps.pe) == (3, 6, 1, 2, 3)
    assert ParamSet(2, 1, 1, 1).eps0 == 1 and ParamSet(2, 1, 1, 1).eps1 == 1
    assert ParamSet(2, 2, 2, 1).eps1 == 0


@pytest.mark.parametrize("bad", [(4, 1, 1, 1), (2, 0, 1, 1), (2, 1, 1, 2), (3, 1, 1, 3), (2, 1, 0, 1)])
def test_paramset_rejects_invalid(bad):
    with pytest.raises(ParamError):
        ParamSet(*bad)


def test_least_irreducible_small_cases():
    assert least_irreducible(2, 2) == (1, 1, 1)
    assert least_irreducible(2, 3) == (1, 1, 0, 1)
    for p, s in [(2, 5), (3, 3), (5, 2)]:
        assert is_irreducible(least_irreducible(p, s), p)
    assert not is_irreducible((1, 0, 1), 2)  # x^2 + 1 = (x + 1)^2


def test_reducible_modulus_rejected():
    with pytest.raises(FieldError):
        FiniteField(2, 2, (1, 0, 1))


@given(field_and_elements())
def test_field_axioms(fe):
    F, (a, b, c) = fe
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == F.zero and a + F.zero == a and a * F.one == a
    if a:
        assert a * a.inverse() == F.one


@given(field_and_elements(2))
def test_frobenius_is_additive_and_multiplicative(fe):
    F, (a, b) = fe
    assert (a + b).frob() == a.frob() + b.frob()
    assert (a * b).frob() == a.frob() * b.frob()
    assert a.frob(F.degree) == a
    assert a.frob(-1).frob() == a


def test_multiplicative_group_is_cyclic_of_full_order():
    for spec in FIELDS:
        F = _field(spec)
        g = FiniteField(F.p, F.degree).primitive
        powers = {int(F.pow_v(g, k)) for k in range(F.order - 1)}
        assert len(powers) == F.order - 1


def test_tower_embeddings_are_compatible():
    T = Tower(2, [6])
    x = T.field(1).elements()
    for a, b, c in [(1, 2, 6), (1, 3, 6), (2, 6, 6)]:
        direct = T.embed_v(T.field(a).elements(), a, c)
        chained = T.embed_v(T.embed_v(T.field(a).elements(), a, b), b, c)
        assert (direct == chained).all()
    assert (T.embed_v(x, 1, 6) == x).all()


def test_embedding_is_a_ring_homomorphism():
    T = Tower(3, [4])
    S, B = T.field(2), T.field(4)
    a, b = np.meshgrid(S.elements(), S.elements())
    a, b = a.ravel(), b.ravel()
    up = lambda v: T.embed_v(v, 2, 4)  # noqa: E731
    assert (up(S.mul_v(a, b)) == B.mul_v(up(a), up(b))).all()
    assert (up(S.add_v(a, b)) == B.add_v(up(a), up(b))).all()


def test_image_of_subfield_is_fixed_by_frobenius():
    T = Tower(2, [4])
    img = T.embed_v(T.field(2).elements(), 2, 4)
    mask = T.field(4).subfield_mask(2)
    assert sorted(img.tolist()) == np.flatnonzero(mask).tolist()


def test_restrict_inverts_embed_and_rejects_outsiders():
    T = Tower(2, [4])
    F2, F4 = T.field(2), T.field(4)
    for x in F2.enumerate():
        assert T.restrict(T.embed(x, F4), F2) == x
    outsider = next(x for x in F4.enumerate() if not F4.subfield_mask(2)[x.value])
    with pytest.raises(FieldError):
        T.restrict(outsider, F2)


def test_trace_is_linear_and_surjective():
    T = Tower(3, [2])
    F, P = T.field(2), T.field(1)
    values = [trace_map(x, P).value for x in F.enumerate()]
    # each element of F_3 is the trace of exactly 3 elements of F_9
    assert sorted(values) == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    a, b = F(4), F(7)
    assert trace_map(a + b, P) == trace_map(a, P) + trace_map(b, P)


def test_tower_json_roundtrip():
    T = Tower(2, [6])
    U = Tower.from_json(T.to_json())
    assert U.to_json() == T.to_json()
    assert (U.embed_v(U.field(3).elements(), 3, 6) == T.embed_v(T.field(3).elements(), 3, 6)).all()


@pytest.mark.parametrize("p,s,m", [(2, 2, 1), (2, 4, 2), (3, 2, 1)])
def test_artin_schreier_solutions(p, s, m):
    F = Tower(p, [s]).field(s)
    P = F.tower.field(m)
    for t in F.enumerate():
        sols = solve_artin_schreier(t, m)
        if F.tower.trace(t, P).value == 0:
            assert len(sols) == p ** m
            assert all(z.frob(m) - z == t for z in sols)
        else:
            assert sols == []


def test_cross_field_arithmetic_is_an_error():
    a, b = Tower(2, [2]).field(2)(1), Tower(2, [4]).field(4)(1)
    with pytest.raises(FieldError):
        a + b
