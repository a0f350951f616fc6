import cmath

import pytest
from hypothesis import given, strategies as st

from lubintate.cyclo import AdditiveCharacter, CycSum, abs_square, all_characters
from lubintate.ffield import Tower

PRIMES = [2, 3, 5, 7]


@st.composite
def cyc_elements(draw, count=3):
    p = draw(st.sampled_from(PRIMES))
    coeff = st.integers(-20, 20)
    return p, [CycSum(p, tuple(draw(coeff) for _ in range(max(p - 1, 1)))) for _ in range(count)]


def close(a: complex, b: complex) -> bool:
    return abs(a - b) <= 1e-9 * max(1.0, abs(b))


@given(cyc_elements())
def test_embedding_is_a_ring_homomorphism(pe):
    p, (a, b, _) = pe
    for j in range(1, p):
        assert close((a + b).embed(j), a.embed(j) + b.embed(j))
        assert close((a * b).embed(j), a.embed(j) * b.embed(j))


@given(cyc_elements())
def test_ring_laws(pe):
    p, (a, b, c) = pe
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(cyc_elements(1))
def test_conjugate_and_norm(pe):
    p, (a,) = pe
    assert close(a.conj().embed(1), a.embed(1).conjugate())
    prod = 1
    for z in a.embeddings():
        prod *= z
    assert abs(prod - a.norm()) <= 1e-6 * max(1.0, abs(prod))


@given(cyc_elements(1))
def test_inverse(pe):
    p, (a,) = pe
    if not a.is_zero():
        assert a * a.inverse() == 1


def test_zeta_relations():
    for p in PRIMES:
        z = CycSum.zeta_power(p, 1)
        assert z ** p == 1
        total = sum((CycSum.zeta_power(p, t) for t in range(p)), CycSum.from_int(p, 0))
        assert total.is_zero()
        assert close(z.embed(1), cmath.exp(2j * cmath.pi / p))


def test_galois_action_permutes_embeddings():
    a = CycSum(5, (1, 2, 0, -3))
    assert close(a.galois(2).embed(1), a.embed(2))
    with pytest.raises(ValueError):
        a.galois(5)


def test_quadratic_gauss_sum():
    # sum_x zeta^{x^2} over F_p has absolute square p
    for p in (3, 5, 7):
        counts = [0] * p
        for x in range(p):
            counts[x * x % p] += 1
        g = CycSum.from_exponent_counts(p, counts)
        assert abs_square(g)["exact"] == p


def test_character_orthogonality():
    for p, s in [(2, 3), (3, 2), (5, 1)]:
        F = Tower(p, [s]).field(s)
        chars = all_characters(F)
        assert chars[0].trivial and len(chars) == F.order
        for psi in chars[1:]:
            total = sum((psi(x) for x in F.enumerate()), CycSum.from_int(p, 0))
            assert total.is_zero()


def test_character_is_additive():
    F = Tower(3, [2]).field(2)
    psi = AdditiveCharacter(F, 5)
    for x in F.enumerate():
        for y in F.enumerate():
            assert psi(x + y) == psi(x) * psi(y)


def test_character_on_prime_field():
    F = Tower(5, [1]).field(1)
    psi = AdditiveCharacter(F, 1)
    assert [psi.exponent(F(x)) for x in range(5)] == [0, 1, 2, 3, 4]
