import pytest
from hypothesis import given, strategies as st

from lubintate.asgeom import (BudgetExceeded, VarietySpec, berlekamp_massey, count_points,
                              count_points_bruteforce, exp_sum, exp_sum_bruteforce, exp_sums,
                              factor_sums, fold_cost, iter_points, on_variety,
                              recurrence_eigendata, trace_histogram)
from lubintate.cyclo import CycSum, all_characters
from lubintate.ffield import FqElem, ParamError, ParamSet

# Brute-force point counts over F_{p^{mk}}, k = 1, 2, 3 (scan of every candidate point).
FROZEN_COUNTS = {
    (2, 1, 1, 1): [2, 8, 8],
    (3, 1, 1, 1): [15, 63, 783],
    (2, 2, 1, 1): [2, 8, 8],
    (2, 1, 1, 3): [32, 1088, 32768],
    (3, 1, 1, 2): [243, 58563],
    (2, 2, 2, 1): [64, 4864, 262144],
}


@pytest.mark.parametrize("params", sorted(FROZEN_COUNTS))
def test_fold_counts_match_frozen_bruteforce(params):
    spec = VarietySpec(ParamSet(*params))
    got = [count_points(spec, k) for k in range(1, len(FROZEN_COUNTS[params]) + 1)]
    assert got == FROZEN_COUNTS[params]


@pytest.mark.parametrize("params,k", [((2, 1, 1, 1), 3), ((3, 1, 1, 1), 2), ((2, 1, 1, 3), 1),
                                      ((2, 2, 2, 1), 1)])
def test_fold_matches_live_bruteforce(params, k):
    spec = VarietySpec(ParamSet(*params))
    assert count_points(spec, k) == count_points_bruteforce(spec, k)
    for psi in all_characters(spec.base_field()):
        assert exp_sum(spec, psi, k) == exp_sum_bruteforce(spec, psi, k)


@pytest.mark.parametrize("params", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 1, 1, 3), (2, 2, 2, 1)])
def test_points_partition_by_characters(params):
    spec = VarietySpec(ParamSet(*params))
    for k in (1, 2, 3):
        total = sum(exp_sums(spec, k), CycSum.from_int(spec.p, 0))
        assert total == count_points(spec, k)


def test_histogram_independent_of_partitioning():
    spec = VarietySpec(ParamSet(3, 1, 1, 2))
    serial = trace_histogram(spec, 2)
    for parts, workers in [(2, 1), (5, 3), (9, 4)]:
        assert trace_histogram(spec, 2, partitions=parts, workers=workers) == serial


def test_factorization_of_exponential_sums():
    spec = VarietySpec(ParamSet(2, 1, 1, 3))
    for psi in all_characters(spec.base_field()):
        yfac, qfac = factor_sums(spec, psi, 2)
        assert yfac * qfac == exp_sum(spec, psi, 2)


def test_enumerated_points_lie_on_variety():
    spec = VarietySpec(ParamSet(3, 1, 1, 1))
    F = spec.field(1)
    pts = []
    for z, y, ys in iter_points(spec, 1):
        for i in range(len(z)):
            pts.append([FqElem(F, int(z[i])), FqElem(F, int(y[i]))] + [FqElem(F, int(v[i])) for v in ys])
    assert len(pts) == 15 and all(on_variety(spec, P) for P in pts)
    assert not on_variety(spec, [F(0), F(1), F(0)])


def test_budget_is_enforced():
    spec = VarietySpec(ParamSet(3, 1, 1, 2))
    with pytest.raises(BudgetExceeded):
        count_points(spec, 3, budget=fold_cost(spec, 3) - 1)
    assert count_points(spec, 1, budget=fold_cost(spec, 1)) == 243


def test_y_variety_requires_char_two_even_n():
    with pytest.raises(ParamError):
        VarietySpec(ParamSet(3, 1, 1, 2), "Y")
    spec = VarietySpec(ParamSet(2, 1, 2, 1), "Y")
    assert spec.n_coords == 3
    assert count_points(spec, 1) == count_points_bruteforce(spec, 1)


def test_eigendata_supersingular_curve():
    # z^2 - z = y^3 over F_2: Frobenius eigenvalues +-i sqrt(2)
    spec = VarietySpec(ParamSet(2, 1, 1, 1))
    psi = all_characters(spec.base_field())[1]
    rep = recurrence_eigendata(spec, psi, 6)
    assert rep.degree == 2
    roots = sorted(rep.roots[1], key=lambda z: z.imag)
    assert abs(roots[0] - (-1j * 2 ** 0.5)) < 1e-9
    assert abs(roots[1] - (1j * 2 ** 0.5)) < 1e-9


@pytest.mark.parametrize("params", [(3, 1, 1, 1), (2, 1, 1, 3), (2, 2, 1, 1)])
def test_eigendata_degree_and_weight(params):
    ps = ParamSet(*params)
    spec = VarietySpec(ps)
    for psi in all_characters(spec.base_field())[1:]:
        rep = recurrence_eigendata(spec, psi, 2 * ps.pe + 2)
        assert rep.degree == ps.pe
        assert rep.magnitudes_ok(1e-6)


def test_eigendata_rejects_trivial_character():
    spec = VarietySpec(ParamSet(2, 1, 1, 1))
    with pytest.raises(ValueError):
        recurrence_eigendata(spec, all_characters(spec.base_field())[0], 6)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_berlekamp_massey_recovers_a_recurrence(coeffs, start):
    # s_j = sum c_i s_{j-i}; the found recurrence must regenerate the sequence
    L = len(coeffs)
    seq = list(start[:L])
    while len(seq) < 2 * L + 4:
        seq.append(sum(c * seq[-1 - i] for i, c in enumerate(coeffs)))
    vals = [CycSum.from_int(3, v) for v in seq]
    C = berlekamp_massey(vals)
    assert len(C) - 1 <= L
    for j in range(len(C) - 1, len(vals)):
        acc = vals[j]
        for i in range(1, len(C)):
            acc = acc + C[i] * vals[j - i]
        assert acc.is_zero()
