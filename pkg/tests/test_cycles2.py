import pytest

from lubintate.asgeom import VarietySpec, count_points
from lubintate.cycles2 import (Char2Config, affine_bundle_check, divisor_identity_check,
                               fiber_split, g_component_map, one_dimensionality,
                               quotient_consistency, run_suite, two_adic, u_to_y, y_to_u)
from lubintate.ffield import ParamError, Tower

CONFIGS = [(m, n) for m in (1, 2) for n in (4, 6)]


def test_two_adic():
    assert [two_adic(n) for n in (4, 6, 8, 12)] == [2, 1, 3, 2]


def test_config_validation():
    with pytest.raises(ParamError):
        Char2Config(1, 5)
    with pytest.raises(ParamError):
        Char2Config(1, 4, zeta=2)
    cfg = Char2Config(2, 6, zeta=3)
    assert (cfg.n0, cfg.N0, cfg.e, cfg.eps1) == (2, 3, 1, 1)


def test_u_coordinates_roundtrip():
    F = Tower(2, [2]).field(2)
    ys = [F.elements()[[1, 2, 3, 0]], F.elements()[[3, 3, 1, 2]], F.elements()[[0, 1, 2, 3]]]
    back = u_to_y(F, y_to_u(F, ys))
    assert all((a == b).all() for a, b in zip(back, ys))


@pytest.mark.parametrize("m,n", CONFIGS)
def test_fiber_splits_into_two_components(m, n):
    for zeta in range(1, 2 ** m):
        rep = fiber_split(Char2Config(m, n, zeta))
        assert rep["Zplus_points"] == rep["Zminus_points"] == rep["expected_component_points"]
        assert rep["ok"], rep


@pytest.mark.parametrize("m,n", CONFIGS)
def test_affine_bundle_fibers(m, n):
    assert affine_bundle_check(Char2Config(m, n))["ok"]


@pytest.mark.parametrize("m,n", CONFIGS)
def test_divisor_identity_every_j(m, n):
    for zeta in range(1, 2 ** m):
        cfg = Char2Config(m, n, zeta)
        for j in range(1, cfg.n0 + 1):
            rep = divisor_identity_check(cfg, j)
            assert rep["points"] > 0 and rep["ok"], rep


@pytest.mark.parametrize("m,n", CONFIGS)
def test_g_shifts_w_and_implies_scalar_minus_one(m, n):
    for zeta in range(1, 2 ** m):
        rep = g_component_map(Char2Config(m, n, zeta))
        if not rep["applicable"]:
            # g needs m | e; n = 6 forces e = 1
            assert (m, n) == (2, 6)
            continue
        assert rep["maps_Y_to_Y"] and rep["w_shift_ok"]
        assert rep["preimage_of_Zprime_plus"] == rep["expected_preimage"]
        assert rep["implied_scalar"] == -1


@pytest.mark.parametrize("m,n", CONFIGS)
def test_one_dimensionality(m, n):
    for zeta in range(1, 2 ** m):
        for k in (1, 2, 3):
            rep = one_dimensionality(Char2Config(m, n, zeta), k)
            assert rep["abs_square"] == 2 ** (m * k * (n - 2))
            assert rep["quotient_relation_ok"] is not False


def test_quotients_account_for_all_points():
    for k in (1, 2):
        assert quotient_consistency(1, 6, k)["ok"]


@pytest.mark.parametrize("n,frozen", [(4, [2, 20, 56]), (6, [12, 272, 4032])])
def test_y_counts_frozen(n, frozen):
    # #Y(F_{2^k}) from a scan of every candidate point
    spec = VarietySpec(Char2Config(1, n).spec().params, "Y")
    assert [count_points(spec, k) for k in (1, 2, 3)] == frozen


def test_run_suite_passes():
    assert run_suite(1, 4, k_max=2)["ok"]
