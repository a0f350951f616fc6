import random

import pytest
from hypothesis import given, strategies as st

from lubintate import golden, llc
from lubintate import nonarch as na
from lubintate.ffield import ParamError, ParamSet

SMALL = [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3), (5, 1, 1, 1), (2, 2, 2, 1)]


def test_char_value_group_law():
    a = llc.CharValue(6, 1, (("c", 1),))
    b = llc.CharValue(6, 5, (("c", -1),))
    assert (a * b).is_one
    assert (a ** 6) == llc.CharValue(6, 0, (("c", 6),))
    assert -llc.CharValue.one(6) == llc.CharValue(6, 3)
    assert str(llc.CharValue(6, 2)) == "e(2pi i*1/3)"


@pytest.mark.parametrize("params", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3)])
@pytest.mark.parametrize("twisted", [False, True])
def test_multiplicativity(params, twisted):
    ps = ParamSet(*params)
    omega = llc.Omega(1, "w") if twisted else llc.Omega()
    for z in range(min(ps.q - 1, 3)):
        sp = llc.SSCParams(ps, zeta_log=z, chi_index=1, omega=omega)
        rep = llc.multiplicativity_report(sp, pairs=100, seed=0)
        assert rep["lambda_failures"] == 0 and rep["theta_failures"] == 0, rep["examples"]
        assert rep["lambda_phi_ok"] and rep["theta_phi_ok"]


@pytest.mark.parametrize("params", SMALL)
def test_values_on_phi(params):
    ps = ParamSet(*params)
    fields = llc.LocalFields(ps)
    sp = llc.SSCParams(ps)
    lam = llc.lambda_eval(sp, llc.LPoint(1, 0, llc.MatUnit.identity(fields)))
    th = llc.theta_eval(sp, llc.DPoint(1, 0, llc.DUnit.one(fields, 2 * ps.n)))
    assert lam == ((-sp.c) if (ps.n - 1) % 2 else sp.c)
    assert th == sp.c


def test_lambda_on_elementary_units():
    # tr(phi^{-1} E_{1,2}) = 1, so Lambda(1 + E_{1,2}) = psi_K(1/n')
    sp = llc.SSCParams(ParamSet(2, 1, 1, 1))
    fields = llc.LocalFields(sp.params)
    assert llc.lambda_eval(sp, llc.MatUnit.elementary(fields, 1, 2, 1)) == llc.CharValue(2, 1)
    sp4 = llc.SSCParams(ParamSet(2, 2, 1, 1))
    f4 = llc.LocalFields(sp4.params)
    assert llc.lambda_eval(sp4, llc.MatUnit.elementary(f4, 1, 2, 1)).is_one


def test_psi_k_rejects_non_integral_arguments():
    sp = llc.SSCParams(ParamSet(2, 1, 1, 1))
    with pytest.raises(llc.ValuationError):
        llc.psi_K(sp, {-1: 1})
    assert llc.psi_K(sp, {0: 1, 3: 1}) == llc.CharValue(2, 1)


def test_mat_unit_validation():
    fields = llc.LocalFields(ParamSet(3, 1, 1, 1))
    with pytest.raises(ValueError):
        llc.MatUnit.elementary(fields, 2, 1, 1)            # unit below the diagonal
    with pytest.raises(ValueError):
        llc.MatUnit.elementary(fields, 1, 2, 1, w_power=-1)
    llc.MatUnit.elementary(fields, 2, 1, 1, w_power=1)


@given(st.integers(0, 2 ** 32))
def test_phi_conjugation_is_an_automorphism(seed):
    ps = ParamSet(3, 1, 1, 1)
    fields = llc.LocalFields(ps)
    rng = random.Random(seed)
    x, y = llc.random_mat_unit(fields, rng, 2), llc.random_mat_unit(fields, rng, 2)
    zeta = fields.k_of_log(1)
    for k in (1, 2):
        assert (x * y).conj_phi(zeta, k) == x.conj_phi(zeta, k) * y.conj_phi(zeta, k)
    assert x.conj_phi(zeta, 1).conj_phi(zeta, -1) == x


@given(st.integers(0, 2 ** 32))
def test_division_algebra_units_associate(seed):
    fields = llc.LocalFields(ParamSet(2, 1, 1, 3))
    rng = random.Random(seed)
    a, b, c = (llc.random_d_unit(fields, rng, 9) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("params", SMALL + [(3, 1, 1, 2)])
def test_hom_count_direct_equals_closed_form(params):
    rep = llc.hom_count_sweep(ParamSet(*params))
    assert rep["ok"], rep["mismatches"][:3]
    assert rep["nonzero"] > 0


def test_hom_count_checks_s():
    sp = llc.SSCParams(ParamSet(2, 2, 1, 1))
    with pytest.raises(ParamError):
        llc.hom_count(sp, 1, s_log=2)
    assert llc.hom_count(sp, 0) in (0, sp.params.pe * sp.params.n1)


def test_dim_identity_examples_and_sweep():
    d = llc.dim_identity(ParamSet(2, 1, 1, 1))
    assert (d["lhs"], d["index"], d["pe_n1"]) == (6, 3, 2)
    d = llc.dim_identity(ParamSet(3, 1, 1, 2))
    assert (d["lhs"], d["index"], d["pe_n1"]) == (2184, 364, 6)
    sweep = llc.dim_identity_sweep(10 ** 9)
    assert sweep["ok"] and sweep["count"] == 59
    assert all(ps.q ** ps.n <= 10 ** 9 for ps in llc.param_sets_up_to(10 ** 9))


def test_param_normalize_rejects_non_roots_of_unity():
    sp = llc.SSCParams(ParamSet(2, 2, 1, 1), chi_index=1)
    assert llc.param_normalize(0, sp) == sp
    with pytest.raises(ParamError):
        llc.param_normalize(1, sp)     # F_4^x is not mu_{2^1 - 1}


@pytest.mark.parametrize("params", [(2, 2, 2, 1), (3, 2, 2, 1), (5, 1, 1, 1)])
def test_param_normalize_composes(params):
    ps = ParamSet(*params)
    step = (ps.q - 1) // (ps.p ** ps.m - 1)
    sp = llc.SSCParams(ps, zeta_log=1, chi_index=1)
    for a in range(ps.p ** ps.m - 1):
        for b in range(ps.p ** ps.m - 1):
            two = llc.param_normalize(b * step, llc.param_normalize(a * step, sp))
            assert two == llc.param_normalize((a + b) * step, sp)
    moved = llc.param_normalize(step, sp)
    assert moved.zeta_log == (sp.zeta_log + ps.n * step) % (ps.q - 1)


@pytest.mark.parametrize("params", golden.GOLDEN_PARAMS)
def test_frozen_character_values(params):
    ps = ParamSet(*params)
    assert golden._llc_values(ps) == golden.entry(ps)["llc"]


@pytest.mark.parametrize("params", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3),
                                    (3, 1, 1, 2)])
def test_h_r_matches_reduction_shift(params):
    """Moving the base point by 1 + c E_{i,i+1} or 1 + c w E_{n,1} shifts the
    reduced z by h_1(g, 1)."""
    ps = ParamSet(*params)
    D, fields = na.LocalData(ps), llc.LocalFields(ps)
    z0 = na.reduction_residual(na.base_point(D))["reduced"]["z"]
    fq = [int(v) for v in D.tower.embed_v(list(range(1, ps.q)), D.f, D.s)]
    one = llc.DUnit.one(fields, 2)
    for i in list(range(1, ps.n)) + ["corner"]:
        for c in range(1, ps.q):
            if i == "corner":
                P = na.act_corner(na.base_point(D), fq[c - 1])
                g = llc.MatUnit.elementary(fields, ps.n, 1, c, 1)
            else:
                P = na.act_unipotent(na.base_point(D), i, fq[c - 1])
                g = llc.MatUnit.elementary(fields, i, i + 1, c)
            zb = na.reduction_residual(P)["reduced"]["z"]
            h = llc.h_r(ps, 0, g, one)
            assert D.C.sub(zb, z0) == int(D.tower.embed_v(h.value, ps.m, D.s))
