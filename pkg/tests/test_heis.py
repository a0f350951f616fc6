import random

import pytest

from lubintate import golden
from lubintate.asgeom import NotOnVariety, VarietySpec
from lubintate.ffield import ParamSet
from lubintate.heis import (QElt, QGroup, QMembershipError, QZElt, action_law, action_preservation,
                            det_mod_p, equivariant_lefschetz, fixed_points_bruteforce,
                            frob_linear_matrix, group_axioms, group_for, q_act)

GROUPS = [((2, 1, 1), 24), ((3, 1, 1), 108), ((2, 2, 1), 160), ((2, 2, 2), 320)]


@pytest.mark.parametrize("pem,order", GROUPS)
def test_group_order_and_axioms(pem, order):
    group = QGroup(*pem)
    assert group.expected_order == order
    rep = group_axioms(group)
    assert rep["order"] == order
    assert rep["ok"], rep


def test_membership_is_enforced():
    group = QGroup(2, 1, 1)
    g = group.elements()[5]
    assert group.validate(*g.coords()) == g
    with pytest.raises(QMembershipError):
        group.validate(0, 0, 0)
    bad_c = next(c for c in range(group.field.order) if group.violations(1, 0, c))
    with pytest.raises(QMembershipError):
        group.validate(1, 0, bad_c)


def test_twist_is_an_automorphism():
    group = QGroup(3, 1, 1)
    els = group.elements()
    rng = random.Random(1)
    for _ in range(200):
        x, y = rng.choice(els), rng.choice(els)
        for l in (-1, 1, 2):
            assert group.twist(group.mul(x, y), l) == group.mul(group.twist(x, l), group.twist(y, l))


def test_semidirect_product_inverse():
    group = QGroup(2, 1, 1)
    for g in group.elements():
        x = QZElt(g, 3)
        assert group.qz_mul(x, group.qz_inv(x)) == QZElt(group.identity, 0)


def test_center_is_the_c_line():
    group = QGroup(2, 1, 1)
    els = group.elements()
    central = [g for g in els if all(group.mul(g, h) == group.mul(h, g) for h in els)]
    assert sorted(central, key=QElt.coords) == sorted((g for g in els if group.is_central(g)),
                                                     key=QElt.coords)
    assert len(central) == 2


@pytest.mark.parametrize("params", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3),
                                    (2, 2, 2, 1)])
def test_action_preserves_variety(params):
    rep = action_preservation(VarietySpec(ParamSet(*params)))
    assert rep["checks"] > 0
    assert rep["ok"], rep["failures"][:3]


@pytest.mark.parametrize("params", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 1, 1, 3)])
def test_right_action_law(params):
    assert action_law(VarietySpec(ParamSet(*params)), pairs=60)["ok"]


def test_q_act_rejects_points_off_the_variety():
    spec = VarietySpec(ParamSet(2, 1, 1, 1))
    group = group_for(spec)
    F = group.field
    with pytest.raises(NotOnVariety):
        q_act(group, QZElt(group.identity), [F(0), F(1)], spec)


@pytest.mark.parametrize("params", [(2, 1, 1, 1), (2, 1, 1, 3)])
def test_equivariant_lefschetz_central_elements(params):
    spec = VarietySpec(ParamSet(*params))
    group = group_for(spec)
    for g in (g for g in group.elements() if group.is_central(g)):
        for k in (1, 2):
            rep = equivariant_lefschetz(spec, g, k)
            assert rep.count == rep.predicted
            assert rep.count == fixed_points_bruteforce(spec, g, k)


def test_lefschetz_counter_matches_bruteforce_off_center():
    spec = VarietySpec(ParamSet(2, 1, 1, 1))
    group = group_for(spec)
    for g in [g for g in group.elements() if not group.is_central(g)]:
        assert equivariant_lefschetz(spec, g, 1).count == fixed_points_bruteforce(spec, g, 1)


@pytest.mark.parametrize("params", golden.GOLDEN_PARAMS[:4])
def test_fixed_points_match_frozen_values(params):
    entry = golden.entry(ParamSet(*params))
    spec = VarietySpec(ParamSet(*params))
    for fp in entry["fixed_points"]:
        g = QElt(fp["a"], fp["b"], fp["c"])
        assert equivariant_lefschetz(spec, g, fp["k"]).count == fp["count"]


@pytest.mark.parametrize("params", [(3, 1, 1, 1), (2, 1, 1, 3), (3, 1, 1, 2)])
def test_frobenius_automorphism_determinant(params):
    ps = ParamSet(*params)
    assert det_mod_p(frob_linear_matrix(VarietySpec(ps)), ps.p) == (-1) ** (ps.n + 1) % ps.p
