# %% [markdown]
# # The Heisenberg-type group Q acting on X
#
# Q consists of triples g(a, b, c) with a^{p^e+1} = 1, b^{p^{2e}} + b = 0 and
# c^{p^m} - c + b^{p^e+1} = 0.  It acts on X, and twisting by Frobenius
# gives an action of Q x| Z.  The fixed points of g composed with Frob^k can
# be counted directly and compared with sum_psi psi(c) S_k(psi).

# %%
from lubintate.asgeom import VarietySpec
from lubintate.ffield import ParamSet
from lubintate.heis import (QGroup, action_law, action_preservation, equivariant_lefschetz,
                            group_axioms, group_for)

for pem in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 2, 2)]:
    rep = group_axioms(QGroup(*pem))
    print(f"(p,e,m)={pem}: |Q| = {rep['order']} (expected {rep['expected_order']}), "
          f"associativity {rep['associativity']}, ok={rep['ok']}")

# %% [markdown]
# Every element, with Frobenius twists l in {0, 1, -1}, maps the points of X
# over F_{p^{2m}} back to X; composing actions follows the right-action law.

# %%
spec = VarietySpec(ParamSet(2, 1, 1, 3))
pres = action_preservation(spec)
print(f"{pres['elements']} elements x {len(pres['twists'])} twists on {pres['points']} points:",
      "ok" if pres["ok"] else pres["failures"][:3])
print("right-action law:", action_law(spec, pairs=100)["ok"])

# %% [markdown]
# Lefschetz-type check for central elements g(1, 0, c).

# %%
group = group_for(spec)
for g in (g for g in group.elements() if group.is_central(g)):
    for k in (1, 2):
        rep = equivariant_lefschetz(spec, g, k)
        print(f"c={g.c:3d} k={k}: fixed points {rep.count:5d}, character sum {rep.predicted:5d}")
