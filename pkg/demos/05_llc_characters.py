# %% [markdown]
# # Characters on the two sides of the correspondence
#
# A simple supercuspidal parameter is (zeta, chi, c).  On the matrix side
# Lambda lives on L^x U_I^1; on the division-algebra side theta lives on
# L^x U_D^1.  Both are multiplicative, and on the uniformizers
# Lambda(phi_M) = (-1)^{n-1} c and theta(phi_D) = c.  The value c stays a
# formal symbol.

# %%
from lubintate import llc
from lubintate.ffield import ParamSet

ps = ParamSet(3, 1, 1, 1)
fields = llc.LocalFields(ps)
for z in range(ps.q - 1):
    sp = llc.SSCParams(ps, zeta_log=z, chi_index=1)
    rep = llc.multiplicativity_report(sp, pairs=100, seed=0)
    print(f"zeta=gamma^{z}: Lambda(phi) = {rep['lambda_phi']:>18s}, theta(phi) = {rep['theta_phi']:>4s}, "
          f"failures {rep['lambda_failures']}/{rep['theta_failures']}")

# %% [markdown]
# Values on a few explicit units.

# %%
sp = llc.SSCParams(ps)
print("Lambda(1 + E_12)      =", llc.lambda_eval(sp, llc.MatUnit.elementary(fields, 1, 2, 1)))
print("Lambda(1 + w E_n1)    =", llc.lambda_eval(sp, llc.MatUnit.elementary(fields, ps.n, 1, 1, 1)))
print("theta(1 + phi_D)      =", llc.theta_eval(sp, llc.DUnit(fields, {1: 1}, 2 * ps.n)))

# %% [markdown]
# Counting identities: the number of homomorphisms matches a closed form,
# and dimensions balance for every ParamSet with q^n <= 10^9.

# %%
for t in [(2, 1, 1, 1), (3, 1, 1, 2)]:
    d = llc.dim_identity(ParamSet(*t))
    print(f"{t}: n(q^n-1)/(q-1) = {d['lhs']} = {d['index']} * {d['pe_n1']}")
print(llc.hom_count_sweep(ParamSet(2, 2, 2, 1))["ok"], llc.dim_identity_sweep()["count"], "ParamSets checked")
