# %% [markdown]
# # From Lubin-Tate coordinates to the reduction
#
# Over K = F_q((w)) the torsion points, the CM point and the auxiliary
# quantities eta, theta, lambda are truncated Puiseux series with certified
# precision.  Their valuations are exact rationals.

# %%
from lubintate.ffield import ParamSet
from lubintate.nonarch import (LocalData, appsum_report, base_point, mixed_report,
                               negative_membership_test, reduction_residual, sample_points,
                               valuation_report)

data = LocalData(ParamSet(2, 2, 1, 1))          # q = 4, n = 2
for row in valuation_report(data)["rows"]:
    print(f"v({row['name']:7s}) = {row['actual']:>6s}   expected {row['expected']:>6s}   known to w^{row['prec']}")

# %% [markdown]
# The formal group laws behind the construction are additive to high order:
# for the law of Ghat_0 every mixed term has degree at least q^n.

# %%
for q, n in [(2, 2), (3, 2)]:
    rep = appsum_report(q, n)
    print(f"(q,n)=({q},{n}): lowest mixed degree {rep['Ghat_0']['lowest_mixed_degree_char0']} "
          f">= {rep['Ghat_0']['threshold']};  wedge {rep['wedge_Ghat_0']['lowest_mixed_degree_char0']}"
          f" >= {rep['wedge_Ghat_0']['threshold']}")

# %% [markdown]
# At the CM point the full determinant-type expression agrees with its
# leading approximation beyond 1/n + 1/(q-1).  Points of the affinoid, here
# produced by moving the base point with stabilizer elements, reduce to
# points of the Artin-Schreier variety.

# %%
mix = mixed_report(data)
print("residual valuation >", mix["residual_valuation_lower_bound"], "threshold", mix["threshold"])
for P in [base_point(data)] + sample_points(data, 5, seed=1):
    r = reduction_residual(P)
    print(f"word {'.'.join(r['word']) or '(base)':18s} residual v > {r['residual_valuation_lower_bound']:>8s}"
          f"  reduced point {r['reduced']}")
print("point pushed off the affinoid:", negative_membership_test(data)["outcome"])
