# %% [markdown]
# # Counting points and reading off Frobenius eigenvalues
#
# X is the hypersurface z^{p^m} - z = y^{p^e+1} - (1/n') sum_{i<=j} y_i y_j.
# Its points over F_{p^{mk}} split by additive character: for each psi on
# F_{p^m} the exponential sum S_k(psi) collects one isotypic piece, and
# summing over psi gives the point count back exactly.

# %%
from lubintate.asgeom import VarietySpec, count_points, exp_sums, recurrence_eigendata
from lubintate.cyclo import CycSum, all_characters
from lubintate.ffield import ParamSet

spec = VarietySpec(ParamSet(2, 1, 1, 1))        # z^2 - z = y^3 over F_2
for k in (1, 2, 3):
    sums = exp_sums(spec, k)
    total = sum(sums, CycSum.from_int(2, 0))
    print(f"k={k}: #X = {count_points(spec, k):3d}   S_k(psi) = {[s.to_list() for s in sums]}"
          f"   sum = {total.rational_value()}")

# %% [markdown]
# The sequence k -> S_k(psi) satisfies a linear recurrence whose roots are
# the Frobenius eigenvalues on the psi-part of cohomology.  For the
# supersingular curve above they are +-i sqrt(2).

# %%
psi = all_characters(spec.base_field())[1]
rep = recurrence_eigendata(spec, psi, k_max=6)
print("recurrence degree:", rep.degree)
print("roots:", [f"{z.real:+.6f}{z.imag:+.6f}i" for z in rep.roots[1]])
print("expected |root|:", rep.expected_magnitude)

# %% [markdown]
# Larger cases.  Counts come from a trace-histogram fold, which never lists
# the points.  For each nontrivial character all recurrence roots share one
# absolute value, as purity predicts.

# %%
print("(3,1,1,2) counts:", [count_points(VarietySpec(ParamSet(3, 1, 1, 2)), k) for k in (1, 2)])
for params in [(3, 1, 1, 1), (2, 1, 1, 3)]:
    ps = ParamSet(*params)
    spec = VarietySpec(ps)
    for psi in all_characters(spec.base_field())[1:]:
        rep = recurrence_eigendata(spec, psi, 2 * ps.pe + 2)
        mags = sorted({round(abs(z), 9) for z in rep.roots[1]})
        print(f"{params} psi_{psi.scalar.value}: degree {rep.degree}, |roots| {mags}, "
              f"expected {rep.expected_magnitude:.6f}")
