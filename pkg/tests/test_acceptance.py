"""The thirteen acceptance criteria, one check each.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import subprocess
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

import pytest

from lubintate import llc
from lubintate.asgeom import VarietySpec, count_points, exp_sums, recurrence_eigendata
from lubintate.cycles2 import run_suite
from lubintate.cyclo import CycSum, all_characters
from lubintate.ffield import ParamSet
from lubintate.heis import (QGroup, action_preservation, equivariant_lefschetz, group_axioms,
                            group_for)
from lubintate.nonarch import (LocalData, appsum_report, base_point, expected_valuations,
                               mixed_report, negative_membership_test, reduction_residual,
                               sample_points, valuation_report, weil_report)

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str):
    RESULTS[number] = (ok, detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def group_q_axioms():
    start = time.perf_counter()
    orders, ok = [], True
    for p, e, m in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 2, 2)]:
        group = QGroup(p, e, m)
        rep = group_axioms(group, exhaustive_limit=600, triples=10 ** 4)
        want = (p ** e + 1) * p ** (2 * e) * p ** m
        ok &= rep["ok"] and rep["order"] == want
        orders.append(rep["order"])
    elapsed = time.perf_counter() - start
    return ok and orders[0] == 24 and elapsed < 10, f"orders {orders}, {elapsed:.1f}s"


def action_preservation_all():
    checked, bad = 0, 0
    for params in [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3), (3, 1, 1, 2),
                   (2, 2, 2, 1)]:
        rep = action_preservation(VarietySpec(ParamSet(*params)), limit=1 << 22, max_elements=10 ** 6)
        checked += rep["checks"]
        bad += len(rep["failures"]) + rep["frob_failures"]
    return bad == 0, f"{checked} point images checked, {bad} failures"


def partition_identity():
    ok, sets = True, [(2, 1, 1, 1), (3, 1, 1, 1), (2, 1, 1, 3), (2, 2, 2, 1)]
    for params in sets:
        spec = VarietySpec(ParamSet(*params))
        for k in (1, 2, 3):
            total = sum(exp_sums(spec, k), CycSum.from_int(spec.p, 0))
            ok &= total == count_points(spec, k)
    first = [count_points(VarietySpec(ParamSet(2, 1, 1, 1)), k) for k in (1, 2, 3)]
    return ok and first == [2, 8, 8], f"{len(sets)} ParamSets, k <= 3; (2,1,1,1) counts {first}"


def eigendata():
    ok = True
    for params in [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3)]:
        ps = ParamSet(*params)
        spec = VarietySpec(ps)
        for psi in all_characters(spec.base_field())[1:]:
            rep = recurrence_eigendata(spec, psi, 2 * ps.pe + 2)
            ok &= rep.degree == ps.pe and rep.magnitudes_ok(1e-6)
    spec = VarietySpec(ParamSet(2, 1, 1, 1))
    roots = recurrence_eigendata(spec, all_characters(spec.base_field())[1], 6).roots[1]
    target = [1j * 2 ** 0.5, -1j * 2 ** 0.5]
    ok &= len(roots) == 2 and all(min(abs(r - t) for r in roots) < 1e-9 for t in target)
    return ok, "degree p^e and |root| = p^{m(n-1)/2} on 4 ParamSets; (2,1,1,1) roots +-i sqrt 2"


def equivariant_lefschetz_central():
    rows, ok = 0, True
    for params in [(2, 1, 1, 1), (2, 1, 1, 3)]:
        spec = VarietySpec(ParamSet(*params))
        group = group_for(spec)
        for g in (g for g in group.elements() if group.is_central(g)):
            for k in (1, 2):
                rep = equivariant_lefschetz(spec, g, k)
                ok &= rep.count == rep.predicted
                rows += 1
    return ok, f"{rows} (g, k) pairs"


def char_two_cycles():
    ok, done = True, []
    for m in (1, 2):
        for n in (4, 6):
            rep = run_suite(m, n, k_max=3)
            ok &= rep["ok"]
            done.append(f"m={m},n={n}")
    return ok, "fiber split, divisor identity, g-map, scalar -1, |S_k|^2 for " + ", ".join(done)


def nonarch_valuations():
    ok = True
    for params in [(2, 1, 1, 1), (2, 2, 1, 1), (3, 1, 1, 2)]:   # (q, n) = (2,2), (4,2), (3,6)
        ps = ParamSet(*params)
        rep = valuation_report(LocalData(ps, cap=Fraction(3)))
        exp = expected_valuations(ps)
        got = {r["name"]: r["actual"] for r in rep["rows"]}
        ok &= rep["ok"]
        ok &= got["eta"] == str(exp["eta"]) and got["theta"] == str(exp["theta"])
        ok &= got["lambda"] == str(exp["lambda"])
    return ok, "exact equality at cap 3 for (q,n) in (2,2), (4,2), (3,6)"


def approximate_sum():
    ok = all(appsum_report(q, n)["ok"] for q, n in [(2, 2), (3, 2)])
    return ok, "no mixed terms below q^n (Ghat_0) or q (wedge) for (q,n) in (2,2), (3,2)"


def mixed_and_reduction():
    ok, points = True, 0
    for params in [(2, 1, 1, 1), (2, 2, 1, 1), (3, 1, 1, 1), (2, 1, 1, 3), (3, 1, 1, 2)]:
        d = LocalData(ParamSet(*params))
        mix = mixed_report(d)
        ok &= mix["ok"] and Fraction(mix["residual_valuation_lower_bound"]) > Fraction(mix["threshold"])
        for P in [base_point(d)] + sample_points(d, 20, seed=0):
            res = reduction_residual(P)
            ok &= res["certified_positive"] and Fraction(res["residual_valuation_lower_bound"]) > 0
            points += 1
        ok &= negative_membership_test(d)["ok"]
    return ok, f"delta residual above 1/n + 1/(q-1); {points} points with positive residual; negative test rejected"


def weil_cocycle():
    rep = weil_report(QGroup(2, 1, 1, 1), pairs=50, seed=0)
    ok = rep["membership_failures"] == 0 and rep["homomorphism_failures"] == 0
    return ok, f"{rep['enumerated']} images in Q, {rep['pairs']} pairs, 0 failures" if ok else str(rep)


def counting_identities():
    sets = [(2, 1, 1, 1), (3, 1, 1, 2), (2, 2, 1, 1), (2, 1, 1, 3), (5, 1, 1, 1), (2, 2, 2, 1)]
    ok = all(llc.hom_count_sweep(ParamSet(*t))["ok"] for t in sets)
    sweep = llc.dim_identity_sweep(10 ** 9)
    a, b = llc.dim_identity(ParamSet(2, 1, 1, 1)), llc.dim_identity(ParamSet(3, 1, 1, 2))
    ok &= sweep["ok"] and (a["lhs"], a["index"], a["pe_n1"]) == (6, 3, 2)
    ok &= (b["lhs"], b["index"], b["pe_n1"]) == (2184, 364, 6)
    return ok, f"hom_count on {len(sets)} ParamSets; dim identity on {sweep['count']} ParamSets"


def character_laws():
    ok = True
    for params in [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3)]:
        ps = ParamSet(*params)
        for z in range(min(ps.q - 1, 3)):
            rep = llc.multiplicativity_report(llc.SSCParams(ps, zeta_log=z, chi_index=1),
                                              pairs=100, seed=0)
            ok &= rep["ok"]
    return ok, "100 seeded pairs each for Lambda and theta; Lambda(phi) = (-1)^{n-1} c, theta(phi) = c"


def determinism():
    texts = []
    with tempfile.TemporaryDirectory() as tmp:
        for i in range(2):
            out = Path(tmp) / f"run{i}.tsv"
            subprocess.run([sys.executable, "-m", "lubintate.cli", "verify-all", "--params", "2,1,1,1",
                            "--seed", "0", "--out", str(out)], check=True)
            texts.append(out.read_bytes())
    spec = VarietySpec(ParamSet(3, 1, 1, 2))
    serial = [count_points(spec, k) for k in (1, 2)]
    parallel = [count_points(spec, k, partitions=6, workers=4) for k in (1, 2)]
    ok = texts[0] == texts[1] and serial == parallel
    return ok, "verify-all reports byte-identical; partitioned counts equal serial"


CRITERIA = [group_q_axioms, action_preservation_all, partition_identity, eigendata,
            equivariant_lefschetz_central, char_two_cycles, nonarch_valuations, approximate_sum,
            mixed_and_reduction, weil_cocycle, counting_identities, character_laws, determinism]


@pytest.mark.parametrize("number", range(1, 14), ids=[f.__name__ for f in CRITERIA])
def test_criterion(number):
    ok, detail = CRITERIA[number - 1]()
    record(number, ok, detail)


if __name__ == "__main__":
    failed = 0
    for i, check in enumerate(CRITERIA, 1):
        try:
            ok, detail = check()
        except Exception as exc:  # report and continue
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        print(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        failed += not ok
    sys.exit(1 if failed else 0)
