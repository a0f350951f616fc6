"""Frozen reference values, produced by brute-force enumeration.

``python -m lubintate.golden`` rebuilds ``data/golden.json``; verify-all
compares the fast code paths against it.  Point counts and exponential sums
come from scanning every point, fixed-point counts from scanning every point
over the fixed-point field, so none of them reuse the trace-histogram fold.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .asgeom import (BudgetExceeded, VarietySpec, count_points_bruteforce, exp_sum_bruteforce)
from .cyclo import all_characters
from .ffield import ParamSet
from .heis import fixed_points_bruteforce, group_for

GOLDEN_PARAMS = [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 3), (3, 1, 1, 2), (2, 2, 2, 1)]
SCAN_LIMIT = 1 << 20


def key(params: ParamSet) -> str:
    return f"{params.p},{params.f},{params.e},{params.nprime}"


def _scan_size(spec: VarietySpec, k: int) -> int:
    return (spec.p ** (spec.m * k)) ** (spec.n_coords - 1)


def _llc_values(params: ParamSet) -> dict:
    from . import llc

    fields = llc.LocalFields(params)
    sp = llc.SSCParams(params)
    n = params.n
    d = llc.DUnit(fields, {1: 1}, 2 * n)
    return {
        "lambda_E12": str(llc.lambda_eval(sp, llc.MatUnit.elementary(fields, 1, 2, 1))),
        "lambda_corner": str(llc.lambda_eval(sp, llc.MatUnit.elementary(fields, n, 1, 1, 1))),
        "theta_1_plus_phi": str(llc.theta_eval(sp, d)),
        "h_r_1_plus_phi": int(llc.h_r(params, 0, llc.MatUnit.identity(fields), d).value),
    }


def build_entry(params: ParamSet, k_max: int = 3) -> dict:
    spec = VarietySpec(params)
    counts, sums = {}, {}
    for k in range(1, k_max + 1):
        if _scan_size(spec, k) > SCAN_LIMIT:
            break
        counts[str(k)] = count_points_bruteforce(spec, k)
        sums[str(k)] = [list(exp_sum_bruteforce(spec, psi, k).to_list())
                        for psi in all_characters(spec.base_field())]
    group = group_for(spec)
    fixed = []
    central = [g for g in group.elements() if group.is_central(g)]
    torus = [g for g in group.elements() if g.b == 0 and g.c == 0 and g.a != 1][:1]
    for g in central + torus:
        for k in (1, 2):
            try:
                cnt = fixed_points_bruteforce(spec, g, k)
            except BudgetExceeded:
                continue
            fixed.append({"a": g.a, "b": g.b, "c": g.c, "k": k, "count": cnt,
                          "central": group.is_central(g)})
    return {"params": params.as_dict(), "counts": counts, "exp_sums": sums,
            "fixed_points": fixed, "group_field_degree": group.L, "llc": _llc_values(params)}


def build(params_list=GOLDEN_PARAMS) -> dict:
    return {"schema_version": 1,
            "entries": {key(ParamSet(*t)): build_entry(ParamSet(*t)) for t in params_list}}


def load() -> dict:
    text = resources.files("lubintate").joinpath("data/golden.json").read_text()
    return json.loads(text)


def entry(params: ParamSet) -> dict | None:
    return load()["entries"].get(key(params))


def main():
    path = Path(__file__).with_name("data") / "golden.json"
    path.parent.mkdir(exist_ok=True)
    path.write_text(json.dumps(build(), indent=1, sort_keys=True) + "\n")
    print(path)


if __name__ == "__main__":
    main()
