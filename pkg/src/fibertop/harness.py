"""Instance classification and the theorem-checking sweeps.

For every map in a census this module computes, by independent routes, the
truth values of each side of the three characterization theorems (the
four-way normality one, the sigma one, and the functional one for the
co-sigma-perfect class) plus the whole classification lattice, and records
any disagreement.  Zero recorded mismatches over a census is the artifact
level acceptance ground.

The inner loops run on raw masks with per-instance caching of partition
builds; the public deciders recompute the same answers through their
slower certificate-producing paths and are cross-checked against this fast
path in the unit tests.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .census import Instance, canonical_spaces, census_instances
from .classical import (
    space_normal,
    tietze_function,
    urysohn_function,
    vedenisov_perfectly_normal,
)
from .errors import FibertopError, SearchFailed
from .normality import (
    build_levels,
    is_co_perfectly_normal,
    is_co_sigma_perfectly_normal,
    is_normal,
    is_perfectly_normal,
    is_prenormal,
    is_sigma_normal,
    is_sigma_prenormal,
)
from .oscillation import RationalFunction, norm, osc_on_set
from .spaces import FiberedMap, FiniteSpace, bits, constant_map
from .urysohn_tietze import (
    build_separator,
    exact_extension_exists,
    tietze_extend,
    verify_condition_D,
)

TWO_THIRDS = Fraction(2, 3)


# ------------------------------------------------------- relative kernels


def _components(space: FiniteSpace, region: int) -> tuple[int, ...]:
    """Minimal-neighborhood components of an arbitrary region: x and z are
    linked whenever z lies in min_nbhd(x) & region, symmetrized."""
    parent = {x: x for x in bits(region)}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in bits(region):
        for z in bits(space._min_nbhd[x] & region):
            ra, rb = find(x), find(z)
            if ra != rb:
                parent[rb] = ra
    comps: dict[int, int] = {}
    for x in bits(region):
        r = find(x)
        comps[r] = comps.get(r, 0) | 1 << x
    return tuple(sorted(comps.values()))


def _rel_normal(f: FiberedMap, carrier: int) -> bool:
    """Normality of the submapping over an arbitrary carrier, computed with
    relative closures instead of a re-indexed subspace."""
    space = f.domain
    for y in range(f.codomain.n):
        w = f.preimage(f.codomain.min_nbhd(y)) & carrier
        rel_closed = sorted({(space.full ^ o) & w for o in space.opens})
        hulls = {}
        for a in rel_closed:
            h = 0
            for x in bits(a):
                h |= space._min_nbhd[x]
            hulls[a] = h & w
        for i, a in enumerate(rel_closed):
            for b in rel_closed[i + 1:]:
                if a & b:
                    continue
                if hulls[a] & hulls[b]:
                    return False
    return True


def _rel_sigma_normal(f: FiberedMap, carrier: int) -> bool:
    space = f.domain
    for y in range(f.codomain.n):
        w = f.preimage(f.codomain.min_nbhd(y)) & carrier
        rel_closed = sorted({(space.full ^ o) & w for o in space.opens})
        for t in rel_closed:
            for fm in rel_closed:
                if t & fm:
                    continue
                bad = False
                for x in bits(t):
                    piece = space.closure_point(x) & w
                    v = 0
                    for z in bits(piece):
                        v |= space._min_nbhd[z]
                    v &= w
                    cl_v = 0
                    for z in bits(v):
                        cl_v |= space.closure_point(z)
                    if cl_v & w & fm:
                        bad = True
                        break
                if bad:
                    return False
    return True


def _rel_perfect(f: FiberedMap, carrier: int) -> bool:
    space = f.domain
    for y in range(f.codomain.n):
        w = f.preimage(f.codomain.min_nbhd(y)) & carrier
        comps = _components(space, w)
        for o in space.opens:
            target = o & w
            for comp in comps:
                if comp & target and comp & ~target:
                    return False
    return True


def _rel_f_sigma_submapping(f: FiberedMap, carrier: int) -> bool:
    space = f.domain
    for y in range(f.codomain.n):
        pre = f.preimage(f.codomain.min_nbhd(y))
        trace = carrier & pre
        for x in bits(trace):
            if space.closure_point(x) & pre & ~trace:
                return False
    return True


def functional_co_sigma(f: FiberedMap) -> bool:
    """Right-hand side of the functional characterization of the
    co-sigma-perfect class, checked literally over every restriction and
    every relatively open set."""
    space, cod = f.domain, f.codomain
    for o_mask in cod.opens:
        pre_o = f.preimage(o_mask)
        rel_opens = sorted({o & pre_o for o in space.opens})
        for y in bits(o_mask):
            w = f.preimage(cod.min_nbhd(y))
            comps = space.nbhd_classes(w)
            for u in rel_opens:
                target = u & w
                for comp in comps:
                    if comp & target and comp & ~target:
                        return False
    return True


# ------------------------------------------------------------ classification


def classify(f: FiberedMap) -> dict:
    """All classification booleans for one map, via the public deciders."""
    out = {
        "prenormal": is_prenormal(f).holds,
        "normal": is_normal(f).holds,
        "sigma_prenormal": is_sigma_prenormal(f).holds,
        "sigma_normal": is_sigma_normal(f).holds,
        "perfectly_normal": is_perfectly_normal(f, with_witnesses=False).holds,
        "co_perfectly_normal": is_co_perfectly_normal(f).holds,
        "co_sigma_perfectly_normal": is_co_sigma_perfectly_normal(f).holds,
        "functional_co_sigma": functional_co_sigma(f),
    }
    her_normal = True
    her_perfect = True
    sigma_inherit_ok = True
    for carrier in range(f.domain.full + 1):
        if not _rel_normal(f, carrier):
            her_normal = False
        if not _rel_perfect(f, carrier):
            her_perfect = False
        if out["sigma_normal"] and _rel_f_sigma_submapping(f, carrier):
            if not _rel_sigma_normal(f, carrier):
                sigma_inherit_ok = False
    out["hereditarily_normal"] = her_normal
    out["hereditarily_perfectly_normal"] = her_perfect
    out["sigma_inherited_by_f_sigma_submaps"] = sigma_inherit_ok
    constant = len(set(f.table)) <= 1
    out["constant_map"] = constant
    if constant:
        out["vedenisov_domain"] = vedenisov_perfectly_normal(f.domain)
        out["domain_space_normal"] = space_normal(f.domain)
    return out


def hierarchy_violations(c: dict, codomain_is_point: bool) -> list[str]:
    """The implication lattice every instance must satisfy."""
    bad = []

    def imp(name: str, a: bool, b: bool):
        if a and not b:
            bad.append(name)

    imp("co_sigma_perfect->perfect", c["co_sigma_perfectly_normal"],
        c["perfectly_normal"])
    imp("perfect->co_perfect", c["perfectly_normal"], c["co_perfectly_normal"])
    imp("perfect->prenormal", c["perfectly_normal"], c["prenormal"])
    imp("perfect->hereditarily_normal", c["perfectly_normal"],
        c["hereditarily_normal"])
    imp("sigma_normal->normal", c["sigma_normal"], c["normal"])
    imp("normal->prenormal", c["normal"], c["prenormal"])
    if c["perfectly_normal"] != c["hereditarily_perfectly_normal"]:
        bad.append("perfect_normality_not_hereditary")
    if c["functional_co_sigma"] != c["co_sigma_perfectly_normal"]:
        bad.append("functional_characterization_mismatch")
    if not c["sigma_inherited_by_f_sigma_submaps"]:
        bad.append("sigma_not_inherited_by_f_sigma_submaps")
    if c["constant_map"]:
        trio = {c["co_perfectly_normal"], c["perfectly_normal"],
                c["co_sigma_perfectly_normal"]}
        if len(trio) != 1:
            bad.append("constant_perfect_trio_differs")
        quad = {c["prenormal"], c["normal"], c["sigma_prenormal"],
                c["sigma_normal"]}
        if len(quad) != 1:
            bad.append("constant_normality_quad_differs")
        if c["perfectly_normal"] != c["vedenisov_domain"]:
            bad.append("constant_vedenisov_mismatch")
        if codomain_is_point and c["normal"] != c["domain_space_normal"]:
            bad.append("constant_total_space_mismatch")
    return bad


# --------------------------------------------------------- theorem sweeps


def _build_entry(cache: dict, f: FiberedMap, f_side: int, t_side: int, y: int,
                 depth: int):
    key = (f_side, t_side, y)
    hit = cache.get(key)
    if hit is None:
        try:
            levels = build_levels(f, f_side, t_side, y, depth)
        except SearchFailed:
            hit = (False, False, False)
        else:
            bounds_ok = _stepwise_bounds_ok(f, levels)
            c_ok = _condition_c_ok(f, levels, f_side, t_side)
            hit = (True, bounds_ok, c_ok)
        cache[key] = hit
    return hit


def _level_indices(blocks, points: int):
    idx = {}
    for k, block in enumerate(blocks):
        m = block & points
        while m:
            low = m & -m
            idx[low.bit_length() - 1] = k
            m ^= low
    return idx


def _stepwise_bounds_ok(f: FiberedMap, levels) -> bool:
    """The two displayed stepwise bounds, checked with exact rationals on the
    level index tables (same-denominator oscillation, cross-denominator
    increments)."""
    space = f.domain
    depth = len(levels) - 1
    if depth < 1:
        return True
    w = f.preimage(levels[1][0])
    tables = [None] + [_level_indices(levels[n][1], w) for n in range(1, depth + 1)]
    for n in range(1, depth + 1):
        idx = tables[n]
        for x in bits(w):
            kx = idx[x]
            for z in bits(space._min_nbhd[x]):
                if abs(kx - idx[z]) > 1:
                    return False
    for n in range(1, depth):
        d_lo = Fraction(1, (1 << n) - 1)
        d_hi = Fraction(1, (1 << (n + 1)) - 1)
        lo, hi = tables[n], tables[n + 1]
        for x in bits(w):
            if abs(hi[x] * d_hi - lo[x] * d_lo) > d_hi:
                return False
    return True


def _condition_c_ok(f: FiberedMap, levels, f_side: int, t_side: int) -> bool:
    """Condition (C) for the truncated limit of a flat-chain family: the
    limit equals the deepest step function on the preimage of the minimal
    neighborhood and vanishes elsewhere, so the checks reduce to integer
    comparisons on the deepest index table."""
    space = f.domain
    depth = len(levels) - 1
    w = f.preimage(levels[1][0])
    idx = _level_indices(levels[depth][1], w)
    top = (1 << depth) - 1
    worst = 0
    for x in bits(w):
        kx = idx[x]
        for z in bits(space._min_nbhd[x]):
            d = abs(kx - idx[z])
            if d > worst:
                worst = d
    if not 2 * worst < top:
        return False
    for x in bits(f_side & w):
        if idx[x] != 0:
            return False
    for x in bits(t_side & w):
        if idx[x] != top:
            return False
    upper = 0
    for x in bits(w):
        if 2 * idx[x] >= top:
            upper |= 1 << x
    if f_side & space.rel_closure(w, upper):
        return False
    if t_side & w & ~space.rel_interior(w, upper):
        return False
    return True


def theorem_record(inst: Instance, depth: int = 6, extender_budget: int = 2,
                   tolerance: Fraction = Fraction(1, 1024)) -> dict:
    """The full per-instance record: classification, both equivalence
    theorems by independent routes, stepwise-bound tallies, and the
    budgeted extension runs with their residual checks."""
    f = inst.f
    space, cod = f.domain, f.codomain
    a_dec = is_normal(f).holds
    a_sigma = is_sigma_normal(f).holds
    b_ok = c_ok = d_ok = True
    bs_ok = cs_ok = True
    cache: dict = {}
    osc_viol = inc_viol = 0
    anomalies = []
    ext_runs = []
    budget = extender_budget
    for o_mask in cod.opens:
        if o_mask == 0:
            continue
        pre_o = f.preimage(o_mask)
        rel_closed = sorted({(space.full ^ o) & pre_o for o in space.opens})
        for y in bits(o_mask):
            w = f.preimage(cod.min_nbhd(y))
            comps = space.nbhd_classes(w)
            for i, a in enumerate(rel_closed):
                for b in rel_closed[i:]:
                    if a & b:
                        continue
                    if d_ok:
                        for comp in comps:
                            if comp & a and comp & b:
                                d_ok = False
                                break
                    if b_ok or c_ok:
                        built, bounds, c_pass = _build_entry(cache, f, a, b, y, depth)
                        if not built:
                            if a_dec:
                                anomalies.append(
                                    f"builder failed on normal map at O={o_mask}"
                                    f" F={a} T={b} y={y}")
                            b_ok = c_ok = False
                        else:
                            if not bounds:
                                osc_viol += 1
                            if not c_pass:
                                if a_dec:
                                    anomalies.append(
                                        f"condition C failed at O={o_mask}"
                                        f" F={a} T={b} y={y}")
                                c_ok = False
                    if budget > 0 and (a | b):
                        budget -= 1
                        ext_runs.append(
                            _extension_run(f, a, b, y, o_mask, tolerance, a_dec,
                                           anomalies))
            for t in rel_closed:
                pieces = [space.rel_closure(pre_o, 1 << x) for x in bits(t)]
                for fm in rel_closed:
                    if t & fm:
                        continue
                    if cs_ok:
                        hull_comps = 0
                        for comp in comps:
                            if comp & t:
                                hull_comps |= comp
                        if space.rel_closure(w, hull_comps) & fm:
                            cs_ok = False
                    if bs_ok:
                        for piece in pieces:
                            built, _, _ = _build_entry(cache, f, fm, piece, y, depth)
                            if not built:
                                if a_sigma:
                                    anomalies.append(
                                        f"sigma builder failed at O={o_mask}"
                                        f" F={fm} piece={piece} y={y}")
                                bs_ok = False
                                break
    families = sum(1 for v in cache.values() if v[0])
    cls = classify(f)
    record = {
        "id": inst.uid,
        "x_opens": list(space.opens),
        "y_opens": list(cod.opens),
        "map": list(f.table),
        "classes": cls,
        "thm3": {"A": a_dec, "B": b_ok, "C": c_ok, "D": d_ok},
        "thm4": {"A": a_sigma, "B": bs_ok, "C": cs_ok},
        "stepwise": {"families": families, "osc_or_increment_violations": osc_viol + inc_viol},
        "extension_runs": ext_runs,
        "hierarchy_violations": hierarchy_violations(cls, cod.n == 1),
        "anomalies": anomalies,
    }
    mism = []
    if not (a_dec == b_ok == c_ok == d_ok):
        mism.append("thm3")
    if not (a_sigma == bs_ok == cs_ok):
        mism.append("thm4")
    if a_dec != a_sigma:
        mism.append("normal_vs_sigma_normal")
    if cls["normal"] != a_dec or cls["sigma_normal"] != a_sigma:
        mism.append("classify_vs_sweep")
    record["mismatches"] = mism
    record["digest"] = digest(record)
    return record


def _extension_run(f: FiberedMap, f_side: int, t_side: int, y: int,
                   o_mask: int, tolerance: Fraction, expect_ok: bool,
                   anomalies: list) -> dict:
    space = f.domain
    union = f_side | t_side
    vals = tuple(Fraction(1) if t_side >> x & 1 else
                 (Fraction(0) if f_side >> x & 1 else None)
                 for x in range(space.n))
    phit = RationalFunction(space, vals, union)
    run = {"O": o_mask, "F": f_side, "T": t_side, "y": y}
    try:
        res = tietze_extend(f, union, phit, y, tolerance=tolerance,
                            within=o_mask)
    except FibertopError as exc:
        run["ok"] = False
        run["error"] = type(exc).__name__
        if expect_ok:
            anomalies.append(f"extension failed on normal map: {exc}")
        return run
    chain_ok = all(3 * res.residuals[i + 1] <= 2 * res.residuals[i]
                   for i in range(len(res.residuals) - 1))
    trace = union & f.preimage(f.codomain.min_nbhd(y))
    exact = res.residual_bound == 0
    agree_ok = not exact or not (trace & ~res.agreement_set)
    sup = Fraction(0)
    for x in bits(trace):
        d = abs(phit.values[x] - res.phi.values[x])
        if d > sup:
            sup = d
    run.update({
        "ok": True,
        "iterations": res.iterations,
        "residual": str(res.residual_bound),
        "geometric_chain_exact": chain_ok,
        "norm_contract": res.norm_ok,
        "exact_agreement": exact and agree_ok,
        "residual_covers_sup": sup <= res.residual_bound,
    })
    if not (chain_ok and res.norm_ok and agree_ok and sup <= res.residual_bound):
        anomalies.append(f"extension contract violated at O={o_mask} y={y}")
    return run


# ------------------------------------------------------------ sweep drivers


def run_theorem_sweep(max_total: int = 6, depth: int = 6,
                      extender_budget: int = 2,
                      tolerance: Fraction = Fraction(1, 1024)) -> dict:
    records = [theorem_record(inst, depth, extender_budget, tolerance)
               for inst in census_instances(max_total)]
    return summarize(records, {"max_total": max_total, "depth": depth,
                               "extender_budget": extender_budget,
                               "tolerance": str(tolerance)})


def equivalence_harness(maps, depth: int = 6, extender_budget: int = 2,
                        tolerance: Fraction = Fraction(1, 1024)) -> dict:
    """Cross-decider consistency report over an arbitrary instance set."""
    records = [theorem_record(Instance(f"m{i:04d}", f), depth,
                              extender_budget, tolerance)
               for i, f in enumerate(maps)]
    return summarize(records, {"instances": len(records), "depth": depth,
                               "extender_budget": extender_budget,
                               "tolerance": str(tolerance)})


def summarize(records: list, params: dict) -> dict:
    mismatches = [r["id"] for r in records if r["mismatches"]]
    violations = [r["id"] for r in records if r["hierarchy_violations"]]
    anomalies = [r["id"] for r in records if r["anomalies"]]
    bad_ext = [r["id"] for r in records
               for run in r["extension_runs"]
               if run.get("ok") and not (run["geometric_chain_exact"]
                                         and run["norm_contract"]
                                         and run["residual_covers_sup"])]
    stepwise_viol = sum(r["stepwise"]["osc_or_increment_violations"]
                        for r in records)
    return {
        "params": params,
        "instances": len(records),
        "normal_count": sum(1 for r in records if r["thm3"]["A"]),
        "families_built": sum(r["stepwise"]["families"] for r in records),
        "stepwise_violations": stepwise_viol,
        "extension_runs": sum(len(r["extension_runs"]) for r in records),
        "thm_mismatches": mismatches,
        "hierarchy_violations": violations,
        "anomalies": anomalies,
        "extension_contract_failures": bad_ext,
        "normal_not_sigma_normal": [r["id"] for r in records
                                    if r["thm3"]["A"] and not r["thm4"]["A"]],
        "records": records,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(report_json(obj).encode()).hexdigest()


# ------------------------------------------- constant-map degeneration check


def constant_map_degeneration(n_max: int = 5, depth: int = 4) -> dict:
    """Cross-oracle run: on constant maps the separator and extension
    machinery must agree with the classical space-level constructions."""
    checked = 0
    separator_disagreements = []
    tietze_disagreements = []
    contract_failures = []
    for n in range(1, n_max + 1):
        for si, space in enumerate(canonical_spaces(n)):
            if not space_normal(space):
                continue
            f = constant_map(space)
            closed = sorted(space.full ^ o for o in space.opens)
            for i, a in enumerate(closed):
                for b in closed[i + 1:]:
                    if a & b or not (a and b):
                        continue
                    checked += 1
                    sid = f"n{n}.{si:03d} F={a} T={b}"
                    classical = urysohn_function(space, a, b)
                    try:
                        sep = build_separator(f, a, b, 0, depth)
                        ours = True
                        zeros = sep.phi.preimage(lambda v: v == 0)
                        ones = sep.phi.preimage(lambda v: v == 1)
                        if a & ~zeros or b & ~ones:
                            contract_failures.append(sid + " values")
                        if osc_on_set(sep.phi, space.full) > sep.limit.error_bound:
                            contract_failures.append(sid + " osc")
                    except FibertopError:
                        ours = False
                    if ours != (classical is not None):
                        separator_disagreements.append(sid)
                    # extension: two-valued boundary data on the closed union
                    union = a | b
                    vals = tuple(Fraction(1) if b >> x & 1 else
                                 (Fraction(0) if a >> x & 1 else None)
                                 for x in range(space.n))
                    phit = RationalFunction(space, vals, union)
                    ext = exact_extension_exists(f, phit, 0)
                    cla = tietze_function(space, phit)
                    if ext.exists != (cla is not None):
                        tietze_disagreements.append(sid)
                    if ext.exists:
                        rep = verify_condition_D(f, union, phit, ext.phi, 0)
                        if not rep.all_ok:
                            contract_failures.append(sid + " contract")
                        if cla is not None and norm(cla) > norm(phit):
                            contract_failures.append(sid + " classical norm")
    return {
        "pairs_checked": checked,
        "separator_disagreements": separator_disagreements,
        "tietze_disagreements": tietze_disagreements,
        "contract_failures": contract_failures,
    }
