"""Executing workspace tasks and assembling the JSON report."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

from .fincat import BudgetExceeded, ShapeError, budget, identity, terminal_presheaf, to_terminal
from .leibniz import (check_interval, interval, interval_from_points, leibniz_transpose,
                      leibniz_untranspose, path_transpose, path_untranspose,
                      pullback_power_cube, transpose_unrestricted, untranspose_unrestricted)
from .lifting import (RIGHT, PullbackSquare, enumerate_problems, is_solution,
                      left_restrict, left_restrict_formula, left_restricted, right_pullback,
                      right_pullback_formula, right_pullback_inv, right_restrict,
                      right_restrict_formula, right_restricted, search_lift_struct, solve,
                      uniformity_check, unrestricted)
from .lifting.core import count_sections_independently
from .lifting.rebase import rebase_pullback, rebase_pullback_formula
from .ppapprox import approximates, canonical_approx, check_pp_approx, pp_approx_errors
from .relating import (NoWitnessConstructed, SpanMap, check_witness, construct_homotopy_witness,
                       diagonal_relation, endpoint_errors, identity_span, path_relation,
                       search_witness)
from .topos import times
from .universe import bounded_presheaves

REPORT_SCHEMA = "liftlab-report/1"
PASS, FAIL, NONE, BUDGET, ERROR = "pass", "fail", "none", "budget-exceeded", "error"


class TaskInputError(ValueError):
    pass


class _Ctx:
    """Name resolution for one task."""

    def __init__(self, ws, task, bound):
        self.ws, self.task, self.bound = ws, task, bound
        self.inputs = task.inputs

    def get(self, key, default=...):
        if key in self.inputs:
            return self.inputs[key]
        if default is ...:
            raise TaskInputError(f"missing input {key!r}")
        return default

    def psh(self, ref):
        if ref not in self.ws.presheaves:
            raise TaskInputError(f"unresolved presheaf {ref!r}")
        return self.ws.presheaves[ref]

    def mor(self, ref):
        if ref not in self.ws.morphisms:
            raise TaskInputError(f"unresolved morphism {ref!r}")
        return self.ws.morphisms[ref]

    def boundary(self, doc=None):
        doc = self.get("boundary") if doc is None else doc
        i, p = self.mor(doc["left"]), self.mor(doc["right"])
        r = doc.get("restrict")
        if r is None:
            return unrestricted(i, p)
        if r.get("side") == "left":
            return left_restricted(i, self.mor(r["map"]), p)
        if r.get("side") == "right":
            return right_restricted(i, p, self.mor(r["map"]))
        raise TaskInputError("restrict.side must be 'left' or 'right'")

    def interval(self):
        doc = self.get("interval")
        pt0, pt1 = self.mor(doc["pt0"]), self.mor(doc["pt1"])
        if "boundary" in doc:
            return interval(pt0, pt1, self.mor(doc["boundary"]), self.mor(doc["f0"]),
                            self.mor(doc["f1"]))
        return interval_from_points(pt0, pt1)

    def parameters(self):
        return bounded_presheaves(self.ws.category, self.bound)


def _tables(m):
    return [list(t) for t in m.comps]


def _all_pass(flags):
    return PASS if all(flags) else FAIL


# -- task kinds ---------------------------------------------------------------


def _validate(ctx):
    return {"status": PASS, "presheaves": len(ctx.ws.presheaves),
            "morphisms": len(ctx.ws.morphisms)}


def _search_lift(ctx):
    bd = ctx.boundary()
    found = search_lift_struct(bd)
    out = {"boundary": bd.describe(), "count": len(found),
           "structures": [_tables(F.internal) for F in found], "status": PASS}
    if ctx.task.options.get("cross_check"):
        n = count_sections_independently(bd)
        out["independent_count"] = n
        if n != len(found):
            out["status"] = FAIL
    want = ctx.task.options.get("expect_count")
    if want is not None and want != len(found):
        out["status"] = FAIL
    return out


def _solve(ctx):
    bd = ctx.boundary()
    ref = ctx.get("parameter", None)
    x = ctx.psh(ref) if ref else terminal_presheaf(ctx.ws.category)
    probs = enumerate_problems(bd, x)
    rows, flags = [], []
    params = ctx.parameters()
    for F in search_lift_struct(bd):
        sols = [solve(F, prob) for prob in probs]
        ok = all(is_solution(bd, prob, s) for prob, s in zip(probs, sols))
        uniform = uniformity_check(F, params)
        flags.append(ok and uniform)
        rows.append({"solutions": [_tables(s) for s in sols], "solves": ok, "uniform": uniform})
    return {"problems": len(probs), "structures": rows, "status": _all_pass(flags)}


def _construct(ctx):
    op = ctx.get("op")
    bd = ctx.boundary()
    if op == "right_restrict":
        q = ctx.mor(ctx.get("map"))
        build, formula = (lambda F: right_restrict(F, q)), (lambda F, pr: right_restrict_formula(F, q, pr))
    elif op == "left_restrict":
        j = ctx.mor(ctx.get("map"))
        build, formula = (lambda F: left_restrict(F, j)), (lambda F, pr: left_restrict_formula(F, j, pr))
    elif op == "right_pullback":
        sq = PullbackSquare(ctx.mor(ctx.get("side")), ctx.mor(ctx.get("top")), bd.restr, bd.right)
        build, formula = (lambda F: right_pullback(F, sq)), (lambda F, pr: right_pullback_formula(F, sq, pr))
    elif op == "rebase_pullback":
        phi = ctx.mor(ctx.get("map"))
        build, formula = (lambda F: rebase_pullback(F, phi)), (lambda F, pr: rebase_pullback_formula(F, phi, pr))
    else:
        raise TaskInputError(f"unknown construction {op!r}")
    rows, flags = [], []
    for F in search_lift_struct(bd):
        G = build(F)
        n, ok = 0, True
        for x in _params_on(G.boundary.base, ctx.bound):
            for prob in enumerate_problems(G.boundary, x):
                n += 1
                if solve(G, prob) != formula(F, prob):
                    ok = False
        flags.append(ok)
        rows.append({"result": _tables(G.internal), "problems_checked": n, "formula_agrees": ok})
    return {"op": op, "structures": rows, "status": _all_pass(flags)}


def _params_on(base, bound):
    return bounded_presheaves(base, bound)


def _round_trip(found, there, back):
    images = [there(F) for F in found]
    ok = all(back(G) == F for F, G in zip(found, images))
    distinct = len(set(G.internal for G in images)) == len(images)
    return images, ok and distinct


def _transpose(ctx):
    kind = ctx.get("transform")
    if kind == "right-pullback":
        bd = ctx.boundary()
        if bd.kind != RIGHT:
            raise TaskInputError("right-pullback needs a right-restricted boundary")
        sq = PullbackSquare(ctx.mor(ctx.get("side")), ctx.mor(ctx.get("top")), bd.restr, bd.right)
        found = search_lift_struct(bd)
        images, ok = _round_trip(found, lambda F: right_pullback(F, sq),
                                 lambda G: right_pullback_inv(G, sq))
    elif kind in ("leibniz", "unrestricted"):
        dV, dL, l, p = (ctx.mor(ctx.get(k)) for k in ("dV", "dL", "l", "right"))
        a = canonical_approx(dV, dL, p)
        bd = left_restricted(a.incl, times(identity(dV.dst), l), p)
        found = search_lift_struct(bd)
        if kind == "leibniz":
            there, back = (lambda F: leibniz_transpose(F, a, l)), (lambda G: leibniz_untranspose(G, a, l))
        else:
            there, back = (lambda F: transpose_unrestricted(F, a, l)), (lambda G: untranspose_unrestricted(G, a, l))
        images, ok = _round_trip(found, there, back)
    elif kind == "path":
        i = ctx.interval()
        dV, p = ctx.mor(ctx.get("dV")), ctx.mor(ctx.get("right"))
        cert = check_interval(i, [p.src, p.dst])
        if not cert.ok:
            return {"status": FAIL, "failure": cert.condition}
        a = canonical_approx(dV, i.dI, p)
        l = to_terminal(i.I)
        bd = left_restricted(a.incl, times(identity(dV.dst), l), p)
        found = search_lift_struct(bd)
        images, ok = _round_trip(found, lambda F: path_transpose(F, a, i, cert, p),
                                 lambda G: path_untranspose(G, a, i, cert, p))
    else:
        raise TaskInputError(f"unknown transform {kind!r}")
    out = {"transform": kind, "count": len(found), "round_trip": ok,
           "transposed": [_tables(G.internal) for G in images]}
    if images:
        n = len(search_lift_struct(images[0].boundary))
        out["transposed_count"] = n
        ok = ok and n == len(found)
    out["status"] = _all_pass([ok])
    return out


def _approx_check(ctx):
    dV, dL, p = (ctx.mor(ctx.get(k)) for k in ("dV", "dL", "right"))
    ref = ctx.get("incl", None)
    if ref is not None:
        ok = approximates(dV, dL, ctx.mor(ref), p)
        return {"approximates": ok, "status": _all_pass([ok])}
    a = canonical_approx(dV, dL, p)
    errs = pp_approx_errors(a)
    return {"candidate_sizes": list(a.candidate.sizes), "errors": errs,
            "status": _all_pass([check_pp_approx(a)])}


def _witness(ctx):
    bd1 = ctx.boundary()
    bd2 = ctx.boundary(ctx.get("second_boundary", ctx.get("boundary")))
    s1, s2 = search_lift_struct(bd1), search_lift_struct(bd2)
    k1, k2 = ctx.get("first", 0), ctx.get("second", 0)
    if not (0 <= k1 < len(s1) and 0 <= k2 < len(s2)):
        raise TaskInputError("structure index out of range")
    F1, F2 = s1[k1], s2[k2]
    if "span" in ctx.inputs:
        sp = ctx.get("span")
        span = SpanMap(ctx.mor(sp["e"]), ctx.mor(sp["b"]), ctx.mor(sp["b2"]))
    else:
        span = identity_span(F1)
    rel = ctx.get("relation", "diagonal")
    method = ctx.get("method", "search")
    if method == "construct":
        i = ctx.interval()
        try:
            w = construct_homotopy_witness(F1, F2, span, i)
        except NoWitnessConstructed as exc:
            return {"status": NONE, "detail": str(exc)}
        ends = endpoint_errors(w, i)
        ok = check_witness(w) and not ends
        return {"witness": _tables(w.H), "endpoint_errors": ends, "status": _all_pass([ok])}
    r = diagonal_relation(bd2.right) if rel == "diagonal" else path_relation(ctx.interval(), bd2.right)
    res = search_witness(F1, F2, span, r, prune=not ctx.task.options.get("exhaustive", False))
    if res.found:
        return {"witness": _tables(res.witness.H), "visited": res.visited, "status": PASS}
    return {"visited": res.visited, "status": NONE,
            "detail": f"none, search exhausted, {res.visited} candidates"}


def _interval_check(ctx):
    i = ctx.interval()
    rel = [ctx.psh(r) for r in ctx.get("relative_to")]
    cert = check_interval(i, rel)
    out = {"certified": cert.ok, "status": _all_pass([cert.ok])}
    if not cert.ok:
        out["failure"] = cert.condition
    return out


def _cube_check(ctx):
    i = ctx.interval()
    p = ctx.mor(ctx.get("right"))
    cert = check_interval(i, [p.src, p.dst])
    if not cert.ok:
        return {"status": FAIL, "failure": cert.condition}
    refs = ctx.get("bases", None)
    bases = [ctx.mor(r) for r in refs] if refs else [to_terminal(p.dst)]
    rows = []
    for b in bases:
        c = pullback_power_cube(i, p, b)
        rows.append({"certified": c.certified, "errors": list(c.errors)})
    return {"cubes": rows, "status": _all_pass([r["certified"] for r in rows])}


RUNNERS = {
    "validate": _validate,
    "search-lift": _search_lift,
    "solve": _solve,
    "construct": _construct,
    "transpose": _transpose,
    "approx-check": _approx_check,
    "witness": _witness,
    "interval-check": _interval_check,
    "cube-check": _cube_check,
}


def run_task(ws, task, budget_limit=None, bound=1, timing=False):
    """Run one task; budget overruns and bad inputs are reported, not raised."""
    limit = task.options.get("budget", budget_limit)
    bound = task.options.get("bound", bound)
    t0 = time.perf_counter()
    try:
        if limit is not None:
            with budget(limit):
                body = RUNNERS[task.kind](_Ctx(ws, task, bound))
        else:
            body = RUNNERS[task.kind](_Ctx(ws, task, bound))
    except BudgetExceeded as exc:
        body = {"status": BUDGET, "detail": str(exc)}
    except (TaskInputError, ShapeError, KeyError) as exc:
        body = {"status": ERROR, "detail": str(exc)}
    out = {"id": task.id, "kind": task.kind}
    out.update(body)
    if timing:
        out["seconds"] = round(time.perf_counter() - t0, 6)
    return out


def run_tasks(ws, budget_limit=None, bound=1, parallel=False, timing=False):
    """Run every task in order and return the report document."""
    if parallel and len(ws.tasks) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda t: run_task(ws, t, budget_limit, bound, timing),
                                    ws.tasks))
    else:
        results = [run_task(ws, t, budget_limit, bound, timing) for t in ws.tasks]
    counts = {}
    for r in results:
        counts[r["status"]] = counts.get(r["status"], 0) + 1
    return {"schema": REPORT_SCHEMA, "tasks": results,
            "summary": dict(sorted(counts.items()))}


def report_failed(report):
    return any(r["status"] in (FAIL, BUDGET, ERROR) for r in report["tasks"])


EXPLANATIONS = {
    "validate": "Checks that every presheaf's restriction tables are functorial and every "
                "map is natural.",
    "search-lift": "Enumerates the maps P' -> [V, E] over P, which are exactly the lifting "
                   "structures on the boundary, in canonical order.",
    "solve": "Solves every problem with the given parameter by classifying it into P' and "
             "composing with each structure, then checks the solutions and their "
             "uniformity over the bounded parameter universe.",
    "construct": "Builds a new structure as a composite of hom-object maps and compares it "
                 "with the pointwise solution formula on every bounded problem.",
    "construct:right_restrict": "Precomposes the internal map with P' -> P for a restriction "
                                "along q: B' -> B.",
    "construct:left_restrict": "Precomposes the internal map with P' -> P for a restriction "
                               "along j: V -> V'.",
    "construct:right_pullback": "Moves a structure restricted along q to one against the "
                                "pullback of p along q.",
    "construct:rebase_pullback": "Pulls a structure back along phi: D -> C, working on the "
                                 "category of elements.",
    "transpose": "Transposes every structure and back, checking both composites are the "
                 "identity and the transposed count matches.",
    "transpose:right-pullback": "Structures restricted along q correspond to structures "
                                "against the pulled-back map.",
    "transpose:leibniz": "Structures for a pushout-product approximation D -> V x L against "
                         "p correspond to structures for dV against the pullback-hom corner "
                         "map, restricted along the bottom corner.",
    "transpose:unrestricted": "The Leibniz correspondence followed by a pullback along the "
                              "pullback-hom square, giving an unrestricted target.",
    "transpose:path": "The Leibniz correspondence for an interval, landing against the "
                      "fibred path object P^I_B(E) -> E x_B E.",
    "approx-check": "Checks the comparison maps of a pushout-product approximation are "
                    "isomorphisms relative to p.",
    "witness": "Searches for, or constructs from a homotopy, an internal map P1' -> [V, R] "
               "relating two structures through a fibrewise relation R -> E x_B E.",
    "witness:diagonal": "Witnesses through the diagonal exist exactly when the two "
                        "structures agree on every problem.",
    "witness:path": "Witnesses through the fibred path object are right homotopies between "
                    "the two lifts.",
    "witness:construct": "Builds the witness from a homotopy D x I -> [V, E] between the two "
                         "composite lifts, found by search when not supplied.",
    "interval-check": "Checks the two points have an empty meet and [dI, B] is B x B via the "
                      "two points, relative to each listed object.",
    "cube-check": "Certifies the faces of the pullback-power cube for the fibred path object "
                  "by competing-cone enumeration.",
}


def explain(key):
    return EXPLANATIONS.get(key)
