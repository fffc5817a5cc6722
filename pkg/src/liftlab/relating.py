"""Fibrewise relations and structured witnesses between lifting structures.

A witness from ``F1`` to ``F2`` is an internal map ``H: P1' -> [V, R]``
out of the restricted-problem object of ``F1``, so it is uniform in the
problem for free.
"""
from __future__ import annotations

from dataclasses import dataclass

from .fincat import (BudgetExceeded, PshMor, Presheaf, ShapeError,
                     identity, iter_pshmors, to_terminal, _Counter)
from .leibniz import check_interval, endpoints, fibred_path, unit_exp
from .lifting.core import RIGHT
from .topos import (assoc, curry, exponential, hom_post, hom_pre, product, pullback, swap,
                    times, uncurry)
from .topos.slices import SliceObj, fibres


@dataclass(frozen=True)
class FibRel:
    p: PshMor
    R: Presheaf
    rel: PshMor

    def __post_init__(self):
        if self.rel.src != self.R or self.rel.dst != pullback(self.p, self.p).apex:
            raise ShapeError("relation is not a map into E x_B E")


def diagonal_relation(p):
    E = p.src
    return FibRel(p, E, pullback(p, p).pair({0: identity(E), 1: identity(E)}))


def path_relation(i, p):
    """The fibred path object of ``p`` with its endpoint evaluation."""
    cert = check_interval(i, [p.src, p.dst])
    if not cert.ok:
        raise ShapeError(f"interval certificate fails: {cert.condition}")
    pe, _, ends = endpoints(i, p)
    return FibRel(p, pe.apex, ends)


@dataclass(frozen=True)
class SpanMap:
    """``e: E1 -> E2`` over ``b: B1 -> B2``, with ``b2: B1' -> B2'`` on the restrictions."""

    e: PshMor
    b: PshMor
    b2: PshMor


def _restriction(bd):
    return bd.restr if bd.kind == RIGHT else identity(bd.B)


def _require_relatable(bd):
    if bd.kind != RIGHT and not bd.is_unrestricted:
        raise ShapeError("witnesses need right-restricted or unrestricted structures")


def span_errors(F1, F2, s):
    b1, b2 = F1.boundary, F2.boundary
    _require_relatable(b1)
    _require_relatable(b2)
    if b1.left != b2.left:
        return ["the structures are for different left maps"]
    errs = []
    if (s.e.src, s.e.dst) != (b1.E, b2.E) or (s.b.src, s.b.dst) != (b1.B, b2.B):
        return ["span map has the wrong endpoints"]
    if (s.b2.src, s.b2.dst) != (b1.bottom_dst, b2.bottom_dst):
        return ["span map has the wrong endpoints on the restrictions"]
    if b2.right @ s.e != s.b @ b1.right:
        errs.append("square on the right maps does not commute")
    if _restriction(b2) @ s.b2 != s.b @ _restriction(b1):
        errs.append("square on the restrictions does not commute")
    return errs


def identity_span(F):
    bd = F.boundary
    return SpanMap(identity(bd.E), identity(bd.B), identity(bd.bottom_dst))


def induced_problem_map(F1, F2, s):
    """``P1' -> P2'`` induced by the span map."""
    b1, b2 = F1.boundary, F2.boundary
    pr1, pr2 = b1.homs.Pr, b2.homs.Pr
    return pr2.pair({0: hom_post(b1.U, s.e) @ pr1.legs[0],
                     1: hom_post(b1.V, s.b2) @ pr1.legs[1]})


def _pair_into_exp(V, ee, m0, m1):
    """``X -> [V, E x_B E]`` from two maps ``X -> [V, E]`` over ``[V, B]``."""
    E = ee.nodes[0]
    x = m0.src
    joint = ee.pair({0: uncurry(m0, V, E), 1: uncurry(m1, V, E)})
    return curry(joint, x, V)


@dataclass(frozen=True)
class Witness:
    H: PshMor
    F1: object
    F2: object
    span: SpanMap
    relation: FibRel


def compared_lifts(F1, F2, s):
    """The two maps ``P1' -> [V, E2]`` a witness has to relate."""
    f0 = hom_post(F1.boundary.V, s.e) @ F1.internal
    f1 = F2.internal @ induced_problem_map(F1, F2, s)
    return f0, f1


def witness_target(F1, F2, s, r):
    V = F1.boundary.V
    f0, f1 = compared_lifts(F1, F2, s)
    return _pair_into_exp(V, pullback(r.p, r.p), f0, f1)


def witness_errors(w):
    errs = span_errors(w.F1, w.F2, w.span)
    if errs:
        return errs
    if w.relation.p != w.F2.boundary.right:
        return ["relation is not on the right map of the second structure"]
    V = w.F1.boundary.V
    if w.H.src != w.F1.boundary.homs.Pr.apex or w.H.dst != exponential(V, w.relation.R).exp:
        return ["H is not a map P1' -> [V, R]"]
    if hom_post(V, w.relation.rel) @ w.H != witness_target(w.F1, w.F2, w.span, w.relation):
        return ["H does not factor the pair of lifts through the relation"]
    return []


def check_witness(w):
    return not witness_errors(w)


@dataclass(frozen=True)
class WitnessSearch:
    witness: Witness | None
    visited: int
    exhausted: bool

    @property
    def found(self):
        return self.witness is not None


def search_witness(F1, F2, s, r, prune=True):
    """First witness in canonical order, or none with the number of candidates tried.

    With ``prune`` the candidates are restricted pointwise to the fibres of
    ``[V, rel]`` over the target; without it every map ``P1' -> [V, R]`` is
    enumerated and checked, so ``visited`` is the size of that hom-set when
    nothing is found.
    """
    errs = span_errors(F1, F2, s)
    if errs:
        raise ShapeError("; ".join(errs))
    V = F1.boundary.V
    src = F1.boundary.homs.Pr.apex
    dst = exponential(V, r.R).exp
    post = hom_post(V, r.rel)
    target = witness_target(F1, F2, s, r)
    allowed = _witness_fibres(post, target) if prune else None
    counter = _Counter()
    for h in iter_pshmors(src, dst, allowed=allowed, counter=counter):
        w = Witness(h, F1, F2, s, r)
        if post @ h == target:
            return WitnessSearch(w, counter.n, False)
    return WitnessSearch(None, counter.n, True)


def _witness_fibres(post, target):
    fib = fibres(SliceObj(post.src, post))
    return [[fib[c][y] for y in target.comps[c]] for c in range(post.base.n_objects)]


def all_witnesses(F1, F2, s, r):
    """Every witness, found by enumerating the fibres of ``[V, rel]`` over the target."""
    errs = span_errors(F1, F2, s)
    if errs:
        raise ShapeError("; ".join(errs))
    post = hom_post(F1.boundary.V, r.rel)
    target = witness_target(F1, F2, s, r)
    return [Witness(h, F1, F2, s, r)
            for h in iter_pshmors(target.src, post.src, allowed=_witness_fibres(post, target))]


# -- homotopy witnesses -----------------------------------------------------


class NoWitnessConstructed(RuntimeError):
    """The construction found no homotopy to build a witness from.

    This does not show that no witness exists.
    """


@dataclass(frozen=True)
class HomotopyData:
    """The data of the construction: ``d: D -> C`` and the two lifts ``f0, f1: D -> [V, E2]``."""

    D: Presheaf
    d: PshMor
    f0: PshMor
    f1: PshMor
    to_C: PshMor
    f: PshMor


def homotopy_data(F1, F2, s):
    errs = span_errors(F1, F2, s)
    if errs:
        raise ShapeError("; ".join(errs))
    b1, b2 = F1.boundary, F2.boundary
    h2 = b2.homs
    d = h2.restr_P @ induced_problem_map(F1, F2, s)
    f0, f1 = compared_lifts(F1, F2, s)
    return HomotopyData(b1.homs.Pr.apex, d, f0, f1, h2.to_P, h2.P.legs[1] @ d)


def _end(D, pt):
    """``D -> D x I`` at the point ``pt: 1 -> I``."""
    return product(D, pt.dst).pair(identity(D), pt @ to_terminal(D, pt.src))


def homotopy_errors(data, i, ell):
    """Named failures of ``ell: D x I -> [V, E2]`` as a homotopy from ``f0`` to ``f1`` over ``d``."""
    D, I = data.D, i.I
    if ell.src != product(D, I).apex or ell.dst != data.f0.dst:
        return ["ell is not a map D x I -> [V, E2]"]
    errs = []
    if ell @ _end(D, i.pt0) != data.f0:
        errs.append("ell . (D x pt0) = f0 fails")
    if ell @ _end(D, i.pt1) != data.f1:
        errs.append("ell . (D x pt1) = f1 fails")
    if data.to_C @ ell != data.d @ product(D, I).fst:
        errs.append("ell does not lie over d")
    return errs


def search_homotopy(data, i):
    """First ``ell`` in canonical order, or None when the search is exhausted."""
    D, I = data.D, i.I
    dI = product(D, I)
    tgt = data.f0.dst
    fib = fibres(SliceObj(tgt, data.to_C))
    over = data.d @ dI.fst
    allowed = [[list(fib[c][y]) for y in over.comps[c]] for c in range(D.base.n_objects)]
    for pt, f in ((i.pt0, data.f0), (i.pt1, data.f1)):
        end = _end(D, pt)
        for c in range(D.base.n_objects):
            for x, k in enumerate(end.comps[c]):
                want = f.comps[c][x]
                allowed[c][k] = [y for y in allowed[c][k] if y == want]
    for ell in iter_pshmors(dI.apex, tgt, allowed=allowed):
        return ell
    return None


def _reshuffle(D, V, I):
    """``(D x V) x I -> (D x I) x V``."""
    return (assoc(D, I, V).inverse() @ times(identity(D), swap(V, I)) @ assoc(D, V, I))


def construct_homotopy_witness(F1, F2, s, i, ell=None):
    """Build a path-object witness from a homotopy ``ell`` between the two lifts.

    Without ``ell`` one is searched for; if none is found the construction
    raises :class:`NoWitnessConstructed`.
    """
    data = homotopy_data(F1, F2, s)
    r = path_relation(i, F2.boundary.right)
    if ell is None:
        try:
            ell = search_homotopy(data, i)
        except BudgetExceeded as exc:
            raise NoWitnessConstructed(f"no witness constructible by this method: {exc}") from exc
        if ell is None:
            raise NoWitnessConstructed("no witness constructible by this method: "
                                       "no homotopy between the lifts")
    else:
        errs = homotopy_errors(data, i, ell)
        if errs:
            raise ShapeError("; ".join(errs))
    bd = F2.boundary
    V, E, B = F1.boundary.V, bd.E, bd.B
    D, I = data.D, i.I
    pe = fibred_path(I, bd.right)
    dv = product(D, V).apex
    along = uncurry(ell, V, E) @ _reshuffle(D, V, I)
    to_pe = pe.pair({0: uncurry(data.f, V, B), 1: curry(along, dv, I)})
    H = curry(to_pe, D, V)
    return Witness(H, F1, F2, s, r)


def endpoint_errors(w, i):
    """Check ``[V, ev_e] . H == f_e`` for both endpoints."""
    data = homotopy_data(w.F1, w.F2, w.span)
    V = w.F1.boundary.V
    E = w.relation.p.src
    pe = fibred_path(i.I, w.relation.p)
    errs = []
    for name, pt, f in (("0", i.pt0, data.f0), ("1", i.pt1, data.f1)):
        ev = unit_exp(E) @ hom_pre(pt, E) @ pe.legs[1]
        if hom_post(V, ev) @ w.H != f:
            errs.append(f"endpoint equation at {name} fails")
    return errs


def constant_homotopy(f, I):
    """``f . proj: D x I -> [V, E]``."""
    return f @ product(f.src, I).fst


__all__ = [
    "FibRel", "diagonal_relation", "path_relation", "SpanMap", "identity_span",
    "span_errors", "induced_problem_map", "Witness", "witness_errors", "check_witness",
    "WitnessSearch", "search_witness", "all_witnesses", "NoWitnessConstructed", "HomotopyData",
    "homotopy_data", "homotopy_errors", "search_homotopy", "construct_homotopy_witness",
    "endpoint_errors", "constant_homotopy",
]
