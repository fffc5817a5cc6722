"""Lifting boundaries, problems and lifting structures.

A lifting structure for ``i: U -> V`` against ``p: E -> B`` is stored as its
internal map ``P' -> [V, E]`` over ``P = [U,E] x_[U,B] [V,B]``.  The object
``P'`` depends on the restriction:

* left-restricted along ``j: V -> V'``: ``P' = [U,E] x_[U,B] [V',B]``;
* right-restricted along ``q: B' -> B``: ``P' = [U,E] x_[U,B] [V,B']``;
* unrestricted: left-restricted with ``j`` the identity, so ``P' == P``.

A problem with parameter ``X`` is a pair ``(u, v)`` of maps
``u: X x U -> E`` and ``v: X x V' -> B`` (left) or ``v: X x V -> B'``
(right); its solutions are maps ``X x V -> E``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from ..fincat import (PshMor, Presheaf, ShapeError, compose, enumerate_pshmors,
                      identity, iter_pshmors, validate_pshmor)
from ..topos import (curry, exponential, hom_map, hom_post, hom_pre, product,
                     pullback, times, uncurry)
from ..topos.slices import SliceObj, fibres

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class LiftBoundary:
    left: PshMor
    right: PshMor
    kind: str
    restr: PshMor
    ambient: Presheaf | None = None

    def __post_init__(self):
        base = self.left.base
        for m in (self.right, self.restr):
            if m.base != base:
                raise ShapeError("boundary maps live over different categories")
        if self.kind == LEFT and self.restr.src != self.left.dst:
            raise ShapeError("left restriction must start at V")
        if self.kind == RIGHT and self.restr.dst != self.right.dst:
            raise ShapeError("right restriction must end at B")
        if self.kind not in (LEFT, RIGHT):
            raise ShapeError(f"unknown restriction kind {self.kind!r}")

    @property
    def base(self):
        return self.left.base

    @property
    def U(self):
        return self.left.src

    @property
    def V(self):
        return self.left.dst

    @property
    def E(self):
        return self.right.src

    @property
    def B(self):
        return self.right.dst

    @property
    def bottom_src(self):
        """``V'`` for a left restriction, ``V`` otherwise."""
        return self.restr.dst if self.kind == LEFT else self.V

    @property
    def bottom_dst(self):
        """``B'`` for a right restriction, ``B`` otherwise."""
        return self.restr.src if self.kind == RIGHT else self.B

    @property
    def is_unrestricted(self):
        return self.kind == LEFT and self.restr == identity(self.V)

    def describe(self):
        tag = {LEFT: "left-restricted", RIGHT: "right-restricted"}[self.kind]
        if self.is_unrestricted:
            tag = "unrestricted"
        return f"{tag} boundary U{self.U.sizes} -> V{self.V.sizes} against E{self.E.sizes} -> B{self.B.sizes}"

    @cached_property
    def homs(self):
        return HomData(self)


def unrestricted(i, p, ambient=None):
    return LiftBoundary(i, p, LEFT, identity(i.dst), ambient)


def left_restricted(i, j, p, ambient=None):
    return LiftBoundary(i, p, LEFT, j, ambient)


def right_restricted(i, p, q, ambient=None):
    return LiftBoundary(i, p, RIGHT, q, ambient)


class HomData:
    """The hom-objects and comparison maps attached to a boundary."""

    def __init__(self, bd):
        i, p = bd.left, bd.right
        U, V, E, B = bd.U, bd.V, bd.E, bd.B
        self.exp_UE = exponential(U, E)
        self.exp_VE = exponential(V, E)
        self.exp_bottom = exponential(bd.bottom_src, bd.bottom_dst)
        self.post_U = hom_post(U, p)
        self.P = pullback(self.post_U, hom_pre(i, B))
        if bd.kind == LEFT:
            corner = hom_pre(compose(bd.restr, i), B)
        else:
            corner = hom_map(i, bd.restr)
        self.Pr = pullback(self.post_U, corner)
        self.to_P = self.P.pair({0: hom_pre(i, E), 1: hom_post(V, p)})
        if bd.kind == LEFT:
            w = hom_pre(bd.restr, B) @ self.Pr.legs[1]
        else:
            w = hom_post(V, bd.restr) @ self.Pr.legs[1]
        self.restr_P = self.P.pair({0: self.Pr.legs[0], 1: w})

    @property
    def problems_object(self):
        return self.Pr.apex

    @property
    def fillers_object(self):
        return self.exp_VE.exp


@dataclass(frozen=True)
class LiftProblem:
    param: Presheaf
    u: PshMor
    v: PshMor


def problem_errors(bd, prob):
    x = prob.param
    errs = []
    if prob.u.src != product(x, bd.U).apex or prob.u.dst != bd.E:
        errs.append("u is not a map X x U -> E")
    if prob.v.src != product(x, bd.bottom_src).apex or prob.v.dst != bd.bottom_dst:
        errs.append("v has the wrong shape for this restriction")
    if errs:
        return errs
    if bd.right @ prob.u != _bottom_on_U(bd, prob.v, x):
        errs.append("problem square does not commute")
    return errs


def _bottom_on_U(bd, v, x):
    """The composite ``X x U -> B`` determined by ``v``."""
    if bd.kind == LEFT:
        return v @ times(identity(x), compose(bd.restr, bd.left))
    return bd.restr @ v @ times(identity(x), bd.left)


def _bottom_on_V(bd, v, x):
    """The composite ``X x V -> B`` determined by ``v``."""
    if bd.kind == LEFT:
        return v @ times(identity(x), bd.restr)
    return bd.restr @ v


def solution_errors(bd, prob, sol):
    x = prob.param
    if sol.src != product(x, bd.V).apex or sol.dst != bd.E:
        return ["solution is not a map X x V -> E"]
    errs = []
    if sol @ times(identity(x), bd.left) != prob.u:
        errs.append("upper triangle fails")
    if bd.right @ sol != _bottom_on_V(bd, prob.v, x):
        errs.append("lower triangle fails")
    return errs


def is_solution(bd, prob, sol):
    return not solution_errors(bd, prob, sol)


def reindex(bd, prob, t):
    """Pull a problem with parameter ``X`` back along ``t: Y -> X``."""
    if t.dst != prob.param:
        raise ShapeError("reindexing map does not end at the parameter")
    return LiftProblem(t.src, prob.u @ times(t, identity(bd.U)),
                       prob.v @ times(t, identity(bd.bottom_src)))


def reindex_solution(bd, sol, t):
    return sol @ times(t, identity(bd.V))


def classify(bd, prob):
    """The classifying map ``X -> P'`` of a problem."""
    h = bd.homs
    x = prob.param
    return h.Pr.pair({0: curry(prob.u, x, bd.U), 1: curry(prob.v, x, bd.bottom_src)})


def declassify(bd, chi):
    h = bd.homs
    u = uncurry(h.Pr.legs[0] @ chi, bd.U, bd.E)
    v = uncurry(h.Pr.legs[1] @ chi, bd.bottom_src, bd.bottom_dst)
    return LiftProblem(chi.src, u, v)


def generic_problem(bd):
    return declassify(bd, identity(bd.homs.Pr.apex))


def enumerate_problems(bd, x):
    """Every problem with parameter ``x``, by direct enumeration of ``(u, v)``."""
    xu = product(x, bd.U).apex
    xv = product(x, bd.bottom_src).apex
    fib_p = fibres(SliceObj(bd.E, bd.right))
    out = []
    for v in enumerate_pshmors(xv, bd.bottom_dst):
        below = _bottom_on_U(bd, v, x)
        allowed = [[fib_p[c][b] for b in below.comps[c]] for c in range(x.base.n_objects)]
        for u in enumerate_pshmors(xu, bd.E, allowed=allowed):
            out.append(LiftProblem(x, u, v))
    return out


@dataclass(frozen=True)
class LiftStruct:
    boundary: LiftBoundary
    internal: PshMor

    def __post_init__(self):
        h = self.boundary.homs
        if self.internal.src != h.Pr.apex or self.internal.dst != h.exp_VE.exp:
            raise ShapeError("internal map is not P' -> [V, E]")
        if h.to_P @ self.internal != h.restr_P:
            raise ShapeError("internal map is not a map over P")

    def solve(self, prob):
        return solve(self, prob)

    @classmethod
    def from_solver(cls, bd, solver):
        """Build a structure from a pointwise solver via the generic problem."""
        gp = generic_problem(bd)
        sol = solver(gp)
        errs = solution_errors(bd, gp, sol)
        if errs:
            raise ShapeError("solver does not solve the generic problem: " + "; ".join(errs))
        return cls(bd, curry(sol, gp.param, bd.V))


def solve(F, prob):
    bd = F.boundary
    return uncurry(F.internal @ classify(bd, prob), bd.V, bd.E)


def search_lift_struct(bd, limit=None):
    """All lifting structures on a boundary, in canonical order."""
    h = bd.homs
    fib = fibres(SliceObj(h.exp_VE.exp, h.to_P))
    allowed = [[fib[c][y] for y in h.restr_P.comps[c]] for c in range(bd.base.n_objects)]
    out = []
    for m in iter_pshmors(h.Pr.apex, h.exp_VE.exp, allowed=allowed):
        out.append(LiftStruct(bd, m))
        if limit is not None and len(out) >= limit:
            break
    return out


def count_sections_independently(bd):
    """Count sections of ``P' x_P [V,E] -> P'`` by generate-and-filter.

    For each element of ``P'`` a point of the pullback's fibre over it is
    chosen independently (a plain cartesian product), and the resulting
    family is kept when it is natural.  This does not use the backtracking
    enumerator behind :func:`search_lift_struct`.
    """
    h = bd.homs
    q = pullback(h.restr_P, h.to_P)
    base = bd.base
    pr = h.Pr.apex
    fib = fibres(SliceObj(q.apex, q.legs[0]))
    slots = [(c, x) for c in range(base.n_objects) for x in range(pr.sizes[c])]
    count = 0
    for choice in itertools.product(*(fib[c][x] for c, x in slots)):
        comps = [[] for _ in range(base.n_objects)]
        for (c, _), y in zip(slots, choice):
            comps[c].append(y)
        m = PshMor(pr, q.apex, tuple(tuple(t) for t in comps))
        if not validate_pshmor(m):
            count += 1
    return count


def family_violation(bd, family, params):
    """First failure of a family of solutions over ``params``, or None.

    ``family`` is a callable taking a problem or a mapping from problems to
    solutions.  Checks that every solution solves its problem and that the
    family commutes with reindexing along every map between parameters.
    """
    get = family if callable(family) else family.__getitem__
    probs = {}
    for x in params:
        probs[x] = enumerate_problems(bd, x)
        for prob in probs[x]:
            errs = solution_errors(bd, prob, get(prob))
            if errs:
                return ("not a solution", prob, errs)
    for x in params:
        for y in params:
            for t in enumerate_pshmors(y, x):
                for prob in probs[x]:
                    lhs = get(reindex(bd, prob, t))
                    rhs = reindex_solution(bd, get(prob), t)
                    if lhs != rhs:
                        return ("not uniform", prob, t)
    return None


def verify_family(bd, family, params):
    return family_violation(bd, family, params) is None


def uniformity_check(F, params):
    return verify_family(F.boundary, lambda prob: solve(F, prob), params)


def family_from_struct(F):
    return lambda prob: solve(F, prob)
