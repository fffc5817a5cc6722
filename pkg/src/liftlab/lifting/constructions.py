"""Restricting and composing lifting structures.

Each construction builds the new internal map as a composite of maps
between hom-objects.  The matching ``*_formula`` function computes the
same solution pointwise from solutions of the input structures; tests
compare the two on every bounded problem.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..fincat import PshMor, ShapeError, compose, identity
from ..topos import curry, hom_post, hom_pre, pullback, times, uncurry
from .core import (LEFT, RIGHT, LiftProblem, LiftStruct, left_restricted,
                   right_restricted, solve, unrestricted)


def _require_unrestricted(F, name):
    if not F.boundary.is_unrestricted:
        raise ShapeError(f"{name} expects an unrestricted structure")


def _x_times(x, m):
    return times(identity(x), m)


# -- restricting on the right ------------------------------------------------


def right_restrict(F, q):
    """Restrict an unrestricted structure along ``q: B' -> B``."""
    _require_unrestricted(F, "right_restrict")
    bd = F.boundary
    new = right_restricted(bd.left, bd.right, q, bd.ambient)
    return LiftStruct(new, F.internal @ new.homs.restr_P)


def right_restrict_formula(F, q, prob):
    return solve(F, LiftProblem(prob.param, prob.u, q @ prob.v))


@dataclass(frozen=True)
class PullbackSquare:
    """A square ``top: E' -> E`` over ``q: B' -> B`` with ``side: E' -> B'``."""

    side: PshMor
    top: PshMor
    q: PshMor
    p: PshMor

    def comparison(self):
        """The map ``E' -> B' x_B E``; an iso exactly when the square is a pullback."""
        pb = pullback(self.q, self.p)
        return pb, pb.pair({0: self.side, 1: self.top})

    def check(self):
        if self.p @ self.top != self.q @ self.side:
            raise ShapeError("square does not commute")
        _, cmp = self.comparison()
        if not cmp.is_iso():
            raise ShapeError("square is not a pullback")
        return cmp

    def into_corner(self, to_b, to_e):
        """The map into ``E'`` induced by ``to_b`` into ``B'`` and ``to_e`` into ``E``."""
        pb, cmp = self.comparison()
        return cmp.inverse() @ pb.pair({0: to_b, 1: to_e})


def right_pullback(F, square):
    """From a structure right-restricted along ``q`` to one against the pulled-back map."""
    bd = F.boundary
    if bd.kind != RIGHT or bd.restr != square.q or bd.right != square.p:
        raise ShapeError("right_pullback expects a structure restricted along the square's q")
    square.check()
    new = unrestricted(bd.left, square.side, bd.ambient)
    hn = new.homs
    U, V = bd.U, bd.V
    to_old = bd.homs.Pr.pair({0: hom_post(U, square.top) @ hn.Pr.legs[0], 1: hn.Pr.legs[1]})
    s = F.internal @ to_old
    x = hn.Pr.apex
    w = uncurry(hn.Pr.legs[1], V, square.q.src)
    e = uncurry(s, V, bd.E)
    return LiftStruct(new, curry(square.into_corner(w, e), x, V))


def right_pullback_formula(F, square, prob):
    x = prob.param
    sol = solve(F, LiftProblem(x, square.top @ prob.u, prob.v))
    return square.into_corner(prob.v, sol)


def right_pullback_inv(G, square):
    """Inverse of :func:`right_pullback`."""
    bd = G.boundary
    _require_unrestricted(G, "right_pullback_inv")
    if bd.right != square.side:
        raise ShapeError("structure is not against the square's side")
    square.check()
    new = right_restricted(bd.left, square.p, square.q, bd.ambient)
    hn = new.homs
    U, V = bd.U, bd.V
    x = hn.Pr.apex
    w_u = uncurry(hom_pre(bd.left, square.q.src) @ hn.Pr.legs[1], U, square.q.src)
    a_u = uncurry(hn.Pr.legs[0], U, square.p.src)
    corner = curry(square.into_corner(w_u, a_u), x, U)
    to_g = bd.homs.Pr.pair({0: corner, 1: hn.Pr.legs[1]})
    return LiftStruct(new, hom_post(V, square.top) @ G.internal @ to_g)


def right_pullback_inv_formula(G, square, prob):
    bd = G.boundary
    x = prob.param
    u2 = square.into_corner(prob.v @ _x_times(x, bd.left), prob.u)
    return square.top @ solve(G, LiftProblem(x, u2, prob.v))


def right_compose(Fp, F):
    """Compose a structure against ``p': E' -> E`` with one against ``p: E -> B``."""
    _require_unrestricted(Fp, "right_compose")
    _require_unrestricted(F, "right_compose")
    bp, bd = Fp.boundary, F.boundary
    if bp.left != bd.left or bp.right.dst != bd.right.src:
        raise ShapeError("right_compose: boundaries do not match")
    new = unrestricted(bd.left, compose(bd.right, bp.right), bd.ambient)
    hn = new.homs
    U = bd.U
    a, w = hn.Pr.legs[0], hn.Pr.legs[1]
    e = F.internal @ bd.homs.Pr.pair({0: hom_post(U, bp.right) @ a, 1: w})
    s = Fp.internal @ bp.homs.Pr.pair({0: a, 1: e})
    return LiftStruct(new, s)


def right_compose_formula(Fp, F, prob):
    x = prob.param
    mid = solve(F, LiftProblem(x, Fp.boundary.right @ prob.u, prob.v))
    return solve(Fp, LiftProblem(x, prob.u, mid))


# -- restricting on the left -------------------------------------------------


def left_restrict(F, j):
    """Restrict an unrestricted structure along ``j: V -> V'``."""
    _require_unrestricted(F, "left_restrict")
    bd = F.boundary
    new = left_restricted(bd.left, j, bd.right, bd.ambient)
    return LiftStruct(new, F.internal @ new.homs.restr_P)


def left_restrict_formula(F, j, prob):
    x = prob.param
    return solve(F, LiftProblem(x, prob.u, prob.v @ _x_times(x, j)))


def left_compose(Fp, F):
    """Compose a structure for ``i': U' -> U`` with one for ``i: U -> V``."""
    _require_unrestricted(Fp, "left_compose")
    _require_unrestricted(F, "left_compose")
    bp, bd = Fp.boundary, F.boundary
    if bp.left.dst != bd.left.src or bp.right != bd.right:
        raise ShapeError("left_compose: boundaries do not match")
    new = unrestricted(compose(bd.left, bp.left), bd.right, bd.ambient)
    hn = new.homs
    a0, w = hn.Pr.legs[0], hn.Pr.legs[1]
    a = Fp.internal @ bp.homs.Pr.pair({0: a0, 1: hom_pre(bd.left, bd.B) @ w})
    s = F.internal @ bd.homs.Pr.pair({0: a, 1: w})
    return LiftStruct(new, s)


def left_compose_formula(Fp, F, prob):
    x = prob.param
    bd = F.boundary
    mid = solve(Fp, LiftProblem(x, prob.u, prob.v @ _x_times(x, bd.left)))
    return solve(F, LiftProblem(x, mid, prob.v))


@dataclass(frozen=True)
class RetractData:
    """A retract of ``U -> V -> V'`` onto ``U0 -> V0 -> V0'``.

    Sections ``m, s, s2`` go into the big diagram and retractions ``n, r, r2``
    come back out.
    """

    i0: PshMor
    j0: PshMor
    m: PshMor
    n: PshMor
    s: PshMor
    r: PshMor
    s2: PshMor
    r2: PshMor

    def errors(self, i, j):
        errs = []
        for sec, ret, name in ((self.m, self.n, "U"), (self.s, self.r, "V"), (self.s2, self.r2, "V'")):
            if ret @ sec != identity(sec.src):
                errs.append(f"retraction identity fails on {name}")
        checks = [
            (i @ self.m, self.s @ self.i0, "section square on i"),
            (self.i0 @ self.n, self.r @ i, "retraction square on i"),
            (j @ self.s, self.s2 @ self.j0, "section square on j"),
            (self.j0 @ self.r, self.r2 @ j, "retraction square on j"),
        ]
        for lhs, rhs, name in checks:
            if lhs != rhs:
                errs.append(name + " does not commute")
        return errs


def left_retract(F, rd):
    """Transfer a left-restricted structure to a retract of its left maps."""
    bd = F.boundary
    if bd.kind != LEFT:
        raise ShapeError("left_retract expects a left-restricted structure")
    errs = rd.errors(bd.left, bd.restr)
    if errs:
        raise ShapeError("; ".join(errs))
    new = left_restricted(rd.i0, rd.j0, bd.right, bd.ambient)
    hn = new.homs
    to_old = bd.homs.Pr.pair({0: hom_pre(rd.n, bd.E) @ hn.Pr.legs[0],
                              1: hom_pre(rd.r2, bd.B) @ hn.Pr.legs[1]})
    return LiftStruct(new, hom_pre(rd.s, bd.E) @ F.internal @ to_old)


def left_retract_formula(F, rd, prob):
    x = prob.param
    big = LiftProblem(x, prob.u @ _x_times(x, rd.n), prob.v @ _x_times(x, rd.r2))
    return solve(F, big) @ _x_times(x, rd.s)
