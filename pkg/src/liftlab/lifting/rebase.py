"""Moving lifting structures between slices and along pushforwards.

A structure in the slice over ``C`` is a structure on presheaves over the
category of elements of ``C`` (``boundary.ambient`` records ``C``).
Pulling back along ``phi: D -> C`` is restriction along the induced
discrete fibration and postcomposition is the sum over its fibres.
"""
from __future__ import annotations

from ..fincat import PshMor, ShapeError, identity
from ..topos import product, pullback, pushforward, times
from ..topos.elements import (el_map, el_projection, exp_restriction_comparison, frob_left,
                              to_el_mor)
from ..topos.slices import SliceMor, SliceObj, pullback_functor
from .core import (LEFT, LiftBoundary, LiftProblem, LiftStruct, left_restricted, solve,
                   unrestricted)
from .constructions import right_pullback, right_restrict


def slice_boundary(over, i, p, kind=LEFT, restr=None):
    """A boundary in the slice over ``over`` from slice maps ``i``, ``p``, ``restr``."""
    left, right = to_el_mor(i), to_el_mor(p)
    r = to_el_mor(restr) if restr is not None else identity(left.dst)
    return LiftBoundary(left, right, kind, r, over)


def _node_pairs(bd):
    return [(bd.U, bd.E), (bd.bottom_src, bd.bottom_dst), (bd.U, bd.B)]


def restrict_boundary(bd, fib, ambient):
    r = fib.restrict_mor
    return LiftBoundary(r(bd.left), r(bd.right), bd.kind, r(bd.restr), ambient)


def restrict_struct(F, fib, ambient):
    """Restrict a structure along a discrete fibration, transporting along
    the comparison isos ``F^*[a, b] ~ [F^*a, F^*b]``."""
    bd = F.boundary
    new = restrict_boundary(bd, fib, ambient)
    old_h, new_h = bd.homs, new.homs
    inv = [exp_restriction_comparison(fib, a, b).inverse() for a, b in _node_pairs(bd)]
    cmp_ve = exp_restriction_comparison(fib, bd.V, bd.E)
    comps = []
    for o in range(fib.a.n_objects):
        o2 = fib.obj_map[o]
        row = []
        for tup in new_h.Pr.elements[o]:
            old_t = tuple(inv[k].comps[o][tup[k]] for k in range(3))
            y = F.internal.comps[o2][old_h.Pr.index[o2][old_t]]
            row.append(cmp_ve.comps[o][y])
        comps.append(tuple(row))
    return LiftStruct(new, PshMor(new_h.Pr.apex, new_h.exp_VE.exp, tuple(comps)))


def rebase_pullback(F, phi):
    """Pull a structure in the slice over ``C`` back along ``phi: D -> C``."""
    bd = F.boundary
    if bd.ambient is None or phi.dst != bd.ambient:
        raise ShapeError("rebase_pullback: structure is not in the slice over phi's codomain")
    return restrict_struct(F, el_map(phi), phi.src)


def to_slice(F, over):
    """View a structure on the base category as one in the slice over ``over``.

    This is pulling back along ``over -> 1``.
    """
    if F.boundary.ambient is not None:
        raise ShapeError("to_slice expects a structure on the base category")
    return restrict_struct(F, el_projection(over), over)


def rebase_pullback_formula(F, phi, prob):
    """Solve a pulled-back problem by pushing its parameter forward along ``phi``."""
    bd = F.boundary
    fib = el_map(phi)
    x = prob.param
    sx = fib.sigma(x)
    u = _to_sum(fib, x, bd.U, prob.u, bd.E)
    v = _to_sum(fib, x, bd.bottom_src, prob.v, bd.bottom_dst)
    sol = solve(F, LiftProblem(sx, u, v))
    frob = fib.frobenius(x, bd.V)
    return fib.transpose(sol @ frob, product(x, fib.restrict(bd.V)).apex)


def _to_sum(fib, x, a, m, b):
    """From ``m: x x F^*a -> F^*b`` to ``F_!x x a -> b``."""
    frob = fib.frobenius(x, a)
    return fib.untranspose(m, b) @ frob.inverse()


def rebase_postcompose(F, p, e):
    """Push a structure in the slice over ``C`` forward along ``p: C -> D``.

    ``F`` must be against ``p^* e`` for a map ``e`` over ``D`` (given on
    elements of ``D``) and must be left-restricted or unrestricted.
    """
    bd = F.boundary
    if bd.ambient is None or p.src != bd.ambient:
        raise ShapeError("rebase_postcompose: structure is not in the slice over p's domain")
    if bd.kind != LEFT:
        raise ShapeError("rebase_postcompose supports left restrictions only")
    fib = el_map(p)
    if fib.restrict_mor(e) != bd.right:
        raise ShapeError("right map is not the pullback of the given map")
    new = left_restricted(fib.sigma_mor(bd.left), fib.sigma_mor(bd.restr), e, p.dst)
    return LiftStruct.from_solver(new, lambda prob: rebase_postcompose_formula(F, p, e, prob))


def rebase_postcompose_formula(F, p, e, prob):
    bd = F.boundary
    fib = el_map(p)
    x = prob.param
    rx = fib.restrict(x)
    u = fib.transpose(prob.u @ frob_left(fib, x, bd.U), product(rx, bd.U).apex)
    v = fib.transpose(prob.v @ frob_left(fib, x, bd.bottom_src), product(rx, bd.bottom_src).apex)
    sol = solve(F, LiftProblem(rx, u, v))
    return fib.untranspose(sol, e.src) @ frob_left(fib, x, bd.V).inverse()


# -- stability under pushforward --------------------------------------------


class PushforwardData:
    """``t_*(W x E) -> t_*(W x B)`` for ``t: W -> V`` and ``p: E -> B``."""

    def __init__(self, t, p):
        self.t, self.p = t, p
        W = t.src
        self.WE, self.WB = product(W, p.src), product(W, p.dst)
        self.xE = SliceObj(self.WE.apex, self.WE.fst)
        self.xB = SliceObj(self.WB.apex, self.WB.fst)
        self.pfE = pushforward(t, self.xE)
        self.pfB = pushforward(t, self.xB)
        wp = times(identity(W), p)
        comps = []
        for c, els in enumerate(self.pfE.elements):
            comps.append(tuple(self.pfB.index[c][(d, tuple(tuple(wp.comps[k][z] for z in sec[k])
                                                          for k in range(len(sec))))]
                               for d, sec in els))
        self.map = PshMor(self.pfE.obj.total, self.pfB.obj.total, tuple(comps))


def tc_boundary_right(t, p):
    return PushforwardData(t, p).map


def tc_pullback_stable(F, t, p):
    """From ``i`` against ``t_*(W x E) -> t_*(W x B)`` to ``t^* i`` against ``p``."""
    bd = F.boundary
    if not bd.is_unrestricted:
        raise ShapeError("tc_pullback_stable expects an unrestricted structure")
    data = PushforwardData(t, p)
    if bd.right != data.map or bd.V != t.dst:
        raise ShapeError("structure is not against the pushforward of p along t")
    tu = pullback_functor(t, SliceObj(bd.U, bd.left))
    new = unrestricted(tu.anchor, p, bd.ambient)
    return LiftStruct.from_solver(new, lambda prob: tc_pullback_stable_formula(F, t, p, prob, data))


def tc_pullback_stable_formula(F, t, p, prob, data=None):
    data = data or PushforwardData(t, p)
    bd = F.boundary
    x = prob.param
    U, V, W = bd.U, bd.V, t.src
    xu, xv = product(x, U), product(x, V)
    zu = SliceObj(xu.apex, bd.left @ xu.snd)
    zv = SliceObj(xv.apex, xv.snd)
    tzu, tzv = pullback(zu.anchor, t), pullback(zv.anchor, t)
    tU = pullback(bd.left, t)
    x_tu, x_w = product(x, tU.apex), product(x, W)
    base = x.base
    iso_u = PshMor(tzu.apex, x_tu.apex, tuple(
        tuple(divmod(a, U.sizes[c])[0] * tU.apex.sizes[c] + tU.index[c][(a % U.sizes[c], w, v)]
              for a, w, v in tzu.elements[c])
        for c in range(base.n_objects)))
    iso_v = PshMor(tzv.apex, x_w.apex, tuple(
        tuple((a // V.sizes[c]) * W.sizes[c] + w for a, w, _ in tzv.elements[c])
        for c in range(base.n_objects)))
    ti = tU.legs[1]
    u1 = data.WE.pair(ti @ x_tu.snd, prob.u) @ iso_u
    v1 = data.WB.pair(x_w.snd, prob.v) @ iso_v
    su = SliceObj(tzu.apex, tzu.legs[1])
    sv = SliceObj(tzv.apex, tzv.legs[1])
    ut = data.pfE.transpose(zu, SliceMor(su, data.xE, u1)).map
    vt = data.pfB.transpose(zv, SliceMor(sv, data.xB, v1)).map
    sol = solve(F, LiftProblem(x, ut, vt))
    back = data.pfE.untranspose(zv, SliceMor(zv, data.pfE.obj, sol)).map
    return data.WE.snd @ back @ iso_v.inverse()


def tc_pullback_pipeline(F, t, square):
    """Restrict, pull back along ``square``, then apply :func:`tc_pullback_stable`.

    ``F`` is a structure for ``i`` against ``p`` and ``square`` exhibits
    ``t_*(W x E) -> t_*(W x B)`` as a pullback of ``p``.
    """
    p = F.boundary.right
    G = right_pullback(right_restrict(F, square.q), square)
    return tc_pullback_stable(G, t, p)


def tc_pullback_stable_slice(F, t, p):
    """The same construction for a structure living in a slice."""
    if F.boundary.ambient is None:
        raise ShapeError("tc_pullback_stable_slice expects a structure in a slice")
    return tc_pullback_stable(F, t, p)
