"""Pushout-product approximation structures.

For boundary maps ``dV: dV_ -> V`` and ``dL: dL_ -> L`` and an object ``E``
the amalgamation object is

    Q(E) = [dV_ x L, E]  x_[dV_ x dL_, E]  [V x dL_, E].

A candidate ``D`` approximates the pushout-product relative to ``p: E -> B``
when there are isos ``Q(E) ~ [D, E]`` and ``Q(B) ~ [D, B]`` compatible with
``p`` and with the inclusion ``D -> V x L``.  Nothing here assumes that
``D`` is a pushout; :func:`canonical_approx` builds the genuine pushout and
is used as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

from .fincat import PshMor, Presheaf, ShapeError, identity, iter_pshmors
from .topos import (assoc, curry, exponential, hom_post, hom_pre, product, pullback,
                    pushout, times, uncurry)
from .topos.elements import el_map, el_projection, exp_restriction_comparison, frob_left
from .topos.slices import SliceObj, fibres


def q_object(dV, dL, e):
    """The limit ``Q(e)``; nodes are the three hom-objects in the order above."""
    a = hom_pre(times(identity(dV.src), dL), e)
    b = hom_pre(times(dV, identity(dL.src)), e)
    return pullback(a, b)


def q_map(dV, dL, p):
    """``Q(p): Q(E) -> Q(B)``."""
    qe, qb = q_object(dV, dL, p.src), q_object(dV, dL, p.dst)
    s1 = product(dV.src, dL.dst).apex
    s2 = product(dV.dst, dL.src).apex
    return qb.pair({0: hom_post(s1, p) @ qe.legs[0], 1: hom_post(s2, p) @ qe.legs[1]})


def restriction_to_q(dV, dL, b):
    """``[V x L, b] -> Q(b)`` restricting along both halves of the boundary."""
    qb = q_object(dV, dL, b)
    return qb.pair({0: hom_pre(times(dV, identity(dL.dst)), b),
                    1: hom_pre(times(identity(dV.dst), dL), b)})


@dataclass(frozen=True)
class BoundaryApprox:
    dV: PshMor
    dL: PshMor
    candidate: Presheaf
    target: Presheaf
    iso: PshMor
    inverse: PshMor


def boundary_approx_errors(b):
    errs = []
    q = q_object(b.dV, b.dL, b.target).apex
    de = exponential(b.candidate, b.target).exp
    if b.iso.src != q or b.iso.dst != de:
        return ["iso is not Q(E) -> [D, E]"]
    if b.inverse.src != de or b.inverse.dst != q:
        return ["inverse is not [D, E] -> Q(E)"]
    if b.inverse @ b.iso != identity(q):
        errs.append("inverse . iso is not the identity")
    if b.iso @ b.inverse != identity(de):
        errs.append("iso . inverse is not the identity")
    return errs


def check_boundary_approx(b):
    return not boundary_approx_errors(b)


@dataclass(frozen=True)
class ApproxStruct:
    approx_E: BoundaryApprox
    approx_B: BoundaryApprox
    incl: PshMor
    p: PshMor
    ambient: Presheaf | None = None

    @property
    def dV(self):
        return self.approx_E.dV

    @property
    def dL(self):
        return self.approx_E.dL

    @property
    def candidate(self):
        return self.approx_E.candidate


def pp_approx_errors(a):
    errs = []
    be, bb = a.approx_E, a.approx_B
    if (be.dV, be.dL, be.candidate) != (bb.dV, bb.dL, bb.candidate):
        return ["the two approximations have different boundaries or candidates"]
    if be.target != a.p.src or bb.target != a.p.dst:
        return ["approximations are not for the ends of p"]
    if a.incl.src != be.candidate or a.incl.dst != product(be.dV.dst, be.dL.dst).apex:
        return ["incl is not a map D -> V x L"]
    errs += ["E: " + e for e in boundary_approx_errors(be)]
    errs += ["B: " + e for e in boundary_approx_errors(bb)]
    if errs:
        return errs
    if hom_post(be.candidate, a.p) @ be.iso != bb.iso @ q_map(be.dV, be.dL, a.p):
        errs.append("p does not preserve the approximation isos")
    if bb.iso @ restriction_to_q(be.dV, be.dL, a.p.dst) != hom_pre(a.incl, a.p.dst):
        errs.append("incl does not realize the approximation of B")
    return errs


def check_pp_approx(a):
    return not pp_approx_errors(a)


# -- the genuine pushout ----------------------------------------------------


class PushoutProduct:
    """The pushout ``dV_ x L  +_{dV_ x dL_}  V x dL_`` and its map into ``V x L``."""

    def __init__(self, dV, dL):
        self.dV, self.dL = dV, dL
        f = times(identity(dV.src), dL)
        g = times(dV, identity(dL.src))
        self.colim = pushout(f, g)
        self.candidate = self.colim.apex
        self.incl = self.colim.copair({0: times(dV, identity(dL.dst)),
                                       1: times(identity(dV.dst), dL)})

    def approx(self, e):
        dV, dL = self.dV, self.dL
        q = q_object(dV, dL, e)
        col = self.colim
        exps = [exponential(n, e) for n in col.nodes]
        qd = product(q.apex, self.candidate)
        comps = []
        for c in range(self.candidate.base.n_objects):
            row = []
            for t in q.elements[c]:
                for k in range(self.candidate.sizes[c]):
                    node, x = col.representative(c, k)
                    row.append(exps[node].apply(c, t[node], x))
            comps.append(tuple(row))
        m = PshMor(qd.apex, e, tuple(comps))
        iso = curry(m, q.apex, self.candidate)
        inv = q.pair({0: hom_pre(col.legs[0], e), 1: hom_pre(col.legs[1], e)})
        return BoundaryApprox(dV, dL, self.candidate, e, iso, inv)


def canonical_approx(dV, dL, p, ambient=None):
    pp = PushoutProduct(dV, dL)
    return ApproxStruct(pp.approx(p.src), pp.approx(p.dst), pp.incl, p, ambient)


# -- stability --------------------------------------------------------------


def _restricted_approx(fib, b):
    """Transport a boundary approximation along restriction by ``fib``."""
    r = fib.restrict_mor
    dV, dL = r(b.dV), r(b.dL)
    cand, tgt = fib.restrict(b.candidate), fib.restrict(b.target)
    q_old = q_object(b.dV, b.dL, b.target)
    q_new = q_object(dV, dL, tgt)
    pairs = [(product(b.dV.src, b.dL.dst).apex, b.target),
             (product(b.dV.dst, b.dL.src).apex, b.target),
             (product(b.dV.src, b.dL.src).apex, b.target)]
    cmps = [exp_restriction_comparison(fib, a, e) for a, e in pairs]
    invs = [m.inverse() for m in cmps]
    cmp_d = exp_restriction_comparison(fib, b.candidate, b.target)
    inv_d = cmp_d.inverse()
    iso_rows, inv_rows = [], []
    for o in range(fib.a.n_objects):
        o2 = fib.obj_map[o]
        iso_rows.append(tuple(
            cmp_d.comps[o][b.iso.comps[o2][q_old.index[o2][tuple(invs[k].comps[o][t[k]] for k in range(3))]]]
            for t in q_new.elements[o]))
        row = []
        for y in range(exponential(cand, tgt).exp.sizes[o]):
            old_t = q_old.elements[o2][b.inverse.comps[o2][inv_d.comps[o][y]]]
            row.append(q_new.index[o][tuple(cmps[k].comps[o][old_t[k]] for k in range(3))])
        inv_rows.append(tuple(row))
    de = exponential(cand, tgt).exp
    return BoundaryApprox(dV, dL, cand, tgt, PshMor(q_new.apex, de, tuple(iso_rows)),
                          PshMor(de, q_new.apex, tuple(inv_rows)))


def approx_pullback(a, phi):
    """Pull an approximation structure in the slice over ``C`` back along ``phi``."""
    if a.ambient is None or phi.dst != a.ambient:
        raise ShapeError("approx_pullback: structure is not in the slice over phi's codomain")
    fib = el_map(phi)
    return ApproxStruct(_restricted_approx(fib, a.approx_E), _restricted_approx(fib, a.approx_B),
                        fib.restrict_mor(a.incl), fib.restrict_mor(a.p), phi.src)


def approx_to_slice(a, over):
    """View an approximation structure on the base category in the slice over ``over``."""
    if a.ambient is not None:
        raise ShapeError("approx_to_slice expects a structure on the base category")
    fib = el_projection(over)
    return ApproxStruct(_restricted_approx(fib, a.approx_E), _restricted_approx(fib, a.approx_B),
                        fib.restrict_mor(a.incl), fib.restrict_mor(a.p), over)


def _postcomposed_approx(fib, b, dJ, e):
    """The approximation for ``(F_! dV) x (dJ)`` relative to ``e`` inherited from ``b``."""
    dV = b.dV
    sdV = fib.sigma_mor(dV)
    dL_old = b.dL
    q_new = q_object(sdV, dJ, e)
    q_old = q_object(dV, dL_old, b.target)
    sD = fib.sigma(b.candidate)
    halves_old = [product(dV.src, dL_old.dst).apex, product(dV.dst, dL_old.src).apex]
    halves_new = [product(sdV.src, dJ.dst).apex, product(sdV.dst, dJ.src).apex]
    frobs = [fib.frobenius(dV.src, dJ.dst), fib.frobenius(dV.dst, dJ.src)]
    re = fib.restrict(e)

    def to_old(y, legs):
        """From maps ``y -> [half_new, e]`` to ``F^* y -> Q_old``."""
        ry = fib.restrict(y)
        parts = {}
        for k in (0, 1):
            m = uncurry(legs[k], halves_new[k], e)
            m = m @ times(identity(y), frobs[k]) @ frob_left(fib, y, halves_old[k])
            m = fib.transpose(m, product(ry, halves_old[k]).apex)
            parts[k] = curry(m, ry, halves_old[k])
        return q_old.pair(parts)

    def from_old(y, m_old):
        """From ``F^* y -> [D, F^* e]`` to ``y -> [F_! D, e]``."""
        m = uncurry(m_old, b.candidate, re)
        m = fib.untranspose(m, e) @ frob_left(fib, y, b.candidate).inverse()
        return curry(m, y, sD)

    y = q_new.apex
    iso = from_old(y, b.iso @ to_old(y, q_new.legs))
    y2 = exponential(sD, e).exp
    ry2 = fib.restrict(y2)
    m = exponential(sD, e).ev @ frob_left(fib, y2, b.candidate)
    m = fib.transpose(m, product(ry2, b.candidate).apex)
    back = b.inverse @ curry(m, ry2, b.candidate)
    parts = {}
    for k in (0, 1):
        leg = uncurry(q_old.legs[k] @ back, halves_old[k], re)
        leg = fib.untranspose(leg, e) @ frob_left(fib, y2, halves_old[k]).inverse()
        leg = leg @ times(identity(y2), frobs[k].inverse())
        parts[k] = curry(leg, y2, halves_new[k])
    inv = q_new.pair(parts)
    return BoundaryApprox(sdV, dJ, sD, e, iso, inv)


def approx_postcompose(a, p, dJ, e):
    """Push an approximation structure forward along ``p: C -> D``.

    ``a`` lives in the slice over ``C`` for ``dV`` and ``p^* dJ`` relative to
    ``p^* e``; ``dJ`` and ``e`` are given on elements of ``D``.
    """
    if a.ambient is None or p.src != a.ambient:
        raise ShapeError("approx_postcompose: structure is not in the slice over p's domain")
    fib = el_map(p)
    if fib.restrict_mor(dJ) != a.dL or fib.restrict_mor(e) != a.p:
        raise ShapeError("approx_postcompose: structure is not pulled back from the given maps")
    ae = _postcomposed_approx(fib, a.approx_E, dJ, e.src)
    ab = _postcomposed_approx(fib, a.approx_B, dJ, e.dst)
    incl = fib.frobenius(a.dV.dst, dJ.dst) @ fib.sigma_mor(a.incl)
    return ApproxStruct(ae, ab, incl, e, p.dst)


# -- deciding whether a candidate approximates -----------------------------


def approximates(dV, dL, incl, p):
    """Whether some pair of isos makes ``incl`` an approximation relative to ``p``.

    Searches isos ``Q(B) -> [D, B]`` fixed on the image of ``[V x L, B]``
    and, for each, an iso ``Q(E) -> [D, E]`` over it.  Returns True, False,
    or raises :class:`BudgetExceeded`.
    """
    cand = incl.src
    e, b = p.src, p.dst
    qb, qe = q_object(dV, dL, b).apex, q_object(dV, dL, e).apex
    db, de = exponential(cand, b).exp, exponential(cand, e).exp
    if qb.sizes != db.sizes or qe.sizes != de.sizes:
        return False
    res = restriction_to_q(dV, dL, b)
    pre = hom_pre(incl, b)
    base = cand.base
    allowed_b = [[None] * qb.sizes[c] for c in range(base.n_objects)]
    for c in range(base.n_objects):
        for g, q in enumerate(res.comps[c]):
            want = pre.comps[c][g]
            cur = allowed_b[c][q]
            if cur is not None and cur != (want,):
                return False
            allowed_b[c][q] = (want,)
    qp = q_map(dV, dL, p)
    fib = fibres(SliceObj(de, hom_post(cand, p)))
    for sb in iter_pshmors(qb, db, allowed=allowed_b, injective=True):
        target = sb @ qp
        allowed_e = [[fib[c][y] for y in target.comps[c]] for c in range(base.n_objects)]
        for _ in iter_pshmors(qe, de, allowed=allowed_e, injective=True):
            return True
    return False


def assoc_transfer(aUV, aVW, incl, p):
    """Decide both readings of an approximation of a triple pushout-product.

    ``incl: K -> U x (V x W)``.  Returns the pair of answers and asserts
    that they agree.
    """
    dU, dV = aUV.dV, aUV.dL
    dW = aVW.dL
    if aVW.dV != dV:
        raise ShapeError("the two approximations do not share the middle map")
    U, V, W = dU.dst, dV.dst, dW.dst
    first = approximates(dU, aVW.incl, incl, p)
    second_incl = assoc(U, V, W).inverse() @ incl
    second = approximates(aUV.incl, dW, second_incl, p)
    assert first == second, "approximation of a triple pushout-product depends on the bracketing"
    return first, second

