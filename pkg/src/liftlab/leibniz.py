"""Leibniz transposes of lifting structures, interval objects and path objects.

For ``dV: dV_ -> V``, ``dL: dL_ -> L``, ``l: L -> L2`` and ``p: E -> Eb`` we
use the corners

    restricted  Cr = [dL_, E] x_[dL_, Eb] [L2, Eb]
    plain       Cn = [dL_, E] x_[dL_, Eb] [L, Eb]

and the pullback-power ``k: [L, E] -> Cn``.  A structure for an
approximation ``D -> V x L`` left-restricted along ``V x l`` against ``p``
corresponds to a structure for ``dV`` against ``k`` right-restricted along
``Cr -> Cn``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import (PshMor, Presheaf, ShapeError, identity, terminal_presheaf,
                     to_terminal, yoneda)
from .lifting.constructions import (PullbackSquare, right_pullback, right_pullback_inv,
                                    right_restrict)
from .lifting.core import (LEFT, LiftProblem, LiftStruct, left_restricted, right_restricted,
                          solve)
from .ppapprox import check_pp_approx, pp_approx_errors, q_object
from .topos import (assoc, certify_limit, const_map, coproduct, curry, exponential,
                    finite_limit, hom_post, hom_pre, product, pullback, times, uncurry)
from .topos.elements import el_projection, exp_restriction_comparison, from_el, to_el
from .topos.iso import find_slice_iso
from .topos.slices import SliceObj


def representables(base):
    return [yoneda(base, c) for c in range(base.n_objects)]


def unit_exp(b):
    """The iso ``[1, b] -> b``."""
    one = terminal_presheaf(b.base)
    ex = exponential(one, b)
    return ex.ev @ product(ex.exp, one).pair(identity(ex.exp), to_terminal(ex.exp, one))


def unit_exp_inv(b):
    return const_map(b, terminal_presheaf(b.base))


# -- corners and the pullback-hom square ------------------------------------


class Corners:
    """The objects and maps on the right-hand side of a Leibniz transpose."""

    def __init__(self, dL, l, p):
        if l.src != dL.dst:
            raise ShapeError("l must start at the codomain of dL")
        E, Eb = p.src, p.dst
        self.dL, self.l, self.p = dL, l, p
        self.post = hom_post(dL.src, p)
        self.Cr = pullback(self.post, hom_pre(l @ dL, Eb))
        self.Cn = pullback(self.post, hom_pre(dL, Eb))
        self.k = self.Cn.pair({0: hom_pre(dL, E), 1: hom_post(dL.dst, p)})
        self.q = self.Cn.pair({0: self.Cr.legs[0], 1: hom_pre(l, Eb) @ self.Cr.legs[1]})


@dataclass
class PullbackHomSquare:
    corners: Corners
    apex: object
    square: PullbackSquare
    errors: list = field(default_factory=list)

    @property
    def certified(self):
        return not self.errors


def pullback_hom_square(dL, l, p, tests=None, certify=True):
    """The square with apex ``[L,E] x_[L,Eb] [L2,Eb]`` over ``Cr -> Cn <- [L,E]``.

    The universal property is checked against ``tests`` (the representables
    by default, which suffices for presheaves).
    """
    cs = Corners(dL, l, p)
    L, E, Eb = dL.dst, p.src, p.dst
    apex = pullback(hom_post(L, p), hom_pre(l, Eb))
    top = apex.legs[0]
    side = cs.Cr.pair({0: hom_pre(dL, E) @ top, 1: apex.legs[1]})
    sq = PullbackSquare(side, top, cs.q, cs.k)
    errs = []
    if cs.k @ top != cs.q @ side:
        errs.append("square does not commute")
    elif certify:
        tests = representables(p.base) if tests is None else tests
        errs = certify_limit(apex.apex, (side, top, cs.k @ top),
                             (cs.Cr.apex, exponential(L, E).exp, cs.Cn.apex),
                             ((0, 2, cs.q), (1, 2, cs.k)), tests)
    return PullbackHomSquare(cs, apex, sq, errs)


def pullback_hom_grid(dL, l, p):
    """The apex of the pullback-hom square computed as one limit of the whole grid.

    Returns the grid limit and the comparison from the two-step apex, which
    is an iso exactly when the two computations agree.
    """
    L, L2, dl = dL.dst, l.dst, dL.src
    E, Eb = p.src, p.dst
    nodes = (exponential(L, E).exp, exponential(L, Eb).exp, exponential(L2, Eb).exp,
             exponential(dl, E).exp, exponential(dl, Eb).exp)
    arrows = ((0, 1, hom_post(L, p)), (2, 1, hom_pre(l, Eb)), (0, 3, hom_pre(dL, E)),
              (3, 4, hom_post(dl, p)), (1, 4, hom_pre(dL, Eb)))
    grid = finite_limit(nodes, arrows)
    apex = pullback(hom_post(L, p), hom_pre(l, Eb))
    cmp = grid.pair({0: apex.legs[0], 2: apex.legs[1]})
    return grid, cmp


# -- the Leibniz transpose --------------------------------------------------


def _check_inputs(F, a, l):
    bd = F.boundary
    if bd.kind != LEFT:
        raise ShapeError("leibniz_transpose expects a left-restricted structure")
    errs = pp_approx_errors(a)
    if errs:
        raise ShapeError("approximation check fails: " + "; ".join(errs))
    if bd.left != a.incl or bd.right != a.p:
        raise ShapeError("structure is not on the approximation's boundary")
    if bd.restr != times(identity(a.dV.dst), l):
        raise ShapeError("left restriction is not V x l")


def transposed_boundary(a, l):
    cs = Corners(a.dL, l, a.p)
    return right_restricted(a.dV, cs.k, cs.q, a.ambient), cs


def leibniz_transpose(F, a, l):
    """Transpose ``F`` (for ``D -> V x L`` restricted along ``V x l`` against ``p``)
    to a structure for ``dV`` against ``[L,E] -> Cn`` restricted along ``Cr -> Cn``."""
    _check_inputs(F, a, l)
    new, cs = transposed_boundary(a, l)
    return LiftStruct.from_solver(new, lambda prob: leibniz_transpose_formula(F, a, cs, prob))


def leibniz_transpose_formula(F, a, cs, prob):
    """Solve a transposed problem by amalgamating through the approximation iso."""
    x = prob.param
    dV, dL = a.dV, a.dL
    dv, V, dl, L, L2 = dV.src, dV.dst, dL.src, dL.dst, cs.l.dst
    E, Eb = a.p.src, a.p.dst
    f_t = uncurry(prob.u, L, E) @ assoc(x, dv, L).inverse()
    g_t = uncurry(cs.Cr.legs[0] @ prob.v, dl, E) @ assoc(x, V, dl).inverse()
    h_t = uncurry(cs.Cr.legs[1] @ prob.v, L2, Eb) @ assoc(x, V, L2).inverse()
    q = q_object(a.dV, a.dL, E)
    to_q = q.pair({0: curry(f_t, x, product(dv, L).apex), 1: curry(g_t, x, product(V, dl).apex)})
    ext = uncurry(a.approx_E.iso @ to_q, a.candidate, E)
    sol = solve(F, LiftProblem(x, ext, h_t))
    return curry(sol @ assoc(x, V, L), product(x, V).apex, L)


def leibniz_untranspose(G, a, l):
    """Inverse of :func:`leibniz_transpose`."""
    new_bd, cs = transposed_boundary(a, l)
    if G.boundary != new_bd:
        raise ShapeError("structure is not on the transposed boundary")
    if not check_pp_approx(a):
        raise ShapeError("approximation check fails")
    V = a.dV.dst
    old = left_restricted(a.incl, times(identity(V), l), a.p, a.ambient)
    return LiftStruct.from_solver(old, lambda prob: leibniz_untranspose_formula(G, a, cs, prob))


def leibniz_untranspose_formula(G, a, cs, prob):
    x = prob.param
    dV, dL = a.dV, a.dL
    dv, V, dl, L, L2 = dV.src, dV.dst, dL.src, dL.dst, cs.l.dst
    E = a.p.src
    q = q_object(a.dV, a.dL, E)
    y = a.approx_E.inverse @ curry(prob.u, x, a.candidate)
    f_t = uncurry(q.legs[0] @ y, product(dv, L).apex, E) @ assoc(x, dv, L)
    g_t = uncurry(q.legs[1] @ y, product(V, dl).apex, E) @ assoc(x, V, dl)
    h_t = prob.v @ assoc(x, V, L2)
    xv = product(x, V).apex
    v = cs.Cr.pair({0: curry(g_t, xv, dl), 1: curry(h_t, xv, L2)})
    sol = solve(G, LiftProblem(x, curry(f_t, product(x, dv).apex, L), v))
    return uncurry(sol, L, E) @ assoc(x, V, L).inverse()


# -- removing the restriction on the right -----------------------------------


def transpose_unrestricted(F, a, l):
    """Leibniz transpose followed by pulling back along the pullback-hom square.

    The result is an unrestricted structure for ``dV`` against
    ``[L,E] x_[L,Eb] [L2,Eb] -> Cr``.
    """
    G = leibniz_transpose(F, a, l)
    sq = pullback_hom_square(a.dL, l, a.p, certify=False)
    return right_pullback(G, sq.square)


def untranspose_unrestricted(H, a, l):
    sq = pullback_hom_square(a.dL, l, a.p, certify=False)
    return leibniz_untranspose(right_pullback_inv(H, sq.square), a, l)


def transport_right(G, new_right, top, bottom):
    """Move an unrestricted structure against ``p`` to one against ``new_right``
    along isos ``top: E' -> E`` and ``bottom: B' -> B`` with
    ``p . top == bottom . new_right``."""
    square = PullbackSquare(new_right, top, bottom, G.boundary.right)
    return right_pullback(right_restrict(G, bottom), square)


def _limit_comparison(fib, glob, loc, pairs):
    """``F^* lim -> lim F^*`` for a limit of exponentials ``[a_k, b_k]``."""
    legs = {k: exp_restriction_comparison(fib, a, b) @ fib.restrict_mor(glob.legs[k])
            for k, (a, b) in enumerate(pairs)}
    return loc.pair(legs)


class LocalTranspose:
    """Comparison isos between the slice-local corners and restricted global ones."""

    def __init__(self, over, dL, l, p):
        self.fib = fib = el_projection(over)
        self.glob = pullback_hom_square(dL, l, p, certify=False)
        rdL, rl, rp = fib.restrict_mor(dL), fib.restrict_mor(l), fib.restrict_mor(p)
        self.loc = pullback_hom_square(rdL, rl, rp, certify=False)
        L, L2, dl = dL.dst, l.dst, dL.src
        E, Eb = p.src, p.dst
        self.iso_apex = _limit_comparison(fib, self.glob.apex, self.loc.apex,
                                          [(L, E), (L2, Eb), (L, Eb)])
        self.iso_corner = _limit_comparison(fib, self.glob.corners.Cr, self.loc.corners.Cr,
                                            [(dl, E), (L2, Eb), (dl, Eb)])
        self.right = fib.restrict_mor(self.glob.square.side)


def transpose_local(F, a, dL, l, p):
    """The Leibniz transpose in the slice over ``F.boundary.ambient``.

    ``dL``, ``l`` and ``p`` live on the base category; ``F`` and ``a`` live
    on the elements of the ambient object and use their restrictions.  The
    result is against the restriction of ``[L,E] x_[L,Eb] [L2,Eb] -> Cr``.
    """
    over = F.boundary.ambient
    if over is None:
        return transpose_unrestricted(F, a, l)
    lt = LocalTranspose(over, dL, l, p)
    T = transpose_unrestricted(F, a, lt.fib.restrict_mor(l))
    return transport_right(T, lt.right, lt.iso_apex, lt.iso_corner)


def untranspose_local(H, a, dL, l, p):
    over = H.boundary.ambient
    if over is None:
        return untranspose_unrestricted(H, a, l)
    lt = LocalTranspose(over, dL, l, p)
    T = transport_right(H, lt.loc.square.side, lt.iso_apex.inverse(), lt.iso_corner.inverse())
    return untranspose_unrestricted(T, a, lt.fib.restrict_mor(l))


# -- intervals --------------------------------------------------------------


@dataclass(frozen=True)
class IntervalStruct:
    """Two points of ``I``, a boundary ``dI: dI_ -> I`` and the points' lifts to ``dI_``."""

    pt0: PshMor
    pt1: PshMor
    dI: PshMor
    f0: PshMor
    f1: PshMor

    @property
    def I(self):
        return self.dI.dst

    @property
    def boundary(self):
        return self.dI.src

    @property
    def meet(self):
        """The pullback of the two points."""
        return pullback(self.pt0, self.pt1)


def interval_errors(i):
    errs = []
    one = terminal_presheaf(i.I.base)
    for name, m, dst in (("pt0", i.pt0, i.I), ("pt1", i.pt1, i.I),
                         ("f0", i.f0, i.boundary), ("f1", i.f1, i.boundary)):
        if m.src != one or m.dst != dst:
            errs.append(f"{name} is not a point of its target")
    if errs:
        return errs
    if i.dI @ i.f0 != i.pt0:
        errs.append("dI . f0 is not pt0")
    if i.dI @ i.f1 != i.pt1:
        errs.append("dI . f1 is not pt1")
    m = i.meet
    if i.f0 @ m.legs[0] != i.f1 @ m.legs[1]:
        errs.append("the meet does not factor through the boundary")
    return errs


def interval(pt0, pt1, dI, f0, f1):
    i = IntervalStruct(pt0, pt1, dI, f0, f1)
    errs = interval_errors(i)
    if errs:
        raise ShapeError("; ".join(errs))
    return i


def interval_from_points(pt0, pt1):
    """The interval whose boundary is the coproduct of two copies of the terminal object."""
    one = pt0.src
    co = coproduct(one, one)
    return interval(pt0, pt1, co.copair({0: pt0, 1: pt1}), co.legs[0], co.legs[1])


@dataclass(frozen=True)
class IntervalCert:
    """Certificate that an interval is an interval relative to a list of objects."""

    interval: IntervalStruct
    rel_to: tuple
    meet_isos: dict
    boundary_isos: dict
    ok: bool = True

    def boundary_iso(self, b):
        """``[dI_, b] -> b x b`` for a certified object ``b``."""
        try:
            return self.boundary_isos[b]
        except KeyError:
            raise ShapeError(f"interval is not certified for {b!r}") from None


@dataclass(frozen=True)
class IntervalFailure:
    condition: str
    obj: Presheaf | None = None
    ok: bool = False


def check_interval(i, rel_to):
    """Certify ``[meet, B] ~ 1`` and ``[dI_, B] ~ B x B`` for each ``B``."""
    errs = interval_errors(i)
    if errs:
        return IntervalFailure("not a pre-interval: " + "; ".join(errs))
    meet = i.meet.apex
    one = terminal_presheaf(i.I.base)
    meets, bds = {}, {}
    for b in rel_to:
        em = exponential(meet, b).exp
        if any(n != 1 for n in em.sizes):
            return IntervalFailure("[meet, B] is not terminal", b)
        bang = to_terminal(em, one)
        meets[b] = (bang, bang.inverse())
        legs = [unit_exp(b) @ hom_pre(f, b) for f in (i.f0, i.f1)]
        m = product(b, b).pair(*legs)
        if not m.is_iso():
            return IntervalFailure("[boundary, B] is not B x B via the two points", b)
        bds[b] = m
    return IntervalCert(i, tuple(rel_to), meets, bds)


def restrict_interval(i, fib):
    r = fib.restrict_mor
    return IntervalStruct(r(i.pt0), r(i.pt1), r(i.dI), r(i.f0), r(i.f1))


# -- path objects -----------------------------------------------------------


@dataclass
class PathObj:
    interval: IntervalStruct
    p: PshMor
    P: Presheaf
    dP: Presheaf
    ev: PshMor
    P_B: Presheaf
    dP_B: Presheaf
    ev_B: PshMor
    corner: object
    hat: PshMor


def path_objects(i, p, ambient=None):
    """``[I, E] -> [dI_, E]``, the same for ``B`` and the pullback-power of ``dI`` with ``p``.

    With ``ambient`` the maps live on the elements of ``ambient`` and the
    interval is restricted there, which computes the slice versions.
    """
    if ambient is not None:
        i = restrict_interval(i, el_projection(ambient))
    I, dI_ = i.I, i.boundary
    E, B = p.src, p.dst
    ev_E, ev_B = hom_pre(i.dI, E), hom_pre(i.dI, B)
    corner = pullback(hom_post(dI_, p), ev_B)
    hat = corner.pair({0: ev_E, 1: hom_post(I, p)})
    return PathObj(i, p, exponential(I, E).exp, exponential(dI_, E).exp, ev_E,
                   exponential(I, B).exp, exponential(dI_, B).exp, ev_B, corner, hat)


def fibred_path(a, x):
    """``b x_[a, b] [a, X]`` for ``x: X -> b``, the local exponential by the pullback formula."""
    return pullback(const_map(x.dst, a), hom_post(a, x))


def local_exp_check(a, x):
    """Compare the pullback formula with the local exponential computed in the slice.

    Returns the result of an iso search between the two slice objects.
    """
    b = x.dst
    fb = fibred_path(a, x)
    formula = SliceObj(fb.apex, fb.legs[0])
    fib = el_projection(b)
    local = from_el(exponential(fib.restrict(a), to_el(SliceObj(x.src, x))).exp, b)
    return find_slice_iso(formula, local)


def endpoints(i, p):
    """``P^I_B(E) -> E x_B E`` evaluating at the two points."""
    E = p.src
    pe = fibred_path(i.I, p)
    ee = pullback(p, p)
    ends = [unit_exp(E) @ hom_pre(pt, E) @ pe.legs[1] for pt in (i.pt0, i.pt1)]
    return pe, ee, ee.pair({0: ends[0], 1: ends[1]})


# -- the pullback-power cube ------------------------------------------------


@dataclass
class CubeCert:
    hat: PshMor
    global_hat: PshMor
    front: PshMor
    top: PshMor
    errors: list

    @property
    def certified(self):
        return not self.errors


def _fibred_ev(i, x):
    """``P(X) -> dP(X)`` over ``b`` for ``x: X -> b``."""
    pf, dpf = fibred_path(i.I, x), fibred_path(i.boundary, x)
    return pf, dpf, dpf.pair({0: pf.legs[0], 1: hom_pre(i.dI, x.src) @ pf.legs[1]})


def pullback_power_cube(i, p, b, tests=None):
    """Exhibit the fibred pullback-power of ``p: E -> B`` over ``b: B -> Bb``
    as a pullback of the global pullback-power ``[I,E] -> [I,B] x_[dI_,B] [dI_,E]``."""
    I, dI_ = i.I, i.boundary
    E, B, Bb = p.src, p.dst, b.dst
    e = b @ p
    pE, dpE, evE = _fibred_ev(i, e)
    pB, dpB, evB = _fibred_ev(i, b)
    dp_map = dpB.pair({0: dpE.legs[0], 1: hom_post(dI_, p) @ dpE.legs[1]})
    p_map = pB.pair({0: pE.legs[0], 1: hom_post(I, p) @ pE.legs[1]})
    corner = pullback(dp_map, evB)
    hat = corner.pair({0: evE, 1: p_map})
    g = pullback(hom_pre(i.dI, B), hom_post(dI_, p))
    ghat = g.pair({0: hom_post(I, p), 1: hom_pre(i.dI, E)})
    front = g.pair({0: pB.legs[1] @ corner.legs[1], 1: dpE.legs[1] @ corner.legs[0]})
    top = pE.legs[1]
    tests = representables(p.base) if tests is None else tests
    errs = []
    if front @ hat != ghat @ top:
        errs.append("front square does not commute")
    else:
        errs += ["front: " + m for m in certify_limit(
            pE.apex, (hat, top, ghat @ top), (corner.apex, exponential(I, E).exp, g.apex),
            ((0, 2, front), (1, 2, ghat)), tests)]
    # the bottom face: the corner over Bb is the pullback of Bb -> [I,Bb] <- g
    to_ib = hom_post(I, b) @ g.legs[0]
    base_leg = pB.legs[0] @ corner.legs[1]
    errs += ["bottom: " + m for m in certify_limit(
        corner.apex, (base_leg, front, to_ib @ front), (Bb, g.apex, exponential(I, Bb).exp),
        ((0, 2, const_map(Bb, I)), (1, 2, to_ib)), tests)]
    # the top face: the fibred path object is the pullback of Bb -> [I,Bb] <- [I,E]
    errs += ["top: " + m for m in certify_limit(
        pE.apex, tuple(pE.legs), (Bb, exponential(I, E).exp, exponential(I, Bb).exp),
        ((0, 2, const_map(Bb, I)), (1, 2, hom_post(I, e))), tests)]
    return CubeCert(hat, ghat, front, top, errs)


# -- path transposes --------------------------------------------------------


class PathTransport:
    """The isos rewriting the unrestricted transpose for ``l: I -> 1`` into path form."""

    def __init__(self, i, cert, p):
        E, B = p.src, p.dst
        if not cert.ok:
            raise ShapeError(f"interval certificate failed: {cert.condition}")
        for obj in (E, B):
            cert.boundary_iso(obj)
        one = terminal_presheaf(p.base)
        self.l = to_terminal(i.I, one)
        self.sq = pullback_hom_square(i.dI, self.l, p, certify=False)
        A, Cr = self.sq.apex, self.sq.corners.Cr
        self.pe, self.ee, self.ends = endpoints(i, p)
        self.alpha = A.pair({0: self.pe.legs[1], 1: unit_exp_inv(B) @ self.pe.legs[0]})
        ee = self.ee
        ends = product(E, E).pair(ee.legs[0], ee.legs[1])
        self.beta = Cr.pair({0: cert.boundary_iso(E).inverse() @ ends,
                             1: unit_exp_inv(B) @ p @ ee.legs[0]})


def path_transpose(F, a, i, cert, p):
    """Transpose ``F`` (for ``D -> V x I`` restricted along ``V x I -> V``) to a
    structure for ``dV`` against ``P^I_B(E) -> E x_B E`` (restricted to the
    ambient slice when there is one)."""
    pt = PathTransport(i, cert, p)
    T = transpose_local(F, a, i.dI, pt.l, p)
    over = F.boundary.ambient
    r = el_projection(over).restrict_mor if over is not None else (lambda m: m)
    return transport_right(T, r(pt.ends), r(pt.alpha), r(pt.beta))


def path_untranspose(G, a, i, cert, p):
    pt = PathTransport(i, cert, p)
    over = G.boundary.ambient
    r = el_projection(over).restrict_mor if over is not None else (lambda m: m)
    T = transport_right(G, r(pt.sq.square.side), r(pt.alpha).inverse(), r(pt.beta).inverse())
    return untranspose_local(T, a, i.dI, pt.l, p)
