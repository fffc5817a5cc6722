"""Slices of a presheaf category computed directly on total presheaves.

A slice object over ``C`` is a presheaf together with a map to ``C``.  The
pushforward along ``p: C -> D`` has, over ``d`` in ``D(c)``, one element
per section over the pulled-back representable ``p^*(y(c) -> D)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..fincat import PshMor, Presheaf, ShapeError, enumerate_pshmors, identity
from .exponential import global_element
from .limits import pullback


@dataclass(frozen=True)
class SliceObj:
    total: Presheaf
    anchor: PshMor

    def __post_init__(self):
        if self.anchor.src != self.total:
            raise ShapeError("anchor does not start at the total presheaf")

    @property
    def over(self):
        return self.anchor.dst


@dataclass(frozen=True)
class SliceMor:
    src: SliceObj
    dst: SliceObj
    map: PshMor

    def __post_init__(self):
        if self.map.src != self.src.total or self.map.dst != self.dst.total:
            raise ShapeError("slice map endpoints do not match")
        if self.dst.anchor @ self.map != self.src.anchor:
            raise ShapeError("map does not commute with the anchors")


def slice_obj(anchor):
    return SliceObj(anchor.src, anchor)


def slice_id(x):
    return SliceMor(x, x, identity(x.total))


def slice_compose(g, f):
    return SliceMor(f.src, g.dst, g.map @ f.map)


def fibres(x):
    """``fib[c][g]`` lists the elements of ``x.total(c)`` over ``g``."""
    out = []
    for c in range(x.total.base.n_objects):
        fib = [[] for _ in range(x.over.sizes[c])]
        for z, g in enumerate(x.anchor.comps[c]):
            fib[g].append(z)
        out.append(fib)
    return out


def pullback_functor(phi, x):
    """``phi^* x`` for ``phi: D -> C`` and ``x`` over ``C``; anchored in ``D``."""
    if phi.dst != x.over:
        raise ShapeError("pullback functor: base mismatch")
    pb = pullback(x.anchor, phi)
    return SliceObj(pb.apex, pb.legs[1])


def pullback_functor_projection(phi, x):
    """The map ``phi^* x -> x`` on total presheaves."""
    return pullback(x.anchor, phi).legs[0]


def pullback_functor_mor(phi, m):
    src, dst = pullback_functor(phi, m.src), pullback_functor(phi, m.dst)
    pb_s = pullback(m.src.anchor, phi)
    pb_d = pullback(m.dst.anchor, phi)
    return SliceMor(src, dst, pb_d.pair({0: m.map @ pb_s.legs[0], 1: pb_s.legs[1]}))


def postcompose(p, x):
    """``p_! x``: the same total presheaf anchored along ``p``."""
    if x.over != p.src:
        raise ShapeError("postcompose: base mismatch")
    return SliceObj(x.total, p @ x.anchor)


def postcompose_mor(p, m):
    return SliceMor(postcompose(p, m.src), postcompose(p, m.dst), m.map)


class Pushforward:
    """``p_* x`` for ``p: C -> D`` and ``x`` over ``C``."""

    def __init__(self, p, x):
        if x.over != p.src:
            raise ShapeError("pushforward: base mismatch")
        self.p, self.x = p, x
        dd = p.dst
        cat = dd.base
        self.base = cat
        fib = fibres(x)
        self._pb = {}
        self.elements = []
        self.index = []
        for c in range(cat.n_objects):
            elts = []
            for d in range(dd.sizes[c]):
                pb = self._probe(c, d)
                legc = pb.legs[1]
                allowed = [[fib[e][legc.comps[e][t]] for t in range(pb.apex.sizes[e])]
                           for e in range(cat.n_objects)]
                for s in enumerate_pshmors(pb.apex, x.total, allowed=allowed):
                    elts.append((d, s.comps))
            self.elements.append(elts)
            self.index.append({e: k for k, e in enumerate(elts)})
        act = []
        for f in range(cat.n_morphisms):
            s, d = cat.src[f], cat.dst[f]
            row = []
            for dv, sec in self.elements[d]:
                dv2 = dd.act[f][dv]
                m = self._probe_map(f, d, dv)
                new = tuple(tuple(sec[e][m[e][t]] for t in range(len(m[e])))
                            for e in range(cat.n_objects))
                row.append(self.index[s][(dv2, new)])
            act.append(tuple(row))
        total = Presheaf(cat, tuple(len(e) for e in self.elements), tuple(act))
        anchor = PshMor(total, dd, tuple(tuple(d for d, _ in es) for es in self.elements))
        self.obj = SliceObj(total, anchor)

    def _probe(self, c, d):
        key = (c, d)
        if key not in self._pb:
            self._pb[key] = pullback(global_element(self.p.dst, c, d), self.p)
        return self._pb[key]

    def _probe_map(self, f, c, d):
        """Tables of ``p^*(y(f))`` from the probe at ``(src f, f^* d)`` to ``(c, d)``."""
        cat = self.base
        s = cat.src[f]
        src = self._probe(s, self.p.dst.act[f][d])
        dst = self._probe(c, d)
        out = []
        for e in range(cat.n_objects):
            hs, hc = cat.hom(e, s), cat.hom(e, c)
            pos = {g: k for k, g in enumerate(hc)}
            out.append(tuple(dst.index[e][(pos[cat.comp[f][hs[t[0]]]], t[1], t[2])]
                             for t in src.elements[e]))
        return out

    def transpose(self, z, h):
        """From ``h: p^* z -> x`` over ``C`` to ``z -> p_* x`` over ``D``."""
        cat = self.base
        pbz = pullback(z.anchor, self.p)
        if h.map.src != pbz.apex:
            raise ShapeError("transpose: source is not p^* z")
        comps = []
        for c in range(cat.n_objects):
            row = []
            for zeta in range(z.total.sizes[c]):
                d = z.anchor.comps[c][zeta]
                probe = self._probe(c, d)
                sec = []
                for e in range(cat.n_objects):
                    hc = cat.hom(e, c)
                    sec.append(tuple(
                        h.map.comps[e][pbz.index[e][(z.total.act[hc[g]][zeta], gam, dl)]]
                        for g, gam, dl in probe.elements[e]))
                row.append(self.index[c][(d, tuple(sec))])
            comps.append(tuple(row))
        return SliceMor(z, self.obj, PshMor(z.total, self.obj.total, tuple(comps)))

    def untranspose(self, z, k):
        """From ``k: z -> p_* x`` over ``D`` to ``p^* z -> x`` over ``C``."""
        cat = self.base
        pbz = pullback(z.anchor, self.p)
        comps = []
        for e in range(cat.n_objects):
            idpos = cat.hom(e, e).index(cat.ids[e])
            row = []
            for zeta, gam, dl in pbz.elements[e]:
                d, sec = self.elements[e][k.map.comps[e][zeta]]
                probe = self._probe(e, d)
                row.append(sec[e][probe.index[e][(idpos, gam, dl)]])
            comps.append(tuple(row))
        src = SliceObj(pbz.apex, pbz.legs[1])
        return SliceMor(src, self.x, PshMor(pbz.apex, self.x.total, tuple(comps)))


@lru_cache(maxsize=512)
def pushforward(p, x):
    return Pushforward(p, x)


def local_exponential(a, b):
    """``[a, b]`` in the slice over ``C`` computed as ``a_* a^* b``."""
    if a.over != b.over:
        raise ShapeError("local exponential of objects over different bases")
    return pushforward(a.anchor, pullback_functor(a.anchor, b)).obj
