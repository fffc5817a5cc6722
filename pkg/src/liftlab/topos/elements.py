"""Categories of elements and discrete fibrations.

The slice of presheaves over ``C`` is equivalent to presheaves on the
category of elements of ``C``.  Pulling back along ``phi: D -> C`` becomes
restriction along the induced discrete fibration, and postcomposition
becomes the sum over its fibres.
"""
from __future__ import annotations

from functools import lru_cache

from ..fincat import FinCat, PshMor, Presheaf, ShapeError
from .exponential import exponential
from .limits import product, swap
from .slices import SliceMor, SliceObj, fibres


class ElCat:
    """The category of elements of a presheaf ``p``.

    Objects are pairs ``(c, x)`` with ``x`` in ``p(c)``; a morphism
    ``(c', x') -> (c, x)`` is ``f: c' -> c`` with ``p(f)(x) == x'``.
    """

    def __init__(self, p):
        self.p = p
        base = p.base
        objs = [(c, x) for c in range(base.n_objects) for x in range(p.sizes[c])]
        oidx = {o: k for k, o in enumerate(objs)}
        mors = []
        for f in range(base.n_morphisms):
            s, d = base.src[f], base.dst[f]
            for x in range(p.sizes[d]):
                mors.append((f, oidx[(s, p.act[f][x])], oidx[(d, x)]))
        midx = {(f, t): k for k, (f, _, t) in enumerate(mors)}
        n = len(mors)
        comp = [[-1] * n for _ in range(n)]
        for gi, (g, gs, gt) in enumerate(mors):
            for fi, (f, fs, ft) in enumerate(mors):
                if ft == gs:
                    comp[gi][fi] = midx[(base.comp[g][f], gt)]
        ids = tuple(midx[(base.ids[c], oidx[(c, x)])] for c, x in objs)
        self.cat = FinCat(
            tuple(f"{base.objects[c]}:{x}" for c, x in objs),
            tuple(f"{base.morphisms[f]}@{objs[t][1]}" for f, _, t in mors),
            tuple(s for _, s, _ in mors), tuple(t for _, _, t in mors), ids,
            tuple(tuple(r) for r in comp))
        self.objs = objs
        self.obj_index = oidx
        self.mors = mors
        self.mor_index = midx


@lru_cache(maxsize=256)
def category_of_elements(p):
    return ElCat(p)


class DiscreteFibration:
    """A functor ``F: A -> B`` with unique lifts of morphisms into each object."""

    def __init__(self, a, b, obj_map, mor_map):
        self.a, self.b = a, b
        self.obj_map = tuple(obj_map)
        self.mor_map = tuple(mor_map)
        self.fibre = [[] for _ in range(b.n_objects)]
        for o, t in enumerate(self.obj_map):
            self.fibre[t].append(o)
        self.lift = [dict() for _ in range(a.n_objects)]
        for m in range(a.n_morphisms):
            tgt = a.dst[m]
            f = self.mor_map[m]
            if f in self.lift[tgt]:
                raise ShapeError("functor is not a discrete fibration")
            self.lift[tgt][f] = m
        for o in range(a.n_objects):
            if len(self.lift[o]) != len(b.into(self.obj_map[o])):
                raise ShapeError("functor is not a discrete fibration")

    def restrict(self, g):
        """``F^* g`` for a presheaf ``g`` on ``B``."""
        return Presheaf(self.a, tuple(g.sizes[t] for t in self.obj_map),
                        tuple(g.act[f] for f in self.mor_map))

    def restrict_mor(self, m):
        return PshMor(self.restrict(m.src), self.restrict(m.dst),
                      tuple(m.comps[t] for t in self.obj_map))

    def sigma(self, h):
        return _sigma(self, h)[0]

    def sigma_index(self, h):
        """``(elements, index)`` of ``F_! h``: elements are pairs ``(a, x)``."""
        return _sigma(self, h)[1:]

    def sigma_mor(self, k):
        src = self.sigma(k.src)
        _, els, _ = _sigma(self, k.src)
        _, _, idx = _sigma(self, k.dst)
        dst = self.sigma(k.dst)
        return PshMor(src, dst, tuple(tuple(idx[b][(o, k.comps[o][x])] for o, x in els[b])
                                      for b in range(self.b.n_objects)))

    def unit(self, h):
        """``h -> F^* F_! h``."""
        s, _, idx = _sigma(self, h)
        return PshMor(h, self.restrict(s),
                      tuple(tuple(idx[self.obj_map[o]][(o, x)] for x in range(h.sizes[o]))
                            for o in range(self.a.n_objects)))

    def counit(self, g):
        """``F_! F^* g -> g``."""
        r = self.restrict(g)
        s, els, _ = _sigma(self, r)
        return PshMor(s, g, tuple(tuple(x for _, x in els[b]) for b in range(self.b.n_objects)))

    def transpose(self, k, h):
        """From ``k: F_! h -> g`` to ``h -> F^* g``."""
        return self.restrict_mor(k) @ self.unit(h)

    def untranspose(self, l, g):
        """From ``l: h -> F^* g`` to ``F_! h -> g``."""
        return self.counit(g) @ self.sigma_mor(l)

    def frobenius(self, h, g):
        """The iso ``F_!(h x F^* g) -> F_! h x g``."""
        hg = product(h, self.restrict(g))
        s1, els1, _ = _sigma(self, hg.apex)
        s2, _, idx2 = _sigma(self, h)
        tgt = product(s2, g)
        comps = []
        for b in range(self.b.n_objects):
            ng = g.sizes[b]
            row = []
            for o, t in els1[b]:
                x, y = divmod(t, ng)
                row.append(idx2[b][(o, x)] * ng + y)
            comps.append(tuple(row))
        return PshMor(s1, tgt.apex, tuple(comps))


def _sigma(fib, h):
    key = (id(fib), h)
    hit = _SIGMA_CACHE.get(key)
    if hit is not None and hit[0] is fib:
        return hit[1]
    a, b = fib.a, fib.b
    els = []
    idx = []
    for t in range(b.n_objects):
        e = [(o, x) for o in fib.fibre[t] for x in range(h.sizes[o])]
        els.append(e)
        idx.append({v: k for k, v in enumerate(e)})
    act = []
    for f in range(b.n_morphisms):
        s, d = b.src[f], b.dst[f]
        row = []
        for o, x in els[d]:
            m = fib.lift[o][f]
            row.append(idx[s][(a.src[m], h.act[m][x])])
        act.append(tuple(row))
    s = Presheaf(b, tuple(len(e) for e in els), tuple(act))
    out = (s, els, idx)
    if len(_SIGMA_CACHE) > 4096:
        _SIGMA_CACHE.clear()
    _SIGMA_CACHE[key] = (fib, out)
    return out


_SIGMA_CACHE = {}


@lru_cache(maxsize=256)
def el_projection(p):
    """The discrete fibration from the category of elements of ``p`` to its base."""
    el = category_of_elements(p)
    return DiscreteFibration(el.cat, p.base, [c for c, _ in el.objs],
                             [f for f, _, _ in el.mors])


@lru_cache(maxsize=256)
def el_map(phi):
    """The discrete fibration induced by a presheaf map ``phi: D -> C``."""
    ed, ec = category_of_elements(phi.src), category_of_elements(phi.dst)
    obj_map = [ec.obj_index[(c, phi.comps[c][x])] for c, x in ed.objs]
    mor_map = [ec.mor_index[(f, obj_map[t])] for f, _, t in ed.mors]
    return DiscreteFibration(ed.cat, ec.cat, obj_map, mor_map)


def exp_restriction_comparison(fib, a, b):
    """The iso ``F^*[a, b] -> [F^* a, F^* b]`` for a discrete fibration ``F``."""
    old = exponential(a, b)
    ra, rb = fib.restrict(a), fib.restrict(b)
    new = exponential(ra, rb)
    A, B = fib.a, fib.b
    comps = []
    for o in range(A.n_objects):
        o2 = fib.obj_map[o]
        row = []
        for table in old.tables[o2]:
            out = []
            for e in range(A.n_objects):
                e2 = fib.obj_map[e]
                pos = {g: k for k, g in enumerate(B.hom(e2, o2))}
                na = a.sizes[e2]
                t = table[e2]
                out.append(tuple(t[pos[fib.mor_map[g]] * na + z]
                                 for g in A.hom(e, o) for z in range(na)))
            row.append(new.index[o][tuple(out)])
        comps.append(tuple(row))
    return PshMor(fib.restrict(old.exp), new.exp, tuple(comps))


def frob_left(fib, x, h):
    """The iso ``F_!(F^*x x h) -> x x F_!h``."""
    rx = fib.restrict(x)
    s = fib.sigma_mor(swap(rx, h))
    return swap(fib.sigma(h), x) @ fib.frobenius(h, x) @ s


# ---------------------------------------------------------------------------
# slice <-> presheaves on elements


def to_el(x):
    """The presheaf on elements of ``x.over`` whose value at ``(c, g)`` is the fibre."""
    el = category_of_elements(x.over)
    fib = fibres(x)
    pos = [{z: k for k, z in enumerate(fc[g])} for fc in fib for g in range(len(fc))]
    # pos is indexed by element-object number, which enumerates (c, g) in order
    sizes = tuple(len(fib[c][g]) for c, g in el.objs)
    act = []
    for f, s, t in el.mors:
        c, g = el.objs[t]
        act.append(tuple(pos[s][x.total.act[f][z]] for z in fib[c][g]))
    return Presheaf(el.cat, sizes, tuple(act))


def to_el_mor(m):
    el = category_of_elements(m.src.over)
    fs, fd = fibres(m.src), fibres(m.dst)
    posd = [{z: k for k, z in enumerate(fc[g])} for fc in fd for g in range(len(fc))]
    comps = []
    for o, (c, g) in enumerate(el.objs):
        comps.append(tuple(posd[o][m.map.comps[c][z]] for z in fs[c][g]))
    return PshMor(to_el(m.src), to_el(m.dst), tuple(comps))


def from_el(h, over):
    """The slice object over ``over`` corresponding to ``h`` on its elements."""
    fib = el_projection(over)
    s, els, _ = _sigma(fib, h)
    el = category_of_elements(over)
    anchor = PshMor(s, over, tuple(tuple(el.objs[o][1] for o, _ in els[c])
                                   for c in range(over.base.n_objects)))
    return SliceObj(s, anchor)


def from_el_mor(k, over):
    fib = el_projection(over)
    return SliceMor(from_el(k.src, over), from_el(k.dst, over), fib.sigma_mor(k))


def el_roundtrip_iso(x):
    """The slice iso ``x -> from_el(to_el(x))``."""
    el = category_of_elements(x.over)
    fib = fibres(x)
    y = from_el(to_el(x), x.over)
    _, _, idx = _sigma(el_projection(x.over), to_el(x))
    comps = []
    for c in range(x.total.base.n_objects):
        row = []
        for z in range(x.total.sizes[c]):
            g = x.anchor.comps[c][z]
            o = el.obj_index[(c, g)]
            row.append(idx[c][(o, fib[c][g].index(z))])
        comps.append(tuple(row))
    return SliceMor(x, y, PshMor(x.total, y.total, tuple(comps)))
