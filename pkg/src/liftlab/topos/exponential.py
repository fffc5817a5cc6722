"""Exponentials of presheaves.

An element of ``[a, b]`` at ``c`` is the index of a natural transformation
``y(c) x a -> b`` in the canonical enumeration of all of them.
"""
from __future__ import annotations

from functools import lru_cache

from ..fincat import (PshMor, Presheaf, ShapeError, enumerate_pshmors, identity,
                      yoneda, yoneda_element_of_identity)
from .limits import product, times


class Exponential:
    def __init__(self, a, b):
        if a.base != b.base:
            raise ShapeError("exponential of presheaves over different categories")
        self.a, self.b = a, b
        cat = a.base
        self.base = cat
        self.reps = [yoneda(cat, c) for c in range(cat.n_objects)]
        self.probes = [product(y, a) for y in self.reps]
        self.tables = []
        self.index = []
        for c in range(cat.n_objects):
            ms = enumerate_pshmors(self.probes[c].apex, b)
            self.tables.append([m.comps for m in ms])
            self.index.append({m.comps: k for k, m in enumerate(ms)})
        act = []
        for f in range(cat.n_morphisms):
            s, d = cat.src[f], cat.dst[f]
            act.append(tuple(self.index[s][self._restrict(f, t)] for t in self.tables[d]))
        self.exp = Presheaf(cat, tuple(len(t) for t in self.tables), tuple(act))
        self._id_pos = [yoneda_element_of_identity(cat, c) for c in range(cat.n_objects)]
        self._ev = None

    def _restrict(self, f, table):
        """Precompose a transformation on ``y(d) x a`` with ``y(f) x a``."""
        cat = self.base
        s, d = cat.src[f], cat.dst[f]
        out = []
        for e in range(cat.n_objects):
            hs, hd = cat.hom(e, s), cat.hom(e, d)
            na = self.a.sizes[e]
            pos = {g: k for k, g in enumerate(hd)}
            row = table[e]
            out.append(tuple(row[pos[cat.comp[f][g]] * na + z]
                             for g in hs for z in range(na)))
        return tuple(out)

    def apply(self, c, k, z):
        """Evaluate element ``k`` of ``[a,b](c)`` at ``z`` in ``a(c)``."""
        return self.tables[c][k][c][self._id_pos[c] * self.a.sizes[c] + z]

    @property
    def ev(self):
        """``ev: [a,b] x a -> b``."""
        if self._ev is None:
            pr = product(self.exp, self.a)
            comps = []
            for c in range(self.base.n_objects):
                na = self.a.sizes[c]
                comps.append(tuple(self.apply(c, k, z)
                                   for k in range(self.exp.sizes[c]) for z in range(na)))
            self._ev = PshMor(pr.apex, self.b, tuple(comps))
        return self._ev

    def curry(self, f, x):
        """Transpose ``f: x x a -> b`` to ``x -> [a,b]``."""
        if f.dst != self.b or f.src != product(x, self.a).apex:
            raise ShapeError("curry: map is not of the form x x a -> b")
        cat = self.base
        n = cat.n_objects
        sizes_a = self.a.sizes
        comps = []
        for c in range(n):
            idx = self.index[c]
            plan = [(f.comps[e], [x.act[g] for g in cat.hom(e, c)], sizes_a[e])
                    for e in range(n)]
            row = []
            for xi in range(x.sizes[c]):
                table = tuple(tuple(fe[acts[xi] * na + z] for acts in gs for z in range(na))
                              for fe, gs, na in plan)
                row.append(idx[table])
            comps.append(tuple(row))
        return PshMor(x, self.exp, tuple(comps))

    def uncurry(self, g):
        """Transpose ``g: x -> [a,b]`` to ``x x a -> b``."""
        if g.dst != self.exp:
            raise ShapeError("uncurry: codomain mismatch")
        x = g.src
        pr = product(x, self.a)
        comps = []
        for c in range(self.base.n_objects):
            na = self.a.sizes[c]
            gc = g.comps[c]
            comps.append(tuple(self.apply(c, gc[xi], z)
                               for xi in range(x.sizes[c]) for z in range(na)))
        return PshMor(pr.apex, self.b, tuple(comps))


@lru_cache(maxsize=2048)
def exponential(a, b):
    return Exponential(a, b)


def curry(f, x, a):
    """Curry ``f: x x a -> b`` to ``x -> [a, b]``."""
    return exponential(a, f.dst).curry(f, x)


def uncurry(g, a, b):
    """Uncurry ``g: x -> [a, b]`` to ``x x a -> b``."""
    return exponential(a, b).uncurry(g)


def ev(a, b):
    return exponential(a, b).ev


def hom_post(a, f):
    """``[a, f]: [a, x] -> [a, y]`` for ``f: x -> y`` (postcomposition)."""
    src = exponential(a, f.src)
    return exponential(a, f.dst).curry(f @ src.ev, src.exp)


def hom_pre(g, b):
    """``[g, b]: [v, b] -> [u, b]`` for ``g: u -> v`` (precomposition)."""
    src = exponential(g.dst, b)
    return exponential(g.src, b).curry(src.ev @ times(identity(src.exp), g), src.exp)


def hom_map(g, f):
    """``[g, f]: [v, x] -> [u, y]`` for ``g: u -> v`` and ``f: x -> y``."""
    return hom_post(g.src, f) @ hom_pre(g, f.src)


def global_element(p, c, x):
    """The map ``y(c) -> p`` classifying element ``x`` of ``p(c)``."""
    cat = p.base
    y = yoneda(cat, c)
    return PshMor(y, p, tuple(tuple(p.act[g][x] for g in cat.hom(e, c))
                              for e in range(cat.n_objects)))


def const_map(x, a):
    """``x -> [a, x]`` transposing the projection ``x x a -> x``."""
    return exponential(a, x).curry(product(x, a).fst, x)
