"""Pointwise finite limits and colimits of presheaves.

A limit is stored as the set of compatible tuples at each object, sorted
lexicographically; the position of a tuple is its element index.  A
colimit is the pointwise quotient of the disjoint union, with classes
numbered by their least member.
"""
from __future__ import annotations

from functools import lru_cache

from ..fincat import (Presheaf, PshMor, ShapeError, enumerate_pshmors,
                      identity, terminal_presheaf)


class Limit:
    """Limit cone over a diagram of presheaves.

    ``nodes`` are presheaves and ``arrows`` are triples ``(i, j, f)`` with
    ``f: nodes[i] -> nodes[j]``.  ``legs[i]`` is the projection to node i.
    """

    def __init__(self, nodes, arrows, base=None):
        self.nodes = tuple(nodes)
        self.arrows = tuple(arrows)
        if not self.nodes and base is None:
            raise ShapeError("empty diagram needs an explicit base category")
        self.base = base if base is not None else self.nodes[0].base
        for i, j, f in self.arrows:
            if f.src != self.nodes[i] or f.dst != self.nodes[j]:
                raise ShapeError(f"arrow {i}->{j} does not match its endpoints")
        cat = self.base
        self.elements = [self._tuples_at(c) for c in range(cat.n_objects)]
        self.index = [{t: k for k, t in enumerate(ts)} for ts in self.elements]
        act = []
        for f in range(cat.n_morphisms):
            s, d = cat.src[f], cat.dst[f]
            acts = [n.act[f] for n in self.nodes]
            idx = self.index[s]
            act.append(tuple(idx[tuple(a[x] for a, x in zip(acts, t))] for t in self.elements[d]))
        self.apex = Presheaf(cat, tuple(len(e) for e in self.elements), tuple(act))
        self.legs = tuple(
            PshMor(self.apex, node, tuple(tuple(t[i] for t in ts) for ts in self.elements))
            for i, node in enumerate(self.nodes))

    def _tuples_at(self, c):
        nodes = self.nodes
        k = len(nodes)
        # visit nodes so that each one after the first is linked to an earlier one
        order, seen = [], set()
        for start in range(k):
            if start in seen:
                continue
            stack = [start]
            while stack:
                i = stack.pop()
                if i in seen:
                    continue
                seen.add(i)
                order.append(i)
                for a, b, _ in self.arrows:
                    if a == i and b not in seen:
                        stack.append(b)
                    if b == i and a not in seen:
                        stack.append(a)
        pos = {i: n for n, i in enumerate(order)}
        # constraints checked when node i is placed, against earlier nodes
        forced = [[] for _ in range(k)]
        fibres = [[] for _ in range(k)]
        checks = [[] for _ in range(k)]
        for a, b, f in self.arrows:
            t = f.comps[c]
            if pos[a] < pos[b]:
                forced[b].append((a, t))
            elif pos[b] < pos[a]:
                pre = {}
                for x, y in enumerate(t):
                    pre.setdefault(y, []).append(x)
                fibres[a].append((b, pre))
            else:
                checks[a].append(t)
        out = []
        cur = [None] * k

        def candidates(i):
            cands = None
            for a, t in forced[i]:
                x = t[cur[a]]
                if cands is None:
                    cands = [x]
                elif x not in cands:
                    return []
            for b, pre in fibres[i]:
                got = pre.get(cur[b], [])
                cands = got if cands is None else [x for x in cands if x in got]
            if cands is None:
                cands = range(nodes[i].sizes[c])
            return [x for x in cands if all(t[x] == x for t in checks[i])]

        def rec(n):
            if n == k:
                out.append(tuple(cur))
                return
            i = order[n]
            for x in candidates(i):
                cur[i] = x
                rec(n + 1)
            cur[i] = None

        rec(0)
        out.sort()
        return out

    def pair(self, maps):
        """Induced map into the apex from a cone ``{node index: map}``.

        Nodes that are not given are filled in along arrows; raises when the
        given maps do not form a cone.
        """
        maps = dict(maps)
        changed = True
        while changed and len(maps) < len(self.nodes):
            changed = False
            for i, j, f in self.arrows:
                if i in maps and j not in maps:
                    maps[j] = f @ maps[i]
                    changed = True
        if len(maps) < len(self.nodes):
            raise ShapeError("cone does not determine every node")
        srcs = {m.src for m in maps.values()}
        if len(srcs) != 1:
            raise ShapeError("cone maps have different sources")
        x = srcs.pop()
        comps = []
        for c in range(self.base.n_objects):
            idx = self.index[c]
            cols = [maps[i].comps[c] for i in range(len(self.nodes))]
            row = []
            for e in range(x.sizes[c]):
                t = tuple(col[e] for col in cols)
                if t not in idx:
                    raise ShapeError("maps do not form a cone over the diagram")
                row.append(idx[t])
            comps.append(tuple(row))
        return PshMor(x, self.apex, tuple(comps))


class Colimit:
    """Colimit cocone; ``legs[i]: nodes[i] -> apex``."""

    def __init__(self, nodes, arrows, base=None):
        self.nodes = tuple(nodes)
        self.arrows = tuple(arrows)
        if not self.nodes and base is None:
            raise ShapeError("empty diagram needs an explicit base category")
        self.base = base if base is not None else self.nodes[0].base
        for i, j, f in self.arrows:
            if f.src != self.nodes[i] or f.dst != self.nodes[j]:
                raise ShapeError(f"arrow {i}->{j} does not match its endpoints")
        cat = self.base
        self.members = []      # per object: list of classes, each a list of (node, x)
        self.cls = []          # per object: dict (node, x) -> class index
        for c in range(cat.n_objects):
            flat = [(i, x) for i, n in enumerate(self.nodes) for x in range(n.sizes[c])]
            parent = {e: e for e in flat}

            def find(e):
                while parent[e] != e:
                    parent[e] = parent[parent[e]]
                    e = parent[e]
                return e

            for i, j, f in self.arrows:
                for x, y in enumerate(f.comps[c]):
                    ra, rb = find((i, x)), find((j, y))
                    if ra != rb:
                        if rb < ra:
                            ra, rb = rb, ra
                        parent[rb] = ra
            classes = {}
            order = []
            for e in flat:
                r = find(e)
                if r not in classes:
                    classes[r] = len(order)
                    order.append([])
                order[classes[r]].append(e)
            self.members.append(order)
            self.cls.append({e: classes[find(e)] for e in flat})
        act = []
        for f in range(cat.n_morphisms):
            s, d = cat.src[f], cat.dst[f]
            row = []
            for members in self.members[d]:
                i, x = members[0]
                row.append(self.cls[s][(i, self.nodes[i].act[f][x])])
            act.append(tuple(row))
        self.apex = Presheaf(cat, tuple(len(m) for m in self.members), tuple(act))
        self.legs = tuple(
            PshMor(node, self.apex,
                   tuple(tuple(self.cls[c][(i, x)] for x in range(node.sizes[c]))
                         for c in range(cat.n_objects)))
            for i, node in enumerate(self.nodes))

    def representative(self, c, k):
        """Some ``(node, element)`` in class ``k`` at object ``c``."""
        return self.members[c][k][0]

    def copair(self, maps):
        """Induced map out of the apex from a cocone ``{node index: map}``."""
        maps = dict(maps)
        changed = True
        while changed and len(maps) < len(self.nodes):
            changed = False
            for i, j, f in self.arrows:
                if j in maps and i not in maps:
                    maps[i] = maps[j] @ f
                    changed = True
        if len(maps) < len(self.nodes):
            raise ShapeError("cocone does not determine every node")
        tgts = {m.dst for m in maps.values()}
        if len(tgts) != 1:
            raise ShapeError("cocone maps have different targets")
        y = tgts.pop()
        comps = []
        for c in range(self.base.n_objects):
            row = []
            for members in self.members[c]:
                vals = {maps[i].comps[c][x] for i, x in members}
                if len(vals) != 1:
                    raise ShapeError("maps do not form a cocone under the diagram")
                row.append(vals.pop())
            comps.append(tuple(row))
        return PshMor(self.apex, y, tuple(comps))


def finite_limit(nodes, arrows=(), base=None):
    return _limit(tuple(nodes), tuple(arrows), base)


@lru_cache(maxsize=4096)
def _limit(nodes, arrows, base):
    return Limit(nodes, arrows, base)


def finite_colimit(nodes, arrows=(), base=None):
    return _colimit(tuple(nodes), tuple(arrows), base)


@lru_cache(maxsize=1024)
def _colimit(nodes, arrows, base):
    return Colimit(nodes, arrows, base)


class Product(Limit):
    """Binary product with pair-index ``x * |b| + y`` at each object."""

    def __init__(self, a, b):
        super().__init__((a, b), ())
        self.fst, self.snd = self.legs

    def pair(self, f, g=None):
        if g is None:
            return super().pair(f)
        return super().pair({0: f, 1: g})

    def idx(self, c, x, y):
        return x * self.nodes[1].sizes[c] + y


@lru_cache(maxsize=4096)
def product(a, b):
    return Product(a, b)


def times(f, g):
    """``f x g : A x B -> A' x B'``."""
    src = product(f.src, g.src)
    dst = product(f.dst, g.dst)
    comps = []
    for c in range(src.base.n_objects):
        nb = g.src.sizes[c]
        nb2 = g.dst.sizes[c]
        fc, gc = f.comps[c], g.comps[c]
        comps.append(tuple(fc[x] * nb2 + gc[y]
                           for x in range(f.src.sizes[c]) for y in range(nb)))
    return PshMor(src.apex, dst.apex, tuple(comps))


def pullback(f, g):
    """Pullback of ``f: A -> C`` and ``g: B -> C``; nodes are ``(A, B, C)``."""
    if f.dst != g.dst:
        raise ShapeError("pullback of maps with different codomains")
    return finite_limit((f.src, g.src, f.dst), ((0, 2, f), (1, 2, g)))


def equalizer(f, g):
    if f.src != g.src or f.dst != g.dst:
        raise ShapeError("equalizer of non-parallel maps")
    return finite_limit((f.src, f.dst), ((0, 1, f), (0, 1, g)))


def terminal(base):
    return terminal_presheaf(base)


def coproduct(a, b):
    return finite_colimit((a, b))


def pushout(f, g):
    """Pushout of ``f: C -> A`` and ``g: C -> B``; nodes are ``(A, B, C)``."""
    if f.src != g.src:
        raise ShapeError("pushout of maps with different domains")
    return finite_colimit((f.dst, g.dst, f.src), ((2, 0, f), (2, 1, g)))


def assoc(a, b, c):
    """The iso ``(a x b) x c -> a x (b x c)``."""
    left = product(product(a, b).apex, c)
    right = product(a, product(b, c).apex)
    ab, bc = product(a, b), product(b, c)
    return right.pair(ab.fst @ left.fst, bc.pair(ab.snd @ left.fst, left.snd))


def swap(a, b):
    ab, ba = product(a, b), product(b, a)
    return ba.pair(ab.snd, ab.fst)


def unit_right(a):
    """The iso ``a x 1 -> a``."""
    return product(a, terminal_presheaf(a.base)).fst


# ---------------------------------------------------------------------------
# independent certification by competing cones


def cones_from(test, nodes, arrows):
    """Every cone from ``test`` over the diagram, by brute force."""
    options = [enumerate_pshmors(test, n) for n in nodes]
    out = []

    def rec(i, chosen):
        if i == len(nodes):
            out.append(tuple(chosen))
            return
        for m in options[i]:
            chosen.append(m)
            if all(f @ chosen[a] == chosen[b] for a, b, f in arrows
                   if a <= i and b <= i):
                rec(i + 1, chosen)
            chosen.pop()

    rec(0, [])
    return out


def certify_limit(apex, legs, nodes, arrows, tests):
    """Check the universal property of a cone against each test object.

    For every test presheaf ``T`` all cones from ``T`` are enumerated and each
    must factor through ``legs`` by exactly one map ``T -> apex``.  Returns a
    list of failure messages.
    """
    errs = []
    for a, b, f in arrows:
        if f @ legs[a] != legs[b]:
            errs.append("legs do not form a cone")
            return errs
    for t in tests:
        cands = enumerate_pshmors(t, apex)
        seen = {}
        for h in cands:
            key = tuple(l @ h for l in legs)
            seen.setdefault(key, []).append(h)
        cones = cones_from(t, nodes, arrows)
        for cone in cones:
            n = len(seen.get(tuple(cone), ()))
            if n != 1:
                errs.append(f"cone from test object {t.sizes} factors {n} times")
        if set(seen) - set(cones):
            errs.append("apex maps produce non-cones")
    return errs


def certify_colimit(apex, legs, nodes, arrows, tests):
    """Dual of :func:`certify_limit` using cocones into each test object."""
    errs = []
    for a, b, f in arrows:
        if legs[b] @ f != legs[a]:
            errs.append("legs do not form a cocone")
            return errs
    for t in tests:
        options = [enumerate_pshmors(n, t) for n in nodes]
        cocones = []

        def rec(i, chosen):
            if i == len(nodes):
                cocones.append(tuple(chosen))
                return
            for m in options[i]:
                chosen.append(m)
                if all(chosen[b] @ f == chosen[a] for a, b, f in arrows
                       if a <= i and b <= i):
                    rec(i + 1, chosen)
                chosen.pop()

        rec(0, [])
        seen = {}
        for h in enumerate_pshmors(apex, t):
            seen.setdefault(tuple(h @ l for l in legs), []).append(h)
        for cc in cocones:
            n = len(seen.get(cc, ()))
            if n != 1:
                errs.append(f"cocone into test object {t.sizes} factors {n} times")
    return errs


def comparison_is_iso(cone_apex, cone_legs, limit):
    """Whether the induced map from a given cone into ``limit`` is an iso."""
    m = limit.pair(dict(enumerate(cone_legs)))
    return m.is_iso()


__all__ = [
    "Limit", "Colimit", "Product", "finite_limit", "finite_colimit", "product",
    "times", "pullback", "equalizer", "terminal", "coproduct", "pushout",
    "assoc", "swap", "unit_right", "certify_limit", "certify_colimit",
    "cones_from", "comparison_is_iso", "identity",
]
