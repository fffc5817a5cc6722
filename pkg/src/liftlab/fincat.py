"""Finite categories, presheaves of finite sets and natural transformations.

Everything is concrete: objects and morphisms of a category are integers,
a presheaf stores one set size per object and one function table per
morphism, and elements are the integers ``0..n-1``.  Equality of
presheaves and of natural transformations is on-the-nose equality of
these tables.
"""
from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass, field

DEFAULT_BUDGET = 10**6
_BUDGET = contextvars.ContextVar("liftlab_budget", default=DEFAULT_BUDGET)


class BudgetExceeded(RuntimeError):
    """An enumeration visited more candidates than the active budget allows."""


class ShapeError(ValueError):
    """Maps or objects do not fit together (wrong base, domain or codomain)."""


def get_budget():
    return _BUDGET.get()


@contextmanager
def budget(n):
    """Temporarily change the candidate budget used by every enumeration."""
    token = _BUDGET.set(int(n))
    try:
        yield
    finally:
        _BUDGET.reset(token)


class _Counter:
    __slots__ = ("limit", "n")

    def __init__(self):
        self.limit = _BUDGET.get()
        self.n = 0

    def tick(self, k=1):
        self.n += k
        if self.n > self.limit:
            raise BudgetExceeded(
                f"enumeration exceeded budget of {self.limit} candidates")


# ---------------------------------------------------------------------------
# finite categories


@dataclass(frozen=True, eq=False)
class FinCat:
    """A finite category given by a total composition table.

    ``comp[g][f]`` is the index of ``g . f`` when ``dst[f] == src[g]`` and -1
    otherwise.  ``ids[c]`` is the identity of object ``c``.
    """

    objects: tuple
    morphisms: tuple
    src: tuple
    dst: tuple
    ids: tuple
    comp: tuple

    def __post_init__(self):
        n = len(self.objects)
        homs = [[[] for _ in range(n)] for _ in range(n)]
        into = [[] for _ in range(n)]
        for f in range(len(self.morphisms)):
            homs[self.src[f]][self.dst[f]].append(f)
            into[self.dst[f]].append(f)
        object.__setattr__(self, "_homs", tuple(tuple(tuple(h) for h in row) for row in homs))
        object.__setattr__(self, "_into", tuple(tuple(x) for x in into))
        object.__setattr__(self, "_is_id", frozenset(self.ids))
        object.__setattr__(self, "_key", (self.objects, self.morphisms, self.src,
                                          self.dst, self.ids, self.comp))
        object.__setattr__(self, "_hash", hash(self._key))

    def __eq__(self, other):
        return self is other or (isinstance(other, FinCat) and self._key == other._key)

    def __hash__(self):
        return self._hash

    @property
    def n_objects(self):
        return len(self.objects)

    @property
    def n_morphisms(self):
        return len(self.morphisms)

    def hom(self, a, b):
        return self._homs[a][b]

    def into(self, c):
        """All morphisms with codomain ``c``."""
        return self._into[c]

    def is_identity(self, f):
        return f in self._is_id

    def compose(self, g, f):
        """``g . f``; raises if the pair is not composable."""
        h = self.comp[g][f]
        if h < 0:
            raise ShapeError(f"morphisms {self.morphisms[g]} and {self.morphisms[f]} do not compose")
        return h

    def object_index(self, name):
        return self.objects.index(name)

    def morphism_index(self, name):
        return self.morphisms.index(name)

    def __repr__(self):
        return f"FinCat({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    @classmethod
    def build(cls, objects, morphisms, composites, identities=None):
        """Build a category from names.

        ``morphisms`` is a list of ``(name, src, dst)``; identities are added
        automatically when ``identities`` is None and are named ``id_<obj>``.
        ``composites`` maps ``(g, f)`` name pairs to the name of ``g . f`` for
        the composable pairs not involving identities.
        """
        objects = tuple(objects)
        names, src, dst = [], [], []
        if identities is None:
            identities = {}
            for o in objects:
                names.append(f"id_{o}")
                src.append(objects.index(o))
                dst.append(objects.index(o))
                identities[o] = f"id_{o}"
        for name, s, d in morphisms:
            names.append(name)
            src.append(objects.index(s))
            dst.append(objects.index(d))
        ids = tuple(names.index(identities[o]) for o in objects)
        m = len(names)
        table = [[-1] * m for _ in range(m)]
        for g in range(m):
            for f in range(m):
                if dst[f] != src[g]:
                    continue
                if f in ids:
                    table[g][f] = g
                elif g in ids:
                    table[g][f] = f
                else:
                    key = (names[g], names[f])
                    if key in composites:
                        table[g][f] = names.index(composites[key])
        return cls(objects, tuple(names), tuple(src), tuple(dst), ids,
                   tuple(tuple(r) for r in table))


def validate_fincat(cat):
    """Return a list of violations of the category axioms (empty when valid)."""
    errs = []
    m = cat.n_morphisms
    for c, i in enumerate(cat.ids):
        if cat.src[i] != c or cat.dst[i] != c:
            errs.append(f"identity of {cat.objects[c]} has wrong endpoints")
    for g in range(m):
        for f in range(m):
            h = cat.comp[g][f]
            composable = cat.dst[f] == cat.src[g]
            if composable and h < 0:
                errs.append(f"missing composite {cat.morphisms[g]} . {cat.morphisms[f]}")
            elif not composable and h >= 0:
                errs.append(f"composite given for non-composable {cat.morphisms[g]}, {cat.morphisms[f]}")
            elif composable and (cat.src[h] != cat.src[f] or cat.dst[h] != cat.dst[g]):
                errs.append(f"composite {cat.morphisms[g]} . {cat.morphisms[f]} has wrong endpoints")
    if errs:
        return errs
    for f in range(m):
        if cat.comp[cat.ids[cat.dst[f]]][f] != f or cat.comp[f][cat.ids[cat.src[f]]] != f:
            errs.append(f"identity law fails for {cat.morphisms[f]}")
    for h in range(m):
        for g in cat.into(cat.src[h]):
            for f in cat.into(cat.src[g]):
                if cat.comp[h][cat.comp[g][f]] != cat.comp[cat.comp[h][g]][f]:
                    errs.append(f"associativity fails at {cat.morphisms[h]}, {cat.morphisms[g]}, {cat.morphisms[f]}")
    return errs


def terminal_category():
    return FinCat.build(["*"], [], {})


def discrete_category(n):
    return FinCat.build([f"o{k}" for k in range(n)], [], {})


def arrow_category():
    """The category ``0 -> 1`` with a single non-identity arrow ``a``."""
    return FinCat.build(["0", "1"], [("a", "0", "1")], {})


def parallel_pair_category():
    return FinCat.build(["0", "1"], [("s", "0", "1"), ("t", "0", "1")], {})


# ---------------------------------------------------------------------------
# presheaves


@dataclass(frozen=True)
class FinSetRep:
    size: int
    labels: tuple | None = None

    def label(self, x):
        return self.labels[x] if self.labels else str(x)


@dataclass(frozen=True, eq=False)
class Presheaf:
    """A presheaf of finite sets on ``base``.

    ``act[f]`` for ``f: c' -> c`` is the table of the restriction
    ``P(c) -> P(c')``, so ``act[g . f] == act[f] o act[g]``.
    """

    base: FinCat
    sizes: tuple
    act: tuple
    labels: tuple | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.base, self.sizes, self.act)))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Presheaf) and self._hash == other._hash
            and self.sizes == other.sizes and self.act == other.act
            and self.base == other.base)

    def __hash__(self):
        return self._hash

    def at(self, c):
        labels = self.labels[c] if self.labels else None
        return FinSetRep(self.sizes[c], labels)

    def restrict(self, f, x):
        return self.act[f][x]

    @property
    def total_size(self):
        return sum(self.sizes)

    def elements(self):
        for c, n in enumerate(self.sizes):
            for x in range(n):
                yield c, x

    def with_labels(self, labels):
        return Presheaf(self.base, self.sizes, self.act, tuple(tuple(l) for l in labels))

    def __repr__(self):
        return f"Presheaf(sizes={self.sizes})"


def make_presheaf(base, sizes, act=None, labels=None):
    """Build a presheaf; ``act`` maps non-identity morphisms to tables.

    Keys of ``act`` may be morphism indices or names.  Identity tables are
    filled in automatically.
    """
    act = dict(act or {})
    tables = []
    for f in range(base.n_morphisms):
        if base.is_identity(f):
            tables.append(tuple(range(sizes[base.src[f]])))
            continue
        t = act.get(f, act.get(base.morphisms[f]))
        if t is None:
            raise ShapeError(f"missing action table for {base.morphisms[f]}")
        tables.append(tuple(t))
    return Presheaf(base, tuple(sizes), tuple(tables), labels)


def constant_presheaf(base, n):
    return make_presheaf(base, [n] * base.n_objects,
                         {f: tuple(range(n)) for f in range(base.n_morphisms)})


def terminal_presheaf(base):
    return constant_presheaf(base, 1)


def initial_presheaf(base):
    return constant_presheaf(base, 0)


def validate_presheaf(p):
    errs = []
    cat = p.base
    if len(p.sizes) != cat.n_objects or len(p.act) != cat.n_morphisms:
        return ["table lengths do not match the base category"]
    for f in range(cat.n_morphisms):
        t = p.act[f]
        if len(t) != p.sizes[cat.dst[f]] or any(not 0 <= y < p.sizes[cat.src[f]] for y in t):
            errs.append(f"action of {cat.morphisms[f]} is not a function P(dst) -> P(src)")
    if errs:
        return errs
    for c, i in enumerate(cat.ids):
        if p.act[i] != tuple(range(p.sizes[c])):
            errs.append(f"identity of {cat.objects[c]} acts non-trivially")
    for g in range(cat.n_morphisms):
        for f in cat.into(cat.src[g]):
            h = cat.comp[g][f]
            tg, tf = p.act[g], p.act[f]
            if p.act[h] != tuple(tf[tg[x]] for x in range(len(tg))):
                errs.append(f"functoriality fails at {cat.morphisms[g]} . {cat.morphisms[f]}")
    return errs


def yoneda(base, c):
    """The representable presheaf ``hom(-, c)``; elements follow hom order."""
    sizes, pos = [], []
    for d in range(base.n_objects):
        h = base.hom(d, c)
        sizes.append(len(h))
        pos.append({g: k for k, g in enumerate(h)})
    act = []
    for f in range(base.n_morphisms):
        s, t = base.src[f], base.dst[f]
        act.append(tuple(pos[s][base.comp[g][f]] for g in base.hom(t, c)))
    return Presheaf(base, tuple(sizes), tuple(act))


def yoneda_element_of_identity(base, c):
    """Position of ``id_c`` inside ``yoneda(base, c)`` at object ``c``."""
    return base.hom(c, c).index(base.ids[c])


# ---------------------------------------------------------------------------
# natural transformations


@dataclass(frozen=True, eq=False)
class PshMor:
    src: Presheaf
    dst: Presheaf
    comps: tuple

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(self.comps))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, PshMor) and self._hash == other._hash
            and self.comps == other.comps and self.src == other.src
            and self.dst == other.dst)

    def __hash__(self):
        return self._hash

    def __call__(self, c, x):
        return self.comps[c][x]

    def __matmul__(self, other):
        """``self @ other`` is the composite ``self . other``."""
        return compose(self, other)

    def __repr__(self):
        return f"PshMor({self.comps})"

    @property
    def base(self):
        return self.src.base

    def is_iso(self):
        return all(len(set(t)) == len(t) == self.dst.sizes[c] for c, t in enumerate(self.comps))

    def inverse(self):
        if not self.is_iso():
            raise ShapeError("map is not invertible")
        inv = []
        for c, t in enumerate(self.comps):
            r = [0] * len(t)
            for x, y in enumerate(t):
                r[y] = x
            inv.append(tuple(r))
        return PshMor(self.dst, self.src, tuple(inv))


def make_pshmor(src, dst, comps):
    """A validated presheaf map from per-object tables."""
    m = PshMor(src, dst, tuple(tuple(t) for t in comps))
    errs = validate_pshmor(m)
    if errs:
        raise ShapeError("; ".join(errs))
    return m


def identity(p):
    return PshMor(p, p, tuple(tuple(range(n)) for n in p.sizes))


def compose(*maps):
    """Right-to-left composite: ``compose(h, g, f) == h . g . f``."""
    out = maps[-1]
    for g in reversed(maps[:-1]):
        if g.src != out.dst:
            raise ShapeError("composite of maps with mismatched endpoints")
        out = PshMor(out.src, g.dst,
                     tuple(tuple(gt[y] for y in ft) for gt, ft in zip(g.comps, out.comps)))
    return out


def validate_pshmor(m):
    errs = []
    a, b = m.src, m.dst
    if a.base != b.base:
        return ["source and target live over different categories"]
    cat = a.base
    for c in range(cat.n_objects):
        t = m.comps[c]
        if len(t) != a.sizes[c] or any(not 0 <= y < b.sizes[c] for y in t):
            errs.append(f"component at {cat.objects[c]} is not a function")
    if errs:
        return errs
    for f in range(cat.n_morphisms):
        s, d = cat.src[f], cat.dst[f]
        for x in range(a.sizes[d]):
            if m.comps[s][a.act[f][x]] != b.act[f][m.comps[d][x]]:
                errs.append(f"naturality fails at {cat.morphisms[f]}, element {x}")
                break
    return errs


def to_terminal(p, term=None):
    term = term or terminal_presheaf(p.base)
    return PshMor(p, term, tuple((0,) * n for n in p.sizes))


def from_initial(p):
    return PshMor(initial_presheaf(p.base), p, tuple(() for _ in p.sizes))


def iter_pshmors(a, b, allowed=None, injective=False, counter=None):
    """Yield every natural transformation ``a -> b`` in canonical order.

    The order is lexicographic in the concatenation of the component tables
    (objects in index order).  ``allowed[c][x]`` optionally restricts the
    image of element ``x`` at object ``c`` (None means unrestricted), and
    ``injective`` asks for componentwise injective maps.  The number of
    candidate values tried is charged to the active budget.
    """
    if a.base != b.base:
        raise ShapeError("presheaves over different categories")
    cat = a.base
    counter = counter or _Counter()
    offs, n = [], 0
    for c in range(cat.n_objects):
        offs.append(n)
        n += a.sizes[c]
    var_obj = []
    for c in range(cat.n_objects):
        var_obj.extend([c] * a.sizes[c])
    cons = []
    domains = []
    allow_sets = []
    for c in range(cat.n_objects):
        fs = [f for f in cat.into(c) if not cat.is_identity(f)]
        for x in range(a.sizes[c]):
            cons.append(tuple((offs[cat.src[f]] + a.act[f][x], b.act[f]) for f in fs))
            al = allowed[c][x] if allowed is not None else None
            if al is None:
                domains.append(range(b.sizes[c]))
                allow_sets.append(None)
            else:
                al = sorted(set(al))
                domains.append(al)
                allow_sets.append(frozenset(al))
    sizes_b = b.sizes
    value = [-1] * n
    used = [[False] * sizes_b[c] for c in range(cat.n_objects)] if injective else None
    trails = [None] * n
    pos = [0] * n
    k = 0

    def emit():
        return PshMor(a, b, tuple(tuple(value[offs[c]:offs[c] + a.sizes[c]])
                                  for c in range(cat.n_objects)))

    if n == 0:
        yield emit()
        return
    # iterative depth-first search; trails[k] is None when level k was forced
    descending = True
    while k >= 0:
        if k == n:
            yield emit()
            k -= 1
            descending = False
            continue
        if descending:
            pos[k] = 0
            if value[k] >= 0:
                trails[k] = None
                k += 1
                continue
        else:
            if trails[k] is None:
                k -= 1
                continue
            for w in trails[k]:
                if injective:
                    used[var_obj[w]][value[w]] = False
                value[w] = -1
            if injective:
                used[var_obj[k]][value[k]] = False
            value[k] = -1
        dom = domains[k]
        c = var_obj[k]
        placed = False
        while pos[k] < len(dom):
            y = dom[pos[k]]
            pos[k] += 1
            counter.tick()
            if injective and used[c][y]:
                continue
            value[k] = y
            if injective:
                used[c][y] = True
            trail = []
            ok = True
            for w, bt in cons[k]:
                z = bt[y]
                vw = value[w]
                if vw < 0:
                    al = allow_sets[w]
                    if (al is not None and z not in al) or (injective and used[var_obj[w]][z]):
                        ok = False
                        break
                    value[w] = z
                    if injective:
                        used[var_obj[w]][z] = True
                    trail.append(w)
                elif vw != z:
                    ok = False
                    break
            if ok:
                trails[k] = trail
                placed = True
                break
            for w in trail:
                if injective:
                    used[var_obj[w]][value[w]] = False
                value[w] = -1
            if injective:
                used[c][y] = False
            value[k] = -1
        if placed:
            k += 1
            descending = True
        else:
            trails[k] = ()
            k -= 1
            descending = False


def enumerate_pshmors(a, b, allowed=None, injective=False):
    """All natural transformations ``a -> b`` as a list in canonical order."""
    return list(iter_pshmors(a, b, allowed=allowed, injective=injective))


def count_pshmors(a, b, allowed=None):
    return sum(1 for _ in iter_pshmors(a, b, allowed=allowed))
