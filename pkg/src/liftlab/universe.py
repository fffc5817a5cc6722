"""Bounded universes of presheaves and maps used by exhaustive checks."""
from __future__ import annotations

import itertools
from functools import lru_cache

from .fincat import Presheaf, enumerate_pshmors
from .topos.iso import find_iso


def _structures(base, sizes):
    """All presheaf structures on the given object sizes, by backtracking."""
    free = [f for f in range(base.n_morphisms) if not base.is_identity(f)]
    tables = {}
    for c, i in enumerate(base.ids):
        tables[i] = tuple(range(sizes[c]))
    out = []

    def consistent():
        for g in tables:
            for f in tables:
                if base.dst[f] != base.src[g]:
                    continue
                h = base.comp[g][f]
                if h not in tables:
                    continue
                tg, tf = tables[g], tables[f]
                if tables[h] != tuple(tf[tg[x]] for x in range(len(tg))):
                    return False
        return True

    def rec(k):
        if k == len(free):
            out.append(Presheaf(base, tuple(sizes),
                                tuple(tables[f] for f in range(base.n_morphisms))))
            return
        f = free[k]
        n_src, n_dst = sizes[base.src[f]], sizes[base.dst[f]]
        for t in itertools.product(range(n_src), repeat=n_dst):
            tables[f] = t
            if consistent():
                rec(k + 1)
            del tables[f]

    rec(0)
    return out


@lru_cache(maxsize=64)
def bounded_presheaves(base, max_size, up_to_iso=True):
    """Presheaves on ``base`` with at most ``max_size`` elements per object.

    Ordered by total size, then size vector; one representative per iso
    class when ``up_to_iso``.
    """
    vectors = sorted(itertools.product(range(max_size + 1), repeat=base.n_objects),
                     key=lambda v: (sum(v), v))
    out = []
    for v in vectors:
        reps = []
        for p in _structures(base, v):
            if up_to_iso and any(find_iso(p, q) for q in reps):
                continue
            reps.append(p)
        out.extend(reps)
    return tuple(out)


def maps_between(universe):
    """Every ``(t, Y, X)`` with ``t: Y -> X`` for ``X, Y`` in ``universe``."""
    for x in universe:
        for y in universe:
            for t in enumerate_pshmors(y, x):
                yield t
