"""Search for natural isomorphisms."""
from __future__ import annotations

from dataclasses import dataclass

from ..fincat import BudgetExceeded, PshMor, iter_pshmors
from .slices import SliceMor, fibres

ISO = "iso"
NOT_ISO = "proven non-iso"
UNKNOWN = "no iso within budget"


@dataclass(frozen=True)
class IsoResult:
    status: str
    iso: PshMor | None = None
    reason: str = ""

    def __bool__(self):
        return self.status == ISO


def find_iso(a, b, allowed=None):
    """Backtracking search for an iso ``a -> b``.

    A size mismatch or an exhausted search is a proof that no iso exists; a
    search cut short by the budget says so instead.
    """
    if a.base != b.base:
        return IsoResult(NOT_ISO, reason="different base categories")
    for c, (m, n) in enumerate(zip(a.sizes, b.sizes)):
        if m != n:
            return IsoResult(NOT_ISO, reason=f"cardinality mismatch at {a.base.objects[c]}: {m} vs {n}")
    try:
        for m in iter_pshmors(a, b, allowed=allowed, injective=True):
            return IsoResult(ISO, m)
    except BudgetExceeded:
        return IsoResult(UNKNOWN, reason="budget exhausted")
    return IsoResult(NOT_ISO, reason="exhaustive search found no iso")


def find_slice_iso(x, y):
    """An iso of slice objects over the same base, as a :class:`SliceMor`."""
    if x.over != y.over:
        return IsoResult(NOT_ISO, reason="different bases")
    fy = fibres(y)
    allowed = [[fy[c][g] for g in x.anchor.comps[c]] for c in range(x.total.base.n_objects)]
    res = find_iso(x.total, y.total, allowed=allowed)
    if res:
        return IsoResult(ISO, SliceMor(x, y, res.iso))
    return res
