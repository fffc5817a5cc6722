"""Small named categories, presheaves and boundaries used by tests, scripts and the CLI."""
from __future__ import annotations

from .fincat import (PshMor, arrow_category, constant_presheaf, make_presheaf, make_pshmor,
                     terminal_category)
from .lifting.core import unrestricted

TERMINAL = terminal_category()
ARROW = arrow_category()


def fs(n):
    """The finite set with ``n`` elements as a presheaf on the terminal category."""
    return constant_presheaf(TERMINAL, n)


def fmap(m, n, table):
    """A function between finite sets given by its table."""
    table = tuple(table)
    if len(table) != m:
        raise ValueError("table length does not match the domain")
    return make_pshmor(fs(m), fs(n), [table])


def bang(m):
    return fmap(m, 1, [0] * m)


def fixture_a():
    """``{} -> 1`` against ``2 -> 1``: exactly two lifting structures."""
    return unrestricted(fmap(0, 1, []), bang(2))


def point_in_two():
    """``{0} -> {0, 1}`` against ``2 -> 1``."""
    return unrestricted(fmap(1, 2, [0]), bang(2))


def arrow_psh(n0, n1, table):
    """A presheaf on ``0 -> 1``: sets of sizes ``n0, n1`` and restriction ``table``."""
    return make_presheaf(ARROW, [n0, n1], {"a": table})


def arrow_map(src, dst, c0, c1):
    return make_pshmor(src, dst, [c0, c1])


__all__ = ["TERMINAL", "ARROW", "fs", "fmap", "bang", "fixture_a", "point_in_two",
           "arrow_psh", "arrow_map", "PshMor"]
