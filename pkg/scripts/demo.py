"""Walk through the main computations on the small set-valued fixtures.

Run with ``python3 scripts/demo.py``.
"""
from liftlab.fincat import identity, to_terminal
from liftlab.fixtures import TERMINAL, bang, fixture_a, fmap, fs, point_in_two
from liftlab.leibniz import (check_interval, interval_from_points, path_transpose,
                             path_untranspose)
from liftlab.lifting import (count_sections_independently, enumerate_problems, search_lift_struct,
                             left_restricted, solve, uniformity_check)
from liftlab.ppapprox import canonical_approx
from liftlab.relating import (construct_homotopy_witness, diagonal_relation, identity_span,
                              search_witness)
from liftlab.topos import times
from liftlab.universe import bounded_presheaves


def tables(m):
    return [list(t) for t in m.comps]


def main():
    params = bounded_presheaves(TERMINAL, 2)

    for name, bd in (("empty -> 1 against 2 -> 1", fixture_a()),
                     ("1 -> 2 against 2 -> 1", point_in_two())):
        found = search_lift_struct(bd)
        print(f"{name}: {len(found)} structures "
              f"({count_sections_independently(bd)} by section count)")
        for F in found:
            sols = [tables(solve(F, prob)) for prob in enumerate_problems(bd, fs(1))]
            print(f"  internal {tables(F.internal)}  uniform={uniformity_check(F, params)}  "
                  f"solutions over a point {sols}")

    bd = fixture_a()
    F1, F2 = search_lift_struct(bd)
    diag = diagonal_relation(bd.right)
    for a, b in ((F1, F1), (F1, F2)):
        res = search_witness(a, b, identity_span(a), diag)
        print(f"diagonal witness: found={res.found} after {res.visited} candidates")

    two = interval_from_points(fmap(1, 2, [0]), fmap(1, 2, [1]))
    w = construct_homotopy_witness(F1, F2, identity_span(F1), two)
    print(f"homotopy witness between the two structures: H = {tables(w.H)}")

    p = bang(2)
    cert = check_interval(two, [p.src, p.dst])
    approx = canonical_approx(fmap(1, 2, [0]), two.dI, p)
    bd = left_restricted(approx.incl, times(identity(fs(2)), to_terminal(two.I)), p)
    found = search_lift_struct(bd)
    back = [path_untranspose(path_transpose(F, approx, two, cert, p), approx, two, cert, p)
            for F in found]
    print(f"path transpose round trip on {len(found)} structure(s): {back == found}")


if __name__ == "__main__":
    main()
