"""End-to-end acceptance checks, one test per criterion.

Each test is named ``test_criterion_NN_...``; a summary line per criterion is
printed at the end of the session by the hook in ``conftest.py``.
"""
import filecmp
import itertools
import shutil
import subprocess
import sys
from importlib import resources

from liftlab.fincat import enumerate_pshmors, identity, terminal_presheaf, to_terminal, yoneda
from liftlab.fixtures import ARROW, arrow_map, arrow_psh, bang, fmap, fs
from liftlab.leibniz import (check_interval, endpoints, interval_from_points, leibniz_transpose,
                             leibniz_untranspose, path_transpose, path_untranspose,
                             pullback_hom_square, pullback_power_cube, transpose_unrestricted,
                             transposed_boundary, untranspose_unrestricted)
from liftlab.lifting import (LiftStruct, PullbackSquare, RetractData,
                             count_sections_independently, enumerate_problems, family_from_struct,
                             family_violation, is_solution, left_compose, left_compose_formula, left_restrict,
                             left_restrict_formula, left_restricted, left_retract, right_restricted,
                             left_retract_formula, right_compose, right_compose_formula,
                             right_pullback, right_pullback_formula, right_pullback_inv,
                             right_pullback_inv_formula, right_restrict, right_restrict_formula,
                             search_lift_struct, solve, uniformity_check, unrestricted,
                             verify_family)
from liftlab.ppapprox import assoc_transfer, canonical_approx, check_pp_approx
from liftlab.relating import (construct_homotopy_witness, diagonal_relation, endpoint_errors,
                              homotopy_data, identity_span, search_homotopy, search_witness,
                              check_witness)
from liftlab.topos import (SliceMor, SliceObj, certify_colimit, certify_limit, curry,
                           exponential, product, pullback, pullback_functor, pushforward, pushout,
                           times, uncurry)
from liftlab.universe import bounded_presheaves

from oracles import CHAIN, TERMINAL, fixture_boundaries, small_presheaves

BOUNDARIES = fixture_boundaries()
PARAMS = bounded_presheaves(TERMINAL, 2)
EMPTY = fmap(0, 1, [])
POINT = fmap(1, 2, [0])
P32 = fmap(3, 2, [0, 1, 1])
I2 = interval_from_points(fmap(1, 2, [0]), fmap(1, 2, [1]))


def _params(bd):
    return bounded_presheaves(bd.base, 2)


def _structures():
    return [(name, F) for name, bd in sorted(BOUNDARIES.items()) for F in search_lift_struct(bd)]


def _maps_into(c, max_size=1):
    return [m for p in small_presheaves(c.base, max_size) for m in enumerate_pshmors(p, c)]


# -- 1 ------------------------------------------------------------------------------------


def _limit_instances():
    n = 0
    for cat in (TERMINAL, ARROW, CHAIN):
        tests = [yoneda(cat, c) for c in range(cat.n_objects)]
        ps = small_presheaves(cat, 1 if cat is CHAIN else 2)
        for c in ps[:6]:
            for f, g in itertools.product(_maps_into(c)[:4], repeat=2):
                pb = pullback(f, g)
                assert certify_limit(pb.apex, pb.legs, pb.nodes, pb.arrows, tests) == []
                po = pushout(pb.legs[0], pb.legs[1])
                assert certify_colimit(po.apex, po.legs, po.nodes, po.arrows, ps[:4]) == []
                n += 2
    return n


def _exponential_instances():
    # maps T x A -> B correspond to maps T -> [A, B] through curry and uncurry
    n = 0
    for cat in (TERMINAL, ARROW):
        ps = small_presheaves(cat, 2)[:6]
        tests = small_presheaves(cat, 1)
        for a, b in itertools.product(ps, repeat=2):
            e = exponential(a, b).exp
            for t in tests:
                left = enumerate_pshmors(product(t, a).apex, b)
                right = enumerate_pshmors(t, e)
                assert len(left) == len(right)
                assert sorted(curry(h, t, a).comps for h in left) == sorted(k.comps for k in right)
                assert all(uncurry(curry(h, t, a), a, b) == h for h in left)
            n += 1
    return n


def _pushforward_instances():
    # slice maps p^* Z -> X correspond to slice maps Z -> p_* X
    n = 0
    for cat in (TERMINAL, ARROW):
        ps = small_presheaves(cat, 2)
        bases = ps[1:5]
        for c, d in itertools.product(bases, repeat=2):
            for p in enumerate_pshmors(c, d)[:2]:
                for xt in ps[:3]:
                    for anc in enumerate_pshmors(xt, c)[:1]:
                        x = SliceObj(xt, anc)
                        pf = pushforward(p, x)
                        for zt in ps[:3]:
                            for za in enumerate_pshmors(zt, d)[:1]:
                                z = SliceObj(zt, za)
                                pz = pullback_functor(p, z)
                                hs = [m for m in enumerate_pshmors(pz.total, x.total)
                                      if x.anchor @ m == pz.anchor]
                                ks = [m for m in enumerate_pshmors(z.total, pf.obj.total)
                                      if pf.obj.anchor @ m == z.anchor]
                                assert len(hs) == len(ks)
                                for h in hs:
                                    k = pf.transpose(z, SliceMor(pz, x, h))
                                    assert pf.untranspose(z, k).map == h
                                n += 1
    return n


def test_criterion_01_topos_substrate_is_certified():
    counts = [_limit_instances(), _exponential_instances(), _pushforward_instances()]
    assert all(k > 0 for k in counts)
    assert sum(counts) >= 200, counts


# -- 2 ------------------------------------------------------------------------------------


def _all_solutions_family(bd, params):
    probs = [p for x in params for p in enumerate_problems(bd, x)]
    options = []
    for prob in probs:
        xv = product(prob.param, bd.V).apex
        options.append([s for s in enumerate_pshmors(xv, bd.E) if is_solution(bd, prob, s)])
    for choice in itertools.product(*options):
        yield dict(zip(probs, choice))


def test_criterion_02_representability_round_trip():
    for name, F in _structures():
        bd = F.boundary
        fam = family_from_struct(F)
        assert LiftStruct.from_solver(bd, fam) == F, name
        assert verify_family(bd, fam, _params(bd)), name
    rejected = 0
    for name in ("empty-to-point", "point-in-two"):
        bd = BOUNDARIES[name]
        for fam in _all_solutions_family(bd, PARAMS):
            if not verify_family(bd, fam, PARAMS):
                assert family_violation(bd, fam, PARAMS)[0] == "not uniform"
                rejected += 1
    assert rejected >= 5


# -- 3 ------------------------------------------------------------------------------------


def test_criterion_03_uniformity_on_every_fixture_structure():
    checked = 0
    for name, F in _structures():
        assert uniformity_check(F, _params(F.boundary)), name
        checked += 1
    assert checked == sum(len(search_lift_struct(bd)) for bd in BOUNDARIES.values())


# -- 4 ------------------------------------------------------------------------------------


def _agree(G, formula, params=PARAMS):
    n = 0
    for x in params:
        for prob in enumerate_problems(G.boundary, x):
            assert solve(G, prob) == formula(prob)
            n += 1
    return n


def _set_unrestricted():
    return [bd for bd in BOUNDARIES.values()
            if bd.is_unrestricted and bd.base == TERMINAL and search_lift_struct(bd)]


def test_criterion_04_constructions_match_their_formulas():
    checked = dict.fromkeys(["right_restrict", "right_pullback", "right_pullback_inv",
                             "right_compose", "left_restrict", "left_compose", "left_retract"], 0)
    for bd in _set_unrestricted():
        p, B, V = bd.right, bd.B, bd.V
        for F in search_lift_struct(bd):
            for q in enumerate_pshmors(fs(1), B) + [identity(B)]:
                G = right_restrict(F, q)
                checked["right_restrict"] += _agree(G, lambda pr: right_restrict_formula(F, q, pr))
                pb = pullback(q, p)
                square = PullbackSquare(pb.legs[0], pb.legs[1], q, p)
                H = right_pullback(G, square)
                checked["right_pullback"] += _agree(
                    H, lambda pr: right_pullback_formula(G, square, pr))
                checked["right_pullback_inv"] += _agree(
                    right_pullback_inv(H, square),
                    lambda pr: right_pullback_inv_formula(H, square, pr))
            for j in (identity(V), to_terminal(V)):
                G = left_restrict(F, j)
                checked["left_restrict"] += _agree(G, lambda pr: left_restrict_formula(F, j, pr))
            for upper in enumerate_pshmors(fs(2), bd.E)[:3]:
                for Fp in search_lift_struct(unrestricted(bd.left, upper))[:3]:
                    C = right_compose(Fp, F)
                    checked["right_compose"] += _agree(
                        C, lambda pr: right_compose_formula(Fp, F, pr))
            first = fmap(0, bd.U.sizes[0], [])
            for Fp in search_lift_struct(unrestricted(first, p))[:3]:
                C = left_compose(Fp, F)
                checked["left_compose"] += _agree(C, lambda pr: left_compose_formula(Fp, F, pr))
    rd = RetractData(i0=fmap(0, 1, []), j0=identity(fs(1)), m=identity(fs(0)),
                     n=identity(fs(0)), s=fmap(1, 2, [1]), r=bang(2), s2=fmap(1, 2, [1]),
                     r2=bang(2))
    for F in search_lift_struct(unrestricted(fmap(0, 2, []), bang(2))):
        R = left_retract(F, rd)
        checked["left_retract"] += _agree(R, lambda pr: left_retract_formula(F, rd, pr))
    assert all(n > 0 for n in checked.values()), checked


# -- 5 ------------------------------------------------------------------------------------


LEIBNIZ_CASES = [(EMPTY, EMPTY, identity(fs(1)), bang(2)),
                 (POINT, EMPTY, identity(fs(1)), bang(2)),
                 (POINT, EMPTY, identity(fs(1)), P32),
                 (EMPTY, POINT, bang(2), P32)]


def _both_ways(sources, targets, there, back):
    assert [back(there(F)) for F in sources] == sources
    assert [there(back(G)) for G in targets] == targets
    assert len(sources) == len(targets)


def test_criterion_05_transposes_are_bijections():
    for bd in BOUNDARIES.values():
        if bd.is_unrestricted:
            for q in [identity(bd.B)] + _maps_into(bd.B)[:2]:
                pb = pullback(q, bd.right)
                sq = PullbackSquare(pb.legs[0], pb.legs[1], q, bd.right)
                src = search_lift_struct(right_restricted(bd.left, bd.right, q, bd.ambient))
                dst = search_lift_struct(unrestricted(bd.left, sq.side, bd.ambient))
                _both_ways(src, dst, lambda F: right_pullback(F, sq),
                           lambda G: right_pullback_inv(G, sq))
    for dV, dL, l, p in LEIBNIZ_CASES:
        a = canonical_approx(dV, dL, p)
        bd = left_restricted(a.incl, times(identity(dV.dst), l), p)
        src = search_lift_struct(bd)
        new, _ = transposed_boundary(a, l)
        _both_ways(src, search_lift_struct(new), lambda F: leibniz_transpose(F, a, l),
                   lambda G: leibniz_untranspose(G, a, l))
        target = transpose_unrestricted(src[0], a, l).boundary
        _both_ways(src, search_lift_struct(target), lambda F: transpose_unrestricted(F, a, l),
                   lambda G: untranspose_unrestricted(G, a, l))
    for dV, p in ((EMPTY, P32), (POINT, bang(2)), (EMPTY, bang(2))):
        cert = check_interval(I2, [p.src, p.dst])
        a = canonical_approx(dV, I2.dI, p)
        bd = left_restricted(a.incl, times(identity(dV.dst), to_terminal(I2.I)), p)
        src = search_lift_struct(bd)
        _, _, ends = endpoints(I2, p)
        target = unrestricted(dV, ends)
        _both_ways(src, search_lift_struct(target), lambda F: path_transpose(F, a, I2, cert, p),
                   lambda G: path_untranspose(G, a, I2, cert, p))


# -- 6 ------------------------------------------------------------------------------------


SET_MAPS = [m for x in bounded_presheaves(TERMINAL, 2) for y in bounded_presheaves(TERMINAL, 2)
            for m in enumerate_pshmors(x, y)]


def test_criterion_06_pushout_product_approximation():
    n = 0
    for dV, dL in itertools.product(SET_MAPS, repeat=2):
        for p in (bang(2), P32):
            assert check_pp_approx(canonical_approx(dV, dL, p))
            n += 1
    V = arrow_psh(2, 1, [0])
    dV = arrow_map(arrow_psh(1, 0, []), V, [0], [])
    dL = arrow_map(arrow_psh(2, 0, []), arrow_psh(2, 1, [1]), [0, 1], [])
    e = arrow_map(arrow_psh(3, 2, [0, 2]), arrow_psh(2, 1, [0]), [0, 1, 0], [0, 0])
    assert check_pp_approx(canonical_approx(dV, dL, e))
    triples = 0
    maps = [EMPTY, POINT, fmap(0, 2, []), identity(fs(1))]
    for dU, dV, dW in itertools.product(maps, repeat=3):
        for p in (bang(2), P32):
            aUV, aVW = canonical_approx(dU, dV, p), canonical_approx(dV, dW, p)
            for incl in (canonical_approx(dU, aVW.incl, p).incl,
                         canonical_approx(aUV.incl, dW, p).incl):
                first, second = assoc_transfer(aUV, aVW, incl, p)
                assert first == second
                triples += 1
    assert n > 0 and triples == 2 * 2 * 64


# -- 7 ------------------------------------------------------------------------------------


def test_criterion_07_pullback_hom_square_and_cube():
    for _, dL, l, p in LEIBNIZ_CASES:
        sq = pullback_hom_square(dL, l, p)
        assert sq.certified, sq.errors
    L = arrow_psh(2, 1, [0])
    dL = arrow_map(arrow_psh(1, 0, []), L, [0], [])
    l = arrow_map(L, terminal_presheaf(ARROW), [0, 0], [0])
    p = arrow_map(arrow_psh(3, 2, [0, 2]), arrow_psh(2, 1, [0]), [0, 1, 0], [0, 0])
    assert pullback_hom_square(dL, l, p).certified
    for p in (bang(2), P32):
        for b in (to_terminal(p.dst), identity(p.dst)):
            cube = pullback_power_cube(I2, p, b)
            assert cube.certified, cube.errors
    one = terminal_presheaf(ARROW)
    Iar = arrow_psh(3, 2, [0, 1])
    ia = interval_from_points(arrow_map(one, Iar, [0], [0]), arrow_map(one, Iar, [1], [1]))
    p = arrow_map(arrow_psh(2, 2, [0, 1]), arrow_psh(1, 1, [0]), [0, 0], [0, 0])
    cube = pullback_power_cube(ia, p, to_terminal(p.dst))
    assert cube.certified, cube.errors


# -- 8 ------------------------------------------------------------------------------------


def _agree_pointwise(F1, F2, params):
    for x in params:
        for prob in enumerate_problems(F1.boundary, x):
            if solve(F1, prob) != solve(F2, prob):
                return False
    return True


def test_criterion_08_witness_semantics():
    found_pairs = agree_pairs = constructed = 0
    for name, bd in sorted(BOUNDARIES.items()):
        if name == "left-restricted":
            continue
        structs = search_lift_struct(bd)
        for F1, F2 in itertools.product(structs, structs):
            s = identity_span(F1)
            res = search_witness(F1, F2, s, diagonal_relation(bd.right))
            agree = _agree_pointwise(F1, F2, _params(bd))
            assert res.found == agree, name
            found_pairs += res.found
            agree_pairs += agree
            if bd.base != TERMINAL:
                continue
            if search_homotopy(homotopy_data(F1, F2, s), I2) is not None:
                w = construct_homotopy_witness(F1, F2, s, I2)
                assert check_witness(w)
                assert endpoint_errors(w, I2) == []
                constructed += 1
    assert found_pairs == agree_pairs > 0 and constructed > 0


# -- 9 ------------------------------------------------------------------------------------


def test_criterion_09_search_matches_independent_sections():
    nonempty = empty = 0
    for name, bd in sorted(BOUNDARIES.items()):
        found = search_lift_struct(bd)
        sections = count_sections_independently(bd)
        assert len(found) == sections, name
        assert bool(found) == (sections > 0)
        nonempty += bool(found)
        empty += not found
    assert nonempty and empty


# -- 10 -----------------------------------------------------------------------------------


def _liftlab():
    exe = shutil.which("liftlab")
    return [exe] if exe else [sys.executable, "-m", "liftlab.cli"]


def test_criterion_10_reports_are_byte_identical(tmp_path):
    fixture = str(resources.files("liftlab").joinpath("data/fixture_a.json"))
    outs = []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        proc = subprocess.run(_liftlab() + ["run", fixture, "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(str(out))
    assert filecmp.cmp(outs[0], outs[1], shallow=False)
