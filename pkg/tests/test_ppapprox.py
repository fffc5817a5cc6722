import itertools
from dataclasses import replace

import pytest

from liftlab.fincat import ShapeError, enumerate_pshmors, terminal_presheaf
from liftlab.fixtures import ARROW, arrow_map, arrow_psh, bang, fmap, fs
from liftlab.ppapprox import (BoundaryApprox, PushoutProduct, approx_postcompose,
                              approx_pullback, approx_to_slice, approximates, assoc_transfer,
                              boundary_approx_errors, canonical_approx, check_pp_approx,
                              pp_approx_errors, q_object)
from liftlab.topos import exponential, hom_pre, product
from liftlab.topos.elements import el_map, el_projection
from liftlab.universe import bounded_presheaves

from oracles import TERMINAL, brute_colimit_sizes

SET_MAPS = [m for x in bounded_presheaves(TERMINAL, 2) for y in bounded_presheaves(TERMINAL, 2)
            for m in enumerate_pshmors(x, y)]
POINT = fmap(1, 2, [0])
P32 = fmap(3, 2, [0, 1, 1])


def test_pushout_product_of_points_in_two():
    pp = PushoutProduct(POINT, POINT)
    # {0} x 2 and 2 x {0} glued along {0} x {0}: an L-shape with three cells
    assert pp.candidate.sizes == (3,)
    assert pp.incl.comps == ((0, 1, 2),)


@pytest.mark.parametrize("dV", SET_MAPS, ids=lambda m: str(m.comps[0]))
def test_pushout_product_size_matches_component_count(dV):
    for dL in SET_MAPS:
        pp = PushoutProduct(dV, dL)
        col = pp.colim
        assert list(pp.candidate.sizes) == brute_colimit_sizes(col.nodes, col.arrows)


def test_canonical_approx_passes_on_all_set_boundary_pairs():
    n = 0
    for dV, dL in itertools.product(SET_MAPS, SET_MAPS):
        for p in (bang(2), P32):
            a = canonical_approx(dV, dL, p)
            assert pp_approx_errors(a) == []
            n += 1
    assert n == 2 * len(SET_MAPS) ** 2


def test_canonical_approx_on_arrow():
    V = arrow_psh(2, 1, [0])
    dV = arrow_map(arrow_psh(1, 0, []), V, [0], [])
    L = arrow_psh(2, 1, [1])
    dL = arrow_map(arrow_psh(2, 0, []), L, [0, 1], [])
    e = arrow_map(arrow_psh(3, 2, [0, 2]), arrow_psh(2, 1, [0]), [0, 1, 0], [0, 0])
    a = canonical_approx(dV, dL, e)
    assert check_pp_approx(a)
    assert approximates(dV, dL, a.incl, e)


def test_q_object_is_the_exponential_of_the_pushout():
    for dV, dL in itertools.product(SET_MAPS[:6], SET_MAPS[:6]):
        pp = PushoutProduct(dV, dL)
        assert q_object(dV, dL, fs(3)).apex.sizes == exponential(pp.candidate, fs(3)).exp.sizes


def test_broken_isos_are_reported():
    a = canonical_approx(POINT, POINT, P32)
    be = a.approx_E
    # swap two elements of [D, E] in the iso
    swap = list(range(be.iso.dst.sizes[0]))
    swap[0], swap[1] = swap[1], swap[0]
    bad_iso = replace(be.iso, comps=(tuple(swap[k] for k in be.iso.comps[0]),))
    errs = boundary_approx_errors(replace(be, iso=bad_iso))
    assert "inverse . iso is not the identity" in errs
    assert not check_pp_approx(replace(a, approx_E=replace(be, iso=bad_iso)))


def test_wrong_inclusion_fails_the_check():
    a = canonical_approx(POINT, POINT, P32)
    bad = replace(a, incl=fmap(3, 4, [0, 1, 3]))
    assert "incl does not realize the approximation of B" in pp_approx_errors(bad)


def _same_kernel(incl, image, n_dom, size):
    """Maps ``n_dom -> size`` agree on ``incl``'s image iff they agree on ``image``."""
    for f in itertools.product(range(size), repeat=n_dom):
        for g in itertools.product(range(size), repeat=n_dom):
            on_incl = all(f[y] == g[y] for y in incl)
            on_image = all(f[y] == g[y] for y in image)
            if on_incl != on_image:
                return False
    return True


def _transported(a, perm):
    """Precompose a canonical structure with an automorphism of the candidate."""
    sigma = fmap(len(perm), len(perm), perm)
    inv = sigma.inverse()

    def move(b):
        de = hom_pre(sigma, b.target)
        back = hom_pre(inv, b.target)
        return BoundaryApprox(b.dV, b.dL, b.candidate, b.target, de @ b.iso, b.inverse @ back)

    return replace(a, approx_E=move(a.approx_E), approx_B=move(a.approx_B), incl=a.incl @ sigma)


def test_deciding_approximation_over_every_candidate_inclusion():
    a = canonical_approx(POINT, POINT, P32)
    image = set(a.incl.comps[0])
    seen_true = seen_false = 0
    for incl in enumerate_pshmors(fs(3), fs(4)):
        got = approximates(a.dV, a.dL, incl, P32)
        table = incl.comps[0]
        if sorted(table) == sorted(image):
            # a witness: the canonical isos moved along the permutation
            perm = [a.incl.comps[0].index(y) for y in table]
            assert check_pp_approx(_transported(a, perm))
            assert got
            seen_true += 1
        else:
            # some pair of maps is told apart by one side only
            assert not (_same_kernel(table, image, 4, 3) and _same_kernel(table, image, 4, 2))
            assert not got
            seen_false += 1
    assert seen_true == 6 and seen_false == 58


def test_size_mismatch_does_not_approximate():
    a = canonical_approx(POINT, POINT, P32)
    assert not approximates(a.dV, a.dL, fmap(2, 4, [0, 1]), P32)
    assert not approximates(a.dV, a.dL, fmap(4, 4, [0, 1, 2, 3]), P32)


def _triples():
    maps = [fmap(0, 1, []), POINT, fmap(0, 2, []), fmap(1, 1, [0])]
    for dU, dV, dW in itertools.product(maps, repeat=3):
        yield dU, dV, dW


def test_both_bracketings_agree_on_canonical_inclusions():
    n = 0
    for dU, dV, dW in _triples():
        for p in (bang(2), P32):
            aUV = canonical_approx(dU, dV, p)
            aVW = canonical_approx(dV, dW, p)
            incl = canonical_approx(dU, aVW.incl, p).incl
            first, second = assoc_transfer(aUV, aVW, incl, p)
            assert first == second is True
            n += 1
    assert n == 128


def test_both_bracketings_agree_on_other_inclusions():
    p = P32
    aUV = canonical_approx(POINT, POINT, p)
    aVW = canonical_approx(POINT, POINT, p)
    canon = canonical_approx(POINT, aVW.incl, p).incl
    k, n = canon.src.sizes[0], canon.dst.sizes[0]
    reordered = tuple(reversed(canon.comps[0]))
    tables = [canon.comps[0], reordered]
    tables += list(itertools.islice(itertools.permutations(range(n), k), 0, None, 1999))
    answers = []
    for table in tables:
        first, second = assoc_transfer(aUV, aVW, fmap(k, n, table), p)
        assert first == second
        answers.append(first)
    assert answers[:2] == [True, True]
    assert False in answers


def test_assoc_transfer_needs_a_shared_middle_map():
    a = canonical_approx(POINT, POINT, P32)
    b = canonical_approx(fmap(0, 1, []), POINT, P32)
    with pytest.raises(ShapeError):
        assoc_transfer(a, b, a.incl, P32)


# -- stability -----------------------------------------------------------------------


def test_approx_to_slice_and_pullback():
    a = canonical_approx(POINT, POINT, P32)
    s = approx_to_slice(a, fs(2))
    assert check_pp_approx(s)
    back = approx_pullback(s, fmap(1, 2, [1]))
    assert check_pp_approx(back)
    assert back.candidate.sizes == a.candidate.sizes
    with pytest.raises(ShapeError):
        approx_to_slice(s, fs(2))


def test_approx_pullback_and_postcompose_on_arrow():
    one = terminal_presheaf(ARROW)
    C = arrow_psh(2, 1, [0])
    p = arrow_map(C, one, [0, 0], [0])
    fC, f1 = el_projection(C), el_projection(one)
    V = arrow_psh(2, 1, [0])
    dV = arrow_map(arrow_psh(1, 0, []), V, [0], [])
    L = arrow_psh(2, 1, [1])
    dJ = arrow_map(arrow_psh(2, 0, []), L, [0, 1], [])
    e = arrow_map(arrow_psh(3, 2, [0, 2]), arrow_psh(2, 1, [0]), [0, 1, 0], [0, 0])
    dJ1, e1 = f1.restrict_mor(dJ), f1.restrict_mor(e)
    fib = el_map(p)
    a = canonical_approx(fC.restrict_mor(dV), fib.restrict_mor(dJ1), fib.restrict_mor(e1),
                         ambient=C)
    assert check_pp_approx(a)
    b = approx_postcompose(a, p, dJ1, e1)
    assert pp_approx_errors(b) == []
    canon = canonical_approx(b.dV, dJ1, e1, ambient=one)
    assert canon.candidate.sizes == b.candidate.sizes
    assert approximates(b.dV, dJ1, b.incl, e1)
    D = arrow_psh(3, 2, [0, 1])
    c = approx_pullback(a, arrow_map(D, C, [0, 0, 1], [0, 0]))
    assert pp_approx_errors(c) == []
    with pytest.raises(ShapeError):
        approx_postcompose(a, p, dJ1, f1.restrict_mor(arrow_map(V, one, [0, 0], [0])))


def test_product_shapes():
    a = canonical_approx(POINT, fmap(0, 1, []), bang(2))
    assert a.incl.dst == product(fs(2), fs(1)).apex
    assert a.candidate.sizes == (1,)
