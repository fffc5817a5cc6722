
from hypothesis import given, strategies as st

from liftlab.fincat import (enumerate_pshmors, identity, initial_presheaf, terminal_presheaf,
                            yoneda)
from liftlab.fixtures import bang, fmap, fs
from liftlab.topos import (SliceMor, SliceObj, certify_colimit, certify_limit, coproduct, curry,
                           equalizer, exponential, find_iso, find_slice_iso, finite_limit,
                           local_exponential, postcompose, product, pullback, pullback_functor,
                           pullback_functor_mor, pushforward, pushout, times, uncurry)
from liftlab.topos.iso import NOT_ISO

from oracles import (ARROW, CHAIN, TERMINAL, brute_colimit_sizes, brute_limit, fibre_sizes,
                     map_between, presheaf_on, small_presheaves)


# -- limits --------------------------------------------------------------------


def test_pullback_of_distinct_points_is_empty():
    pb = pullback(fmap(1, 2, [0]), fmap(1, 2, [1]))
    assert pb.apex.sizes == (0,)


def test_product_sizes_multiply():
    assert product(fs(2), fs(3)).apex.sizes == (6,)


def test_self_pullback_size_is_sum_of_squared_fibres():
    f = fmap(3, 2, [0, 1, 1])
    assert pullback(f, f).apex.sizes == (sum(k * k for k in fibre_sizes(f)),)


def _maps_into(c, max_size=2):
    return [m for p in small_presheaves(c.base, max_size) for m in enumerate_pshmors(p, c)]


@st.composite
def cospans(draw):
    cat = draw(st.sampled_from((TERMINAL, ARROW, CHAIN)))
    ps = small_presheaves(cat, 2)
    c = draw(st.sampled_from(ps))
    a, b = draw(st.sampled_from(ps)), draw(st.sampled_from(ps))
    f = draw(map_between(a, c))
    g = draw(map_between(b, c))
    return f, g


@given(cospans())
def test_pullback_elements_match_brute_force(fg):
    f, g = fg
    pb = pullback(f, g)
    nodes = (f.src, g.src, f.dst)
    arrows = ((0, 2, f), (1, 2, g))
    assert [list(e) for e in pb.elements] == brute_limit(nodes, arrows)


@given(cospans())
def test_pushout_of_span_matches_component_count(fg):
    f, g = fg
    # push out the span formed by the pullback's legs
    pb = pullback(f, g)
    po = pushout(pb.legs[0], pb.legs[1])
    nodes = (f.src, g.src, pb.apex)
    arrows = ((2, 0, pb.legs[0]), (2, 1, pb.legs[1]))
    assert list(po.apex.sizes) == brute_colimit_sizes(nodes, arrows)


@given(cospans())
def test_equalizer_matches_brute_force(fg):
    f, g = fg
    if f.src != g.src:
        g = f
    eq = equalizer(f, g)
    assert [list(e) for e in eq.elements] == brute_limit((f.src, f.dst), ((0, 1, f), (0, 1, g)))


def test_limit_with_a_cycle_of_arrows():
    # a node with an endomorphism: the limit is the fixed points
    swap2 = fmap(2, 2, [1, 0])
    lim = finite_limit((fs(2),), ((0, 0, swap2),))
    assert lim.apex.sizes == (0,)
    lim = finite_limit((fs(3),), ((0, 0, fmap(3, 3, [0, 2, 1])),))
    assert lim.apex.sizes == (1,)


def test_coproduct_and_pushouts():
    assert coproduct(fs(1), fs(1)).apex.sizes == (2,)
    po = pushout(fmap(0, 2, []), fmap(0, 3, []))
    assert po.apex.sizes == (5,)
    po = pushout(bang(2), bang(2))
    assert po.apex.sizes == (1,)


def test_certified_pullbacks_and_pushouts_on_arrow():
    tests = [yoneda(ARROW, 0), yoneda(ARROW, 1)]
    e = small_presheaves(ARROW, 2)
    n = 0
    for c in e[:6]:
        for f in _maps_into(c)[:6]:
            for g in _maps_into(c)[:4]:
                pb = pullback(f, g)
                assert certify_limit(pb.apex, pb.legs, pb.nodes, pb.arrows, tests) == []
                po = pushout(pb.legs[0], pb.legs[1])
                assert certify_colimit(po.apex, po.legs, po.nodes, po.arrows, e[:5]) == []
                n += 1
    assert n > 20


def test_certification_rejects_a_wrong_apex():
    f = fmap(2, 1, [0, 0])
    pb = pullback(f, f)
    # a cone whose apex is too small is not universal
    diag = pb.pair({0: identity(fs(2)), 1: identity(fs(2))})
    legs = (pb.legs[0] @ diag, pb.legs[1] @ diag, pb.legs[2] @ diag)
    assert certify_limit(fs(2), legs, pb.nodes, pb.arrows, [fs(1)])


# -- exponentials ---------------------------------------------------------------


def test_exponential_sizes():
    assert exponential(fs(2), fs(3)).exp.sizes == (9,)
    for cat in (TERMINAL, ARROW):
        for b in small_presheaves(cat, 2):
            assert exponential(initial_presheaf(cat), b).exp == terminal_presheaf(cat)


def test_exponential_counts_maps_out_of_representable_products():
    a = yoneda(ARROW, 0)
    for b in small_presheaves(ARROW, 2):
        e = exponential(a, b).exp
        for c in range(2):
            n = len(enumerate_pshmors(product(yoneda(ARROW, c), a).apex, b))
            assert e.sizes[c] == n


def test_exponential_from_terminal_is_isomorphic_to_the_target():
    one = yoneda(ARROW, 1)
    for b in small_presheaves(ARROW, 2):
        assert find_iso(exponential(one, b).exp, b)


@st.composite
def curry_data(draw):
    cat = draw(st.sampled_from((TERMINAL, ARROW)))
    ps = small_presheaves(cat, 2)
    x, a, b = (draw(st.sampled_from(ps)) for _ in range(3))
    f = draw(map_between(product(x, a).apex, b))
    return f, x, a


@given(curry_data())
def test_curry_uncurry_round_trip(data):
    f, x, a = data
    g = curry(f, x, a)
    assert uncurry(g, a, f.dst) == f
    assert curry(uncurry(g, a, f.dst), x, a) == g
    ex = exponential(a, f.dst)
    assert ex.ev @ times(g, identity(a)) == f


@given(presheaf_on(max_size=2), presheaf_on(max_size=2))
def test_curry_of_evaluation_is_identity(a, b):
    if a.base != b.base:
        return
    ex = exponential(a, b)
    assert curry(ex.ev, ex.exp, a) == identity(ex.exp)


def test_curry_over_terminal_picks_the_table():
    a, b = fs(2), fs(3)
    ex = exponential(a, b)
    for f in enumerate_pshmors(product(fs(1), a).apex, b):
        k = curry(f, fs(1), a).comps[0][0]
        assert ex.tables[0][k] == f.comps


def test_currying_bijection_by_counting():
    for a in small_presheaves(ARROW, 2)[:5]:
        for b in small_presheaves(ARROW, 2)[:5]:
            e = exponential(a, b).exp
            for x in small_presheaves(ARROW, 1):
                assert len(enumerate_pshmors(product(x, a).apex, b)) == len(enumerate_pshmors(x, e))


# -- slices ---------------------------------------------------------------------


def _slice(anchor):
    return SliceObj(anchor.src, anchor)


def test_pullback_functor_examples():
    x = _slice(fmap(4, 2, [0, 1, 1, 1]))
    assert pullback_functor(fmap(1, 2, [1]), x).total.sizes == (3,)
    assert pullback_functor(fmap(0, 2, []), x).total.sizes == (0,)
    same = pullback_functor(identity(fs(2)), x)
    assert find_slice_iso(same, x)


def test_postcompose_examples():
    x = _slice(fmap(3, 2, [0, 1, 1]))
    assert postcompose(identity(fs(2)), x) == x
    y = postcompose(bang(2), x)
    assert y.total == x.total and y.anchor == bang(3)


def test_frobenius_for_postcomposition():
    for xa in (fmap(3, 2, [0, 1, 1]), fmap(2, 2, [0, 0])):
        for za in (fmap(2, 1, [0, 0]), fmap(3, 1, [0, 0, 0])):
            p = bang(2)
            x, z = _slice(xa), _slice(za)
            lhs = postcompose(p, SliceObj(
                pullback(x.anchor, pullback_functor(p, z).anchor).apex,
                x.anchor @ pullback(x.anchor, pullback_functor(p, z).anchor).legs[0]))
            rhs_pb = pullback(postcompose(p, x).anchor, z.anchor)
            assert find_iso(lhs.total, rhs_pb.apex)


def test_pushforward_examples():
    x = _slice(fmap(5, 2, [0, 0, 1, 1, 1]))
    assert pushforward(bang(2), x).obj.total.sizes == (6,)
    y = _slice(fmap(3, 2, [0, 1, 1]))
    assert find_slice_iso(pushforward(identity(fs(2)), y).obj, y)
    unit = _slice(identity(fs(3)))
    pf = pushforward(fmap(3, 2, [0, 1, 1]), unit).obj
    assert pf.anchor.is_iso()


def test_pushforward_adjunction_bijection_on_arrow():
    ps = small_presheaves(ARROW, 2)
    c, d = ps[4], ps[7]
    checked = 0
    for p in enumerate_pshmors(c, d)[:3]:
        for xt in ps[:5]:
            for anc in enumerate_pshmors(xt, c)[:2]:
                x = SliceObj(xt, anc)
                pf = pushforward(p, x)
                for zt in ps[:4]:
                    for za in enumerate_pshmors(zt, d)[:2]:
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
                        checked += 1
    assert checked > 10


def test_pullback_triangle_identity():
    # epsilon_{p^* z} . p^*(eta_z) = id for p^* -| p_*
    p = fmap(3, 2, [0, 1, 1])
    for za in (fmap(2, 2, [0, 1]), fmap(3, 2, [0, 0, 1]), fmap(1, 2, [1])):
        z = _slice(za)
        pz = pullback_functor(p, z)
        pf = pushforward(p, pz)
        eta = pf.transpose(z, SliceMor(pz, pz, identity(pz.total)))
        eps = pf.untranspose(pf.obj, SliceMor(pf.obj, pf.obj, identity(pf.obj.total)))
        mid = pullback_functor_mor(p, eta)
        assert (eps.map @ mid.map) == identity(pz.total)


def test_postcompose_triangle_identities():
    # for p_! -| p^*: the unit x -> p^* p_! x followed by the counit is the identity
    p = fmap(3, 2, [0, 1, 1])
    for xa in (fmap(2, 3, [0, 2]), fmap(3, 3, [1, 1, 2])):
        x = _slice(xa)
        px = postcompose(p, x)
        back = pullback(p, px.anchor)
        unit = back.pair({0: x.anchor, 1: identity(x.total)})
        counit = back.legs[1]
        assert counit @ unit == identity(x.total)
        assert back.legs[0] @ unit == x.anchor


def test_local_exponential_examples():
    b = _slice(fmap(3, 2, [0, 1, 1]))
    one = _slice(identity(fs(2)))
    assert find_slice_iso(local_exponential(one, b), b)
    a0, b0 = _slice(bang(2)), _slice(bang(3))
    assert local_exponential(a0, b0).total.sizes == exponential(fs(2), fs(3)).exp.sizes


def test_local_exponential_of_a_product_is_a_pullback():
    # [A x B, E]_B is B x_[A,B] [A,E] for E -> B, with |A| = 2, |B| = 2, |E| = 4
    A, B = fs(2), fs(2)
    e = fmap(4, 2, [0, 0, 1, 1])
    ab = product(A, B)
    lhs = local_exponential(SliceObj(ab.apex, ab.snd), _slice(e))
    from liftlab.topos import const_map, hom_post
    rhs = pullback(const_map(B, A), hom_post(A, e))
    assert find_slice_iso(lhs, SliceObj(rhs.apex, rhs.legs[0]))


def test_beck_chevalley_for_local_exponentials():
    C = fs(2)
    a, b = _slice(fmap(2, 2, [0, 1])), _slice(fmap(3, 2, [0, 1, 1]))
    a2 = _slice(fmap(3, 2, [0, 0, 1]))
    for phi in (fmap(1, 2, [1]), fmap(3, 2, [0, 1, 1]), identity(C)):
        for x in (a, a2):
            lhs = pullback_functor(phi, local_exponential(x, b))
            rhs = local_exponential(pullback_functor(phi, x), pullback_functor(phi, b))
            assert find_slice_iso(lhs, rhs)


def test_iso_search_reports_a_proof_on_size_mismatch():
    assert find_iso(fs(2), fs(3)).status == NOT_ISO
    assert find_iso(fs(2), fs(2))
