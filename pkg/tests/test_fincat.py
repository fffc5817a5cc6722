import pytest
from hypothesis import given

from liftlab.fincat import (BudgetExceeded, FinCat, Presheaf, ShapeError, budget,
                            count_pshmors, enumerate_pshmors, identity, initial_presheaf,
                            make_presheaf, make_pshmor, validate_fincat, validate_presheaf,
                            validate_pshmor, yoneda)
from liftlab.fixtures import fs

from oracles import ARROW, CHAIN, FIXTURE_CATS, TERMINAL, brute_homs, presheaf_on, presheaf_pair, small_presheaves


def test_terminal_and_arrow_categories_are_valid():
    assert validate_fincat(TERMINAL) == []
    assert validate_fincat(ARROW) == []
    assert ARROW.n_objects == 2 and ARROW.n_morphisms == 3


def test_composite_in_wrong_hom_set_is_one_violation():
    a = ARROW.morphism_index("a")
    id0, id1 = ARROW.ids
    comp = [list(r) for r in ARROW.comp]
    comp[a][id0] = id1
    bad = FinCat(ARROW.objects, ARROW.morphisms, ARROW.src, ARROW.dst, ARROW.ids,
                 tuple(tuple(r) for r in comp))
    assert len(validate_fincat(bad)) == 1


def _one_object(table):
    """One-object category on ``id, a, b`` with ``table[g][f]`` for non-identities."""
    comp = [[0, 1, 2], [1, None, None], [2, None, None]]
    for g in (1, 2):
        for f in (1, 2):
            comp[g][f] = table[(g - 1) * 2 + (f - 1)]
    return FinCat(("*",), ("id", "a", "b"), (0, 0, 0), (0, 0, 0), (0,),
                  tuple(tuple(r) for r in comp))


def test_associativity_check_matches_brute_force():
    import itertools
    flagged = accepted = 0
    for table in itertools.product(range(3), repeat=4):
        cat = _one_object(table)
        assoc = all(cat.comp[h][cat.comp[g][f]] == cat.comp[cat.comp[h][g]][f]
                    for h in range(3) for g in range(3) for f in range(3))
        errs = validate_fincat(cat)
        assert (errs == []) == assoc
        flagged += not assoc
        accepted += assoc
    assert flagged and accepted


def test_yoneda_on_terminal_is_singleton():
    y = yoneda(TERMINAL, 0)
    assert y.sizes == (1,)


def test_yoneda_on_arrow():
    assert yoneda(ARROW, 1).sizes == (1, 1)
    assert yoneda(ARROW, 0).sizes == (1, 0)


def test_yoneda_rejects_unknown_object():
    with pytest.raises((IndexError, ShapeError)):
        yoneda(ARROW, 5)


def test_hom_count_between_finite_sets():
    assert len(enumerate_pshmors(fs(2), fs(3))) == 9


def test_empty_domain_has_one_map():
    for cat in FIXTURE_CATS:
        for b in small_presheaves(cat, 2):
            assert len(enumerate_pshmors(initial_presheaf(cat), b)) == 1


def test_mismatched_bases_are_rejected():
    with pytest.raises(ShapeError):
        enumerate_pshmors(fs(1), yoneda(ARROW, 0))


@pytest.mark.parametrize("cat", FIXTURE_CATS, ids=["terminal", "arrow", "chain"])
def test_yoneda_bijection(cat):
    for c in range(cat.n_objects):
        y = yoneda(cat, c)
        for p in small_presheaves(cat, 2):
            assert len(enumerate_pshmors(y, p)) == p.sizes[c]


@given(presheaf_pair())
def test_enumeration_matches_generate_and_filter(pair):
    a, b = pair
    got = [m.comps for m in enumerate_pshmors(a, b)]
    assert got == brute_homs(a, b)
    assert count_pshmors(a, b) == len(got)


@given(presheaf_on())
def test_identity_is_natural(p):
    assert validate_pshmor(identity(p)) == []


def test_budget_overrun_is_an_error():
    with budget(5):
        with pytest.raises(BudgetExceeded):
            enumerate_pshmors(fs(3), fs(3))
    assert len(enumerate_pshmors(fs(3), fs(3))) == 27


def test_make_pshmor_rejects_non_natural_map():
    src = make_presheaf(ARROW, [2, 1], {"a": [0]})
    dst = make_presheaf(ARROW, [2, 1], {"a": [1]})
    with pytest.raises(ShapeError):
        make_pshmor(src, dst, [[0, 1], [0]])
    assert make_pshmor(src, dst, [[1, 0], [0]]).comps == ((1, 0), (0,))


def test_contravariance_violation_is_reported():
    f, g, h = (CHAIN.morphism_index(n) for n in "fgh")
    acts = [None] * CHAIN.n_morphisms
    for c, i in enumerate(CHAIN.ids):
        acts[i] = (0, 1)
    acts[f], acts[g] = (1, 0), (1, 0)
    acts[h] = (1, 0)  # should be act[f] o act[g] = identity
    p = Presheaf(CHAIN, (2, 2, 2), tuple(acts))
    assert validate_presheaf(p)
    acts[h] = (0, 1)
    assert validate_presheaf(Presheaf(CHAIN, (2, 2, 2), tuple(acts))) == []


def test_labels_are_reported_per_object():
    p = fs(2).with_labels([["x", "y"]])
    assert p.at(0).label(1) == "y"
    assert fs(2).at(0).label(1) == "1"
