from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from ainf.bar import (AInfStructure, ComorphismImage, apply_components, codiff_check, coder_component, coderivation_image,
                      comorph_component, compose_corestriction, compose_morphisms, dgmorph_check, identity_morphism,
                      invert_weak_iso, is_twist, reduced_diagonal, stasheff_residual,
                      strict_morphism, structure_difference, structures_equal, transport_structure,
                      twist_structure)
from ainf.corpus import associative_example, nonassociative_pair
from ainf.errors import SpaceMismatch
from ainf.graded import ChainComplex, GradedMap, GradedSpace, identity
from ainf.randgen import random_automorphism, random_structure

from conftest import structure_and_morphism


def test_associative_algebra_passes():
    assert codiff_check(associative_example()).ok


def test_nonassociative_fails_exactly_at_arity_3():
    r = codiff_check(nonassociative_pair())
    assert not r.ok
    assert r.failing_arities == [3]
    # (xx)x = yx = x while x(xx) = xy = 0
    xxx = next(res for res in r.residuals if res.word == ("x", "x", "x"))
    assert [lab for lab, _ in xxx.value] == [("x",)]


def test_nonassociative_fixed_by_mu3_is_not_possible_in_degree_zero():
    # μ_3 has degree 1, and everything sits in degree 0, so it must vanish
    S = nonassociative_pair()
    assert S.operation(3).is_zero()


def test_reduced_diagonal():
    assert reduced_diagonal(1, (0, 1, 2)) == [((0,), (1, 2)), ((0, 1), (2,))]
    assert len(reduced_diagonal(2, (0, 1, 2, 3))) == 3


@given(st.integers(0, 10**6))
def test_stasheff_two_routes_agree(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 4, 4)
    assert codiff_check(S).ok
    for n in range(1, 5):
        assert stasheff_residual(S, n).is_zero()


@given(st.integers(0, 10**6))
def test_broken_structure_detected_by_both_routes(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 4, 3)
    if 2 not in S.mu:
        return
    bad = AInfStructure(S.complex, {2: S.mu[2].scale(2), **{k: m for k, m in S.mu.items() if k != 2}},
                        3)
    ok_by_words = codiff_check(bad).ok
    ok_by_maps = all(stasheff_residual(bad, n).is_zero() for n in range(1, 4))
    assert ok_by_words == ok_by_maps


@given(st.integers(0, 10**6))
def test_coderivation_components_match_word_images(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 3, 4)
    V = S.bar_space
    for n in range(1, 4):
        total = {}
        for m in range(1, n + 1):
            D = coder_component(S.bar, m, n, V)
            for w, img in D.entries.items():
                for k, x in img.items():
                    total.setdefault(w, {})[k] = total.get(w, {}).get(k, 0) + x
        for w in V.words(n):
            expect = coderivation_image(S.bar, -1, V.degrees, w)
            got = {k: x for k, x in total.get(w, {}).items() if x}
            assert got == expect


@given(st.integers(0, 10**6))
def test_comorphism_components_two_methods(seed):
    _, S, T, F = structure_and_morphism(seed, 3, 4)
    for n in range(1, 5):
        for m in range(1, n + 1):
            a = comorph_component(F.components, m, n, "compositions")
            b = comorph_component(F.components, m, n, "diagonal")
            assert a == b


@given(st.integers(0, 10**6))
def test_pruned_corestriction_matches_full_image(seed):
    rng, S, T, F = structure_and_morphism(seed)
    img = ComorphismImage(F.components)
    for n in range(1, F.max_arity + 1):
        for w in S.bar_space.words(n):
            assert compose_corestriction(T.bar, T.bar_prefixes, F.components, w) \
                == apply_components(T.bar, img(w))


@given(st.integers(0, 10**6))
def test_transport_gives_valid_structure_and_morphism(seed):
    _, S, T, F = structure_and_morphism(seed)
    assert codiff_check(T).ok
    assert dgmorph_check(F).ok


@given(st.integers(0, 10**6))
def test_inverse_and_composition(seed):
    _, S, T, F = structure_and_morphism(seed)
    G = invert_weak_iso(F)
    assert dgmorph_check(G).ok
    GF = compose_morphisms(G, F)
    I = identity_morphism(S)
    for n in range(1, 5):
        assert GF.component(n) == I.component(n)
    FG = compose_morphisms(F, G)
    assert FG.is_isotopy() and all(FG.component(n).is_zero() for n in range(2, 5))


@given(st.integers(0, 10**6))
def test_composition_is_associative(seed):
    rng, S, T, F = structure_and_morphism(seed, 3, 4)
    from ainf.randgen import random_weak_morphism_components

    T2, G = transport_structure(T, random_weak_morphism_components(rng, T.bar_space, T.bar_space, 4))
    T3, H = transport_structure(T2, random_weak_morphism_components(rng, T2.bar_space,
                                                                    T2.bar_space, 4))
    left = compose_morphisms(H, compose_morphisms(G, F))
    right = compose_morphisms(compose_morphisms(H, G), F)
    for n in range(1, 5):
        assert left.component(n) == right.component(n)


@given(st.integers(0, 10**6))
def test_twist_is_a_strict_isomorphism(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 4, 4)
    phi = random_automorphism(rng, S.space)
    T = twist_structure(S, phi)
    assert is_twist(S, T, phi)
    assert codiff_check(T).ok
    assert dgmorph_check(strict_morphism(S, T, phi)).ok


def test_structure_difference_reports_first_entry():
    S = associative_example()
    T = AInfStructure(S.complex, {}, 4)
    diff = structure_difference(S, T)
    assert diff.arity == 2 and diff.word == ("x1", "x1")
    assert structures_equal(S, S)


def test_strict_morphism_requires_matching_spaces():
    S = associative_example()
    B = GradedSpace("B", [("b", 0)])
    T = AInfStructure(ChainComplex(B), {}, 4)
    with pytest.raises(SpaceMismatch):
        strict_morphism(S, T, identity(S.space))


def test_quotient_map_of_dg_algebras_is_strict_morphism():
    S = associative_example()   # x, x^2, x^3
    A = S.space
    B = GradedSpace("Q", [("x1", 0)])
    T = AInfStructure(ChainComplex(B), {}, 4)
    q = GradedMap(A, B, 0, {(0,): {(0,): 1}})
    assert dgmorph_check(strict_morphism(S, T, q)).ok      # x^2 ↦ 0 kills products
    bad = GradedMap(A, B, 0, {(0,): {(0,): 1}, (1,): {(0,): 1}})
    assert not dgmorph_check(strict_morphism(S, T, bad)).ok
