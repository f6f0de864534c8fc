from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from ainf.bar import (WeakMorphism, compose_morphisms, dgmorph_check, identity_morphism,
                      invert_weak_iso, strict_morphism, structures_equal, twist_structure)
from ainf.corpus import free_pair
from ainf.errors import HomotopyIdentityFails, NotQuasiIso
from ainf.graded import GradedMap, compose, identity
from ainf.lifting import (construct_isotopy, converse_isotopy_to_extension, isotopy_trace,
                          lift_trace, quasi_inverse, retwist, weak_iso_variant)
from ainf.linalg import induced_map_on_homology, invert_map, is_quasi_isomorphism, retract_data
from ainf.randgen import random_automorphism, random_homotopy_data, random_map, random_structure
from ainf.transfer import extend_f, extend_g, retract_to_homology, transfer_structure

from conftest import lift_instance, structure_and_morphism, two_transfers


def identity_matrices(f, cA, cB) -> bool:
    return all(M == [[int(i == j) for j in range(len(M))] for i in range(len(M))]
               for M in induced_map_on_homology(f, cA, cB).values())


@given(st.integers(0, 10**6))
def test_lift_has_the_requested_linear_part(seed):
    Theta, psi, h = lift_instance(seed)
    tr = lift_trace(Theta, psi, h)
    assert tr.result.linear == psi
    assert dgmorph_check(tr.result).ok
    assert dgmorph_check(tr.homotopy).ok
    assert all(tr.shadow_ok)
    assert tr.fallback_stages == []


def test_lift_refuses_a_wrong_homotopy():
    Theta, psi, h = lift_instance(3)
    rng = random.Random(3)
    bad = h + random_map(rng, h.source, h.target, 1, 1, 0.6)
    while (compose(Theta.target.d, bad - h) + compose(bad - h, Theta.source.d)).is_zero():
        bad = h + random_map(rng, h.source, h.target, 1, 1, 0.6)
    with pytest.raises(HomotopyIdentityFails):
        lift_trace(Theta, psi, bad)


@given(st.integers(0, 10**6))
def test_two_transfers_are_isotopic(seed):
    S, hd1, hd2, nu1, nu2 = two_transfers(seed)
    F2 = extend_f(S, hd2, nu2)
    res = isotopy_trace(S, hd1, nu2, F2, nu1)
    phi = res.isotopy
    assert phi.is_isotopy()
    assert phi.source == nu1 and phi.target == nu2
    assert dgmorph_check(phi).ok
    assert dgmorph_check(res.theta).ok


def test_isotopy_needs_the_target_homotopy():
    S, hd1, hd2, nu1, nu2 = two_transfers(5)
    hd = type(hd1)(hd1.source, hd1.target, hd1.f1, hd1.g1, hd1.h, None)
    with pytest.raises(HomotopyIdentityFails):
        construct_isotopy(S, hd, nu2, extend_f(S, hd2, nu2))


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_isotopy_composed_with_an_extension_extends_f1(seed):
    S, hd1, hd2, nu1, nu2 = two_transfers(seed)
    F2 = extend_f(S, hd2, nu2)
    phi = construct_isotopy(S, hd1, nu2, F2)
    f = extend_f(S, hd1, nu1)
    G = converse_isotopy_to_extension(phi, f)
    assert G.linear == hd1.f1
    assert dgmorph_check(G).ok


@given(st.integers(0, 10**6))
def test_weak_iso_variant(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 4, 4)
    _, hd = retract_to_homology(S.complex)      # d' = 0, so any automorphism is a chain map
    nu = transfer_structure(S, hd)
    phi1 = random_automorphism(rng, nu.space)
    Sprime = twist_structure(nu, phi1)
    F = compose_morphisms(strict_morphism(nu, Sprime, phi1), extend_f(S, hd, nu))
    W = weak_iso_variant(S, hd, Sprime, phi1, F)
    assert W.linear == phi1
    assert W.source == nu and W.target == Sprime
    assert dgmorph_check(W).ok


def test_retwist_makes_phi1_strict():
    rng = random.Random(9)
    S = random_structure(rng, 4, 4)
    _, hd = retract_to_homology(S.complex)
    nu = transfer_structure(S, hd)
    phi1 = random_automorphism(rng, nu.space)
    T = retwist(nu, phi1)
    assert dgmorph_check(strict_morphism(T, nu, phi1)).ok


@given(st.integers(0, 10**6))
def test_quasi_inverse_of_a_weak_isomorphism(seed):
    rng, S, T, F = structure_and_morphism(seed)
    beta = quasi_inverse(F)
    assert beta.source == T and beta.target == S
    assert dgmorph_check(beta).ok
    assert identity_matrices(compose(beta.linear, F.linear), S.complex, S.complex)


def test_quasi_inverse_of_a_transfer_inclusion():
    rng = random.Random(17)
    S = random_structure(rng, 5, 4)
    hd = random_homotopy_data(rng, S.complex, "inclusion")
    nu = transfer_structure(S, hd)
    g = extend_f(S, hd, nu)
    beta = quasi_inverse(g)
    assert dgmorph_check(beta).ok
    assert identity_matrices(compose(beta.linear, g.linear), S.complex, S.complex)


def test_quasi_inverse_needs_a_quasi_isomorphism():
    rng, S, T, F = structure_and_morphism(2)
    assert any(retract_data(S.complex)[0].values())
    Z = WeakMorphism(S, T, {1: GradedMap(S.bar_space, T.bar_space, 0, {})})
    with pytest.raises(NotQuasiIso):
        quasi_inverse(Z)


def test_lift_of_theta_along_zero_homotopy():
    Theta, _, h = lift_instance(12)
    res = lift_trace(Theta, Theta.linear, h.scale(0)).result
    assert res.linear == Theta.linear and dgmorph_check(res).ok


def test_lift_of_the_free_pair_inclusion():
    fp = free_pair(3)
    F = fp.morphism
    res = lift_trace(F, F.linear, GradedMap(F.source.space, F.target.space, 1, {})).result
    assert res.linear == fp.homotopy.f1 and dgmorph_check(res).ok


def test_weak_iso_variant_with_identity_is_an_isotopy():
    S, hd1, hd2, nu1, nu2 = two_transfers(31)
    F2 = extend_f(S, hd2, nu2)
    W = weak_iso_variant(S, hd1, nu2, identity(nu2.space), F2)
    phi = construct_isotopy(S, hd1, nu2, F2)
    assert W.is_isotopy() and dgmorph_check(W).ok
    assert W == phi


def test_twist_then_untwist_is_the_identity():
    rng = random.Random(4)
    S = random_structure(rng, 4, 4)
    P = random_automorphism(rng, S.space)
    T = twist_structure(S, P)
    assert structures_equal(twist_structure(T, invert_map(P)), S)


def test_converse_with_identity_isotopy_returns_the_extension():
    S, hd1, _, nu1, _ = two_transfers(8)
    f = extend_f(S, hd1, nu1)
    assert converse_isotopy_to_extension(identity_morphism(nu1), f) == f


@given(st.integers(0, 10**6))
def test_inverse_of_an_isotopy_is_an_isotopy(seed):
    S, hd1, hd2, nu1, nu2 = two_transfers(seed)
    phi = construct_isotopy(S, hd1, nu2, extend_f(S, hd2, nu2))
    back = invert_weak_iso(phi)
    assert back.is_isotopy() and (back.source, back.target) == (nu2, nu1)
    assert dgmorph_check(back).ok


def quasi_isomorphisms_in_every_position(S, hd, Sprime, psi):
    """From a quasi-isomorphism ``psi : (A, μ) → (A', μ')`` produce the
    quasi-isomorphisms between ``ν``, ``μ`` and ``μ'`` in all four directions
    of the six-condition equivalence (the other two are the weak
    equivalences they witness)."""
    nu = transfer_structure(S, hd, max_arity=psi.max_arity)
    g = extend_g(S, hd, nu, check=False)
    phi_i = compose_morphisms(psi, g)          # ν → μ'
    return {
        "i": phi_i,
        "ii": quasi_inverse(phi_i),             # μ' → ν
        "iv": quasi_inverse(psi),               # μ' → μ
        "v": psi,                               # μ → μ'
    }


@pytest.mark.parametrize("L", [2, 3])
def test_six_conditions_on_the_free_pair(L):
    fp = free_pair(L)
    maps = quasi_isomorphisms_in_every_position(fp.source, fp.homotopy, fp.target, fp.morphism)
    for name, F in maps.items():
        assert dgmorph_check(F).ok, name
        assert is_quasi_isomorphism(F.linear, F.source.complex, F.target.complex), name


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_six_conditions_on_random_transfers(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 4, 4)
    hd = random_homotopy_data(rng, S.complex, "inclusion")
    nu = transfer_structure(S, hd)
    psi = extend_f(S, hd, nu)             # a quasi-isomorphism μ → ν, so μ' := ν
    maps = quasi_isomorphisms_in_every_position(S, hd, nu, psi)
    for name, F in maps.items():
        assert dgmorph_check(F).ok, name
        assert is_quasi_isomorphism(F.linear, F.source.complex, F.target.complex), name
