from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from ainf.bar import AInfStructure, dgmorph_check, strict_morphism
from ainf.errors import ObstructionUnsolvable, PartialMorphismInvalid
from ainf.graded import ChainComplex, GradedMap, GradedSpace, compose, identity, tensor_maps
from ainf.obstruction import (HomComplex, HomElement, extend_chain_map, hom_boundary_preimage,
                              obstruction_classes, solve_boundary)
from ainf.randgen import random_map, random_structure, truncated_polynomial

from conftest import structure_and_morphism


def random_partial(seed: int, max_arity: int = 4):
    """A valid morphism truncated below a random arity ``m`` with ``F_{m-1}``
    moved by a random boundary."""
    rng, S, T, F = structure_and_morphism(seed, 4, max_arity)
    M = HomComplex(S, T)
    m = rng.randint(2, max_arity)
    comps = {k: c for k, c in F.components.items() if k < m}
    if m > 2:
        Y = random_map(rng, M.V, M.W, 1, m - 1, 0.3)
        comps[m - 1] = F.component(m - 1) + M.dbar(Y)
    return M, m, comps, F


@given(st.integers(0, 10**6))
def test_obstruction_cocycle_is_a_cycle(seed):
    M, m, comps, _ = random_partial(seed)
    c = M.obstruction_cocycle(m, comps)
    assert M.dbar(c).is_zero()


@given(st.integers(0, 10**6))
def test_valid_morphism_solves_its_own_obstruction(seed):
    rng, S, T, F = structure_and_morphism(seed)
    M = HomComplex(S, T)
    for m in range(2, F.max_arity + 1):
        c = M.obstruction_cocycle(m, F.components)
        assert M.dbar(F.component(m)) == c.scale(-1)


def test_invalid_partial_morphism_is_refused():
    rng, S, T, F = structure_and_morphism(7)
    M = HomComplex(S, T)
    comps = dict(F.components)
    comps[2] = F.component(2) + random_map(rng, M.V, M.W, 0, 2, 0.5)
    while M.dbar(comps[2] - F.component(2)).is_zero():
        comps[2] = F.component(2) + random_map(rng, M.V, M.W, 0, 2, 0.5)
    with pytest.raises(PartialMorphismInvalid):
        M.obstruction_cocycle(3, comps)


def random_element(rng, M: HomComplex, degree: int, density=0.3):
    return M.element(degree, {n: random_map(rng, M.V, M.W, degree, n, density / n)
                              for n in range(1, M.N + 1)})


@given(st.integers(0, 10**6))
def test_bianchi_identity(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 3, 4)
    T = random_structure(rng, 3, 4)
    M = HomComplex(S, T)
    assert M.bianchi_residual(random_element(rng, M, 0)).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_q_squares_to_zero(n):
    rng = random.Random(100 + n)
    S = random_structure(rng, 3, 5)
    T = random_structure(rng, 3, 5)
    M = HomComplex(S, T)
    args = [random_element(rng, M, rng.randint(-1, 1)) for _ in range(n)]
    assert M.qq_residual(args).is_zero()


def test_curvature_vanishes_exactly_on_morphisms():
    rng, S, T, F = structure_and_morphism(11)
    M = HomComplex(S, T)
    E = HomElement.from_morphism(F)
    assert M.curvature(E).is_zero()
    comps = dict(F.components)
    comps[2] = F.component(2) + random_map(rng, M.V, M.W, 0, 2, 0.5)
    assert not M.curvature(M.element(0, comps)).is_zero()


def test_nonzero_class_for_identity_into_zero_product():
    c, m = truncated_polynomial(2)              # basis x, x^2 with x·x = x^2
    S = AInfStructure(c, {2: m}, 4)
    T = AInfStructure(c, {}, 4)
    report = obstruction_classes(S, T, identity(c.space))
    assert not report.ok
    bad = report.first_nonzero
    assert bad.arity == 2
    assert hom_boundary_preimage(bad.representative, c.d, c.d) is None
    with pytest.raises(ObstructionUnsolvable):
        extend_chain_map(S, T, identity(c.space))


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_classes_vanish_after_a_valid_partial(seed, m):
    rng, S, T, F = structure_and_morphism(seed)
    start = {k: F.component(k) for k in range(2, m)}
    report = obstruction_classes(S, T, F.linear, start=start)
    assert report.classes[0].arity == m
    assert report.classes[0].vanishes


def test_greedy_choices_can_leave_a_nonzero_class():
    # an extension exists (F itself), but the solver's first choices obstruct arity 4
    rng, S, T, F = structure_and_morphism(244)
    report = obstruction_classes(S, T, F.linear)
    assert [c.arity for c in report.classes if not c.vanishes] == [4]
    assert dgmorph_check(F).ok


def test_solve_boundary_reports_inconsistency():
    A = GradedSpace("A", [("a", 0), ("b", 1)])
    d = GradedMap.from_labels(A, A, -1, {("b",): {"a": 1}})
    # d X + X d = id has no solution when A has homology; here it is contractible
    rhs = identity(A).entries
    X = solve_boundary(A, d, A, d, 1, 1, rhs)
    assert X is not None
    B = GradedSpace("B", [("a", 0)])
    zero = GradedMap(B, B, -1, {})
    assert solve_boundary(B, zero, B, zero, 1, 1, identity(B).entries) is None


def test_solve_boundary_respects_allowed_targets():
    A = GradedSpace("A", [("a", 0), ("b", 1)])
    d = GradedMap.from_labels(A, A, -1, {("b",): {"a": 1}})
    c = ChainComplex(A, d)
    rhs = identity(A).entries
    assert solve_boundary(A, c.d, A, c.d, 1, 1, rhs, allowed_targets=[0]) is None


@given(st.integers(0, 10**6), st.integers(-1, 1))
def test_del_squares_to_zero_and_keeps_filtration(seed, degree):
    rng = random.Random(seed)
    S = random_structure(rng, 3, 4)
    T = random_structure(rng, 3, 4)
    M = HomComplex(S, T)
    r = rng.randint(1, 3)
    F = M.element(degree, {n: random_map(rng, M.V, M.W, degree, n, 0.4 / n)
                           for n in range(r, M.N + 1)})
    assert M.del_(M.del_(F)).is_zero()
    D = M.del_(F)
    assert D.is_zero() or D.filtration >= r


def test_del_of_a_chain_map_vanishes_in_arity_one():
    rng = random.Random(8)
    S = random_structure(rng, 4, 4)
    F = HomElement.from_morphism(strict_morphism(S, S, identity(S.space)))
    assert HomComplex(S, S).del_(F).component(1).is_zero()


@given(st.integers(0, 10**6))
def test_q2_filtration_and_strict_case(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 3, 4)
    T = random_structure(rng, 3, 4)
    M = HomComplex(S, T)
    F = M.element(0, {1: random_map(rng, M.V, M.W, 0, 1, 0.5)})
    G = M.element(0, {1: random_map(rng, M.V, M.W, 0, 1, 0.5)})
    Q2 = M.Q_n(2, [F, G])
    expected = compose(T.bar[2], tensor_maps([F.component(1), G.component(1)])) \
        if 2 in T.bar else GradedMap(M.V, M.W, -1, {}, 2)
    assert Q2.component(2) == expected
    A = M.element(0, {n: random_map(rng, M.V, M.W, 0, n, 0.3) for n in (1, 2)})
    B = M.element(0, {n: random_map(rng, M.V, M.W, 0, n, 0.3) for n in (2, 3)})
    out = M.Q_n(2, [A, B])
    assert out.is_zero() or out.filtration >= 3
    assert M.Q_n(2, [A, M.element(0, {})]).is_zero()


def test_q_n_checks_its_arity():
    rng = random.Random(1)
    S = random_structure(rng, 3, 4)
    M = HomComplex(S, S)
    with pytest.raises(ValueError):
        M.Q_n(3, [M.element(0, {})] * 2)
