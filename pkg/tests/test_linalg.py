from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ainf.errors import NonInvertibleLinearPart
from ainf.graded import ChainComplex, GradedMap, GradedSpace, compose, identity
from ainf.linalg import (Echelon, betti_numbers, homology, induced_map_on_homology, invert_map,
                         is_quasi_isomorphism, kernel_basis, retract_data, rref, solve_linear,
                         solve_rows)
from ainf.randgen import random_automorphism, rand_scalar


def random_complex(rng) -> ChainComplex:
    """Direct sum of points and contractible pairs in a random basis."""
    basis, d0 = [], {}
    for k in range(rng.randint(1, 4)):
        deg = rng.randint(-2, 2)
        if rng.random() < 0.5:
            basis.append((f"p{k}", deg))
        else:
            basis += [(f"u{k}", deg), (f"w{k}", deg - 1)]
            d0[(len(basis) - 2,)] = {(len(basis) - 1,): 1}
    A = GradedSpace("R", basis)
    P = random_automorphism(rng, A)
    d = compose(P, compose(GradedMap(A, A, -1, d0), invert_map(P)))
    return ChainComplex(A, d)


def _dense_rank(rows, ncols):
    return len(rref(rows, ncols)[1]) if rows else 0


@given(st.integers(0, 10**6))
def test_solve_rows_matches_dense_rank(seed):
    rng = random.Random(seed)
    nv, ne = rng.randint(1, 5), rng.randint(1, 6)
    rows = [{v: rand_scalar(rng) for v in range(nv) if rng.random() < 0.5} for _ in range(ne)]
    rhs = [rand_scalar(rng) if rng.random() < 0.6 else 0 for _ in range(ne)]
    dense = [[r.get(v, 0) for v in range(nv)] for r in rows]
    aug = [row + [b] for row, b in zip(dense, rhs)]
    consistent = _dense_rank(dense, nv) == _dense_rank(aug, nv + 1)
    x = solve_rows(rows, rhs)
    assert (x is not None) == consistent
    if x is not None:
        for r, b in zip(rows, rhs):
            assert sum(c * x.get(v, 0) for v, c in r.items()) == b


def test_echelon_reports_inconsistency_as_none():
    e = Echelon()
    assert e.add({0: 1, 1: 1}, 2) is True
    assert e.add({0: 2, 1: 2}, 4) is False
    assert e.add({0: 1, 1: 1}, 3) is None


def test_solve_linear_returns_none_outside_image():
    A = GradedSpace("A", [("a", 0), ("b", 0)])
    L = GradedMap(A, A, 0, {(0,): {(0,): 1, (1,): 1}})
    assert solve_linear(L, {(0,): 2, (1,): 2}) == {(0,): 2}
    assert solve_linear(L, {(0,): 1}) is None


def test_kernel_basis_small():
    assert kernel_basis([[1, 2, 3]], 3) == [[-2, 1, 0], [-3, 0, 1]]


def test_invert_map_and_failure():
    A = GradedSpace("A", [("a", 0), ("b", 0), ("c", 1)])
    f = GradedMap(A, A, 0, {(0,): {(0,): 2, (1,): 1}, (1,): {(1,): 1}, (2,): {(2,): -1}})
    g = invert_map(f)
    assert compose(f, g) == identity(A) == compose(g, f)
    assert g.image((0,)) == {(0,): Fraction(1, 2), (1,): Fraction(-1, 2)}
    with pytest.raises(NonInvertibleLinearPart):
        invert_map(GradedMap(A, A, 0, {(0,): {(0,): 1}, (1,): {(0,): 1}, (2,): {(2,): 1}}))


def test_homology_of_a_circle():
    # cellular chains of S^1 with two vertices and two edges
    A = GradedSpace("S", [("v0", 0), ("v1", 0), ("e0", 1), ("e1", 1)])
    d = GradedMap(A, A, -1, {(2,): {(1,): 1, (0,): -1}, (3,): {(0,): 1, (1,): -1}})
    assert betti_numbers(ChainComplex(A, d)) == {0: 1, 1: 1}


@given(st.integers(0, 10**6))
def test_retract_data_is_a_deformation_retraction(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    reps, proj, hom = retract_data(c)
    H = homology(c)
    assert {deg: len(r) for deg, r in reps.items()} == {deg: g.betti for deg, g in H.items()}
    index = {}
    for deg in sorted(reps):
        for t, _ in enumerate(reps[deg]):
            index[(deg, t)] = len(index)
    A = c.space
    # i p - id = d h + h d, evaluated basis vector by basis vector
    for i in range(A.dim):
        ip = {}
        for key, x in proj[(i,)].items():
            deg, t = key
            for k, y in reps[deg][t].items():
                ip[k] = ip.get(k, 0) + x * y
        ip[(i,)] = ip.get((i,), 0) - 1
        ip = {k: v for k, v in ip.items() if v}
        rhs = (compose(c.d, hom) + compose(hom, c.d)).image((i,))
        assert ip == rhs


@given(st.integers(0, 10**6))
def test_automorphism_is_a_quasi_isomorphism(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    P = random_automorphism(rng, c.space)
    c2 = ChainComplex(c.space, compose(P, compose(c.d, invert_map(P))))
    assert is_quasi_isomorphism(P, c, c2)
    zero = GradedMap(c.space, c.space, 0, {})
    assert is_quasi_isomorphism(zero, c, c2) == all(b == 0 for b in betti_numbers(c).values())
    for M in induced_map_on_homology(identity(c.space), c, c).values():
        assert M == [[1 if i == j else 0 for j in range(len(M))] for i in range(len(M))]
