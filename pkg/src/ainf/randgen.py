"""Random instances for property tests and the acceptance suite.

Structures are produced by pushing a small dg algebra forward along a
random weak isomorphism, so the higher operations are generically nonzero
and every output satisfies the Stasheff identities by construction.
Homotopy data are perturbed by random homotopies and random changes of
basis, so ``h`` and ``l`` are generically nonzero as well.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .bar import AInfStructure, transport_structure
from .graded import (ChainComplex, GradedMap, GradedSpace, HomotopyData, compose,
                     identity, zero_map)
from .linalg import invert_map
from .transfer import retract_to_homology

SMALL = (-2, -1, 1, 2, 3, Fraction(1, 2), Fraction(-1, 3))


def rand_scalar(rng: random.Random):
    return rng.choice(SMALL)


def random_map(rng, source, target, degree, arity=1, density=0.3, words=None) -> GradedMap:
    """Sparse homogeneous map with random small coefficients."""
    allowed = {t - degree for t in target.degree_set()}
    entries = {}
    for w in (words if words is not None else source.words(arity, allowed)):
        want = source.word_degree(w) + degree
        for j in target.by_degree.get(want, ()):
            if rng.random() < density:
                entries.setdefault(w, {})[(j,)] = rand_scalar(rng)
    return GradedMap(source, target, degree, entries, arity)


def random_automorphism(rng, space: GradedSpace, density=0.4) -> GradedMap:
    """Degree-preserving invertible map: a permutation-free unipotent
    product ``L U`` in each degree (always invertible)."""
    entries = {}
    for deg, idx in space.by_degree.items():
        n = len(idx)
        L = [[1 if i == j else (rand_scalar(rng) if i > j and rng.random() < density else 0)
              for j in range(n)] for i in range(n)]
        U = [[1 if i == j else (rand_scalar(rng) if i < j and rng.random() < density else 0)
              for j in range(n)] for i in range(n)]
        M = [[sum(L[i][k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        for c in range(n):
            col = {(idx[r],): M[r][c] for r in range(n) if M[r][c] != 0}
            entries[(idx[c],)] = col
    return GradedMap(space, space, 0, entries)


def conjugate_by(P: GradedMap, m: GradedMap, Pinv: GradedMap | None = None) -> GradedMap:
    Pinv = Pinv or invert_map(P)
    return compose(P, compose(m, Pinv))


# -- seed algebras -------------------------------------------------------------


def truncated_polynomial(k: int, degree: int = 0, name="P") -> tuple:
    """Non-unital ``span(x, .., x^k)`` with ``x^i x^j = x^{i+j}`` (zero past ``k``)."""
    A = GradedSpace(name, [(f"x{i}", i * degree) for i in range(1, k + 1)])
    mu = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1 - i):
            mu[(i - 1, j - 1)] = {(i + j - 1,): 1}
    return ChainComplex(A), GradedMap(A, A, 0, mu, 2)


def with_contractible_pair(c: ChainComplex, mu2: GradedMap, degree: int, name=None):
    """``A ⊕ span(u, du)`` with ``u`` of the given degree and zero products on
    the pair: still a dg algebra."""
    A = c.space
    B = GradedSpace(name or f"{A.name}+", list(A.basis) + [("u", degree), ("du", degree - 1)])
    n = A.dim
    d = dict(c.d.entries)
    d[(n,)] = {(n + 1,): 1}
    return ChainComplex(B, GradedMap(B, B, -1, d)), GradedMap(B, B, 0, mu2.entries, 2)


def interval_algebra():
    from .interval import interval_NI

    J = interval_NI()
    return J.complex, J.product


def tensor_dga(c1, m1, c2, m2, name=None):
    """Tensor product of two dg algebras given by ``(complex, product)``."""
    from .interval import tensor_dga_pair

    return tensor_dga_pair(c1, m1, c2, m2, name)


def seed_dga(rng: random.Random, max_dim: int):
    """A small dg algebra of dimension at most ``max_dim`` with degrees in
    ``[-3, 3]``."""
    choices = []
    if max_dim >= 2:
        choices += ["poly", "poly_pair"]
    if max_dim >= 3:
        choices += ["cyl"]
    if max_dim >= 4:
        choices += ["poly_pair"]
    kind = rng.choice(choices or ["poly"])
    if kind == "poly":
        k = rng.randint(1, max_dim)
        deg = rng.choice([0, 0, 1, -1]) if k <= 3 else 0
        return truncated_polynomial(k, deg)
    if kind == "poly_pair":
        k = rng.randint(1, max(1, max_dim - 2))
        deg = rng.choice([0, 1, -1]) if k <= 3 else 0
        c, m = truncated_polynomial(k, deg)
        return with_contractible_pair(c, m, rng.choice([0, 1, 2, -1]))
    k = rng.randint(1, max_dim // 3)
    c, m = truncated_polynomial(k, rng.choice([0, 1]))
    Jc, Jm = interval_algebra()
    return tensor_dga(c, m, Jc, Jm)


def random_structure(rng: random.Random, max_dim: int, max_arity: int,
                     density: float = 0.25) -> AInfStructure:
    """A dg algebra pushed forward along a random weak isomorphism with
    nonzero higher components."""
    c, m = seed_dga(rng, max_dim)
    S0 = AInfStructure(c, {2: m}, max_arity)
    V = S0.bar_space
    comps = {1: random_automorphism(rng, V)}
    for n in range(2, max_arity + 1):
        comps[n] = random_map(rng, V, V, 0, n, density / n)
    T, _ = transport_structure(S0, comps)
    return T


# -- homotopy data -------------------------------------------------------------


def perturb(rng, hd: HomotopyData, density=0.4, move_f1: bool = True) -> HomotopyData:
    """Replace ``f1`` by ``f1 + d's + sd`` and ``g1`` by ``g1 + dt + td'`` and
    adjust ``h``, ``l`` so both homotopy identities keep holding.  With
    ``move_f1=False`` only ``g1``, ``h`` and ``l`` change."""
    A, B = hd.source, hd.target
    s = random_map(rng, A.space, B.space, 1, 1, density if move_f1 else 0)
    t = random_map(rng, B.space, A.space, 1, 1, density)
    f1 = hd.f1 + compose(B.d, s) + compose(s, A.d)
    h = hd.h + compose(hd.g1, s)
    l = hd.l + compose(s, hd.g1) if hd.l is not None else None
    g1 = hd.g1 + compose(A.d, t) + compose(t, B.d)
    h = h + compose(t, f1)
    if l is not None:
        l = l + compose(f1, t)
    return HomotopyData(A, B, f1, g1, h, l)


def change_target_basis(rng, hd: HomotopyData) -> HomotopyData:
    B = hd.target.space
    P = random_automorphism(rng, B)
    Pinv = invert_map(P)
    d = compose(P, compose(hd.target.d, Pinv))
    Bc = ChainComplex(B, d)
    l = compose(P, compose(hd.l, Pinv)) if hd.l is not None else None
    return HomotopyData(hd.source, Bc, compose(P, hd.f1), compose(hd.g1, Pinv), hd.h, l)


def inclusion_homotopy_data(rng, c: ChainComplex, pairs: int = 1) -> HomotopyData:
    """``A ↪ A ⊕ (contractible pairs)`` with ``g1`` the projection, ``h = 0`` and
    ``l`` the contraction of the pairs."""
    A = c.space
    basis = list(A.basis)
    degs = A.degree_set() or {0}
    lo, hi = min(degs), max(degs)
    extra = []
    for p in range(pairs):
        k = rng.randint(max(lo, -2), min(hi + 1, 3))
        extra.append(k)
        basis += [(f"v{p}", k), (f"w{p}", k - 1)]
    B = GradedSpace(f"{A.name}e", basis)
    n = A.dim
    d = dict(c.d.entries)
    lent = {}
    for p in range(pairs):
        v, w = n + 2 * p, n + 2 * p + 1
        d[(v,)] = {(w,): 1}
        lent[(w,)] = {(v,): -1}
    Bc = ChainComplex(B, GradedMap(B, B, -1, d))
    f1 = GradedMap(A, B, 0, {(i,): {(i,): 1} for i in range(n)})
    g1 = GradedMap(B, A, 0, {(i,): {(i,): 1} for i in range(n)})
    return HomotopyData(c, Bc, f1, g1, zero_map(A, A, 1), GradedMap(B, B, 1, lent))


def random_homotopy_data(rng, c: ChainComplex, kind: str | None = None) -> HomotopyData:
    """Random two-sided homotopy data out of ``c``: either onto its homology or
    into an enlargement by contractible pairs; always perturbed and
    re-based."""
    kind = kind or rng.choice(["homology", "inclusion"])
    if kind == "homology":
        _, hd = retract_to_homology(c)
    else:
        hd = inclusion_homotopy_data(rng, c, rng.randint(1, 2))
    hd = perturb(rng, hd)
    return change_target_basis(rng, hd)


def calibration_instance():
    """Fixed instance used to pin the transfer sign convention."""
    rng = random.Random(20240611)
    S = random_structure(rng, 4, 4, density=0.5)
    while all(n not in S.mu for n in (3, 4)):
        S = random_structure(rng, 4, 4, density=0.5)
    hd = random_homotopy_data(rng, S.complex, "inclusion")
    return S, hd


def random_weak_morphism_components(rng, V: GradedSpace, W: GradedSpace, max_arity: int,
                                    density: float = 0.25, linear: GradedMap | None = None) -> dict:
    comps = {1: linear if linear is not None else random_automorphism(rng, V)}
    for n in range(2, max_arity + 1):
        comps[n] = random_map(rng, V, W, 0, n, density / n)
    return comps


def identity_homotopy_data(c: ChainComplex) -> HomotopyData:
    return HomotopyData(c, c, identity(c.space), identity(c.space), zero_map(c.space, c.space, 1),
                        zero_map(c.space, c.space, 1))

