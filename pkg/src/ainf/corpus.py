"""Generated example problems.

``free_pair(L)`` is the inclusion of the free algebra on ``x`` into the free
algebra on ``x``, ``v``, ``u`` (``|x| = 0``, ``|v| = 1``, ``|u| = 2``,
``d u = v``), both truncated to words of length at most ``L``: products of
total length above ``L`` are zero, which keeps the algebras associative.
Basis labels are the words themselves (``"xvu"``); the empty word is ``"1"``
when the unit is included.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .bar import AInfStructure, WeakMorphism, strict_morphism
from .graded import ChainComplex, GradedMap, GradedSpace, HomotopyData, compose, identity
from .obstruction import solve_boundary

LETTERS = (("x", 0), ("v", 1), ("u", 2))
LETTER_DIFFERENTIAL = {"u": "v"}


def word_basis(letters, L: int, unital: bool = False) -> list:
    deg = dict(letters)
    basis = [("1", 0)] if unital else []
    for n in range(1, L + 1):
        for w in product([a for a, _ in letters], repeat=n):
            basis.append(("".join(w), sum(deg[a] for a in w)))
    return basis


def _word(label: str) -> str:
    return "" if label == "1" else label


def _label(word: str) -> str:
    return word or "1"


def word_algebra(name: str, letters, L: int, unital: bool = False,
                 differential: dict | None = None):
    """Truncated free algebra as ``(ChainComplex, product)``.  The
    differential is the derivation extending ``differential`` on letters."""
    V = GradedSpace(name, word_basis(letters, L, unital))
    deg = dict(letters)
    differential = differential or {}
    d = {}
    for i, lab in enumerate(V.labels):
        w = _word(lab)
        out = {}
        prefix = 0
        for k, a in enumerate(w):
            if a in differential:
                t = w[:k] + differential[a] + w[k + 1:]
                key = (V.index(_label(t)),)
                out[key] = out.get(key, 0) + (-1 if prefix & 1 else 1)
            prefix += deg[a]
        out = {k: c for k, c in out.items() if c}
        if out:
            d[(i,)] = out
    mu = {}
    for i, a in enumerate(V.labels):
        for j, b in enumerate(V.labels):
            w = _word(a) + _word(b)
            if len(w) <= L:
                mu[(i, j)] = {(V.index(_label(w)),): 1}
    c = ChainComplex(V, GradedMap(V, V, -1, d))
    return c, GradedMap(V, V, 0, mu, 2)


@dataclass
class FreePair:
    source: AInfStructure        # R<x>
    target: AInfStructure        # R<x, v, u>
    morphism: WeakMorphism       # strict inclusion x -> x
    homotopy: HomotopyData       # g1 = projection onto x-powers, h = 0, l solved


def free_pair(L: int = 3, max_arity: int = 4, unital: bool = False) -> FreePair:
    if L < 1:
        raise ValueError("word length must be at least 1")
    cA, mA = word_algebra("A", LETTERS[:1], L, unital)
    cB, mB = word_algebra("B", LETTERS, L, unital, LETTER_DIFFERENTIAL)
    S = AInfStructure(cA, {2: mA}, max_arity)
    T = AInfStructure(cB, {2: mB}, max_arity)
    A, B = cA.space, cB.space
    f1 = GradedMap(A, B, 0, {(i,): {(B.index(lab),): 1} for i, lab in enumerate(A.labels)})
    g1 = GradedMap(B, A, 0, {(B.index(lab),): {(i,): 1} for i, lab in enumerate(A.labels)})
    rhs = (compose(f1, g1) - identity(B)).entries
    l = solve_boundary(B, cB.d, B, cB.d, 1, 1, rhs)
    if l is None:
        raise AssertionError("x-powers do not carry the homology of the free pair")
    hd = HomotopyData(cA, cB, f1, g1, None, l)
    return FreePair(S, T, strict_morphism(S, T, f1), hd)


def nonassociative_pair() -> AInfStructure:
    """Two-dimensional algebra ``x x = y``, ``y x = x`` with ``μ_3 = 0``;
    ``(x x) x = x`` but ``x (x x) = 0``."""
    A = GradedSpace("N", [("x", 0), ("y", 0)])
    mu2 = GradedMap.from_labels(A, A, 0, {("x", "x"): {"y": 1}, ("y", "x"): {"x": 1}}, 2)
    return AInfStructure(ChainComplex(A), {2: mu2}, 4)


def associative_example() -> AInfStructure:
    from .randgen import truncated_polynomial

    c, m = truncated_polynomial(3)
    return AInfStructure(c, {2: m}, 4)


# -- problem files -------------------------------------------------------------


def free_pair_problem(L: int = 3, max_arity: int = 4, unital: bool = False):
    from .fileformat import Problem

    fp = free_pair(L, max_arity, unital)
    p = Problem(max_arity)
    p.add_structure("free_x", fp.source)
    p.add_structure("free_xvu", fp.target)
    p.add_homotopy("hd", fp.homotopy)
    p.add_morphism("F", fp.morphism)
    return p


def nonassociative_problem():
    from .fileformat import Problem

    p = Problem(4)
    p.add_structure("nonassoc", nonassociative_pair())
    return p


CORPUS = {
    "free-pair": free_pair_problem,
    "nonassociative": nonassociative_problem,
}
