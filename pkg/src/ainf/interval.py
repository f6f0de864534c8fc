"""dg algebras acting as cylinders, and A∞-structures tensored with them.

``N(I)`` is the normalized cochain algebra of the 1-simplex: ``φ0, φ1`` in
degree 0 (the vertex cochains) and ``φI`` in degree -1 (the edge cochain),
with ``dφ0 = φI`` and ``dφ1 = -φI``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .bar import AInfStructure, WeakMorphism, strict_morphism
from .errors import HomotopyIdentityFails, SpaceMismatch
from .graded import (ChainComplex, GradedMap, GradedSpace, add_into, compose, identity,
                     tensor_space, zero_map)


@dataclass(frozen=True, eq=False)
class DGAlgebra:
    """A unital dg associative algebra: complex, binary product, unit vector."""

    complex: ChainComplex
    product: GradedMap
    unit: dict

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    def multiply_word(self, word) -> dict:
        """``b_1 ⋯ b_k`` for a word of basis indices (``k ≥ 1``)."""
        vec = {(word[0],): 1}
        for j in word[1:]:
            out: dict = {}
            for (i,), c in vec.items():
                add_into(out, self.product.image((i, j)), c)
            vec = out
            if not vec:
                break
        return vec


@dataclass(frozen=True, eq=False)
class IntervalModel(DGAlgebra):
    """A dg algebra with augmentations ``ε0, ε1`` (as coefficient dicts on
    basis indices) and the unit ``ȷ(1) = unit``."""

    eps0: dict = None
    eps1: dict = None
    # homotopies ȷε_i - id = dλ_i + λ_i d on the algebra itself
    lam0: GradedMap = None
    lam1: GradedMap = None

    def eps(self, i: int) -> dict:
        return self.eps0 if i == 0 else self.eps1


def interval_NI() -> IntervalModel:
    N = GradedSpace("N", [("phi0", 0), ("phi1", 0), ("phiI", -1)])
    p0, p1, pI = 0, 1, 2
    d = GradedMap(N, N, -1, {(p0,): {(pI,): 1}, (p1,): {(pI,): -1}})
    cup = GradedMap(N, N, 0, {
        (p0, p0): {(p0,): 1},
        (p1, p1): {(p1,): 1},
        (p0, pI): {(pI,): 1},
        (pI, p1): {(pI,): 1},
    }, 2)
    lam0 = GradedMap(N, N, 1, {(pI,): {(p1,): 1}})
    lam1 = GradedMap(N, N, 1, {(pI,): {(p0,): -1}})
    return IntervalModel(ChainComplex(N, d), cup, {(p0,): 1, (p1,): 1},
                         {p0: 1}, {p1: 1}, lam0, lam1)


def ground_field() -> DGAlgebra:
    k = GradedSpace("k", [("1", 0)])
    return DGAlgebra(ChainComplex(k), GradedMap(k, k, 0, {(0, 0): {(0,): 1}}, 2), {(0,): 1})


# -- checks on the algebra ---------------------------------------------------


def algebra_defects(B: DGAlgebra) -> list:
    """Names of the failing dg-algebra axioms (associativity, unit, Leibniz)."""
    out = []
    X, m, d = B.space, B.product, B.complex.d
    n = X.dim
    for a, b, c in product(range(n), repeat=3):
        left: dict = {}
        for (i,), x in m.image((a, b)).items():
            add_into(left, m.image((i, c)), x)
        right: dict = {}
        for (j,), y in m.image((b, c)).items():
            add_into(right, m.image((a, j)), y)
        if left != right:
            out.append(f"associativity {X.labels[a]},{X.labels[b]},{X.labels[c]}")
    for a in range(n):
        for side in (0, 1):
            acc: dict = {}
            for (u,), x in B.unit.items():
                add_into(acc, m.image((u, a) if side == 0 else (a, u)), x)
            if acc != {(a,): 1}:
                out.append(f"unit on {X.labels[a]}")
    for a, b in product(range(n), repeat=2):
        lhs = d(m.image((a, b)))
        rhs: dict = {}
        for (i,), x in d.image((a,)).items():
            add_into(rhs, m.image((i, b)), x)
        sign = -1 if X.degrees[a] & 1 else 1
        for (j,), y in d.image((b,)).items():
            add_into(rhs, m.image((a, j)), sign * y)
        if lhs != rhs:
            out.append(f"Leibniz on {X.labels[a]},{X.labels[b]}")
    return out


def augmentation_defects(J: IntervalModel, i: int) -> list:
    """``ε_i`` must be a unital, multiplicative chain map to the ground field."""
    out = []
    X, m, d = J.space, J.product, J.complex.d
    eps = J.eps(i)

    def ev(vec):
        return sum(eps.get(k[0], 0) * c for k, c in vec.items())

    if any(X.degrees[k] != 0 for k in eps):
        out.append("nonzero in nonzero degree")
    if ev(J.unit) != 1:
        out.append("not unital")
    for a in range(X.dim):
        if ev(d.image((a,))) != 0:
            out.append(f"not a chain map on {X.labels[a]}")
        for b in range(X.dim):
            if ev(m.image((a, b))) != eps.get(a, 0) * eps.get(b, 0):
                out.append(f"not multiplicative on {X.labels[a]},{X.labels[b]}")
    return out


def interval_conditions(J: IntervalModel) -> dict:
    """Conditions (1) and (2) of an interval model, plus the dg-algebra
    axioms; condition (3) is exercised through :func:`homotopy_to_cylinder`."""
    X = J.space
    ev = [sum(J.eps(i).get(k[0], 0) * c for k, c in J.unit.items()) for i in (0, 1)]
    result = {
        "dg_algebra": not algebra_defects(J),
        "eps0_algebra_map": not augmentation_defects(J, 0),
        "eps1_algebra_map": not augmentation_defects(J, 1),
        "diagonal": ev == [1, 1],
    }
    d = J.complex.d
    for i, lam in ((0, J.lam0), (1, J.lam1)):
        je = GradedMap(X, X, 0, {(a,): {k: c * x for k, c in J.unit.items()}
                                 for a, x in J.eps(i).items()})
        lhs = je - identity(X)
        rhs = compose(d, lam) + compose(lam, d)
        result[f"retraction{i}"] = ev[i] == 1 and lhs == rhs
    return result


# -- tensoring -----------------------------------------------------------------


def tensor_complex(c: ChainComplex, B: DGAlgebra) -> ChainComplex:
    """``(A ⊗ B, d ⊗ 1 + 1 ⊗ d_B)``."""
    A, X = c.space, B.space
    T = tensor_space(A, X)
    nb = X.dim
    entries: dict = {}
    for a in range(A.dim):
        for b in range(nb):
            out: dict = {}
            for (a2,), x in c.d.image((a,)).items():
                out[(a2 * nb + b,)] = out.get((a2 * nb + b,), 0) + x
            sign = -1 if A.degrees[a] & 1 else 1
            for (b2,), y in B.complex.d.image((b,)).items():
                out[(a * nb + b2,)] = out.get((a * nb + b2,), 0) + sign * y
            entries[(a * nb + b,)] = out
    return ChainComplex(T, GradedMap(T, T, -1, entries))


def tensor_with_dga(S: AInfStructure, B: DGAlgebra) -> AInfStructure:
    """``μ⊗_k(x_1⊗b_1, .., x_k⊗b_k) = (-1)^ε μ_k(x_1..x_k) ⊗ b_1⋯b_k`` with
    ``ε = Σ_{i<j} |b_i||x_j|``."""
    A, X = S.space, B.space
    nb = X.dim
    cplx = tensor_complex(S.complex, B)
    T = cplx.space
    adeg, bdeg = A.degrees, X.degrees
    mu = {}
    for k, m in S.mu.items():
        prods = {}
        for bw in product(range(nb), repeat=k):
            v = B.multiply_word(bw)
            if v:
                prods[bw] = v
        entries: dict = {}
        for xw, img in m.entries.items():
            for bw, bv in prods.items():
                e, run = 0, 0
                for i in range(k):
                    e += run * adeg[xw[i]]
                    run += bdeg[bw[i]]
                sign = -1 if e & 1 else 1
                key = tuple(xw[i] * nb + bw[i] for i in range(k))
                out = entries.setdefault(key, {})
                for (a,), x in img.items():
                    for (b,), y in bv.items():
                        kk = (a * nb + b,)
                        out[kk] = out.get(kk, 0) + sign * x * y
        mu[k] = GradedMap(T, T, k - 2, entries, k)
    return AInfStructure(cplx, mu, S.max_arity)


def tensor_dga_pair(c1: ChainComplex, m1: GradedMap, c2: ChainComplex, m2: GradedMap,
                    name: str | None = None):
    """Tensor product of two dg algebras, returned as ``(complex, product)``."""
    S = AInfStructure(c1, {2: m1}, 2)
    unit = {}
    T = tensor_with_dga(S, DGAlgebra(c2, m2, unit))
    return T.complex, T.operation(2)


def _tensor_with_functional(A: GradedSpace, T: GradedSpace, X: GradedSpace, coeffs: dict):
    """``id ⊗ ε : A ⊗ X → A`` for a degree-0 functional ``ε``."""
    nb = X.dim
    entries = {}
    for a in range(A.dim):
        for b, c in coeffs.items():
            entries[(a * nb + b,)] = {(a,): c}
    return GradedMap(T, A, 0, entries)


def evaluation_map(A: GradedSpace, J: IntervalModel, i: int) -> GradedMap:
    """``id ⊗ ε_i : A ⊗ J → A``."""
    return _tensor_with_functional(A, tensor_space(A, J.space), J.space, J.eps(i))


def unit_map(A: GradedSpace, B: DGAlgebra) -> GradedMap:
    """``id ⊗ ȷ : A → A ⊗ B``, ``a ↦ a ⊗ 1``."""
    nb = B.space.dim
    T = tensor_space(A, B.space)
    return GradedMap(A, T, 0, {(a,): {(a * nb + b,): c for (b,), c in B.unit.items()}
                               for a in range(A.dim)})


def evaluation_morphism(S: AInfStructure, cyl: AInfStructure, J: IntervalModel,
                        i: int) -> WeakMorphism:
    return strict_morphism(cyl, S, evaluation_map(S.space, J, i))


def unit_morphism(S: AInfStructure, cyl: AInfStructure, J: DGAlgebra) -> WeakMorphism:
    return strict_morphism(S, cyl, unit_map(S.space, J))


# -- homotopies ----------------------------------------------------------------


def homotopy_to_cylinder(f: GradedMap, g: GradedMap, h: GradedMap, dV: GradedMap,
                         dW: GradedMap, J: IntervalModel | None = None) -> GradedMap:
    """``h̃(v) = f(v)⊗φ0 + g(v)⊗φ1 + (-1)^{|v|} h(v)⊗φI`` for ``g - f = dh + hd``."""
    J = J or interval_NI()
    V, W = f.source, f.target
    if g.source != V or g.target != W or h.source != V or h.target != W:
        raise SpaceMismatch(f"{V.name}->{W.name}", f"{h.source.name}->{h.target.name}",
                            "homotopy_to_cylinder")
    if g - f != compose(dW, h) + compose(h, dV):
        raise HomotopyIdentityFails("g - f != d h + h d")
    X = J.space
    p0, p1, pI = X.index("phi0"), X.index("phi1"), X.index("phiI")
    nb = X.dim
    T = tensor_space(W, X)
    entries = {}
    for v in range(V.dim):
        out: dict = {}
        for part, b, sgn in ((f, p0, 1), (g, p1, 1), (h, pI, -1 if V.degrees[v] & 1 else 1)):
            for (w,), c in part.image((v,)).items():
                key = (w * nb + b,)
                out[key] = out.get(key, 0) + sgn * c
        entries[(v,)] = out
    return GradedMap(V, T, 0, entries)


def cylinder_contraction(c: ChainComplex, J: IntervalModel | None = None) -> GradedMap:
    """``λ(a⊗φI) = (-1)^{|a|} a⊗φ1``, zero on ``a⊗φ0`` and ``a⊗φ1``."""
    J = J or interval_NI()
    A, X = c.space, J.space
    p1, pI = X.index("phi1"), X.index("phiI")
    nb = X.dim
    T = tensor_space(A, X)
    entries = {(a * nb + pI,): {(a * nb + p1,): -1 if A.degrees[a] & 1 else 1}
               for a in range(A.dim)}
    return GradedMap(T, T, 1, entries)


def contraction_defects(c: ChainComplex, J: IntervalModel | None = None) -> list:
    """Basis elements of ``A ⊗ N(I)`` where ``J E0 - id = dλ + λd`` fails,
    plus a marker if ``E0 J ≠ id``."""
    J = J or interval_NI()
    cyl = tensor_complex(c, J)
    lam = cylinder_contraction(c, J)
    E0 = evaluation_map(c.space, J, 0)
    Jm = unit_map(c.space, J)
    lhs = compose(Jm, E0) - identity(cyl.space)
    rhs = compose(cyl.d, lam) + compose(lam, cyl.d)
    bad = [cyl.space.labels[w[0]] for w in sorted(set(lhs.entries) | set(rhs.entries))
           if lhs.entries.get(w) != rhs.entries.get(w)]
    if compose(E0, Jm) != identity(c.space):
        bad.append("E0 J != id")
    return bad


def zero_homotopy(V: GradedSpace, W: GradedSpace) -> GradedMap:
    return zero_map(V, W, 1)
