"""Obstruction theory for weak A∞-morphisms.

The hom complex ``ℳ = Hom(C(A), ↑A')`` is truncated at the max arity: an
element is a family of homogeneous maps ``F¹_n : (↑A)^{⊗n} → ↑A'`` of one
common degree.  ``ℳ`` carries the maps ``Q¹_n`` (``Q¹_1 = ∂``), the
curvature ``R`` on degree-0 elements, and the obstruction cocycles that
drive the arity-by-arity extension of a chain map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bar import (AInfStructure, WeakMorphism, apply_components, compose_corestriction,
                  coderivation_image)
from .errors import ObstructionUnsolvable, PartialMorphismInvalid, SpaceMismatch
from .graded import GradedMap, GradedSpace, add_into, conjugate, deconjugate, is_chain_map
from .linalg import Echelon


class HomElement:
    """A homogeneous element of the truncated hom complex."""

    __slots__ = ("source", "target", "degree", "components", "max_arity")

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 components: dict, max_arity: int):
        self.source, self.target = source, target
        self.degree, self.max_arity = int(degree), int(max_arity)
        comps = {}
        for n, F in components.items():
            if n > max_arity:
                continue
            if F.source != source or F.target != target or F.arity != n \
                    or F.degree != degree:
                raise SpaceMismatch(f"{source.name}^{n}->{target.name}[{degree}]",
                                    F.signature(), "hom element component")
            if not F.is_zero():
                comps[n] = F
        self.components = comps

    @classmethod
    def from_morphism(cls, F: WeakMorphism) -> "HomElement":
        return cls(F.source.bar_space, F.target.bar_space, 0, F.components, F.max_arity)

    @classmethod
    def zero(cls, source, target, degree, max_arity):
        return cls(source, target, degree, {}, max_arity)

    @property
    def filtration(self):
        """``min{n : F¹_n ≠ 0}``, ``None`` for the zero element."""
        return min(self.components) if self.components else None

    def component(self, n: int) -> GradedMap:
        F = self.components.get(n)
        return F if F is not None else GradedMap(self.source, self.target, self.degree, {}, n)

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other):
        comps = dict(self.components)
        for n, F in other.components.items():
            comps[n] = comps[n] + F if n in comps else F
        return HomElement(self.source, self.target, self.degree, comps, self.max_arity)

    def scale(self, c):
        return HomElement(self.source, self.target, self.degree,
                          {n: F.scale(c) for n, F in self.components.items()}, self.max_arity)

    def __eq__(self, other):
        if not isinstance(other, HomElement):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.degree == other.degree and self.components == other.components)

    __hash__ = None

    def __repr__(self):
        return f"HomElement(degree={self.degree}, arities={sorted(self.components)})"


def _tensor_split_image(args, degs, word, start=0) -> dict:
    """``(F⁽¹⁾ ⊗ .. ⊗ F⁽ᵏ⁾) ∘ Δ̃^{k-1}`` applied to ``word`` with Koszul signs
    ``(-1)^{|F⁽ᵇ⁾| · deg(word before piece b)}``."""
    k = len(args)
    if k == 0:
        return {(): 1} if start == len(word) else {}
    out: dict = {}
    n = len(word)
    first, rest = args[0], args[1:]
    prefix = sum(degs[i] for i in word[:start])
    neg = (first.degree * prefix) & 1
    for end in range(start + 1, n - len(rest) + 1):
        F = first.components.get(end - start)
        if F is None:
            continue
        img = F.entries.get(word[start:end])
        if not img:
            continue
        tail = _tensor_split_image(rest, degs, word, end)
        if not tail:
            continue
        for a, x in img.items():
            for b, y in tail.items():
                key = a + b
                v = out.get(key, 0) + (-x * y if neg else x * y)
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return out


class HomComplex:
    """``ℳ`` for a source structure ``S`` (on ``A``) and target ``T`` (on ``A'``)."""

    def __init__(self, S: AInfStructure, T: AInfStructure, max_arity: int | None = None):
        self.S, self.T = S, T
        self.N = max_arity or min(S.max_arity, T.max_arity)
        self.V, self.W = S.bar_space, T.bar_space
        self._degs = self.V.degrees

    def element(self, degree: int, components: dict) -> HomElement:
        return HomElement(self.V, self.W, degree, components, self.N)

    def _tabulate(self, degree: int, fn, arities=None) -> HomElement:
        comps = {}
        for n in arities or range(1, self.N + 1):
            comps[n] = GradedMap.tabulate(self.V, self.W, degree, n, fn, check=False)
        return self.element(degree, comps)

    def delta_source(self, word) -> dict:
        return coderivation_image(self.S.bar, -1, self._degs, word)

    def del_(self, F: HomElement) -> HomElement:
        """``∂F = δ'¹_1 ∘ F - (-1)^m F ∘ δ``."""
        d1 = self.T.bar[1]
        sign = -1 if F.degree % 2 == 0 else 1

        def fn(w):
            Fn = F.components.get(len(w))
            out = d1(Fn.entries.get(w, {})) if Fn is not None else {}
            add_into(out, apply_components(F.components, self.delta_source(w)), sign)
            return out

        return self._tabulate(F.degree - 1, fn)

    def Q(self, args) -> HomElement:
        """``Q¹_n(F⁽¹⁾ ⊠ .. ⊠ F⁽ⁿ⁾)``; ``n = 1`` is ``∂``."""
        args = list(args)
        if len(args) == 1:
            return self.del_(args[0])
        n = len(args)
        D = self.T.bar.get(n)
        degree = sum(a.degree for a in args) - 1
        if D is None:
            return self.element(degree, {})
        degs = self._degs

        def fn(w):
            return D(_tensor_split_image(args, degs, w))

        return self._tabulate(degree, fn, range(n, self.N + 1))

    def Q_n(self, n: int, args) -> HomElement:
        """``Q¹_n`` with the arity stated explicitly (``n ≥ 2``)."""
        args = list(args)
        if n < 2 or len(args) != n:
            raise ValueError(f"Q_{n} takes {n} arguments, got {len(args)}")
        return self.Q(args)

    def curvature(self, F: HomElement) -> HomElement:
        """``R(F) = Σ_{n≥1} Q¹_n(F^{⊠n})``, assembled from the ``Q`` maps."""
        if F.degree != 0:
            raise ValueError("curvature is defined on degree-0 elements")
        total = self.del_(F)
        for n in range(2, self.N + 1):
            total = total + self.Q([F] * n)
        return total

    def bianchi_residual(self, F: HomElement) -> HomElement:
        """``Σ_n Σ_{i+j=n-1} Q¹_n(F^{⊠i} ⊠ R(F) ⊠ F^{⊠j})``; vanishes identically."""
        R = self.curvature(F)
        total = self.del_(R)
        for n in range(2, self.N + 1):
            for i in range(n):
                total = total + self.Q([F] * i + [R] + [F] * (n - 1 - i))
        return total

    def qq_residual(self, args) -> HomElement:
        """``Σ_k Q¹_k ∘ Q^k_n`` on ``F⁽¹⁾ ⊠ .. ⊠ F⁽ⁿ⁾``, where ``Q^k_n`` applies one
        ``Q¹`` to a consecutive block with the Koszul sign of the elements it
        passes."""
        args = list(args)
        n = len(args)
        degree = sum(a.degree for a in args) - 2
        total = self.element(degree, {})
        for i in range(n):
            passed = sum(a.degree for a in args[:i])
            for j in range(i + 1, n + 1):
                inner = self.Q(args[i:j])
                term = self.Q(args[:i] + [inner] + args[j:])
                total = total + (term.scale(-1) if passed & 1 else term)
        return total

    # -- partial morphisms and cocycles --------------------------------------

    def dbar(self, X: GradedMap) -> GradedMap:
        """Induced differential on ``Hom(C^m(A), ↑A')``:
        ``δ'¹_1 ∘ X - (-1)^{|X|} X ∘ δ^m_m``."""
        m = X.arity
        d1 = self.T.bar[1]
        inner = {1: self.S.bar[1]}
        sign = -1 if X.degree % 2 == 0 else 1
        degs = self._degs

        def fn(w):
            out = d1(X.entries.get(w, {}))
            add_into(out, X(coderivation_image(inner, -1, degs, w)), sign)
            return out

        return GradedMap.tabulate(self.V, self.W, X.degree - 1, m, fn, check=False)

    def partial_residual(self, comps: dict, word) -> dict:
        """``(δ' F - F δ)(word)`` for the coalgebra map with corestriction
        ``comps`` (missing components are zero)."""
        left = compose_corestriction(self.T.bar, self.T.bar_prefixes, comps, word)
        add_into(left, apply_components(comps, self.delta_source(word)), -1)
        return left

    def obstruction_cocycle(self, m: int, comps: dict, check: bool = True) -> GradedMap:
        """``c_m(F) = Σ_{k=2}^m δ'¹_k F^k_m - Σ_{k=1}^{m-1} F¹_k δ^k_m``."""
        comps = {k: F for k, F in comps.items() if k < m}
        if check:
            for n in range(1, m):
                for w in self.V.words(n, {t + 1 for t in self.W.degree_set()}):
                    if self.partial_residual(comps, w):
                        raise PartialMorphismInvalid(
                            f"partial morphism fails at arity {n} on "
                            f"{'⊗'.join(self.V.word_labels(w))}")
        degs = self._degs
        Tbar, Sbar, prefixes = self.T.bar, self.S.bar, self.T.bar_prefixes

        def fn(w):
            out = compose_corestriction(Tbar, prefixes, comps, w)
            add_into(out, apply_components(comps, coderivation_image(Sbar, -1, degs, w)), -1)
            return out

        return GradedMap.tabulate(self.V, self.W, -1, m, fn, check=False)

    def solve_extension(self, c: GradedMap, allowed_targets=None):
        """``X`` with ``∂̄X = -c``, or ``None`` if ``[c] ≠ 0``."""
        rhs = {w: {k: -x for k, x in v.items()} for w, v in c.entries.items()}
        return solve_boundary(self.V, self.S.bar[1], self.W, self.T.bar[1], c.arity,
                              c.degree + 1, rhs, allowed_targets)


def solve_boundary(src: GradedSpace, d_src: GradedMap, tgt: GradedSpace, d_tgt: GradedMap,
                   m: int, degree: int, rhs: dict, allowed_targets=None):
    """Solve ``d_tgt ∘ X - (-1)^{degree} X ∘ d_src^{(m)} = rhs`` for a map
    ``X : src^{⊗m} → tgt`` of the given degree, where ``d_src^{(m)}`` is the
    Leibniz extension with Koszul signs.  ``rhs`` maps input words to
    vectors.  Returns the solution as a :class:`GradedMap` (free unknowns set
    to zero, pivots by first word and basis element) or ``None``.

    ``allowed_targets`` optionally restricts the output basis elements that
    ``X`` may use.
    """
    s = 1 if degree % 2 == 0 else -1
    sdeg = src.degrees
    tdeg = tgt.degrees
    allowed = None if allowed_targets is None else frozenset(allowed_targets)
    dT: dict = {}
    for (b,), img in d_tgt.entries.items():
        if allowed is not None and b not in allowed:
            continue
        for (c,), x in img.items():
            dT.setdefault(c, {})[b] = x
    inner = {1: d_src}
    row_degrees = {t - degree + 1 for t in tgt.degree_set()}
    ech = Echelon()
    for w0 in src.words(m, row_degrees):
        target_deg = sum(sdeg[i] for i in w0) + degree - 1
        dw = coderivation_image(inner, -1, sdeg, w0)
        b0 = rhs.get(w0, {})
        for (c,) in ((c,) for c in tgt.by_degree.get(target_deg, ())):
            row = {}
            for b, x in dT.get(c, {}).items():
                row[(w0, b)] = x
            if allowed is None or c in allowed:
                for w, y in dw.items():
                    key = (w, c)
                    v = row.get(key, 0) - s * y
                    if v:
                        row[key] = v
                    else:
                        row.pop(key, None)
            if ech.add(row, b0.get((c,), 0)) is None:
                return None
    # right-hand sides on words that produced no rows would be inconsistent
    for w, v in rhs.items():
        deg = sum(sdeg[i] for i in w) + degree - 1
        if v and deg not in tgt.degree_set():
            return None
    sol = ech.back_substitute()
    entries: dict = {}
    for (w, b), x in sol.items():
        entries.setdefault(w, {})[(b,)] = x
    X = GradedMap(src, tgt, degree, entries, m, check=False)
    if any(tdeg[b[0]] != sum(sdeg[i] for i in w) + degree
           for w, v in entries.items() for b in v):
        raise AssertionError("solver produced an inhomogeneous map")
    return X


# -- induction -----------------------------------------------------------------


@dataclass
class ObstructionClass:
    arity: int
    representative: GradedMap      # κ_n : A^{⊗n} → A' of degree n - 2
    vanishes: bool
    preimage: GradedMap | None = None   # chosen f_n (degree n - 1) when the class vanishes

    @property
    def status(self) -> str:
        return "zero" if self.vanishes else "nonzero"


@dataclass
class ObstructionReport:
    classes: list = field(default_factory=list)
    morphism: WeakMorphism | None = None

    @property
    def first_nonzero(self):
        return next((c for c in self.classes if not c.vanishes), None)

    @property
    def ok(self) -> bool:
        return self.first_nonzero is None


def _check_linear_part(S: AInfStructure, T: AInfStructure, f1: GradedMap):
    if f1.source != S.space or f1.target != T.space or f1.degree != 0 or f1.arity != 1:
        raise SpaceMismatch(f"{S.space.name}->{T.space.name}",
                            f"{f1.source.name}->{f1.target.name}", "linear part")
    if not is_chain_map(f1, S.d, T.d):
        raise PartialMorphismInvalid("f1 is not a chain map")


def obstruction_classes(S: AInfStructure, T: AInfStructure, f1: GradedMap,
                        up_to: int | None = None, start: dict | None = None) -> ObstructionReport:
    """Run the extension induction for ``f1`` and record the class met at each
    arity.  Stops at the first nonvanishing class.  ``start`` may supply
    already-chosen bar components for low arities."""
    _check_linear_part(S, T, f1)
    M = HomComplex(S, T, up_to)
    comps = {1: conjugate(f1, M.V, M.W)}
    for k, F in (start or {}).items():
        comps[k] = F
    report = ObstructionReport()
    for n in range(2, M.N + 1):
        if n in comps:
            continue
        c = M.obstruction_cocycle(n, comps, check=False)
        kappa = deconjugate(c, S.space, T.space)
        X = M.solve_extension(c)
        if X is None:
            report.classes.append(ObstructionClass(n, kappa, False))
            return report
        report.classes.append(ObstructionClass(n, kappa, True,
                                               deconjugate(X, S.space, T.space)))
        if not X.is_zero():
            comps[n] = X
    report.morphism = WeakMorphism(S, T, comps, M.N)
    return report


def extend_chain_map(S: AInfStructure, T: AInfStructure, f1: GradedMap,
                     max_arity: int | None = None) -> WeakMorphism:
    """Extend ``f1`` to a weak morphism up to the max arity or raise
    :class:`ObstructionUnsolvable` at the first nonvanishing class."""
    report = obstruction_classes(S, T, f1, max_arity)
    bad = report.first_nonzero
    if bad is not None:
        raise ObstructionUnsolvable(bad.arity)
    return report.morphism


def hom_boundary_preimage(kappa: GradedMap, dA: GradedMap, dB: GradedMap):
    """``φ`` with ``∂φ = κ`` in ``Hom(A^{⊗n}, A')`` (unshifted), or ``None``.
    Used to cross-check the vanishing of obstruction classes."""
    return solve_boundary(kappa.source, dA, kappa.target, dB, kappa.arity, kappa.degree + 1,
                          kappa.entries)

