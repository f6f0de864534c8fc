"""A∞-structures as codifferentials, weak morphisms as coalgebra maps.

Everything here lives on the shifted space ``V = ↑A``.  An A∞-structure
``(d, μ_2, ..., μ_N)`` is stored together with its bar components
``δ¹_1 = ↑d↓`` and ``δ¹_n = ↑μ_n↓^{⊗n}`` (all of degree -1); a weak morphism
is stored by its bar components ``F¹_n : V^{⊗n} → V'`` (all of degree 0).
The induced pieces ``D^m_n`` and ``F^m_n`` are never materialised in the
hot paths: they are evaluated word by word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .errors import DegreeError, NonInvertibleLinearPart, SpaceMismatch
from .graded import (ChainComplex, GradedMap, GradedSpace, add_into, compose,
                     conjugate, deconjugate, identity, tensor_maps)
from .linalg import invert_map

DEFAULT_MAX_ARITY = 4


# -- word-level evaluation ---------------------------------------------------


def apply_components(comps: dict, vec: dict) -> dict:
    """``Σ_u c_u · C¹_{|u|}(u)``: the corestriction of a family of
    components applied to a sum of words of mixed length."""
    out: dict = {}
    for u, c in vec.items():
        m = comps.get(len(u))
        if m is None:
            continue
        img = m.entries.get(u)
        if img:
            add_into(out, img, c)
    return out


def coderivation_image(comps: dict, degree: int, degs, word) -> dict:
    """Image of ``word`` under the coderivation with corestriction ``comps``:
    ``Σ (-1)^{|D| |w_{<i}|} w_{<i} ⊗ D¹_k(w_i..w_{i+k-1}) ⊗ w_{>i+k-1}``."""
    out: dict = {}
    n = len(word)
    odd = degree & 1
    prefix = 0
    for i in range(n):
        neg = odd and (prefix & 1)
        for k, D in comps.items():
            if i + k > n:
                continue
            img = D.entries.get(word[i:i + k])
            if not img:
                continue
            head, tail = word[:i], word[i + k:]
            for u, c in img.items():
                key = head + u + tail
                v = out.get(key, 0) + (-c if neg else c)
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        prefix += degs[word[i]]
    return out


def coderivation_apply(comps: dict, degree: int, degs, vec: dict) -> dict:
    out: dict = {}
    for w, c in vec.items():
        add_into(out, coderivation_image(comps, degree, degs, w), c)
    return out


class ComorphismImage:
    """Memoised evaluation of the coalgebra map with degree-0 corestriction
    ``comps``: ``F(w) = Σ_k F¹_k(w_1..w_k) ⊗ F(w_{k+1}..)``."""

    def __init__(self, comps: dict):
        self.comps = comps
        self.cache: dict = {(): {(): 1}}

    def __call__(self, word) -> dict:
        hit = self.cache.get(word)
        if hit is not None:
            return hit
        out: dict = {}
        comps = self.comps
        for k in range(1, len(word) + 1):
            F = comps.get(k)
            if F is None:
                continue
            head = F.entries.get(word[:k])
            if not head:
                continue
            tail = self(word[k:])
            for a, x in head.items():
                for b, y in tail.items():
                    key = a + b
                    v = out.get(key, 0) + x * y
                    if v:
                        out[key] = v
                    else:
                        out.pop(key, None)
        self.cache[word] = out
        return out

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for w, c in vec.items():
            add_into(out, self(w), c)
        return out

    def set_component(self, n: int, m: GradedMap):
        self.comps[n] = m
        self.cache = {w: v for w, v in self.cache.items() if len(w) < n}


def corestriction_prefixes(comps: dict) -> frozenset:
    """Every nonempty prefix of an input word on which some component of
    ``comps`` is nonzero."""
    out = set()
    for m in comps.values():
        for w in m.entries:
            for i in range(1, len(w) + 1):
                out.add(w[:i])
    return frozenset(out)


def compose_corestriction(target: dict, prefixes: frozenset, comps: dict, word) -> dict:
    """``Σ_k T¹_k F^k(word)`` without materialising ``F(word)``: output
    words are built one factor at a time and dropped as soon as they stop
    being a prefix of a word ``target`` sees.  ``prefixes`` comes from
    :func:`corestriction_prefixes` on ``target``."""
    n = len(word)
    states = [dict() for _ in range(n + 1)]
    states[0][()] = 1
    for pos in range(n):
        cur = states[pos]
        if not cur:
            continue
        for k in range(1, n - pos + 1):
            F = comps.get(k)
            if F is None:
                continue
            head = F.entries.get(word[pos:pos + k])
            if not head:
                continue
            nxt = states[pos + k]
            for p, c in cur.items():
                for a, x in head.items():
                    key = p + a
                    if key in prefixes:
                        v = nxt.get(key, 0) + c * x
                        if v:
                            nxt[key] = v
                        else:
                            nxt.pop(key)
    out: dict = {}
    for p, c in states[n].items():
        m = target.get(len(p))
        img = m.entries.get(p) if m is not None else None
        if img:
            add_into(out, img, c)
    return out


# -- reports -----------------------------------------------------------------


@dataclass
class Residual:
    arity: int
    word: tuple      # labels of the input word
    value: list      # [(output labels, scalar)]

    def __str__(self):
        terms = " + ".join(f"{c}*{'⊗'.join(k)}" for k, c in self.value)
        return f"arity {self.arity}: {'⊗'.join(self.word)} -> {terms}"


@dataclass
class CheckReport:
    what: str
    max_arity: int
    residuals: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.residuals

    @property
    def failing_arities(self) -> list:
        return sorted({r.arity for r in self.residuals})

    def summary(self) -> str:
        if self.ok:
            return f"{self.what}: ok up to arity {self.max_arity}"
        return f"{self.what}: fails at arities {self.failing_arities}"


def _residual(arity, word, vec, src: GradedSpace, tgt: GradedSpace) -> Residual:
    return Residual(arity, src.word_labels(word),
                    [(tgt.word_labels(k), vec[k]) for k in sorted(vec)])


# -- structures --------------------------------------------------------------


class AInfStructure:
    """``(A, d, μ_2..μ_N)`` with ``deg μ_n = n - 2``.

    The Stasheff identities are *not* checked at construction (that costs a
    full pass over ``C^{≤N}``); call :meth:`check` or :func:`codiff_check`.
    """

    def __init__(self, complex: ChainComplex, mu: dict | None = None,
                 max_arity: int = DEFAULT_MAX_ARITY):
        if max_arity < 1:
            raise ValueError("max_arity must be at least 1")
        A = complex.space
        self.complex = complex
        self.max_arity = int(max_arity)
        self.mu: dict = {}
        for n, m in sorted((mu or {}).items()):
            n = int(n)
            if not 2 <= n:
                raise DegreeError(f"operations start at arity 2, got {n}")
            if n > max_arity:
                if not m.is_zero():
                    raise DegreeError(f"μ_{n} given beyond max arity {max_arity}")
                continue
            if m.source != A or m.target != A:
                raise SpaceMismatch(A, m.source, f"μ_{n}")
            if m.arity != n or m.out_arity != 1 or m.degree != n - 2:
                raise DegreeError(f"μ_{n} must map A^⊗{n} -> A with degree {n - 2}, "
                                  f"got {m.signature()}")
            if not m.is_zero():
                self.mu[n] = m
        self.bar_space = A.suspend()
        V = self.bar_space
        self.bar = {1: GradedMap(V, V, -1, complex.d.entries, check=False)}
        for n, m in self.mu.items():
            self.bar[n] = conjugate(m, V, V)

    @classmethod
    def from_bar(cls, complex: ChainComplex, bar: dict, max_arity: int):
        A = complex.space
        mu = {n: deconjugate(D, A, A) for n, D in bar.items() if n >= 2 and not D.is_zero()}
        return cls(complex, mu, max_arity)

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    @cached_property
    def bar_prefixes(self) -> frozenset:
        return corestriction_prefixes(self.bar)

    @property
    def d(self) -> GradedMap:
        return self.complex.d

    def operation(self, n: int) -> GradedMap:
        if n == 1:
            return self.d
        m = self.mu.get(n)
        if m is None:
            A = self.space
            return GradedMap(A, A, n - 2, {}, n)
        return m

    def truncate(self, max_arity: int) -> "AInfStructure":
        return AInfStructure(self.complex, {n: m for n, m in self.mu.items() if n <= max_arity},
                             max_arity)

    def check(self, limit=None) -> CheckReport:
        return codiff_check(self, limit)

    def __eq__(self, other):
        if not isinstance(other, AInfStructure):
            return NotImplemented
        return (self.complex == other.complex and self.max_arity == other.max_arity
                and self.mu == other.mu)

    __hash__ = None

    def __repr__(self):
        ops = ",".join(str(n) for n in sorted(self.mu))
        return f"AInfStructure({self.space.name!r}, N={self.max_arity}, mu=[{ops}])"


def associative_structure(complex: ChainComplex, mu2: GradedMap,
                          max_arity: int = DEFAULT_MAX_ARITY) -> AInfStructure:
    return AInfStructure(complex, {2: mu2}, max_arity)


def _check_words(V: GradedSpace, n: int, shift: int, target: GradedSpace):
    allowed = {t - shift for t in target.degree_set()}
    return V.words(n, allowed)


def codiff_check(S: AInfStructure, limit: int | None = None) -> CheckReport:
    """Evaluate ``Σ_k δ¹_k δ^k_n`` on every basis word of length ``n ≤ N``."""
    V = S.bar_space
    degs = V.degrees
    report = CheckReport("codifferential", S.max_arity)
    for n in range(1, S.max_arity + 1):
        for w in _check_words(V, n, -2, V):
            r = apply_components(S.bar, coderivation_image(S.bar, -1, degs, w))
            if r:
                report.residuals.append(_residual(n, w, r, V, V))
                if limit is not None and len(report.residuals) >= limit:
                    return report
    return report


def stasheff_residual(S: AInfStructure, n: int) -> GradedMap:
    """``Σ_{k=1}^{n} δ¹_k ∘ δ^k_n`` assembled from tensor products of
    materialised maps; an independent route to :func:`codiff_check`."""
    V = S.bar_space
    total = GradedMap(V, V, -2, {}, n)
    for k in range(1, n + 1):
        Dk = S.bar.get(k)
        if Dk is None:
            continue
        total = total + compose(Dk, coder_component(S.bar, k, n, V))
    return total


# -- induced components ------------------------------------------------------


def reduced_diagonal(n: int, word) -> list:
    """``Δ̃^n(word)`` as a list of ``(n+1)``-tuples of nonempty subwords,
    computed by the recursion ``Δ̃^n = (Δ̄ ⊗ id^{⊗(n-1)}) ∘ Δ̃^{n-1}``."""
    word = tuple(word)
    if n == 0:
        return [(word,)]
    out = []
    for split in reduced_diagonal(n - 1, word):
        first, rest = split[0], split[1:]
        for i in range(1, len(first)):
            out.append((first[:i], first[i:]) + rest)
    return out


def coder_component(comps: dict, m: int, n: int, V: GradedSpace | None = None) -> GradedMap:
    """``D^m_n = Σ_{i+j=m-1} id^{⊗i} ⊗ D¹_{n-m+1} ⊗ id^{⊗j}``."""
    any_map = next(iter(comps.values()))
    V = V or any_map.source
    degree = any_map.degree
    if m > n or m < 1:
        return GradedMap(V, V, degree, {}, n, max(m, 1))
    D = comps.get(n - m + 1)
    if D is None:
        return GradedMap(V, V, degree, {}, n, m)
    idV = identity(V)
    total = None
    for i in range(m):
        term = tensor_maps([idV] * i + [D] + [idV] * (m - 1 - i))
        total = term if total is None else total + term
    return total


def _compositions(n: int, m: int):
    """Ordered compositions of ``n`` into ``m`` positive parts."""
    for cuts in combinations(range(1, n), m - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(m))


def comorph_component(comps: dict, m: int, n: int, method: str = "compositions") -> GradedMap:
    """``F^m_n``, either as ``Σ_{i_1+..+i_m=n} F¹_{i_1} ⊗ .. ⊗ F¹_{i_m}``
    (``method="compositions"``) or as ``(F¹)^{⊗m} ∘ Δ̃^{m-1}`` restricted to
    words of length ``n`` (``method="diagonal"``)."""
    any_map = next(iter(comps.values()))
    V, W, degree = any_map.source, any_map.target, any_map.degree
    if m > n or m < 1:
        return GradedMap(V, W, m * degree, {}, n, max(m, 1))
    if method == "compositions":
        total = GradedMap(V, W, m * degree, {}, n, m)
        for parts in _compositions(n, m):
            if any(comps.get(i) is None for i in parts):
                continue
            total = total + tensor_maps([comps[i] for i in parts])
        return total
    if method != "diagonal":
        raise ValueError(f"unknown method {method!r}")
    degs = V.degrees
    entries = {}
    for w in V.words(n):
        out: dict = {}
        for split in reduced_diagonal(m - 1, w):
            vec = {(): 1}
            prefix = 0
            for piece in split:
                F = comps.get(len(piece))
                img = F.entries.get(piece) if F is not None else None
                if not img:
                    vec = {}
                    break
                sign = -1 if (degree * prefix) & 1 else 1
                vec = {a + b: sign * x * y for a, x in vec.items() for b, y in img.items()}
                prefix += sum(degs[i] for i in piece)
            add_into(out, vec)
        if out:
            entries[w] = out
    return GradedMap(V, W, m * degree, entries, n, m, check=False)


# -- morphisms ---------------------------------------------------------------


class WeakMorphism:
    """A weak A∞-morphism stored through its bar components ``F¹_n``.

    The dg-coalgebra condition is *not* enforced at construction; partial
    morphisms in the middle of an induction have the same type.  Use
    :meth:`check` / :func:`dgmorph_check`.
    """

    def __init__(self, source: AInfStructure, target: AInfStructure, components: dict,
                 max_arity: int | None = None):
        V, W = source.bar_space, target.bar_space
        N = max_arity if max_arity is not None else min(source.max_arity, target.max_arity)
        self.source, self.target, self.max_arity = source, target, N
        comps = {}
        for n, F in sorted(components.items()):
            if n > N:
                if not F.is_zero():
                    raise DegreeError(f"component {n} beyond max arity {N}")
                continue
            if F.source != V or F.target != W:
                raise SpaceMismatch(f"{V.name}->{W.name}", f"{F.source.name}->{F.target.name}",
                                    f"component F¹_{n}")
            if F.arity != n or F.out_arity != 1 or F.degree != 0:
                raise DegreeError(f"bar component {n} must be degree 0 from arity {n}, "
                                  f"got {F.signature()}")
            if not F.is_zero():
                comps[n] = F
        self.components = comps
        self._image = ComorphismImage(comps)

    @classmethod
    def from_maps(cls, source: AInfStructure, target: AInfStructure, maps: dict,
                  max_arity: int | None = None):
        """Build from ``f_n : A^{⊗n} → A'`` of degree ``n - 1``."""
        V, W = source.bar_space, target.bar_space
        comps = {}
        for n, f in maps.items():
            if f.degree != n - 1 or f.arity != n:
                raise DegreeError(f"f_{n} must have degree {n - 1} and arity {n}")
            if f.source != source.space or f.target != target.space:
                raise SpaceMismatch(f"{source.space.name}->{target.space.name}",
                                    f"{f.source.name}->{f.target.name}", f"f_{n}")
            comps[n] = conjugate(f, V, W)
        return cls(source, target, comps, max_arity)

    def component(self, n: int) -> GradedMap:
        F = self.components.get(n)
        if F is None:
            return GradedMap(self.source.bar_space, self.target.bar_space, 0, {}, n)
        return F

    def f(self, n: int) -> GradedMap:
        """The unshifted map ``f_n = ↓ F¹_n ↑^{⊗n}`` of degree ``n - 1``."""
        return deconjugate(self.component(n), self.source.space, self.target.space)

    @property
    def linear(self) -> GradedMap:
        return self.f(1)

    def image(self, word) -> dict:
        return self._image(word)

    def is_strict(self) -> bool:
        return all(n == 1 for n in self.components)

    def is_isotopy(self) -> bool:
        return (self.source.space == self.target.space
                and self.linear == identity(self.source.space))

    def check(self, limit=None) -> CheckReport:
        return dgmorph_check(self, limit)

    def truncate(self, n: int) -> "WeakMorphism":
        return WeakMorphism(self.source, self.target,
                            {k: F for k, F in self.components.items() if k <= n}, self.max_arity)

    def __eq__(self, other):
        if not isinstance(other, WeakMorphism):
            return NotImplemented
        return (self.source.space == other.source.space
                and self.target.space == other.target.space
                and self.components == other.components)

    __hash__ = None

    def __repr__(self):
        return (f"WeakMorphism({self.source.space.name} -> {self.target.space.name}, "
                f"components={sorted(self.components)})")


def identity_morphism(S: AInfStructure) -> WeakMorphism:
    V = S.bar_space
    return WeakMorphism(S, S, {1: identity(V)})


def strict_morphism(source: AInfStructure, target: AInfStructure, f1: GradedMap) -> WeakMorphism:
    return WeakMorphism.from_maps(source, target, {1: f1})


def dgmorph_residual(F: WeakMorphism, word) -> dict:
    """``(Σ_k D'¹_k F^k_n - Σ_k F¹_k D^k_n)(word)``."""
    S, T = F.source, F.target
    left = compose_corestriction(T.bar, T.bar_prefixes, F.components, word)
    right = apply_components(F.components,
                             coderivation_image(S.bar, -1, S.bar_space.degrees, word))
    add_into(left, right, -1)
    return left


def dgmorph_check(F: WeakMorphism, limit: int | None = None) -> CheckReport:
    V, W = F.source.bar_space, F.target.bar_space
    report = CheckReport("dg coalgebra morphism", F.max_arity)
    for n in range(1, F.max_arity + 1):
        for w in _check_words(V, n, -1, W):
            r = dgmorph_residual(F, w)
            if r:
                report.residuals.append(_residual(n, w, r, V, W))
                if limit is not None and len(report.residuals) >= limit:
                    return report
    return report


def _same_structure(S: AInfStructure, T: AInfStructure) -> bool:
    return S is T or (S.space == T.space and S.d == T.d and S.mu == T.mu)


def compose_morphisms(G: WeakMorphism, F: WeakMorphism) -> WeakMorphism:
    """``(G ∘ F)¹_n = Σ_m G¹_m ∘ F^m_n``."""
    if not _same_structure(F.target, G.source):
        raise SpaceMismatch(G.source.space, F.target.space, "compose_morphisms")
    N = min(F.max_arity, G.max_arity)
    V, W = F.source.bar_space, G.target.bar_space
    comps = {}
    for n in range(1, N + 1):
        comps[n] = GradedMap.tabulate(
            V, W, 0, n, lambda w: apply_components(G.components, F.image(w)), check=False)
    return WeakMorphism(F.source, G.target, comps, N)


def invert_components(comps: dict, V: GradedSpace, W: GradedSpace, max_arity: int) -> dict:
    """Inverse of the coalgebra map with corestriction ``comps : T(V) → T(W)``:
    ``G¹_1 = (F¹_1)^{-1}``, ``G¹_n = -(F¹_1)^{-1} Σ_{m≥2} F¹_m G^m_n``."""
    F1 = comps.get(1)
    if F1 is None:
        raise NonInvertibleLinearPart("linear component is zero")
    G1 = invert_map(F1)
    inv = {1: G1}
    partial = ComorphismImage(dict(inv))
    higher = {k: F for k, F in comps.items() if k >= 2}
    for n in range(2, max_arity + 1):
        def fn(w):
            return G1(apply_components(higher, partial(w))) if higher else {}
        Gn = GradedMap.tabulate(W, V, 0, n, fn, check=False)
        Gn = Gn.scale(-1)
        if not Gn.is_zero():
            inv[n] = Gn
            partial.set_component(n, Gn)
    return inv


def invert_weak_iso(F: WeakMorphism) -> WeakMorphism:
    comps = invert_components(F.components, F.source.bar_space, F.target.bar_space, F.max_arity)
    return WeakMorphism(F.target, F.source, comps, F.max_arity)


def transport_structure(S: AInfStructure, comps: dict, space: GradedSpace | None = None):
    """Push ``S`` forward along a coalgebra isomorphism ``F`` given by its
    corestriction ``comps`` (``↑A → ↑A''``): the new codifferential is
    ``F δ F^{-1}``.  Returns ``(T, F)`` with ``F : S → T`` a weak
    isomorphism by construction."""
    V = S.bar_space
    W = comps[1].target
    A2 = space or GradedSpace(W.name[1:] if W.name.startswith("s") else W.name,
                              ((lab, deg - 1) for lab, deg in W.basis))
    N = S.max_arity
    inv = ComorphismImage(invert_components(comps, V, W, N))
    degs = V.degrees
    bar = {}
    for n in range(1, N + 1):
        bar[n] = GradedMap.tabulate(
            W, W, -1, n,
            lambda w: apply_components(comps, coderivation_apply(S.bar, -1, degs, inv(w))),
            check=False)
    d = GradedMap(A2, A2, -1, bar[1].entries)
    T = AInfStructure.from_bar(ChainComplex(A2, d), bar, N)
    F = WeakMorphism(S, T, {n: GradedMap(V, T.bar_space, 0, m.entries, n, check=False)
                            for n, m in comps.items()})
    return T, F


# -- equality and twists -------------------------------------------------------


@dataclass
class StructureDifference:
    arity: int
    word: tuple
    left: list
    right: list

    def __str__(self):
        def fmt(v):
            return " + ".join(f"{c}*{'⊗'.join(k)}" for k, c in v) or "0"
        return f"arity {self.arity} on {'⊗'.join(self.word)}: {fmt(self.left)} vs {fmt(self.right)}"


def structure_difference(S: AInfStructure, T: AInfStructure):
    """First entry (in arity, then basis order) where ``S`` and ``T``
    differ, or ``None`` if the operations agree up to the smaller truncation."""
    if S.space.basis != T.space.basis:
        raise SpaceMismatch(S.space, T.space, "structure comparison")
    A = S.space
    for n in range(1, min(S.max_arity, T.max_arity) + 1):
        a, b = S.operation(n).entries, T.operation(n).entries
        for w in sorted(set(a) | set(b)):
            u, v = a.get(w, {}), b.get(w, {})
            if u != v:
                return StructureDifference(
                    n, A.word_labels(w),
                    [(A.word_labels(k), u[k]) for k in sorted(u)],
                    [(A.word_labels(k), v[k]) for k in sorted(v)])
    return None


def structures_equal(S: AInfStructure, T: AInfStructure) -> bool:
    return structure_difference(S, T) is None


def twist_structure(S: AInfStructure, phi: GradedMap) -> AInfStructure:
    """``φ_* S``: ``d^φ = φ d φ^{-1}``, ``μ^φ_n = φ μ_n (φ^{-1})^{⊗n}``."""
    if phi.source != S.space:
        raise SpaceMismatch(S.space, phi.source, "twist")
    inv = invert_map(phi)
    B = phi.target
    d = compose(phi, compose(S.d, inv))
    mu = {n: compose(phi, compose(m, tensor_maps([inv] * n))) for n, m in S.mu.items()}
    return AInfStructure(ChainComplex(B, d), mu, S.max_arity)


def is_twist(S: AInfStructure, T: AInfStructure, phi: GradedMap) -> bool:
    """Is ``T`` the twist of ``S`` by the automorphism ``phi``?"""
    return structures_equal(twist_structure(S, phi), T)
