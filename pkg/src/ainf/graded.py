"""Graded vector spaces, sparse multilinear maps and the Koszul sign calculus.

Vectors in a tensor power ``V^{⊗k}`` are plain dicts mapping a word (a tuple
of basis indices of ``V``) to a nonzero exact scalar.  Scalars are Python
``int`` or ``fractions.Fraction``; integers are kept as integers for speed and
promoted by ordinary arithmetic when a division happens.

Sign convention: ``(f ⊗ g)(x ⊗ y) = (-1)^{|g||x|} f(x) ⊗ g(y)``, composition of
maps introduces no sign, and ``↑``, ``↓`` are the degree ``+1``/``-1``
identities on labels.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator

from .errors import DegreeError, HomotopyIdentityFails, NotAChainComplex, SpaceMismatch

Scalar = "int | Fraction"
Word = tuple
Vector = dict


# -- scalars ---------------------------------------------------------------


def as_scalar(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def parse_scalar(text: str):
    """Parse ``"p/q"`` or ``"p"``; decimals and floats are refused."""
    text = text.strip()
    if not text or any(ch in text for ch in ".eE"):
        raise ValueError(f"not a rational literal: {text!r}")
    q = Fraction(text)
    return q.numerator if q.denominator == 1 else q


def format_scalar(x) -> str:
    q = Fraction(x)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# -- vectors ----------------------------------------------------------------


def add_into(acc: dict, vec: dict, coef=1) -> dict:
    """acc += coef * vec, dropping zeros."""
    if coef == 0:
        return acc
    for k, c in vec.items():
        v = acc.get(k, 0) + coef * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def scale_vector(vec: dict, coef) -> dict:
    if coef == 0:
        return {}
    return {k: coef * c for k, c in vec.items()}


def tensor_vectors(u: dict, v: dict) -> dict:
    out = {}
    for a, x in u.items():
        for b, y in v.items():
            out[a + b] = x * y
    return out


def vectors_equal(u: dict, v: dict) -> bool:
    return {k: c for k, c in u.items() if c} == {k: c for k, c in v.items() if c}


# -- spaces -----------------------------------------------------------------


class GradedSpace:
    """A finite ordered basis of labels, each carrying an integer degree."""

    __slots__ = ("name", "basis", "labels", "degrees", "_index", "by_degree", "_lo", "_hi")

    def __init__(self, name: str, basis: Iterable[tuple[str, int]]):
        basis = tuple((str(lab), int(deg)) for lab, deg in basis)
        labels = tuple(lab for lab, _ in basis)
        if len(set(labels)) != len(labels):
            dup = sorted({lab for lab in labels if labels.count(lab) > 1})
            raise ValueError(f"space {name!r}: duplicate labels {dup}")
        self.name = str(name)
        self.basis = basis
        self.labels = labels
        self.degrees = tuple(deg for _, deg in basis)
        self._index = {lab: i for i, lab in enumerate(labels)}
        by_degree: dict[int, list[int]] = {}
        for i, deg in enumerate(self.degrees):
            by_degree.setdefault(deg, []).append(i)
        self.by_degree = {deg: tuple(ix) for deg, ix in by_degree.items()}
        self._lo = min(self.degrees) if basis else 0
        self._hi = max(self.degrees) if basis else 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"label {label!r} not in space {self.name!r}") from None

    def degree_set(self) -> frozenset:
        return frozenset(self.by_degree)

    def word_degree(self, word) -> int:
        degs = self.degrees
        return sum(degs[i] for i in word)

    def word_labels(self, word) -> tuple:
        return tuple(self.labels[i] for i in word)

    def words(self, n: int, degrees=None) -> Iterator[tuple]:
        """Words of length ``n`` in basis order, optionally only those whose
        total degree lies in ``degrees``."""
        dim = self.dim
        if n == 0:
            if degrees is None or 0 in degrees:
                yield ()
            return
        if dim == 0:
            return
        if degrees is None:
            yield from product(range(dim), repeat=n)
            return
        allowed = frozenset(degrees)
        if not allowed:
            return
        amin, amax = min(allowed), max(allowed)
        lo, hi = self._lo, self._hi
        degs = self.degrees
        order = range(dim)

        def rec(prefix, total, r):
            if r == 0:
                if total in allowed:
                    yield prefix
                return
            for i in order:
                t = total + degs[i]
                if t + (r - 1) * lo > amax or t + (r - 1) * hi < amin:
                    continue
                yield from rec(prefix + (i,), t, r - 1)

        yield from rec((), 0, n)

    def suspend(self, shift: int = 1, name: str | None = None) -> "GradedSpace":
        if name is None:
            name = f"s{self.name}" if shift == 1 else f"s{shift}{self.name}"
        return GradedSpace(name, ((lab, deg + shift) for lab, deg in self.basis))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GradedSpace):
            return NotImplemented
        return self.name == other.name and self.basis == other.basis

    def __hash__(self):
        return hash((self.name, self.basis))

    def __repr__(self):
        return f"GradedSpace({self.name!r}, dim={self.dim})"


def tensor_space(a: GradedSpace, b: GradedSpace, name: str | None = None, sep: str = "*") -> GradedSpace:
    """``a ⊗ b`` with basis ``a_i * b_j`` ordered lexicographically; the pair
    ``(i, j)`` has index ``i * b.dim + j``."""
    name = name or f"{a.name}{sep}{b.name}"
    return GradedSpace(
        name,
        ((f"{la}{sep}{lb}", da + db) for la, da in a.basis for lb, db in b.basis),
    )


# -- maps -------------------------------------------------------------------


class GradedMap:
    """Homogeneous sparse linear map ``source^{⊗arity} → target^{⊗out_arity}``.

    ``entries`` maps an input word to its (nonzero) image vector; words
    absent from the table map to zero.  Every entry is checked against the
    declared degree when the map is built.
    """

    __slots__ = ("source", "target", "degree", "arity", "out_arity", "entries")

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 entries: dict | None = None, arity: int = 1, out_arity: int = 1,
                 check: bool = True):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.arity = int(arity)
        self.out_arity = int(out_arity)
        clean = {}
        for w, vec in (entries or {}).items():
            v = {k: c for k, c in vec.items() if c}
            if v:
                clean[w] = v
        self.entries = clean
        if check:
            self._validate()

    def _validate(self):
        sd, td = self.source.degrees, self.target.degrees
        ns, nt = self.source.dim, self.target.dim
        for w, vec in self.entries.items():
            if len(w) != self.arity or any(not 0 <= i < ns for i in w):
                raise DegreeError(f"bad input word {w!r} for arity {self.arity}")
            want = sum(sd[i] for i in w) + self.degree
            for k, c in vec.items():
                if len(k) != self.out_arity or any(not 0 <= j < nt for j in k):
                    raise DegreeError(f"bad output word {k!r}")
                if sum(td[j] for j in k) != want:
                    raise DegreeError(
                        f"entry {self.source.word_labels(w)} -> {self.target.word_labels(k)} "
                        f"breaks degree {self.degree}"
                    )
                if isinstance(c, float):
                    raise TypeError("floating point coefficient in GradedMap")

    # construction helpers

    @classmethod
    def from_labels(cls, source, target, degree, table, arity=1, out_arity=1):
        """Build from ``{input labels: {output labels: scalar}}``.  A bare
        string stands for a one-letter word."""
        entries = {}
        for w, vec in table.items():
            w = (w,) if isinstance(w, str) else tuple(w)
            key = tuple(source.index(lab) for lab in w)
            out = entries.setdefault(key, {})
            for k, c in vec.items():
                k = (k,) if isinstance(k, str) else tuple(k)
                kk = tuple(target.index(lab) for lab in k)
                out[kk] = out.get(kk, 0) + as_scalar(c)
        return cls(source, target, degree, entries, arity, out_arity)

    @classmethod
    def tabulate(cls, source, target, degree, arity, fn: Callable[[tuple], dict],
                 out_arity=1, check=True):
        """Evaluate ``fn`` on every input word that can have a nonzero image
        (degree pruning) and collect the results."""
        if out_arity == 1:
            allowed = {t - degree for t in target.degree_set()}
            words = source.words(arity, allowed)
        else:
            words = source.words(arity)
        entries = {}
        for w in words:
            v = fn(w)
            if v:
                entries[w] = v
        return cls(source, target, degree, entries, arity, out_arity, check=check)

    # evaluation

    def image(self, word) -> dict:
        return self.entries.get(word, {})

    def __call__(self, vec: dict) -> dict:
        out: dict = {}
        ent = self.entries
        for w, c in vec.items():
            img = ent.get(w)
            if img:
                add_into(out, img, c)
        return out

    # algebra

    def _check_parallel(self, other):
        if (self.source != other.source or self.target != other.target
                or self.degree != other.degree or self.arity != other.arity
                or self.out_arity != other.out_arity):
            raise SpaceMismatch(self.signature(), other.signature(), "parallel maps")

    def signature(self):
        return (f"{self.source.name}^{self.arity}->{self.target.name}^{self.out_arity}"
                f"[{self.degree}]")

    def __add__(self, other):
        self._check_parallel(other)
        out = {w: dict(v) for w, v in self.entries.items()}
        for w, v in other.entries.items():
            add_into(out.setdefault(w, {}), v)
        return GradedMap(self.source, self.target, self.degree, out, self.arity,
                         self.out_arity, check=False)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, coef):
        coef = as_scalar(coef)
        return GradedMap(self.source, self.target, self.degree,
                         {w: scale_vector(v, coef) for w, v in self.entries.items()},
                         self.arity, self.out_arity, check=False)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.degree == other.degree and self.arity == other.arity
                and self.out_arity == other.out_arity and self.entries == other.entries)

    __hash__ = None

    def restrict_words(self, pred) -> "GradedMap":
        return GradedMap(self.source, self.target, self.degree,
                         {w: v for w, v in self.entries.items() if pred(w)},
                         self.arity, self.out_arity, check=False)

    def label_entries(self):
        """Entries as ``(input labels, [(output labels, scalar), ...])`` in
        basis order."""
        src, tgt = self.source, self.target
        for w in sorted(self.entries):
            vec = self.entries[w]
            yield src.word_labels(w), [(tgt.word_labels(k), vec[k]) for k in sorted(vec)]

    def __repr__(self):
        return f"GradedMap({self.signature()}, {len(self.entries)} entries)"


def identity(space: GradedSpace) -> GradedMap:
    return GradedMap(space, space, 0, {(i,): {(i,): 1} for i in range(space.dim)}, check=False)


def zero_map(source, target, degree, arity=1, out_arity=1) -> GradedMap:
    return GradedMap(source, target, degree, {}, arity, out_arity)


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """``g ∘ f``; no sign is introduced by composition."""
    if f.target != g.source or f.out_arity != g.arity:
        raise SpaceMismatch(f"{g.source.name}^{g.arity}",
                            f"{f.target.name}^{f.out_arity}", "compose")
    entries = {}
    for w, v in f.entries.items():
        img = g(v)
        if img:
            entries[w] = img
    return GradedMap(f.source, g.target, f.degree + g.degree, entries, f.arity,
                     g.out_arity, check=False)


def tensor_maps(fs) -> GradedMap:
    """``f_1 ⊗ ... ⊗ f_k`` with the Koszul rule
    ``(f ⊗ g)(x ⊗ y) = (-1)^{|g||x|} f(x) ⊗ g(y)``."""
    fs = list(fs)
    if not fs:
        raise ValueError("tensor_maps needs at least one map")
    src, tgt = fs[0].source, fs[0].target
    for f in fs[1:]:
        if f.source != src:
            raise SpaceMismatch(src, f.source, "tensor_maps source")
        if f.target != tgt:
            raise SpaceMismatch(tgt, f.target, "tensor_maps target")
    sdeg = src.degrees
    entries = {(): {(): 1}}
    prefix_deg = {(): 0}
    for f in fs:
        new_entries, new_deg = {}, {}
        fd = f.degree
        for w, v in entries.items():
            pd = prefix_deg[w]
            sign = -1 if (fd * pd) & 1 else 1
            for u, img in f.entries.items():
                key = w + u
                out = {}
                for a, x in v.items():
                    for b, y in img.items():
                        out[a + b] = sign * x * y
                new_entries[key] = out
                new_deg[key] = pd + sum(sdeg[i] for i in u)
        entries, prefix_deg = new_entries, new_deg
    return GradedMap(src, tgt, sum(f.degree for f in fs), entries,
                     sum(f.arity for f in fs), sum(f.out_arity for f in fs), check=False)


# -- suspension -------------------------------------------------------------


def desuspension_sign(word, degrees) -> int:
    """Sign of ``(↓)^{⊗n}(↑a_1 ⊗ ... ⊗ ↑a_n)``; ``degrees`` are the
    *unshifted* degrees of the ``a_i``."""
    n = len(word)
    e = 0
    for j, i in enumerate(word):
        e += (n - 1 - j) * (degrees[i] + 1)
    return -1 if e & 1 else 1


def conjugate(m: GradedMap, source_bar: GradedSpace | None = None,
              target_bar: GradedSpace | None = None) -> GradedMap:
    """``↑ ∘ m ∘ (↓)^{⊗n}``: degree changes from ``k`` to ``k + 1 - n``."""
    if m.out_arity != 1:
        raise ValueError("conjugate expects a map with a single output")
    source_bar = source_bar or m.source.suspend()
    target_bar = target_bar or m.target.suspend()
    degs = m.source.degrees
    entries = {}
    for w, v in m.entries.items():
        s = desuspension_sign(w, degs)
        entries[w] = v if s == 1 else scale_vector(v, -1)
    return GradedMap(source_bar, target_bar, m.degree + 1 - m.arity, entries,
                     m.arity, 1, check=False)


def deconjugate(M: GradedMap, source: GradedSpace, target: GradedSpace) -> GradedMap:
    """Inverse of :func:`conjugate`: ``↓ ∘ M ∘ (↑)^{⊗n}``."""
    degs = source.degrees
    entries = {}
    for w, v in M.entries.items():
        s = desuspension_sign(w, degs)
        entries[w] = v if s == 1 else scale_vector(v, -1)
    return GradedMap(source, target, M.degree - 1 + M.arity, entries, M.arity, 1,
                     check=False)


# -- complexes --------------------------------------------------------------


class ChainComplex:
    """A graded space with a degree ``-1`` differential; ``d∘d = 0`` is
    enforced at construction."""

    __slots__ = ("space", "d")

    def __init__(self, space: GradedSpace, d: GradedMap | None = None):
        if d is None:
            d = zero_map(space, space, -1)
        if d.source != space or d.target != space:
            raise SpaceMismatch(space, d.source, "differential")
        if d.degree != -1 or d.arity != 1 or d.out_arity != 1:
            raise DegreeError("a differential is a unary map of degree -1")
        dd = compose(d, d)
        if not dd.is_zero():
            w = next(iter(dd.entries))
            raise NotAChainComplex(
                f"d∘d ≠ 0 on {space.name}: d(d({space.labels[w[0]]})) ≠ 0")
        self.space = space
        self.d = d

    @property
    def name(self):
        return self.space.name

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.space == other.space and self.d == other.d

    __hash__ = None

    def __repr__(self):
        return f"ChainComplex({self.space.name!r}, dim={self.space.dim})"


def suspend(c: ChainComplex) -> ChainComplex:
    """``↑C`` with differential ``↑ d ↓`` (same matrix, degrees shifted)."""
    s = c.space.suspend()
    return ChainComplex(s, GradedMap(s, s, -1, c.d.entries, check=False))


def tensor_differential(dA: GradedMap, n: int) -> GradedMap:
    """The Leibniz extension ``Σ id^{⊗i} ⊗ d ⊗ id^{⊗j}`` on ``A^{⊗n}``."""
    idA = identity(dA.source)
    total = None
    for i in range(n):
        term = tensor_maps([idA] * i + [dA] + [idA] * (n - 1 - i))
        total = term if total is None else total + term
    return total


def hom_differential(phi: GradedMap, dA: GradedMap, dB: GradedMap) -> GradedMap:
    """``∂φ = d' ∘ φ - (-1)^{|φ|} φ ∘ d_{A^{⊗n}}``."""
    dn = tensor_differential(dA, phi.arity)
    left = compose(dB, phi)
    right = compose(phi, dn)
    return left - right if phi.degree % 2 == 0 else left + right


def is_chain_map(f: GradedMap, dA: GradedMap, dB: GradedMap) -> bool:
    return hom_differential(f, dA, dB).is_zero()


class HomotopyData:
    """``(f1, g1, h, l)`` with ``g1 f1 - id = d h + h d`` on the source and,
    when ``l`` is given, ``f1 g1 - id = d' l + l d'`` on the target."""

    __slots__ = ("source", "target", "f1", "g1", "h", "l")

    def __init__(self, source: ChainComplex, target: ChainComplex, f1: GradedMap,
                 g1: GradedMap, h: GradedMap | None = None, l: GradedMap | None = None):
        A, B = source.space, target.space
        if h is None:
            h = zero_map(A, A, 1)
        for name, m, s, t, deg in (("f1", f1, A, B, 0), ("g1", g1, B, A, 0),
                                   ("h", h, A, A, 1)):
            if m.source != s or m.target != t:
                raise SpaceMismatch(f"{s.name}->{t.name}", f"{m.source.name}->{m.target.name}", name)
            if m.degree != deg or m.arity != 1:
                raise DegreeError(f"{name} must be unary of degree {deg}")
        if l is not None and (l.source != B or l.target != B or l.degree != 1):
            raise DegreeError("l must be a degree +1 endomorphism of the target")
        if not is_chain_map(f1, source.d, target.d):
            raise HomotopyIdentityFails("f1 is not a chain map")
        if not is_chain_map(g1, target.d, source.d):
            raise HomotopyIdentityFails("g1 is not a chain map")
        lhs = compose(g1, f1) - identity(A)
        rhs = compose(source.d, h) + compose(h, source.d)
        if lhs != rhs:
            raise HomotopyIdentityFails("g1 f1 - id != d h + h d")
        if l is not None:
            lhs = compose(f1, g1) - identity(B)
            rhs = compose(target.d, l) + compose(l, target.d)
            if lhs != rhs:
                raise HomotopyIdentityFails("f1 g1 - id != d' l + l d'")
        self.source, self.target = source, target
        self.f1, self.g1, self.h, self.l = f1, g1, h, l

    @property
    def two_sided(self) -> bool:
        return self.l is not None

    def __repr__(self):
        return f"HomotopyData({self.source.name} <-> {self.target.name})"
