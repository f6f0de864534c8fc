"""Line-oriented problem files.

The grammar is documented in ``docs/file-format.md``.  Parsing validates
every declaration as it is read (degrees, ``d² = 0``, homotopy identities);
the Stasheff identities and morphism equations are left to the ``check``
command because they cost a pass over the bar construction.

:func:`emit` writes the canonical form: declarations in order, map entries
in basis order, rationals as ``p/q``.  ``emit(parse(emit(p))) == emit(p)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .bar import AInfStructure, WeakMorphism
from .errors import AInfError, ParseError
from .graded import ChainComplex, GradedMap, GradedSpace, HomotopyData, format_scalar, parse_scalar

NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.+*\-]*$")
LABEL = re.compile(r"^[^\s,=>]+$")
COMMENT = re.compile(r"(^|\s)#.*$")
DEFAULT_MAX_ARITY = 4


@dataclass
class Lift:
    theta: str
    psi: str
    h: str


@dataclass
class Problem:
    max_arity: int = DEFAULT_MAX_ARITY
    spaces: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    complexes: dict = field(default_factory=dict)       # name -> (ChainComplex, d map name or None)
    structures: dict = field(default_factory=dict)      # name -> (AInfStructure, {n: map name}, complex)
    homotopies: dict = field(default_factory=dict)      # name -> (HomotopyData, {role: map name}, (src, tgt))
    morphisms: dict = field(default_factory=dict)       # name -> (WeakMorphism, {n: map name}, (src, tgt))
    lifts: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    # -- lookups -----------------------------------------------------------------

    def structure(self, name):
        return self.structures[name][0]

    def morphism(self, name):
        return self.morphisms[name][0]

    def homotopy(self, name):
        return self.homotopies[name][0]

    def fresh(self, base: str) -> str:
        taken = set(self.spaces) | set(self.maps) | set(self.complexes) | set(self.structures) \
            | set(self.homotopies) | set(self.morphisms) | set(self.lifts)
        name, k = base, 2
        while name in taken:
            name = f"{base}{k}"
            k += 1
        return name

    def complex_name(self, c: ChainComplex):
        for name, (cc, _) in self.complexes.items():
            if cc.space == c.space and cc.d == c.d:
                return name
        return None

    def structure_name(self, S: AInfStructure):
        for name, (T, *_) in self.structures.items():
            if T == S:
                return name
        return None

    # -- adding objects ----------------------------------------------------------

    def add_space(self, V: GradedSpace) -> str:
        if V.name in self.spaces:
            if self.spaces[V.name] != V:
                raise ValueError(f"space name {V.name!r} already used for another space")
            return V.name
        self.spaces[V.name] = V
        self.order.append(("space", V.name))
        return V.name

    def add_map(self, name: str, m: GradedMap) -> str:
        self.add_space(m.source)
        self.add_space(m.target)
        name = self.fresh(name)
        self.maps[name] = m
        self.order.append(("map", name))
        return name

    def add_complex(self, c: ChainComplex, name: str | None = None) -> str:
        found = self.complex_name(c)
        if found is not None:
            return found
        self.add_space(c.space)
        dname = None if c.d.is_zero() else self.add_map(f"d_{c.space.name}", c.d)
        name = self.fresh(name or f"C{c.space.name}")
        self.complexes[name] = (c, dname)
        self.order.append(("complex", name))
        return name

    def add_structure(self, name: str, S: AInfStructure) -> str:
        cname = self.add_complex(S.complex)
        name = self.fresh(name)
        refs = {n: self.add_map(f"{name}_mu{n}", m) for n, m in sorted(S.mu.items())}
        self.structures[name] = (S, refs, cname)
        self.order.append(("structure", name))
        return name

    def add_morphism(self, name: str, F: WeakMorphism) -> str:
        ends = tuple(self.structure_name(S) or self.add_structure("S", S)
                     for S in (F.source, F.target))
        name = self.fresh(name)
        refs = {}
        for n in sorted(F.components):
            fn = F.f(n)
            if n == 1 or not fn.is_zero():
                refs[n] = self.add_map(f"{name}_f{n}", fn)
        self.morphisms[name] = (F, refs, ends)
        self.order.append(("morphism", name))
        return name

    def add_homotopy(self, name: str, hd: HomotopyData) -> str:
        ends = (self.add_complex(hd.source), self.add_complex(hd.target))
        name = self.fresh(name)
        refs = {"f1": self.add_map(f"{name}_f1", hd.f1), "g1": self.add_map(f"{name}_g1", hd.g1)}
        if not hd.h.is_zero():
            refs["h"] = self.add_map(f"{name}_h", hd.h)
        if hd.l is not None:
            refs["l"] = self.add_map(f"{name}_l", hd.l)
        self.homotopies[name] = (hd, refs, ends)
        self.order.append(("homotopy", name))
        return name

    def add_lift(self, name: str, theta: str, psi: GradedMap, h: GradedMap) -> str:
        """Declare a lift of the morphism named ``theta`` to ``psi`` along ``h``."""
        if theta not in self.morphisms:
            raise KeyError(f"no morphism named {theta!r}")
        name = self.fresh(name)
        self.lifts[name] = Lift(theta, self.add_map(f"{name}_psi", psi),
                                self.add_map(f"{name}_h", h))
        self.order.append(("lift", name))
        return name


# -- parsing -------------------------------------------------------------------


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = COMMENT.sub("", raw).strip()
        if line:
            yield no, line.split()


def _name(tok: str, no: int) -> str:
    if not NAME.match(tok):
        raise ParseError(f"bad name {tok!r}", no)
    return tok


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", no) from None


def _keywords(tokens, no: int, allowed) -> dict:
    out = {}
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if not eq or not val:
            raise ParseError(f"expected key=value, got {tok!r}", no)
        if not allowed(key):
            raise ParseError(f"unexpected key {key!r}", no)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", no)
        out[key] = val
    return out


class _Parser:
    def __init__(self, text: str, max_arity: int | None):
        self.lines = list(_lines(text))
        self.pos = 0
        self.p = Problem(max_arity if max_arity is not None else DEFAULT_MAX_ARITY)
        self.override = max_arity
        self.started = False

    def lookup(self, table: dict, name: str, what: str, no: int):
        if name not in table:
            raise ParseError(f"undeclared {what} {name!r}", no)
        return table[name]

    def declare(self, kind: str, name: str, no: int):
        if name in set(self.p.spaces) | set(self.p.maps) | set(self.p.complexes) \
                | set(self.p.structures) | set(self.p.homotopies) | set(self.p.morphisms) \
                | set(self.p.lifts):
            raise ParseError(f"name {name!r} declared twice", no)
        self.p.order.append((kind, name))

    def block(self):
        body = []
        while self.pos < len(self.lines):
            no, toks = self.lines[self.pos]
            self.pos += 1
            if toks == ["end"]:
                return body
            body.append((no, toks))
        raise ParseError("block not closed by 'end'", self.lines[-1][0] if self.lines else None)

    def run(self) -> Problem:
        while self.pos < len(self.lines):
            no, toks = self.lines[self.pos]
            self.pos += 1
            head = toks[0]
            handler = getattr(self, f"do_{head}", None)
            if handler is None:
                raise ParseError(f"unknown statement {head!r}", no)
            try:
                handler(no, toks[1:])
            except ParseError:
                raise
            except (AInfError, ValueError, KeyError) as exc:
                raise ParseError(f"{head}: {exc}", no) from None
        if self.override is not None:
            self.p.max_arity = self.override
        return self.p

    def do_max_arity(self, no, args):
        if len(args) != 1 or self.started:
            raise ParseError("max_arity takes one integer and must come first", no)
        N = _int(args[0], no, "max_arity")
        if N < 1:
            raise ParseError("max_arity must be positive", no)
        self.p.max_arity = self.override if self.override is not None else N

    def _mark(self):
        self.started = True

    def do_space(self, no, args):
        self._mark()
        if len(args) != 1:
            raise ParseError("usage: space NAME", no)
        name = _name(args[0], no)
        basis = []
        for lno, toks in self.block():
            if len(toks) != 2 or not LABEL.match(toks[0]):
                raise ParseError("space lines are 'label degree'", lno)
            basis.append((toks[0], _int(toks[1], lno, "degree")))
        self.declare("space", name, no)
        self.p.spaces[name] = GradedSpace(name, basis)

    def _space_power(self, tok, no):
        base, _, power = tok.partition("^")
        V = self.lookup(self.p.spaces, base, "space", no)
        n = _int(power, no, "tensor power") if power else 1
        if n < 1:
            raise ParseError("tensor power must be positive", no)
        return V, n

    def do_map(self, no, args):
        self._mark()
        if len(args) != 6 or args[2] != "->" or args[4] != "degree":
            raise ParseError("usage: map NAME SRC[^n] -> TGT degree k", no)
        name = _name(args[0], no)
        V, n = self._space_power(args[1], no)
        W = self.lookup(self.p.spaces, args[3], "space", no)
        k = _int(args[5], no, "degree")
        table = {}
        for lno, toks in self.block():
            if len(toks) < 2 or toks[1] != "->" or len(toks) % 2:
                raise ParseError("entry lines are 'l1,..,ln -> coef label [coef label ..]'", lno)
            word = tuple(toks[0].split(","))
            if len(word) != n:
                raise ParseError(f"entry has {len(word)} inputs, map has arity {n}", lno)
            for lab in word:
                if lab not in V.labels:
                    raise ParseError(f"unknown label {lab!r} in space {V.name}", lno)
            if word in table:
                raise ParseError("input word listed twice", lno)
            vec = {}
            for c, lab in zip(toks[2::2], toks[3::2]):
                if lab not in W.labels:
                    raise ParseError(f"unknown label {lab!r} in space {W.name}", lno)
                try:
                    x = parse_scalar(c)
                except ValueError as exc:
                    raise ParseError(str(exc), lno) from None
                vec[(lab,)] = vec.get((lab,), 0) + x
            table[word] = {k2: x for k2, x in vec.items() if x}
        try:
            m = GradedMap.from_labels(V, W, k, table, n)
        except AInfError as exc:
            raise ParseError(f"map {name}: {exc}", no) from None
        self.declare("map", name, no)
        self.p.maps[name] = m

    def _map(self, name, no, V, W, degree, arity, what):
        m = self.lookup(self.p.maps, name, "map", no)
        if m.source != V or m.target != W or m.arity != arity:
            raise ParseError(f"{what} must be a map {V.name}^{arity} -> {W.name}", no)
        if m.degree != degree:
            raise ParseError(f"{what} must have degree {degree}, has {m.degree}", no)
        return m

    def do_complex(self, no, args):
        self._mark()
        if len(args) not in (2, 3):
            raise ParseError("usage: complex NAME SPACE [d=MAP]", no)
        name = _name(args[0], no)
        V = self.lookup(self.p.spaces, args[1], "space", no)
        kw = _keywords(args[2:], no, lambda k: k == "d")
        d = self._map(kw["d"], no, V, V, -1, 1, "d") if "d" in kw else None
        c = ChainComplex(V, d)
        self.declare("complex", name, no)
        self.p.complexes[name] = (c, kw.get("d"))

    def do_structure(self, no, args):
        self._mark()
        if len(args) < 2:
            raise ParseError("usage: structure NAME COMPLEX [mu2=MAP ..]", no)
        name = _name(args[0], no)
        c, _ = self.lookup(self.p.complexes, args[1], "complex", no)
        kw = _keywords(args[2:], no, lambda k: re.fullmatch(r"mu([2-9]|[1-9][0-9]+)", k) is not None)
        refs, mu = {}, {}
        for key, mname in kw.items():
            n = int(key[2:])
            mu[n] = self._map(mname, no, c.space, c.space, n - 2, n, key)
            refs[n] = mname
        S = AInfStructure(c, mu, self.p.max_arity)
        self.declare("structure", name, no)
        self.p.structures[name] = (S, dict(sorted(refs.items())), args[1])

    def do_homotopy(self, no, args):
        self._mark()
        if len(args) < 4 or args[2] != "->":
            raise ParseError("usage: homotopy NAME SRC -> TGT f1=MAP g1=MAP [h=MAP] [l=MAP]", no)
        name = _name(args[0], no)
        A, _ = self.lookup(self.p.complexes, args[1], "complex", no)
        B, _ = self.lookup(self.p.complexes, args[3], "complex", no)
        kw = _keywords(args[4:], no, lambda k: k in ("f1", "g1", "h", "l"))
        for key in ("f1", "g1"):
            if key not in kw:
                raise ParseError(f"homotopy needs {key}=", no)
        f1 = self._map(kw["f1"], no, A.space, B.space, 0, 1, "f1")
        g1 = self._map(kw["g1"], no, B.space, A.space, 0, 1, "g1")
        h = self._map(kw["h"], no, A.space, A.space, 1, 1, "h") if "h" in kw else None
        l = self._map(kw["l"], no, B.space, B.space, 1, 1, "l") if "l" in kw else None
        hd = HomotopyData(A, B, f1, g1, h, l)
        self.declare("homotopy", name, no)
        self.p.homotopies[name] = (hd, {k: kw[k] for k in ("f1", "g1", "h", "l") if k in kw},
                                   (args[1], args[3]))

    def do_morphism(self, no, args):
        self._mark()
        if len(args) < 4 or args[2] != "->":
            raise ParseError("usage: morphism NAME SRC -> TGT f1=MAP [f2=MAP ..]", no)
        name = _name(args[0], no)
        S = self.lookup(self.p.structures, args[1], "structure", no)[0]
        T = self.lookup(self.p.structures, args[3], "structure", no)[0]
        kw = _keywords(args[4:], no, lambda k: re.fullmatch(r"f[1-9][0-9]*", k) is not None)
        if "f1" not in kw:
            raise ParseError("morphism needs f1=", no)
        maps, refs = {}, {}
        for key, mname in kw.items():
            n = int(key[1:])
            maps[n] = self._map(mname, no, S.space, T.space, n - 1, n, key)
            refs[n] = mname
        F = WeakMorphism.from_maps(S, T, maps)
        self.declare("morphism", name, no)
        self.p.morphisms[name] = (F, dict(sorted(refs.items())), (args[1], args[3]))

    def do_lift(self, no, args):
        self._mark()
        if len(args) != 4:
            raise ParseError("usage: lift NAME MORPHISM psi=MAP h=MAP", no)
        name = _name(args[0], no)
        F = self.lookup(self.p.morphisms, args[1], "morphism", no)[0]
        kw = _keywords(args[2:], no, lambda k: k in ("psi", "h"))
        if set(kw) != {"psi", "h"}:
            raise ParseError("lift needs psi= and h=", no)
        A, B = F.source.space, F.target.space
        self._map(kw["psi"], no, A, B, 0, 1, "psi")
        self._map(kw["h"], no, A, B, 1, 1, "h")
        self.declare("lift", name, no)
        self.p.lifts[name] = Lift(args[1], kw["psi"], kw["h"])


def parse(text: str, max_arity: int | None = None) -> Problem:
    """Parse a problem file; ``max_arity`` overrides the file's value."""
    return _Parser(text, max_arity).run()


def load(path, max_arity: int | None = None) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), max_arity)


# -- emitting ------------------------------------------------------------------


def _space_ref(V: GradedSpace, n: int) -> str:
    return V.name if n == 1 else f"{V.name}^{n}"


def emit_map(name: str, m: GradedMap) -> list:
    out = [f"map {name} {_space_ref(m.source, m.arity)} -> {m.target.name} degree {m.degree}"]
    for word, vec in m.label_entries():
        if not vec:
            continue
        terms = " ".join(f"{format_scalar(x)} {lab[0]}" for lab, x in vec)
        out.append(f"  {','.join(word)} -> {terms}")
    out.append("end")
    return out


def emit(p: Problem) -> str:
    out = [f"max_arity {p.max_arity}"]
    for kind, name in p.order:
        out.append("")
        if kind == "space":
            out.append(f"space {name}")
            out.extend(f"  {lab} {deg}" for lab, deg in p.spaces[name].basis)
            out.append("end")
        elif kind == "map":
            out.extend(emit_map(name, p.maps[name]))
        elif kind == "complex":
            c, d = p.complexes[name]
            out.append(f"complex {name} {c.space.name}" + (f" d={d}" if d else ""))
        elif kind == "structure":
            S, refs, cname = p.structures[name]
            out.append(" ".join([f"structure {name} {cname}"] + [f"mu{n}={m}" for n, m in refs.items()]))
        elif kind == "homotopy":
            hd, refs, (src, tgt) = p.homotopies[name]
            out.append(" ".join([f"homotopy {name} {src} -> {tgt}"] + [f"{k}={v}" for k, v in refs.items()]))
        elif kind == "morphism":
            F, refs, (src, tgt) = p.morphisms[name]
            out.append(" ".join([f"morphism {name} {src} -> {tgt}"] + [f"f{n}={m}" for n, m in refs.items()]))
        elif kind == "lift":
            L = p.lifts[name]
            out.append(f"lift {name} {L.theta} psi={L.psi} h={L.h}")
    return "\n".join(out) + "\n"
