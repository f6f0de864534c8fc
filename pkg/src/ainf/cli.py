"""Command-line front end.

Exit codes: 0 success, 1 a mathematical failure (nonzero residual or a
nonvanishing obstruction), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from .bar import CheckReport, codiff_check, dgmorph_check, structure_difference
from .corpus import CORPUS
from .errors import AInfError, ObstructionUnsolvable
from .fileformat import Problem, emit, load
from .lifting import isotopy_trace, lift_trace
from .obstruction import obstruction_classes
from .transfer import extend_f, extend_g, transfer_structure

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class Report:
    command: str
    ok: bool = True
    sections: list = field(default_factory=list)   # (title, [lines])
    output: Problem | None = None
    seconds: float = 0.0

    def add(self, title: str, lines):
        self.sections.append((title, list(lines)))

    def add_check(self, title: str, report: CheckReport, max_shown: int = 5):
        self.ok = self.ok and report.ok
        lines = [report.summary()]
        by_arity: dict = {}
        for r in report.residuals:
            by_arity.setdefault(r.arity, []).append(r)
        for n in sorted(by_arity):
            rs = by_arity[n]
            lines.append(f"arity {n}: {len(rs)} nonzero residual(s)")
            lines.extend(f"  {r}" for r in rs[:max_shown])
        self.add(title, lines)

    def text(self) -> str:
        out = [f"command: {self.command}"]
        for title, lines in self.sections:
            out.append(f"[{title}]")
            out.extend(f"  {line}" for line in lines)
        out.append(f"verdict: {'pass' if self.ok else 'fail'}")
        out.append(f"time: {self.seconds:.3f}s")
        return "\n".join(out) + "\n"

    def structured(self) -> str:
        doc = {
            "command": self.command,
            "verdict": "pass" if self.ok else "fail",
            "sections": [{"title": t, "lines": ls} for t, ls in self.sections],
            "output": emit(self.output) if self.output is not None else None,
            "seconds": round(self.seconds, 6),
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# -- object selection ----------------------------------------------------------


def _pick(table: dict, name: str | None, what: str, pred=lambda v: True):
    if name is not None:
        if name not in table:
            raise InputError(f"no {what} named {name!r}")
        return name, table[name]
    for key, val in table.items():
        if pred(val):
            return key, val
    raise InputError(f"the file declares no suitable {what}")


def _structure_on(p: Problem, c, name: str | None = None):
    key, val = _pick(p.structures, name, f"structure on {c.space.name}",
                     lambda v: v[0].complex.space == c.space and v[0].complex.d == c.d)
    if val[0].complex.space != c.space:
        raise InputError(f"structure {key!r} does not live on {c.space.name}")
    return key, val[0]


# -- commands ------------------------------------------------------------------


def cmd_check(p: Problem, args) -> Report:
    rep = Report("check")
    if not (p.structures or p.morphisms):
        rep.add("objects", ["no structures or morphisms declared"])
    for name, (S, *_) in p.structures.items():
        rep.add_check(f"structure {name}", codiff_check(S))
    for name, (F, *_) in p.morphisms.items():
        rep.add_check(f"morphism {name}", dgmorph_check(F))
    rep.add("homotopies", [f"{name}: identities hold" for name in p.homotopies] or ["none"])
    return rep


def _homotopy_with_structure(p: Problem, args):
    hname, (hd, *_) = _pick(p.homotopies, args.homotopy, "homotopy",
                            lambda v: any(S.complex.space == v[0].source.space
                                          for S, *_ in p.structures.values()))
    sname, S = _structure_on(p, hd.source, args.structure)
    return hname, hd, sname, S


def cmd_transfer(p: Problem, args) -> Report:
    hname, hd, sname, S = _homotopy_with_structure(p, args)
    rep = Report(f"transfer {sname} along {hname}")
    nu = transfer_structure(S, hd, max_arity=p.max_arity)
    f = extend_f(S, hd, nu)
    g = extend_g(S, hd, nu, check=False)
    rep.add("transferred operations",
            [f"nu{n}: {len(m.entries)} nonzero input word(s)" for n, m in sorted(nu.mu.items())]
            or ["all operations vanish"])
    rep.add_check("nu", codiff_check(nu))
    rep.add_check("f", dgmorph_check(f))
    rep.add_check("g", dgmorph_check(g))
    out = p
    nname = out.add_structure("nu", nu)
    out.add_morphism("f", f)
    out.add_morphism("g", g)
    diff = None
    for tname, (T, *_) in p.structures.items():
        if tname != nname and T.complex.space == nu.space:
            diff = structure_difference(nu, T)
            rep.add(f"compare with {tname}", ["equal" if diff is None else f"differ: {diff}"])
    rep.output = out
    return rep


def _obstruction_lines(report, T) -> list:
    lines = []
    for c in report.classes:
        line = f"arity {c.arity}: {c.status}"
        if not c.vanishes:
            ent = next(iter(c.representative.label_entries()), None)
            if ent is not None:
                word, vec = ent
                terms = " + ".join(f"{x}*{lab[0]}" for lab, x in vec)
                line += f" (representative on {'⊗'.join(word)}: {terms})"
        lines.append(line)
    return lines


def cmd_obstructions(p: Problem, args) -> Report:
    if p.morphisms and args.homotopy is None:
        mname, (F, *_) = _pick(p.morphisms, args.morphism, "morphism")
        S, T, f1, what = F.source, F.target, F.linear, f"linear part of {mname}"
    else:
        hname, (hd, *_) = _pick(p.homotopies, args.homotopy, "homotopy")
        _, S = _structure_on(p, hd.source, args.structure)
        _, T = _structure_on(p, hd.target, args.target)
        f1, what = hd.f1, f"f1 of {hname}"
    rep = Report(f"obstructions for {what}")
    report = obstruction_classes(S, T, f1, p.max_arity)
    rep.add("classes", _obstruction_lines(report, T))
    rep.ok = report.ok
    if report.ok and report.morphism is not None:
        p.add_morphism("extension", report.morphism)
        rep.output = p
    return rep


def cmd_lift(p: Problem, args) -> Report:
    lname, L = _pick(p.lifts, args.lift, "lift")
    Theta = p.morphism(L.theta)
    rep = Report(f"lift {lname}")
    tr = lift_trace(Theta, p.maps[L.psi], p.maps[L.h])
    rep.add("stages", [f"arity {k}: E0 shadow {'agrees' if ok else 'DIFFERS'}"
                       for k, ok in enumerate(tr.shadow_ok, 1)])
    rep.ok = all(tr.shadow_ok)
    rep.add_check("lifted morphism", dgmorph_check(tr.result))
    if tr.result.linear != p.maps[L.psi]:
        rep.ok = False
        rep.add("linear part", ["differs from psi"])
    p.add_morphism(f"{lname}_result", tr.result)
    rep.output = p
    return rep


def cmd_isotopy(p: Problem, args) -> Report:
    hname, (hd, *_) = _pick(p.homotopies, args.homotopy, "homotopy with l",
                            lambda v: v[0].l is not None)
    if hd.l is None:
        raise InputError(f"homotopy {hname!r} has no l=; an isotopy needs both homotopies")
    sname, S = _structure_on(p, hd.source, args.structure)
    tname, T = _structure_on(p, hd.target, args.target)
    rep = Report(f"isotopy from the transfer of {sname} along {hname} to {tname}")
    F = None
    for mname, (G, *_) in p.morphisms.items():
        if G.source == S and G.target == T and G.linear == hd.f1:
            F = G
            rep.add("extension", [f"using declared morphism {mname}"])
            break
    if F is None:
        report = obstruction_classes(S, T, hd.f1, p.max_arity)
        rep.add("extension of f1", _obstruction_lines(report, T))
        if not report.ok:
            rep.ok = False
            return rep
        F = report.morphism
    res = isotopy_trace(S, hd, T, F)
    rep.add_check("isotopy", dgmorph_check(res.isotopy))
    rep.add("components", [f"phi{n}: {len(m.entries)} nonzero input word(s)"
                           for n, m in sorted(res.isotopy.components.items())])
    if not res.isotopy.is_isotopy():
        rep.ok = False
        rep.add("linear part", ["not the identity"])
    p.add_structure("nu", res.transferred)
    p.add_morphism("phi", res.isotopy)
    rep.output = p
    return rep


def cmd_corpus(args) -> Problem:
    N = args.max_arity or 4
    if args.name == "free-pair":
        if args.word_length < 1:
            raise InputError("--word-length must be at least 1")
        return CORPUS[args.name](args.word_length, N, args.unital)
    problem = CORPUS[args.name]()
    problem.max_arity = N
    return problem


COMMANDS = {
    "check": cmd_check,
    "transfer": cmd_transfer,
    "obstructions": cmd_obstructions,
    "lift": cmd_lift,
    "isotopy": cmd_isotopy,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-arity", type=int, default=None,
                        help="truncation arity N (default: the file's value, else 4)")
    common.add_argument("--out", help="write produced objects to this problem file")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    ap = argparse.ArgumentParser(prog="ainf", description="Exact computations with truncated "
                                 "A-infinity algebras over the rationals.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file")
        if name in ("transfer", "obstructions", "isotopy"):
            sp.add_argument("--homotopy")
            sp.add_argument("--structure")
        if name in ("obstructions", "isotopy"):
            sp.add_argument("--target")
        if name == "obstructions":
            sp.add_argument("--morphism")
        if name == "lift":
            sp.add_argument("--lift")
    sp = sub.add_parser("corpus", parents=[common])
    sp.add_argument("name", choices=sorted(CORPUS))
    sp.add_argument("--word-length", type=int, default=3)
    sp.add_argument("--unital", action="store_true", help="include the empty word as a unit")
    return ap


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.max_arity is not None and args.max_arity < 1:
        print("error: --max-arity must be positive", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        if args.command == "corpus":
            text = emit(cmd_corpus(args))
            if args.format == "structured":
                text = json.dumps({"command": f"corpus {args.name}", "output": text},
                                  indent=2, ensure_ascii=False) + "\n"
            _write(text, args.out)
            return EXIT_OK
        problem = load(args.file, args.max_arity)
        rep = COMMANDS[args.command](problem, args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ObstructionUnsolvable as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except AInfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # keep malformed input from surfacing as a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep.seconds = time.perf_counter() - start
    if args.out and rep.output is not None:
        _write(emit(rep.output), args.out)
    body = rep.structured() if args.format == "structured" else rep.text()
    if args.format == "text" and rep.output is not None and not args.out:
        body += "--- output ---\n" + emit(rep.output)
    sys.stdout.write(body)
    return EXIT_OK if rep.ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
