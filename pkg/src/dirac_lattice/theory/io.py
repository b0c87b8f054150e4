"""Reading and writing theory documents.

Grammar (one statement per line, ``#`` starts a comment, blank lines are
ignored)::

    document    := "theory" NAME section*
    section     := "[fields]" field_line*
                 | "[kinetic]" kinetic_line*
                 | "[hamiltonian]" hamiltonian_line*
                 | "[multipliers]" LABEL*
    field_line  := NAME (INDEX "=" INT ".." INT)+ ["antisym=" INDEX "," INDEX]
    kinetic_line     := COEF LABEL LABEL
    hamiltonian_line := COEF LABEL STENCIL LABEL
    COEF        := INT | INT "/" INT
    LABEL       := ["p:" | "dot:"] NAME "[" INT ("," INT)* "]"
    STENCIL     := "id" | TOKEN ("*" TOKEN)*     TOKEN := D1|D2|D3|Db1|Db2|Db3

``dumps`` writes the canonical form, and ``dumps(loads(text)) == text`` for
any document already in canonical form.
"""
from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .spec import (FieldDescriptor, HamiltonianTerm, IndexRange, KineticTerm, TheorySpec,
                   ValidationError)


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


_SECTIONS = ("fields", "kinetic", "hamiltonian", "multipliers")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_RANGE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=(-?\d+)\.\.(-?\d+)$")
_COEF = re.compile(r"^-?\d+(/\d+)?$")


def _coef(tok: str, lineno: int) -> Fraction:
    if not _COEF.match(tok):
        raise ParseError(f"bad coefficient {tok!r}", lineno, "coefficient")
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {tok!r}", lineno, "coefficient") from None


def _field_line(toks: list[str], lineno: int) -> FieldDescriptor:
    name = toks[0]
    if not _NAME.match(name):
        raise ParseError(f"bad field name {name!r}", lineno, "name")
    ranges, antisym = [], None
    for tok in toks[1:]:
        if tok.startswith("antisym="):
            names = tok[len("antisym="):].split(",")
            if len(names) != 2:
                raise ParseError(f"antisym needs two index names, got {tok!r}", lineno, "antisym")
            pos = {r.name: k for k, r in enumerate(ranges)}
            missing = [n for n in names if n not in pos]
            if missing:
                raise ValidationError(f"line {lineno}: antisym names unknown index {missing[0]!r}")
            antisym = tuple(sorted((pos[names[0]], pos[names[1]])))
            if antisym[0] == antisym[1]:
                raise ValidationError(f"line {lineno}: antisym pair repeats an index")
            continue
        m = _RANGE.match(tok)
        if not m:
            raise ParseError(f"bad index range {tok!r}", lineno, "index")
        lo, hi = int(m.group(2)), int(m.group(3))
        if lo > hi:
            raise ParseError(f"empty index range {tok!r}", lineno, "index")
        ranges.append(IndexRange(m.group(1), lo, hi))
    if not ranges:
        raise ParseError(f"field {name!r} declares no indices", lineno, "index")
    try:
        return FieldDescriptor(name, tuple(ranges), antisym)
    except ValidationError as exc:
        raise ValidationError(f"line {lineno}: {exc}") from None


def loads(text: str) -> TheorySpec:
    name = None
    section = None
    fields, kinetic, ham, mult = [], [], [], []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if name is None:
            if toks[0] != "theory" or len(toks) != 2 or not _NAME.match(toks[1]):
                raise ParseError("document must start with 'theory <name>'", lineno, "header")
            name = toks[1]
            continue
        if line.startswith("["):
            sec = line.strip("[]").strip()
            if not (line.endswith("]") and sec in _SECTIONS):
                raise ParseError(f"unknown section {line!r}", lineno, "section")
            if sec in seen:
                raise ParseError(f"section [{sec}] repeated", lineno, "section")
            seen.add(sec)
            section = sec
            continue
        if section is None:
            raise ParseError("statement outside any section", lineno, "section")
        if section == "fields":
            fields.append(_field_line(toks, lineno))
        elif section == "kinetic":
            if len(toks) != 3:
                raise ParseError("kinetic rows need: coefficient label label", lineno, "kinetic")
            kinetic.append((lineno, KineticTerm(_coef(toks[0], lineno), toks[1], toks[2])))
        elif section == "hamiltonian":
            if len(toks) != 4:
                raise ParseError("hamiltonian rows need: coefficient label stencil label", lineno,
                                 "hamiltonian")
            ham.append((lineno, HamiltonianTerm(_coef(toks[0], lineno), toks[1], toks[2], toks[3])))
        else:
            mult.extend((lineno, t) for t in toks)
    if name is None:
        raise ParseError("empty document", None, "header")
    if not fields:
        raise ParseError("no fields declared", None, "fields")
    # validate row by row first so errors carry a line number
    probe = TheorySpec(name, tuple(fields), (), (), ())
    for lineno, k in kinetic:
        _check(lineno, lambda: (probe.resolve(k.coordinate, ("q", "dot")), probe.resolve(k.velocity, ("q",))))
    for lineno, h in ham:
        from .spec import parse_stencil
        _check(lineno, lambda: (probe.resolve(h.left, ("q", "p")), probe.resolve(h.right, ("q", "p")),
                                parse_stencil(h.stencil)))
    for lineno, m in mult:
        _check(lineno, lambda: probe.resolve(m, ("q",)))
    return TheorySpec(name, tuple(fields), tuple(k for _, k in kinetic), tuple(h for _, h in ham),
                      tuple(m for _, m in mult))


def _check(lineno, fn):
    try:
        fn()
    except ValidationError as exc:
        raise ValidationError(f"line {lineno}: {exc}") from None


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def dumps(spec: TheorySpec) -> str:
    out = [f"theory {spec.name}", "", "[fields]"]
    for f in spec.fields:
        parts = [f.name] + [f"{r.name}={r.lo}..{r.hi}" for r in f.indices]
        if f.antisym is not None:
            parts.append(f"antisym={f.indices[f.antisym[0]].name},{f.indices[f.antisym[1]].name}")
        out.append(" ".join(parts))
    out += ["", "[kinetic]"]
    out += [f"{_fmt(k.coefficient)} {k.coordinate} {k.velocity}" for k in spec.kinetic]
    out += ["", "[hamiltonian]"]
    out += [f"{_fmt(h.coefficient)} {h.left} {h.stencil} {h.right}" for h in spec.hamiltonian]
    out += ["", "[multipliers]"]
    out += list(spec.multipliers)
    return "\n".join(out) + "\n"


def load_theory(source) -> TheorySpec:
    """Parse a theory from a path or from document text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and source.endswith(".theory")):
        return loads(Path(source).read_text(encoding="utf-8"))
    return loads(source)


def dump_theory(spec: TheorySpec, path) -> None:
    Path(path).write_text(dumps(spec), encoding="utf-8")


BUILTIN = {"paper_g0": "paper_g0.theory", "maxwell1": "maxwell1.theory"}


def builtin_theory(name: str) -> TheorySpec:
    """Load one of the shipped theory documents by name."""
    if name not in BUILTIN:
        raise KeyError(f"unknown theory {name!r}; choose from {sorted(BUILTIN)}")
    text = resources.files("dirac_lattice.theory").joinpath("data", BUILTIN[name]).read_text("utf-8")
    return loads(text)
