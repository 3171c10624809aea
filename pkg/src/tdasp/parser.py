"""Reading and writing ground programs.

Two input formats are supported: the package's native text format and the
smodels numeric format produced by standard grounders (lparse, gringo).

Native grammar, one statement per rule, terminated by ``.``::

    a | b :- c, not d.            % disjunctive (empty head = constraint)
    {a; b} :- body.               % choice
    h :- 2 <= { a=1, not b=3 }.   % weight
    :~ a. [5]                     % optimization (cost after the period)

Comments start with ``%``; atom names match ``[a-z][A-Za-z0-9_]*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    CHOICE, DISJUNCTIVE, OPTIMIZATION, WEIGHT,
    Program, ProgramBuilder, Rule, choice_rule, disjunctive_rule,
    optimization_rule, weight_rule,
)


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass
class ParseDiagnostics:
    errors: list[tuple[SourceLocation, str]] = field(default_factory=list)
    warnings: list[tuple[SourceLocation, str]] = field(default_factory=list)

    def error(self, loc: SourceLocation, message: str) -> None:
        self.errors.append((loc, message))

    def warn(self, loc: SourceLocation, message: str) -> None:
        self.warnings.append((loc, message))

    def __str__(self):
        lines = [f"{loc}: error: {msg}" for loc, msg in self.errors]
        lines += [f"{loc}: warning: {msg}" for loc, msg in self.warnings]
        return "\n".join(lines)


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<op>:-|:~|<=|\||\{|\}|;|,|\.|=|\[|\]|-)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    loc: SourceLocation


def _tokenize(text, diags):
    line, col = 1, 1
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diags.error(SourceLocation(line, col), f"malformed token {text[pos]!r}")
            return None
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, SourceLocation(line, col)))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("eof", "", SourceLocation(line, col)))
    return tokens


class _NativeParser:
    """Recursive-descent parser for the native format."""

    def __init__(self, tokens, diags):
        self.tokens = tokens
        self.pos = 0
        self.diags = diags
        self.builder = ProgramBuilder()

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text) -> _Token | None:
        tok = self.peek()
        if tok.text != text:
            self.diags.error(tok.loc, f"expected {text!r}, found {tok.text or 'end of input'!r}")
            return None
        return self.take()

    def fail(self, message) -> None:
        self.diags.error(self.peek().loc, message)

    def skip_statement(self) -> None:
        while self.peek().kind != "eof" and self.take().text != ".":
            pass

    def parse(self):
        while self.peek().kind != "eof":
            before = len(self.diags.errors)
            self.statement()
            if len(self.diags.errors) > before:
                self.skip_statement()
        if self.diags.errors:
            return self.diags
        return self.builder.build()

    # One rule statement.
    def statement(self):
        tok = self.peek()
        if tok.text == "{":
            self.choice_statement()
        elif tok.text == ":~":
            self.optimization_statement()
        else:
            self.head_statement()

    def atom(self) -> int | None:
        tok = self.peek()
        if tok.kind != "name":
            if tok.kind == "name" or tok.text == "not":
                pass
            self.fail(f"expected atom name, found {tok.text or 'end of input'!r}")
            return None
        self.take()
        return self.builder.atom(tok.text)

    def literal(self):
        """Returns (atom, negated) or None."""
        negated = False
        if self.peek().text == "not":
            # 'not' lexes as a name; treat it as the negation keyword
            self.take()
            negated = True
        tok = self.peek()
        if tok.kind != "name" or tok.text == "not":
            self.fail("expected atom after 'not'" if negated else "expected literal")
            return None
        self.take()
        return self.builder.atom(tok.text), negated

    def body(self):
        """Comma-separated literals up to '.'; returns (pos, neg) or None."""
        pos, neg = [], []
        while True:
            lit = self.literal()
            if lit is None:
                return None
            a, negated = lit
            (neg if negated else pos).append(a)
            if self.peek().text == ",":
                self.take()
                continue
            return pos, neg

    def check_distinct(self, loc, *groups) -> bool:
        seen = set()
        for group in groups:
            for a in group:
                if a in seen:
                    self.diags.error(loc, "duplicate atom within one rule")
                    return False
                seen.add(a)
        return True

    def head_statement(self):
        """Disjunctive or weight rule, or a constraint (empty head)."""
        loc = self.peek().loc
        head = []
        if self.peek().text != ":-":
            while True:
                a = self.atom()
                if a is None:
                    return
                head.append(a)
                if self.peek().text == "|":
                    self.take()
                    continue
                break
        if self.peek().text == ".":
            self.take()
            if self.check_distinct(loc, head):
                self.builder.add(disjunctive_rule(head))
            return
        if self.expect(":-") is None:
            return
        if self.peek().kind == "int":
            self.weight_tail(loc, head)
            return
        parsed = self.body()
        if parsed is None:
            return
        pos, neg = parsed
        if self.expect(".") is None:
            return
        if self.check_distinct(loc, head, pos, neg):
            self.builder.add(disjunctive_rule(head, pos, neg))

    def weight_tail(self, loc, head):
        """After 'h :-' when a bound follows: W <= { lit=w, ... }."""
        if len(head) != 1:
            self.diags.error(loc, "weight rule head must be a single atom")
            return
        bound = int(self.take().text)
        if self.expect("<=") is None or self.expect("{") is None:
            return
        pos_weights, neg_weights = [], []
        if self.peek().text != "}":
            while True:
                lit = self.literal()
                if lit is None:
                    return
                a, negated = lit
                if self.expect("=") is None:
                    return
                negative_weight = False
                if self.peek().text == "-":
                    self.take()
                    negative_weight = True
                wtok = self.peek()
                if wtok.kind != "int":
                    self.fail("expected weight")
                    return
                self.take()
                if negative_weight:
                    self.diags.error(wtok.loc, "negative weight")
                    return
                (neg_weights if negated else pos_weights).append((a, int(wtok.text)))
                if self.peek().text == ",":
                    self.take()
                    continue
                break
        if self.expect("}") is None or self.expect(".") is None:
            return
        pos = [a for a, _ in pos_weights]
        neg = [a for a, _ in neg_weights]
        if self.check_distinct(loc, head, pos, neg):
            self.builder.add(weight_rule(head[0], bound, pos_weights, neg_weights))

    def choice_statement(self):
        loc = self.take().loc  # '{'
        head = []
        while True:
            a = self.atom()
            if a is None:
                return
            head.append(a)
            if self.peek().text == ";":
                self.take()
                continue
            break
        if self.expect("}") is None:
            return
        pos, neg = [], []
        if self.peek().text == ":-":
            self.take()
            parsed = self.body()
            if parsed is None:
                return
            pos, neg = parsed
        if self.expect(".") is None:
            return
        if self.check_distinct(loc, head, pos, neg):
            self.builder.add(choice_rule(head, pos, neg))

    def optimization_statement(self):
        loc = self.take().loc  # ':~'
        lit = self.literal()
        if lit is None:
            return
        a, negated = lit
        if self.expect(".") is None or self.expect("[") is None:
            return
        negative = False
        if self.peek().text == "-":
            self.take()
            negative = True
        wtok = self.peek()
        if wtok.kind != "int":
            self.fail("expected cost")
            return
        self.take()
        if negative:
            self.diags.error(wtok.loc, "negative weight")
            return
        if self.expect("]") is None:
            return
        self.builder.add(optimization_rule(a, int(wtok.text), negated))


def parse_native(text: str):
    """Parse the native format; returns a Program, or ParseDiagnostics on error."""
    diags = ParseDiagnostics()
    tokens = _tokenize(text, diags)
    if tokens is None:
        return diags
    return _NativeParser(tokens, diags).parse()


def emit_native(program: Program) -> str:
    """Render a program so that ``parse_native`` reproduces it exactly."""
    out = []
    for r in program.rules:
        name = program.atom_name
        if r.kind == OPTIMIZATION:
            (atom, w), = r.weights
            lit = name(atom) if r.pos_body else f"not {name(atom)}"
            out.append(f":~ {lit}. [{w}]")
            continue
        body_lits = [name(a) for a in sorted(r.pos_body)]
        body_lits += [f"not {name(a)}" for a in sorted(r.neg_body)]
        body = ", ".join(body_lits)
        if r.kind == DISJUNCTIVE:
            head = " | ".join(name(a) for a in sorted(r.head))
            if head and body:
                out.append(f"{head} :- {body}.")
            elif head:
                out.append(f"{head}.")
            else:
                out.append(f":- {body}.")
        elif r.kind == CHOICE:
            head = "; ".join(name(a) for a in sorted(r.head))
            if body:
                out.append(f"{{{head}}} :- {body}.")
            else:
                out.append(f"{{{head}}}.")
        elif r.kind == WEIGHT:
            entries = [f"{name(a)}={r.weight(a)}" for a in sorted(r.pos_body)]
            entries += [f"not {name(a)}={r.weight(a)}" for a in sorted(r.neg_body)]
            (h,) = r.head
            out.append(f"{name(h)} :- {r.bound} <= {{ {', '.join(entries)} }}.")
    text = "\n".join(out)
    return text + "\n" if text else ""


class _SmodelsReader:
    """Token cursor over the whitespace-separated smodels stream."""

    def __init__(self, data, diags):
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        self.tokens = data.split()
        self.pos = 0
        self.diags = diags

    @property
    def loc(self) -> SourceLocation:
        return SourceLocation(1, self.pos + 1)

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def take_int(self, what="integer") -> int | None:
        if self.done():
            self.diags.error(self.loc, f"truncated record: expected {what}")
            return None
        tok = self.tokens[self.pos]
        self.pos += 1
        try:
            return int(tok)
        except ValueError:
            self.diags.error(SourceLocation(1, self.pos), f"expected {what}, found {tok!r}")
            return None

    def take_word(self) -> str | None:
        if self.done():
            self.diags.error(self.loc, "truncated input")
            return None
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def take_ints(self, n, what) -> list[int] | None:
        out = []
        for _ in range(n):
            v = self.take_int(what)
            if v is None:
                return None
            out.append(v)
        return out


def parse_smodels(data, diagnostics: ParseDiagnostics | None = None):
    """Parse the smodels numeric format; returns a Program or ParseDiagnostics.

    Cardinality rules become weight rules with unit weights; each minimize
    literal becomes one optimization rule; the compute sections become
    integrity constraints.  Pass a ParseDiagnostics to also collect warnings.
    """
    diags = diagnostics if diagnostics is not None else ParseDiagnostics()
    rd = _SmodelsReader(data, diags)
    # (kind, payload) records until we can resolve atom ids to names
    records = []
    used: set[int] = set()
    seen_minimize = False

    def atoms_of(ids):
        used.update(ids)
        return ids

    while True:
        code = rd.take_int("rule type code")
        if code is None:
            return diags
        if code == 0:
            break
        if code == 1:
            head = rd.take_int("head")
            counts = rd.take_ints(2, "literal counts")
            if head is None or counts is None:
                return diags
            nlits, nneg = counts
            lits = rd.take_ints(nlits, "literal")
            if lits is None or nneg > nlits:
                if lits is not None:
                    diags.error(rd.loc, "literal count mismatch")
                return diags
            neg, pos = lits[:nneg], lits[nneg:]
            records.append(("basic", atoms_of([head]), atoms_of(pos), atoms_of(neg)))
        elif code == 2:
            head = rd.take_int("head")
            counts = rd.take_ints(3, "counts")
            if head is None or counts is None:
                return diags
            nlits, nneg, bound = counts
            lits = rd.take_ints(nlits, "literal")
            if lits is None or nneg > nlits:
                if lits is not None:
                    diags.error(rd.loc, "literal count mismatch")
                return diags
            neg, pos = lits[:nneg], lits[nneg:]
            records.append(("card", atoms_of([head]), bound, atoms_of(pos), atoms_of(neg)))
        elif code == 3:
            nheads = rd.take_int("head count")
            if nheads is None:
                return diags
            heads = rd.take_ints(nheads, "head")
            counts = rd.take_ints(2, "literal counts") if heads is not None else None
            if counts is None:
                return diags
            nlits, nneg = counts
            lits = rd.take_ints(nlits, "literal")
            if lits is None or nneg > nlits:
                if lits is not None:
                    diags.error(rd.loc, "literal count mismatch")
                return diags
            neg, pos = lits[:nneg], lits[nneg:]
            records.append(("choice", atoms_of(heads), atoms_of(pos), atoms_of(neg)))
        elif code == 5:
            head = rd.take_int("head")
            bound = rd.take_int("bound")
            counts = rd.take_ints(2, "literal counts")
            if head is None or bound is None or counts is None:
                return diags
            nlits, nneg = counts
            lits = rd.take_ints(nlits, "literal")
            weights = rd.take_ints(nlits, "weight") if lits is not None else None
            if lits is None or weights is None or nneg > nlits:
                if lits is not None and weights is not None:
                    diags.error(rd.loc, "literal count mismatch")
                return diags
            neg, pos = lits[:nneg], lits[nneg:]
            wneg, wpos = weights[:nneg], weights[nneg:]
            records.append(("weight", atoms_of([head]), bound,
                            list(zip(atoms_of(pos), wpos)), list(zip(neg, wneg))))
        elif code == 6:
            if seen_minimize:
                diags.error(rd.loc, "multiple minimize statements (priority levels) are not supported")
                return diags
            seen_minimize = True
            zero = rd.take_int("minimize header")
            counts = rd.take_ints(2, "literal counts") if zero is not None else None
            if counts is None:
                return diags
            nlits, nneg = counts
            lits = rd.take_ints(nlits, "literal")
            weights = rd.take_ints(nlits, "weight") if lits is not None else None
            if lits is None or weights is None or nneg > nlits:
                if lits is not None and weights is not None:
                    diags.error(rd.loc, "literal count mismatch")
                return diags
            neg, pos = lits[:nneg], lits[nneg:]
            wneg, wpos = weights[:nneg], weights[nneg:]
            records.append(("minimize", list(zip(atoms_of(pos), wpos)),
                            list(zip(atoms_of(neg), wneg))))
        elif code == 8:
            nheads = rd.take_int("head count")
            if nheads is None:
                return diags
            heads = rd.take_ints(nheads, "head")
            counts = rd.take_ints(2, "literal counts") if heads is not None else None
            if counts is None:
                return diags
            nlits, nneg = counts
            lits = rd.take_ints(nlits, "literal")
            if lits is None or nneg > nlits:
                if lits is not None:
                    diags.error(rd.loc, "literal count mismatch")
                return diags
            neg, pos = lits[:nneg], lits[nneg:]
            records.append(("disjunctive", atoms_of(heads), atoms_of(pos), atoms_of(neg)))
        else:
            diags.error(rd.loc, f"unknown rule type code {code}")
            return diags

    # Symbol table: "<id> <name>" pairs until 0.
    names: dict[int, str] = {}
    while True:
        tok = rd.take_word()
        if tok is None:
            return diags
        if tok == "0":
            break
        try:
            atom = int(tok)
        except ValueError:
            diags.error(rd.loc, f"expected atom id in symbol table, found {tok!r}")
            return diags
        name = rd.take_word()
        if name is None:
            return diags
        names[atom] = name

    # Compute sections: "B+" ids 0, "B-" ids 0, then the model count.
    compute_pos, compute_neg = [], []
    for marker, collect in (("B+", compute_pos), ("B-", compute_neg)):
        tok = rd.take_word()
        if tok is None:
            return diags
        if tok != marker:
            diags.error(rd.loc, f"expected {marker!r} section, found {tok!r}")
            return diags
        while True:
            v = rd.take_int("atom id")
            if v is None:
                return diags
            if v == 0:
                break
            collect.append(v)
            used.add(v)
    if rd.take_int("model count") is None:
        return diags

    for atom in names:
        if atom not in used:
            diags.warn(rd.loc, f"atom {names[atom]!r} occurs only in the symbol table; kept as isolated atom")

    builder = ProgramBuilder()
    ids = sorted(used | set(names))

    def intern(i: int) -> int:
        return builder.atom(names.get(i, f"x{i}"))

    for i in ids:
        intern(i)
    try:
        for rec in records:
            if rec[0] == "basic":
                _, head, pos, neg = rec
                builder.add(disjunctive_rule(map(intern, head), map(intern, pos), map(intern, neg)))
            elif rec[0] == "disjunctive":
                _, heads, pos, neg = rec
                builder.add(disjunctive_rule(map(intern, heads), map(intern, pos), map(intern, neg)))
            elif rec[0] == "choice":
                _, heads, pos, neg = rec
                builder.add(choice_rule(map(intern, heads), map(intern, pos), map(intern, neg)))
            elif rec[0] == "card":
                _, head, bound, pos, neg = rec
                builder.add(weight_rule(intern(head[0]), bound,
                                        [(intern(a), 1) for a in pos],
                                        [(intern(a), 1) for a in neg]))
            elif rec[0] == "weight":
                _, head, bound, pos_w, neg_w = rec
                builder.add(weight_rule(intern(head[0]), bound,
                                        [(intern(a), w) for a, w in pos_w],
                                        [(intern(a), w) for a, w in neg_w]))
            elif rec[0] == "minimize":
                _, pos_w, neg_w = rec
                for a, w in pos_w:
                    builder.add(optimization_rule(intern(a), w, negated=False))
                for a, w in neg_w:
                    builder.add(optimization_rule(intern(a), w, negated=True))
        for a in compute_pos:
            builder.add(disjunctive_rule((), (), (intern(a),)))      # ← not a
        for a in compute_neg:
            builder.add(disjunctive_rule((), (intern(a),), ()))      # ← a
    except Exception as exc:  # structural invariant violations carry a location
        diags.error(rd.loc, str(exc))
        return diags
    return builder.build()


def parse_path(path, fmt=None):
    """Parse a file, picking the format from ``fmt`` or the extension (.lp/.sm)."""
    if fmt is None:
        fmt = "smodels" if str(path).endswith(".sm") else "native"
    with open(path, "rb") as fh:
        data = fh.read()
    if fmt == "smodels":
        return parse_smodels(data)
    return parse_native(data.decode("utf-8"))
