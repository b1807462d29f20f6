"""Parsers for the formula-file and structure-file grammars.

Formula files (UTF-8, `#` starts a line comment):

    sig E/2 F/1
    query phi lib(w,x,y,z): E(x,y) & (E(w,x) | (E(y,z) & E(z,z)))
    query psi lib(x): exists u,v. E(u,v) & F(x)

`&` binds tighter than `|`; `exists` extends to the end of the enclosing
parenthesis.  Variables are C-style identifiers; names matching the reserved
bound-variable pattern `_q<digits>` are rejected.  All quantified variables
are renamed apart (to `_q0`, `_q1`, ...) while parsing, so liberal names are
the only user-visible ones.

Structure files:

    structure C
    domain 1 2 3 4
    rel E: (1,2) (2,3) (3,4) (4,4)
    end
"""

from __future__ import annotations

import re

from .errors import ParseError
from .logic import And, Atom, EpFormula, Exists, Node, Or, RESERVED_VAR_RE, Top, free_vars
from .structures import AUG_RELATION_PREFIX, Signature, Structure

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
ELEMENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9]+")

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[(),.&|]))")


class _Tokens:
    def __init__(self, text: str, line: int, offset: int, path: str | None):
        self.text = text
        self.line = line
        self.base = offset
        self.path = path
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                col = offset + pos + (len(text[pos:]) - len(stripped)) + 1
                raise ParseError(f"unexpected character {stripped[0]!r}", line, col, path)
            if m.group("ident"):
                self.items.append(("ident", m.group("ident"), offset + m.start("ident") + 1))
            else:
                self.items.append(("sym", m.group("sym"), offset + m.start("sym") + 1))
            pos = m.end()
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of formula", self.line, None, self.path)
        self.pos += 1
        return tok

    def expect(self, value: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, got {tok[1]!r}", self.line, tok[2], self.path)
        return tok

    def error(self, message: str, tok: tuple[str, str, int] | None = None) -> ParseError:
        col = tok[2] if tok else None
        return ParseError(message, self.line, col, self.path)


class _BodyParser:
    """Recursive descent over one query body, renaming binders apart."""

    def __init__(self, tokens: _Tokens, signature: Signature, lib: tuple[str, ...]):
        self.tokens = tokens
        self.signature = signature
        self.lib = lib
        self.fresh = 0

    def _fresh_name(self) -> str:
        name = f"_q{self.fresh}"
        self.fresh += 1
        return name

    def parse(self) -> Node:
        node = self._or({})
        tok = self.tokens.peek()
        if tok is not None:
            raise self.tokens.error(f"unexpected trailing input {tok[1]!r}", tok)
        return node

    def _or(self, env: dict[str, str]) -> Node:
        node = self._and(env)
        while True:
            tok = self.tokens.peek()
            if tok and tok[1] == "|":
                self.tokens.next()
                node = Or(node, self._and(env))
            else:
                return node

    def _and(self, env: dict[str, str]) -> Node:
        node = self._primary(env)
        while True:
            tok = self.tokens.peek()
            if tok and tok[1] == "&":
                self.tokens.next()
                node = And(node, self._primary(env))
            else:
                return node

    def _variable(self, env: dict[str, str]) -> str:
        tok = self.tokens.next()
        kind, value, col = tok
        if kind != "ident":
            raise self.tokens.error(f"expected a variable, got {value!r}", tok)
        if RESERVED_VAR_RE.fullmatch(value):
            raise self.tokens.error(f"variable name {value!r} is reserved", tok)
        return value

    def _primary(self, env: dict[str, str]) -> Node:
        tok = self.tokens.peek()
        if tok is None:
            raise self.tokens.error("missing sub-formula")
        kind, value, col = tok
        if value == "(":
            self.tokens.next()
            node = self._or(env)
            self.tokens.expect(")")
            return node
        if value == "true":
            self.tokens.next()
            return Top()
        if value == "exists":
            self.tokens.next()
            names = [self._variable(env)]
            while self.tokens.peek() and self.tokens.peek()[1] == ",":
                self.tokens.next()
                names.append(self._variable(env))
            self.tokens.expect(".")
            inner_env = dict(env)
            fresh = []
            for name in names:
                fresh_name = self._fresh_name()
                inner_env[name] = fresh_name
                fresh.append(fresh_name)
            body = self._or(inner_env)
            for fresh_name in reversed(fresh):
                body = Exists(fresh_name, body)
            return body
        if kind == "ident":
            return self._atom(env)
        raise self.tokens.error(f"unexpected {value!r}", tok)

    def _atom(self, env: dict[str, str]) -> Node:
        tok = self.tokens.next()
        _kind, rel, col = tok
        if rel not in self.signature:
            raise self.tokens.error(f"unknown relation {rel!r}", tok)
        self.tokens.expect("(")
        args = [self._atom_arg(env)]
        while self.tokens.peek() and self.tokens.peek()[1] == ",":
            self.tokens.next()
            args.append(self._atom_arg(env))
        self.tokens.expect(")")
        arity = self.signature.arity(rel)
        if len(args) != arity:
            raise self.tokens.error(
                f"relation {rel} has arity {arity}, got {len(args)} arguments", tok)
        return Atom(rel, tuple(args))

    def _atom_arg(self, env: dict[str, str]) -> str:
        tok = self.tokens.next()
        kind, value, _col = tok
        if kind != "ident":
            raise self.tokens.error(f"expected a variable, got {value!r}", tok)
        if RESERVED_VAR_RE.fullmatch(value):
            raise self.tokens.error(f"variable name {value!r} is reserved", tok)
        return env.get(value, value)


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def parse_formula_file(text: str, path: str | None = None
                       ) -> tuple[Signature, list[tuple[str, EpFormula]]]:
    """Parse `sig` and `query` statements; all `sig` lines must precede the
    first query."""
    relations: list[tuple[str, int]] = []
    queries: list[tuple[str, EpFormula]] = []
    signature: Signature | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if stripped.startswith("sig"):
            if queries:
                raise ParseError("sig lines must precede all queries", lineno, None, path)
            for m in re.finditer(r"\S+", stripped[3:]):
                entry = m.group()
                em = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)/([0-9]+)", entry)
                if em is None:
                    raise ParseError(f"bad signature entry {entry!r} (expected Name/arity)",
                                     lineno, indent + 4 + m.start(), path)
                name, arity = em.group(1), int(em.group(2))
                if name.startswith(AUG_RELATION_PREFIX):
                    raise ParseError(f"relation prefix {AUG_RELATION_PREFIX!r} is reserved",
                                     lineno, indent + 4 + m.start(), path)
                relations.append((name, arity))
            continue
        if stripped.startswith("query"):
            if signature is None:
                try:
                    signature = Signature(tuple(relations))
                except Exception as exc:
                    raise ParseError(str(exc), lineno, None, path) from exc
            m = re.match(r"query\s+([A-Za-z_][A-Za-z0-9_]*)\s+lib\(([^)]*)\)\s*:\s*(.*)$",
                         stripped)
            if m is None:
                raise ParseError("expected `query <name> lib(<vars>): <body>`",
                                 lineno, indent + 1, path)
            name, libtext, bodytext = m.group(1), m.group(2), m.group(3)
            lib = []
            for piece in libtext.split(","):
                piece = piece.strip()
                if not piece:
                    continue
                if not IDENT_RE.fullmatch(piece):
                    raise ParseError(f"bad liberal variable {piece!r}", lineno, None, path)
                if RESERVED_VAR_RE.fullmatch(piece):
                    raise ParseError(f"variable name {piece!r} is reserved", lineno, None, path)
                lib.append(piece)
            if len(set(lib)) != len(lib):
                raise ParseError("duplicate liberal variables", lineno, None, path)
            body_offset = indent + m.start(3)
            tokens = _Tokens(bodytext, lineno, body_offset, path)
            body = _BodyParser(tokens, signature, tuple(lib)).parse()
            missing = sorted(free_vars(body) - set(lib))
            if missing:
                raise ParseError(f"free variables not declared liberal: {missing}",
                                 lineno, None, path)
            queries.append((name, EpFormula(signature, tuple(lib), body)))
            continue
        raise ParseError(f"unrecognized statement: {stripped.split()[0]!r}",
                         lineno, indent + 1, path)
    if signature is None:
        if not relations:
            raise ParseError("no sig lines found", None, None, path)
        signature = Signature(tuple(relations))
    if not queries:
        raise ParseError("no query statements found", None, None, path)
    return signature, queries


_TUPLE_RE = re.compile(r"\(([^()]*)\)")


def parse_structure_file(text: str, signature: Signature, path: str | None = None
                         ) -> list[tuple[str, Structure]]:
    """Parse one or more `structure ... end` blocks against a signature."""
    structures: list[tuple[str, Structure]] = []
    name: str | None = None
    domain: list[str] | None = None
    rels: dict[str, list[tuple[str, ...]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "structure":
            if name is not None:
                raise ParseError("nested structure block (missing `end`?)", lineno, None, path)
            parts = line.split()
            if len(parts) != 2 or not ELEMENT_RE.fullmatch(parts[1]):
                raise ParseError("expected `structure <name>`", lineno, None, path)
            name, domain, rels = parts[1], None, {}
        elif head == "domain":
            if name is None:
                raise ParseError("`domain` outside a structure block", lineno, None, path)
            if domain is not None:
                raise ParseError("duplicate domain line", lineno, None, path)
            domain = []
            for e in line.split()[1:]:
                if not ELEMENT_RE.fullmatch(e):
                    raise ParseError(f"bad element name {e!r}", lineno, None, path)
                if e in domain:
                    raise ParseError(f"duplicate element {e!r}", lineno, None, path)
                domain.append(e)
            if not domain:
                raise ParseError("empty universe is not allowed", lineno, None, path)
        elif head == "rel":
            if name is None or domain is None:
                raise ParseError("`rel` line before `structure`/`domain`", lineno, None, path)
            m = re.match(r"rel\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$", line)
            if m is None:
                raise ParseError("expected `rel <R>: (<e,...>) ...`", lineno, None, path)
            rel = m.group(1)
            if rel not in signature:
                raise ParseError(f"unknown relation {rel!r}", lineno, None, path)
            arity = signature.arity(rel)
            rest = m.group(2)
            consumed = re.sub(_TUPLE_RE, "", rest).strip()
            if consumed:
                raise ParseError(f"unparsed tuple text: {consumed!r}", lineno, None, path)
            for tm in _TUPLE_RE.finditer(rest):
                entries = [e.strip() for e in tm.group(1).split(",") if e.strip()]
                if len(entries) != arity:
                    raise ParseError(
                        f"tuple {tm.group(0)} has {len(entries)} entries, "
                        f"arity of {rel} is {arity}", lineno, None, path)
                for e in entries:
                    if e not in domain:
                        raise ParseError(f"element {e!r} is not in the domain",
                                         lineno, None, path)
                rels.setdefault(rel, []).append(tuple(entries))
        elif head == "end":
            if name is None or domain is None:
                raise ParseError("`end` without a complete structure block", lineno, None, path)
            structures.append((name, Structure.make(signature, domain, rels)))
            name, domain, rels = None, None, {}
        else:
            raise ParseError(f"unrecognized statement: {head!r}", lineno, None, path)
    if name is not None:
        raise ParseError("unterminated structure block (missing `end`)", None, None, path)
    if not structures:
        raise ParseError("no structures found", None, None, path)
    return structures
