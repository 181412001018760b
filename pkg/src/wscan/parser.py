"""Problem files and witness files.

Problem grammar::

    problem  := header line*
    header   := "vars:" var_decl ("," var_decl)*
    line     := "consts:" NAME ("," NAME)* | "option:" NAME "=" VALUE | "clause:" clause
    clause   := literal ("|" literal)* | "⊥"
    literal  := "-"? atom
    atom     := NAME "(" term ("," term)* ")" | NAME | term ("=" | "!=") term

Tokens ``u … z`` (optionally followed by digits) are variables; every other
0-ary term is a constant.  Lines starting with ``%`` or ``#`` are comments.

Witness files hold one ``NAME: λu v. formula`` line per predicate variable
(``\\`` may replace ``λ``), or the JSON object produced by ``--json``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .calculus import ClauseSet
from .logic import (
    BASE,
    EQ,
    PARAM,
    PVAR,
    TOP,
    BOT,
    VARIABLE_PATTERN,
    And,
    App,
    ArityError,
    Atom,
    Clause,
    Const,
    Exists,
    Forall,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    PredicateExpression,
    Var,
    Witness,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected: str = ""):
        self.line, self.col, self.expected = line, col, expected
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(f"{where}{message}" + (f" (expected {expected})" if expected else ""))


OPTION_KEYS = {
    "max_steps": int,
    "max_resolvents": int,
    "depth_limit": int,
    "one_sided_only": lambda s: s.lower() in ("1", "true", "yes"),
    "k": int,
    "witness_params": str,
    "extended_purity": str,
    "selection": str,
    "choices": str,
}


@dataclass
class ProblemFile:
    pvars: tuple  # ((name, arity), ...) in declaration order
    clauses: tuple  # Clause, ids 1..n
    consts: tuple = ()
    options: dict = field(default_factory=dict)

    def clause_set(self) -> ClauseSet:
        return ClauseSet(tuple(self.clauses), tuple(self.pvars), len(self.clauses) + 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return (
            self.pvars == other.pvars
            and tuple(c.literals for c in self.clauses) == tuple(c.literals for c in other.clauses)
            and self.consts == other.consts
            and self.options == other.options
        )


# ---------------------------------------------------------------------------
# Tokens

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<neq>!=|≠|≉)
  | (?P<iff><->|↔)
  | (?P<imp>->|→)
  | (?P<eq>=|≃)
  | (?P<lam>λ|\\)
  | (?P<num>[0-9]+)
  | (?P<name>[A-Za-z_$@][A-Za-z0-9_$'′@]*)
  | (?P<punct>[(),|.:/\-~¬&∧∨∀∃⊤⊥!?])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"forall": "∀", "exists": "∃", "true": "⊤", "false": "⊥", "$true": "⊤", "$false": "⊥"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line_no: int, col0: int = 0) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line_no, col0 + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "name" and tok in _KEYWORDS:
                kind, tok = "punct", _KEYWORDS[tok]
            elif kind == "punct":
                tok = {"~": "¬", "&": "∧", "!": "∀", "?": "∃"}.get(tok, tok)
            out.append(_Tok(kind, tok, line_no, col0 + pos + 1))
        pos = m.end()
    out.append(_Tok("end", "", line_no, col0 + len(text) + 1))
    return out


class _Stream:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    @property
    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.peek.text == text and self.peek.kind != "name":
            self.i += 1
            return True
        return False

    def expect(self, text: str, what: str | None = None) -> _Tok:
        t = self.peek
        if t.text != text or t.kind == "name":
            raise ParseError(f"unexpected {t.text or 'end of line'!r}", t.line, t.col, what or repr(text))
        return self.next()

    def name(self, what: str = "a name") -> _Tok:
        t = self.peek
        if t.kind != "name":
            raise ParseError(f"unexpected {t.text or 'end of line'!r}", t.line, t.col, what)
        return self.next()


# ---------------------------------------------------------------------------
# Terms and literals


def _is_variable(name: str) -> bool:
    return bool(VARIABLE_PATTERN.match(name))


class _Symbols:
    """Arity bookkeeping for a single file."""

    def __init__(self, pvars: dict, params_ok: bool = False):
        self.pvars = pvars
        self.preds: dict = {}
        self.funcs: dict = {}
        self.consts: set = set()
        self.params_ok = params_ok

    def _conflict(self, tok: _Tok, msg: str):
        raise ParseError(msg, tok.line, tok.col, "a consistent arity")

    def term(self, tok: _Tok, args: tuple | None):
        name = tok.text
        if args is None:
            if _is_variable(name):
                return Var(name)
            if name in self.funcs:
                self._conflict(tok, f"arity conflict: {name} used as a function and as a constant")
            self.consts.add(name)
            return Const(name)
        if name in self.consts:
            self._conflict(tok, f"arity conflict: {name} used as a constant and as a function")
        old = self.funcs.setdefault(name, len(args))
        if old != len(args):
            self._conflict(tok, f"arity conflict: function {name} used with arities {old} and {len(args)}")
        return App(name, args)

    def atom(self, tok: _Tok, args: tuple) -> Atom:
        name = tok.text
        if name in self.pvars:
            if self.pvars[name] != len(args):
                self._conflict(tok, f"arity conflict: {name} declared with arity {self.pvars[name]}, used with {len(args)}")
            return Atom(name, args, PVAR)
        kind = PARAM if self.params_ok and re.fullmatch(r"W\d+", name) and (name, BASE) not in self.preds else BASE
        table = self.preds
        old = table.setdefault((name, kind), len(args))
        if old != len(args):
            self._conflict(tok, f"arity conflict: predicate {name} used with arities {old} and {len(args)}")
        return Atom(name, args, kind)


def _parse_term(s: _Stream, sym: _Symbols):
    tok = s.name("a term")
    if s.accept("("):
        args = [_parse_term(s, sym)]
        while s.accept(","):
            args.append(_parse_term(s, sym))
        s.expect(")")
        return sym.term(tok, tuple(args))
    return sym.term(tok, None)


def _parse_atomic(s: _Stream, sym: _Symbols):
    """An atom or an equation; returns (atom, positive)."""
    tok = s.name("an atom or term")
    args = None
    if s.accept("("):
        args = [_parse_term(s, sym)]
        while s.accept(","):
            args.append(_parse_term(s, sym))
        s.expect(")", "')' or ','")
        args = tuple(args)
    if s.peek.kind in ("eq", "neq"):
        lhs = sym.term(tok, args)
        op = s.next()
        rhs = _parse_term(s, sym)
        return Atom("=", (lhs, rhs), EQ), op.kind == "eq"
    if args is None and _is_variable(tok.text):
        raise ParseError(f"variable {tok.text} used as an atom", tok.line, tok.col, "'=' or '!='")
    return sym.atom(tok, args or ()), True


def _parse_literal(s: _Stream, sym: _Symbols) -> Literal:
    neg = False
    while s.peek.text in ("-", "¬"):
        s.next()
        neg = not neg
    atom, pos = _parse_atomic(s, sym)
    return Literal(atom, pos != neg)


def _parse_clause(s: _Stream, sym: _Symbols) -> tuple:
    if s.accept("⊥"):
        return ()
    lits = [_parse_literal(s, sym)]
    while s.accept("|"):
        lits.append(_parse_literal(s, sym))
    return tuple(lits)


# ---------------------------------------------------------------------------
# Problem files


def parse_problem(text: str) -> ProblemFile:
    pvars: dict = {}
    header_seen = False
    clauses: list = []
    consts: list = []
    options: dict = {}
    sym = _Symbols(pvars)
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        m = re.match(r"(\w+)\s*:", line)
        if not m:
            raise ParseError("line does not start with a keyword", no, 1, "'vars:', 'consts:', 'option:' or 'clause:'")
        key, body = m.group(1), line[m.end():]
        col = raw.index(line) + m.end()
        if not header_seen:
            if key != "vars":
                raise ParseError(f"unexpected {key!r}", no, 1, "'vars:' header")
            header_seen = True
            s = _Stream(_tokenize(body, no, col))
            while True:
                name = s.name("var_decl")
                s.expect("/", "'/' and an arity")
                ar = _arity(s)
                if name.text in pvars:
                    raise ParseError(f"predicate variable {name.text} declared twice", no, name.col)
                pvars[name.text] = ar
                if not s.accept(","):
                    break
            _end(s)
            continue
        if key == "vars":
            raise ParseError("second 'vars:' header", no, 1)
        s = _Stream(_tokenize(body, no, col))
        if key == "consts":
            while True:
                tok = s.name("a constant")
                if _is_variable(tok.text):
                    raise ParseError(f"{tok.text} is a variable name", tok.line, tok.col, "a constant")
                sym.term(tok, None)
                consts.append(tok.text)
                if not s.accept(","):
                    break
            _end(s)
        elif key == "option":
            name = s.name("an option name")
            if name.text not in OPTION_KEYS:
                raise ParseError(f"unknown option {name.text!r}", no, name.col, ", ".join(OPTION_KEYS))
            if s.peek.kind != "eq":
                raise ParseError("missing '='", s.peek.line, s.peek.col, "'='")
            s.next()
            value = body[body.index("=") + 1 :].strip()
            try:
                OPTION_KEYS[name.text](value)
            except ValueError:
                raise ParseError(f"bad value {value!r} for option {name.text}", no, name.col) from None
            options[name.text] = value
        elif key == "clause":
            lits = _parse_clause(s, sym)
            _end(s)
            clauses.append(Clause(lits, len(clauses) + 1))
        else:
            raise ParseError(f"unknown keyword {key!r}", no, 1, "'consts:', 'option:' or 'clause:'")
    if not header_seen:
        raise ParseError("empty problem", 1, 1, "'vars:' header")
    return ProblemFile(tuple(pvars.items()), tuple(clauses), tuple(consts), options)


def _arity(s: _Stream) -> int:
    t = s.peek
    if t.kind != "num":
        raise ParseError(f"unexpected {t.text or 'end of line'!r}", t.line, t.col, "an arity")
    s.next()
    return int(t.text)


def _end(s: _Stream):
    t = s.peek
    if t.kind != "end":
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col, "end of line")


def parse_clause_set(text: str) -> ClauseSet:
    return parse_problem(text).clause_set()


# ---------------------------------------------------------------------------
# Formulas and witnesses


def _parse_formula(s: _Stream, sym: _Symbols):
    return _parse_iff(s, sym)


def _parse_iff(s, sym):
    lhs = _parse_imp(s, sym)
    if s.peek.kind == "iff":
        s.next()
        return Iff(lhs, _parse_iff(s, sym))
    return lhs


def _parse_imp(s, sym):
    lhs = _parse_or(s, sym)
    if s.peek.kind == "imp":
        s.next()
        return Implies(lhs, _parse_imp(s, sym))
    return lhs


def _parse_or(s, sym):
    args = [_parse_and(s, sym)]
    while s.accept("∨") or s.accept("|"):
        args.append(_parse_and(s, sym))
    return args[0] if len(args) == 1 else Or(tuple(args))


def _parse_and(s, sym):
    args = [_parse_unary(s, sym)]
    while s.accept("∧"):
        args.append(_parse_unary(s, sym))
    return args[0] if len(args) == 1 else And(tuple(args))


def _parse_unary(s, sym):
    t = s.peek
    if t.text in ("¬", "-") and t.kind == "punct":
        s.next()
        return Not(_parse_unary(s, sym))
    if t.text in ("∀", "∃") and t.kind == "punct":
        s.next()
        names = [s.name("a bound variable").text]
        while s.peek.kind == "name":
            names.append(s.next().text)
        s.expect(".", "'.' after the bound variables")
        body = _parse_formula(s, sym)
        q = Forall if t.text == "∀" else Exists
        for n in reversed(names):
            body = q(n, body)
        return body
    if s.accept("⊤"):
        return TOP
    if s.accept("⊥"):
        return BOT
    if s.accept("("):
        phi = _parse_formula(s, sym)
        s.expect(")")
        return phi
    atom, pos = _parse_atomic(s, sym)
    return atom if pos else Not(atom)


def parse_formula(text: str, pvars: dict | None = None):
    s = _Stream(_tokenize(text, 1))
    phi = _parse_formula(s, _Symbols(dict(pvars or {}), params_ok=True))
    _end(s)
    return phi


def parse_predicate(text: str, pvars: dict | None = None, line: int = 1) -> PredicateExpression:
    s = _Stream(_tokenize(text, line))
    sym = _Symbols(dict(pvars or {}), params_ok=True)
    if s.peek.kind != "lam":
        raise ParseError("missing λ", s.peek.line, s.peek.col, "'λ' or '\\'")
    s.next()
    params = []
    while s.peek.kind == "name":
        params.append(s.next().text)
    s.expect(".", "'.' after the parameters")
    body = _parse_formula(s, sym)
    _end(s)
    try:
        return PredicateExpression(tuple(params), body)
    except ValueError as e:
        raise ParseError(str(e), line, 1) from None


def parse_witness(text: str, pvars: tuple) -> Witness:
    """Read a witness for the predicate variables ``pvars`` (``((X, arity), ...)``)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        from .render import witness_from_json

        try:
            w = witness_from_json(json.loads(stripped))
        except (KeyError, ValueError, TypeError) as e:
            raise ParseError(f"bad JSON witness: {e}") from None
        return _order(w, pvars)
    found: dict = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*:", line)
        if not m:
            raise ParseError("expected 'NAME: λ…'", no, 1, "a witness line")
        found[m.group(1)] = parse_predicate(line[m.end():], {}, no)
    return _order(Witness(tuple((n, e.arity) for n, e in found.items()), tuple(found.values())), pvars)


def _order(w: Witness, pvars: tuple) -> Witness:
    comps = w.as_dict()
    missing = [n for n, _ in pvars if n not in comps]
    if missing:
        raise ParseError(f"witness lacks components for {', '.join(missing)}")
    try:
        return Witness(tuple(pvars), tuple(comps[n] for n, _ in pvars))
    except ArityError as e:
        raise ParseError(str(e)) from None
