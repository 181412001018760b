"""First-order syntax: terms, literals, clauses, formulas and predicate expressions.

Everything here is immutable.  Clauses are ordered tuples of literals so that a
:class:`PointedClause` index stays meaningful; duplicates are allowed until a
clause is condensed.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

# Tokens matching this pattern are individual variables in problem files.
VARIABLE_PATTERN = re.compile(r"^[u-z][0-9]*$")
# Reserved fresh-name markers: renamed variables and unit-closure constants.
RENAME_SUFFIX = "_r"
FRESH_CONST_PREFIX = "@c"

BASE = "base"
PVAR = "var"
EQ = "eq"
PARAM = "param"


class ArityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.fn}({', '.join(map(str, self.args))})"


Term = Union[Var, Const, App]


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, App):
        for a in t.args:
            yield from term_vars(a)


def term_has_function(t: Term) -> bool:
    return isinstance(t, App)


def occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, App):
        return any(occurs(name, a) for a in t.args)
    return False


# ---------------------------------------------------------------------------
# Atoms, literals, clauses


@dataclass(frozen=True)
class Atom:
    """``pred(args)``; ``kind`` distinguishes base predicates, predicate
    variables, equality and witness parameters."""

    pred: str
    args: tuple = ()
    kind: str = BASE

    def __str__(self) -> str:
        if self.kind == EQ:
            return f"{self.args[0]} = {self.args[1]}"
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(map(str, self.args))})"


def eq_atom(lhs: Term, rhs: Term) -> Atom:
    return Atom("=", (lhs, rhs), EQ)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    @property
    def pred(self) -> str:
        return self.atom.pred

    @property
    def args(self) -> tuple:
        return self.atom.args

    @property
    def kind(self) -> str:
        return self.atom.kind

    @property
    def is_pvar(self) -> bool:
        return self.atom.kind == PVAR

    @property
    def is_constraint(self) -> bool:
        return self.atom.kind == EQ and not self.positive

    def dual(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        if self.atom.kind == EQ:
            op = "=" if self.positive else "!="
            return f"{self.args[0]} {op} {self.args[1]}"
        return str(self.atom) if self.positive else f"-{self.atom}"


def dual(lit: Literal) -> Literal:
    return lit.dual()


def neq(lhs: Term, rhs: Term) -> Literal:
    return Literal(eq_atom(lhs, rhs), False)


def literal_vars(lit: Literal) -> Iterator[str]:
    for a in lit.args:
        yield from term_vars(a)


@dataclass(frozen=True)
class Clause:
    literals: tuple = ()
    id: int = 0
    origin: tuple = field(default=("input",), compare=False)

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for lit in self.literals:
            for v in literal_vars(lit):
                seen.setdefault(v)
        return list(seen)

    def pvar_literals(self) -> list[tuple[int, Literal]]:
        return [(i, l) for i, l in enumerate(self.literals) if l.is_pvar]

    def contains_pred(self, pred: str) -> bool:
        return any(l.is_pvar and l.pred == pred for l in self.literals)

    def with_id(self, cid: int, origin: tuple | None = None) -> Clause:
        return Clause(self.literals, cid, self.origin if origin is None else origin)

    def __str__(self) -> str:
        if not self.literals:
            return "⊥"
        return " | ".join(map(str, self.literals))


@dataclass(frozen=True)
class PointedClause:
    clause: Clause
    index: int

    def __post_init__(self):
        if not 0 <= self.index < len(self.clause.literals):
            raise IndexError(f"designated index {self.index} out of range for {self.clause}")

    @property
    def literal(self) -> Literal:
        return self.clause.literals[self.index]

    @property
    def rest(self) -> tuple:
        lits = self.clause.literals
        return lits[: self.index] + lits[self.index + 1 :]

    @property
    def pred(self) -> str:
        return self.literal.pred

    def label(self) -> str:
        return f"{self.clause.id}.{self.index + 1}"

    def __str__(self) -> str:
        parts = []
        for i, lit in enumerate(self.clause.literals):
            parts.append(f"[{lit}]" if i == self.index else str(lit))
        return " | ".join(parts)


# ---------------------------------------------------------------------------
# Substitutions and unification


class Substitution:
    """Idempotent finite map from variable names to terms."""

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping[str, Term] | None = None):
        m = {k: v for k, v in (bindings or {}).items() if not (isinstance(v, Var) and v.name == k)}
        # normalize to idempotent form
        for _ in range(len(m) + 1):
            new = {k: _apply_term(v, m) for k, v in m.items()}
            if new == m:
                break
            m = new
        else:  # pragma: no cover - cyclic input
            raise ValueError("substitution is not idempotent (cyclic bindings)")
        self._map = {k: v for k, v in m.items() if not (isinstance(v, Var) and v.name == k)}

    @property
    def bindings(self) -> dict[str, Term]:
        return dict(self._map)

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __getitem__(self, name: str) -> Term:
        return self._map[name]

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other) -> bool:
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}↦{v}" for k, v in sorted(self._map.items()))
        return "{" + inner + "}"

    def compose(self, other: Substitution) -> Substitution:
        """``self`` followed by ``other``: ``E(self∘other) = (E self) other``."""
        m = {k: _apply_term(v, other._map) for k, v in self._map.items()}
        for k, v in other._map.items():
            m.setdefault(k, v)
        m = {k: v for k, v in m.items() if not (isinstance(v, Var) and v.name == k)}
        if any(k in set(term_vars(v)) for v in m.values() for k in m):
            # normalizing would change the meaning of simultaneous application
            raise ValueError("composition is not idempotent")
        return Substitution(m)

    def __call__(self, e):
        return substitute(e, self)


def _apply_term(t: Term, m: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if isinstance(t, App):
        return App(t.fn, tuple(_apply_term(a, m) for a in t.args))
    return t


class NotUnifiable(Exception):
    pass


def _unify(pairs: Iterable[tuple[Term, Term]]) -> tuple[dict[str, Term], bool]:
    """Robinson unification with occurs check.

    Returns the solved bindings and whether a function-application
    decomposition was needed (such a step is not an equivalence in arbitrary
    structures, where functions need not be injective).
    """
    stack = list(pairs)
    sol: dict[str, Term] = {}
    decomposed = False
    while stack:
        s, t = stack.pop()
        s = _apply_term(s, sol)
        t = _apply_term(t, sol)
        if s == t:
            continue
        if isinstance(t, Var) and not isinstance(s, Var):
            s, t = t, s
        if isinstance(s, Var):
            if occurs(s.name, t):
                raise NotUnifiable(f"occurs check: {s} in {t}")
            sol = {k: _apply_term(v, {s.name: t}) for k, v in sol.items()}
            sol[s.name] = t
        elif isinstance(s, App) and isinstance(t, App) and s.fn == t.fn and len(s.args) == len(t.args):
            decomposed = True
            stack.extend(zip(s.args, t.args))
        else:
            raise NotUnifiable(f"clash: {s} vs {t}")
    return sol, decomposed


def mgu(ts, ss) -> Substitution | None:
    """Most general unifier of two equal-length term tuples, or ``None``."""
    if len(ts) != len(ss):
        raise ValueError("term tuples of different length")
    try:
        sol, _ = _unify(zip(ts, ss))
    except NotUnifiable:
        return None
    return Substitution(sol)


def mgu_checked(ts, ss) -> tuple[Substitution, bool] | None:
    """Like :func:`mgu` but also reports whether decomposition was used."""
    try:
        sol, dec = _unify(zip(ts, ss))
    except NotUnifiable:
        return None
    return Substitution(sol), dec


def match_term(pattern: Term, target: Term, binding: dict[str, Term]) -> dict[str, Term] | None:
    """One-way matching; only variables of ``pattern`` are bound."""
    if isinstance(pattern, Var):
        bound = binding.get(pattern.name)
        if bound is None:
            new = dict(binding)
            new[pattern.name] = target
            return new
        return binding if bound == target else None
    if isinstance(pattern, Const):
        return binding if pattern == target else None
    if isinstance(target, App) and target.fn == pattern.fn and len(target.args) == len(pattern.args):
        for p, t in zip(pattern.args, target.args):
            binding = match_term(p, t, binding)
            if binding is None:
                return None
        return binding
    return None


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "⊤"


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "⊥"


TOP = Top()
BOT = Bot()


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Iff:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall2:
    pred: str
    arity: int
    body: object


@dataclass(frozen=True)
class Exists2:
    pred: str
    arity: int
    body: object


@dataclass(frozen=True)
class Truncated:
    """Stands for the unexplored tail of an infinite conjunction/disjunction."""

    note: str = ""


Formula = Union[Top, Bot, Atom, Not, And, Or, Implies, Iff, Forall, Exists, Forall2, Exists2, Truncated]


def conj(items: Iterable) -> Formula:
    items = tuple(items)
    if not items:
        return TOP
    return items[0] if len(items) == 1 else And(items)


def disj(items: Iterable) -> Formula:
    items = tuple(items)
    if not items:
        return BOT
    return items[0] if len(items) == 1 else Or(items)


def forall_all(names: Iterable[str], body: Formula) -> Formula:
    for name in reversed(list(names)):
        body = Forall(name, body)
    return body


def exists_all(names: Iterable[str], body: Formula) -> Formula:
    for name in reversed(list(names)):
        body = Exists(name, body)
    return body


def literal_formula(lit: Literal) -> Formula:
    return lit.atom if lit.positive else Not(lit.atom)


def clause_formula(clause: Clause, closed: bool = False) -> Formula:
    body = disj(literal_formula(l) for l in clause.literals)
    return forall_all(clause.variables(), body) if closed else body


def clause_set_formula(clauses: Iterable[Clause]) -> Formula:
    return conj(clause_formula(c, closed=True) for c in clauses)


def free_vars(phi) -> set[str]:
    if isinstance(phi, Atom):
        return {v for a in phi.args for v in term_vars(a)}
    if isinstance(phi, (Top, Bot, Truncated)):
        return set()
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or)):
        out: set[str] = set()
        for a in phi.args:
            out |= free_vars(a)
        return out
    if isinstance(phi, (Implies, Iff)):
        return free_vars(phi.lhs) | free_vars(phi.rhs)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, (Forall2, Exists2)):
        return free_vars(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi) -> set[str]:
    """Free and bound individual variable names."""
    if isinstance(phi, (Forall, Exists)):
        return all_vars(phi.body) | {phi.var}
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, (And, Or)):
        out: set[str] = set()
        for a in phi.args:
            out |= all_vars(a)
        return out
    if isinstance(phi, (Implies, Iff)):
        return all_vars(phi.lhs) | all_vars(phi.rhs)
    if isinstance(phi, (Forall2, Exists2)):
        return all_vars(phi.body)
    return free_vars(phi)


def contains_truncation(phi) -> bool:
    if isinstance(phi, Truncated):
        return True
    if isinstance(phi, Not):
        return contains_truncation(phi.body)
    if isinstance(phi, (And, Or)):
        return any(contains_truncation(a) for a in phi.args)
    if isinstance(phi, (Implies, Iff)):
        return contains_truncation(phi.lhs) or contains_truncation(phi.rhs)
    if isinstance(phi, (Forall, Exists, Forall2, Exists2)):
        return contains_truncation(phi.body)
    return False


def predicates_in(phi, kinds=(PVAR,)) -> set[str]:
    if isinstance(phi, Atom):
        return {phi.pred} if phi.kind in kinds else set()
    if isinstance(phi, Not):
        return predicates_in(phi.body, kinds)
    if isinstance(phi, (And, Or)):
        out: set[str] = set()
        for a in phi.args:
            out |= predicates_in(a, kinds)
        return out
    if isinstance(phi, (Implies, Iff)):
        return predicates_in(phi.lhs, kinds) | predicates_in(phi.rhs, kinds)
    if isinstance(phi, (Forall, Exists, Forall2, Exists2)):
        return predicates_in(phi.body, kinds)
    return set()


def fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    for i in itertools.count():
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError  # pragma: no cover


def _subst_formula(phi, m: Mapping[str, Term]):
    if not m:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(_apply_term(a, m) for a in phi.args), phi.kind)
    if isinstance(phi, (Top, Bot, Truncated)):
        return phi
    if isinstance(phi, Not):
        return Not(_subst_formula(phi.body, m))
    if isinstance(phi, And):
        return And(tuple(_subst_formula(a, m) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(_subst_formula(a, m) for a in phi.args))
    if isinstance(phi, Implies):
        return Implies(_subst_formula(phi.lhs, m), _subst_formula(phi.rhs, m))
    if isinstance(phi, Iff):
        return Iff(_subst_formula(phi.lhs, m), _subst_formula(phi.rhs, m))
    if isinstance(phi, (Forall, Exists)):
        inner = {k: v for k, v in m.items() if k != phi.var}
        fv = free_vars(phi.body)
        inner = {k: v for k, v in inner.items() if k in fv}
        if not inner:
            return phi
        incoming = {v for t in inner.values() for v in term_vars(t)}
        var = phi.var
        if var in incoming:
            # rename the binder to avoid capture
            new = fresh_name(var, incoming | all_vars(phi.body) | set(inner))
            inner = dict(inner)
            inner[var] = Var(new)
            var = new
        return type(phi)(var, _subst_formula(phi.body, inner))
    if isinstance(phi, (Forall2, Exists2)):
        return type(phi)(phi.pred, phi.arity, _subst_formula(phi.body, m))
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Predicate expressions and witnesses


@dataclass(frozen=True)
class PredicateExpression:
    """``λ params. body``."""

    params: tuple
    body: object

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"parameters not distinct: {self.params}")
        extra = free_vars(self.body) - set(self.params)
        if extra:
            raise ValueError(f"free variables {sorted(extra)} not among parameters {self.params}")

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def truncated(self) -> bool:
        return contains_truncation(self.body)

    @property
    def first_order(self) -> bool:
        return not self.truncated

    def apply(self, args) -> Formula:
        if len(args) != len(self.params):
            raise ArityError(f"predicate of arity {self.arity} applied to {len(args)} arguments")
        return _subst_formula(self.body, dict(zip(self.params, args)))

    def __str__(self) -> str:
        from .render import render_predicate

        return render_predicate(self)


def param_names(arity: int) -> tuple:
    if arity <= 3:
        return ("u", "v", "w")[:arity]
    return tuple(f"u{i}" for i in range(1, arity + 1))


def constant_predicate(arity: int, value: bool) -> PredicateExpression:
    return PredicateExpression(param_names(arity), TOP if value else BOT)


@dataclass(frozen=True)
class Witness:
    """One predicate expression per eliminated predicate variable, in order."""

    variables: tuple  # ((name, arity), ...)
    components: tuple

    def __post_init__(self):
        if len(self.variables) != len(self.components):
            raise ValueError("witness length does not match the predicate variables")
        for (name, arity), comp in zip(self.variables, self.components):
            if comp.arity != arity:
                raise ArityError(f"component for {name} has arity {comp.arity}, expected {arity}")

    def __getitem__(self, name: str) -> PredicateExpression:
        for (n, _), c in zip(self.variables, self.components):
            if n == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict[str, PredicateExpression]:
        return {n: c for (n, _), c in zip(self.variables, self.components)}

    def replace(self, name: str, expr: PredicateExpression) -> Witness:
        comps = tuple(expr if n == name else c for (n, _), c in zip(self.variables, self.components))
        return Witness(self.variables, comps)

    @property
    def first_order(self) -> bool:
        return all(c.first_order for c in self.components)

    @property
    def truncated(self) -> bool:
        return any(c.truncated for c in self.components)

    def __str__(self) -> str:
        from .render import render_witness

        return render_witness(self)


def _second_order(phi, m: Mapping[str, PredicateExpression]):
    if isinstance(phi, Atom):
        if phi.kind in (PVAR, PARAM) and phi.pred in m:
            expr = m[phi.pred]
            if expr.arity != len(phi.args):
                raise ArityError(f"{phi.pred} has {len(phi.args)} arguments, expression has arity {expr.arity}")
            return expr.apply(phi.args)
        return phi
    if isinstance(phi, (Top, Bot, Truncated)):
        return phi
    if isinstance(phi, Not):
        return Not(_second_order(phi.body, m))
    if isinstance(phi, And):
        return And(tuple(_second_order(a, m) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(_second_order(a, m) for a in phi.args))
    if isinstance(phi, Implies):
        return Implies(_second_order(phi.lhs, m), _second_order(phi.rhs, m))
    if isinstance(phi, Iff):
        return Iff(_second_order(phi.lhs, m), _second_order(phi.rhs, m))
    if isinstance(phi, (Forall, Exists)):
        # bound variables of the target may capture free variables of the
        # substituted bodies; those are all parameters, so nothing leaks.
        return type(phi)(phi.var, _second_order(phi.body, m))
    if isinstance(phi, (Forall2, Exists2)):
        inner = {k: v for k, v in m.items() if k != phi.pred}
        return type(phi)(phi.pred, phi.arity, _second_order(phi.body, inner))
    raise TypeError(f"not a formula: {phi!r}")


def substitute(e, sigma):
    """Apply a first-order :class:`Substitution` (or a mapping from predicate
    variable names to :class:`PredicateExpression`) to any expression."""
    if isinstance(sigma, Substitution):
        m = sigma._map
        if isinstance(e, (Var, Const, App)):
            return _apply_term(e, m)
        if isinstance(e, Literal):
            return Literal(_subst_formula(e.atom, m), e.positive)
        if isinstance(e, Clause):
            return Clause(tuple(Literal(_subst_formula(l.atom, m), l.positive) for l in e.literals), e.id, e.origin)
        if isinstance(e, PredicateExpression):
            inner = {k: v for k, v in m.items() if k not in e.params}
            return PredicateExpression(e.params, _subst_formula(e.body, inner))
        if isinstance(e, tuple):
            return tuple(substitute(x, sigma) for x in e)
        return _subst_formula(e, m)
    # second-order substitution X ← λū.φ
    m2 = dict(sigma)
    if isinstance(e, Literal):
        return _second_order(literal_formula(e), m2)
    if isinstance(e, Clause):
        return _second_order(clause_formula(e, closed=True), m2)
    if isinstance(e, PredicateExpression):
        return PredicateExpression(e.params, _second_order(e.body, m2))
    if isinstance(e, tuple):
        return tuple(substitute(x, m2) for x in e)
    return _second_order(e, m2)


def substitute_witness(e, witness: Witness):
    return substitute(e, witness.as_dict())


# ---------------------------------------------------------------------------
# Renaming


def variable_names() -> Iterator[str]:
    base = ("u", "v", "w", "x", "y", "z")
    yield from base
    for i in itertools.count(1):
        for b in base:
            yield f"{b}{i}"


def canonical_variables(clause: Clause) -> Clause:
    """Rename clause variables to u, v, w, ... in order of first occurrence."""
    names = variable_names()
    mapping = {v: Var(next(names)) for v in clause.variables()}
    return Clause(tuple(Literal(_subst_formula(l.atom, mapping), l.positive) for l in clause.literals), clause.id, clause.origin)


def rename_apart(clause: Clause, avoid: Iterable[str]) -> Clause:
    """A variant of ``clause`` sharing no variables with ``avoid``."""
    avoid = set(avoid)
    own = clause.variables()
    taken = avoid | set(own)
    mapping: dict[str, Term] = {}
    for v in own:
        if v in avoid:
            i = 1
            while f"{v}{RENAME_SUFFIX}{i}" in taken:
                i += 1
            new = f"{v}{RENAME_SUFFIX}{i}"
            taken.add(new)
            mapping[v] = Var(new)
    if not mapping:
        return clause
    return Clause(tuple(Literal(_subst_formula(l.atom, mapping), l.positive) for l in clause.literals), clause.id, clause.origin)


def variant_key(clause: Clause | Iterable[Literal]) -> tuple:
    """Key identifying a clause up to variable renaming (literal order kept)."""
    lits = clause.literals if isinstance(clause, Clause) else tuple(clause)
    return canonical_variables(Clause(tuple(lits))).literals


# ---------------------------------------------------------------------------
# Sizes


def size(e) -> float:
    """Expression size: symbols count 1, connectives and quantifiers as in the
    standard inductive measure; a truncated (infinite) expression is ``inf``."""
    if isinstance(e, (Var, Const, Top, Bot)):
        return 1
    if isinstance(e, App):
        return 1 + sum(size(a) for a in e.args)
    if isinstance(e, Atom):
        return 1 + sum(size(a) for a in e.args)
    if isinstance(e, Literal):
        return size(e.atom) + (0 if e.positive else 1)
    if isinstance(e, Clause):
        return sum(size(l) for l in e.literals)
    if isinstance(e, Truncated):
        return math.inf
    if isinstance(e, Not):
        return 1 + size(e.body)
    if isinstance(e, (And, Or)):
        return sum(size(a) for a in e.args)
    if isinstance(e, (Implies, Iff)):
        return size(e.lhs) + size(e.rhs)
    if isinstance(e, (Forall, Exists, Forall2, Exists2)):
        return 1 + size(e.body)
    if isinstance(e, PredicateExpression):
        return size(e.body)
    if isinstance(e, Witness):
        return sum(size(c) for c in e.components)
    if isinstance(e, (tuple, list)):
        return sum(size(x) for x in e)
    raise TypeError(f"no size for {e!r}")


def symbol_count(e) -> int:
    """Number of non-logical symbol occurrences (predicates, functions,
    constants); used for clause-set input sizes."""
    if isinstance(e, Var):
        return 0
    if isinstance(e, Const):
        return 1
    if isinstance(e, App):
        return 1 + sum(symbol_count(a) for a in e.args)
    if isinstance(e, Literal):
        atom = e.atom
        return (0 if atom.kind == EQ else 1) + sum(symbol_count(a) for a in atom.args)
    if isinstance(e, Clause):
        return sum(symbol_count(l) for l in e.literals)
    return sum(symbol_count(x) for x in e)


# ---------------------------------------------------------------------------
# Signatures


@dataclass
class Signature:
    constants: dict = field(default_factory=dict)  # name -> None (ordered set)
    functions: dict = field(default_factory=dict)  # name -> arity
    base_predicates: dict = field(default_factory=dict)  # name -> arity
    predicate_variables: dict = field(default_factory=dict)  # name -> arity, declared order
    params: dict = field(default_factory=dict)  # witness parameters name -> arity
    fresh_counter: int = 0

    def fresh_constant(self) -> Const:
        self.fresh_counter += 1
        return Const(f"{FRESH_CONST_PREFIX}{self.fresh_counter}")

    def _check(self, table: dict, name: str, arity: int, what: str):
        old = table.get(name)
        if old is not None and old != arity:
            raise ArityError(f"{what} {name} used with arities {old} and {arity}")
        table[name] = arity

    def add_term(self, t: Term):
        if isinstance(t, Const):
            if t.name in self.functions:
                raise ArityError(f"{t.name} used as constant and function")
            self.constants.setdefault(t.name)
        elif isinstance(t, App):
            if t.fn in self.constants:
                raise ArityError(f"{t.fn} used as constant and function")
            self._check(self.functions, t.fn, len(t.args), "function")
            for a in t.args:
                self.add_term(a)

    def add_atom(self, atom: Atom):
        for a in atom.args:
            self.add_term(a)
        if atom.kind == PVAR:
            self._check(self.predicate_variables, atom.pred, len(atom.args), "predicate variable")
        elif atom.kind == BASE:
            if atom.pred in self.predicate_variables:
                raise ArityError(f"{atom.pred} is both a base predicate and a predicate variable")
            self._check(self.base_predicates, atom.pred, len(atom.args), "predicate")
        elif atom.kind == PARAM:
            self._check(self.params, atom.pred, len(atom.args), "witness parameter")

    def add_formula(self, phi):
        if isinstance(phi, Atom):
            self.add_atom(phi)
        elif isinstance(phi, Not):
            self.add_formula(phi.body)
        elif isinstance(phi, (And, Or)):
            for a in phi.args:
                self.add_formula(a)
        elif isinstance(phi, (Implies, Iff)):
            self.add_formula(phi.lhs)
            self.add_formula(phi.rhs)
        elif isinstance(phi, (Forall, Exists)):
            self.add_formula(phi.body)
        elif isinstance(phi, (Forall2, Exists2)):
            self.add_formula(phi.body)

    def add_clause(self, clause: Clause):
        for lit in clause.literals:
            self.add_atom(lit.atom)

    @classmethod
    def of(cls, clauses: Iterable[Clause] = (), formulas: Iterable = (), pvars: Iterable = ()) -> Signature:
        sig = cls()
        for name, arity in pvars:
            sig.predicate_variables[name] = arity
        for c in clauses:
            sig.add_clause(c)
        for phi in formulas:
            sig.add_formula(phi)
        return sig

    @property
    def has_functions(self) -> bool:
        return bool(self.functions)
