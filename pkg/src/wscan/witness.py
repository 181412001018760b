"""Witness extraction from recorded derivations.

Each PurDel step contributes the predicate expression built from the unit
resolution closure of its pointed clause; the remaining steps either keep the
witness or fix a component to a constant.  Witnesses are assembled backwards
from the fresh parameters ``W1 … Wd``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable

from .calculus import (
    ClauseSet,
    ExtPurDel,
    PurDel,
    Res,
    redundant_in,
    resolution_partners,
    resolvent,
)
from .logic import (
    BOT,
    EQ,
    FRESH_CONST_PREFIX,
    PARAM,
    PVAR,
    TOP,
    And,
    Atom,
    Bot,
    Clause,
    Const,
    Exists,
    Forall,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    PointedClause,
    PredicateExpression,
    Top,
    Truncated,
    Var,
    Witness,
    _subst_formula,
    conj,
    disj,
    exists_all,
    forall_all,
    free_vars,
    fresh_name,
    literal_formula,
    param_names,
    substitute,
    term_vars,
)
from .saturation import Derivation, Engine, one_sided

__all__ = [
    "UnitClosure",
    "WitnessTrace",
    "one_sided",
    "unit_closure",
    "res_predicate",
    "transform",
    "extract_witness",
    "simplify",
    "simplify_witness",
    "instantiate_params",
    "witness_parameters",
    "generate_size_family",
    "ackermann_witness",
    "ackermann_derivation",
    "NotAckermannShaped",
]

DEFAULT_DEPTH_LIMIT = 32


# ---------------------------------------------------------------------------
# Unit closures


@dataclass(frozen=True)
class UnitClosure:
    pointed: PointedClause
    fresh_constants: tuple
    clauses: tuple  # surviving closure clauses, seed first
    complete: bool
    raw: tuple = field(default=(), compare=False)  # every clause ever added, in order
    rounds: int = 0

    def __str__(self) -> str:
        body = ", ".join(str(c) for c in self.clauses)
        return "{" + body + ("" if self.complete else ", …") + "}"


def _pvars_of(clause: Clause) -> tuple:
    seen: dict = {}
    for l in clause.literals:
        if l.is_pvar:
            seen.setdefault(l.pred, len(l.args))
    return tuple(seen.items())


def unit_closure(p: PointedClause, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> UnitClosure:
    """Resolution closure of ``p`` starting from the unit dual to its designated literal.

    New resolvents are simplified by the same engine as saturation
    (constraint elimination, condensation, subsumption); factoring is not used
    since the closure only resolves against ``p``.  ``depth_limit`` bounds the
    number of resolution rounds.
    """
    u = _closure(p.clause.literals, p.index, depth_limit)
    return UnitClosure(p, u.fresh_constants, u.clauses, u.complete, u.raw, u.rounds)


@functools.lru_cache(maxsize=512)
def _closure(literals: tuple, index: int, depth_limit: int) -> UnitClosure:
    p = PointedClause(Clause(literals, 1), index)
    lit = p.literal
    if not lit.is_pvar:
        raise ValueError(f"{p} is not pointed at a predicate-variable literal")
    consts = tuple(Const(f"{FRESH_CONST_PREFIX}{i}") for i in range(1, len(lit.args) + 1))
    seed = Literal(Atom(lit.pred, consts, lit.kind), not lit.positive)
    n = ClauseSet.from_clauses([p.clause.literals, (seed,)], _pvars_of(p.clause))
    pc = PointedClause(n.get(1), p.index)
    eng = Engine(n, protected=1, factoring=False)
    raw = [Clause((seed,), 2, ("seed",))]
    done: set = set()
    rounds = 0
    complete = False
    while True:
        fresh = []
        for q in list(resolution_partners(eng.n, pc)):
            key = (q.clause.id, q.index)
            if key in done or q.clause not in eng.n:
                continue
            done.add(key)
            r = resolvent(pc, q)
            if redundant_in(r, eng.n.without(1)) is not None:
                continue
            fresh.append((q, r))
        if not fresh:
            complete = True
            break
        if rounds >= depth_limit:
            break
        rounds += 1
        for q, r in fresh:
            if q.clause not in eng.n:
                continue
            new_id = eng.n.next_id
            eng.apply(Res(pc, q, Clause(r.literals, new_id)))
            raw.append(eng.n.get(new_id))
            eng.integrate(new_id)
    clauses = tuple(c for c in eng.n if c.id != 1)
    return UnitClosure(p, consts, clauses, complete, tuple(raw), rounds)


# ---------------------------------------------------------------------------
# The predicate built from a closure


def _orient(lit: Literal, params: set) -> Literal:
    """Put a parameter on the left of an equation, as in ``u ≃ a``."""
    if lit.atom.kind != EQ:
        return lit
    lhs, rhs = lit.atom.args
    if isinstance(rhs, Var) and rhs.name in params and not (isinstance(lhs, Var) and lhs.name in params):
        return Literal(Atom(lit.atom.pred, (rhs, lhs), EQ), lit.positive)
    return lit


def _abstract(c: Clause, consts: tuple, params: tuple) -> tuple[tuple, tuple]:
    """Literals of ``c`` with the fresh constants replaced by ``params`` and
    its own variables renamed away from them."""
    pset = set(params)
    taken = set(pset) | set(c.variables())
    ren: dict = {}
    for v in c.variables():
        if v in pset:
            new = fresh_name(v + "'", taken)
            taken.add(new)
            ren[v] = Var(new)
    back = {k.name: Var(p) for k, p in zip(consts, params)}
    lits = []
    for l in c.literals:
        atom = _subst_formula(l.atom, ren) if ren else l.atom
        atom = _replace_consts(atom, back)
        lits.append(_orient(Literal(atom, l.positive), pset))
    vs = []
    for l in lits:
        for a in l.atom.args:
            for v in term_vars(a):
                if v not in pset and v not in vs:
                    vs.append(v)
    return tuple(lits), tuple(vs)


def _replace_consts(atom: Atom, back: dict) -> Atom:
    def term(t):
        if isinstance(t, Const) and t.name in back:
            return back[t.name]
        if isinstance(t, Var):
            return t
        if isinstance(t, Const):
            return t
        return type(t)(t.fn, tuple(term(a) for a in t.args))

    return Atom(atom.pred, tuple(term(a) for a in atom.args), atom.kind)


def res_predicate(u: UnitClosure) -> PredicateExpression:
    """``λū. ⋀ ∀v̄ C′(ū, v̄)`` for a negative designated literal, and
    ``λū. ⋁ ∃v̄ ¬C′(ū, v̄)`` (in negation normal form) for a positive one."""
    params = param_names(len(u.fresh_constants))
    negative = not u.pointed.literal.positive
    parts = []
    for c in u.clauses:
        lits, vs = _abstract(c, u.fresh_constants, params)
        if negative:
            parts.append(forall_all(vs, disj(literal_formula(l) for l in lits)))
        else:
            parts.append(exists_all(vs, conj(literal_formula(l.dual()) for l in lits)))
    if not u.complete:
        parts.append(Truncated(f"closure cut after {u.rounds} rounds"))
    return PredicateExpression(params, conj(parts) if negative else disj(parts))


# ---------------------------------------------------------------------------
# Simplification


def _s(phi):
    if isinstance(phi, Not):
        b = _s(phi.body)
        if isinstance(b, Not):
            return b.body
        if isinstance(b, Top):
            return BOT
        if isinstance(b, Bot):
            return TOP
        return Not(b)
    if isinstance(phi, (And, Or)):
        unit, zero = (Top, Bot) if isinstance(phi, And) else (Bot, Top)
        out = []
        for a in phi.args:
            a = _s(a)
            if isinstance(a, zero):
                return a
            if isinstance(a, unit):
                continue
            if isinstance(a, type(phi)):
                out.extend(a.args)
            else:
                out.append(a)
        if not out:
            return TOP if unit is Top else BOT
        return out[0] if len(out) == 1 else type(phi)(tuple(out))
    if isinstance(phi, (Forall, Exists)):
        body = _s(phi.body)
        if phi.var not in free_vars(body):
            return body
        inst = _eliminate_binding(phi.var, body, isinstance(phi, Forall))
        if inst is not None:
            return _s(inst)
        return type(phi)(phi.var, body)
    if isinstance(phi, Implies):
        return Implies(_s(phi.lhs), _s(phi.rhs))
    if isinstance(phi, Iff):
        return Iff(_s(phi.lhs), _s(phi.rhs))
    return phi


def _eliminate_binding(var: str, body, universal: bool):
    """``∀v(v ≉ t ∨ φ) → φ[v←t]`` and its dual ``∃v(v ≃ t ∧ φ) → φ[v←t]``."""
    shell = Or if universal else And
    args = body.args if isinstance(body, shell) else (body,)
    for i, a in enumerate(args):
        eq = a.body if universal and isinstance(a, Not) else a if not universal else None
        if not (isinstance(eq, Atom) and eq.kind == EQ):
            continue
        lhs, rhs = eq.args
        for x, t in ((lhs, rhs), (rhs, lhs)):
            if isinstance(x, Var) and x.name == var and var not in set(term_vars(t)):
                rest = args[:i] + args[i + 1 :]
                inner = (disj if universal else conj)(rest)
                return _subst_formula(inner, {var: t})
    return None


def simplify(e):
    """Apply the local simplification rules bottom-up until nothing changes."""
    if isinstance(e, PredicateExpression):
        return PredicateExpression(e.params, simplify(e.body))
    if isinstance(e, Witness):
        return simplify_witness(e)
    prev = None
    while prev != e:
        prev, e = e, _s(e)
    return e


def simplify_witness(w: Witness) -> Witness:
    return Witness(w.variables, tuple(simplify(c) for c in w.components))


# ---------------------------------------------------------------------------
# Witness parameters


def witness_parameters(variables: Iterable) -> tuple:
    """Fresh parameters ``W1 … Wd``, one per predicate variable."""
    out = []
    for i, (_, arity) in enumerate(variables, start=1):
        ps = param_names(arity)
        out.append(PredicateExpression(ps, Atom(f"W{i}", tuple(Var(p) for p in ps), PARAM)))
    return tuple(out)


def _params_in(phi, acc: dict):
    if isinstance(phi, Atom):
        if phi.kind == PARAM:
            acc.setdefault(phi.pred, len(phi.args))
    elif isinstance(phi, Not):
        _params_in(phi.body, acc)
    elif isinstance(phi, (And, Or)):
        for a in phi.args:
            _params_in(a, acc)
    elif isinstance(phi, (Implies, Iff)):
        _params_in(phi.lhs, acc)
        _params_in(phi.rhs, acc)
    elif isinstance(phi, (Forall, Exists)):
        _params_in(phi.body, acc)
    return acc


def parameters_of(w: Witness) -> dict:
    acc: dict = {}
    for c in w.components:
        _params_in(c.body, acc)
    return acc


def instantiate_params(w: Witness, mode: str = "top") -> Witness:
    """Replace every witness parameter by ``λū.⊤`` (``top``) or ``λū.⊥``
    (``bottom``); ``keep`` returns ``w`` unchanged."""
    if mode == "keep":
        return w
    if mode not in ("top", "bottom"):
        raise ValueError(f"unknown parameter mode {mode!r}")
    value = TOP if mode == "top" else BOT
    sigma = {name: PredicateExpression(param_names(ar), value) for name, ar in parameters_of(w).items()}
    comps = tuple(PredicateExpression(c.params, simplify(substitute(c.body, sigma))) for c in w.components)
    return Witness(w.variables, comps)


# ---------------------------------------------------------------------------
# Transformations and assembly


def transform(step, alpha: Witness, depth_limit: int = DEFAULT_DEPTH_LIMIT, closures: dict | None = None) -> Witness:
    """Witness for the premise set of ``step`` given one for its conclusion."""
    if isinstance(step, ExtPurDel):
        arity = dict(alpha.variables)[step.pred]
        return alpha.replace(step.pred, PredicateExpression(param_names(arity), TOP if step.positive else BOT))
    if isinstance(step, PurDel):
        p = step.pointed
        r = _closure_predicate(p, depth_limit, closures)
        return alpha.replace(p.pred, substitute(r, alpha.as_dict()))
    return alpha


def _closure_predicate(p: PointedClause, depth_limit: int, cache: dict | None) -> PredicateExpression:
    key = (p.clause.literals, p.index, depth_limit)
    if cache is not None and key in cache:
        return cache[key]
    r = res_predicate(unit_closure(p, depth_limit))
    if cache is not None:
        cache[key] = r
    return r


@dataclass
class WitnessTrace:
    derivation: Derivation
    per_step: list  # per_step[i] is the witness for the i-th intermediate set
    final: Witness
    annotation_used: dict  # step index -> predicate expression substituted for that PurDel

    @property
    def first_order(self) -> bool:
        return self.final.first_order


def extract_witness(d: Derivation, depth_limit: int = DEFAULT_DEPTH_LIMIT, simplify_steps: bool = True) -> WitnessTrace:
    if not d.eliminating:
        raise ValueError("derivation does not eliminate all predicate variables")
    variables = d.initial.pvars
    w = Witness(variables, witness_parameters(variables))
    per_step = [w]
    annotations: dict = {}
    cache: dict = {}
    for i in range(len(d.steps) - 1, -1, -1):
        step = d.steps[i]
        if isinstance(step, PurDel):
            annotations[i] = _closure_predicate(step.pointed, depth_limit, cache)
        w = transform(step, w, depth_limit, cache)
        if simplify_steps:
            w = simplify_witness(w)
        per_step.append(w)
    per_step.reverse()
    return WitnessTrace(d, per_step, per_step[0], annotations)


# ---------------------------------------------------------------------------
# Size family


def generate_size_family(p: int, n: int) -> tuple[ClauseSet, Derivation]:
    """``{X(c_i1) ∨ … ∨ X(c_in) | i ≤ p}`` with the derivation purifying each
    clause at its first literal, in order."""
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    X = lambda *a: Atom("X", a, PVAR)
    lits = [[Literal(X(Const(f"c{i}_{j}"))) for j in range(1, n + 1)] for i in range(1, p + 1)]
    cs = ClauseSet.from_clauses(lits, (("X", 1),))
    steps = [PurDel(PointedClause(cs.get(i), 0)) for i in range(1, p + 1)]
    return cs, Derivation(cs, steps)


# ---------------------------------------------------------------------------
# Ackermann shape


class NotAckermannShaped(ValueError):
    pass


def _ackermann_split(n: ClauseSet, x: str):
    """The clause ``¬X(ū) ∨ C(ū)`` (or its dual) and the polarity of ``X``
    in the remaining clauses."""
    occ = n.occurrences(x)
    if not occ:
        raise NotAckermannShaped(f"{x} does not occur")
    # the clause with ¬X(ū) wins when both polarities could be isolated
    for cid, idx, pos in sorted(occ, key=lambda o: o[2]):
        c = n.get(cid)
        lit = c.literals[idx]
        if sum(1 for l in c.literals if l.is_pvar and l.pred == x) != 1:
            continue
        args = lit.args
        if not all(isinstance(a, Var) for a in args) or len({a.name for a in args}) != len(args):
            continue
        others = {p for i, j, p in occ if i != cid}
        if others <= {not pos}:
            return c, idx, pos
    raise NotAckermannShaped(f"no clause isolates {x} with the other occurrences of one polarity")


def ackermann_witness(n: ClauseSet, x: str) -> PredicateExpression:
    """``λū. ∀v̄ C`` for ``N′ ∪ {¬X(ū) ∨ C}`` with ``X`` positive in ``N′``;
    the dual case gives ``λū. ∃v̄ ¬C``.  Raises :class:`NotAckermannShaped`."""
    c, idx, pos = _ackermann_split(n, x)
    lit = c.literals[idx]
    ren = {a.name: Var(p) for a, p in zip(lit.args, param_names(len(lit.args)))}
    taken = set(ren) | {v.name for v in ren.values()}
    rest_vars = [v for v in c.variables() if v not in ren]
    for v in rest_vars:
        if v in {t.name for t in ren.values()}:
            new = fresh_name(v + "'", taken | set(c.variables()))
            taken.add(new)
            ren[v] = Var(new)
    rest = [Literal(_subst_formula(l.atom, ren), l.positive) for i, l in enumerate(c.literals) if i != idx]
    bound = [ren[v].name if v in ren else v for v in rest_vars]
    params = tuple(ren[a.name].name for a in lit.args)
    if not pos:
        body = forall_all(bound, disj(literal_formula(l) for l in rest))
    else:
        body = exists_all(bound, conj(literal_formula(l.dual()) for l in rest))
    return simplify(PredicateExpression(params, body))


def ackermann_derivation(n: ClauseSet, x: str) -> Derivation:
    """Purify the isolating clause, then delete the rest of ``X`` by extended purity."""
    from .saturation import SaturationConfig, derivation_from_choices

    c, idx, pos = _ackermann_split(n, x)
    cfg = SaturationConfig(max_purification_resolvents=10_000, max_steps=100_000)
    choices = [(c.id, idx)]
    d = derivation_from_choices(n, choices, cfg)
    if d.conclusion.occurrences(x):
        d = derivation_from_choices(n, choices + [("ext", x)], cfg)
    return d
