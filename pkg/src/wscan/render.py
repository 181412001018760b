"""Text and JSON renderings of clauses, formulas, witnesses and derivations."""

from __future__ import annotations

import json
import math

from .logic import (
    BASE,
    EQ,
    And,
    App,
    Atom,
    Bot,
    Clause,
    Const,
    Exists,
    Exists2,
    Forall,
    Forall2,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    PredicateExpression,
    Top,
    Truncated,
    Var,
    Witness,
    TOP,
    BOT,
)

# ---------------------------------------------------------------------------
# Text

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_QUANT = {Forall: "∀", Exists: "∃", Forall2: "∀²", Exists2: "∃²"}


def render_term(t) -> str:
    return str(t)


def _atomic(phi) -> bool:
    return isinstance(phi, (Atom, Top, Bot, Truncated))


def _prec(phi) -> int:
    if _atomic(phi):
        return 9
    if type(phi) in _QUANT:
        return 0
    return _PREC[type(phi)]


def render_formula(phi) -> str:
    if isinstance(phi, Top):
        return "⊤"
    if isinstance(phi, Bot):
        return "⊥"
    if isinstance(phi, Truncated):
        return "…"
    if isinstance(phi, Atom):
        return str(phi)
    if isinstance(phi, Not):
        b = phi.body
        if isinstance(b, Atom) and b.kind == EQ:
            return f"{b.args[0]} ≠ {b.args[1]}"
        inner = render_formula(b)
        return f"¬{inner}" if _prec(b) > _PREC[Not] else f"¬({inner})"
    if isinstance(phi, (And, Or)):
        sym = " ∧ " if isinstance(phi, And) else " ∨ "
        # an And under an Or is bracketed although precedence would allow dropping it
        parent = _PREC[And] if isinstance(phi, Or) else _PREC[type(phi)]
        return sym.join(_child(a, parent) for a in phi.args)
    if isinstance(phi, (Implies, Iff)):
        sym = " → " if isinstance(phi, Implies) else " ↔ "
        p = _PREC[type(phi)]
        return _child(phi.lhs, p) + sym + _child(phi.rhs, p)
    if isinstance(phi, (Forall, Exists)):
        return f"{_QUANT[type(phi)]}{phi.var}. {render_formula(phi.body)}"
    if isinstance(phi, (Forall2, Exists2)):
        return f"{_QUANT[type(phi)]}{phi.pred}/{phi.arity}. {render_formula(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


def _child(phi, parent: int) -> str:
    s = render_formula(phi)
    return s if _prec(phi) > parent else f"({s})"


def render_predicate(e: PredicateExpression) -> str:
    return f"λ{' '.join(e.params)}. {render_formula(e.body)}" if e.params else f"λ. {render_formula(e.body)}"


def render_witness(w: Witness) -> str:
    parts = [render_predicate(c) for c in w.components]
    return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"


def render_witness_file(w: Witness) -> str:
    """One ``X: λu. …`` line per component; readable by the witness parser."""
    return "".join(f"{name}: {render_predicate(c)}\n" for (name, _), c in zip(w.variables, w.components))


def render_clause(c: Clause) -> str:
    return str(c)


def render_clause_set(n) -> str:
    return str(n)


def render_problem(problem) -> str:
    lines = ["vars: " + ", ".join(f"{n}/{a}" for n, a in problem.pvars)]
    if problem.consts:
        lines.append("consts: " + ", ".join(problem.consts))
    for k, v in problem.options.items():
        lines.append(f"option: {k} = {v}")
    lines += [f"clause: {c}" for c in problem.clauses]
    return "\n".join(lines) + "\n"


def render_derivation(d) -> str:
    lines = ["initial:"]
    lines += [f"  {c.id}: {c}" for c in d.initial]
    lines.append("steps:")
    lines += [f"  {i + 1}. {s}" for i, s in enumerate(d.steps)]
    lines.append("conclusion:")
    lines += [f"  {c.id}: {c}" for c in d.conclusion] or ["  (empty)"]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# JSON


def term_to_json(t):
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, Const):
        return {"const": t.name}
    return {"fn": t.fn, "args": [term_to_json(a) for a in t.args]}


def term_from_json(j):
    if "var" in j:
        return Var(j["var"])
    if "const" in j:
        return Const(j["const"])
    return App(j["fn"], tuple(term_from_json(a) for a in j["args"]))


def formula_to_json(phi):
    if isinstance(phi, Top):
        return {"op": "top"}
    if isinstance(phi, Bot):
        return {"op": "bot"}
    if isinstance(phi, Truncated):
        return {"op": "truncated", "note": phi.note}
    if isinstance(phi, Atom):
        if phi.kind == EQ:
            return {"op": "eq", "lhs": term_to_json(phi.args[0]), "rhs": term_to_json(phi.args[1])}
        return {"op": "atom", "pred": phi.pred, "kind": phi.kind, "args": [term_to_json(a) for a in phi.args]}
    if isinstance(phi, Not):
        return {"op": "not", "body": formula_to_json(phi.body)}
    if isinstance(phi, (And, Or)):
        return {"op": "and" if isinstance(phi, And) else "or", "args": [formula_to_json(a) for a in phi.args]}
    if isinstance(phi, (Implies, Iff)):
        op = "implies" if isinstance(phi, Implies) else "iff"
        return {"op": op, "lhs": formula_to_json(phi.lhs), "rhs": formula_to_json(phi.rhs)}
    if isinstance(phi, (Forall, Exists)):
        return {"op": "forall" if isinstance(phi, Forall) else "exists", "var": phi.var, "body": formula_to_json(phi.body)}
    if isinstance(phi, (Forall2, Exists2)):
        op = "forall2" if isinstance(phi, Forall2) else "exists2"
        return {"op": op, "pred": phi.pred, "arity": phi.arity, "body": formula_to_json(phi.body)}
    raise TypeError(f"not a formula: {phi!r}")


def formula_from_json(j):
    op = j["op"]
    if op == "top":
        return TOP
    if op == "bot":
        return BOT
    if op == "truncated":
        return Truncated(j.get("note", ""))
    if op == "eq":
        return Atom("=", (term_from_json(j["lhs"]), term_from_json(j["rhs"])), EQ)
    if op == "atom":
        return Atom(j["pred"], tuple(term_from_json(a) for a in j["args"]), j.get("kind", BASE))
    if op == "not":
        return Not(formula_from_json(j["body"]))
    if op in ("and", "or"):
        return (And if op == "and" else Or)(tuple(formula_from_json(a) for a in j["args"]))
    if op in ("implies", "iff"):
        return (Implies if op == "implies" else Iff)(formula_from_json(j["lhs"]), formula_from_json(j["rhs"]))
    if op in ("forall", "exists"):
        return (Forall if op == "forall" else Exists)(j["var"], formula_from_json(j["body"]))
    if op in ("forall2", "exists2"):
        return (Forall2 if op == "forall2" else Exists2)(j["pred"], j["arity"], formula_from_json(j["body"]))
    raise ValueError(f"unknown formula op {op!r}")


def literal_to_json(l: Literal):
    return {"positive": l.positive, "atom": formula_to_json(l.atom)}


def literal_from_json(j) -> Literal:
    return Literal(formula_from_json(j["atom"]), j["positive"])


def clause_to_json(c: Clause):
    return {"id": c.id, "literals": [literal_to_json(l) for l in c.literals], "text": str(c)}


def clause_from_json(j) -> Clause:
    return Clause(tuple(literal_from_json(l) for l in j["literals"]), j.get("id", 0))


def witness_to_json(w: Witness) -> dict:
    return {
        "witness": [
            {"var": name, "params": list(c.params), "body": formula_to_json(c.body)}
            for (name, _), c in zip(w.variables, w.components)
        ],
        "first_order": w.first_order,
        "truncated": w.truncated,
    }


def witness_from_json(j) -> Witness:
    variables, comps = [], []
    for item in j["witness"]:
        comps.append(PredicateExpression(tuple(item["params"]), formula_from_json(item["body"])))
        variables.append((item["var"], len(item["params"])))
    return Witness(tuple(variables), tuple(comps))


def step_to_json(step) -> dict:
    from .calculus import step_kind

    return {"kind": step_kind(step), "text": str(step)}


def derivation_to_json(d) -> dict:
    return {
        "steps": [dict(step_to_json(s), state=[clause_to_json(c) for c in st]) for s, st in zip(d.steps, d.intermediates[1:])],
        "conclusion": [clause_to_json(c) for c in d.conclusion],
    }


def _finite(x):
    # json.dumps never hands floats to ``default``, so walk the tree instead
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def dumps(obj) -> str:
    return json.dumps(_finite(obj), indent=2, ensure_ascii=False, allow_nan=False)
