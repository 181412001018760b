"""Random small clause sets for the fuzz and property suites."""

from __future__ import annotations

import random

from wscan.calculus import ClauseSet
from wscan.logic import PVAR, Atom, Const, Literal, Var, eq_atom

TERMS = (Const("a"), Const("b"), Var("u"), Var("v"))
BASE_PREDS = (("A", 1), ("B", 2))


def random_pvars(rng: random.Random) -> tuple:
    names = ("X", "Y")[: rng.randint(1, 2)]
    return tuple((x, rng.randint(1, 2)) for x in names)


def random_literal(rng: random.Random, pvars: tuple, pvar_bias: float = 0.6) -> Literal:
    if rng.random() < 0.08:
        return Literal(eq_atom(rng.choice(TERMS), rng.choice(TERMS)), rng.random() < 0.3)
    if rng.random() < pvar_bias:
        name, ar = rng.choice(pvars)
        atom = Atom(name, tuple(rng.choice(TERMS) for _ in range(ar)), PVAR)
    else:
        name, ar = rng.choice(BASE_PREDS)
        atom = Atom(name, tuple(rng.choice(TERMS) for _ in range(ar)))
    return Literal(atom, rng.random() < 0.5)


def random_clause_set(rng: random.Random, max_clauses: int = 6, max_literals: int = 3) -> ClauseSet:
    pvars = random_pvars(rng)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        clauses.append([random_literal(rng, pvars) for _ in range(rng.randint(1, max_literals))])
    # make sure some predicate variable occurs
    if not any(l.is_pvar for c in clauses for l in c):
        name, ar = pvars[0]
        clauses[0].append(Literal(Atom(name, tuple(rng.choice(TERMS) for _ in range(ar)), PVAR), True))
    used = {l.pred for c in clauses for l in c if l.is_pvar}
    return ClauseSet.from_clauses(clauses, tuple(p for p in pvars if p[0] in used))


def corpus(seed: int, count: int, **kw) -> list[ClauseSet]:
    rng = random.Random(seed)
    return [random_clause_set(rng, **kw) for _ in range(count)]
