"""Inference rules and redundancy of the constraint resolution calculus.

Every derivation step is a frozen record; :func:`apply_step` checks its side
conditions against a clause set and returns the successor set, raising
:class:`IllegalStep` otherwise.  Saturation and the tests go through this
validator, so an emitted derivation is legal by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .logic import (
    EQ,
    Atom,
    Var,
    Clause,
    Const,
    Literal,
    PointedClause,
    Substitution,
    canonical_variables,
    literal_vars,
    match_term,
    mgu_checked,
    neq,
    rename_apart,
    substitute,
)


class IllegalStep(ValueError):
    """A derivation step whose side condition does not hold."""


# ---------------------------------------------------------------------------
# Clause sets


@dataclass(frozen=True)
class ClauseSet:
    """Id-indexed clauses plus the ordered predicate variables to eliminate."""

    clauses: tuple = ()  # tuple of Clause in ascending id order
    pvars: tuple = ()  # ((name, arity), ...)
    next_id: int = 1
    _by_id: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        by_id = {c.id: c for c in self.clauses}
        if len(by_id) != len(self.clauses):
            raise ValueError("duplicate clause ids")
        object.__setattr__(self, "_by_id", by_id)

    @classmethod
    def from_clauses(cls, literal_lists: Iterable, pvars=(), origin=("input",)) -> ClauseSet:
        out = []
        for i, lits in enumerate(literal_lists, start=1):
            lits = lits.literals if isinstance(lits, Clause) else tuple(lits)
            out.append(Clause(tuple(lits), i, origin))
        return cls(tuple(out), tuple(pvars), len(out) + 1)

    @property
    def pvar_names(self) -> tuple:
        return tuple(n for n, _ in self.pvars)

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __contains__(self, c) -> bool:
        if isinstance(c, int):
            return c in self._by_id
        other = self._by_id.get(c.id)
        return other is not None and other.literals == c.literals

    def get(self, cid: int) -> Clause:
        try:
            return self._by_id[cid]
        except KeyError:
            raise KeyError(f"no clause with id {cid}") from None

    @property
    def ids(self) -> tuple:
        return tuple(c.id for c in self.clauses)

    def is_pvar_literal(self, lit: Literal) -> bool:
        return lit.is_pvar and lit.pred in self.pvar_names

    def occurrences(self, pred: str) -> list[tuple[int, int, bool]]:
        """(clause id, literal index, polarity) for every occurrence of ``pred``."""
        return [
            (c.id, i, l.positive)
            for c in self.clauses
            for i, l in enumerate(c.literals)
            if l.is_pvar and l.pred == pred
        ]

    def contains_pvars(self) -> bool:
        names = set(self.pvar_names)
        return any(l.is_pvar and l.pred in names for c in self.clauses for l in c.literals)

    def add(self, literals, origin) -> tuple[ClauseSet, Clause]:
        c = Clause(tuple(literals), self.next_id, origin)
        return ClauseSet(self.clauses + (c,), self.pvars, self.next_id + 1), c

    def remove(self, ids) -> ClauseSet:
        ids = set(ids)
        return ClauseSet(tuple(c for c in self.clauses if c.id not in ids), self.pvars, self.next_id)

    def without(self, cid: int) -> ClauseSet:
        return self.remove({cid})

    def literal_sets(self) -> list:
        return [c.literals for c in self.clauses]

    def __str__(self) -> str:
        return "\n".join(f"{c.id}: {c}" for c in self.clauses) or "(empty)"


# ---------------------------------------------------------------------------
# Basic inferences


def _check_pvar(lit: Literal, what: str):
    if not lit.is_pvar:
        raise IllegalStep(f"{what} literal {lit} is not a predicate-variable literal")


def resolvent(p: PointedClause, q: PointedClause) -> Clause:
    """``t̄ ≉ s̄ ∨ C ∨ C′`` from ``p = C ∨ L(t̄)`` and ``q = C′ ∨ L(s̄)⊥``."""
    lp, lq = p.literal, q.literal
    _check_pvar(lp, "designated")
    _check_pvar(lq, "designated")
    if lp.pred != lq.pred or len(lp.args) != len(lq.args):
        raise IllegalStep(f"cannot resolve {lp} with {lq}: different predicate variables")
    if lp.positive == lq.positive:
        raise IllegalStep(f"cannot resolve {lp} with {lq}: same polarity")
    qc = rename_apart(q.clause, p.clause.variables())
    lq = qc.literals[q.index]
    constraints = tuple(neq(t, s) for t, s in zip(lp.args, lq.args))
    rest_q = qc.literals[: q.index] + qc.literals[q.index + 1 :]
    return canonical_variables(Clause(constraints + p.rest + rest_q))


def factorable(clause: Clause, i: int, j: int) -> bool:
    if i == j or not (0 <= i < len(clause) and 0 <= j < len(clause)):
        return False
    a, b = clause.literals[i], clause.literals[j]
    return a.is_pvar and b.is_pvar and a.pred == b.pred and a.positive == b.positive


def factor(clause: Clause, i: int, j: int) -> Clause:
    """Keep literal ``i`` and replace literal ``j`` by componentwise disequations."""
    if not factorable(clause, i, j):
        raise IllegalStep(f"literals {i} and {j} of {clause} are not factorable")
    lt, ls = clause.literals[i], clause.literals[j]
    constraints = tuple(neq(t, s) for t, s in zip(lt.args, ls.args))
    kept = tuple(l for k, l in enumerate(clause.literals) if k != j)
    return canonical_variables(Clause(constraints + kept))


def constraint_block(clause: Clause, indices) -> tuple[tuple, tuple]:
    lits = [clause.literals[k] for k in indices]
    for l in lits:
        if not l.is_constraint:
            raise IllegalStep(f"{l} is not a constraint literal")
    return tuple(l.args[0] for l in lits), tuple(l.args[1] for l in lits)


def constraint_eliminate(clause: Clause, indices) -> tuple[Clause, Substitution, bool] | None:
    """``(C without the block)σ`` for ``σ = mgu`` of the block, or ``None``.

    The flag reports whether ``σ`` was found without decomposing function
    applications; only then is the conclusion equivalent to the premise.
    """
    indices = tuple(sorted(set(indices)))
    if not indices:
        raise IllegalStep("empty constraint block")
    ts, ss = constraint_block(clause, indices)
    res = mgu_checked(ts, ss)
    if res is None:
        return None
    sigma, decomposed = res
    rest = tuple(l for k, l in enumerate(clause.literals) if k not in indices)
    out = canonical_variables(substitute(Clause(rest), sigma))
    return out, sigma, not decomposed


def maximal_constraint_block(clause: Clause) -> tuple:
    """Greedy left-to-right maximal unifiable set of constraint literals."""
    chosen: list[int] = []
    for k, lit in enumerate(clause.literals):
        if not lit.is_constraint:
            continue
        trial = chosen + [k]
        ts, ss = constraint_block(clause, trial)
        if mgu_checked(ts, ss) is not None:
            chosen = trial
    return tuple(chosen)


# ---------------------------------------------------------------------------
# Subsumption, tautologies, condensation


def _match_args(pargs, targs, binding: dict) -> dict | None:
    for p, t in zip(pargs, targs):
        binding = match_term(p, t, binding)
        if binding is None:
            return None
    return binding


def _key(lit: Literal) -> tuple:
    atom = lit.atom
    return (atom.pred, lit.positive, atom.kind, len(atom.args))


def subsumes(c: Clause | Iterable[Literal], d: Clause | Iterable[Literal], multiset: bool = True) -> bool:
    """Is there σ with Cσ ⊆ D (as sub-multiset, or as set when ``multiset`` is off)?"""
    cl = tuple(c.literals if isinstance(c, Clause) else c)
    dl = tuple(d.literals if isinstance(d, Clause) else d)
    if multiset and len(cl) > len(dl):
        return False
    ck = [_key(l) for l in cl]
    dk = [_key(l) for l in dl]
    buckets: dict = {}
    for j, k in enumerate(dk):
        buckets.setdefault(k, []).append(j)
    need: dict = {}
    for k in ck:
        if k not in buckets:
            return False
        need[k] = need.get(k, 0) + 1
    if multiset and any(need[k] > len(buckets[k]) for k in need):
        return False
    if len(cl) == 1:
        pargs = cl[0].atom.args
        for j in buckets[ck[0]]:
            targs = dl[j].atom.args
            if _match_args(pargs, targs, {}) is not None:
                return True
            if ck[0][2] == EQ and _match_args(pargs, (targs[1], targs[0]), {}) is not None:
                return True
        return False
    # per-position index so bound arguments narrow the candidate list
    index: dict = {}
    for j, l in enumerate(dl):
        if l.atom.kind != EQ and dk[j] in need:
            for pos, t in enumerate(l.atom.args):
                index.setdefault((dk[j], pos, t), []).append(j)
    used = [False] * len(dl)

    def pool(i: int, binding: dict):
        k = ck[i]
        best = buckets[k]
        if k[2] == EQ:
            return best
        for pos, a in enumerate(cl[i].atom.args):
            t = binding.get(a.name) if type(a) is Var else a if type(a) is Const else None
            if t is not None:
                js = index.get((k, pos, t), ())
                if len(js) < len(best):
                    best = js
                    if not js:
                        break
        return best

    def candidates(i: int, binding: dict) -> list:
        pargs = cl[i].atom.args
        eq = ck[i][2] == EQ
        out = []
        for j in pool(i, binding):
            if multiset and used[j]:
                continue
            targs = dl[j].atom.args
            b = _match_args(pargs, targs, binding)
            if b is not None:
                out.append((j, b))
            if eq:
                b = _match_args(pargs, (targs[1], targs[0]), binding)
                if b is not None:
                    out.append((j, b))
        return out

    # static order: start from the rarest literal, then follow shared variables
    lvars = [set(literal_vars(l)) for l in cl]
    sizes = [len(buckets[k]) for k in ck]
    remaining = list(range(len(cl)))
    order: list = []
    bound: set = set()
    while remaining:
        best, best_key = None, None
        for i in remaining:
            key = (len(lvars[i] & bound), not lvars[i] - bound, -sizes[i])
            if best_key is None or key > best_key:
                best, best_key = i, key
        remaining.remove(best)
        order.append(best)
        bound |= lvars[best]

    def go(pos: int, binding: dict) -> bool:
        if pos == len(order):
            return True
        for j, b in candidates(order[pos], binding):
            used[j] = True
            ok = go(pos + 1, b)
            used[j] = False
            if ok:
                return True
        return False

    return go(0, {})


def is_tautology(clause: Clause) -> bool:
    lits = clause.literals
    for l in lits:
        if l.kind == EQ and l.positive and l.args[0] == l.args[1]:
            return True
    seen = set()
    for l in lits:
        key = (l.atom, l.positive)
        if l.kind == EQ:
            a, b = l.args
            if (l.atom, not l.positive) in seen or (Atom(l.pred, (b, a), EQ), not l.positive) in seen:
                return True
        elif (l.atom, not l.positive) in seen:
            return True
        seen.add(key)
    return False


def _rigid(lits: tuple) -> bool:
    """Cheap sufficient test that every self-match of the clause is the
    identity, so no literal can be condensed away."""
    buckets: dict = {}
    for j, l in enumerate(lits):
        buckets.setdefault(_key(l), []).append(j)
    lvars = [set(literal_vars(l)) for l in lits]
    binding: dict = {}
    forced: set = set()
    queue = list(range(len(lits)))
    while queue:
        i = queue.pop()
        if i in forced:
            continue
        pat = lits[i]
        pargs = pat.atom.args
        hits = []
        for j in buckets[_key(pat)]:
            targs = lits[j].atom.args
            orients = (targs, targs[::-1]) if pat.kind == EQ and targs[0] != targs[1] else (targs,)
            for ta in orients:
                if _match_args(pargs, ta, binding) is not None:
                    hits.append((j, ta))
        if len(hits) != 1 or hits[0][0] != i or hits[0][1] != pargs:
            continue
        forced.add(i)
        fresh = lvars[i] - binding.keys()
        for v in fresh:
            binding[v] = Var(v)
        if fresh:
            queue.extend(k for k in range(len(lits)) if k not in forced and lvars[k] & fresh)
    return len(forced) == len(lits)


def condense(clause: Clause) -> Clause:
    """Smallest subclause found by leftmost-first removal that the original
    clause still subsumes (set semantics); equivalent to the input."""
    lits = clause.literals
    if _rigid(lits):
        return clause
    current = lits
    changed = True
    while changed:
        changed = False
        for k in range(len(current)):
            cand = current[:k] + current[k + 1 :]
            if subsumes(clause.literals, cand, multiset=False):
                current = cand
                changed = True
                break
    if current == clause.literals:
        return clause
    return canonical_variables(Clause(current, clause.id, clause.origin))


@dataclass(frozen=True)
class Redundancy:
    reason: str  # tautology | subsumed-by | subsumed-after-constraint-elim
    by_id: int | None = None

    def __str__(self) -> str:
        return self.reason if self.by_id is None else f"{self.reason}({self.by_id})"


def safe_elimination(clause: Clause) -> Clause | None:
    """Constraint-eliminated form of ``clause`` that is equivalent to it, if any."""
    block = maximal_constraint_block(clause)
    if not block:
        return None
    res = constraint_eliminate(clause, block)
    if res is None or not res[2]:
        return None
    return res[0]


def redundant_in(clause: Clause, n: ClauseSet | Iterable[Clause], exclude: Iterable[int] = ()) -> Redundancy | None:
    """Why ``clause`` is redundant in ``n`` (``None`` if it is not).

    Clauses with the same id as ``clause`` or listed in ``exclude`` are not
    used as subsumers.
    """
    if is_tautology(clause):
        return Redundancy("tautology")
    skip = set(exclude) | {clause.id}
    others = [d for d in n if d.id not in skip]
    for d in others:
        if subsumes(d, clause):
            return Redundancy("subsumed-by", d.id)
    elim = safe_elimination(clause)
    if elim is not None:
        if is_tautology(elim):
            return Redundancy("subsumed-after-constraint-elim", None)
        for d in others:
            if subsumes(d, elim):
                return Redundancy("subsumed-after-constraint-elim", d.id)
    return None


# ---------------------------------------------------------------------------
# Derivation steps


@dataclass(frozen=True)
class Res:
    p1: PointedClause
    p2: PointedClause
    result: Clause

    def __str__(self) -> str:
        return f"Res({self.p1.label()}, {self.p2.label()}) -> {self.result.id}: {self.result}"


@dataclass(frozen=True)
class Fac:
    premise: Clause
    i: int
    j: int
    result: Clause

    def __str__(self) -> str:
        return f"Fac({self.premise.id}; {self.i + 1}, {self.j + 1}) -> {self.result.id}: {self.result}"


@dataclass(frozen=True)
class ConstrElim:
    premise: Clause
    indices: tuple
    sigma: Substitution
    result: Clause

    def __str__(self) -> str:
        return f"ConstrElim({self.premise.id}, {self.sigma}) -> {self.result.id}: {self.result}"


@dataclass(frozen=True)
class RedElim:
    """Remove ``removed``.  With reason ``condensed-to`` the condensed
    ``replacement`` is added in the same step."""

    removed: Clause
    reason: str
    by_id: int | None = None
    replacement: Clause | None = None

    def __str__(self) -> str:
        if self.reason == "condensed-to":
            return f"RedElim({self.removed.id}, condensed-to {self.replacement.id}: {self.replacement})"
        by = "" if self.by_id is None else f" by {self.by_id}"
        return f"RedElim({self.removed.id}, {self.reason}{by})"


@dataclass(frozen=True)
class ExtPurDel:
    pred: str
    positive: bool
    removed_ids: tuple

    def __str__(self) -> str:
        sign = "+" if self.positive else "-"
        return f"ExtPurDel[{self.pred}{sign}] removes {list(self.removed_ids)}"


@dataclass(frozen=True)
class PurDel:
    pointed: PointedClause

    def __str__(self) -> str:
        return f"PurDel({self.pointed.label()}: {self.pointed})"


DerivationStep = Res | Fac | ConstrElim | RedElim | ExtPurDel | PurDel
EQUIVALENCE_STEPS = (Res, Fac, ConstrElim, RedElim)


def step_kind(step) -> str:
    return type(step).__name__


def _require_member(n: ClauseSet, c: Clause, what: str):
    if c not in n:
        raise IllegalStep(f"{what} {c.id}: {c} is not in the clause set")


def _require_result(n: ClauseSet, result: Clause, expected: Clause):
    if result.id != n.next_id:
        raise IllegalStep(f"conclusion id {result.id} should be {n.next_id}")
    if result.literals != expected.literals:
        raise IllegalStep(f"recorded conclusion {result} differs from computed {expected}")


def resolution_partners(n: ClauseSet, p: PointedClause) -> Iterator[PointedClause]:
    """Pointed clauses of ``n`` (other than ``p``) whose designated literal
    is complementary to that of ``p``."""
    lit = p.literal
    for q in n:
        if q.id == p.clause.id:
            continue
        for j, l in enumerate(q.literals):
            if l.is_pvar and l.pred == lit.pred and l.positive != lit.positive:
                yield PointedClause(q, j)


def purification_blockers(n: ClauseSet, p: PointedClause) -> list[tuple[PointedClause, Clause]]:
    """Resolvents of ``p`` with ``n∖{p}`` that are not redundant in ``n∖{p}``."""
    rest = n.without(p.clause.id)
    out = []
    for q in resolution_partners(rest, p):
        r = resolvent(p, q)
        if redundant_in(r, rest) is None:
            out.append((q, r))
    return out


def extended_purity_holds(n: ClauseSet, pred: str, positive: bool) -> bool:
    """Every clause containing ``pred`` contains it with the given polarity."""
    for c in n:
        lits = [l for l in c.literals if l.is_pvar and l.pred == pred]
        if lits and not any(l.positive == positive for l in lits):
            return False
    return True


def apply_step(n: ClauseSet, step) -> ClauseSet:
    """Successor of ``n`` under ``step``; raises :class:`IllegalStep`."""
    if isinstance(step, Res):
        _require_member(n, step.p1.clause, "premise")
        _require_member(n, step.p2.clause, "premise")
        for p in (step.p1, step.p2):
            if not n.is_pvar_literal(p.literal):
                raise IllegalStep(f"{p.literal} is not a literal of an eliminated predicate variable")
        expected = resolvent(step.p1, step.p2)
        _require_result(n, step.result, expected)
        return n.add(expected.literals, ("resolvent", step.p1.label(), step.p2.label()))[0]

    if isinstance(step, Fac):
        _require_member(n, step.premise, "premise")
        if not factorable(step.premise, step.i, step.j) or not n.is_pvar_literal(step.premise.literals[step.i]):
            raise IllegalStep(f"literals {step.i}, {step.j} of {step.premise} are not factorable")
        expected = factor(step.premise, step.i, step.j)
        _require_result(n, step.result, expected)
        return n.add(expected.literals, ("factor", step.premise.id))[0]

    if isinstance(step, ConstrElim):
        _require_member(n, step.premise, "premise")
        res = constraint_eliminate(step.premise, step.indices)
        if res is None:
            raise IllegalStep(f"constraints of {step.premise} are not unifiable")
        expected, sigma, _ = res
        if sigma != step.sigma:
            raise IllegalStep(f"recorded unifier {step.sigma} differs from {sigma}")
        _require_result(n, step.result, expected)
        return n.add(expected.literals, ("constraint-elim", step.premise.id, repr(sigma)))[0]

    if isinstance(step, RedElim):
        c = step.removed
        _require_member(n, c, "removed clause")
        rest = n.without(c.id)
        if step.reason == "tautology":
            if not is_tautology(c):
                raise IllegalStep(f"{c} is not a tautology")
        elif step.reason == "subsumed-by":
            if step.by_id == c.id or step.by_id not in rest or not subsumes(rest.get(step.by_id), c):
                raise IllegalStep(f"{c} is not subsumed by clause {step.by_id}")
        elif step.reason == "subsumed-after-constraint-elim":
            elim = safe_elimination(c)
            if elim is None:
                raise IllegalStep(f"{c} has no equivalence-preserving constraint elimination")
            if step.by_id is None:
                if not is_tautology(elim):
                    raise IllegalStep(f"eliminated form {elim} is not a tautology")
            elif step.by_id not in rest or not subsumes(rest.get(step.by_id), elim):
                raise IllegalStep(f"eliminated form {elim} of {c} is not subsumed by clause {step.by_id}")
        elif step.reason == "condensed-to":
            cond = condense(c)
            rep = step.replacement
            if rep is None or cond.literals == c.literals or rep.literals != cond.literals:
                raise IllegalStep(f"{c} does not condense to {rep}")
            if rep.id != n.next_id:
                raise IllegalStep(f"replacement id {rep.id} should be {n.next_id}")
            return rest.add(cond.literals, ("condensed", c.id))[0]
        else:
            raise IllegalStep(f"unknown redundancy reason {step.reason!r}")
        return rest

    if isinstance(step, ExtPurDel):
        if step.pred not in n.pvar_names:
            raise IllegalStep(f"{step.pred} is not an eliminated predicate variable")
        if not extended_purity_holds(n, step.pred, step.positive):
            sign = "+" if step.positive else "-"
            raise IllegalStep(f"some clause contains {step.pred} but not with polarity {sign}")
        removed = tuple(c.id for c in n if c.contains_pred(step.pred))
        if removed != tuple(step.removed_ids):
            raise IllegalStep(f"recorded removed ids {step.removed_ids} differ from {removed}")
        return n.remove(removed)

    if isinstance(step, PurDel):
        p = step.pointed
        _require_member(n, p.clause, "pointed clause")
        if not n.is_pvar_literal(p.literal):
            raise IllegalStep(f"{p} is not pointed at an eliminated predicate variable")
        blockers = purification_blockers(n, p)
        if blockers:
            q, r = blockers[0]
            raise IllegalStep(f"{p} is not purified: resolvent {r} with {q.label()} is not redundant")
        return n.without(p.clause.id)

    raise IllegalStep(f"unknown step {step!r}")


def replay(initial: ClauseSet, steps) -> list[ClauseSet]:
    out = [initial]
    for s in steps:
        out.append(apply_step(out[-1], s))
    return out
