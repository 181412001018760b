"""Purification loop producing recorded derivations, with backtracking.

The search is a depth-first walk over choice points.  At each node the
options are: an applicable extended purity deletion, or purifying one
pointed clause.  Purifying a fixed pointed clause is deterministic, so a
derivation is identified by its sequence of choices.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Iterator

from .calculus import (
    ClauseSet,
    ConstrElim,
    ExtPurDel,
    Fac,
    PurDel,
    RedElim,
    Res,
    apply_step,
    condense,
    constraint_eliminate,
    factor,
    factorable,
    is_tautology,
    maximal_constraint_block,
    purification_blockers,
    redundant_in,
    resolution_partners,
    resolvent,
    subsumes,
)
from .logic import Clause, PointedClause, mgu

SELECTIONS = ("prefer-one-sided", "fewest-X-literals", "prefer-unit", "input-order")
PURITY_MODES = ("occurrence", "clause")


class LimitExceeded(Exception):
    pass


@dataclass(frozen=True)
class SaturationConfig:
    max_steps: int = 400
    max_purification_resolvents: int = 24
    one_sided_only: bool = False
    selection: str = "prefer-one-sided"
    enumerate_limit: int = 16
    max_search_nodes: int = 300
    extended_purity: str = "occurrence"
    factoring: bool = True

    def __post_init__(self):
        for name in ("max_steps", "max_purification_resolvents", "enumerate_limit", "max_search_nodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.selection not in SELECTIONS:
            raise ValueError(f"unknown selection {self.selection!r}; choose from {SELECTIONS}")
        if self.extended_purity not in PURITY_MODES:
            raise ValueError(f"unknown extended purity mode {self.extended_purity!r}")


@dataclass
class Derivation:
    initial: ClauseSet
    steps: list = field(default_factory=list)
    intermediates: list = field(default_factory=list)

    def __post_init__(self):
        if not self.intermediates:
            from .calculus import replay

            self.intermediates = replay(self.initial, self.steps)

    @property
    def conclusion(self) -> ClauseSet:
        return self.intermediates[-1]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def eliminating(self) -> bool:
        return not self.conclusion.contains_pvars()

    def purified(self) -> list[PointedClause]:
        return [s.pointed for s in self.steps if isinstance(s, PurDel)]

    def choice_signature(self) -> tuple:
        """The PurDel/ExtPurDel skeleton, which identifies the derivation's choices."""
        out = []
        for s in self.steps:
            if isinstance(s, PurDel):
                out.append(("PurDel", s.pointed.label()))
            elif isinstance(s, ExtPurDel):
                out.append(("ExtPurDel", s.pred, s.positive))
        return tuple(out)

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.steps) or "(no steps)"


@dataclass
class Failure:
    reason: str  # limit | stuck
    detail: str = ""
    state: ClauseSet | None = None

    def __bool__(self) -> bool:
        return False


# ---------------------------------------------------------------------------
# Simplification engine


class Engine:
    """Applies steps through the validator and records them."""

    def __init__(self, n: ClauseSet, protected: int | None = None, factoring: bool = True, max_steps: int | None = None):
        self.n = n
        self.steps: list = []
        self.states: list = []
        self.protected = protected
        self.factoring = factoring
        self.max_steps = max_steps

    def apply(self, step):
        self.n = apply_step(self.n, step)
        self.steps.append(step)
        self.states.append(self.n)
        if self.max_steps is not None and len(self.steps) > self.max_steps:
            raise LimitExceeded(f"more than {self.max_steps} derivation steps")

    def integrate(self, cid: int) -> int | None:
        """Simplify freshly added clause ``cid``; returns the id of the
        surviving (possibly replaced) clause or ``None``."""
        c = self.n.get(cid)
        block = maximal_constraint_block(c)
        if block:
            out, sigma, safe = constraint_eliminate(c, block)
            new_id = self.n.next_id
            self.apply(ConstrElim(c, block, sigma, Clause(out.literals, new_id)))
            if safe:
                self.apply(RedElim(c, "subsumed-after-constraint-elim", new_id))
            c = self.n.get(new_id)
        if is_tautology(c):
            self.apply(RedElim(c, "tautology"))
            return None
        cc = condense(c)
        if cc.literals != c.literals:
            new_id = self.n.next_id
            self.apply(RedElim(c, "condensed-to", None, Clause(cc.literals, new_id)))
            c = self.n.get(new_id)
        for d in self.n:
            if d.id not in (c.id, self.protected) and subsumes(d, c):
                self.apply(RedElim(c, "subsumed-by", d.id))
                return None
        for d in list(self.n):
            if d.id not in (c.id, self.protected) and d.id in self.n and subsumes(c, d):
                self.apply(RedElim(self.n.get(d.id), "subsumed-by", c.id))
        if self.factoring:
            self._factors(c)
        return c.id if c.id in self.n else None

    def _factors(self, c: Clause):
        exclude = () if self.protected is None else (self.protected,)
        lits = c.literals
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                if c.id not in self.n:
                    return
                if not (factorable(c, i, j) and self.n.is_pvar_literal(lits[i])):
                    continue
                if mgu(lits[i].args, lits[j].args) is None:
                    continue
                f = factor(c, i, j)
                if redundant_in(f, self.n, exclude) is not None:
                    continue
                new_id = self.n.next_id
                self.apply(Fac(c, i, j, Clause(f.literals, new_id)))
                self.integrate(new_id)


def simplify_input(n: ClauseSet, factoring: bool = True) -> Engine:
    eng = Engine(n, factoring=factoring)
    for cid in list(n.ids):
        if cid in eng.n:
            eng.integrate(cid)
    return eng


def purify(n: ClauseSet, p: PointedClause, cfg: SaturationConfig = SaturationConfig(), budget: int | None = None) -> Engine:
    """Add non-redundant resolvents of ``p`` until it is purified, then delete it.

    Raises :class:`LimitExceeded` once more than
    ``cfg.max_purification_resolvents`` resolvents have been added.
    """
    if p.clause not in n:
        raise ValueError(f"{p} is not in the clause set")
    if not n.is_pvar_literal(p.literal):
        raise ValueError(f"{p} is not pointed at an eliminated predicate variable")
    eng = Engine(n, protected=p.clause.id, factoring=cfg.factoring, max_steps=budget)
    added = 0
    done: set = set()
    while True:
        progress = False
        for q in list(resolution_partners(eng.n, p)):
            if q.clause not in eng.n or (q.clause.id, q.index) in done:
                continue
            done.add((q.clause.id, q.index))
            r = resolvent(p, q)
            if redundant_in(r, eng.n.without(p.clause.id)) is not None:
                continue
            added += 1
            if added > cfg.max_purification_resolvents:
                raise LimitExceeded(f"purification of {p} needs more than {cfg.max_purification_resolvents} resolvents")
            new_id = eng.n.next_id
            eng.apply(Res(p, q, Clause(r.literals, new_id)))
            eng.integrate(new_id)
            progress = True
        if not progress:
            break
    eng.apply(PurDel(p))
    return eng


# ---------------------------------------------------------------------------
# Selection


def detect_extended_purity(n: ClauseSet, pred: str, mode: str = "occurrence") -> str | None:
    """``'+'``/``'-'`` when extended purity deletion applies to ``pred``.

    ``occurrence`` mode requires every occurrence to have that polarity;
    ``clause`` mode only requires every clause mentioning ``pred`` to
    contain one occurrence of that polarity.
    """
    occ = n.occurrences(pred)
    if not occ:
        return None
    if mode == "occurrence":
        pols = {pos for _, _, pos in occ}
        if pols == {True}:
            return "+"
        if pols == {False}:
            return "-"
        return None
    from .calculus import extended_purity_holds

    if extended_purity_holds(n, pred, True):
        return "+"
    if extended_purity_holds(n, pred, False):
        return "-"
    return None


def one_sided(p: PointedClause) -> bool:
    pred = p.literal.pred
    pols = {l.positive for l in p.clause.literals if l.is_pvar and l.pred == pred}
    return len(pols) == 1


def pointed_candidates(n: ClauseSet) -> list[PointedClause]:
    return [PointedClause(c, i) for c in n for i, l in enumerate(c.literals) if n.is_pvar_literal(l)]


def _x_count(p: PointedClause) -> int:
    return sum(1 for l in p.clause.literals if l.is_pvar)


def _collapse_safe(n: ClauseSet, p: PointedClause) -> bool:
    rest = n.without(p.clause.id)
    pols = {pos for _, _, pos in rest.occurrences(p.pred)}
    return pols <= {p.literal.positive} and not purification_blockers(n, p)


def _seed() -> str | None:
    return os.environ.get("WSCAN_SEED")


def ranked_options(n: ClauseSet, cfg: SaturationConfig, depth: int = 0) -> list:
    """Choices at a search node, best first."""
    opts: list = []
    for name in n.pvar_names:
        pol = detect_extended_purity(n, name, cfg.extended_purity)
        if pol is not None:
            removed = tuple(c.id for c in n if c.contains_pred(name))
            opts.append(ExtPurDel(name, pol == "+", removed))
    cands = pointed_candidates(n)
    if cfg.one_sided_only:
        cands = [p for p in cands if one_sided(p)]
    key_x = lambda p: (_x_count(p), p.clause.id, p.index)
    if cfg.selection == "prefer-one-sided":
        safe = [p for p in cands if _collapse_safe(n, p)]
        safe_keys = {(p.clause.id, p.index) for p in safe}
        rest = [p for p in cands if (p.clause.id, p.index) not in safe_keys]
        groups = [
            sorted(safe, key=key_x),
            sorted((p for p in rest if one_sided(p)), key=key_x),
            sorted((p for p in rest if not one_sided(p)), key=key_x),
        ]
    elif cfg.selection == "fewest-X-literals":
        groups = [sorted(cands, key=key_x)]
    elif cfg.selection == "prefer-unit":
        groups = [sorted(cands, key=lambda p: (len(p.clause), p.clause.id, p.index))]
    else:
        groups = [sorted(cands, key=lambda p: (p.clause.id, p.index))]
    seed = _seed()
    if seed is not None:
        rng = random.Random(f"{seed}:{depth}:{len(n)}")
        for g in groups:
            rng.shuffle(g)
    for g in groups:
        opts.extend(g)
    return opts


# ---------------------------------------------------------------------------
# Search


@dataclass
class _Node:
    state: ClauseSet
    steps: list
    states: list
    options: Iterator | None = None


def _child(node: _Node, opt, cfg: SaturationConfig) -> _Node:
    budget = cfg.max_steps - len(node.steps)
    if isinstance(opt, ExtPurDel):
        eng = Engine(node.state, max_steps=budget)
        eng.apply(opt)
    else:
        eng = purify(node.state, opt, cfg, budget)
    return _Node(eng.n, node.steps + eng.steps, node.states + eng.states)


def _search(n0: ClauseSet, cfg: SaturationConfig, stats: dict, breadth_first: bool = False) -> Iterator[Derivation]:
    """Eliminating derivations from ``n0``.

    Depth-first finds one quickly; breadth-first orders results by the
    number of choices, which gives a more varied enumeration.
    """
    pre = simplify_input(n0, cfg.factoring)
    frontier = [_Node(pre.n, list(pre.steps), [n0] + list(pre.states))]
    nodes = 0
    while frontier:
        node = frontier[0] if breadth_first else frontier[-1]
        if node.options is None:
            if not node.state.contains_pvars():
                frontier.remove(node) if breadth_first else frontier.pop()
                yield Derivation(n0, node.steps, node.states)
                continue
            opts = [] if len(node.steps) >= cfg.max_steps else ranked_options(node.state, cfg, len(node.steps))
            if not opts:
                stats["limit" if len(node.steps) >= cfg.max_steps else "stuck"] += 1
                stats.setdefault("stuck_state", node.state)
                frontier.remove(node) if breadth_first else frontier.pop()
                continue
            node.options = iter(opts)
        opt = next(node.options, None)
        if opt is None:
            frontier.remove(node) if breadth_first else frontier.pop()
            continue
        nodes += 1
        if nodes > cfg.max_search_nodes:
            stats["limit"] += 1
            return
        try:
            child = _child(node, opt, cfg)
        except LimitExceeded:
            stats["limit"] += 1
            continue
        frontier.append(child)


def saturate(n: ClauseSet, cfg: SaturationConfig = SaturationConfig()) -> Derivation | Failure:
    """First eliminating derivation found (depth-first), or a :class:`Failure`."""
    stats = {"limit": 0, "stuck": 0}
    for d in _search(n, cfg, stats):
        return d
    if stats["limit"]:
        return Failure("limit", f"{stats['limit']} branch(es) hit a limit", stats.get("stuck_state"))
    return Failure("stuck", "no admissible pointed clause", stats.get("stuck_state"))


def enumerate_derivations(n: ClauseSet, cfg: SaturationConfig = SaturationConfig()) -> Iterator[Derivation]:
    """Distinct eliminating derivations, fewest choices first, at most
    ``cfg.enumerate_limit`` of them."""
    stats = {"limit": 0, "stuck": 0}
    seen = set()
    for d in _search(n, cfg, stats, breadth_first=True):
        key = tuple(str(s) for s in d.steps)
        if key in seen:
            continue
        seen.add(key)
        yield d
        if len(seen) >= cfg.enumerate_limit:
            return


def derivation_from_choices(n: ClauseSet, choices, cfg: SaturationConfig = SaturationConfig(), preprocess: bool = False) -> Derivation:
    """Build a derivation by purifying the given pointed clauses (given as
    ``(clause id, literal index)``) or applying ``('ext', pred)`` in order."""
    if preprocess:
        eng0 = simplify_input(n, cfg.factoring)
        state, steps, states = eng0.n, list(eng0.steps), [n] + list(eng0.states)
    else:
        state, steps, states = n, [], [n]
    for ch in choices:
        if ch[0] == "ext":
            pol = detect_extended_purity(state, ch[1], "clause")
            if pol is None:
                raise ValueError(f"extended purity deletion not applicable to {ch[1]}")
            removed = tuple(c.id for c in state if c.contains_pred(ch[1]))
            eng = Engine(state)
            eng.apply(ExtPurDel(ch[1], pol == "+", removed))
        else:
            cid, idx = ch
            eng = purify(state, PointedClause(state.get(cid), idx), cfg)
        state = eng.n
        steps += eng.steps
        states += eng.states
    return Derivation(n, steps, states)
