"""Bounded finite-structure oracle.

Structures are enumerated exhaustively up to a domain size ``k``; equality is
always the identity.  Clause sets are evaluated through bit masks over all
interpretations of the predicate variables at once: bit ``a`` of a mask is
set when the clause set holds under the predicate-variable assignment encoded
by ``a``.  Second-order existentials then reduce to ``mask != 0``.

A verdict of ``verified-up-to(k)`` is a bounded check, not a proof.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .calculus import ClauseSet
from .logic import (
    EQ,
    PARAM,
    PVAR,
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
    Not,
    Or,
    PredicateExpression,
    Signature,
    Top,
    Truncated,
    Var,
    Witness,
    clause_set_formula,
    free_vars,
)

DEFAULT_CAP = 10**7
MAX_MASK_BITS = 20


class UninterpretedSymbol(KeyError):
    pass


class VerifierError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Structures


@dataclass(frozen=True)
class FiniteStructure:
    size: int
    constants: dict = field(default_factory=dict)  # name -> element
    functions: dict = field(default_factory=dict)  # name -> {args: element}
    predicates: dict = field(default_factory=dict)  # name -> frozenset of tuples

    def __hash__(self):
        return hash((self.size, tuple(sorted(self.constants.items()))))

    def describe(self) -> str:
        parts = [f"domain {{0..{self.size - 1}}}"]
        parts += [f"{c}={e}" for c, e in self.constants.items()]
        for f, table in self.functions.items():
            parts.append(f"{f}: " + ", ".join(f"{k}->{v}" for k, v in sorted(table.items())))
        for p, rel in self.predicates.items():
            parts.append(f"{p}={{{', '.join(_tuple_str(t) for t in sorted(rel))}}}")
        return "; ".join(parts)

    def __str__(self) -> str:
        return self.describe()


def _tuple_str(t: tuple) -> str:
    return str(t[0]) if len(t) == 1 else "(" + ",".join(map(str, t)) + ")"


@dataclass
class SymbolTable:
    """Symbols a structure must interpret; predicate variables are *not*
    included unless listed in ``predicates``."""

    constants: tuple = ()
    functions: tuple = ()  # ((name, arity), ...)
    predicates: tuple = ()  # ((name, arity), ...)

    @classmethod
    def from_signature(cls, sig: Signature, include_pvars: bool = False, include_params: bool = False,
                       extra_constants: Iterable[str] = ()) -> SymbolTable:
        consts = list(sig.constants)
        for c in extra_constants:
            if c not in consts:
                consts.append(c)
        preds = list(sig.base_predicates.items())
        if include_pvars:
            preds += list(sig.predicate_variables.items())
        if include_params:
            preds += list(sig.params.items())
        return cls(tuple(consts), tuple(sig.functions.items()), tuple(preds))

    def count(self, n: int) -> int:
        total = n ** len(self.constants)
        for _, ar in self.functions:
            total *= n ** (n**ar)
        for _, ar in self.predicates:
            total *= 2 ** (n**ar)
        return total


def enumerate_structures(symbols: SymbolTable, k: int, min_size: int = 1) -> Iterator[FiniteStructure]:
    """All structures of sizes ``min_size..k`` in the fixed order: size, then
    constants, then function tables, then predicate tables (lexicographic)."""
    for n in range(min_size, k + 1):
        yield from _structures_of_size(symbols, n)


def _structures_of_size(symbols: SymbolTable, n: int) -> Iterator[FiniteStructure]:
    dom = range(n)
    fn_domains = [list(itertools.product(dom, repeat=ar)) for _, ar in symbols.functions]
    pred_domains = [list(itertools.product(dom, repeat=ar)) for _, ar in symbols.predicates]
    const_choices = itertools.product(dom, repeat=len(symbols.constants))
    fn_spaces = [itertools.product(dom, repeat=len(d)) for d in fn_domains]
    for cvals in const_choices:
        consts = dict(zip(symbols.constants, cvals))
        for ftables in itertools.product(*[list(s) for s in fn_spaces]) if fn_spaces else [()]:
            funcs = {
                name: dict(zip(fn_domains[i], ftables[i])) for i, (name, _) in enumerate(symbols.functions)
            }
            for bits in itertools.product(*[range(2 ** len(d)) for d in pred_domains]):
                preds = {}
                for i, (name, _) in enumerate(symbols.predicates):
                    b = bits[i]
                    preds[name] = frozenset(t for j, t in enumerate(pred_domains[i]) if b >> j & 1)
                yield FiniteStructure(n, consts, funcs, preds)


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(t, m: FiniteStructure, env: dict) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UninterpretedSymbol(f"free variable {t.name}") from None
    if isinstance(t, Const):
        try:
            return m.constants[t.name]
        except KeyError:
            raise UninterpretedSymbol(f"constant {t.name}") from None
    try:
        table = m.functions[t.fn]
    except KeyError:
        raise UninterpretedSymbol(f"function {t.fn}") from None
    return table[tuple(eval_term(a, m, env) for a in t.args)]


def _relation(name: str, m: FiniteStructure, rels: dict):
    if name in rels:
        return rels[name]
    try:
        return m.predicates[name]
    except KeyError:
        raise UninterpretedSymbol(f"predicate {name}") from None


def eval_formula(phi, m: FiniteStructure, env: dict | None = None, rels: dict | None = None) -> bool:
    """Tarskian truth of ``phi``; ``rels`` interprets predicate variables,
    overriding the structure."""
    env = env or {}
    rels = rels or {}
    if isinstance(phi, Atom):
        args = tuple(eval_term(a, m, env) for a in phi.args)
        if phi.kind == EQ:
            return args[0] == args[1]
        return args in _relation(phi.pred, m, rels)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not eval_formula(phi.body, m, env, rels)
    if isinstance(phi, And):
        return all(eval_formula(a, m, env, rels) for a in phi.args)
    if isinstance(phi, Or):
        return any(eval_formula(a, m, env, rels) for a in phi.args)
    if isinstance(phi, Implies):
        return not eval_formula(phi.lhs, m, env, rels) or eval_formula(phi.rhs, m, env, rels)
    if isinstance(phi, Iff):
        return eval_formula(phi.lhs, m, env, rels) == eval_formula(phi.rhs, m, env, rels)
    if isinstance(phi, (Forall, Exists)):
        test = all if isinstance(phi, Forall) else any
        return test(eval_formula(phi.body, m, {**env, phi.var: e}, rels) for e in range(m.size))
    if isinstance(phi, (Forall2, Exists2)):
        test = all if isinstance(phi, Forall2) else any
        tuples = list(itertools.product(range(m.size), repeat=phi.arity))
        return test(
            eval_formula(phi.body, m, env, {**rels, phi.pred: frozenset(t for j, t in enumerate(tuples) if b >> j & 1)})
            for b in range(2 ** len(tuples))
        )
    if isinstance(phi, Truncated):
        raise VerifierError("cannot evaluate a truncated (infinite) expression")
    raise TypeError(f"not a formula: {phi!r}")


def evaluate(x, m: FiniteStructure, env: dict | None = None, rels: dict | None = None) -> bool:
    """Evaluate a formula, a clause (universally closed) or a clause set."""
    if isinstance(x, ClauseSet):
        x = clause_set_formula(x.clauses)
    elif isinstance(x, Clause):
        x = clause_set_formula([x])
    elif isinstance(x, (list, tuple)) and all(isinstance(c, Clause) for c in x):
        x = clause_set_formula(x)
    return eval_formula(x, m, env, rels)


def extension(expr: PredicateExpression, m: FiniteStructure, rels: dict | None = None) -> frozenset:
    """The relation defined by ``expr`` in ``m``."""
    return frozenset(
        t
        for t in itertools.product(range(m.size), repeat=expr.arity)
        if eval_formula(expr.body, m, dict(zip(expr.params, t)), rels)
    )


# ---------------------------------------------------------------------------
# Bit masks over predicate-variable assignments


class _Layout:
    """Bit positions of the ground predicate-variable atoms over one domain."""

    def __init__(self, pvars: tuple, n: int):
        self.pvars = pvars
        self.n = n
        self.offset = {}
        self.tuples = {}
        k = 0
        for name, ar in pvars:
            self.offset[name] = k
            self.tuples[name] = list(itertools.product(range(n), repeat=ar))
            k += n**ar
        if k > MAX_MASK_BITS:
            raise VerifierError(f"{k} ground predicate-variable atoms exceed the bit-mask limit {MAX_MASK_BITS}")
        self.bits = k
        self.full = (1 << (1 << k)) - 1
        self.columns = [_column(j, k) for j in range(k)]

    def index(self, name: str, args: tuple) -> int:
        i = 0
        for a in args:
            i = i * self.n + a
        return self.offset[name] + i

    def assignment_of(self, rels: dict) -> int:
        a = 0
        for name, _ in self.pvars:
            for t in rels[name]:
                a |= 1 << self.index(name, t)
        return a

    def relations_of(self, a: int) -> dict:
        return {
            name: frozenset(t for t in self.tuples[name] if a >> self.index(name, t) & 1) for name, _ in self.pvars
        }


_COLUMNS: dict = {}


def _column(j: int, k: int) -> int:
    """Mask of the assignments (out of ``2**k``) in which atom ``j`` is true."""
    key = (j, k)
    if key not in _COLUMNS:
        half = 1 << j
        r = ((1 << half) - 1) << half
        length = half << 1
        total = 1 << k
        while length < total:
            r |= r << length
            length <<= 1
        _COLUMNS[key] = r
    return _COLUMNS[key]


def _compile_term(t, index: dict):
    if isinstance(t, Var):
        i = index[t.name]
        return lambda m, asg: asg[i]
    if isinstance(t, Const):
        name = t.name
        return lambda m, asg: m.constants[name]
    fn = t.fn
    subs = [_compile_term(a, index) for a in t.args]
    return lambda m, asg: m.functions[fn][tuple(s(m, asg) for s in subs)]


class _CompiledClause:
    def __init__(self, clause: Clause, pvar_names: set):
        self.clause = clause
        self.vars = clause.variables()
        index = {v: i for i, v in enumerate(self.vars)}
        self.lits = []
        for l in clause.literals:
            args = [_compile_term(a, index) for a in l.atom.args]
            if l.atom.kind == EQ:
                kind = 0
            elif l.atom.pred in pvar_names:
                kind = 2
            else:
                kind = 1
            self.lits.append((kind, l.atom.pred, args, l.positive))

    def mask(self, m: FiniteStructure, layout: _Layout, rels: dict) -> int:
        full = layout.full
        cols = layout.columns
        acc = full
        for asg in itertools.product(range(m.size), repeat=len(self.vars)):
            inst = 0
            for kind, pred, args, pos in self.lits:
                vals = tuple(a(m, asg) for a in args)
                if kind == 2:
                    c = cols[layout.index(pred, vals)]
                    inst |= c if pos else full ^ c
                    continue
                if kind == 0:
                    truth = vals[0] == vals[1]
                else:
                    rel = rels[pred] if pred in rels else m.predicates[pred]
                    truth = vals in rel
                if truth == pos:
                    inst = full
                    break
            acc &= inst
            if not acc:
                break
        return acc


class _MaskEvaluator:
    """Masks of clauses in one structure, cached by clause identity."""

    def __init__(self, pvars: tuple):
        self.pvars = pvars
        self.names = {n for n, _ in pvars}
        self.compiled: dict = {}
        self.layouts: dict = {}

    def layout(self, n: int) -> _Layout:
        if n not in self.layouts:
            self.layouts[n] = _Layout(self.pvars, n)
        return self.layouts[n]

    def compile(self, c: Clause) -> _CompiledClause:
        key = (c.id, c.literals)
        cc = self.compiled.get(key)
        if cc is None:
            cc = self.compiled[key] = _CompiledClause(c, self.names)
        return cc

    def set_mask(self, clauses: Iterable[Clause], m: FiniteStructure, cache: dict | None = None, rels=None) -> int:
        layout = self.layout(m.size)
        acc = layout.full
        rels = rels or {}
        for c in clauses:
            key = (c.id, c.literals)
            if cache is not None and key in cache:
                cm = cache[key]
            else:
                cm = self.compile(c).mask(m, layout, rels)
                if cache is not None:
                    cache[key] = cm
            acc &= cm
            if not acc and cache is None:
                break
        return acc


# ---------------------------------------------------------------------------
# Reports


@dataclass
class CheckReport:
    verdict: str  # "verified" | "counterexample"
    k: int
    structures_checked: int = 0
    elapsed: float = 0.0
    capped: bool = False
    complete_up_to: int = 0  # largest domain size checked exhaustively
    counterexample: dict | None = None
    what: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == "verified"

    def label(self) -> str:
        if self.ok:
            return f"verified-up-to({self.complete_up_to})"
        return f"counterexample(size {self.counterexample['structure'].size})"

    def __str__(self) -> str:
        head = self.label()
        tail = f" [{self.structures_checked} structures, {self.elapsed:.3f}s"
        if self.capped:
            tail += f", capped below size {self.complete_up_to + 1}"
        tail += "]"
        if self.counterexample:
            ce = self.counterexample
            tail += f"\n  structure: {ce['structure']}\n  {ce['reason']}"
        return head + tail

    def to_json(self) -> dict:
        out = {
            "verdict": self.label(),
            "ok": self.ok,
            "k": self.k,
            "structures_checked": self.structures_checked,
            "elapsed": round(self.elapsed, 6),
            "capped": self.capped,
            "bounded": True,
        }
        if self.counterexample:
            ce = self.counterexample
            out["counterexample"] = {"structure": ce["structure"].describe(), "reason": ce["reason"]}
        return out


class _Run:
    """Shared bookkeeping for the structure loops."""

    def __init__(self, symbols: SymbolTable, k: int, cap: int, what: str):
        self.symbols, self.k, self.cap, self.what = symbols, k, cap, what
        self.t0 = time.perf_counter()
        self.checked = 0
        self.capped = False
        self.complete = 0

    def structures(self) -> Iterator[FiniteStructure]:
        for n in range(1, self.k + 1):
            if self.checked + self.symbols.count(n) > self.cap:
                self.capped = True
                return
            yield from _structures_of_size(self.symbols, n)
            self.complete = n

    def report(self, m: FiniteStructure | None = None, reason: str = "", **extra) -> CheckReport:
        elapsed = time.perf_counter() - self.t0
        if m is None:
            return CheckReport("verified", self.k, self.checked, elapsed, self.capped, self.complete, None, self.what)
        ce = {"structure": m, "reason": reason, **extra}
        return CheckReport("counterexample", self.k, self.checked, elapsed, self.capped, self.complete, ce, self.what)


# ---------------------------------------------------------------------------
# Checks


def _symbols_for(clause_lists: Iterable, formulas: Iterable = (), pvars: tuple = (), extra_constants=(),
                 include_params: bool = False) -> SymbolTable:
    sig = Signature.of(pvars=pvars)
    for cl in clause_lists:
        for c in cl:
            sig.add_clause(c)
    for phi in formulas:
        sig.add_formula(phi)
    return SymbolTable.from_signature(sig, include_params=include_params, extra_constants=extra_constants)


def _prepare_witness(witness: Witness, params: str):
    from .witness import instantiate_params

    if witness.truncated:
        raise VerifierError("witness is truncated (not first-order); it cannot be checked")
    if params in ("top", "bottom"):
        witness = instantiate_params(witness, params)
    elif params != "keep":
        raise ValueError(f"unknown parameter mode {params!r}")
    return witness


def check_wsoqe(n: ClauseSet, witness: Witness, k: int = 3, params: str = "top", cap: int = DEFAULT_CAP,
                extra_constants: Iterable[str] = ()) -> CheckReport:
    """Check ``∃X̄ N ⟺ N[X̄←ᾱ]`` in every structure of size at most ``k``.

    With ``params='keep'`` witness parameters are interpreted like base
    predicates, so every instantiation is checked at once.
    """
    pvars = tuple(n.pvars)
    witness = _prepare_witness(witness, params)
    if tuple(witness.variables) != pvars:
        raise VerifierError(f"witness is for {witness.variables}, clause set eliminates {pvars}")
    names = {x for x, _ in pvars}
    for (x, _), c in zip(witness.variables, witness.components):
        if _mentions(c.body, names):
            raise VerifierError(f"witness component for {x} mentions a predicate variable")
    bodies = [c.body for c in witness.components]
    symbols = _symbols_for([n.clauses], bodies, pvars, extra_constants, include_params=True)
    ev = _MaskEvaluator(pvars)
    run = _Run(symbols, k, cap, "wsoqe")
    for m in run.structures():
        run.checked += 1
        layout = ev.layout(m.size)
        mask = ev.set_mask(n.clauses, m)
        rels = {x: extension(c, m) for (x, _), c in zip(witness.variables, witness.components)}
        a = layout.assignment_of(rels)
        lhs = mask != 0
        rhs = bool(mask >> a & 1)
        if lhs != rhs:
            if lhs:
                sat = layout.relations_of((mask & -mask).bit_length() - 1)
                reason = f"∃X̄ N holds (e.g. {_rels_str(sat)}) but N[X̄←ᾱ] fails with {_rels_str(rels)}"
            else:
                reason = "N[X̄←ᾱ] holds but ∃X̄ N fails"
            return run.report(m, reason, lhs=lhs, rhs=rhs, witness_relations=rels)
    return run.report()


def _rels_str(rels: dict) -> str:
    return ", ".join(f"{x}={{{', '.join(_tuple_str(t) for t in sorted(r))}}}" for x, r in rels.items())


def _mentions(phi, names: set) -> bool:
    if isinstance(phi, Atom):
        return phi.kind == PVAR and phi.pred in names
    if isinstance(phi, Not):
        return _mentions(phi.body, names)
    if isinstance(phi, (And, Or)):
        return any(_mentions(a, names) for a in phi.args)
    if isinstance(phi, (Implies, Iff)):
        return _mentions(phi.lhs, names) or _mentions(phi.rhs, names)
    if isinstance(phi, (Forall, Exists, Forall2, Exists2)):
        return _mentions(phi.body, names)
    return False


def check_step(n: ClauseSet, n2: ClauseSet, k: int = 2, mode: str = "both", cap: int = DEFAULT_CAP) -> CheckReport:
    """``mode='soundness'``: ``N ⊨ N′`` with the predicate variables free;
    ``'equivalence'``: ``∃X̄ N ⟺ ∃X̄ N′``; ``'both'``: both."""
    if mode not in ("both", "soundness", "equivalence"):
        raise ValueError(f"unknown mode {mode!r}")
    pvars = tuple(n.pvars) or tuple(n2.pvars)
    symbols = _symbols_for([n.clauses, n2.clauses], (), pvars)
    ev = _MaskEvaluator(pvars)
    run = _Run(symbols, k, cap, f"step/{mode}")
    for m in run.structures():
        run.checked += 1
        m1 = ev.set_mask(n.clauses, m, {})
        m2 = ev.set_mask(n2.clauses, m, {})
        bad = _step_failure(m1, m2, mode, ev.layout(m.size))
        if bad:
            return run.report(m, bad)
    return run.report()


def _step_failure(m1: int, m2: int, mode: str, layout: _Layout) -> str | None:
    if mode in ("both", "soundness") and m1 & ~m2:
        a = (m1 & ~m2 & -(m1 & ~m2)).bit_length() - 1
        return f"N holds but N′ fails with {_rels_str(layout.relations_of(a))}"
    if mode in ("both", "equivalence") and (m1 != 0) != (m2 != 0):
        return f"∃X̄ N is {m1 != 0} but ∃X̄ N′ is {m2 != 0}"
    return None


def check_derivation(d, k: int = 2, mode: str = "both", cap: int = DEFAULT_CAP) -> CheckReport:
    """:func:`check_step` for every step of ``d`` in one pass over the structures."""
    states = d.intermediates
    pvars = tuple(d.initial.pvars)
    symbols = _symbols_for([s.clauses for s in states], (), pvars)
    ev = _MaskEvaluator(pvars)
    run = _Run(symbols, k, cap, f"derivation/{mode}")
    for m in run.structures():
        run.checked += 1
        cache: dict = {}
        masks = [ev.set_mask(s.clauses, m, cache) for s in states]
        layout = ev.layout(m.size)
        for i in range(len(states) - 1):
            bad = _step_failure(masks[i], masks[i + 1], mode, layout)
            if bad:
                return run.report(m, f"step {i + 1} ({d.steps[i]}): {bad}", step=i)
    return run.report()


def check_valid(phi, k: int = 3, cap: int = DEFAULT_CAP, extra_constants: Iterable[str] = ()) -> CheckReport:
    """Truth of a closed formula (or clause set) in all structures up to ``k``;
    predicate variables and parameters are interpreted like base predicates."""
    if isinstance(phi, ClauseSet):
        phi = clause_set_formula(phi.clauses)
    sig = Signature.of(formulas=[phi])
    symbols = SymbolTable.from_signature(sig, include_pvars=True, include_params=True, extra_constants=extra_constants)
    run = _Run(symbols, k, cap, "valid")
    for m in run.structures():
        run.checked += 1
        if not eval_formula(phi, m):
            return run.report(m, "formula is false")
    return run.report()


def check_equivalent(a, b, k: int = 3, cap: int = DEFAULT_CAP, extra_constants: Iterable[str] = ()) -> CheckReport:
    """Oracle equivalence of two closed formulas or clause sets, of two
    predicate expressions (same extension) or of two witnesses (componentwise)."""
    if isinstance(a, PredicateExpression):
        return equivalent_predicates(a, b, k, cap, extra_constants)
    if isinstance(a, Witness):
        return equivalent_witnesses(a, b, k, cap, extra_constants)
    fa, fb = _as_formula(a), _as_formula(b)
    if free_vars(fa) or free_vars(fb):
        raise VerifierError("formulas to compare must be closed")
    sig = Signature.of(formulas=[fa, fb])
    symbols = SymbolTable.from_signature(sig, include_pvars=True, include_params=True, extra_constants=extra_constants)
    run = _Run(symbols, k, cap, "equivalent")
    for m in run.structures():
        run.checked += 1
        if eval_formula(fa, m) != eval_formula(fb, m):
            return run.report(m, "the two sides differ")
    return run.report()


def _as_formula(x):
    if isinstance(x, ClauseSet):
        return clause_set_formula(x.clauses)
    if isinstance(x, (list, tuple)) and all(isinstance(c, Clause) for c in x):
        return clause_set_formula(x)
    return x


def equivalent_predicates(a: PredicateExpression, b: PredicateExpression, k: int = 3, cap: int = DEFAULT_CAP,
                          extra_constants: Iterable[str] = ()) -> CheckReport:
    if a.arity != b.arity:
        raise VerifierError("predicate expressions of different arity")
    sig = Signature.of(formulas=[a.body, b.body])
    symbols = SymbolTable.from_signature(sig, include_pvars=True, include_params=True, extra_constants=extra_constants)
    run = _Run(symbols, k, cap, "equivalent")
    for m in run.structures():
        run.checked += 1
        if extension(a, m) != extension(b, m):
            return run.report(m, "the two predicates define different relations")
    return run.report()


def equivalent_witnesses(a: Witness, b: Witness, k: int = 3, cap: int = DEFAULT_CAP,
                         extra_constants: Iterable[str] = ()) -> CheckReport:
    if len(a.components) != len(b.components):
        raise VerifierError("witnesses of different length")
    sig = Signature.of(formulas=[c.body for c in a.components + b.components])
    symbols = SymbolTable.from_signature(sig, include_pvars=True, include_params=True, extra_constants=extra_constants)
    run = _Run(symbols, k, cap, "equivalent")
    for m in run.structures():
        run.checked += 1
        for x, y in zip(a.components, b.components):
            if extension(x, m) != extension(y, m):
                return run.report(m, "components define different relations")
    return run.report()


# ---------------------------------------------------------------------------
# Formula equations


@dataclass
class FeqReport:
    verdict: str  # feq-solution | feq-by-sufficient-condition | countermodel | unknown-up-to(k)
    detail: str = ""
    check: CheckReport | None = None

    def __str__(self) -> str:
        return self.verdict + (f": {self.detail}" if self.detail else "")


def feq_check(n: ClauseSet, d=None, witness: Witness | None = None, k: int = 3, params: str = "top",
              cap: int = DEFAULT_CAP) -> FeqReport:
    """Is ``N[X̄←ᾱ]`` valid?

    The sufficient condition: ``d`` is a one-sided derivation ending in the
    empty clause set and ``ᾱ`` is its own witness.  Otherwise a bounded
    countermodel search runs, which can refute but never confirm.
    """
    from .witness import extract_witness, instantiate_params, one_sided

    if not n.clauses:
        return FeqReport("feq-solution", "the clause set is empty")
    own = None
    if d is not None and d.eliminating:
        own = instantiate_params(extract_witness(d).final, params)
        if witness is None:
            witness = own
    if witness is None:
        raise ValueError("no witness and no derivation given")
    witness = _prepare_witness(witness, params)
    rep = _countermodel(n, witness, k, cap)
    if not rep.ok:
        return FeqReport("countermodel", rep.counterexample["reason"], rep)
    if (
        d is not None
        and not d.conclusion.clauses
        and all(one_sided(p) for p in d.purified())
        and own is not None
        and own == witness
    ):
        return FeqReport("feq-by-sufficient-condition", "one-sided derivation concludes with the empty set", rep)
    return FeqReport(f"unknown-up-to({rep.complete_up_to})", "no countermodel found; validity is not decided", rep)


def _countermodel(n: ClauseSet, witness: Witness, k: int, cap: int) -> CheckReport:
    from .logic import substitute_witness

    phi = substitute_witness(clause_set_formula(n.clauses), witness)
    sig = Signature.of(formulas=[phi])
    symbols = SymbolTable.from_signature(sig, include_params=True)
    run = _Run(symbols, k, cap, "feq")
    for m in run.structures():
        run.checked += 1
        if not eval_formula(phi, m):
            return run.report(m, "N[X̄←ᾱ] is false")
    return run.report()
