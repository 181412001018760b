import itertools

import pytest
from helpers import cs, example1
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import clause_sets

from wscan.calculus import ClauseSet
from wscan.logic import (
    Atom,
    Const,
    Exists2,
    Iff,
    Literal,
    Not,
    Or,
    PredicateExpression,
    Truncated,
    Var,
    Witness,
    clause_formula,
    clause_set_formula,
    eq_atom,
    substitute_witness,
    And,
    PVAR,
    Signature,
)
from wscan.parser import parse_predicate
from wscan.saturation import saturate
from wscan.verifier import (
    FiniteStructure,
    SymbolTable,
    UninterpretedSymbol,
    VerifierError,
    check_equivalent,
    check_step,
    check_valid,
    check_wsoqe,
    enumerate_structures,
    eval_formula,
    evaluate,
    feq_check,
)
from wscan.witness import extract_witness

a, c = Const("a"), Const("c")
u = Var("u")


def wit(text, name="X"):
    e = parse_predicate(text)
    return Witness(((name, e.arity),), (e,))


class TestEval:
    def test_examples(self):
        m = FiniteStructure(2, {"a": 0, "c": 0})
        assert not eval_formula(Not(eq_atom(a, c)), m)
        m2 = FiniteStructure(2, {"a": 0, "c": 1})
        phi = Exists2("X", 1, And((Atom("X", (a,), PVAR), Not(Atom("X", (c,), PVAR)))))
        assert eval_formula(phi, m2)
        assert not eval_formula(phi, m)
        full = frozenset(itertools.product(range(2), repeat=2))
        assert evaluate(cs("B(a,v)"), FiniteStructure(2, {"a": 0}, {}, {"B": full}))

    def test_uninterpreted(self):
        with pytest.raises(UninterpretedSymbol):
            eval_formula(Atom("B", (a,)), FiniteStructure(1, {"a": 0}))
        with pytest.raises(UninterpretedSymbol):
            eval_formula(Atom("B", (u,)), FiniteStructure(1, {}, {}, {"B": frozenset()}))

    def test_truncated_rejected(self):
        with pytest.raises(VerifierError):
            eval_formula(Truncated(""), FiniteStructure(1))

    @given(st.integers(1, 2), st.integers(1, 2), st.integers(0, 2**8 - 1))
    def test_second_order_matches_disjunction(self, size, arity, bbits):
        # ∃X (B-related body) against an explicit disjunction over all tables
        tuples = list(itertools.product(range(size), repeat=arity))
        btuples = list(itertools.product(range(size), repeat=arity))
        brel = frozenset(t for j, t in enumerate(btuples) if bbits >> j & 1)
        m = FiniteStructure(size, {"a": 0}, {}, {"B": brel})
        args = tuple(Var(f"x{i}") for i in range(arity))
        xa = Atom("X", args, PVAR)
        from wscan.logic import Forall, Exists

        body = Forall("x0", xa) if arity == 1 else Forall("x0", Exists("x1", And((xa, Not(Atom("B", args)))) ))
        phi = Exists2("X", arity, body)
        explicit = any(
            eval_formula(body, m, {}, {"X": frozenset(t for j, t in enumerate(tuples) if b >> j & 1)})
            for b in range(2 ** len(tuples))
        )
        assert eval_formula(phi, m) == explicit


class TestEnumeration:
    def test_counts_and_order(self):
        sym = SymbolTable(("a",), (), (("B", 1),))
        ms = list(enumerate_structures(sym, 2))
        assert len(ms) == sym.count(1) + sym.count(2) == 2 + 2 * 4
        assert [m.size for m in ms] == sorted(m.size for m in ms)

    def test_functions(self):
        sym = SymbolTable((), (("f", 1),), ())
        assert len(list(enumerate_structures(sym, 2))) == 1 + 4


class TestWsoqe:
    def test_worked_example(self):
        n = example1()
        rep = check_wsoqe(n, wit("λu. u = a"), 3)
        assert rep.ok and rep.label() == "verified-up-to(3)" and rep.structures_checked > 0

    def test_bottom_is_refuted_at_two(self):
        rep = check_wsoqe(example1(), wit("λu. ⊥"), 3)
        assert not rep.ok
        m = rep.counterexample["structure"]
        assert m.size == 2 and m.constants["a"] != m.constants["c"]

    def test_without_predicate_variables(self):
        n = cs("B(a)", "vars: X/1")
        for body in ("⊤", "⊥", "B(u)"):
            assert check_wsoqe(n, wit(f"λu. {body}"), 3).ok

    def test_rejects_truncated_and_mismatched(self):
        n = example1()
        e = PredicateExpression(("u",), Or((eq_atom(u, a), Truncated(""))))
        with pytest.raises(VerifierError):
            check_wsoqe(n, Witness((("X", 1),), (e,)), 2)
        with pytest.raises(VerifierError):
            check_wsoqe(n, wit("λu. ⊥", "Y"), 2)

    def test_counterexample_replays(self):
        n = example1()
        w = wit("λu. ⊤")
        rep = check_wsoqe(n, w, 2)
        m = rep.counterexample["structure"]
        phi = clause_set_formula(n.clauses)
        lhs = eval_formula(Exists2("X", 1, phi), m)
        rhs = eval_formula(substitute_witness(phi, w), m)
        assert lhs != rhs

    def test_monotone_in_k(self):
        n = example1()
        for k in (1, 2, 3):
            assert check_wsoqe(n, wit("λu. u = a"), k).ok
        assert check_wsoqe(n, wit("λu. ⊥"), 1).ok  # too small to see the difference
        assert not check_wsoqe(n, wit("λu. ⊥"), 2).ok

    def test_cap(self):
        rep = check_wsoqe(example1(), wit("λu. u = a"), 3, cap=100)
        assert rep.ok and rep.capped and rep.complete_up_to < 3
        assert "capped" in str(rep)


def _naive_wsoqe(n: ClauseSet, w: Witness, k: int) -> bool:
    phi = clause_set_formula(n.clauses)
    lhs = phi
    for name, ar in reversed(n.pvars):
        lhs = Exists2(name, ar, lhs)
    rhs = substitute_witness(phi, w)
    both = Iff(lhs, rhs)
    return check_valid(both, k).ok


PREDS = ["⊤", "⊥", "u = a", "u != a", "A(u)", "B(u, a)", "A(u) ∨ u = b", "∀v. B(u, v)", "∃v. B(v, u) ∧ A(v)"]


class TestOracleAgreement:
    @given(clause_sets(max_clauses=3), st.sampled_from(PREDS))
    @settings(max_examples=80)
    def test_fast_path_agrees_with_naive(self, n, body):
        w = wit(f"λu. {body}")
        assert check_wsoqe(n, w, 2).ok == _naive_wsoqe(n, w, 2)

    @given(clause_sets(max_clauses=3), st.sampled_from(PREDS))
    @settings(max_examples=40)
    def test_symmetric(self, n, body):
        w = wit(f"λu. {body}")
        phi = clause_set_formula(n.clauses)
        lhs = Exists2("X", 1, phi)
        rhs = substitute_witness(phi, w)
        assert check_valid(Iff(lhs, rhs), 2).ok == check_valid(Iff(rhs, lhs), 2).ok


class TestStep:
    def test_examples(self):
        n = example1()
        d = saturate(n)
        assert check_step(d.intermediates[0], d.intermediates[1], 2).ok
        assert check_step(cs("X(a)"), cs(""), 2, mode="equivalence").ok
        b = cs("B(a)")
        empty = cs("")
        assert check_step(b, empty, 2, mode="soundness").ok
        rep = check_step(b, empty, 2, mode="equivalence")
        assert not rep.ok and "∃" in rep.counterexample["reason"]

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            check_step(cs("B(a)"), cs(""), 2, mode="sideways")


class TestEquivalence:
    def test_predicates_and_sets(self):
        assert check_equivalent(parse_predicate("λu. ¬¬A(u)"), parse_predicate("λu. A(u)"), 3).ok
        assert not check_equivalent(parse_predicate("λu. A(u)"), parse_predicate("λu. u = a"), 3).ok
        assert check_equivalent(list(cs("B(u) | B(a)")), list(cs("B(a)")), 3).ok


class TestFeq:
    def test_empty_set(self):
        assert feq_check(cs(""), witness=wit("λu. ⊥")).verdict == "feq-solution"

    def test_worked_example_is_not_valid(self):
        n = example1()
        r = feq_check(n, saturate(n))
        assert r.verdict == "countermodel"

    def test_modified_formula(self):
        n = cs("-B(a) | X(a)\n-B(a) | -X(u) | B(u)")
        d = saturate(n)
        assert not d.conclusion.clauses
        r = feq_check(n, d, k=3)
        assert r.verdict == "feq-by-sufficient-condition", str(r)
        # the witness named in the introduction also passes the bounded search
        r2 = feq_check(n, witness=wit("λu. u = a"), k=3)
        assert r2.verdict == "unknown-up-to(3)"

    def test_clause_set_as_printed_is_not_solved_by_u_eq_a(self):
        # ¬X(u) ∨ B(u) under u = a leaves B(a), which is not valid
        n = cs("-B(a) | X(a)\n-X(u) | B(u)")
        assert feq_check(n, witness=wit("λu. u = a"), k=2).verdict == "countermodel"

    def test_requires_witness(self):
        with pytest.raises(ValueError):
            feq_check(example1())
