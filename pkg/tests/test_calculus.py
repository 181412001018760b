import pytest
from helpers import clause, cs, example1
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from strategies import clause_sets, clauses

from wscan.calculus import (
    ConstrElim,
    ExtPurDel,
    Fac,
    IllegalStep,
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
    redundant_in,
    replay,
    resolution_partners,
    resolvent,
    subsumes,
)
from wscan.logic import variant_key, Clause, PointedClause, clause_formula, clause_set_formula, Implies, substitute, PredicateExpression, TOP, BOT, param_names
from wscan.verifier import check_equivalent, check_step, check_valid


def texts(c: Clause) -> str:
    return str(c)


class TestResolvent:
    def test_unit_against_unit(self):
        n = example1()
        r = resolvent(PointedClause(n.get(2), 0), PointedClause(n.get(4), 0))
        assert str(r) == "a != c"

    def test_against_mixed_clause(self):
        n = example1()
        r = resolvent(PointedClause(n.get(2), 0), PointedClause(n.get(3), 1))
        assert str(r) == "a != u | B(u, v) | X(v)"

    def test_renames_apart(self):
        n = cs("X(u)\n-X(u)")
        r = resolvent(PointedClause(n.get(1), 0), PointedClause(n.get(2), 0))
        assert len(r.literals) == 1
        lhs, rhs = r.literals[0].args
        assert lhs != rhs

    def test_same_polarity_rejected(self):
        n = cs("X(a)\nX(b)")
        with pytest.raises(ValueError):
            resolvent(PointedClause(n.get(1), 0), PointedClause(n.get(2), 0))


class TestFactor:
    def test_shapes(self):
        assert str(factor(clause("B(a) | X(u) | X(a)"), 1, 2)) == "u != a | B(a) | X(u)"
        assert str(factor(clause("X(a) | X(a)"), 0, 1)) == "a != a | X(a)"
        got = factor(clause("-Y(u,v) | -Y(v,u)"), 0, 1)
        assert str(got) == "u != v | v != u | -Y(u, v)"

    def test_not_factorable(self):
        c = clause("X(a) | -X(b)")
        assert not factorable(c, 0, 1)


class TestConstraintElimination:
    def test_examples(self):
        c = clause("a != u | B(u,v) | X(v)")
        res = constraint_eliminate(c, (0,))
        assert variant_key(res[0]) == variant_key(clause("B(a,v) | X(v)"))
        assert constraint_eliminate(clause("a != c"), (0,)) is None
        assert str(constraint_eliminate(clause("u != u | B(u)"), (0,))[0]) == "B(u)"

    def test_maximal_block(self):
        assert maximal_constraint_block(clause("a != u | B(u) | u != v")) == (0, 2)


class TestSubsumption:
    def test_examples(self):
        assert subsumes(clause("B(a,v)"), clause("B(a,v) | X(v)"))
        c = clause("B(u) | X(u)")
        assert subsumes(c, c)
        assert subsumes(clause("B(u,v)"), clause("B(a,b) | Q(a)"))
        assert not subsumes(clause("B(a,b) | Q(a)"), clause("B(u,v)"))

    def test_multiset(self):
        assert not subsumes(clause("B(u) | B(u)"), clause("B(a)"))
        assert subsumes(clause("B(u) | B(v)"), clause("B(a)"), multiset=False)

    def test_equality_symmetric(self):
        assert subsumes(clause("u != a"), clause("a != b"))
        assert subsumes(clause("a != u"), clause("b != a"))

    @given(clauses(), clauses())
    @settings(max_examples=60)
    def test_subsumption_is_entailment(self, c, d):
        if subsumes(c, d):
            assert check_valid(Implies(clause_formula(c, closed=True), clause_formula(d, closed=True)), 2).ok


class TestRedundancy:
    def test_examples(self):
        n = cs("B(a,v)\n-X(c)")
        r = redundant_in(Clause(clause("a != u | B(u,v) | X(v)").literals, 99), n)
        assert r is not None and r.reason == "subsumed-after-constraint-elim" and r.by_id == 1
        assert redundant_in(clause("B(a) | -B(a)"), []).reason == "tautology"
        assert redundant_in(clause("B(a)"), []) is None
        assert is_tautology(clause("u = u | B(u)"))

    @given(clause_sets(max_clauses=3), clauses())
    @settings(max_examples=60)
    def test_redundant_is_entailed(self, n, c):
        if redundant_in(c, n) is not None:
            phi = Implies(clause_set_formula(n.clauses), clause_formula(c, closed=True))
            assert check_valid(phi, 2).ok


class TestCondense:
    def test_examples(self):
        assert str(condense(clause("B(a) | B(a)"))) == "B(a)"
        assert str(condense(clause("B(u) | B(a)"))) == "B(a)"
        c = clause("B(u) | Q(v)")
        assert condense(c).literals == c.literals

    def test_oracle_equivalence(self):
        c = clause("B(u) | B(a)")
        assert check_equivalent([c], [condense(c)], 3).ok

    @given(clauses(max_literals=4))
    @settings(max_examples=60)
    def test_condensed_subsumes_and_is_subclause(self, c):
        d = condense(c)
        assert subsumes(d, c)
        assert len(d.literals) <= len(c.literals)
        assert check_equivalent([c], [d], 2).ok


class TestApplyStep:
    def test_worked_example(self):
        n = example1()
        p21, p41 = PointedClause(n.get(2), 0), PointedClause(n.get(4), 0)
        n1 = apply_step(n, Res(p21, p41, Clause(resolvent(p21, p41).literals, 5)))
        assert n1.ids == (1, 2, 3, 4, 5)
        n2 = apply_step(n1, PurDel(PointedClause(n1.get(2), 0)))
        assert n2.ids == (1, 3, 4, 5)
        # clause 3 mixes polarities but does contain ¬X, so the clause-level side condition holds
        clause_mode = apply_step(n2, ExtPurDel("X", False, (3, 4)))
        assert [str(c) for c in clause_mode] == ["B(a, v)", "a != c"]
        assert check_step(n2, clause_mode, 2).ok
        with pytest.raises(IllegalStep):
            apply_step(n2, ExtPurDel("X", True, (3, 4)))
        n3 = apply_step(n2, PurDel(PointedClause(n2.get(3), 1)))
        n4 = apply_step(n3, ExtPurDel("X", False, (4,)))
        assert [str(c) for c in n4] == ["B(a, v)", "a != c"]
        for before, after in zip([n, n1, n2, n3], [n1, n2, n3, n4]):
            assert check_step(before, after, 2).ok

    def test_purdel_requires_redundant_resolvents(self):
        n = example1()
        with pytest.raises(IllegalStep, match="not purified"):
            apply_step(n, PurDel(PointedClause(n.get(2), 0)))

    def test_purdel_immediately_without_partners(self):
        n = cs("X(a)\nB(a)")
        assert apply_step(n, PurDel(PointedClause(n.get(1), 0))).ids == (2,)

    def test_wrong_recorded_result(self):
        n = example1()
        p21, p41 = PointedClause(n.get(2), 0), PointedClause(n.get(4), 0)
        with pytest.raises(IllegalStep):
            apply_step(n, Res(p21, p41, clause("a != b")))

    def test_redundancy_reasons_checked(self):
        n = cs("B(a)\nB(a) | X(a)")
        assert apply_step(n, RedElim(n.get(2), "subsumed-by", 1)).ids == (1,)
        with pytest.raises(IllegalStep):
            apply_step(n, RedElim(n.get(1), "subsumed-by", 2))
        with pytest.raises(IllegalStep):
            apply_step(n, RedElim(n.get(1), "tautology"))

    def test_ext_pur_del_semantics(self):
        n = cs("X(a) | B(a)\nX(u) | -B(u)\nA(b)")
        n2 = apply_step(n, ExtPurDel("X", True, (1, 2)))
        top = substitute(clause_set_formula(n.clauses), {"X": PredicateExpression(param_names(1), TOP)})
        assert check_equivalent(clause_set_formula(n2.clauses), top, 3).ok

    def test_replay(self):
        n = cs("X(a)\nB(a)")
        states = replay(n, [PurDel(PointedClause(n.get(1), 0))])
        assert [s.ids for s in states] == [(1, 2), (2,)]


@st.composite
def legal_steps(draw):
    n = draw(clause_sets(max_clauses=3))
    options = []
    for c in n:
        for i, l in enumerate(c.literals):
            if l.is_pvar:
                p = PointedClause(c, i)
                options += [("res", p, q) for q in resolution_partners(n, p)]
        for i in range(len(c.literals)):
            for j in range(i + 1, len(c.literals)):
                if factorable(c, i, j) and c.literals[i].is_pvar:
                    options.append(("fac", c, i, j))
        block = maximal_constraint_block(c)
        if block:
            options.append(("ce", c, block))
    assume(options)
    opt = draw(st.sampled_from(options))
    nid = n.next_id
    if opt[0] == "res":
        r = resolvent(opt[1], opt[2])
        step = Res(opt[1], opt[2], Clause(r.literals, nid))
    elif opt[0] == "fac":
        f = factor(opt[1], opt[2], opt[3])
        step = Fac(opt[1], opt[2], opt[3], Clause(f.literals, nid))
    else:
        res = constraint_eliminate(opt[1], opt[2])
        assume(res is not None)
        step = ConstrElim(opt[1], opt[2], res[1], Clause(res[0].literals, nid))
    return n, step


class TestStepProperties:
    @given(legal_steps())
    @settings(max_examples=80)
    def test_equivalence_steps_preserve_models(self, case):
        n, step = case
        n2 = apply_step(n, step)
        rep = check_step(n, n2, 2, mode="both")
        assert rep.ok, str(rep)
        # Res, Fac and ConstrElim keep N ⟺ N′ with X free
        assert check_equivalent(list(n), list(n2), 2).ok
