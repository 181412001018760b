import json

import pytest
from helpers import example1
from hypothesis import given
from hypothesis import strategies as st
from strategies import clause_sets, literals, terms

from wscan import CORPUS
from wscan.logic import (
    BOT,
    PVAR,
    TOP,
    And,
    Atom,
    Clause,
    Const,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    PredicateExpression,
    Truncated,
    Var,
    Witness,
    eq_atom,
    literal_formula,
)
from wscan.parser import (
    ParseError,
    ProblemFile,
    parse_clause_set,
    parse_formula,
    parse_predicate,
    parse_problem,
    parse_witness,
)
from wscan.render import (
    dumps,
    formula_from_json,
    formula_to_json,
    render_clause,
    render_formula,
    render_predicate,
    render_problem,
    render_witness,
    render_witness_file,
    witness_from_json,
    witness_to_json,
)
from wscan.saturation import saturate
from wscan.witness import extract_witness

PV = {"X": 1, "Y": 2}


def formulas():
    atoms = literals((("X", 1), ("Y", 2)), terms(2)).map(literal_formula) | st.sampled_from([TOP, BOT])
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            inner.map(Not),
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
            st.builds(Implies, inner, inner),
            st.builds(Iff, inner, inner),
            st.builds(Forall, st.sampled_from("uvw"), inner),
            st.builds(Exists, st.sampled_from("uvw"), inner),
        ),
        max_leaves=8,
    )


class TestProblemFiles:
    def test_example(self):
        p = parse_problem("% comment\nvars: X/1\nconsts: d\noption: max_steps = 7\nclause: X(a) | B(u,v)\nclause: -X(u) | u != c\n")
        assert p.pvars == (("X", 1),) and p.consts == ("d",)
        assert p.options == {"max_steps": "7"}
        assert [c.id for c in p.clauses] == [1, 2]
        assert str(p.clauses[1]) == "-X(u) | u != c"
        assert p.clause_set().next_id == 3

    def test_empty_clause_and_alternative_syntax(self):
        p = parse_problem("vars: X/1\nclause: ⊥\nclause: ¬X(u) | u ≠ a\n")
        assert p.clauses[0].literals == ()
        assert str(p.clauses[0]) == "⊥"
        assert str(p.clauses[1]) == "-X(u) | u != a"

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("vars:\n", "var_decl"),
            ("clause: X(a)\n", "'vars:' header"),
            ("vars: X/1\nclause: X(a,b)\n", None),
            ("vars: X/1\nclause: B(a) | B(a,b)\n", None),
            ("vars: X/1, X/2\n", None),
            ("vars: X/1\noption: colour = red\n", None),
            ("vars: X/1\noption: max_steps = many\n", None),
            ("vars: X/1\nclause: X(a) |\n", None),
            ("vars: X/1\nconsts: u\n", "a constant"),
            ("vars: X/1\nvars: Y/1\n", None),
            ("", "'vars:' header"),
        ],
    )
    def test_errors(self, text, expected):
        with pytest.raises(ParseError) as exc:
            parse_problem(text)
        assert exc.value.line >= 1
        if expected:
            assert exc.value.expected == expected

    def test_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_problem("vars: X/1\nclause: X(a) | &\n")
        assert (exc.value.line, exc.value.col) == (2, 16)

    @pytest.mark.parametrize("path", sorted(CORPUS.glob("*.p")), ids=lambda p: p.stem)
    def test_corpus_round_trip(self, path):
        p = parse_problem(path.read_text())
        assert parse_problem(render_problem(p)) == p

    @given(clause_sets(pvars=(("X", 1), ("Y", 2)), term_strategy=terms(2)))
    def test_clause_set_round_trip(self, n):
        p = ProblemFile(n.pvars, n.clauses)
        assert parse_problem(render_problem(p)) == p

    def test_parse_clause_set(self):
        n = parse_clause_set((CORPUS / "example1.p").read_text())
        assert n == example1() or [c.literals for c in n] == [c.literals for c in example1()]


class TestFormulas:
    def test_precedence(self):
        phi = parse_formula("A(a) ∨ B(a) ∧ ¬C(a) → D(a)")
        assert isinstance(phi, Implies) and isinstance(phi.lhs, Or)
        assert isinstance(phi.lhs.args[1], And)
        assert render_formula(phi) == "A(a) ∨ (B(a) ∧ ¬C(a)) → D(a)"

    def test_quantifier_scope(self):
        phi = parse_formula("∀u. A(u) ∧ B(u)")
        assert isinstance(phi, Forall) and isinstance(phi.body, And)
        assert parse_formula("forall u. exists v. u = v") == Forall("u", Exists("v", eq_atom(Var("u"), Var("v"))))

    def test_disequality_rendering(self):
        assert render_formula(Not(eq_atom(Var("u"), Const("a")))) == "u ≠ a"
        assert render_formula(Not(And((TOP, BOT)))) == "¬(⊤ ∧ ⊥)"

    @given(formulas())
    def test_round_trip(self, phi):
        assert parse_formula(render_formula(phi), PV) == phi

    @given(formulas())
    def test_json_round_trip(self, phi):
        j = formula_to_json(phi)
        assert formula_from_json(json.loads(json.dumps(j))) == phi

    def test_truncated_json(self):
        t = Or((eq_atom(Var("u"), Const("a")), Truncated("")))
        assert isinstance(formula_from_json(formula_to_json(t)).args[1], Truncated)
        assert render_formula(t) == "u = a ∨ …"


class TestWitnesses:
    def test_predicate(self):
        e = parse_predicate("λu. u = a")
        assert e.params == ("u",) and render_predicate(e) == "λu. u = a"
        assert parse_predicate("\\u v. B(u,v)").arity == 2
        with pytest.raises(ParseError):
            parse_predicate("u = a")
        with pytest.raises(ParseError):
            parse_predicate("λu. v = a")  # free variable outside the parameters

    def test_worked_example_witness(self):
        n = example1()
        w = extract_witness(saturate(n))
        assert render_witness(w.final) == "λu. u = a"

    def test_two_component_rendering(self):
        p = parse_problem((CORPUS / "appendixG3.p").read_text())
        from wscan.saturation import derivation_from_choices

        d = derivation_from_choices(p.clause_set(), [(1, 0), (2, 1), ("ext", "X2")])
        assert render_witness(extract_witness(d).final) == "(λu. W1(u) ∧ A(u), λu. A(u))"

    def test_file_and_json_round_trip(self):
        w = Witness((("X", 1), ("Y", 2)), (parse_predicate("λu. A(u) ∨ u = a"), parse_predicate("λu v. ¬B(v, u)")))
        pv = (("X", 1), ("Y", 2))
        assert parse_witness(render_witness_file(w), pv) == w
        assert parse_witness(dumps(witness_to_json(w)), pv) == w
        assert witness_from_json(json.loads(dumps(witness_to_json(w)))) == w
        # order follows the declaration, not the file
        swapped = "Y: λu v. ¬B(v, u)\nX: λu. A(u) ∨ u = a\n"
        assert parse_witness(swapped, pv) == w

    def test_witness_errors(self):
        with pytest.raises(ParseError):
            parse_witness("X: λu. ⊤\n", (("X", 1), ("Y", 1)))
        with pytest.raises(ParseError):
            parse_witness("X: λu v. ⊤\n", (("X", 1),))
        with pytest.raises(ParseError):
            parse_witness("{not json", (("X", 1),))

    def test_json_infinity(self):
        assert json.loads(dumps({"size": float("inf")})) == {"size": None}
