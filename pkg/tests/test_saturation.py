import os
from unittest import mock

import pytest
from fuzzgen import random_clause_set
from helpers import cs, example1
from hypothesis import given, settings
from hypothesis import strategies as st

from wscan.calculus import ExtPurDel, PurDel, apply_step, replay
from wscan.logic import PointedClause
from wscan.saturation import (
    Derivation,
    Failure,
    LimitExceeded,
    SaturationConfig,
    derivation_from_choices,
    detect_extended_purity,
    enumerate_derivations,
    one_sided,
    purify,
    saturate,
)
from wscan.verifier import check_derivation, check_equivalent

import random


class TestPurify:
    def test_unit_clause_of_worked_example(self):
        n = example1()
        eng = purify(n, PointedClause(n.get(2), 0))
        assert [str(s) for s in eng.steps] == ["Res(2.1, 4.1) -> 5: a != c", "PurDel(2.1: [X(a)])"]

    def test_only_resolvent_is_redundant(self):
        n = example1()
        eng = purify(n, PointedClause(n.get(3), 1))
        assert len(eng.steps) == 1 and isinstance(eng.steps[0], PurDel)

    def test_no_partners(self):
        n = cs("X(a)\nB(b)")
        eng = purify(n, PointedClause(n.get(1), 0))
        assert [type(s) for s in eng.steps] == [PurDel]

    def test_limit(self):
        n = cs("X(a)\n-X(u) | X(f(u))\n-X(b)")
        with pytest.raises(LimitExceeded):
            purify(n, PointedClause(n.get(2), 0), SaturationConfig(max_purification_resolvents=3))


class TestExtendedPurity:
    def test_examples(self):
        assert detect_extended_purity(cs("X(a)\nX(b) | B(a)"), "X") == "+"
        assert detect_extended_purity(cs("B(a)"), "X") is None
        n = cs("B(a,v)\nB(u,v) | -X(u) | X(v)\n-X(c)\na != c")
        assert detect_extended_purity(n, "X") is None
        assert detect_extended_purity(n, "X", "clause") == "-"
        assert detect_extended_purity(n.without(2), "X") == "-"


class TestSaturate:
    def test_worked_example(self):
        d = saturate(example1())
        assert isinstance(d, Derivation) and d.eliminating
        expected = cs("B(a,v)\na != c")
        assert check_equivalent(list(d.conclusion), list(expected), 3).ok
        assert sorted(str(c) for c in d.conclusion) == ["B(a, v)", "a != c"]

    def test_skolem(self):
        d = saturate(cs("X(a)\n-X(b)"))
        assert [str(c) for c in d.conclusion] == ["a != b"]

    def test_nothing_to_eliminate(self):
        d = saturate(cs("B(a)"))
        assert d.steps == [] and d.eliminating

    def test_max_steps_limit(self):
        r = saturate(cs("X(a)\n-X(u) | X(f(u))\n-X(b)"), SaturationConfig(max_steps=5))
        assert isinstance(r, Failure) and r.reason == "limit" and not r

    def test_stuck_when_one_sided_only(self):
        r = saturate(cs("B(u,v) | -X(u) | X(v)"), SaturationConfig(one_sided_only=True))
        assert isinstance(r, Failure) and r.reason == "stuck"
        assert r.state is not None and r.state.contains_pvars()

    def test_one_sided_only_restricts_purdel(self):
        d = saturate(cs("X(a)\n-X(u) | B(u)\n-X(b) | A(b)"), SaturationConfig(one_sided_only=True))
        assert all(one_sided(p) for p in d.purified())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SaturationConfig(max_steps=0)
        with pytest.raises(ValueError):
            SaturationConfig(selection="random")

    @pytest.mark.parametrize("selection", ["prefer-one-sided", "fewest-X-literals", "prefer-unit", "input-order"])
    def test_all_selections_eliminate(self, selection):
        # a small step budget makes greedy selections backtrack out of the B-chains early
        d = saturate(example1(), SaturationConfig(selection=selection, max_steps=40))
        assert d and d.eliminating
        assert check_derivation(d, 2).ok


class TestEnumerate:
    def test_four_derivations_of_small_example(self):
        ds = list(enumerate_derivations(cs("X(a)\n-X(u) | B(u)"), SaturationConfig(enumerate_limit=16)))
        assert len(ds) >= 4
        assert len({tuple(str(s) for s in d.steps) for d in ds}) == len(ds)

    def test_empty_derivation(self):
        ds = list(enumerate_derivations(cs("B(a)")))
        assert len(ds) == 1 and ds[0].steps == []

    def test_contains_both_worked_derivations(self):
        sigs = [d.choice_signature() for d in enumerate_derivations(example1(), SaturationConfig(enumerate_limit=16))]
        # the alternative purifying 3.2 first, then 4.1, then positive extended purity
        assert (("PurDel", "3.2"), ("PurDel", "4.1"), ("ExtPurDel", "X", True)) in sigs
        clause_mode = SaturationConfig(enumerate_limit=16, extended_purity="clause")
        sigs = [d.choice_signature() for d in enumerate_derivations(example1(), clause_mode)]
        assert (("PurDel", "2.1"), ("ExtPurDel", "X", False)) in sigs

    def test_one_sided_only_excludes_alternative(self):
        cfg = SaturationConfig(enumerate_limit=16, one_sided_only=True, max_search_nodes=60)
        for d in enumerate_derivations(example1(), cfg):
            assert all(one_sided(p) for p in d.purified())

    def test_seed_is_reproducible(self):
        n = cs("X(a)\n-X(u) | B(u)\n-X(b) | A(u)")
        with mock.patch.dict(os.environ, {"WSCAN_SEED": "11"}):
            a = [d.choice_signature() for d in enumerate_derivations(n)]
            b = [d.choice_signature() for d in enumerate_derivations(n)]
        assert a == b


class TestChoices:
    def test_clause_mode_derivation_of_worked_example(self):
        d = derivation_from_choices(example1(), [(2, 0), ("ext", "X")])
        assert d.eliminating
        assert [str(c) for c in d.conclusion] == ["B(a, v)", "a != c"]

    def test_illegal_choice(self):
        with pytest.raises(ValueError):
            derivation_from_choices(example1(), [("ext", "X")])


def _derivations():
    return st.integers(0, 10_000).map(lambda s: random_clause_set(random.Random(s), max_clauses=4))


class TestProperties:
    @given(_derivations())
    @settings(max_examples=60)
    def test_replay_and_legality(self, n):
        d = saturate(n, SaturationConfig(max_steps=40, max_purification_resolvents=8, max_search_nodes=30))
        if isinstance(d, Failure):
            return
        assert d.intermediates[0] is n or d.intermediates[0] == n
        states = replay(n, d.steps)
        assert [s.literal_sets() for s in states] == [s.literal_sets() for s in d.intermediates]
        assert not d.conclusion.contains_pvars()
        assert check_derivation(d, 2, mode="equivalence").ok
        assert check_equivalent(list(n), list(n), 1).ok

    @given(_derivations())
    @settings(max_examples=30)
    def test_one_sided_only(self, n):
        d = saturate(n, SaturationConfig(one_sided_only=True, max_steps=40, max_purification_resolvents=8, max_search_nodes=30))
        if d:
            assert all(one_sided(p) for p in d.purified())
