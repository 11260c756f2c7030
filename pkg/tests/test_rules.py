from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from psm.calculus import CAPTURE, FACT, Action, Effectus, Term, parse_term
from psm.errors import TermSyntaxError, UnboundVariable
from psm.rules import (EMPTY_BINDING, Binding, Pattern, RuleClass, SeqVar, SuccVar,
                       applicable, instantiate, intersection_rules, make_rule, match_pattern,
                       parse_pattern, signal_rule)
from psm.vocabulary import intersection_vocabulary

VOCAB = intersection_vocabulary()

b1 = Effectus("b1", "P")
r1 = Effectus("r1", "P")
g2 = Effectus("g2", "P")
rQ = Effectus("r", "Q")
uQ = Effectus("ü", "Q")


def T(text: str) -> Term:
    return parse_term(text)


class TestPatterns:
    def test_variables(self):
        p = parse_pattern("X b1:P", VOCAB)
        assert p.atoms == (SeqVar("X"), b1)
        assert p.seq_vars == {"X"}

    def test_successus_variable(self):
        p = parse_pattern("x:Q g2:P", VOCAB)
        assert p.atoms == (SuccVar("x", "Q"), g2)
        assert p.succ_vars == {"x"}

    def test_known_successus_wins(self):
        assert parse_pattern("r:Q", VOCAB).atoms == (rQ,)

    def test_action(self):
        assert parse_pattern('"0B"', VOCAB).atoms == (Action("0B"),)

    def test_stored_in_normal_form(self):
        assert parse_pattern("?- X ! X", VOCAB).literal == "?- ! X"
        assert parse_pattern("X X", VOCAB).literal == "X"

    @pytest.mark.parametrize("text", ["", "x", "b1:"])
    def test_malformed(self, text):
        with pytest.raises(TermSyntaxError):
            parse_pattern(text, VOCAB)


class TestMatching:
    def test_single_binding(self):
        [b] = match_pattern(parse_pattern("X r1:P", VOCAB), T("ü:Q r1:P"))
        assert b.causa_seq == {"X": (uQ,)}

    def test_every_split_is_enumerated(self):
        p = Pattern((SeqVar("X"), SeqVar("Y")))
        bindings = match_pattern(p, T("+:B b1:P r:Q"))
        assert [len(b.causa_seq["X"]) for b in bindings] == [1, 2]

    def test_order2_prefix(self):
        p = parse_pattern("? X", VOCAB)
        assert match_pattern(p, T("? ü:Q r1:P"))[0].causa_seq == {"X": (uQ, r1)}
        assert match_pattern(p, T("ü:Q r1:P")) == []

    def test_seq_var_takes_effectus_only(self):
        assert match_pattern(parse_pattern("X", VOCAB), T("! ü:Q")) == []

    def test_successus_variable_binds(self):
        [b] = match_pattern(parse_pattern("x:Q g2:P", VOCAB), T("r:Q g2:P"))
        assert b.successus == {"x": "r"}

    def test_seed_binding_must_agree(self):
        p = parse_pattern("X r1:P", VOCAB)
        seed = Binding.from_maps({"X": (rQ,)}, {})
        assert match_pattern(p, T("ü:Q r1:P"), seed) == []
        assert match_pattern(p, T("r:Q r1:P"), seed) == [seed]

    def test_instantiate(self):
        p = parse_pattern("? Y r1:P", VOCAB)
        b = Binding.from_maps({"Y": (uQ,)}, {})
        assert instantiate(p, b) == (CAPTURE, uQ, r1)

    def test_instantiate_unbound(self):
        with pytest.raises(UnboundVariable):
            instantiate(parse_pattern("! X", VOCAB), EMPTY_BINDING)


def brute_force(p: Pattern, t: Term) -> set:
    n = len(t.atoms)
    slices = {t.atoms[i:j] for i in range(n) for j in range(i + 1, n + 1)
              if all(isinstance(a, Effectus) for a in t.atoms[i:j])}
    successus = {a.successus for a in t.atoms if isinstance(a, Effectus)}
    seq_names, succ_names = sorted(p.seq_vars), sorted(p.succ_vars)
    found = set()
    for seq_values in product(slices, repeat=len(seq_names)):
        for succ_values in product(successus, repeat=len(succ_names)):
            b = Binding.from_maps(dict(zip(seq_names, seq_values)),
                                  dict(zip(succ_names, succ_values)))
            if instantiate(p, b) == t.atoms:
                found.add(b)
    return found


pattern_atoms = st.sampled_from([
    SeqVar("X"), SeqVar("Y"), SuccVar("x", "P"), SuccVar("x", "Q"), SuccVar("y", "P"),
    b1, r1, rQ, CAPTURE, FACT,
])
term_atoms = st.sampled_from([b1, r1, rQ, uQ, CAPTURE, FACT])


@given(st.lists(pattern_atoms, min_size=1, max_size=5), st.lists(term_atoms, max_size=5))
def test_matching_agrees_with_brute_force(patoms, tatoms):
    p, t = Pattern(tuple(patoms)), Term(tuple(tatoms))
    assert set(match_pattern(p, t)) == brute_force(p, t)


@given(st.lists(pattern_atoms, min_size=1, max_size=5), st.data())
def test_instantiations_match_back(patoms, data):
    p = Pattern(tuple(patoms))
    effectus = st.sampled_from([b1, r1, rQ, uQ])
    seq = {n: tuple(data.draw(st.lists(effectus, min_size=1, max_size=2)))
           for n in sorted(p.seq_vars)}
    succ = {n: data.draw(st.sampled_from(["b1", "r1", "r", "ü"])) for n in sorted(p.succ_vars)}
    b = Binding.from_maps(seq, succ)
    t = Term(instantiate(p, b))
    assert b in match_pattern(p, t)
    assert set(match_pattern(p, t)) == brute_force(p, t)


class TestRules:
    def test_unbound_consequent(self):
        with pytest.raises(UnboundVariable):
            make_rule("bad", RuleClass.STRUCTURAL, ["X b1:P"], ["! Z"], VOCAB)

    def test_signal_rule_turns_capture_into_fact(self):
        nodes = [T("? r:Q r1:P"), T("?- ! r:Q r1:P")]
        [app] = applicable(signal_rule(VOCAB), nodes, VOCAB)
        assert [t.literal for t in app.produced] == ["! r:Q r1:P"]
        assert app.matched_nodes == tuple(nodes)

    def test_signal_rule_needs_matching_signal(self):
        nodes = [T("? r:Q r1:P"), T("?- ! ü:Q r1:P")]
        assert applicable(signal_rule(VOCAB), nodes, VOCAB) == []

    def test_visibility(self):
        rule = make_rule("vis", RuleClass.STRUCTURAL, ["X b2:P", "Y r1:P"], ["? Y r1:P"], VOCAB)
        [app] = applicable(rule, [T("ü:Q r1:P"), T("+:B b2:P")], VOCAB)
        assert app.produced == (T("? ü:Q r1:P"),)

    def test_distinct_variables(self):
        rule = make_rule("collision", RuleClass.BEHAVIOURAL, ["X x:P", "Y x:P"], ['"00"'],
                         VOCAB, distinct=True)
        assert applicable(rule, [T("ü:Q r1:P")], VOCAB) == []
        apps = applicable(rule, [T("ü:Q r1:P"), T("r:Q r1:P")], VOCAB)
        assert len(apps) == 2
        assert {a.produced for a in apps} == {(Term((Action("00"),)),)}

    def test_fresh_restricts_firings(self):
        rule = make_rule("move", RuleClass.STRUCTURAL, ["+:B b2:P"], ["+:B b1:P"], VOCAB)
        nodes = [T("+:B b2:P")]
        assert applicable(rule, nodes, VOCAB, fresh=set()) == []
        assert len(applicable(rule, nodes, VOCAB, fresh={T("+:B b2:P")})) == 1

    def test_applications_are_sorted(self):
        rule = make_rule("vis", RuleClass.STRUCTURAL, ["X b2:P", "Y r1:P"], ["? Y r1:P"], VOCAB)
        nodes = [T("r:Q r1:P"), T("+:B b2:P"), T("ü:Q r1:P")]
        apps = applicable(rule, nodes, VOCAB)
        assert apps == sorted(apps, key=lambda a: a.sort_key)
        assert apps == applicable(rule, list(reversed(nodes)), VOCAB)

    def test_intersection_rule_set(self):
        rules = intersection_rules(VOCAB)
        ids = [r.id for r in rules]
        assert ids[-1] == "signal"
        assert {"stop", "stop_b1", "stop_crossing", "collision"} == {
            r.id for r in rules if r.klass is RuleClass.BEHAVIOURAL}
        assert len(ids) == len(set(ids))
