from psm.calculus import Effectus
from psm.vocabulary import (Diagnostic, IndicatorDecl, Severity, Vocabulary, effectus_valid,
                            validate_vocabulary)


def test_intersection_vocabulary_is_clean(vocab):
    assert validate_vocabulary(vocab) == []
    assert vocab.causae == ("P", "A", "Q", "R", "B")


def test_w_membership(vocab):
    assert ("b1", "P") in vocab.W
    assert effectus_valid(vocab, Effectus("ü", "Q"))
    assert not effectus_valid(vocab, Effectus("<", "P"))
    assert not vocab.effectus_valid(Effectus("b1", "X"))


def test_successus_universe(vocab):
    assert {"b1", "ü", "0", "+"} <= vocab.successus_universe
    assert "x" not in vocab.successus_universe


def test_domain_lookup(vocab):
    assert vocab.domain("R") == ("<", ">", "+", "-")
    assert vocab.domain("Z") == ()


def test_constancy():
    v = Vocabulary(indicators=(IndicatorDecl(causa="S", domain=("0", "1"), constancy=("0",)),))
    assert v.is_constancy("0")
    assert not v.is_constancy("1")


def test_violations_are_all_reported():
    v = Vocabulary(indicators=(
        IndicatorDecl(causa="P", domain=("b1", "b1")),
        IndicatorDecl(causa="P", domain=("b2",)),
        IndicatorDecl(causa="E", domain=()),
        IndicatorDecl(causa="S", domain=("1",), constancy=("0",)),
    ))
    codes = [d.code for d in validate_vocabulary(v)]
    assert sorted(codes) == ["DuplicateCausa", "DuplicateSuccessus",
                             "EmptyDomain", "UndeclaredConstancy"]


def test_positions_are_attached():
    v = Vocabulary(indicators=(IndicatorDecl(causa="E"),))
    [d] = validate_vocabulary(v, {0: (3, 5)})
    assert (d.line, d.column) == (3, 5)
    assert d.severity is Severity.ERROR


def test_diagnostic_render():
    d = Diagnostic(severity=Severity.WARNING, line=2, column=7, message="unused")
    assert d.render("a.psm") == "a.psm:2:7: warning: unused"
