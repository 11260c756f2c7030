import pytest

from psm.dsl import (SourceFile, format_scenario, load_scenario, parse, parse_file, parse_text,
                     tokenize)
from psm.errors import ScenarioError
from psm.graph import signal_body
from psm.rules import RuleClass, SeqVar, SuccVar
from psm.vocabulary import Severity

from .conftest import INTERSECTION

SOURCE = INTERSECTION.read_text(encoding="utf-8")


def errors(diagnostics):
    return [d for d in diagnostics if d.severity is Severity.ERROR]


def line_of(text: str, needle: str) -> int:
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    raise AssertionError(needle)


class TestIntersectionFile:
    def test_parses_cleanly(self):
        sc, diagnostics = parse_file(INTERSECTION)
        assert errors(diagnostics) == []
        assert sc is not None
        assert [t.literal for t in sc.seeds] == ["ü:Q r1:P", "+:B b2:P", "r:Q g2:P"]
        assert sc.name == "intersection"

    def test_same_as_builtin_scenario(self, scenario):
        sc, _ = parse_file(INTERSECTION)
        assert sc == scenario

    def test_unused_indicator_warning(self):
        _, diagnostics = parse_file(INTERSECTION)
        [warning] = [d for d in diagnostics if d.code == "UnusedIndicator"]
        assert warning.severity is Severity.WARNING
        assert warning.line == line_of(SOURCE, 'indicator A "Extension"')

    def test_variables_resolved(self):
        sc, _ = parse_file(INTERSECTION)
        rules = {r.id: r for r in sc.rules}
        assert rules["collision"].distinct_vars
        assert rules["collision"].klass is RuleClass.BEHAVIOURAL
        assert SeqVar("X") in rules["vis_b1_r1"].conditions[0].atoms
        assert SuccVar("x", "Q") in rules["drift_g2_g1"].conditions[0].atoms
        assert rules["signal"].klass is RuleClass.STRUCTURAL

    def test_signals_expanded(self):
        sc, _ = parse_file(INTERSECTION)
        assert [t.literal for t in sc.signals] == ["?- ! ü:Q r1:P", "?- ! r:Q r1:P"]
        assert signal_body(sc.signals[1]).literal == "r:Q r1:P"

    def test_round_trip(self):
        sc, _ = parse_file(INTERSECTION)
        again, diagnostics = parse_text(format_scenario(sc), "printed.psm")
        assert errors(diagnostics) == []
        assert again == sc


FAULTS = [
    ("order-2 seed", "seed r:Q g2:P", "seed ? r:Q g2:P", "? r:Q g2:P", "NotOrderOne"),
    ("unbound variable", 'then "00"', "then ! Z", "collision", "UnboundVariable"),
    ("invalid pattern effectus", "then +:B b1:P }", "then +:B <:P }", "move_b2_b1",
     "InvalidEffectus"),
    ("unknown rule class", "structural vis_b1_r1", "structrual vis_b1_r1", "vis_b1_r1",
     "RuleClass"),
    ("unterminated string", '"Quality"', '"Quality', "Quality", "Syntax"),
]


@pytest.mark.parametrize("name,old,new,marker,code", FAULTS, ids=[f[0] for f in FAULTS])
def test_seeded_faults(name, old, new, marker, code):
    assert old in SOURCE
    broken = SOURCE.replace(old, new, 1)
    sc, diagnostics = parse_text(broken, "broken.psm")
    assert sc is None
    [error] = errors(diagnostics)
    assert error.code == code
    assert error.line == line_of(broken, marker)
    assert error.column >= 1


def test_invalid_seed_cites_domain():
    _, diagnostics = parse_text(SOURCE.replace("seed r:Q g2:P", "seed <:P"))
    [error] = errors(diagnostics)
    assert "domain of indicator P" in error.message
    assert "b1 b2 g1 g2 r1" in error.message


def test_missing_brace():
    broken = SOURCE.replace("signals {", "signals")
    sc, [error] = parse_text(broken)
    assert sc is None
    assert error.code == "Syntax"
    assert error.line == line_of(broken, "signals") + 1


def test_duplicate_indicator():
    broken = SOURCE.replace('indicator A "Extension"', 'indicator P "Extension"')
    sc, diagnostics = parse_text(broken)
    assert sc is None
    assert "DuplicateCausa" in {d.code for d in errors(diagnostics)}


def test_duplicate_rule():
    broken = SOURCE.replace("structural vis_b2_r1", "structural vis_b1_r1")
    _, diagnostics = parse_text(broken)
    assert [d.code for d in errors(diagnostics)] == ["DuplicateRule"]


def test_missing_vocab():
    sc, diagnostics = parse(SourceFile(content='scenario "x" { }'))
    assert sc is None
    assert [d.code for d in diagnostics] == ["MissingVocab"]


def test_unused_rule_warning():
    extra = "  structural stuck { when a:A b2:P then ! b2:P }\n}\n\nsignals {"
    text = SOURCE.replace("}\n\nsignals {", extra, 1)
    sc, diagnostics = parse_text(text)
    assert sc is not None
    assert "UnusedRule" in {d.code for d in diagnostics}


def test_no_scenario_block():
    text = SOURCE[:SOURCE.index("scenario")]
    sc, diagnostics = parse_text(text, "vocab_only.psm")
    assert sc is not None and sc.seeds == ()
    assert sc.name == "vocab_only"
    assert "NoScenario" in {d.code for d in diagnostics}


def test_tokenizer_positions():
    tokens = tokenize('vocab {  # comment\n  indicator P "Position"')
    words = [(t.text, t.line, t.column) for t in tokens if t.kind in ("word", "string")]
    assert words == [("vocab", 1, 1), ("indicator", 2, 3), ("P", 2, 13), ("Position", 2, 15)]


def test_load_scenario(scenario):
    assert load_scenario(INTERSECTION).seeds == scenario.seeds


def test_load_scenario_raises_with_diagnostics(tmp_path):
    broken = tmp_path / "broken.psm"
    broken.write_text(SOURCE.replace("seed r:Q g2:P", "seed <:P"), encoding="utf-8")
    with pytest.raises(ScenarioError) as info:
        load_scenario(broken)
    assert info.value.detail == f"{broken}: 1 error(s)"
    assert [d.code for d in errors(info.value.diagnostics)] == ["InvalidEffectus"]


def square_free(n: int) -> list[int]:
    """First ``n`` letters of a ternary word with no adjacent repeated block."""
    zeros = [i for i in range(8 * n + 8) if bin(i).count("1") % 2 == 0]
    return [b - a - 1 for a, b in zip(zeros, zeros[1:])][:n]


def test_long_signal_body():
    letters = ("b1:P", "b2:P", "g1:P")
    body = " ".join(letters[k] for k in square_free(40))
    sc, diagnostics = parse_text(SOURCE.replace("  r:Q r1:P\n}", f"  r:Q r1:P\n  {body}\n}}", 1))
    assert errors(diagnostics) == []
    assert " ".join(a.literal for a in signal_body(sc.signals[-1]).atoms) == body
    assert len(sc.signals[-1]) == 42


def test_overlong_seed_is_a_diagnostic():
    broken = SOURCE.replace("seed r:Q g2:P", "seed " + " ".join(["b1:P", "b2:P"] * 40))
    sc, diagnostics = parse_text(broken)
    assert sc is None
    [error] = errors(diagnostics)
    assert error.code == "TermLength"
    assert error.line == line_of(broken, "seed b1:P b2:P")
