"""Reader and printer for ``.psm`` scenario files.

    vocab {
      indicator P "Position" { b1 b2 g1 g2 r1 }
      indicator B "Movement" { 0 < > + - } constancy 0
    }
    rules {
      structural vis_b2_r1 { when X b2:P, Y r1:P then ? Y r1:P }
      behavioural collision distinct { when X x:P, Y x:P then "00" }
    }
    signals {
      r:Q r1:P
    }
    scenario "crossing" {
      seed +:B b2:P
    }

``#`` starts a comment. Signals and seeds hold one term per line. Parsing
is done in two passes: a syntax pass producing raw declarations, then a
checking pass that needs the whole vocabulary before it can tell pattern
variables from successus symbols.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel

from .calculus import (CAPTURE_INV, FACT, Effectus, Term, normalize,
                       normalize_atoms, parse_term)
from .errors import ScenarioError, TermLengthExceeded, TermSyntaxError, UnboundVariable
from .graph import Scenario, signal_body
from .rules import (Pattern, Rule, RuleClass, SuccVar, check_rule,
                    parse_pattern_atom, signal_rule)
from .vocabulary import (Diagnostic, IndicatorDecl, Severity, Vocabulary,
                         validate_vocabulary)

logger = logging.getLogger(__name__)

PUNCTUATION = "{},"


class SourceFile(BaseModel):
    path: str = "<input>"
    content: str


@dataclass
class Token:
    kind: str   # word, string, punct, newline, eof
    text: str
    line: int
    column: int


@dataclass
class RawTerm:
    tokens: list[str]
    line: int
    column: int

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class RawIndicator:
    causa: str
    label: str
    domain: list[str]
    constancy: list[str]
    line: int
    column: int


@dataclass
class RawRule:
    klass: str
    id: str
    distinct: bool
    when: list[RawTerm]
    then: list[RawTerm]
    line: int
    column: int


@dataclass
class RawFile:
    indicators: list[RawIndicator] = field(default_factory=list)
    rules: list[RawRule] = field(default_factory=list)
    signals: list[RawTerm] = field(default_factory=list)
    scenarios: list[tuple[str, list[RawTerm], int, int]] = field(default_factory=list)
    vocab_seen: bool = False


class _Abort(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _error(line: int, column: int, message: str, code: str = "") -> Diagnostic:
    return Diagnostic(severity=Severity.ERROR, line=line, column=column,
                      message=message, code=code)


def _warning(line: int, column: int, message: str, code: str = "") -> Diagnostic:
    return Diagnostic(severity=Severity.WARNING, line=line, column=column,
                      message=message, code=code)


def tokenize(text: str) -> list[Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        i, n = 0, len(line)
        while i < n:
            ch = line[i]
            if ch == "#":
                break
            if ch.isspace():
                i += 1
            elif ch in PUNCTUATION:
                tokens.append(Token("punct", ch, lineno, i + 1))
                i += 1
            elif ch == '"':
                end = line.find('"', i + 1)
                if end < 0:
                    raise _Abort(_error(lineno, i + 1, "unterminated string", "Syntax"))
                tokens.append(Token("string", line[i + 1:end], lineno, i + 1))
                i = end + 1
            else:
                start = i
                while i < n and not line[i].isspace() and line[i] not in PUNCTUATION + '"#':
                    i += 1
                tokens.append(Token("word", line[start:i], lineno, start + 1))
        tokens.append(Token("newline", "", lineno, n + 1))
    last = len(text.splitlines()) + 1
    tokens.append(Token("eof", "", last, 1))
    return tokens


class _Reader:
    """Recursive descent over the token list, producing a RawFile."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def skip_newlines(self) -> None:
        while self.current.kind == "newline":
            self.pos += 1

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.current
        found = tok.text or tok.kind
        raise _Abort(_error(tok.line, tok.column, f"{message}, found {found!r}", "Syntax"))

    def expect(self, kind: str, text: str | None = None) -> Token:
        self.skip_newlines()
        tok = self.current
        if tok.kind != kind or (text is not None and tok.text != text):
            self.fail(f"expected {text or kind!r}")
        return self.advance()

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.current.kind == kind and (text is None or self.current.text == text)

    def read_file(self) -> RawFile:
        raw = RawFile()
        while True:
            self.skip_newlines()
            tok = self.current
            if tok.kind == "eof":
                return raw
            if tok.kind != "word":
                self.fail("expected a block keyword")
            self.advance()
            if tok.text == "vocab":
                raw.vocab_seen = True
                raw.indicators.extend(self.read_vocab())
            elif tok.text == "rules":
                raw.rules.extend(self.read_rules())
            elif tok.text == "signals":
                raw.signals.extend(self.read_signals())
            elif tok.text == "scenario":
                name = self.expect("string").text
                raw.scenarios.append((name, self.read_seeds(), tok.line, tok.column))
            else:
                self.fail("expected vocab, rules, signals or scenario", tok)

    def read_vocab(self) -> list[RawIndicator]:
        self.expect("punct", "{")
        indicators = []
        while True:
            self.skip_newlines()
            if self.at("punct", "}"):
                self.advance()
                return indicators
            kw = self.expect("word", "indicator")
            causa = self.expect("word").text
            label = self.expect("string").text
            self.expect("punct", "{")
            domain = []
            while True:
                self.skip_newlines()
                if self.at("punct", "}"):
                    self.advance()
                    break
                domain.append(self.expect("word").text)
            constancy = []
            if self.at("word", "constancy"):
                self.advance()
                while self.at("word"):
                    constancy.append(self.advance().text)
                if not constancy:
                    self.fail("expected constancy successus")
            indicators.append(RawIndicator(causa, label, domain, constancy, kw.line, kw.column))

    def read_pattern(self, stops: tuple[str, ...]) -> RawTerm:
        self.skip_newlines()
        first = self.current
        tokens = []
        while True:
            self.skip_newlines()
            tok = self.current
            if tok.kind == "word" and tok.text not in stops:
                tokens.append(tok.text)
            elif tok.kind == "string":
                tokens.append(f'"{tok.text}"')
            else:
                break
            self.advance()
        if not tokens:
            self.fail("expected a pattern")
        return RawTerm(tokens, first.line, first.column)

    def read_pattern_list(self, stops: tuple[str, ...]) -> list[RawTerm]:
        patterns = [self.read_pattern(stops)]
        while self.at("punct", ","):
            self.advance()
            patterns.append(self.read_pattern(stops))
        return patterns

    def read_rules(self) -> list[RawRule]:
        self.expect("punct", "{")
        rules = []
        while True:
            self.skip_newlines()
            if self.at("punct", "}"):
                self.advance()
                return rules
            klass = self.expect("word")
            rule_id = self.expect("word").text
            distinct = False
            if self.at("word", "distinct"):
                self.advance()
                distinct = True
            self.expect("punct", "{")
            self.expect("word", "when")
            when = self.read_pattern_list(("then",))
            self.expect("word", "then")
            then = self.read_pattern_list(())
            self.expect("punct", "}")
            rules.append(RawRule(klass.text, rule_id, distinct, when, then,
                                 klass.line, klass.column))

    def read_line_term(self, stops: tuple[str, ...] = ()) -> RawTerm:
        first = self.current
        tokens = []
        while self.at("word") and self.current.text not in stops:
            tokens.append(self.advance().text)
        if not tokens:
            self.fail("expected a term")
        return RawTerm(tokens, first.line, first.column)

    def read_signals(self) -> list[RawTerm]:
        self.expect("punct", "{")
        signals = []
        while True:
            self.skip_newlines()
            if self.at("punct", "}"):
                self.advance()
                return signals
            signals.append(self.read_line_term())

    def read_seeds(self) -> list[RawTerm]:
        self.expect("punct", "{")
        seeds = []
        while True:
            self.skip_newlines()
            if self.at("punct", "}"):
                self.advance()
                return seeds
            self.expect("word", "seed")
            seeds.append(self.read_line_term(("seed",)))


class _Checker:
    """Second pass: turns raw declarations into validated model objects."""

    def __init__(self, raw: RawFile, default_name: str):
        self.raw = raw
        self.default_name = default_name
        self.diagnostics: list[Diagnostic] = []

    def error(self, where, message: str, code: str = "") -> None:
        self.diagnostics.append(_error(where.line, where.column, message, code))

    def warn(self, where, message: str, code: str = "") -> None:
        self.diagnostics.append(_warning(where.line, where.column, message, code))

    def effectus_problem(self, e: Effectus, vocab: Vocabulary) -> str | None:
        if e.causa not in vocab.causae:
            return f"{e.literal}: indicator {e.causa} is not declared"
        if not vocab.effectus_valid(e):
            domain = " ".join(vocab.domain(e.causa))
            return (f"{e.literal}: {e.successus} is not in the domain of indicator "
                    f"{e.causa} {{ {domain} }}, the pair denotes the neutrum")
        return None

    def vocabulary(self) -> Vocabulary:
        raw = self.raw
        if not raw.vocab_seen:
            self.diagnostics.append(_error(1, 1, "missing vocab block", "MissingVocab"))
        vocab = Vocabulary(indicators=tuple(
            IndicatorDecl(causa=i.causa, label=i.label, domain=tuple(i.domain),
                          constancy=tuple(i.constancy))
            for i in raw.indicators))
        positions = {k: (i.line, i.column) for k, i in enumerate(raw.indicators)}
        self.diagnostics.extend(validate_vocabulary(vocab, positions))
        return vocab

    def pattern(self, raw: RawTerm, vocab: Vocabulary) -> Pattern | None:
        try:
            atoms = tuple(parse_pattern_atom(tok, vocab) for tok in raw.tokens)
        except TermSyntaxError as exc:
            self.error(raw, exc.detail, "Syntax")
            return None
        ok = True
        for atom in atoms:
            if isinstance(atom, Effectus):
                problem = self.effectus_problem(atom, vocab)
                if problem:
                    self.error(raw, problem, "InvalidEffectus")
                    ok = False
            elif isinstance(atom, SuccVar) and atom.causa not in vocab.causae:
                self.error(raw, f"{atom.literal}: indicator {atom.causa} is not declared",
                           "InvalidEffectus")
                ok = False
        return Pattern(normalize_atoms(atoms, vocab)) if ok else None

    def rules(self, vocab: Vocabulary) -> list[Rule]:
        rules = []
        seen = {"signal"}
        for raw in self.raw.rules:
            try:
                klass = RuleClass(raw.klass)
            except ValueError:
                self.error(raw, f"unknown rule class {raw.klass!r}, expected "
                                "structural, behavioural or equivalence", "RuleClass")
                continue
            if raw.id in seen:
                self.error(raw, f"rule {raw.id} is declared more than once", "DuplicateRule")
                continue
            seen.add(raw.id)
            when = [self.pattern(p, vocab) for p in raw.when]
            then = [self.pattern(p, vocab) for p in raw.then]
            if None in when or None in then:
                continue
            rule = Rule(id=raw.id, klass=klass, conditions=tuple(when),
                        consequents=tuple(then), distinct_vars=raw.distinct)
            try:
                check_rule(rule)
            except UnboundVariable as exc:
                self.error(raw, exc.detail, "UnboundVariable")
                continue
            rules.append(rule)
        rules.append(signal_rule(vocab))
        return rules

    def order_one(self, raw: RawTerm, vocab: Vocabulary, what: str) -> Term | None:
        try:
            term = parse_term(raw.text)
        except TermSyntaxError as exc:
            self.error(raw, f"{what} {raw.text}: {exc.detail}", "Syntax")
            return None
        except TermLengthExceeded as exc:
            self.error(raw, f"{what}: {exc.detail}", "TermLength")
            return None
        if not term.atoms or not all(isinstance(a, Effectus) for a in term.atoms):
            self.error(raw, f"{what} {raw.text} must be an effectus sequence", "NotOrderOne")
            return None
        problems = [p for p in (self.effectus_problem(a, vocab) for a in term.atoms) if p]
        for problem in problems:
            self.error(raw, f"{what} {problem}", "InvalidEffectus")
        return None if problems else normalize(term, vocab)

    def signals(self, vocab: Vocabulary) -> list[Term]:
        signals = []
        for raw in self.raw.signals:
            body = self.order_one(raw, vocab, "signal")
            if body is not None:
                signals.append(normalize(Term((CAPTURE_INV, FACT) + body.atoms), vocab))
        return signals

    def scenario_header(self) -> tuple[str, list[RawTerm]]:
        scenarios = self.raw.scenarios
        if not scenarios:
            self.diagnostics.append(_warning(1, 1, "no scenario block, no seeds", "NoScenario"))
            return self.default_name, []
        for name, _, line, column in scenarios[1:]:
            self.diagnostics.append(_error(line, column, f"second scenario block {name!r}",
                                           "DuplicateScenario"))
        name, seeds, _, _ = scenarios[0]
        return name, seeds

    def unused(self, vocab: Vocabulary, rules: list[Rule], seeds, signals) -> None:
        mentioned = set()
        producible = set()
        for t in list(seeds) + list(signals):
            for a in t.atoms:
                if isinstance(a, Effectus):
                    mentioned.add(a.causa)
                    producible.add(a)
        for r in rules:
            for p in r.conditions + r.consequents:
                for a in p.atoms:
                    if isinstance(a, (Effectus, SuccVar)):
                        mentioned.add(a.causa)
            for p in r.consequents:
                producible.update(a for a in p.atoms if isinstance(a, Effectus))
        for index, decl in enumerate(vocab.indicators):
            if decl.causa not in mentioned:
                raw = self.raw.indicators[index]
                self.warn(raw, f"indicator {decl.causa} is never used", "UnusedIndicator")
        by_id = {r.id: r for r in self.raw.rules}
        for r in rules:
            if r.id not in by_id:
                continue
            # only concrete condition atoms can be checked
            missing = [a for p in r.conditions for a in p.atoms
                       if isinstance(a, Effectus) and a not in producible]
            if missing:
                self.warn(by_id[r.id], f"rule {r.id} may never fire: "
                          f"{missing[0].literal} is never produced", "UnusedRule")

    def check(self) -> Scenario | None:
        vocab = self.vocabulary()
        rules = self.rules(vocab)
        signals = self.signals(vocab)
        name, raw_seeds = self.scenario_header()
        seeds = [self.order_one(raw, vocab, "seed") for raw in raw_seeds]
        if any(d.severity is Severity.ERROR for d in self.diagnostics):
            return None
        self.unused(vocab, rules, seeds, signals)
        return Scenario(name=name, vocabulary=vocab, rules=tuple(rules),
                        seeds=tuple(seeds), signals=tuple(signals))


def parse(src: SourceFile) -> tuple[Scenario | None, list[Diagnostic]]:
    """Parse and validate; no scenario is returned when any error is reported."""
    try:
        raw = _Reader(tokenize(src.content)).read_file()
    except _Abort as abort:
        return None, [abort.diagnostic]
    checker = _Checker(raw, Path(src.path).stem or "scenario")
    scenario = checker.check()
    diagnostics = sorted(checker.diagnostics, key=lambda d: (d.line, d.column))
    logger.debug("parsed %s: %d rules, %d diagnostics", src.path,
                 len(raw.rules), len(diagnostics))
    return scenario, diagnostics


def parse_file(path: str | Path) -> tuple[Scenario | None, list[Diagnostic]]:
    path = Path(path)
    return parse(SourceFile(path=str(path), content=path.read_text(encoding="utf-8")))


def parse_text(text: str, path: str = "<input>") -> tuple[Scenario | None, list[Diagnostic]]:
    return parse(SourceFile(path=path, content=text))


def load_scenario(path: str | Path) -> Scenario:
    """Parse a scenario file, raising ScenarioError when it holds any error.

    Warnings are logged; the raised error carries every diagnostic.
    """
    scenario, diagnostics = parse_file(path)
    if scenario is None:
        errors = sum(d.severity is Severity.ERROR for d in diagnostics)
        raise ScenarioError(f"{path}: {errors} error(s)", diagnostics)
    for d in diagnostics:
        logger.warning(d.render(str(path)))
    return scenario


def format_scenario(sc: Scenario) -> str:
    """Pretty-print a scenario so that parsing the text gives it back."""
    lines = ["vocab {"]
    for decl in sc.vocabulary.indicators:
        line = f'  indicator {decl.causa} "{decl.label}" {{ {" ".join(decl.domain)} }}'
        if decl.constancy:
            line += " constancy " + " ".join(decl.constancy)
        lines.append(line)
    lines += ["}", "", "rules {"]
    builtin = signal_rule(sc.vocabulary)
    for r in sc.rules:
        if r == builtin:
            continue
        distinct = " distinct" if r.distinct_vars else ""
        when = ", ".join(p.literal for p in r.conditions)
        then = ", ".join(p.literal for p in r.consequents)
        lines.append(f"  {r.klass.value} {r.id}{distinct} {{ when {when} then {then} }}")
    lines += ["}", "", "signals {"]
    for s in sc.signals:
        lines.append(f"  {signal_body(s).literal}")
    lines += ["}", "", f'scenario "{sc.name}" {{']
    for t in sc.seeds:
        lines.append(f"  seed {t.literal}")
    lines.append("}")
    return "\n".join(lines) + "\n"
