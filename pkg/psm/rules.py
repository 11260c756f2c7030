"""Rules, patterns and matching.

Pattern tokens follow the term literal syntax plus two kinds of variable:
an uppercase bare token (``X``) stands for a non-empty effectus sequence,
a lowercase successus in an effectus token (``x:P``) stands for a single
successus of that causa. Successus names known to the vocabulary always
win over the variable reading.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

from pydantic import BaseModel, ConfigDict

from .calculus import (Action, Effectus, Order2, Term, normalize,
                       normalize_atoms, parse_atom)
from .errors import TermSyntaxError, UnboundVariable
from .vocabulary import Vocabulary, intersection_vocabulary

logger = logging.getLogger(__name__)


class RuleClass(str, Enum):
    STRUCTURAL = "structural"
    BEHAVIOURAL = "behavioural"
    EQUIVALENCE = "equivalence"


@dataclass(frozen=True, slots=True)
class SeqVar:
    name: str

    @property
    def literal(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class SuccVar:
    """An effectus whose successus is a variable: ``x:P``."""
    name: str
    causa: str

    @property
    def literal(self) -> str:
        return f"{self.name}:{self.causa}"


PatternAtom = Union[Order2, Effectus, Action, SeqVar, SuccVar]


@dataclass(frozen=True, slots=True)
class Pattern:
    atoms: tuple = ()

    @property
    def literal(self) -> str:
        return " ".join(a.literal for a in self.atoms)

    @property
    def seq_vars(self) -> frozenset:
        return frozenset(a.name for a in self.atoms if isinstance(a, SeqVar))

    @property
    def succ_vars(self) -> frozenset:
        return frozenset(a.name for a in self.atoms if isinstance(a, SuccVar))

    def concrete_effectus(self) -> list[Effectus]:
        return [a for a in self.atoms if isinstance(a, Effectus)]

    def __str__(self) -> str:
        return self.literal


def parse_pattern_atom(token: str, vocab: Vocabulary) -> PatternAtom:
    if ":" not in token and not token.startswith('"'):
        if token[:1].isupper() and token.isidentifier():
            return SeqVar(token)
        if token in ("!", "?", "!-", "?-", "!⁻¹", "?⁻¹"):
            return parse_atom(token)
        raise TermSyntaxError(f"malformed pattern atom {token!r}")
    atom = parse_atom(token)
    if (isinstance(atom, Effectus) and atom.successus not in vocab.successus_universe
            and atom.successus[:1].islower()):
        return SuccVar(atom.successus, atom.causa)
    return atom


def parse_pattern(text: str, vocab: Vocabulary) -> Pattern:
    """Parse a pattern literal; the result is stored in normal form."""
    tokens = text.split()
    if not tokens:
        raise TermSyntaxError("empty pattern")
    atoms = tuple(parse_pattern_atom(tok, vocab) for tok in tokens)
    return Pattern(normalize_atoms(atoms, vocab))


@dataclass(frozen=True, slots=True)
class Binding:
    seq: tuple = ()    # sorted (name, effectus tuple) pairs
    succ: tuple = ()   # sorted (name, successus) pairs

    @classmethod
    def from_maps(cls, seq: dict, succ: dict) -> "Binding":
        return cls(tuple(sorted(seq.items())), tuple(sorted(succ.items())))

    @property
    def causa_seq(self) -> dict:
        return dict(self.seq)

    @property
    def successus(self) -> dict:
        return dict(self.succ)

    @property
    def sort_key(self) -> tuple:
        return (tuple((n, tuple(e.literal for e in v)) for n, v in self.seq), self.succ)

    def seq_values_distinct(self) -> bool:
        values = [v for _, v in self.seq]
        return len(values) == len(set(values))

    def __str__(self) -> str:
        parts = [f"{n}={' '.join(e.literal for e in v)}" for n, v in self.seq]
        parts += [f"{n}={v}" for n, v in self.succ]
        return "{" + ", ".join(parts) + "}"


EMPTY_BINDING = Binding()


def match_pattern(p: Pattern, t: Term, seed: Binding = EMPTY_BINDING) -> list[Binding]:
    """All extensions of ``seed`` under which ``p`` instantiates exactly to ``t``."""
    patoms, tatoms = p.atoms, t.atoms
    seq, succ = dict(seed.seq), dict(seed.succ)
    found: list[Binding] = []

    def walk(i: int, j: int) -> None:
        if i == len(patoms):
            if j == len(tatoms):
                found.append(Binding.from_maps(seq, succ))
            return
        pa = patoms[i]
        if isinstance(pa, SeqVar):
            bound = seq.get(pa.name)
            if bound is not None:
                if tatoms[j:j + len(bound)] == bound:
                    walk(i + 1, j + len(bound))
                return
            k = j
            while k < len(tatoms) and isinstance(tatoms[k], Effectus):
                k += 1
                seq[pa.name] = tatoms[j:k]
                walk(i + 1, k)
            seq.pop(pa.name, None)
            return
        if j >= len(tatoms):
            return
        ta = tatoms[j]
        if isinstance(pa, SuccVar):
            if not isinstance(ta, Effectus) or ta.causa != pa.causa:
                return
            bound = succ.get(pa.name)
            if bound is None:
                succ[pa.name] = ta.successus
                walk(i + 1, j + 1)
                del succ[pa.name]
            elif bound == ta.successus:
                walk(i + 1, j + 1)
            return
        if pa == ta:
            walk(i + 1, j + 1)

    walk(0, 0)
    return sorted(set(found), key=lambda b: b.sort_key)


def instantiate(p: Pattern, b: Binding) -> tuple:
    seq, succ = dict(b.seq), dict(b.succ)
    atoms: list = []
    for a in p.atoms:
        if isinstance(a, SeqVar):
            if a.name not in seq:
                raise UnboundVariable(f"variable {a.name} is unbound in {p.literal}")
            atoms.extend(seq[a.name])
        elif isinstance(a, SuccVar):
            if a.name not in succ:
                raise UnboundVariable(f"variable {a.name} is unbound in {p.literal}")
            atoms.append(Effectus(succ[a.name], a.causa))
        else:
            atoms.append(a)
    return tuple(atoms)


class Rule(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    klass: RuleClass
    conditions: tuple[Pattern, ...]
    consequents: tuple[Pattern, ...]
    distinct_vars: bool = False

    def unbound_variables(self) -> set[str]:
        bound = set()
        for c in self.conditions:
            bound |= c.seq_vars | c.succ_vars
        needed = set()
        for c in self.consequents:
            needed |= c.seq_vars | c.succ_vars
        return needed - bound


def make_rule(rule_id: str, klass: RuleClass, when: Iterable[str], then: Iterable[str],
              vocab: Vocabulary, distinct: bool = False) -> Rule:
    rule = Rule(
        id=rule_id, klass=klass,
        conditions=tuple(parse_pattern(w, vocab) for w in when),
        consequents=tuple(parse_pattern(t, vocab) for t in then),
        distinct_vars=distinct,
    )
    check_rule(rule)
    return rule


def check_rule(rule: Rule) -> None:
    if not rule.conditions or not rule.consequents:
        raise UnboundVariable(f"rule {rule.id} needs at least one condition and one consequent")
    unbound = rule.unbound_variables()
    if unbound:
        raise UnboundVariable(
            f"rule {rule.id}: consequent variables {', '.join(sorted(unbound))} "
            f"are not bound by any condition")


@dataclass(frozen=True, slots=True)
class RuleApplication:
    rule_id: str
    binding: Binding
    matched_nodes: tuple
    produced: tuple

    @property
    def sort_key(self) -> tuple:
        return (self.rule_id, tuple(t.sort_key for t in self.matched_nodes),
                self.binding.sort_key)


def applicable(r: Rule, nodes: Iterable[Term], vocab: Vocabulary,
               fresh: set | None = None) -> list[RuleApplication]:
    """Every consistent assignment of one node per condition.

    With ``fresh`` given, only assignments touching at least one of those
    nodes are returned (semi-naive evaluation).
    """
    ordered = sorted(set(nodes), key=lambda t: t.sort_key)
    found: list[RuleApplication] = []

    def join(index: int, binding: Binding, matched: tuple) -> None:
        if index == len(r.conditions):
            if fresh is not None and not any(m in fresh for m in matched):
                return
            produced = tuple(
                normalize(Term(instantiate(c, binding)), vocab) for c in r.consequents)
            found.append(RuleApplication(r.id, binding, matched, produced))
            return
        for node in ordered:
            if r.distinct_vars and node in matched:
                continue
            for extended in match_pattern(r.conditions[index], node, binding):
                if r.distinct_vars and not extended.seq_values_distinct():
                    continue
                join(index + 1, extended, matched + (node,))

    join(0, EMPTY_BINDING, ())
    found.sort(key=lambda a: a.sort_key)
    return found


def signal_rule(vocab: Vocabulary | None = None) -> Rule:
    """A capture becomes a fact when its signal is known: ?X, ?-X !X -> !X."""
    return make_rule("signal", RuleClass.STRUCTURAL,
                     ["? X", "?- X ! X"], ["! X"], vocab or Vocabulary())


INTERSECTION_RULES = (
    # visibility
    ("vis_b1_r1", RuleClass.STRUCTURAL, ["X b1:P", "Y r1:P"], ["? Y r1:P"], False),
    ("vis_b2_r1", RuleClass.STRUCTURAL, ["X b2:P", "Y r1:P"], ["? Y r1:P"], False),
    ("vis_b2_g2", RuleClass.STRUCTURAL, ["X b2:P", "Y g2:P"], ["? Y g2:P"], False),
    # movement
    ("move_b2_b1", RuleClass.STRUCTURAL, ["+:B b2:P"], ["+:B b1:P"], False),
    ("move_b1_r1", RuleClass.STRUCTURAL, ["+:B b1:P"], ["+:B r1:P"], False),
    ("move_g2_g1", RuleClass.STRUCTURAL, ["X +:B g2:P"], ["X +:B g1:P"], False),
    ("move_g1_r1", RuleClass.STRUCTURAL, ["+:B g1:P"], ["+:B r1:P"], False),
    # the cyclist seed carries no movement atom
    ("drift_g2_g1", RuleClass.STRUCTURAL, ["x:Q g2:P"], ["x:Q g1:P"], False),
    ("drift_g1_r1", RuleClass.STRUCTURAL, ["x:Q g1:P"], ["x:Q r1:P"], False),
    # behaviour
    ("stop", RuleClass.BEHAVIOURAL, ["! +:B ü:Q +:R", "! r:Q g1:P"], ['"0B"'], False),
    # same circumstances written from the ego position; nothing forms its first fact
    ("stop_b1", RuleClass.BEHAVIOURAL, ["! +:B b1:P ü:Q r1:P", "! r:Q r1:P"], ['"0B"'],
     False),
    ("stop_crossing", RuleClass.BEHAVIOURAL, ["! ü:Q r1:P", "! r:Q r1:P"], ['"0B"'], False),
    ("collision", RuleClass.BEHAVIOURAL, ["X x:P", "Y x:P"], ['"00"'], True),
    # equivalence
    ("forward", RuleClass.EQUIVALENCE, ["! b1:P X x:Q r1:P"], ["! x:Q +:R"], False),
)


def intersection_rules(vocab: Vocabulary | None = None) -> list[Rule]:
    vocab = vocab or intersection_vocabulary()
    rules = [make_rule(rule_id, klass, when, then, vocab, distinct)
             for rule_id, klass, when, then, distinct in INTERSECTION_RULES]
    rules.append(signal_rule(vocab))
    return rules
