"""The effectus-sequence calculus.

Terms are flat atom sequences. Order-2 symbols (``!``, ``?`` and their
inverses) sit in the same list as effectus, so a term reads as a chain of
segments ``prefix body prefix body ...`` where a prefix is a run of order-2
atoms and a body a run of effectus.

E-equality is decided by rewriting both sides to a canonical form with six
fixed rules, tried in order R1..R6, leftmost position first:

    R1  adjacent duplicates collapse (atoms anywhere, blocks inside a body)
    R2  Ω s1 Ω s2   -> Ω s1 s2
    R3  Ω1 s Ω2 s   -> Ω1 Ω2 s      (Ω1 may be empty)
    R4  ? ?-, ! !-  -> neutrum       (either order)
    R5  effectus outside W -> neutrum
    R6  φc:C s...   -> φc:_          (φ a constancy)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Protocol, Union

from .config import get_settings
from .errors import NotOrderOne, PsmError, TermLengthExceeded, TermSyntaxError

logger = logging.getLogger(__name__)

EMPTY_CAUSA = "_"
NEUTRUM_LITERAL = "I"


class Kind(str, Enum):
    FACT = "!"
    CAPTURE = "?"
    FACT_INV = "!-"
    CAPTURE_INV = "?-"


@dataclass(frozen=True, slots=True)
class Order2:
    kind: Kind

    @property
    def literal(self) -> str:
        return self.kind.value

    def __str__(self) -> str:
        return self.literal


@dataclass(frozen=True, slots=True)
class Effectus:
    successus: str
    causa: str

    @property
    def literal(self) -> str:
        return f"{self.successus}:{self.causa}"

    def __str__(self) -> str:
        return self.literal


@dataclass(frozen=True, slots=True)
class Action:
    """Opaque behaviour symbol such as ``0B`` (stop) or ``00`` (collision)."""
    name: str

    @property
    def literal(self) -> str:
        return f'"{self.name}"'

    def __str__(self) -> str:
        return self.literal


Atom = Union[Order2, Effectus, Action]

FACT = Order2(Kind.FACT)
CAPTURE = Order2(Kind.CAPTURE)
FACT_INV = Order2(Kind.FACT_INV)
CAPTURE_INV = Order2(Kind.CAPTURE_INV)
ORDER2_SYMBOLS = (FACT, CAPTURE, FACT_INV, CAPTURE_INV)

INVERSE_PAIRS = frozenset({
    (CAPTURE, CAPTURE_INV), (CAPTURE_INV, CAPTURE),
    (FACT, FACT_INV), (FACT_INV, FACT),
})

_ORDER2_TOKENS = {
    "!": FACT, "?": CAPTURE, "!-": FACT_INV, "?-": CAPTURE_INV,
    "!⁻¹": FACT_INV, "?⁻¹": CAPTURE_INV,
}


class EffectusTable(Protocol):
    """What normalization needs from a vocabulary."""

    def effectus_valid(self, e: Effectus) -> bool: ...

    def is_constancy(self, successus: str) -> bool: ...


@dataclass(frozen=True, slots=True)
class Term:
    atoms: tuple = ()
    normalized: bool = field(default=False, compare=False)

    @classmethod
    def of(cls, *atoms: Atom) -> "Term":
        return cls(tuple(atoms))

    @property
    def literal(self) -> str:
        if not self.atoms:
            return NEUTRUM_LITERAL
        return " ".join(a.literal for a in self.atoms)

    @property
    def sort_key(self) -> tuple:
        return tuple(a.literal for a in self.atoms)

    @property
    def head(self) -> Atom | None:
        return self.atoms[0] if self.atoms else None

    def is_order_one(self) -> bool:
        return not any(isinstance(a, Order2) for a in self.atoms)

    def is_neutrum(self) -> bool:
        return not self.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        return self.literal


NEUTRUM = Term((), normalized=True)


def parse_atom(token: str) -> Atom:
    if token in _ORDER2_TOKENS:
        return _ORDER2_TOKENS[token]
    if len(token) >= 3 and token[0] == token[-1] == '"':
        return Action(token[1:-1])
    successus, sep, causa = token.rpartition(":")
    if not sep or not successus or not causa:
        raise TermSyntaxError(f"malformed atom {token!r}, expected succ:Causa")
    return Effectus(successus, causa)


def parse_term(text: str, max_len: int | None = None) -> Term:
    """Read a term literal.

    Literals longer than ``max_len`` atoms (the configured cap by default)
    are rejected before any rewriting.
    """
    tokens = text.split()
    if not tokens:
        raise TermSyntaxError("empty term literal")
    cap = max_len if max_len is not None else get_settings().max_term_len
    if len(tokens) > cap:
        raise TermLengthExceeded(f"term of {len(tokens)} atoms exceeds the cap of {cap}")
    if tokens == [NEUTRUM_LITERAL]:
        return NEUTRUM
    return Term(tuple(parse_atom(tok) for tok in tokens))


def compose(seq: Term, atom: Atom) -> Term:
    if seq.atoms and seq.atoms[-1] == atom:
        return seq
    return Term(seq.atoms + (atom,))


def concat(s1: Term, s2: Term) -> Term:
    result = s1
    for atom in s2.atoms:
        result = compose(result, atom)
    return result


def apply_successus(omega: Order2, s: Term) -> Term:
    if not s.is_order_one():
        raise NotOrderOne(f"cannot prefix {omega.literal} to {s.literal}: already order 2")
    return Term((omega,) + s.atoms)


# -- rewriting ---------------------------------------------------------------

def _segments(atoms: tuple) -> list[tuple[int, int, int]]:
    """Split into (start, body_start, end) index triples."""
    segments = []
    i, n = 0, len(atoms)
    while i < n:
        start = i
        while i < n and isinstance(atoms[i], Order2):
            i += 1
        body = i
        while i < n and not isinstance(atoms[i], Order2):
            i += 1
        segments.append((start, body, i))
    return segments


def _r1(atoms: tuple, _vocab) -> Iterator[tuple]:
    n = len(atoms)
    for i in range(n - 1):
        for length in range(1, (n - i) // 2 + 1):
            window = atoms[i:i + 2 * length]
            if length > 1 and any(isinstance(a, Order2) for a in window):
                break
            if window[:length] == window[length:]:
                yield atoms[:i + length] + atoms[i + 2 * length:]


def _r2(atoms: tuple, _vocab) -> Iterator[tuple]:
    segments = _segments(atoms)
    for (a_start, a_body, a_end), (b_start, b_body, b_end) in zip(segments, segments[1:]):
        if b_body == b_end or a_body == a_start:
            continue
        if atoms[a_start:a_body] == atoms[b_start:b_body]:
            yield atoms[:a_end] + atoms[b_body:]


def _r3(atoms: tuple, _vocab) -> Iterator[tuple]:
    segments = _segments(atoms)
    for (a_start, a_body, a_end), (b_start, b_body, b_end) in zip(segments, segments[1:]):
        body = atoms[a_body:a_end]
        if body and body == atoms[b_body:b_end]:
            yield atoms[:a_body] + atoms[b_start:b_body] + body + atoms[b_end:]


def _r4(atoms: tuple, _vocab) -> Iterator[tuple]:
    for i in range(len(atoms) - 1):
        if (atoms[i], atoms[i + 1]) in INVERSE_PAIRS:
            yield atoms[:i] + atoms[i + 2:]


def _is_kept(e: Effectus, vocab: EffectusTable) -> bool:
    if e.causa == EMPTY_CAUSA:
        return vocab.is_constancy(e.successus)
    return vocab.effectus_valid(e)


def _r5(atoms: tuple, vocab: EffectusTable) -> Iterator[tuple]:
    for i, atom in enumerate(atoms):
        if isinstance(atom, Effectus) and not _is_kept(atom, vocab):
            yield atoms[:i] + atoms[i + 1:]


def _r6(atoms: tuple, vocab: EffectusTable) -> Iterator[tuple]:
    n = len(atoms)
    for i, atom in enumerate(atoms):
        if not isinstance(atom, Effectus) or not vocab.is_constancy(atom.successus):
            continue
        end = i + 1
        while end < n and not isinstance(atoms[end], Order2):
            end += 1
        if atom.causa != EMPTY_CAUSA or end > i + 1:
            yield atoms[:i] + (Effectus(atom.successus, EMPTY_CAUSA),) + atoms[end:]


REWRITE_RULES = (("R1", _r1), ("R2", _r2), ("R3", _r3),
                 ("R4", _r4), ("R5", _r5), ("R6", _r6))
# R1..R4 never consult the vocabulary
STRUCTURAL_RULES = REWRITE_RULES[:4]


def rewrites(atoms: tuple, vocab: EffectusTable | None,
             rules=REWRITE_RULES) -> Iterator[tuple[str, tuple]]:
    """Every single-step rewrite of ``atoms`` in canonical priority order."""
    for name, rule in rules:
        for result in rule(atoms, vocab):
            yield name, result


def normalize_atoms(atoms: tuple, vocab: EffectusTable | None, rules=REWRITE_RULES) -> tuple:
    while True:
        step = next(rewrites(atoms, vocab, rules), None)
        if step is None:
            return atoms
        atoms = step[1]


def normalize(t: Term, vocab: EffectusTable) -> Term:
    return Term(normalize_atoms(t.atoms, vocab), normalized=True)


def normalize_structure(t: Term) -> Term:
    """Rewrite with R1..R4 only, for terms whose vocabulary is unknown."""
    return Term(normalize_atoms(t.atoms, None, STRUCTURAL_RULES))


def e_equal(t1: Term, t2: Term, vocab: EffectusTable) -> bool:
    return normalize(t1, vocab).atoms == normalize(t2, vocab).atoms


# -- sequence realisation ----------------------------------------------------

def split(t: Term) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Separate an effectus sequence into its successus and causa sequences."""
    if not all(isinstance(a, Effectus) for a in t.atoms):
        raise NotOrderOne(f"{t.literal} is not an effectus sequence")
    return (tuple(a.successus for a in t.atoms), tuple(a.causa for a in t.atoms))


def realise(successus: tuple[str, ...], causae: tuple[str, ...]) -> Term:
    """Pair a successus sequence with a causa sequence (the mapping H)."""
    if len(successus) != len(causae):
        raise PsmError(
            f"cannot realise {len(successus)} successus over {len(causae)} causae")
    result = NEUTRUM
    for phi, c in zip(successus, causae):
        result = compose(result, Effectus(phi, c))
    return result


def commutes(t: Term) -> bool:
    return realise(*split(t)) == t
