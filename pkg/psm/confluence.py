"""Exhaustive rewrite-order exploration.

``normalize`` commits to one rewrite order. This module follows every
order instead and collects all reachable normal forms, which tells whether
the fixed order loses anything. Every rewrite either shortens a term or
moves a constancy effectus to the empty causa, so the search is finite.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator

from .calculus import ORDER2_SYMBOLS, Effectus, Term, normalize, rewrites
from .errors import PsmError
from .vocabulary import IndicatorDecl, Vocabulary

logger = logging.getLogger(__name__)


def small_vocabulary() -> Vocabulary:
    """Two indicators with two successus each."""
    return Vocabulary(indicators=(
        IndicatorDecl(causa="C", label="first", domain=("a", "b")),
        IndicatorDecl(causa="D", label="second", domain=("a", "b")),
    ))


@dataclass(frozen=True)
class Divergence:
    term: Term
    normal_forms: tuple[Term, ...]
    canonical: Term


class NormalFormOracle:
    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self._cache: dict[tuple, frozenset] = {}

    def normal_forms(self, atoms: tuple) -> frozenset:
        """Every irreducible atom tuple reachable from ``atoms``."""
        cached = self._cache.get(atoms)
        if cached is not None:
            return cached
        successors = {result for _, result in rewrites(atoms, self.vocab)}
        if not successors:
            found = frozenset({atoms})
        else:
            found = frozenset().union(*(self.normal_forms(s) for s in successors))
        self._cache[atoms] = found
        return found

    def divergence(self, t: Term) -> Divergence | None:
        forms = self.normal_forms(t.atoms)
        if len(forms) < 2:
            return None
        return Divergence(
            term=t,
            normal_forms=tuple(sorted((Term(f) for f in forms), key=lambda x: x.sort_key)),
            canonical=normalize(t, self.vocab),
        )


def alphabet(vocab: Vocabulary) -> tuple:
    effectus = sorted((Effectus(phi, c) for phi, c in vocab.W), key=lambda e: e.literal)
    return ORDER2_SYMBOLS + tuple(effectus)


def all_terms(vocab: Vocabulary, max_len: int) -> Iterator[Term]:
    atoms = alphabet(vocab)
    for length in range(1, max_len + 1):
        for combo in itertools.product(atoms, repeat=length):
            yield Term(combo)


def representative(atoms: tuple, vocab: Vocabulary) -> tuple:
    """Rename successus, and indicators when all domains agree, by first use.

    Rewriting only compares atoms and asks W, so a term diverges exactly when
    its representative does. Needs a vocabulary without constancies.
    """
    domains = {d.causa: d.domain for d in vocab.indicators}
    order = [d.causa for d in vocab.indicators]
    interchangeable = len(set(domains.values())) == 1
    causa_map: dict[str, str] = {}
    names: dict[str, dict[str, str]] = {}
    renamed = []
    for atom in atoms:
        if not isinstance(atom, Effectus) or atom.causa not in domains:
            renamed.append(atom)
            continue
        if atom.causa not in causa_map:
            causa_map[atom.causa] = order[len(causa_map)] if interchangeable else atom.causa
            names[atom.causa] = {}
        target, used = causa_map[atom.causa], names[atom.causa]
        if atom.successus in domains[atom.causa] and atom.successus not in used:
            used[atom.successus] = domains[target][len(used)]
        renamed.append(Effectus(used.get(atom.successus, atom.successus), target))
    return tuple(renamed)


def find_divergences(vocab: Vocabulary, max_len: int,
                     up_to_renaming: bool = False) -> list[Divergence]:
    """Terms up to ``max_len`` atoms with more than one reachable normal form.

    With ``up_to_renaming`` only one term per renaming class is checked.
    """
    if up_to_renaming and any(d.constancy for d in vocab.indicators):
        raise PsmError("renaming classes need a vocabulary without constancies")
    oracle = NormalFormOracle(vocab)
    found = []
    checked = 0
    for t in all_terms(vocab, max_len):
        if up_to_renaming and representative(t.atoms, vocab) != t.atoms:
            continue
        checked += 1
        d = oracle.divergence(t)
        if d is not None:
            found.append(d)
    logger.info("Checked %d terms up to %d atoms: %d divergent", checked, max_len, len(found))
    return found
