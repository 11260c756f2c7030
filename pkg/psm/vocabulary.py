"""Indicators, their successus domains and the validity set W."""
from __future__ import annotations

from collections import Counter
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from .calculus import Effectus


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Diagnostic(BaseModel):
    model_config = ConfigDict(frozen=True)

    severity: Severity = Severity.ERROR
    line: int = 0
    column: int = 0
    message: str
    code: str = ""

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.line}:{self.column}: {self.severity.value}: {self.message}"


class IndicatorDecl(BaseModel):
    model_config = ConfigDict(frozen=True)

    causa: str
    label: str = ""
    domain: tuple[str, ...] = ()
    constancy: tuple[str, ...] = ()


class Vocabulary(BaseModel):
    model_config = ConfigDict(frozen=True)

    indicators: tuple[IndicatorDecl, ...] = Field(default_factory=tuple)

    _w: frozenset = PrivateAttr(default=frozenset())
    _constancy: frozenset = PrivateAttr(default=frozenset())

    def model_post_init(self, __context) -> None:
        self._w = frozenset(
            (phi, decl.causa) for decl in self.indicators for phi in decl.domain)
        self._constancy = frozenset(
            phi for decl in self.indicators for phi in decl.constancy)

    @property
    def W(self) -> frozenset:
        return self._w

    @property
    def causae(self) -> tuple[str, ...]:
        return tuple(decl.causa for decl in self.indicators)

    @property
    def successus_universe(self) -> frozenset:
        return frozenset(phi for decl in self.indicators for phi in decl.domain)

    def domain(self, causa: str) -> tuple[str, ...]:
        for decl in self.indicators:
            if decl.causa == causa:
                return decl.domain
        return ()

    def effectus_valid(self, e: Effectus) -> bool:
        return (e.successus, e.causa) in self._w

    def is_constancy(self, successus: str) -> bool:
        return successus in self._constancy


def effectus_valid(v: Vocabulary, e: Effectus) -> bool:
    return v.effectus_valid(e)


def validate_vocabulary(v: Vocabulary,
                        positions: dict[int, tuple[int, int]] | None = None) -> list[Diagnostic]:
    """One diagnostic per violation; ``positions`` maps indicator index to (line, column)."""
    diagnostics = []
    seen = Counter()
    for index, decl in enumerate(v.indicators):
        line, column = (positions or {}).get(index, (0, 0))
        seen[decl.causa] += 1
        if seen[decl.causa] == 2:
            diagnostics.append(Diagnostic(
                line=line, column=column, code="DuplicateCausa",
                message=f"indicator {decl.causa} is declared more than once"))
        if not decl.domain:
            diagnostics.append(Diagnostic(
                line=line, column=column, code="EmptyDomain",
                message=f"indicator {decl.causa} has an empty successus domain"))
        for phi, count in Counter(decl.domain).items():
            if count > 1:
                diagnostics.append(Diagnostic(
                    line=line, column=column, code="DuplicateSuccessus",
                    message=f"successus {phi} appears {count} times in the domain of {decl.causa}"))
        for phi in decl.constancy:
            if phi not in decl.domain:
                diagnostics.append(Diagnostic(
                    line=line, column=column, code="UndeclaredConstancy",
                    message=f"constancy {phi} is not in the domain of {decl.causa}"))
    return diagnostics


def intersection_vocabulary() -> Vocabulary:
    """The five indicators of the crossing scenario.

    Zone g2 is part of P's domain: the movement rules and the cyclist seed
    need it even though the indicator table omits it.
    """
    return Vocabulary(indicators=(
        IndicatorDecl(causa="P", label="Position", domain=("b1", "b2", "g1", "g2", "r1")),
        IndicatorDecl(causa="A", label="Extension", domain=("r", "f", "a", "l")),
        IndicatorDecl(causa="Q", label="Quality", domain=("ü", "r", "f", "a", "l")),
        IndicatorDecl(causa="R", label="Direction", domain=("<", ">", "+", "-")),
        IndicatorDecl(causa="B", label="Movement", domain=("0", "<", ">", "+", "-")),
    ))
