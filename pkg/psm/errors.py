"""Error types raised by the engine.

Each error carries a human readable ``detail``; the CLI prints it and exits
with ``exit_code``.
"""


class PsmError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class TermSyntaxError(PsmError):
    pass


class NotOrderOne(PsmError):
    """A term holding order-2 atoms was used where an effectus sequence is required."""


class TermLengthExceeded(PsmError):
    pass


class UnboundVariable(PsmError):
    pass


class InvalidSeed(PsmError):
    pass


class InvalidSignal(PsmError):
    pass


class IterationBudgetExceeded(PsmError):
    pass


class PathBudgetExceeded(PsmError):
    pass


class UnknownNode(PsmError):
    pass


class KindMismatch(PsmError):
    pass


class UnknownRule(PsmError):
    pass


class ScenarioError(PsmError):
    def __init__(self, detail: str, diagnostics=()):
        super().__init__(detail)
        self.diagnostics = list(diagnostics)
