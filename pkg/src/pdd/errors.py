"""Exception hierarchy shared by all pdd modules."""

from __future__ import annotations


class PddError(Exception):
    """Base class for every error raised by pdd."""


class ConfigError(PddError):
    pass


# corpus


class CorpusError(PddError, ValueError):
    pass


class MissingHeader(CorpusError):
    pass


class DuplicateColumn(CorpusError):
    def __init__(self, name: str) -> None:
        super().__init__(f"duplicate column name: {name!r}")
        self.name = name


class UnreadableFile(CorpusError):
    pass


class MalformedMetadata(CorpusError):
    pass


class MalformedLabels(CorpusError):
    pass


class UnknownColumn(CorpusError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown column: {name!r}")
        self.name = name


class EmptyColumn(CorpusError):
    pass


# rules


class RulesError(PddError, ValueError):
    pass


class NotDigits(RulesError):
    pass


class BadLength(RulesError):
    pass


class BadFormat(RulesError):
    pass


class RowOutOfRange(RulesError, IndexError):
    pass


# llm


class LlmError(PddError):
    pass


class ColumnNotInDataset(LlmError, KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"column not in dataset: {self.name!r}"


class UnparseableReply(LlmError, ValueError):
    def __init__(self, reply: str, reason: str = "") -> None:
        msg = f"could not parse reply {reply[:80]!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.reply = reply


class ColumnMismatch(LlmError, ValueError):
    def __init__(self, got: str, expected: str) -> None:
        super().__init__(f"reply names column {got!r}, expected {expected!r}")
        self.got = got
        self.expected = expected


class TransportError(LlmError):
    pass


# evaluation


class EvalError(PddError, ValueError):
    pass


class MissingLabel(EvalError):
    def __init__(self, column: str) -> None:
        super().__init__(f"no ground-truth label for column {column!r}")
        self.column = column


class EmptyEvaluation(EvalError):
    pass


class SingleClassTruth(EvalError):
    pass


class UnknownClass(EvalError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown class: {name!r}")
        self.name = name


class MalformedInput(EvalError):
    pass
