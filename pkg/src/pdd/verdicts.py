from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class ColumnVerdict:
    """One column's binary prediction plus whatever supports it.

    ``evidence`` is entity counts for the rule engine and the raw reply
    text for the LLM detector.
    """

    column: str
    personal: bool
    detector: str
    evidence: Any = field(default=None, compare=False)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "column": self.column,
            "personal": self.personal,
            "detector": self.detector,
        }
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out
