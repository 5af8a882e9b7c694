"""Reading ``{'column': true}`` verdicts out of free-form model replies."""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

from pdd.errors import ColumnMismatch, UnparseableReply

_ENTRY = re.compile(
    r"\{\s*(?P<q>['\"])(?P<key>(?:\\.|(?!(?P=q))[^\\])*)(?P=q)\s*:\s*"
    r"(?P<val>(?i:true|false))\s*,?\s*\}",
    re.DOTALL,
)


@dataclass(frozen=True)
class LlmVerdict:
    column_name: str
    is_personal: bool
    raw_reply: str


def render_verdict(column: str, personal: bool) -> str:
    """Canonical answer text, the same shape as the one-shot example."""
    return "{" + repr(column) + ": " + ("true" if personal else "false") + "}"


def _unquote(quote: str, body: str) -> str:
    try:
        value = ast.literal_eval(quote + body + quote)
    except (SyntaxError, ValueError):
        return body
    return value if isinstance(value, str) else body


def parse_verdict(reply: str, expected_column: str) -> LlmVerdict:
    """Extract the single-key boolean dictionary from *reply*.

    Surrounding prose and code fences are ignored. Either quote style and
    any casing of true/false is accepted; the key must equal
    *expected_column* exactly. Several dictionaries that disagree make the
    reply unparseable.
    """
    found = {
        (_unquote(m["q"], m["key"]), m["val"].lower() == "true") for m in _ENTRY.finditer(reply)
    }
    if not found:
        raise UnparseableReply(reply, "no single-key boolean dictionary found")
    if len(found) > 1:
        raise UnparseableReply(reply, "conflicting dictionaries")
    ((key, value),) = found
    if key != expected_column:
        raise ColumnMismatch(key, expected_column)
    return LlmVerdict(column_name=expected_column, is_personal=value, raw_reply=reply)
