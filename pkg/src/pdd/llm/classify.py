from __future__ import annotations

import logging

from pdd.corpus import DEFAULT_SAMPLE_SIZE, Column, Dataset, sample_top_k
from pdd.errors import UnparseableReply
from pdd.llm.parse import LlmVerdict, parse_verdict
from pdd.llm.prompts import Conversation, assemble_conversation, build_prompt_bundle
from pdd.llm.transport import Transport
from pdd.verdicts import ColumnVerdict

log = logging.getLogger(__name__)

DETECTOR_ID = "llm"


def build_conversation(ds: Dataset, col: Column, k: int = DEFAULT_SAMPLE_SIZE) -> Conversation:
    return assemble_conversation(build_prompt_bundle(ds, col, sample_top_k(col, k)))


def classify_column_llm(
    ds: Dataset,
    col: Column,
    transport: Transport,
    k: int = DEFAULT_SAMPLE_SIZE,
) -> LlmVerdict:
    """Ask the model about one column.

    An unparseable reply is retried with the identical conversation up to
    ``transport.config.max_retries`` times, then re-raised. Transport
    errors and column mismatches propagate at once.
    """
    messages = build_conversation(ds, col, k).to_wire()
    retries = transport.config.max_retries
    for attempt in range(retries + 1):
        reply = transport.complete(messages, col.name)
        try:
            return parse_verdict(reply, col.name)
        except UnparseableReply:
            if attempt == retries:
                raise
            log.info("unparseable reply for %r, retrying (%d/%d)", col.name, attempt + 1, retries)
    raise AssertionError("unreachable")


def to_column_verdict(v: LlmVerdict) -> ColumnVerdict:
    return ColumnVerdict(column=v.column_name, personal=v.is_personal, detector=DETECTOR_ID, evidence=v.raw_reply)
