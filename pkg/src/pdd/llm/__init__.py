"""Context-aware LLM detector: prompt construction, transport, reply parsing."""

from pdd.llm.classify import build_conversation, classify_column_llm, to_column_verdict
from pdd.llm.parse import LlmVerdict, parse_verdict, render_verdict
from pdd.llm.prompts import (
    EXAMPLE_ANSWER,
    Conversation,
    Message,
    PromptBundle,
    assemble_conversation,
    build_data_prompt,
    build_example_pair,
    build_initial_prompt,
    build_prompt_bundle,
)
from pdd.llm.transport import HttpTransport, MockTransport, Transport, TransportConfig

__all__ = [
    "EXAMPLE_ANSWER",
    "Conversation",
    "HttpTransport",
    "LlmVerdict",
    "Message",
    "MockTransport",
    "PromptBundle",
    "Transport",
    "TransportConfig",
    "assemble_conversation",
    "build_conversation",
    "build_data_prompt",
    "build_example_pair",
    "build_initial_prompt",
    "build_prompt_bundle",
    "classify_column_llm",
    "parse_verdict",
    "render_verdict",
    "to_column_verdict",
]
