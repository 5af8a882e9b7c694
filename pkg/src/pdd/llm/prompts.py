"""Prompt texts and the four-message conversation sent per column.

The system message fixes role, task, motivation, and answer format; a
one-shot example pair shows the expected dictionary answer; the final user
message carries the dataset context and the column to classify.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from pdd.corpus import Column, Dataset, ValueSample, truncate_description
from pdd.errors import ColumnNotInDataset

QUESTION = (
    "Does this column, in the context of the dataset, contain information "
    "relating to a natural person?"
)

INITIAL_PROMPT = (
    "As a classifier of person-related data in tabular datasets, your task is to "
    "analyze the provided columns (each containing up to ten distinct values) and "
    "determine whether they contain information that originates from or relates to "
    "a person, even if it is not directly identifiable.\n"
    "Detecting person-related information helps ensure compliance with data "
    "protection regulations and safeguards individuals’ privacy and security.\n"
    "Output your results in a dictionary format with a boolean indicating if the "
    "column contains person-related data or not."
)

_EXAMPLE_COLUMN = "first_name_en_10"
_EXAMPLE_FEATURES = (
    "first_name_en_10",
    "last_name_en_10",
    "email_en_10",
    "phone_number",
    "address_en_10",
    "city_en_10",
    "country_en_10",
    "date",
    "target",
)
_EXAMPLE_VALUES = ("Tom", "Walter", "Mia", "Lena", "John", "Jack", "Felice", "Anna", "Lukas", "Will")

EXAMPLE_PROMPT = (
    "You can use the following example as a guideline:\n"
    "Classify the following column with careful consideration of the dataset description:\n"
    "\n"
    "Dataset:\n"
    "Title: 'Test Dataset'\n"
    "Description: 'This dataset was used for a linear regression.'\n"
    f"Features: {'[' + ', '.join(repr(f) for f in _EXAMPLE_FEATURES) + ']'}\n"
    "\n"
    "Column of the dataset to classify:\n"
    f"{_EXAMPLE_COLUMN!r}: [{', '.join(repr(v) for v in _EXAMPLE_VALUES)}]\n"
    "\n"
    f"{QUESTION}"
)

EXAMPLE_ANSWER = "{'first_name_en_10': true}"

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class PromptBundle:
    initial_prompt: str
    example_prompt: str
    example_answer: str
    data_prompt: str


@dataclass(frozen=True)
class Message:
    role: str
    content: str


ROLES = ("system", "user", "assistant", "user")


@dataclass(frozen=True)
class Conversation:
    messages: tuple[Message, ...]

    def __post_init__(self) -> None:
        if tuple(m.role for m in self.messages) != ROLES:
            raise ValueError("conversation roles must be system, user, assistant, user")

    def to_wire(self) -> list[dict[str, str]]:
        return [{"role": m.role, "content": m.content} for m in self.messages]

    def render(self) -> str:
        """Human-readable dump: one ``### role`` header per message."""
        blocks = [f"### {m.role}\n{m.content}" for m in self.messages]
        return "\n\n".join(blocks) + "\n"


def build_initial_prompt() -> str:
    return INITIAL_PROMPT


def build_example_pair() -> tuple[str, str]:
    return EXAMPLE_PROMPT, EXAMPLE_ANSWER


def format_feature_list(names: Sequence[str]) -> str:
    return "[" + ", ".join(repr(n) for n in names) + "]"


def format_values(values: Sequence[str]) -> str:
    """List literal of sampled values.

    All-numeric samples are written bare (``[3, 20]``); anything else is
    quoted (``['Tom', 'Mia']``).
    """
    if values and all(_NUMBER.fullmatch(v.strip()) for v in values):
        return "[" + ", ".join(v.strip() for v in values) + "]"
    return "[" + ", ".join(repr(v) for v in values) + "]"


def build_data_prompt(ds: Dataset, col: Column, sample: ValueSample) -> str:
    if not any(c is col or c == col for c in ds.columns):
        raise ColumnNotInDataset(col.name)
    return (
        "Classify the following column with careful consideration of the dataset description.\n"
        "\n"
        "Dataset:\n"
        f"Title: {ds.title}\n"
        f"Description: {truncate_description(ds.description)}\n"
        f"Features: {format_feature_list(ds.feature_names)}\n"
        "\n"
        "Column of the dataset to classify:\n"
        f"{col.name!r}: {format_values(sample.values)}\n"
        "\n"
        f"{QUESTION}"
    )


def build_prompt_bundle(ds: Dataset, col: Column, sample: ValueSample) -> PromptBundle:
    example_prompt, example_answer = build_example_pair()
    return PromptBundle(
        initial_prompt=build_initial_prompt(),
        example_prompt=example_prompt,
        example_answer=example_answer,
        data_prompt=build_data_prompt(ds, col, sample),
    )


def assemble_conversation(bundle: PromptBundle) -> Conversation:
    return Conversation(
        messages=(
            Message("system", bundle.initial_prompt),
            Message("user", bundle.example_prompt),
            Message("assistant", bundle.example_answer),
            Message("user", bundle.data_prompt),
        )
    )
