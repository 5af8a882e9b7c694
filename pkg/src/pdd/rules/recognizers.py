"""Entity recognizers: regexes, checksum validators, and word-list lookups.

Each entity kind has exactly one compiled pattern, so hits of one kind
never overlap within a text. Checksum-validated kinds (credit cards, IBANs)
keep only validated matches and report confidence 1.0; every other kind
reports a fixed confidence.

PERSON and LOCATION use bundled word lists instead of an NER model. They
are a weak stand-in and are deliberately scored low (0.4).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from pdd.errors import RulesError, UnknownClass
from pdd.rules.checksums import iban_valid, luhn_valid


class EntityKind(str, enum.Enum):
    CREDIT_CARD = "CREDIT_CARD"
    CRYPTO = "CRYPTO"
    EMAIL_ADDRESS = "EMAIL_ADDRESS"
    IBAN_CODE = "IBAN_CODE"
    NRP = "NRP"
    PERSON = "PERSON"
    PHONE_NUMBER = "PHONE_NUMBER"
    US_SSN = "US_SSN"
    US_BANK_NUMBER = "US_BANK_NUMBER"
    US_DRIVER_LICENSE = "US_DRIVER_LICENSE"
    US_ITIN = "US_ITIN"
    US_PASSPORT = "US_PASSPORT"
    DATE_TIME = "DATE_TIME"
    IP_ADDRESS = "IP_ADDRESS"
    LOCATION = "LOCATION"
    URL = "URL"
    AU_ABN = "AU_ABN"
    AU_ACN = "AU_ACN"

    def __str__(self) -> str:
        return self.value


_PERSONAL_KINDS = frozenset(
    {
        EntityKind.CREDIT_CARD,
        EntityKind.CRYPTO,
        EntityKind.EMAIL_ADDRESS,
        EntityKind.IBAN_CODE,
        EntityKind.NRP,
        EntityKind.PERSON,
        EntityKind.PHONE_NUMBER,
        EntityKind.US_SSN,
        EntityKind.US_BANK_NUMBER,
        EntityKind.US_DRIVER_LICENSE,
        EntityKind.US_ITIN,
        EntityKind.US_PASSPORT,
    }
)

# Entity kind -> personal (True) / non-personal (False).
ENTITY_CLASS: dict[EntityKind, bool] = {k: k in _PERSONAL_KINDS for k in EntityKind}


def entity_is_personal(kind: EntityKind | str) -> bool:
    """Binary class of an entity kind; unknown names raise UnknownClass."""
    try:
        return ENTITY_CLASS[EntityKind(kind)]
    except ValueError:
        raise UnknownClass(str(kind)) from None


@dataclass(frozen=True)
class EntityHit:
    kind: EntityKind
    confidence: float
    cell_index: int
    span: tuple[int, int]

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")
        start, end = self.span
        if not 0 <= start <= end:
            raise ValueError(f"bad span: {self.span}")


@dataclass(frozen=True)
class Recognizer:
    kind: EntityKind
    pattern: re.Pattern[str]
    confidence: float
    validator: Callable[[str], bool] | None = None

    def find(self, text: str) -> Iterable[tuple[int, int]]:
        for m in self.pattern.finditer(text):
            group = "e" if "e" in self.pattern.groupindex else 0
            start, end = m.span(group)
            if start == end:
                continue
            if self.validator is not None and not _safe(self.validator, m.group(group)):
                continue
            yield start, end


def _safe(check: Callable[[str], bool], candidate: str) -> bool:
    try:
        return check(candidate)
    except RulesError:
        return False


# Fixed confidences for pattern-only kinds.
CONFIDENCE: dict[EntityKind, float] = {
    EntityKind.EMAIL_ADDRESS: 1.0,
    EntityKind.URL: 0.9,
    EntityKind.IP_ADDRESS: 0.9,
    EntityKind.PHONE_NUMBER: 0.6,
    EntityKind.DATE_TIME: 0.6,
    EntityKind.US_SSN: 0.5,
    EntityKind.CRYPTO: 0.5,
    EntityKind.PERSON: 0.4,
    EntityKind.LOCATION: 0.4,
}
DEFAULT_CONFIDENCE = 0.5
CHECKSUM_CONFIDENCE = 1.0

_OCTET = r"(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)"
_MONTH = (
    r"(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|June?|July?|"
    r"Aug(?:ust)?|Sep(?:t(?:ember)?)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)"
)

PATTERNS: dict[EntityKind, str] = {
    EntityKind.EMAIL_ADDRESS: (
        r"(?<![\w.%+-])[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}\b"
    ),
    EntityKind.URL: r"\b(?:https?://|www\.)[^\s<>\"']+[^\s<>\"'.,;:!?)]",
    EntityKind.IP_ADDRESS: (
        rf"(?<![\d.]){_OCTET}(?:\.{_OCTET}){{3}}(?!\.?\d)"
        r"|\b(?:[0-9A-Fa-f]{1,4}:){7}[0-9A-Fa-f]{1,4}\b"
    ),
    EntityKind.PHONE_NUMBER: (
        r"(?<![\w+])(?:"
        r"(?:\+\d{1,3}[ .-]?)?(?:\(\d{2,4}\)[ .-]?|\d{3}[ .-])\d{3}[ .-]\d{4}"
        r"|\+\d{1,3}[ .-]?\d{2,4}[ .-]?\d{3,8}(?:[ .-]\d{2,4})?"
        r")(?![\w-])"
    ),
    EntityKind.DATE_TIME: (
        r"\b\d{4}-(?:0[1-9]|1[0-2])-(?:0[1-9]|[12]\d|3[01])(?:[T ]\d{2}:\d{2}(?::\d{2})?)?\b"
        r"|\b(?:0?[1-9]|[12]\d|3[01])/(?:0?[1-9]|[12]\d|3[01])/(?:\d{4}|\d{2})\b"
        rf"|\b{_MONTH}\.? \d{{1,2}},? \d{{4}}\b"
        rf"|\b\d{{1,2}} {_MONTH}\.? \d{{4}}\b"
    ),
    EntityKind.CREDIT_CARD: r"(?<![\d-])\d(?:[ -]?\d){11,18}(?![\d-])",
    EntityKind.IBAN_CODE: r"\b[A-Z]{2}\d{2}(?: ?[A-Z0-9]{4}){2,7}(?: ?[A-Z0-9]{1,3})?\b",
    EntityKind.US_SSN: r"\b(?!000|666|9\d\d)\d{3}-(?!00)\d{2}-(?!0000)\d{4}\b",
    EntityKind.US_ITIN: r"\b9\d{2}-(?:5\d|6[0-5]|7\d|8[0-8]|9[0-24-9])-\d{4}\b",
    EntityKind.CRYPTO: r"\b(?:bc1[ac-hj-np-z02-9]{11,71}|[13][a-km-zA-HJ-NP-Z1-9]{25,34})\b",
    # Conservative stubs: these exist so every mapped kind has a recognizer.
    EntityKind.US_PASSPORT: r"\b[A-Z]\d{8}\b",
    EntityKind.US_DRIVER_LICENSE: r"\b[A-Z]{1,2}\d{5,7}\b",
    EntityKind.US_BANK_NUMBER: (
        r"(?i:\b(?:acct|account)(?:[ .]*(?:no|number|#))?[ .:#]*)(?P<e>\d{8,17})\b"
    ),
    EntityKind.AU_ABN: r"(?<!\d )\b\d{2} \d{3} \d{3} \d{3}\b(?! \d)",
    EntityKind.AU_ACN: r"(?<!\d )\b\d{3} \d{3} \d{3}\b(?! \d)",
}

NRP_TERMS = (
    "American", "Brazilian", "British", "Buddhist", "Catholic", "Chinese",
    "Christian", "Conservative", "Croatian", "Democrat", "French", "German",
    "Hindu", "Indian", "Italian", "Japanese", "Jewish", "Liberal", "Muslim",
    "Protestant", "Republican", "Socialist", "Spanish",
)

_CHECKSUMS: dict[EntityKind, Callable[[str], bool]] = {
    EntityKind.CREDIT_CARD: luhn_valid,
    EntityKind.IBAN_CODE: iban_valid,
}


def _alternation(words: Iterable[str]) -> re.Pattern[str]:
    ordered = sorted({w for w in words if w}, key=lambda w: (-len(w), w))
    return re.compile(r"\b(?:" + "|".join(re.escape(w) for w in ordered) + r")\b")


def read_wordlist(path: str | Path | None, default_name: str) -> list[str]:
    """One token per line; blank lines and ``#`` comments are skipped."""
    if path is None:
        text = resources.files("pdd.rules").joinpath("data", default_name).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=8)
def build_recognizers(
    names_path: str | None = None, locations_path: str | None = None
) -> tuple[Recognizer, ...]:
    recs = []
    for kind, pattern in PATTERNS.items():
        if kind in _CHECKSUMS:
            recs.append(Recognizer(kind, re.compile(pattern), CHECKSUM_CONFIDENCE, _CHECKSUMS[kind]))
        else:
            conf = CONFIDENCE.get(kind, DEFAULT_CONFIDENCE)
            recs.append(Recognizer(kind, re.compile(pattern), conf))
    recs.append(Recognizer(EntityKind.NRP, _alternation(NRP_TERMS), DEFAULT_CONFIDENCE))
    recs.append(
        Recognizer(
            EntityKind.PERSON,
            _alternation(read_wordlist(names_path, "given_names.txt")),
            CONFIDENCE[EntityKind.PERSON],
        )
    )
    recs.append(
        Recognizer(
            EntityKind.LOCATION,
            _alternation(read_wordlist(locations_path, "locations.txt")),
            CONFIDENCE[EntityKind.LOCATION],
        )
    )
    return tuple(sorted(recs, key=lambda r: list(EntityKind).index(r.kind)))


def recognize(
    text: str, cell_index: int = 0, recognizers: Sequence[Recognizer] | None = None
) -> list[EntityHit]:
    """All entity hits in *text*, ordered by span start then kind."""
    if not text:
        return []
    recs = build_recognizers() if recognizers is None else recognizers
    hits = [
        EntityHit(rec.kind, rec.confidence, cell_index, span)
        for rec in recs
        for span in rec.find(text)
    ]
    hits.sort(key=lambda h: (h.span[0], h.kind.value))
    return hits
