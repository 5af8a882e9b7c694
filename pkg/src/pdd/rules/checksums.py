"""Luhn (mod 10) and IBAN (ISO 7064 mod 97-10) check-digit validation."""

from __future__ import annotations

import re

from pdd.errors import BadFormat, BadLength, NotDigits

_SEPARATORS = re.compile(r"[ -]")
_IBAN_SHAPE = re.compile(r"[A-Z]{2}[0-9]{2}[A-Z0-9]{0,30}")
# Digit value after the Luhn doubling step, indexed by the original digit.
_DOUBLED = (0, 2, 4, 6, 8, 1, 3, 5, 7, 9)


def luhn_checksum(digits: str) -> int:
    """Luhn sum mod 10 of an all-digit string (0 means valid)."""
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = ord(ch) - 48
        total += _DOUBLED[d] if i & 1 else d
    return total % 10


def luhn_valid(digits: str, *, min_length: int = 12, max_length: int = 19) -> bool:
    """True iff *digits* (spaces and hyphens ignored) passes the Luhn check.

    Raises NotDigits for anything but ASCII digits and BadLength outside
    ``[min_length, max_length]`` (card-number lengths by default).
    """
    stripped = _SEPARATORS.sub("", digits)
    if not stripped or not (stripped.isascii() and stripped.isdigit()):
        raise NotDigits(f"not a digit string: {digits!r}")
    if not min_length <= len(stripped) <= max_length:
        raise BadLength(f"{len(stripped)} digits, expected {min_length}-{max_length}")
    return luhn_checksum(stripped) == 0


def iban_valid(s: str) -> bool:
    """Standard IBAN check: move the first four characters to the end,
    expand letters to 10..35 and require the integer to be 1 mod 97.

    Check digits outside 02..98 never validate, so each country+BBAN body
    has exactly one valid check-digit pair.
    """
    compact = s.replace(" ", "").upper()
    if not _IBAN_SHAPE.fullmatch(compact):
        raise BadFormat(f"not IBAN-shaped: {s!r}")
    if not 2 <= int(compact[2:4]) <= 98:
        return False
    rearranged = compact[4:] + compact[:4]
    expanded = "".join(str(int(ch, 36)) for ch in rearranged)
    return int(expanded) % 97 == 1


def iban_check_digits(country: str, bban: str) -> str:
    """Compute the two check digits for *country* + *bban*."""
    expanded = "".join(str(int(ch, 36)) for ch in (bban + country + "00").upper())
    return f"{98 - int(expanded) % 97:02d}"
