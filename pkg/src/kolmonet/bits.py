"""Binary strings and the self-delimiting pair code.

Strings are plain ``str`` objects over ``"0"``/``"1"``. The pair code is
``[x, y] = 0^|x| 1 x y``; tuples nest to the right, so ``[a, b, c]`` is
``[a, [b, c]]``.
"""
from __future__ import annotations

from itertools import product
from typing import Iterator

EMPTY_TOKEN = "-"


class PairFormatError(ValueError):
    """Raised when a string is not a well-formed pair encoding."""


def check_bits(s: str) -> str:
    if not isinstance(s, str) or s.strip("01"):
        raise ValueError(f"not a bit string: {s!r}")
    return s


def parse_bits(token: str) -> str:
    """Parse the textual form used in files and on the command line."""
    token = token.strip()
    if token == EMPTY_TOKEN:
        return ""
    return check_bits(token)


def render_bits(s: str) -> str:
    return s if s else EMPTY_TOKEN


def encode_pair(x: str, y: str) -> str:
    return "0" * len(x) + "1" + x + y


def try_decode_pair(s: str) -> tuple[str, str] | None:
    k = len(s) - len(s.lstrip("0"))
    if k == len(s) or len(s) < 2 * k + 1:
        return None
    return s[k + 1:2 * k + 1], s[2 * k + 1:]


def decode_pair(s: str) -> tuple[str, str]:
    parts = try_decode_pair(s)
    if parts is None:
        raise PairFormatError(f"malformed pair encoding: {render_bits(s)}")
    return parts


def encode_tuple(*items: str) -> str:
    """Right-nested pairing; the empty tuple is the empty string."""
    if not items:
        return ""
    acc = items[-1]
    for item in reversed(items[:-1]):
        acc = encode_pair(item, acc)
    return acc


def lexkey(s: str) -> tuple[int, str]:
    """Sort key for length-lexicographic order."""
    return len(s), s


def strings_of_length(n: int) -> Iterator[str]:
    for bits in product("01", repeat=n):
        yield "".join(bits)


def strings_upto(n: int) -> Iterator[str]:
    """All strings of length <= n in length-lex order."""
    for length in range(n + 1):
        yield from strings_of_length(length)


def lex_next(s: str) -> str | None:
    """Next string of the same length, or None after ``1^n``."""
    if not s or set(s) == {"1"}:
        return None
    return format(int(s, 2) + 1, f"0{len(s)}b")


def nth_string(index: int, length: int) -> str:
    if length == 0:
        return ""
    return format(index, f"0{length}b")
