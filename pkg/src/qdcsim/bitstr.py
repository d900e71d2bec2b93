"""Conversions between bit lists and hex/binary text."""

from __future__ import annotations

from .errors import InvalidArgument


def parse_message(text: str) -> list[int]:
    """``0x``-prefixed text is hex; a string of only 0/1 is binary; else hex."""
    t = text.strip().replace("_", "")
    if t.lower().startswith("0x"):
        return hex_to_bits(t[2:])
    if t and set(t) <= {"0", "1"}:
        return [int(c) for c in t]
    return hex_to_bits(t)


def hex_to_bits(h: str) -> list[int]:
    try:
        return [int(b) for c in h for b in f"{int(c, 16):04b}"]
    except ValueError:
        raise InvalidArgument(f"not a hex string: {h!r}") from None


def bits_to_hex(bits) -> str:
    """Hex digits, zero-padding the tail to a whole nibble."""
    bits = list(bits) + [0] * (-len(bits) % 4)
    return "".join(f"{int(''.join(map(str, bits[i:i + 4])), 2):x}" for i in range(0, len(bits), 4))


def bits_to_str(bits) -> str:
    return "".join(str(int(b)) for b in bits)
