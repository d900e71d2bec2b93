"""Classical error correction and check-bit interleaving."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidArgument

SCHEMES = ("identity", "repetition-3", "hamming-7-4")


def _validate_bits(bits):
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise InvalidArgument("bits must be 0/1")
    return bits


# Hamming(7,4), positions 1..7 = p1 p2 d1 p4 d2 d3 d4.
def _hamming_encode_block(d):
    d1, d2, d3, d4 = d
    p1 = d1 ^ d2 ^ d4
    p2 = d1 ^ d3 ^ d4
    p4 = d2 ^ d3 ^ d4
    return [p1, p2, d1, p4, d2, d3, d4]


def _hamming_decode_block(c):
    c = list(c)
    syndrome = 0
    for pos in range(1, 8):
        if c[pos - 1]:
            syndrome ^= pos
    if syndrome:
        c[syndrome - 1] ^= 1
    return [c[2], c[4], c[5], c[6]]


def block_sizes(scheme: str) -> tuple[int, int]:
    """(data bits, code bits) per block."""
    return {"identity": (1, 1), "repetition-3": (1, 3), "hamming-7-4": (4, 7)}[_scheme(scheme)]


def _scheme(scheme):
    if scheme not in SCHEMES:
        raise InvalidArgument(f"unknown ECC scheme {scheme!r}; choose from {SCHEMES}")
    return scheme


def ecc_encode(bits: Sequence[int], scheme: str = "hamming-7-4") -> list[int]:
    """Encode ``bits``; hamming-7-4 zero-pads the last block to 4 data bits."""
    bits = _validate_bits(bits)
    scheme = _scheme(scheme)
    if scheme == "identity":
        return bits
    if scheme == "repetition-3":
        return [b for b in bits for _ in range(3)]
    bits = bits + [0] * (-len(bits) % 4)
    out = []
    for i in range(0, len(bits), 4):
        out.extend(_hamming_encode_block(bits[i : i + 4]))
    return out


def ecc_decode(bits: Sequence[int], scheme: str = "hamming-7-4") -> list[int]:
    bits = _validate_bits(bits)
    scheme = _scheme(scheme)
    _, n = block_sizes(scheme)
    if len(bits) % n:
        raise InvalidArgument(f"{scheme} input length must be a multiple of {n}")
    if scheme == "identity":
        return bits
    if scheme == "repetition-3":
        return [int(sum(bits[i : i + 3]) >= 2) for i in range(0, len(bits), 3)]
    out = []
    for i in range(0, len(bits), 7):
        out.extend(_hamming_decode_block(bits[i : i + 7]))
    return out


def encoded_length(n_bits: int, scheme: str) -> int:
    k, n = block_sizes(scheme)
    return -(-n_bits // k) * n


# ------------------------------------------------------------ interleaving


def interleave(
    message: Sequence, check: Sequence, rng: np.random.Generator, unit: int = 1
) -> tuple[list, list[int]]:
    """Scatter check symbols uniformly among message symbols.

    ``unit`` groups consecutive bits into one symbol (2 for a dense-coded
    pair). Returned positions index symbols of the combined stream, sorted.
    """
    message, check = list(message), list(check)
    if len(message) % unit or len(check) % unit:
        raise InvalidArgument(f"lengths must be multiples of unit={unit}")
    n_msg, n_chk = len(message) // unit, len(check) // unit
    total = n_msg + n_chk
    positions = sorted(int(p) for p in rng.choice(total, size=n_chk, replace=False)) if n_chk else []
    return place(message, check, positions, unit), positions


def place(message: Sequence, check: Sequence, positions: Sequence[int], unit: int = 1) -> list:
    """Deterministic half of :func:`interleave`: put check symbols at ``positions``."""
    n_msg, n_chk = len(message) // unit, len(check) // unit
    total = n_msg + n_chk
    _check_positions(positions, n_chk, total)
    out = []
    marks = set(positions)
    mi = ci = 0
    for s in range(total):
        if s in marks:
            out.extend(check[ci * unit : (ci + 1) * unit])
            ci += 1
        else:
            out.extend(message[mi * unit : (mi + 1) * unit])
            mi += 1
    return out


def extract(combined: Sequence, positions: Sequence[int], unit: int = 1) -> tuple[list, list]:
    """Split a combined stream back into (message, check)."""
    combined = list(combined)
    if len(combined) % unit:
        raise InvalidArgument(f"length must be a multiple of unit={unit}")
    total = len(combined) // unit
    _check_positions(positions, len(positions), total)
    marks = sorted(positions)
    check = []
    for p in marks:
        check.extend(combined[p * unit : (p + 1) * unit])
    marked = set(marks)
    message = []
    for s in range(total):
        if s not in marked:
            message.extend(combined[s * unit : (s + 1) * unit])
    return message, check


def _check_positions(positions, count, total):
    if len(positions) != count or len(set(positions)) != len(positions):
        raise InvalidArgument("check positions must be distinct and match the check length")
    if any(not 0 <= int(p) < total for p in positions):
        raise InvalidArgument(f"check position out of range 0..{total - 1}")
