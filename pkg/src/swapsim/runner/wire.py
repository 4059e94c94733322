"""Bit-exact frames exchanged between the parties.

    byte 0      sender role
    bytes 1-4   round id, unsigned big-endian
    byte 5      payload length in bits (1..255)
    bytes 6..   ceil(bits / 8) payload bytes, MSB first, zero padded
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

HEADER = struct.Struct(">BIB")
HEADER_SIZE = HEADER.size  # 6


class PartyRole(IntEnum):
    ALICE = 0
    REFEREE = 1
    BOB = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()


class FrameError(ValueError):
    """Malformed, truncated or inconsistent frame."""


def payload_bytes(bits: int) -> int:
    return (bits + 7) // 8


@dataclass(frozen=True)
class WireMessage:
    sender: PartyRole
    round_id: int
    payload_bit_length: int
    payload: bytes

    def __post_init__(self):
        try:
            object.__setattr__(self, "sender", PartyRole(self.sender))
        except ValueError:
            raise FrameError(f"unknown sender {self.sender!r}") from None
        if not 0 <= self.round_id < 2**32:
            raise FrameError(f"round id {self.round_id} does not fit in 32 bits")
        if not 1 <= self.payload_bit_length <= 255:
            raise FrameError(f"payload of {self.payload_bit_length} bits; need 1..255")
        if len(self.payload) != payload_bytes(self.payload_bit_length):
            raise FrameError(
                f"{self.payload_bit_length} bits need {payload_bytes(self.payload_bit_length)} "
                f"bytes, got {len(self.payload)}"
            )
        pad = 8 * len(self.payload) - self.payload_bit_length
        if pad and self.payload[-1] & ((1 << pad) - 1):
            raise FrameError("nonzero padding bits")

    @classmethod
    def from_fields(cls, sender: PartyRole, round_id: int, fields) -> WireMessage:
        """Pack ``fields``, a sequence of (value, width) pairs."""
        payload, bits = pack_bits(fields)
        return cls(sender, round_id, bits, payload)

    def unpack(self, widths) -> list[int]:
        if sum(widths) != self.payload_bit_length:
            raise FrameError(
                f"expected {sum(widths)} payload bits, frame carries {self.payload_bit_length}"
            )
        return unpack_bits(self.payload, widths)


def pack_bits(fields) -> tuple[bytes, int]:
    acc = 0
    bits = 0
    for value, width in fields:
        if width < 1 or not 0 <= value < (1 << width):
            raise FrameError(f"value {value} does not fit in {width} bits")
        acc = (acc << width) | value
        bits += width
    if bits == 0:
        raise FrameError("empty payload")
    n = payload_bytes(bits)
    return (acc << (8 * n - bits)).to_bytes(n, "big"), bits


def unpack_bits(payload: bytes, widths) -> list[int]:
    acc = int.from_bytes(payload, "big")
    shift = 8 * len(payload)
    out = []
    for w in widths:
        shift -= w
        out.append((acc >> shift) & ((1 << w) - 1))
    return out


def serialize_frame(msg: WireMessage) -> bytes:
    return HEADER.pack(int(msg.sender), msg.round_id, msg.payload_bit_length) + msg.payload


def parse_header(header: bytes) -> tuple[int, int, int]:
    if len(header) < HEADER_SIZE:
        raise FrameError(f"truncated header ({len(header)} of {HEADER_SIZE} bytes)")
    return HEADER.unpack(header[:HEADER_SIZE])


def parse_frame(data: bytes) -> WireMessage:
    sender, round_id, bits = parse_header(data)
    if bits == 0:
        raise FrameError("empty payload")
    expected = HEADER_SIZE + payload_bytes(bits)
    if len(data) != expected:
        raise FrameError(f"frame is {len(data)} bytes, header implies {expected}")
    return WireMessage(sender, round_id, bits, bytes(data[HEADER_SIZE:]))
