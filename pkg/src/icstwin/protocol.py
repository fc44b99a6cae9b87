"""Tag read/write frame codec for the simplified industrial protocol.

A frame is a fixed 28-byte big-endian record:

    magic 0x49 0x43 | version=1 | kind | seq u32 | src | dst | tag |
    has_value | value f64 (zero if absent) | ts f64

By design the protocol carries no authentication and no encryption: any
node can claim any source address and every payload travels in the clear.
Those two omissions are the attack surface the rest of the package exploits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

MAGIC = b"IC"
VERSION = 1
FRAME_LEN = 28
_LAYOUT = struct.Struct(">2sBBIBBBBdd")


class Node(IntEnum):
    PLC1 = 0
    PLC2 = 1
    PLC3 = 2
    HMI = 3
    ATTACKER = 4


class FrameKind(IntEnum):
    READ_REQUEST = 0
    READ_RESPONSE = 1
    WRITE_REQUEST = 2
    WRITE_ACK = 3


class TagId(IntEnum):
    TANK_LEVEL = 0
    FLOW_LEVEL = 1
    BOTTLE_LEVEL = 2
    MOTOR_STATE = 3


#: Kinds that carry a value payload.
VALUE_KINDS = frozenset({FrameKind.READ_RESPONSE, FrameKind.WRITE_REQUEST})


class FrameError(ValueError):
    """Base class for frame decoding failures."""


class ShortFrame(FrameError):
    pass


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class InvalidEnum(FrameError):
    def __init__(self, field: str, value: int) -> None:
        super().__init__(f"invalid {field}: {value}")
        self.field = field
        self.value = value


@dataclass(frozen=True)
class TagFrame:
    """One protocol message between nodes.

    ``value`` must be present exactly for READ_RESPONSE and WRITE_REQUEST
    frames; ``ts`` is the sender's simulation clock in seconds.
    """

    seq: int
    src: Node
    dst: Node
    kind: FrameKind
    tag: TagId
    value: float | None = None
    ts: float = 0.0

    def __post_init__(self) -> None:
        if not (0 <= self.seq <= 0xFFFFFFFF):
            raise ValueError(f"seq out of u32 range: {self.seq}")
        has = self.value is not None
        if has != (self.kind in VALUE_KINDS):
            raise ValueError(f"value must be present iff kind is ReadResponse/WriteRequest, got {self.kind.name}")


def encode_frame(frame: TagFrame) -> bytes:
    """Serialize a frame to its fixed 28-byte wire form."""
    has_value = frame.value is not None
    return _LAYOUT.pack(
        MAGIC,
        VERSION,
        int(frame.kind),
        frame.seq,
        int(frame.src),
        int(frame.dst),
        int(frame.tag),
        1 if has_value else 0,
        frame.value if has_value else 0.0,
        frame.ts,
    )


def decode_frame(data: bytes) -> TagFrame:
    """Parse a 28-byte wire frame; inverse of :func:`encode_frame`.

    Raises ShortFrame, BadMagic, BadVersion or InvalidEnum naming the first
    offending field.
    """
    if len(data) < FRAME_LEN:
        raise ShortFrame(f"need {FRAME_LEN} bytes, got {len(data)}")
    magic, version, kind, seq, src, dst, tag, has_value, value, ts = _LAYOUT.unpack(data[:FRAME_LEN])
    if magic != MAGIC:
        raise BadMagic(f"bad magic: {magic!r}")
    if version != VERSION:
        raise BadVersion(f"unsupported version: {version}")
    if kind not in FrameKind._value2member_map_:
        raise InvalidEnum("kind", kind)
    if src not in Node._value2member_map_:
        raise InvalidEnum("src", src)
    if dst not in Node._value2member_map_:
        raise InvalidEnum("dst", dst)
    if tag not in TagId._value2member_map_:
        raise InvalidEnum("tag", tag)
    if has_value not in (0, 1):
        raise InvalidEnum("has_value", has_value)
    kind_e = FrameKind(kind)
    if bool(has_value) != (kind_e in VALUE_KINDS):
        raise InvalidEnum("has_value", has_value)
    return TagFrame(
        seq=seq,
        src=Node(src),
        dst=Node(dst),
        kind=kind_e,
        tag=TagId(tag),
        value=value if has_value else None,
        ts=ts,
    )
