"""Frame codec tests: golden bytes, roundtrips and decode errors."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icstwin.protocol import (
    FRAME_LEN,
    VALUE_KINDS,
    BadMagic,
    BadVersion,
    FrameKind,
    InvalidEnum,
    Node,
    ShortFrame,
    TagFrame,
    TagId,
    decode_frame,
    encode_frame,
)


def make_frame(seq=1, src=Node.PLC1, dst=Node.PLC2, kind=FrameKind.READ_REQUEST, tag=TagId.FLOW_LEVEL, value=None, ts=0.0):
    if kind in VALUE_KINDS:
        value = 1.0 if value is None else value
    else:
        value = None
    return TagFrame(seq=seq, src=src, dst=dst, kind=kind, tag=tag, value=value, ts=ts)


frames = st.builds(
    make_frame,
    seq=st.integers(min_value=0, max_value=0xFFFFFFFF),
    src=st.sampled_from(list(Node)),
    dst=st.sampled_from(list(Node)),
    kind=st.sampled_from(list(FrameKind)),
    tag=st.sampled_from(list(TagId)),
    value=st.floats(allow_nan=False, allow_infinity=False),
    ts=st.floats(min_value=0, max_value=1e7, allow_nan=False),
)


class TestEncode:
    def test_golden_prefix(self):
        # ReadRequest(seq=1, PLC1->PLC2, FLOW_LEVEL) starts 49 43 01 00 00 00 00 01
        frame = make_frame(seq=1, src=Node.PLC1, dst=Node.PLC2, kind=FrameKind.READ_REQUEST, tag=TagId.FLOW_LEVEL)
        data = encode_frame(frame)
        assert data[:8] == bytes([0x49, 0x43, 0x01, 0x00, 0x00, 0x00, 0x00, 0x01])
        assert data[8] == 0x00  # src PLC1
        assert data[9] == 0x01  # dst PLC2
        assert data[10] == 0x01  # tag FLOW_LEVEL
        assert data[11] == 0x00  # no value

    def test_fixed_length(self):
        for kind in FrameKind:
            frame = make_frame(kind=kind)
            assert len(encode_frame(frame)) == FRAME_LEN

    def test_value_field_zero_when_absent(self):
        data = encode_frame(make_frame(kind=FrameKind.READ_REQUEST))
        assert data[12:20] == b"\x00" * 8


class TestRoundtrip:
    def test_simple_roundtrip(self):
        frame = make_frame(seq=77, kind=FrameKind.READ_RESPONSE, value=3.25, ts=12.5)
        assert decode_frame(encode_frame(frame)) == frame

    @settings(max_examples=300, deadline=None)
    @given(frames)
    def test_roundtrip_property(self, frame):
        assert decode_frame(encode_frame(frame)) == frame

    def test_bulk_random_roundtrip(self):
        import numpy as np

        rng = np.random.default_rng(42)
        kinds = list(FrameKind)
        for _ in range(10_000):
            kind = kinds[rng.integers(0, 4)]
            frame = make_frame(
                seq=int(rng.integers(0, 2**32)),
                src=Node(int(rng.integers(0, 5))),
                dst=Node(int(rng.integers(0, 5))),
                kind=kind,
                tag=TagId(int(rng.integers(0, 4))),
                value=float(rng.normal() * 1e3) if kind in VALUE_KINDS else None,
                ts=float(abs(rng.normal()) * 1e3),
            )
            assert decode_frame(encode_frame(frame)) == frame


class TestDecodeErrors:
    def test_short_frame(self):
        with pytest.raises(ShortFrame):
            decode_frame(b"\x49\x43" + b"\x00" * 8)

    def test_short_frame_checked_before_magic(self):
        with pytest.raises(ShortFrame):
            decode_frame(b"\xff" * 10)

    def test_bad_magic(self):
        data = bytearray(encode_frame(make_frame()))
        data[0] = 0xFF
        with pytest.raises(BadMagic):
            decode_frame(bytes(data))

    def test_bad_version(self):
        data = bytearray(encode_frame(make_frame()))
        data[2] = 9
        with pytest.raises(BadVersion):
            decode_frame(bytes(data))

    def test_invalid_kind(self):
        data = bytearray(encode_frame(make_frame()))
        data[3] = 7
        with pytest.raises(InvalidEnum) as err:
            decode_frame(bytes(data))
        assert err.value.field == "kind"

    def test_invalid_src(self):
        data = bytearray(encode_frame(make_frame()))
        data[8] = 200
        with pytest.raises(InvalidEnum) as err:
            decode_frame(bytes(data))
        assert err.value.field == "src"

    def test_invalid_tag(self):
        data = bytearray(encode_frame(make_frame()))
        data[10] = 4
        with pytest.raises(InvalidEnum) as err:
            decode_frame(bytes(data))
        assert err.value.field == "tag"

    def test_has_value_kind_mismatch(self):
        data = bytearray(encode_frame(make_frame(kind=FrameKind.READ_REQUEST)))
        data[11] = 1
        with pytest.raises(InvalidEnum):
            decode_frame(bytes(data))


class TestFrameInvariants:
    def test_value_required_for_response(self):
        with pytest.raises(ValueError):
            TagFrame(seq=0, src=Node.PLC2, dst=Node.PLC1, kind=FrameKind.READ_RESPONSE, tag=TagId.FLOW_LEVEL, value=None)

    def test_value_forbidden_for_request(self):
        with pytest.raises(ValueError):
            TagFrame(seq=0, src=Node.PLC1, dst=Node.PLC2, kind=FrameKind.READ_REQUEST, tag=TagId.FLOW_LEVEL, value=1.0)

    def test_seq_range(self):
        with pytest.raises(ValueError):
            make_frame(seq=2**32)
