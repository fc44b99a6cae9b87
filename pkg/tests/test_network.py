"""Virtual network delivery, interceptor chains, saturation and the loopback transport."""

from dataclasses import replace

import pytest

from icstwin.network import Drop, Inject, LoopbackTransport, Pass, UnknownLink, UnknownNode, VirtualNetwork
from icstwin.protocol import FrameKind, Node, TagFrame, TagId, decode_frame, encode_frame


def net_with_all_nodes(trace=False) -> VirtualNetwork:
    net = VirtualNetwork(trace=trace)
    for node in Node:
        net.register(node)
    return net


def response(value: float, seq=0, src=Node.PLC2, dst=Node.PLC1, tag=TagId.FLOW_LEVEL, ts=0.0) -> TagFrame:
    return TagFrame(seq=seq, src=src, dst=dst, kind=FrameKind.READ_RESPONSE, tag=tag, value=value, ts=ts)


class TestDelivery:
    def test_clean_link_delivers_unchanged(self):
        net = net_with_all_nodes()
        frame = response(1.5)
        assert net.send(frame) == "delivered"
        assert net.drain(Node.PLC1) == [frame]

    def test_unknown_node_rejected(self):
        net = VirtualNetwork()
        net.register(Node.PLC1)
        frame = response(1.0)
        with pytest.raises(UnknownNode):
            net.send(frame)

    def test_no_reordering_on_a_link(self):
        net = net_with_all_nodes()
        sent = [response(float(i), seq=i) for i in range(20)]
        for frame in sent:
            net.send(frame)
        assert net.drain(Node.PLC1) == sent

    def test_forged_src_accepted(self):
        # nothing validates sender identity: this is the exploited vulnerability
        net = net_with_all_nodes()
        forged = TagFrame(seq=0, src=Node.HMI, dst=Node.PLC1, kind=FrameKind.WRITE_REQUEST, tag=TagId.MOTOR_STATE, value=0.0)
        assert net.send(forged) == "delivered"
        assert net.drain(Node.PLC1) == [forged]

    def test_interceptor_transparency_bit_identical(self):
        net = net_with_all_nodes()
        frame = response(2.75, seq=9, ts=3.5)
        net.send(frame)
        delivered = net.drain(Node.PLC1)[0]
        assert encode_frame(delivered) == encode_frame(frame)


class TestInterceptors:
    def test_selective_drop_by_tag(self):
        net = net_with_all_nodes()

        def drop_flow(frame):
            if frame.tag is TagId.FLOW_LEVEL:
                return Drop()
            return Pass(frame)

        net.register_interceptor(Node.PLC2, Node.PLC1, drop_flow)
        assert net.send(response(1.0, tag=TagId.FLOW_LEVEL)) == "dropped"
        assert net.send(response(4.0, tag=TagId.BOTTLE_LEVEL)) == "delivered"
        delivered = net.drain(Node.PLC1)
        assert [f.tag for f in delivered] == [TagId.BOTTLE_LEVEL]

    def test_chain_order_alter_then_log(self):
        # oracle on a 3-frame script: dst sees altered values, the log hook
        # at position 1 sees what position 0 produced
        net = net_with_all_nodes()
        seen = []

        def alter(frame):
            return Pass(replace(frame, value=frame.value * 2.0))

        def log(frame):
            seen.append(frame.value)
            return Pass(frame)

        net.register_interceptor(Node.PLC2, Node.PLC1, alter, position=0)
        net.register_interceptor(Node.PLC2, Node.PLC1, log, position=1)
        originals = [1.0, 2.0, 3.0]
        for i, v in enumerate(originals):
            net.send(response(v, seq=i))
        delivered = net.drain(Node.PLC1)
        assert [f.value for f in delivered] == [2.0, 4.0, 6.0]
        assert seen == [2.0, 4.0, 6.0]

    def test_positional_invocation_order(self):
        net = net_with_all_nodes()
        calls = []
        net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: (calls.append("b"), Pass(f))[1])
        net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: (calls.append("a"), Pass(f))[1], position=0)
        net.send(response(1.0))
        assert calls == ["a", "b"]

    def test_register_then_remove_restores_traffic(self):
        net = net_with_all_nodes()
        handle = net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: Drop())
        assert net.send(response(1.0)) == "dropped"
        handle.remove()
        assert net.send(response(1.0)) == "delivered"

    def test_link_isolation(self):
        net = net_with_all_nodes()
        seen = []
        net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: (seen.append(f), Pass(f))[1])
        net.send(response(5.0, src=Node.PLC3, tag=TagId.BOTTLE_LEVEL))
        assert seen == []

    def test_unknown_link(self):
        net = VirtualNetwork()
        net.register(Node.PLC1)
        with pytest.raises(UnknownLink):
            net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: Pass(f))

    def test_inject_adds_extra_frames(self):
        net = net_with_all_nodes()
        extra = response(99.0, seq=100)
        net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: Inject([extra]))
        net.send(response(1.0))
        delivered = net.drain(Node.PLC1)
        assert [f.value for f in delivered] == [1.0, 99.0]


class TestSaturation:
    def test_saturation_window_blocks_then_resumes(self):
        net = net_with_all_nodes()
        net.saturate(Node.PLC1, until=10.0)
        net.now = 5.0
        assert net.send(response(1.0)) == "saturated"
        assert net.send(response(1.0, src=Node.PLC3, tag=TagId.BOTTLE_LEVEL)) == "saturated"
        net.now = 10.0
        assert net.send(response(1.0)) == "delivered"

    def test_saturation_does_not_affect_other_destinations(self):
        net = net_with_all_nodes()
        net.saturate(Node.PLC1, until=10.0)
        net.now = 5.0
        req = TagFrame(seq=0, src=Node.PLC3, dst=Node.PLC2, kind=FrameKind.READ_REQUEST, tag=TagId.FLOW_LEVEL)
        assert net.send(req) == "delivered"

    def test_overlapping_saturations_take_union(self):
        net = net_with_all_nodes()
        net.saturate(Node.PLC1, until=10.0)
        net.saturate(Node.PLC1, until=6.0)
        assert net.link(Node.PLC2, Node.PLC1).saturated_until == 10.0
        net.saturate(Node.PLC1, until=15.0)
        assert net.link(Node.PLC2, Node.PLC1).saturated_until == 15.0

    def test_unknown_node(self):
        net = VirtualNetwork()
        with pytest.raises(UnknownNode):
            net.saturate(Node.PLC1, until=1.0)


class TestLatency:
    def test_default_zero_latency_is_same_instant(self):
        net = net_with_all_nodes()
        net.send(response(1.0))
        assert len(net.drain(Node.PLC1)) == 1

    def test_configured_latency_delays_delivery(self):
        net = VirtualNetwork(latency_s=0.2)
        for node in Node:
            net.register(node)
        net.now = 0.0
        net.send(response(1.0))
        assert net.drain(Node.PLC1) == []
        net.now = 0.1
        assert net.drain(Node.PLC1) == []
        net.now = 0.2
        assert len(net.drain(Node.PLC1)) == 1

    def test_latency_preserves_order(self):
        net = VirtualNetwork(latency_s=0.1)
        for node in Node:
            net.register(node)
        sent = [response(float(i), seq=i) for i in range(5)]
        for frame in sent:
            net.send(frame)
        net.now = 1.0
        assert net.drain(Node.PLC1) == sent


class TestTrace:
    def test_trace_schema_and_flags(self):
        net = net_with_all_nodes(trace=True)
        net.register_interceptor(Node.PLC2, Node.PLC1, lambda f: Pass(replace(f, value=f.value + 1.0)))
        net.send(response(1.0, ts=2.5))
        net.saturate(Node.PLC1, until=10.0)
        net.now = 3.0
        net.send(response(7.0))
        assert len(net.trace) == 2
        first, second = net.trace
        assert set(first) == {"ts", "src", "dst", "kind", "tag", "value", "dropped", "altered"}
        assert first["value"] == 2.0 and first["altered"] is True and first["dropped"] is False
        assert second["dropped"] is True


class TestLoopbackTransport:
    def test_roundtrip_over_socket(self):
        transport = LoopbackTransport()
        try:
            transport.register(Node.PLC1)
            transport.register(Node.PLC2)
            frame = response(3.5, seq=11, ts=1.0)
            transport.send(frame)
            got = transport.receive(Node.PLC1, timeout=5.0)
            assert got == frame
        finally:
            transport.close()

    def test_proxy_alters_frames_in_flight(self):
        transport = LoopbackTransport()
        try:
            transport.register(Node.PLC1)
            transport.register(Node.PLC2)
            transport.interpose_proxy(Node.PLC2, Node.PLC1, lambda f: Pass(replace(f, value=f.value * 10.0)))
            transport.send(response(2.0))
            got = transport.receive(Node.PLC1, timeout=5.0)
            assert got is not None and got.value == 20.0
        finally:
            transport.close()

    def test_proxy_drops_frames(self):
        transport = LoopbackTransport()
        try:
            transport.register(Node.PLC1)
            transport.register(Node.PLC2)
            transport.interpose_proxy(Node.PLC2, Node.PLC1, lambda f: Drop())
            transport.send(response(2.0))
            assert transport.receive(Node.PLC1, timeout=0.4) is None
        finally:
            transport.close()

    def test_codec_is_the_shared_wire_format(self):
        frame = response(4.25)
        assert decode_frame(encode_frame(frame)) == frame
