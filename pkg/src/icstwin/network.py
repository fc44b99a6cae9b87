"""Virtual network joining the plant nodes, plus a loopback socket transport.

Two transports share the frame codec:

* :class:`VirtualNetwork` - in-process, driven by the simulation clock,
  fully deterministic. Frames traverse an ordered interceptor chain per
  directed link, which is how man-in-the-middle drop/alter attacks and
  flood-induced saturation are expressed.
* :class:`LoopbackTransport` - real TCP sockets on 127.0.0.1 moving encoded
  frames between worker threads, with an optional MitM proxy node. Used by
  the live IDS demo.

Nothing in either path validates sender identity: a forged ``src`` is
delivered exactly like a legitimate one.
"""

from __future__ import annotations

import queue
import socket
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable

from icstwin.protocol import FRAME_LEN, Node, TagFrame, decode_frame, encode_frame


class UnknownNode(KeyError):
    pass


class UnknownLink(KeyError):
    pass


# --- interceptor actions -----------------------------------------------------


@dataclass(frozen=True)
class Pass:
    """Let the (possibly modified) frame continue down the chain."""

    frame: TagFrame


@dataclass(frozen=True)
class Drop:
    """Discard the frame."""


@dataclass(frozen=True)
class Inject:
    """Let the original frame continue and enqueue extra frames after it.

    Extra frames skip the remainder of this chain.
    """

    extra: tuple[TagFrame, ...]

    def __init__(self, extra: Iterable[TagFrame]):
        object.__setattr__(self, "extra", tuple(extra))


InterceptAction = Pass | Drop | Inject
Interceptor = Callable[[TagFrame], InterceptAction]


@dataclass
class NodeId:
    """A registered network endpoint; names are unique per network."""

    name: Node
    addr: str


@dataclass
class LinkState:
    """Directed link between two registered nodes."""

    endpoints: tuple[Node, Node]
    interceptors: list["HookHandle"] = field(default_factory=list)
    saturated_until: float = 0.0


@dataclass
class HookHandle:
    """Registration handle; ``remove()`` detaches the hook from its link."""

    link: LinkState
    hook: Interceptor

    def remove(self) -> None:
        if self in self.link.interceptors:
            self.link.interceptors.remove(self)


class VirtualNetwork:
    """Deterministic in-process frame fabric.

    ``now`` is the simulation clock in seconds and is advanced by the
    owner; delivery is immediate (default zero-tick latency) into the
    destination's inbox.
    """

    def __init__(self, trace: bool = False, latency_s: float = 0.0) -> None:
        self.nodes: dict[Node, NodeId] = {}
        self.links: dict[tuple[Node, Node], LinkState] = {}
        self.inboxes: dict[Node, list[TagFrame]] = {}
        self.now: float = 0.0
        self.latency_s = latency_s
        self._in_flight: list[tuple[float, TagFrame]] = []
        self.trace_enabled = trace
        self.trace: list[dict] = []

    def register(self, name: Node, addr: str | None = None) -> NodeId:
        if name in self.nodes:
            raise ValueError(f"node {name.name} already registered")
        node = NodeId(name=name, addr=addr or f"10.0.0.{int(name) + 1}")
        self.nodes[name] = node
        self.inboxes[name] = []
        for other in self.nodes:
            if other is not name:
                self.links[(other, name)] = LinkState(endpoints=(other, name))
                self.links[(name, other)] = LinkState(endpoints=(name, other))
        return node

    def link(self, src: Node, dst: Node) -> LinkState:
        try:
            return self.links[(src, dst)]
        except KeyError:
            raise UnknownLink(f"{src.name}->{dst.name}") from None

    def register_interceptor(self, src: Node, dst: Node, hook: Interceptor, position: int | None = None) -> HookHandle:
        """Attach ``hook`` to every frame traversing src->dst until removed."""
        link = self.link(src, dst)
        handle = HookHandle(link=link, hook=hook)
        if position is None:
            link.interceptors.append(handle)
        else:
            link.interceptors.insert(position, handle)
        return handle

    def saturate(self, dst: Node, until: float) -> None:
        """Drop every frame inbound to ``dst`` while ``now < until`` (union of windows)."""
        if dst not in self.nodes:
            raise UnknownNode(dst)
        for (a, b), link in self.links.items():
            if b is dst:
                link.saturated_until = max(link.saturated_until, until)

    def clear_saturation(self, dst: Node) -> None:
        if dst not in self.nodes:
            raise UnknownNode(dst)
        for (a, b), link in self.links.items():
            if b is dst:
                link.saturated_until = 0.0

    def send(self, frame: TagFrame) -> str:
        """Run the link's interceptor chain and deliver survivors.

        Returns "delivered", "dropped" (interceptor) or "saturated".
        """
        if frame.src not in self.nodes or frame.dst not in self.nodes:
            raise UnknownNode(f"{frame.src.name}->{frame.dst.name}")
        link = self.links[(frame.src, frame.dst)]

        if self.now < link.saturated_until:
            self._trace(frame, dropped=True, altered=False)
            return "saturated"

        current = frame
        extras: list[TagFrame] = []
        for handle in list(link.interceptors):
            action = handle.hook(current)
            if isinstance(action, Drop):
                self._trace(current, dropped=True, altered=current is not frame)
                for extra in extras:
                    self.inboxes[extra.dst].append(extra)
                return "dropped"
            if isinstance(action, Pass):
                current = action.frame
            elif isinstance(action, Inject):
                extras.extend(action.extra)
            else:  # pragma: no cover - defensive
                raise TypeError(f"interceptor returned {action!r}")

        self._enqueue(current)
        self._trace(current, dropped=False, altered=current is not frame)
        for extra in extras:
            self._enqueue(extra)
        return "delivered"

    def _enqueue(self, frame: TagFrame) -> None:
        if self.latency_s <= 0.0:
            self.inboxes[frame.dst].append(frame)
        else:
            self._in_flight.append((self.now + self.latency_s, frame))

    def drain(self, node: Node) -> list[TagFrame]:
        if node not in self.nodes:
            raise UnknownNode(node)
        if self._in_flight:
            still_flying = []
            for ready_at, frame in self._in_flight:
                if ready_at <= self.now + 1e-12:
                    self.inboxes[frame.dst].append(frame)
                else:
                    still_flying.append((ready_at, frame))
            self._in_flight = still_flying
        frames = self.inboxes[node]
        self.inboxes[node] = []
        return frames

    def _trace(self, frame: TagFrame, dropped: bool, altered: bool) -> None:
        if not self.trace_enabled:
            return
        self.trace.append(
            {
                "ts": frame.ts,
                "src": frame.src.name,
                "dst": frame.dst.name,
                "kind": frame.kind.name,
                "tag": frame.tag.name,
                "value": frame.value,
                "dropped": dropped,
                "altered": altered,
            }
        )


# --- loopback byte-stream transport ------------------------------------------


class _FrameServer:
    """Accepts connections and pushes decoded frames onto a queue."""

    def __init__(self) -> None:
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self.sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self.sock.bind(("127.0.0.1", 0))
        self.sock.listen(8)
        self.port = self.sock.getsockname()[1]
        self.inbox: "queue.Queue[TagFrame]" = queue.Queue()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        t = threading.Thread(target=self._accept_loop, daemon=True)
        t.start()
        self._threads.append(t)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self.sock.accept()
            except OSError:
                return
            t = threading.Thread(target=self._read_loop, args=(conn,), daemon=True)
            t.start()
            self._threads.append(t)

    def _read_loop(self, conn: socket.socket) -> None:
        with conn:
            buf = b""
            while not self._stop.is_set():
                try:
                    chunk = conn.recv(4096)
                except OSError:
                    return
                if not chunk:
                    return
                buf += chunk
                while len(buf) >= FRAME_LEN:
                    self.inbox.put(decode_frame(buf[:FRAME_LEN]))
                    buf = buf[FRAME_LEN:]

    def close(self) -> None:
        self._stop.set()
        try:
            self.sock.close()
        except OSError:
            pass


class LoopbackTransport:
    """Frame exchange over real 127.0.0.1 sockets using the shared codec.

    Each registered node gets a listening port and an inbox queue. A MitM
    proxy can be interposed on any directed route; the proxy applies a
    Pass/Drop hook to each frame before forwarding it to the true
    destination, mirroring the virtual network's interceptor contract.
    """

    def __init__(self) -> None:
        self._servers: dict[Node, _FrameServer] = {}
        self._routes: dict[tuple[Node, Node], int] = {}
        self._conns: dict[int, socket.socket] = {}
        self._proxies: list[_FrameServer] = []
        self._lock = threading.Lock()

    def register(self, name: Node) -> None:
        if name in self._servers:
            raise ValueError(f"node {name.name} already registered")
        self._servers[name] = _FrameServer()

    def _port_for(self, src: Node, dst: Node) -> int:
        if dst not in self._servers:
            raise UnknownNode(dst)
        return self._routes.get((src, dst), self._servers[dst].port)

    def interpose_proxy(self, src: Node, dst: Node, hook: Interceptor) -> None:
        """Route src->dst frames through a forwarding proxy applying ``hook``."""
        if src not in self._servers or dst not in self._servers:
            raise UnknownNode(f"{src.name}->{dst.name}")
        proxy = _FrameServer()
        self._proxies.append(proxy)
        dst_port = self._servers[dst].port

        def forward() -> None:
            while True:
                try:
                    frame = proxy.inbox.get(timeout=0.2)
                except queue.Empty:
                    if proxy._stop.is_set():
                        return
                    continue
                action = hook(frame)
                if isinstance(action, Drop):
                    continue
                if isinstance(action, Pass):
                    self._send_to_port(dst_port, action.frame)

        threading.Thread(target=forward, daemon=True).start()
        self._routes[(src, dst)] = proxy.port

    def remove_proxy(self, src: Node, dst: Node) -> None:
        self._routes.pop((src, dst), None)

    def _send_to_port(self, port: int, frame: TagFrame) -> None:
        with self._lock:
            conn = self._conns.get(port)
            if conn is None:
                conn = socket.create_connection(("127.0.0.1", port), timeout=2.0)
                self._conns[port] = conn
        conn.sendall(encode_frame(frame))

    def send(self, frame: TagFrame) -> None:
        self._send_to_port(self._port_for(frame.src, frame.dst), frame)

    def receive(self, node: Node, timeout: float = 2.0) -> TagFrame | None:
        try:
            return self._servers[node].inbox.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        for conn in self._conns.values():
            try:
                conn.close()
            except OSError:
                pass
        self._conns.clear()
        for server in list(self._servers.values()) + self._proxies:
            server.close()
