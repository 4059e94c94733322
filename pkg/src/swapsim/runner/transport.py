"""Reliable in-order channels: an in-process queue and loopback TCP."""

from __future__ import annotations

import queue
import socket

from swapsim.runner.wire import HEADER_SIZE, FrameError, WireMessage, parse_frame, parse_header, payload_bytes, serialize_frame


class SessionError(RuntimeError):
    """A party gave up waiting for a message."""


class ProtocolError(RuntimeError):
    """A party received something the protocol does not allow."""


class Channel:
    """One-directional frame channel from a single sender."""

    def send(self, msg: WireMessage) -> None:
        raise NotImplementedError

    def recv(self, timeout: float) -> WireMessage:
        raise NotImplementedError

    def close(self) -> None:
        pass


class InProcessChannel(Channel):
    def __init__(self):
        self._q: queue.Queue[bytes | None] = queue.Queue()
        self.wire_bytes = 0

    def send(self, msg: WireMessage) -> None:
        data = serialize_frame(msg)
        self.wire_bytes += len(data)
        self._q.put(data)

    def send_raw(self, data: bytes) -> None:
        """Inject bytes as-is (for malformed-frame tests)."""
        self._q.put(data)

    def recv(self, timeout: float) -> WireMessage:
        try:
            data = self._q.get(timeout=timeout)
        except queue.Empty:
            raise SessionError(f"no message within {timeout} s") from None
        if data is None:
            raise SessionError("channel closed")
        try:
            return parse_frame(data)
        except FrameError as exc:
            raise ProtocolError(f"malformed frame: {exc}") from exc

    def close(self) -> None:
        self._q.put(None)


def recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        try:
            chunk = sock.recv(n - len(buf))
        except socket.timeout:
            raise SessionError("timed out waiting on socket") from None
        if not chunk:
            raise SessionError(f"connection closed after {len(buf)} of {n} bytes")
        buf.extend(chunk)
    return bytes(buf)


class TcpChannel(Channel):
    """Frames over a connected stream socket; frames are self-delimiting."""

    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self.wire_bytes = 0

    def send(self, msg: WireMessage) -> None:
        data = serialize_frame(msg)
        self.wire_bytes += len(data)
        self.sock.sendall(data)

    def recv(self, timeout: float) -> WireMessage:
        self.sock.settimeout(timeout)
        header = recv_exact(self.sock, HEADER_SIZE)
        try:
            _, _, bits = parse_header(header)
            if bits == 0:
                raise FrameError("empty payload")
            body = recv_exact(self.sock, payload_bytes(bits))
            msg = parse_frame(header + body)
        except FrameError as exc:
            raise ProtocolError(f"malformed frame: {exc}") from exc
        self.wire_bytes += len(header) + len(body)
        return msg

    def close(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()
