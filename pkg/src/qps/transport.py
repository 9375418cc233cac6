"""Framed byte transports: in-memory loopback and TCP stream.

Every message travels as a frame: a 4-byte big-endian unsigned length
followed by that many payload bytes.  Both transports speak exactly this
format so a session transcript is independent of which one carried it.
Ordering and reliability are assumed (TCP-like); loss and reordering are
out of scope.
"""

from __future__ import annotations

import socket
import struct
from collections import deque

MAX_FRAME = 1 << 20  # a message is a small JSON object; anything bigger is corrupt

_HEADER = struct.Struct(">I")


class TransportError(RuntimeError):
    """Connection failed, closed early, or produced a malformed frame."""


def pack_frame(payload: bytes) -> bytes:
    if len(payload) > MAX_FRAME:
        raise TransportError(f"frame of {len(payload)} bytes exceeds limit")
    return _HEADER.pack(len(payload)) + payload


class LoopbackEnd:
    """One end of an in-process transport pair.

    Frames are fully encoded on send and parsed on receive, so the loopback
    path exercises the same bytes as a socket would carry.
    """

    def __init__(self, inbox: deque, outbox: deque):
        self._inbox = inbox
        self._outbox = outbox

    def send_frame(self, payload: bytes) -> None:
        self._outbox.append(pack_frame(payload))

    def recv_frame(self) -> bytes:
        if not self._inbox:
            raise TransportError("no frame pending on loopback")
        raw = self._inbox.popleft()
        (length,) = _HEADER.unpack(raw[:4])
        if length != len(raw) - 4:
            raise TransportError("loopback frame length mismatch")
        return raw[4:]

    def pending(self) -> bool:
        return bool(self._inbox)

    def close(self) -> None:
        pass


def loopback_pair():
    """Two connected loopback ends."""
    a_to_b: deque = deque()
    b_to_a: deque = deque()
    return LoopbackEnd(b_to_a, a_to_b), LoopbackEnd(a_to_b, b_to_a)


class SocketTransport:
    """Length-prefixed frames over a connected stream socket."""

    def __init__(self, sock: socket.socket):
        self._sock = sock

    def send_frame(self, payload: bytes) -> None:
        try:
            self._sock.sendall(pack_frame(payload))
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def _recv_exactly(self, count: int) -> bytes:
        chunks = []
        got = 0
        while got < count:
            try:
                chunk = self._sock.recv(count - got)
            except OSError as exc:
                raise TransportError(f"recv failed: {exc}") from exc
            if not chunk:
                raise TransportError("peer closed the connection mid-frame")
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def recv_frame(self) -> bytes:
        (length,) = _HEADER.unpack(self._recv_exactly(4))
        if length > MAX_FRAME:
            raise TransportError(f"frame of {length} bytes exceeds limit")
        return self._recv_exactly(length)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


def connect(host: str, port: int, timeout: float = 10.0) -> SocketTransport:
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except OSError as exc:
        raise TransportError(f"cannot connect to {host}:{port}: {exc}") from exc
    sock.settimeout(timeout)
    return SocketTransport(sock)


def listen(host: str, port: int) -> socket.socket:
    try:
        server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((host, port))
        server.listen(1)
    except OSError as exc:
        raise TransportError(f"cannot listen on {host}:{port}: {exc}") from exc
    return server


def accept(server: socket.socket, timeout: float = 60.0) -> SocketTransport:
    server.settimeout(timeout)
    try:
        conn, _addr = server.accept()
    except OSError as exc:
        raise TransportError(f"accept failed: {exc}") from exc
    conn.settimeout(timeout)
    return SocketTransport(conn)
