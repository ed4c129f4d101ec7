"""Headless scripted backend and the remote renderer server.

Scripts are JSON arrays of entries:
  {"type":"ui-event","select":"button:add","name":"push"}
  {"type":"context-event","name":"move","args":[3,4]}
  {"type":"set-field","select":"addscreen","field":"name","text":"Sally"}
  {"type":"provider","directive":{"action":"peer-move","address":"a@b","x":1,"y":2}}
  {"type":"expect","select":"label:CONTACT: a@b"}

The wire protocol is newline-delimited JSON.  Outbound display frames:
{"type":"display","root":{...}}; inbound events:
{"type":"event","target":id,"name":str,"args":[...]}.  The server speaks raw
TCP by default and upgrades transparently when the peer opens with a
WebSocket HTTP handshake, so browser clients need no bridge.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import struct

from .errors import RuntimeErr
from .dispatch import END, DisplayNode, Event, RuntimeState, run_loop


def resolve_select(display: DisplayNode, select: str) -> DisplayNode:
    """`kind` or `kind:label` naming exactly one node of the current display."""
    kind, _, label = select.partition(":")

    def match(node):
        if node.kind != kind:
            return False
        if not label:
            return True
        return any(v == label for v in node.props.values())

    nodes = display.find_all(match) if display is not None else []
    if len(nodes) != 1:
        raise RuntimeErr(
            f"selector {select!r} matched {len(nodes)} nodes (need exactly 1)"
        )
    return nodes[0]


class ScriptBackend:
    def __init__(self, state: RuntimeState, script):
        self.state = state
        self.script = list(script)
        self.queue = []
        self.trace = []

    def show(self, display):
        self.trace.append(display)

    def next_event(self, display):
        while True:
            if self.queue:
                return self.queue.pop(0)
            if not self.script:
                return END
            entry = self.script.pop(0)
            kind = entry.get("type")
            if kind == "ui-event":
                node = resolve_select(display, entry["select"])
                args = entry.get("args")
                if args is None:
                    args = [node.id] if entry["name"] == "push" else []
                return Event(node.id, entry["name"], args)
            if kind == "context-event":
                return Event(None, entry["name"], entry.get("args", []))
            if kind == "set-field":
                node = resolve_select(display, entry["select"])
                inst = self.state.instances[node.id]
                inst.state.fields[entry["field"]] = entry["text"]
            elif kind == "provider":
                for addr in self.state.provider.step(entry["directive"]):
                    self.queue.append(Event(None, "notify", [addr]))
            elif kind == "expect":
                self.check_expect(display, entry)
            else:
                raise RuntimeErr(f"unknown script entry type {kind!r}")

    @staticmethod
    def check_expect(display, entry):
        if "select" in entry:
            resolve_select(display, entry["select"])
        if "root-kind" in entry:
            actual = display.kind if display is not None else None
            if actual != entry["root-kind"]:
                raise RuntimeErr(
                    f"expected root kind {entry['root-kind']!r}, got {actual!r}"
                )


def run_script(prog, script, workdir=".", range_=10):
    """Run a checked program against a script; returns the display trace."""
    state = RuntimeState(workdir=workdir, range_=range_)
    backend = ScriptBackend(state, script)
    run_loop(prog, backend, state)
    return backend.trace


# ---------- remote renderer ----------


class WebSocketCodec:
    """Minimal RFC 6455 server-side framing for text messages."""

    GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

    @classmethod
    def handshake_response(cls, request: bytes) -> bytes:
        key = None
        for line in request.decode("latin-1").split("\r\n"):
            name, _, value = line.partition(":")
            if name.strip().lower() == "sec-websocket-key":
                key = value.strip()
        if key is None:
            raise RuntimeErr("websocket handshake missing key")
        accept = base64.b64encode(
            hashlib.sha1((key + cls.GUID).encode()).digest()
        ).decode()
        return (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode()

    @staticmethod
    def encode(text: str) -> bytes:
        payload = text.encode("utf-8")
        n = len(payload)
        if n < 126:
            header = struct.pack("!BB", 0x81, n)
        elif n < 1 << 16:
            header = struct.pack("!BBH", 0x81, 126, n)
        else:
            header = struct.pack("!BBQ", 0x81, 127, n)
        return header + payload

    @staticmethod
    def decode_messages(reader) -> str | None:
        """Read one text message from a buffered byte reader; None on close."""
        while True:
            head = reader.read(2)
            if len(head) < 2:
                return None
            b0, b1 = head
            opcode = b0 & 0x0F
            masked = b1 & 0x80
            n = b1 & 0x7F
            if n == 126:
                n = struct.unpack("!H", reader.read(2))[0]
            elif n == 127:
                n = struct.unpack("!Q", reader.read(8))[0]
            mask = reader.read(4) if masked else b"\x00\x00\x00\x00"
            payload = bytearray(reader.read(n))
            for i in range(len(payload)):
                payload[i] ^= mask[i % 4]
            if opcode == 0x8:  # close
                return None
            if opcode in (0x1, 0x2):
                return payload.decode("utf-8")
            # ignore ping/pong/continuation for this tiny protocol


class RemoteBackend:
    """One renderer connection; frames are newline-delimited JSON, optionally
    carried over WebSocket when the client connects from a browser."""

    def __init__(self, conn: socket.socket, state: RuntimeState, script=None):
        self.conn = conn
        self.state = state
        self.script = ScriptBackend(state, script or [])
        self.reader = conn.makefile("rb")
        self.websocket = False
        self.buffer = b""
        self._maybe_upgrade()

    def _maybe_upgrade(self):
        # Browsers send their handshake immediately on connect, while plain
        # clients wait for the first display frame, so a short peek window is
        # enough to tell the two apart without stalling either side.
        first = b""
        self.conn.settimeout(0.25)
        try:
            while len(first) < 4:
                got = self.conn.recv(4, socket.MSG_PEEK)
                if not got or got == first:
                    break
                first = got
        except (TimeoutError, socket.timeout):
            pass
        finally:
            self.conn.settimeout(None)
        if first.startswith(b"GET "):
            request = b""
            while b"\r\n\r\n" not in request:
                chunk = self.reader.read1(4096)
                if not chunk:
                    raise RuntimeErr("renderer disconnected during handshake")
                request += chunk
            self.conn.sendall(WebSocketCodec.handshake_response(request))
            self.websocket = True

    def send(self, obj):
        line = json.dumps(obj)
        if self.websocket:
            self.conn.sendall(WebSocketCodec.encode(line))
        else:
            self.conn.sendall(line.encode("utf-8") + b"\n")

    def recv_line(self) -> str | None:
        if self.websocket:
            return WebSocketCodec.decode_messages(self.reader)
        line = self.reader.readline()
        if not line:
            return None
        return line.decode("utf-8")

    def show(self, display):
        self.script.show(display)
        root = display.to_json() if display is not None else None
        self.send({"type": "display", "root": root})

    def next_event(self, display):
        # side-script entries (context events, provider directives) run first
        ev = self.script.next_event(display)
        if ev is not END:
            return ev
        while True:
            line = self.recv_line()
            if line is None:
                return END
            try:
                frame = json.loads(line)
            except json.JSONDecodeError:
                self.send({"type": "error", "message": "malformed frame"})
                return END
            kind = frame.get("type")
            if kind == "event":
                return Event(frame.get("target"), frame["name"], frame.get("args", []))
            if kind == "set-field":
                inst = self.state.instances.get(frame.get("target"))
                if inst is None or inst.state is None:
                    self.send({"type": "error", "message": "bad set-field target"})
                    continue
                inst.state.fields[frame["field"]] = frame["text"]
            elif kind == "end":
                return END
            else:
                self.send({"type": "error", "message": f"unknown frame {kind!r}"})
                return END


def serve_renderer(prog, port, script=None, workdir=".", range_=10, ready_cb=None):
    """Accept one renderer connection and drive the loop until it closes."""
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    server.bind(("127.0.0.1", port))
    server.listen(1)
    if ready_cb is not None:
        ready_cb(server.getsockname()[1])
    conn, _ = server.accept()
    try:
        state = RuntimeState(workdir=workdir, range_=range_)
        backend = RemoteBackend(conn, state, script)
        run_loop(prog, backend, state)
    finally:
        conn.close()
        server.close()
