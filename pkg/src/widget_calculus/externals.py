"""Registry of external (platform) widgets and their behavior.

Each external widget is described by an ExternalSpec carrying everything the
checker needs (constructor signature, raised events, command signatures) and
everything the runtime needs (initial state, command behavior, projected
props).  The provider simulation that generates notify events for the
notifier widget also lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import RuntimeErr
from . import types as T
from .types import (
    BOOL, INT, STR, EventSignature, TApp, TCommand, TForall, TFun, TList,
    TName, TRecord, sig,
)

RECORD_KV = TRecord((("key", TName("K")), ("val", TName("V"))))
RECORD_SS = TRecord((("key", STR), ("val", STR)))


@dataclass(frozen=True)
class ExternalSpec:
    name: str                     # constructor / kind name, lowercase
    type_name: str                # widget type name, capitalized
    type_params: tuple = ()       # type parameter names
    ctor_params: tuple = ()       # parameter types (may mention type params)
    raises: frozenset = frozenset()
    flow_params: tuple = ()       # type params whose events flow to this widget
    commands: dict = field(default_factory=dict)  # name -> (param types, yield)
    prop_names: tuple = ()        # constructor args exposed as display props

    def ctor_type(self) -> T.Type:
        result = TCommand(self.instance_type(), T.NO_EFFECTS)
        fn = TFun(self.ctor_params, result)
        if self.type_params:
            return TForall(self.type_params, fn)
        return fn

    def instance_type(self) -> T.Type:
        if self.type_params:
            return TApp(self.type_name, tuple(TName(p) for p in self.type_params))
        return TName(self.type_name)


SPECS = {
    s.name: s
    for s in [
        ExternalSpec(
            "window", "Window", ("C",), (STR, TCommand(TName("C"))),
            raises=frozenset({sig("move", INT, INT)}), flow_params=(0,),
            prop_names=("title",),
        ),
        ExternalSpec(
            "screen", "Screen", ("C",),
            (INT, INT, INT, INT, TCommand(TName("C"))),
            raises=frozenset({sig("move", INT, INT)}), flow_params=(0,),
            prop_names=("x", "y", "w", "h"),
        ),
        ExternalSpec(
            "phone", "Phone", ("D", "B"),
            (STR, TCommand(TName("D")), TList(TCommand(TName("B")))),
            raises=frozenset({sig("move", INT, INT)}), flow_params=(0, 1),
            prop_names=("title",),
        ),
        ExternalSpec(
            "button", "Button", (), (STR,),
            raises=frozenset({sig("push", INT)}),
            prop_names=("label",),
        ),
        ExternalSpec("label", "Label", (), (STR,), prop_names=("text",)),
        ExternalSpec("clock", "Clock", (), (INT, INT), prop_names=("x", "y")),
        ExternalSpec(
            "db", "DB", ("K", "V"), (STR,),
            commands={
                "records": ((), TList(RECORD_KV)),
                "update": ((TName("K"), TName("V")), TName("V")),
                "delete": ((TName("K"),), BOOL),
            },
            prop_names=("filename",),
        ),
        ExternalSpec(
            "notifier", "Notifier", (), (INT,),
            raises=frozenset({sig("notify", STR)}),
            commands={
                "connect": ((), BOOL),
                "register": ((STR,), BOOL),
                "move": ((INT, INT), BOOL),
            },
            prop_names=("port",),
        ),
        ExternalSpec(
            "addscreen", "AddScreen", (), (TList(RECORD_SS),),
            commands={"name": ((), STR), "address": ((), STR)},
            prop_names=("records",),
        ),
    ]
}

SPECS_BY_TYPE = {s.type_name: s for s in SPECS.values()}


def spec_for_type(t: T.Type) -> ExternalSpec | None:
    if isinstance(t, TName):
        return SPECS_BY_TYPE.get(t.name)
    if isinstance(t, TApp):
        s = SPECS_BY_TYPE.get(t.op)
        if s is not None and len(t.args) == len(s.type_params):
            return s
    return None


def type_args_of(t: T.Type, spec: ExternalSpec) -> dict:
    if isinstance(t, TApp):
        return dict(zip(spec.type_params, t.args))
    return {}


def command_type(t: T.Type, name: str) -> TCommand | None:
    """Type of the `name` command on an external widget type t, or None."""
    spec = spec_for_type(t)
    if spec is None or name not in spec.commands:
        return None
    params, result = spec.commands[name]
    mapping = type_args_of(t, spec)
    result = T.substitute(result, mapping)
    cmd = TCommand(result, T.NO_EFFECTS)
    if params:
        return TFun(tuple(T.substitute(p, mapping) for p in params), cmd)
    return cmd


# ---------- runtime state per external kind ----------


class DbState:
    """Records persisted as `key<TAB>value` lines, UTF-8, one per record."""

    def __init__(self, path):
        self.path = path
        self.records = []
        try:
            with open(path, encoding="utf-8", newline="\n") as f:
                for line in f:
                    line = line.rstrip("\n")
                    if line:
                        key, _, val = line.partition("\t")
                        self.records.append({"key": key, "val": val})
        except FileNotFoundError:
            pass

    def save(self):
        with open(self.path, "w", encoding="utf-8", newline="\n") as f:
            for r in self.records:
                f.write(f"{r['key']}\t{r['val']}\n")

    def command(self, name, args):
        if name == "records":
            return [dict(r) for r in self.records]
        if name == "update":
            key, val = args
            for r in self.records:
                if r["key"] == key:
                    r["val"] = val
                    break
            else:
                self.records.append({"key": key, "val": val})
            self.save()
            return val
        if name == "delete":
            (key,) = args
            before = len(self.records)
            self.records = [r for r in self.records if r["key"] != key]
            self.save()
            return len(self.records) < before
        raise RuntimeErr(f"unknown db command {name!r}")


class NotifierState:
    def __init__(self, port, provider):
        self.port = port
        self.provider = provider
        self.connected = False
        self.registered = False

    def command(self, name, args):
        if name == "connect":
            self.connected = True
            return True
        if name == "register":
            if not self.connected:
                return False
            self.registered = True
            self.provider.self_register(args[0])
            return True
        if name == "move":
            if not (self.connected and self.registered):
                return False
            self.provider.self_move(args[0], args[1])
            return True
        raise RuntimeErr(f"unknown notifier command {name!r}")


class AddScreenState:
    """Text fields are filled by script `set-field` directives or renderer edits."""

    def __init__(self, records):
        self.records = records
        self.fields = {"name": "", "address": ""}

    def command(self, name, args):
        if name in self.fields:
            return self.fields[name]
        raise RuntimeErr(f"unknown addscreen command {name!r}")


class ProviderSim:
    """Simulated service provider: tracks positions of the local phone and of
    scripted peers, and emits edge-triggered notify events when a registered
    pair enters `range` of each other."""

    def __init__(self, range_=10):
        self.range = range_
        self.self_address = None
        self.self_pos = (0, 0)
        self.peers = {}  # address -> (x, y)
        self.registered = set()  # peer addresses
        self.in_range = set()  # peer addresses currently within range
        self.pending = []  # notify event args awaiting dispatch

    def self_register(self, address):
        self.self_address = address
        self._rescan()

    def self_move(self, x, y):
        self.self_pos = (x, y)
        self._rescan()

    def step(self, directive) -> list:
        """Apply a scripted peer directive; returns newly fired notify args."""
        action = directive.get("action")
        if action == "peer-register":
            self.registered.add(directive["address"])
            if "x" in directive:
                self.peers[directive["address"]] = (directive["x"], directive["y"])
            self._rescan()
        elif action == "peer-move":
            self.peers[directive["address"]] = (directive["x"], directive["y"])
            self._rescan()
        else:
            raise RuntimeErr(f"unknown provider directive {action!r}")
        fired, self.pending = self.pending, []
        return fired

    def take_pending(self) -> list:
        fired, self.pending = self.pending, []
        return fired

    def _rescan(self):
        if self.self_address is None:
            self.in_range = set()
            return
        now = set()
        for addr in self.registered:
            if addr not in self.peers:
                continue
            px, py = self.peers[addr]
            sx, sy = self.self_pos
            if math.dist((px, py), (sx, sy)) <= self.range:
                now.add(addr)
        for addr in sorted(now - self.in_range):
            self.pending.append(addr)
        self.in_range = now


def make_state(name, args, workdir, provider):
    """Initial private state for a freshly constructed external widget."""
    if name == "db":
        import os

        path = args[0]
        if not os.path.isabs(path):
            path = os.path.join(workdir, path)
        return DbState(path)
    if name == "notifier":
        return NotifierState(args[0], provider)
    if name == "addscreen":
        return AddScreenState(args[0])
    return None


def handler_signatures(raising: frozenset) -> dict:
    return {s.name: s for s in raising}
