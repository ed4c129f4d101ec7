"""Displaying and processing: projection to external leaves, handler lookup
through the containment tree, event processing with splicing, and the main
execution loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RuntimeErr
from . import evaluate as E
from .runtime import (
    EventSignal, ExternalInstance, RuntimeState, TopInstance, WidgetInstance,
    perform,
)


@dataclass
class Event:
    target: int | None  # None addresses the root (context events)
    name: str
    args: list


class EndOfInput:
    pass


END = EndOfInput()


@dataclass
class DisplayNode:
    id: int
    kind: str
    props: dict
    children: list = field(default_factory=list)

    def to_json(self):
        return {
            "id": self.id,
            "kind": self.kind,
            "props": self.props,
            "children": [c.to_json() for c in self.children],
        }

    @staticmethod
    def from_json(d):
        return DisplayNode(
            d["id"], d["kind"], d["props"],
            [DisplayNode.from_json(c) for c in d["children"]],
        )

    def find_all(self, pred, out=None):
        if out is None:
            out = []
        if pred(self):
            out.append(self)
        for c in self.children:
            c.find_all(pred, out)
        return out


def project(inst) -> DisplayNode | None:
    """User widgets are transparent; externals project id, kind, scalar props."""
    if inst is None or isinstance(inst, TopInstance):
        return None
    if isinstance(inst, WidgetInstance):
        return project(inst.parent)
    if isinstance(inst, ExternalInstance):
        props = {}
        for k, v in inst.props.items():
            if isinstance(v, (str, int, bool)) or (
                isinstance(v, list) and all(isinstance(x, dict) for x in v)
            ):
                props[k] = v
        children = [c for c in (project(ch) for ch in inst.children) if c is not None]
        return DisplayNode(inst.id, inst.kind, props, children)
    raise RuntimeErr(f"cannot project {inst!r}")


def containment_children(inst) -> list:
    if isinstance(inst, WidgetInstance):
        out = [inst.parent]
        for v in inst.components.values():
            if isinstance(v, (WidgetInstance, ExternalInstance)):
                out.append(v)
        return out
    if isinstance(inst, ExternalInstance):
        return list(inst.children)
    return []


def path_to(root, target_id) -> list | None:
    """Containment path from root down to the instance with the given id."""
    if getattr(root, "id", None) == target_id:
        return [root]
    for child in containment_children(root):
        sub = path_to(child, target_id)
        if sub is not None:
            return [root] + sub
    return None


def find_handler_index(path, name, arity, start=None):
    """Index of the innermost enclosing widget on `path` (scanning from
    `start` toward the root) that defines a matching handler."""
    if start is None:
        start = len(path) - 1
    for i in range(start, -1, -1):
        node = path[i]
        if isinstance(node, WidgetInstance) and name in node.handlers:
            harity, _ = node.handlers[name]
            if harity == arity:
                return i
    return None


def find_handler(root, target_id, name, arity):
    path = path_to(root, target_id)
    if path is None:
        raise RuntimeErr(f"event target {target_id} not in tree")
    i = find_handler_index(path, name, arity)
    if i is None:
        raise RuntimeErr(f"no handler found for {name}/{arity}")
    return path[i], path[i].handlers[name][1]


def process_event(state: RuntimeState, root, ev: Event):
    """Apply the most specific handler; splice its yield over the owner.
    Events re-raised while performing restart the search one level out."""
    if ev.target is not None:
        path = path_to(root, ev.target)
        if path is None:
            raise RuntimeErr(f"event target {ev.target} not in tree")
    else:
        # context events walk the parent spine so wrapper widgets stay
        # transparent: the innermost handler along the spine wins
        path = [root]
        while isinstance(path[-1], WidgetInstance):
            path.append(path[-1].parent)
    name, args = ev.name, ev.args
    idx = find_handler_index(path, name, len(args))
    if idx is None:
        raise RuntimeErr(f"no handler found for {name}/{len(args)}")
    while True:
        owner = path[idx]
        handler = owner.handlers[name][1]
        result = E.apply(handler, args)
        try:
            replacement = perform(state, result)
        except EventSignal as sig:
            name, args = sig.name, sig.args
            idx = find_handler_index(path, name, len(args), start=idx - 1)
            if idx is None:
                raise RuntimeErr(f"no handler found for {name}/{len(args)}") from None
            continue
        return splice(root, path, idx, replacement)


def splice(root, path, idx, replacement):
    if idx == 0:
        return replacement
    owner = path[idx]
    container = path[idx - 1]
    if isinstance(container, WidgetInstance):
        if container.parent is owner:
            container.parent = replacement
        else:
            for k, v in container.components.items():
                if v is owner:
                    container.components[k] = replacement
    elif isinstance(container, ExternalInstance):
        container.children = [
            replacement if c is owner else c for c in container.children
        ]
    return root


def boot(prog, state: RuntimeState):
    """Evaluate the program and perform its entry command; returns the root."""
    env = E.global_env(prog)
    if prog.entry is None or prog.entry not in env:
        raise RuntimeErr("program has no entry definition")
    v = env[prog.entry]
    if isinstance(v, E.FixValue):
        v = v.force()
    if isinstance(v, E.Closure) and not v.params:
        v = E.apply(v, [])
    root = perform(state, v)
    if not isinstance(root, (WidgetInstance, ExternalInstance, TopInstance)):
        raise RuntimeErr("entry command did not yield a widget")
    return root


def run_loop(prog, backend, state: RuntimeState | None = None):
    """reduce -> perform -> project -> show -> event -> process, until the
    backend signals end of input."""
    if state is None:
        state = RuntimeState()
    root = boot(prog, state)
    pending = []
    while True:
        display = project(root)
        backend.show(display)
        if pending:
            ev = pending.pop(0)
        else:
            ev = backend.next_event(display)
        if isinstance(ev, EndOfInput):
            break
        root = process_event(state, root, ev)
        pending.extend(
            Event(None, "notify", [addr]) for addr in state.provider.take_pending()
        )
    return root
