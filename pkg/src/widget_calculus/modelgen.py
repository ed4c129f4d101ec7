"""Model-to-code generation.

A reactive-application model is a JSON document with stereotyped classes, a
state machine, and sharing invariants.  Each widget class is turned into a
Widget function skeleton: constructor parameters are derived from attributes
(A1), plain references (A2), shared components (A3), and return-transition
targets (A4); the body constructs the parent widget (B1), binds contained
components (B2), and emits one handler per transition (B3), performing
referenced commands as do-bindings (B4).  External classes map onto the
predefined constructor registry and produce no functions.

Handlers with neither an explicit body nor a transition are emitted as
`do { return self }` holes marked with a TODO comment, so the output always
parses and type-checks and can be refined by hand afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .externals import SPECS
from . import types as T


class ModelError(Exception):
    pass


# ---------- model structure ----------


@dataclass
class Attribute:
    name: str
    type: str
    value: str | None = None  # opaque expression text; valued attrs are baked in


@dataclass
class Operation:
    name: str
    kind: str  # handler | event | command | query
    params: list = field(default_factory=list)  # of (name, type text)
    ret: str | None = None
    body: str | None = None  # opaque expression text (hand-written refinement)


@dataclass
class Association:
    name: str
    target: str  # type text; the head names a class
    containment: bool = False
    parent: bool = False  # occupies a slot in the parent constructor
    bind: bool = False  # pre-bound by name so handlers can refer to it
    args: list | None = None  # explicit constructor arguments (expression text)


@dataclass
class ModelClass:
    name: str
    stereotype: str  # external | widget | record
    function: str | None = None
    constructor: str | None = None  # external registry name
    superclass: str | None = None
    attributes: list = field(default_factory=list)
    attribute_values: dict = field(default_factory=dict)
    associations: list = field(default_factory=list)
    operations: list = field(default_factory=list)
    bindings: list = field(default_factory=list)  # of (name, type, expr) text


@dataclass
class Transition:
    event: str
    source: str
    target: str
    kind: str  # self | call | return
    guard: str | None = None
    bindings: list = field(default_factory=list)  # of (name, type, expr) text


@dataclass
class StateMachine:
    states: list
    initial: str
    transitions: list


@dataclass
class Invariant:
    """Sharing constraint: `context.shared` is the same instance as `source`,
    passed into the context's function as parameter `param`."""

    context: str
    param: str
    shared: str
    source: str  # navigation path, e.g. "m.notifier"


@dataclass
class RappModel:
    classes: dict  # name -> ModelClass, in declaration order
    statemachine: StateMachine
    invariants: list
    prelude: list  # verbatim source blocks emitted before the functions


@dataclass
class GeneratedSource:
    type_defs: list
    functions: list
    todos: list  # of (class name, handler name)

    def render(self) -> str:
        parts = list(self.type_defs) + list(self.functions)
        return "\n\n".join(parts) + "\n"


# ---------- loading ----------


def _head_name(type_text: str) -> str:
    return type_text.split("[", 1)[0].strip()


def load_model(data: dict) -> RappModel:
    if not isinstance(data, dict):
        raise ModelError("model must be a JSON object")
    classes = {}
    for entry in data.get("classes", []):
        c = ModelClass(
            name=entry["name"],
            stereotype=entry.get("stereotype", "widget"),
            function=entry.get("function"),
            constructor=entry.get("constructor"),
            superclass=entry.get("superclass"),
            attributes=[
                Attribute(a["name"], a["type"], a.get("value"))
                for a in entry.get("attributes", [])
            ],
            attribute_values=dict(entry.get("attributeValues", {})),
            associations=[
                Association(
                    a["name"],
                    a["target"],
                    containment=a.get("containment", False),
                    parent=a.get("parent", False),
                    bind=a.get("bind", False),
                    args=a.get("args"),
                )
                for a in entry.get("associations", [])
            ],
            operations=[
                Operation(
                    o["name"],
                    o.get("kind", "handler"),
                    params=[tuple(p) for p in o.get("params", [])],
                    ret=o.get("ret"),
                    body=o.get("body"),
                )
                for o in entry.get("operations", [])
            ],
            bindings=[tuple(b) for b in entry.get("bindings", [])],
        )
        if c.name in classes:
            raise ModelError(f"duplicate class {c.name!r}")
        if c.stereotype not in ("external", "widget", "record"):
            raise ModelError(f"class {c.name!r}: unknown stereotype {c.stereotype!r}")
        if c.stereotype == "external":
            if c.constructor not in SPECS:
                raise ModelError(
                    f"external class {c.name!r} names no registered constructor"
                )
        classes[c.name] = c

    for c in classes.values():
        if c.superclass is not None and c.superclass not in classes:
            raise ModelError(f"class {c.name!r}: unknown superclass {c.superclass!r}")
        if c.stereotype == "widget" and c.superclass is None:
            raise ModelError(f"widget class {c.name!r} needs a superclass")
        for a in c.associations:
            if _head_name(a.target) not in classes:
                raise ModelError(
                    f"class {c.name!r}: association {a.name!r} targets "
                    f"unknown class {_head_name(a.target)!r}"
                )

    sm_data = data.get("statemachine", {})
    states = list(sm_data.get("states", []))
    initial = sm_data.get("initial")
    if initial is None:
        raise ModelError("no initial state")
    if initial not in states:
        raise ModelError(f"initial state {initial!r} is not a state")
    for s in states:
        if s not in classes or classes[s].stereotype != "widget":
            raise ModelError(f"state {s!r} is not a widget class")
    transitions = []
    for t in sm_data.get("transitions", []):
        tr = Transition(
            event=t["event"],
            source=t["source"],
            target=t["target"],
            kind=t.get("kind", "self"),
            guard=t.get("guard"),
            bindings=[tuple(b) for b in t.get("bindings", [])],
        )
        if tr.source not in states or tr.target not in states:
            raise ModelError(f"transition {tr.event!r}: unknown state")
        if tr.kind not in ("self", "call", "return"):
            raise ModelError(f"transition {tr.event!r}: unknown kind {tr.kind!r}")
        if tr.kind == "self" and tr.source != tr.target:
            raise ModelError(f"self-transition {tr.event!r} must stay in its state")
        source = classes[tr.source]
        if not any(
            o.name == tr.event and o.kind == "handler" for o in source.operations
        ):
            raise ModelError(
                f"transition {tr.event!r} has no matching handler on {tr.source!r}"
            )
        transitions.append(tr)
    sm = StateMachine(states, initial, transitions)

    invariants = []
    for inv_data in data.get("invariants", []):
        inv = Invariant(
            context=inv_data["context"],
            param=inv_data["param"],
            shared=inv_data["shared"],
            source=inv_data["source"],
        )
        ctx = classes.get(inv.context)
        if ctx is None:
            raise ModelError(f"invariant context {inv.context!r} is unknown")
        if not any(a.name == inv.shared for a in ctx.associations):
            raise ModelError(
                f"invariant on {inv.context!r}: no association {inv.shared!r}"
            )
        root, _, rest = inv.source.partition(".")
        owner = _navigation_owner(classes, sm, ctx, root)
        if owner is None or not rest or not _has_member(owner, rest):
            raise ModelError(
                f"invariant on {inv.context!r}: path {inv.source!r} is not navigable"
            )
        invariants.append(inv)

    prelude = data.get("prelude", [])
    if isinstance(prelude, str):
        prelude = [prelude]
    return RappModel(classes, sm, invariants, list(prelude))


def _navigation_owner(classes, sm, ctx, root):
    """The class a navigation root refers to: a return-transition target of
    the context whose generated parameter carries that name."""
    for tr in sm.transitions:
        if tr.source == ctx.name and tr.kind == "return":
            if _a4_name(tr.target) == root:
                return classes[tr.target]
    return None


def _has_member(cls, name):
    return any(a.name == name for a in cls.attributes) or any(
        a.name == name for a in cls.associations
    )


# ---------- generation ----------


def _a4_name(class_name: str) -> str:
    return class_name[0].lower()


def _fn_name(c: ModelClass) -> str:
    return c.function or c.name.lower()


@dataclass
class Param:
    name: str
    type: str
    origin: str  # a1 | a2 | a3 | a4
    invariant: Invariant | None = None


class Generator:
    def __init__(self, model: RappModel):
        self.model = model
        self.classes = model.classes
        self.sm = model.statemachine
        self.todos = []

    # ----- parameter synthesis (rules A1-A4) -----

    def shared_invariant(self, c: ModelClass, assoc_name: str):
        for inv in self.model.invariants:
            if inv.context == c.name and inv.shared == assoc_name:
                return inv
        return None

    def inherited_attrs(self, c: ModelClass):
        chain = []
        cur = c.superclass
        while cur is not None:
            chain.append(self.classes[cur])
            cur = self.classes[cur].superclass
        attrs = []
        for anc in reversed(chain):
            attrs.extend(anc.attributes)
        return attrs

    def attr_value(self, c: ModelClass, attr: Attribute):
        if attr.name in c.attribute_values:
            return c.attribute_values[attr.name]
        return attr.value

    def params_of(self, c: ModelClass):
        params = []
        seen_a4 = set()
        for tr in self.sm.transitions:
            if tr.source == c.name and tr.kind == "return" and tr.target not in seen_a4:
                seen_a4.add(tr.target)
                params.append(Param(_a4_name(tr.target), tr.target, "a4"))
        for attr in self.inherited_attrs(c) + c.attributes:
            if self.attr_value(c, attr) is None:
                params.append(Param(attr.name, attr.type, "a1"))
        for assoc in c.associations:
            if not assoc.containment or assoc.args is not None:
                continue
            if self.shared_invariant(c, assoc.name) is not None:
                continue
            target = self.classes[_head_name(assoc.target)]
            if target.stereotype != "external":
                continue
            for attr in target.attributes:
                if self.attr_value(c, attr) is None:
                    params.append(Param(attr.name, attr.type, "a1"))
        for assoc in c.associations:
            if not assoc.containment:
                params.append(Param(assoc.name, assoc.target, "a2"))
        for assoc in c.associations:
            inv = self.shared_invariant(c, assoc.name)
            if assoc.containment and inv is not None:
                params.append(Param(inv.param, assoc.target, "a3", inv))
        return params

    # ----- constructor expressions (rules B1, B2, M0) -----

    def build_ctor(self, c: ModelClass, assoc: Association) -> str:
        target = self.classes[_head_name(assoc.target)]
        if target.stereotype == "external":
            spec = SPECS[target.constructor]
            if assoc.args is not None:
                args = list(assoc.args)
            else:
                args = []
                attrs = iter(target.attributes)
                for p in spec.ctor_params:
                    if not isinstance(p, (type(T.STR), type(T.INT))):
                        raise ModelError(
                            f"class {c.name!r}: containment {assoc.name!r} needs "
                            f"explicit constructor arguments"
                        )
                    attr = next(attrs, None)
                    if attr is None:
                        raise ModelError(
                            f"external {target.name!r} lacks an attribute for a "
                            f"constructor parameter"
                        )
                    args.append(self.attr_value(c, attr) or attr.name)
            return f"{target.constructor}({', '.join(args)})"
        return f"{_fn_name(target)}({', '.join(self.call_args(c, target, set()))})"

    def target_type_name(self, assoc: Association) -> str:
        target = self.classes[_head_name(assoc.target)]
        if target.stereotype == "external":
            return SPECS[target.constructor].type_name
        return target.name

    def parent_parts(self, c: ModelClass):
        """Parent constructor expression and parent type text (rule B1)."""
        sup = self.classes[c.superclass]
        if sup.stereotype != "external":
            args = self.call_args(c, sup, set())
            return f"{_fn_name(sup)}({', '.join(args)})", sup.name
        spec = SPECS[sup.constructor]
        slots = [a for a in c.associations if a.containment and a.parent]
        attrs = iter(self.inherited_attrs(c))
        args = []
        type_args = {}
        for p in spec.ctor_params:
            if isinstance(p, T.TCommand):
                if not slots:
                    raise ModelError(
                        f"class {c.name!r}: parent constructor needs a component"
                    )
                slot = slots.pop(0)
                args.append(slot.name if slot.bind else self.build_ctor(c, slot))
                type_args[p.result.name] = self.target_type_name(slot)
            elif isinstance(p, T.TList):
                names = [self.target_type_name(s) for s in slots]
                built = [
                    s.name if s.bind else self.build_ctor(c, s) for s in slots
                ]
                slots = []
                args.append(f"[{', '.join(built)}]")
                type_args[p.elem.result.name] = "+".join(names)
            else:
                attr = next(attrs, None)
                if attr is None:
                    raise ModelError(
                        f"class {c.name!r}: no attribute for a parent "
                        f"constructor parameter"
                    )
                args.append(self.attr_value(c, attr) or attr.name)
        if spec.type_params:
            ta = ",".join(type_args[v] for v in spec.type_params)
            expr = f"{spec.name}[{ta}]({', '.join(args)})"
            ty = f"{spec.type_name}[{ta}]"
        else:
            expr = f"{spec.name}({', '.join(args)})"
            ty = spec.type_name
        return expr, ty

    # ----- call argument resolution (rules A4, B3) -----

    def scope_names(self, c: ModelClass, extra):
        names = set(extra)
        names.update(p.name for p in self.params_of(c))
        names.update(n for n, _, _ in c.bindings)
        names.update(a.name for a in c.associations if a.containment)
        return names

    def call_args(self, c: ModelClass, target: ModelClass, handler_params):
        scope = self.scope_names(c, handler_params)
        args = []
        for p in self.params_of(target):
            if p.origin == "a4" and p.type == c.name:
                args.append("self")
                continue
            if p.origin == "a3" and p.invariant is not None:
                root, _, rest = p.invariant.source.partition(".")
                owner = _navigation_owner(self.classes, self.sm, target, root)
                if owner is not None and owner.name == c.name and rest in scope:
                    args.append(rest)
                    continue
            if p.name in scope:
                args.append(p.name)
                continue
            raise ModelError(
                f"cannot supply argument {p.name!r} when calling "
                f"{_fn_name(target)} from {c.name!r}"
            )
        return args

    # ----- handlers (rules B3, B4) -----

    def handler_transitions(self, c: ModelClass, op: Operation):
        return [
            t
            for t in self.sm.transitions
            if t.source == c.name and t.event == op.name
        ]

    def handler_ret(self, c: ModelClass, op: Operation) -> str:
        if op.body is not None:
            if op.ret is None:
                raise ModelError(
                    f"handler {op.name!r} on {c.name!r} has a body but no type"
                )
            return op.ret
        trs = self.handler_transitions(c, op)
        if not trs:
            return f"<{c.name}>"
        parts = []
        for tr in trs:
            parts.append(c.name if tr.kind == "self" else tr.target)
            if tr.guard is not None and c.name not in parts:
                parts.append(c.name)
        unique = list(dict.fromkeys(parts))
        return f"<{'+'.join(unique)}>"

    def handler_body(self, c: ModelClass, op: Operation, indent: str) -> str:
        if op.body is not None:
            return op.body
        trs = self.handler_transitions(c, op)
        if not trs:
            self.todos.append((c.name, op.name))
            return (
                "do {\n"
                f"{indent}  // TODO: refine this handler\n"
                f"{indent}  return self\n"
                f"{indent}}}"
            )
        if len(trs) > 1:
            raise ModelError(
                f"handler {op.name!r} on {c.name!r} has conflicting transitions"
            )
        tr = trs[0]
        hp = {n for n, _ in op.params}
        lines = [f"{n}:{t} <- {e}" for n, t, e in tr.bindings]
        if tr.kind == "self":
            core = "self"
        elif tr.kind == "return":
            core = _a4_name(tr.target)
        else:
            target = self.classes[tr.target]
            call = f"{_fn_name(target)}({', '.join(self.call_args(c, target, hp))})"
            if tr.guard is None and not lines:
                return call
            bind = tr.target.lower()
            lines.append(f"{bind}:{tr.target} <- {call}")
            core = f"if {tr.guard} then {bind} else self" if tr.guard else bind
        body = "do {\n"
        for line in lines:
            body += f"{indent}  {line};\n"
        body = body.rstrip(";\n") + "\n" if lines else body
        body += f"{indent}  return {core}\n{indent}}}"
        return body

    # ----- type definitions -----

    def type_def(self, c: ModelClass) -> str:
        if c.stereotype == "record":
            fields = "; ".join(f"{a.name}:{a.type}" for a in c.attributes)
            return f"type {c.name} = {{ {fields} }}"
        _, parent_ty = self.parent_parts(c)
        events = [o for o in c.operations if o.kind == "event"]
        raises = ""
        if events:
            sigs = ", ".join(
                f"{o.name}({','.join(t for _, t in o.params)})" for o in events
            )
            raises = f" raises {sigs}"
        fields = []
        for assoc in c.associations:
            if assoc.containment and not assoc.parent:
                fields.append(f"{assoc.name}:{assoc.target}")
        for op in c.operations:
            if op.kind != "handler":
                continue
            ptypes = ",".join(t for _, t in op.params)
            fields.append(f"{op.name}:({ptypes})->{self.handler_ret(c, op)}")
        body = ";\n  ".join(fields)
        return f"type {c.name} = Widget({parent_ty}){raises} {{\n  {body}\n}}"

    # ----- functions (rules M1, B0-B4) -----

    def function_def(self, c: ModelClass) -> str:
        params = ", ".join(f"{p.name}:{p.type}" for p in self.params_of(c))
        parent_expr, _ = self.parent_parts(c)

        body_lines = []
        for assoc in c.associations:
            if not assoc.containment or assoc.parent:
                continue
            inv = self.shared_invariant(c, assoc.name)
            if inv is not None:
                body_lines.append(f"{assoc.name}:{assoc.target} = {inv.param}")
            else:
                body_lines.append(
                    f"{assoc.name}:{assoc.target} <- {self.build_ctor(c, assoc)}"
                )

        pre = [f"{n}:{t} <- {e}" for n, t, e in c.bindings]
        for assoc in c.associations:
            if assoc.containment and assoc.parent and assoc.bind:
                ty = f"<{self.target_type_name(assoc)}>"
                pre.append(f"{assoc.name}:{ty} = {self.build_ctor(c, assoc)}")

        indent = "    " if pre else "  "
        handler_lines = []
        for op in c.operations:
            if op.kind != "handler":
                continue
            hp = ", ".join(f"{n}:{t}" for n, t in op.params)
            ret = self.handler_ret(c, op)
            body = self.handler_body(c, op, indent + "  ")
            handler_lines.append(f"{op.name}({hp}):{ret} = {body}")

        widget_lines = body_lines + handler_lines
        inner = f";\n{indent}  ".join(widget_lines)
        widget = (
            f"widget self:{c.name} ({parent_expr}) {{\n"
            f"{indent}  {inner}\n{indent}}}"
        )
        head = f"fun {_fn_name(c)}({params}):<{c.name}> ="
        if not pre:
            return f"{head}\n  {widget}"
        steps = ";\n  ".join(pre)
        return (
            f"{head} do {{\n"
            f"  {steps};\n"
            f"  p:{c.name} <-\n"
            f"    {widget}\n"
            f"  return p\n"
            f"}}"
        )

    def generate(self) -> GeneratedSource:
        type_defs = []
        for c in self.classes.values():
            if c.stereotype == "record":
                type_defs.append(self.type_def(c))
        for c in self.classes.values():
            if c.stereotype == "widget":
                type_defs.append(self.type_def(c))
        functions = list(self.model.prelude)
        for c in self.classes.values():
            if c.stereotype == "widget":
                functions.append(self.function_def(c))
        return GeneratedSource(type_defs, functions, self.todos)


def generate(model: RappModel) -> GeneratedSource:
    return Generator(model).generate()
