"""Performing commands: widget instantiation, identifier allocation,
locations, external constructors and commands.
"""

from __future__ import annotations

from .errors import RuntimeErr
from . import externals
from . import evaluate as E
from . import types as T


class EventSignal(Exception):
    """Raised while performing `raise x(v...)`; consumed by dispatch."""

    def __init__(self, name, args):
        super().__init__(name)
        self.name = name
        self.args = args


class TopInstance:
    def __init__(self, id_):
        self.id = id_

    def __repr__(self):
        return "<top>"


class WidgetInstance:
    def __init__(self, self_name):
        self.id = None
        self.self_name = self_name
        self.parent = None
        self.components = {}
        self.handlers = {}

    def __repr__(self):
        return f"<widget {self.id}>"


class ExternalInstance:
    def __init__(self, spec, props, children, state):
        self.id = None
        self.spec = spec
        self.kind = spec.name
        self.props = props
        self.children = children
        self.state = state

    def __repr__(self):
        return f"<{self.kind} {self.id}>"


class RuntimeState:
    def __init__(self, workdir=".", range_=10):
        self.locations = {}
        self.next_loc = 0
        self.next_widget_id = 0
        self.memo = {}  # id(command value) -> (value, instance)
        self.instances = {}  # widget-id -> instance
        self.provider = externals.ProviderSim(range_)
        self.workdir = workdir
        self.top = None

    def fresh_id(self) -> int:
        i = self.next_widget_id
        self.next_widget_id += 1
        return i

    def register(self, inst):
        inst.id = self.fresh_id()
        self.instances[inst.id] = inst
        return inst


def perform(state: RuntimeState, v):
    if isinstance(v, E.DoValue):
        env = dict(v.env)
        for b in v.bindings:
            env[b.name] = perform(state, E.reduce_expr(env, b.expr))
        return E.reduce_expr(env, v.result)
    if isinstance(v, E.WidgetValue):
        return instantiate_widget(state, v)
    if isinstance(v, E.ExternalCtorCommand):
        return construct_external(state, v)
    if isinstance(v, E.RaiseValue):
        raise EventSignal(v.name, v.args)
    if isinstance(v, E.TopValue):
        if state.top is None:
            state.top = state.register(TopInstance(None))
        return state.top
    if isinstance(v, E.BuiltinCommand):
        return loc_get_set(state, v.name, v.args)
    if isinstance(v, E.ExternalCommandCall):
        return external_command(state, v.instance, v.name, v.args)
    if isinstance(v, E.CommandField):
        inst = perform(state, v.subject)
        if not isinstance(inst, ExternalInstance):
            raise RuntimeErr(f"no command {v.name!r} on {inst!r}")
        return external_command(state, inst, v.name, v.args or [])
    if isinstance(v, E.FixValue):
        return perform(state, v.force())
    if isinstance(v, (WidgetInstance, ExternalInstance, TopInstance)):
        return v
    raise RuntimeErr(f"cannot perform non-command value {v!r}")


def loc_get_set(state, which, args):
    if which == "loc":
        loc = E.LocValue(state.next_loc)
        state.next_loc += 1
        state.locations[loc.loc_id] = args[0]
        return loc
    loc = args[0]
    if not isinstance(loc, E.LocValue) or loc.loc_id not in state.locations:
        raise RuntimeErr("dangling location")
    if which == "get":
        return state.locations[loc.loc_id]
    state.locations[loc.loc_id] = args[1]
    return args[1]


def instantiate_widget(state, wv: E.WidgetValue):
    hit = state.memo.get(id(wv))
    if hit is not None:
        return hit[1]
    inst = WidgetInstance(wv.self_name)
    env = dict(wv.env)
    if wv.self_name:
        env[wv.self_name] = inst
    inst.parent = perform(state, E.reduce_expr(env, wv.parent))
    for b in wv.body:
        val = perform(state, E.reduce_expr(env, b.expr))
        if isinstance(b.type, T.TFun):
            # handlers are dispatch-only: they never enter the environment
            inst.handlers[b.name] = (len(b.type.params), val)
        else:
            env[b.name] = val
            inst.components[b.name] = val
    state.register(inst)
    state.memo[id(wv)] = (wv, inst)
    return inst


def construct_external(state, cmd: E.ExternalCtorCommand):
    hit = state.memo.get(id(cmd))
    if hit is not None:
        return hit[1]
    spec = cmd.spec
    if len(cmd.args) != len(spec.ctor_params):
        raise RuntimeErr(f"{spec.name} expects {len(spec.ctor_params)} arguments")
    props = {}
    children = []
    prop_iter = iter(spec.prop_names)
    for pt, arg in zip(spec.ctor_params, cmd.args):
        if isinstance(pt, T.TCommand):
            children.append(perform(state, arg))
        elif isinstance(pt, T.TList) and isinstance(pt.elem, T.TCommand):
            children.extend(perform(state, a) for a in arg)
        else:
            props[next(prop_iter)] = arg
    inst = ExternalInstance(
        spec, props, children, externals.make_state(spec.name, cmd.args, state.workdir, state.provider)
    )
    state.register(inst)
    state.memo[id(cmd)] = (cmd, inst)
    return inst


def external_command(state, inst: ExternalInstance, name, args):
    if inst.state is None:
        raise RuntimeErr(f"{inst.kind} has no command {name!r}")
    return inst.state.command(name, args)
