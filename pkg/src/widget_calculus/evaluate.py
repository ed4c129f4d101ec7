"""Pure reduction of expressions to values.

Reduction never touches runtime state; commands (do-blocks, widget
definitions, raises, builtin command applications) reduce to first-class
command values that the runtime performs later.  Environments are plain
dicts copied at extension points, so closures share bindings by reference
and a fix-bound value keeps one identity across unfoldings.
"""

from __future__ import annotations

from .errors import RuntimeErr
from . import externals
from . import syntax as S
from . import types as T


class Value:
    __slots__ = ()


class Closure(Value):
    __slots__ = ("params", "ret", "body", "env")

    def __init__(self, params, ret, body, env):
        self.params = params
        self.ret = ret
        self.body = body
        self.env = env

    def __repr__(self):
        return f"<fun/{len(self.params)}>"


class FixValue(Value):
    """fix(f), unrolled lazily on demand; the unrolling is cached so every
    unfolding observes the same value identity."""

    __slots__ = ("fn", "cached", "forcing")

    def __init__(self, fn):
        self.fn = fn
        self.cached = None
        self.forcing = False

    def force(self):
        if self.cached is None:
            if self.forcing:
                raise RuntimeErr("ill-founded recursive definition")
            self.forcing = True
            try:
                self.cached = apply(self.fn, [self])
            finally:
                self.forcing = False
        return self.cached


class DoValue(Value):
    __slots__ = ("bindings", "result", "env")

    def __init__(self, bindings, result, env):
        self.bindings = bindings
        self.result = result
        self.env = env

    def __repr__(self):
        return "<do-command>"


class WidgetValue(Value):
    __slots__ = ("self_name", "self_type", "parent", "body", "env")

    def __init__(self, self_name, self_type, parent, body, env):
        self.self_name = self_name
        self.self_type = self_type
        self.parent = parent
        self.body = body
        self.env = env

    def __repr__(self):
        return "<widget-command>"


class RaiseValue(Value):
    __slots__ = ("name", "args")

    def __init__(self, name, args):
        self.name = name
        self.args = args

    def __repr__(self):
        return f"<raise {self.name}/{len(self.args)}>"


class TopValue(Value):
    __slots__ = ()

    def __repr__(self):
        return "top"


TOP_VALUE = TopValue()


class TypeAbsValue(Value):
    __slots__ = ("vars", "body", "env")

    def __init__(self, vars_, body, env):
        self.vars = vars_
        self.body = body
        self.env = env


class LocValue(Value):
    __slots__ = ("loc_id",)

    def __init__(self, loc_id):
        self.loc_id = loc_id

    def __repr__(self):
        return f"<loc {self.loc_id}>"


class BuiltinFn(Value):
    """loc/get/set/head/tail and the external widget constructors."""

    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"<builtin {self.name}>"


class BuiltinCommand(Value):
    __slots__ = ("name", "args")

    def __init__(self, name, args):
        self.name = name
        self.args = args


class ExternalCtorCommand(Value):
    __slots__ = ("spec", "args")

    def __init__(self, spec, args):
        self.spec = spec
        self.args = args

    def __repr__(self):
        return f"<{self.spec.name}-command>"


class ExternalMethod(Value):
    """A named command of an external instance awaiting its arguments."""

    __slots__ = ("instance", "name")

    def __init__(self, instance, name):
        self.instance = instance
        self.name = name


class ExternalCommandCall(Value):
    __slots__ = ("instance", "name", "args")

    def __init__(self, instance, name, args):
        self.instance = instance
        self.name = name
        self.args = args


class CommandField(Value):
    """Field reference on an unperformed command (s.name where s:<AddScreen>);
    resolved through the instantiation memo at perform time."""

    __slots__ = ("subject", "name", "args")

    def __init__(self, subject, name, args=None):
        self.subject = subject
        self.name = name
        self.args = args


def builtin_env() -> dict:
    env = {n: BuiltinFn(n) for n in ("loc", "get", "set", "head", "tail")}
    for name in externals.SPECS:
        env[name] = BuiltinFn(name)
    return env


def reduce_expr(env, e):
    if isinstance(e, S.Var):
        try:
            return env[e.name]
        except KeyError:
            raise RuntimeErr(f"unbound variable {e.name!r}", e.pos) from None
    if isinstance(e, S.Const):
        return e.value
    if isinstance(e, S.EmptyList):
        return []
    if isinstance(e, S.ListLit):
        return [reduce_expr(env, x) for x in e.items]
    if isinstance(e, S.RecordLit):
        return {n: reduce_expr(env, x) for n, x in e.fields}
    if isinstance(e, S.FieldRef):
        return field_ref(reduce_expr(env, e.subject), e.name, e.pos)
    if isinstance(e, S.Fn):
        return Closure(e.params, e.ret, e.body, env)
    if isinstance(e, S.App):
        f = reduce_expr(env, e.fn)
        args = [reduce_expr(env, a) for a in e.args]
        return apply(f, args)
    if isinstance(e, S.If):
        if reduce_expr(env, e.cond):
            return reduce_expr(env, e.then)
        return reduce_expr(env, e.els)
    if isinstance(e, S.Fix):
        return FixValue(reduce_expr(env, e.fn))
    if isinstance(e, S.Raise):
        return RaiseValue(e.name, [reduce_expr(env, a) for a in e.args])
    if isinstance(e, S.Do):
        return DoValue(e.bindings, e.result, env)
    if isinstance(e, S.WidgetExpr):
        return WidgetValue(e.self_name, e.self_type, e.parent, e.body, env)
    if isinstance(e, S.Top):
        return TOP_VALUE
    if isinstance(e, S.TypeAbs):
        return TypeAbsValue(e.vars, e.body, env)
    if isinstance(e, S.TypeInst):
        v = reduce_expr(env, e.subject)
        return type_inst(v)
    if isinstance(e, S.Let):
        inner = dict(env)
        inner[e.name] = reduce_expr(env, e.bound)
        return reduce_expr(inner, e.body)
    if isinstance(e, S.BinOp):
        left = reduce_expr(env, e.left)
        right = reduce_expr(env, e.right)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        return value_eq(left, right)
    raise RuntimeErr(f"cannot reduce {type(e).__name__}", getattr(e, "pos", None))


def type_inst(v):
    """Type application is erased at runtime."""
    if isinstance(v, TypeAbsValue):
        return reduce_expr(v.env, v.body)
    if isinstance(v, FixValue):
        return type_inst(v.force())
    return v  # builtins are uniformly polymorphic


def apply(f, args):
    if isinstance(f, Closure):
        if len(f.params) != len(args):
            raise RuntimeErr(
                f"function of {len(f.params)} parameters applied to {len(args)} arguments"
            )
        inner = dict(f.env)
        inner.update({n: a for (n, _), a in zip(f.params, args)})
        return reduce_expr(inner, f.body)
    if isinstance(f, FixValue):
        return apply(f.force(), args)
    if isinstance(f, BuiltinFn):
        return apply_builtin(f.name, args)
    if isinstance(f, ExternalMethod):
        return ExternalCommandCall(f.instance, f.name, args)
    if isinstance(f, CommandField):
        return CommandField(f.subject, f.name, args)
    raise RuntimeErr(f"cannot apply non-function value {f!r}")


def apply_builtin(name, args):
    if name == "head":
        if not args[0]:
            raise RuntimeErr("head of empty list")
        return args[0][0]
    if name == "tail":
        if not args[0]:
            raise RuntimeErr("tail of empty list")
        return args[0][1:]
    if name in ("loc", "get", "set"):
        return BuiltinCommand(name, args)
    spec = externals.SPECS.get(name)
    if spec is not None:
        return ExternalCtorCommand(spec, args)
    raise RuntimeErr(f"unknown builtin {name!r}")


def field_ref(subject, name, pos=None):
    from . import runtime  # instance classes live there

    if isinstance(subject, dict):
        if name not in subject:
            raise RuntimeErr(f"no field {name!r} in record", pos)
        return subject[name]
    if isinstance(subject, FixValue):
        return field_ref(subject.force(), name, pos)
    if isinstance(subject, runtime.ExternalInstance):
        if name not in subject.spec.commands:
            raise RuntimeErr(f"no command {name!r} on {subject.kind}", pos)
        params, _ = subject.spec.commands[name]
        if params:
            return ExternalMethod(subject, name)
        return ExternalCommandCall(subject, name, [])
    if isinstance(subject, runtime.WidgetInstance):
        if name in subject.components:
            return subject.components[name]
        if name in subject.handlers:
            return subject.handlers[name]
        raise RuntimeErr(f"no field {name!r} on widget instance", pos)
    if isinstance(subject, (DoValue, WidgetValue, ExternalCtorCommand, CommandField)):
        return CommandField(subject, name)
    raise RuntimeErr(f"no field {name!r} on {subject!r}", pos)


def is_command_value(v) -> bool:
    return isinstance(
        v,
        (
            DoValue, WidgetValue, RaiseValue, TopValue, BuiltinCommand,
            ExternalCtorCommand, ExternalCommandCall, CommandField, FixValue,
        ),
    )


def value_eq(a, b) -> bool:
    """Structural equality on data, identity on widgets/functions/commands."""
    if isinstance(a, Value) or isinstance(b, Value):
        if isinstance(a, LocValue) and isinstance(b, LocValue):
            return a.loc_id == b.loc_id
        return a is b
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(value_eq(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(value_eq(a[k], b[k]) for k in a)
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if type(a) is type(b) or (isinstance(a, (int, str)) and isinstance(b, (int, str))):
        return a == b
    return a is b


def global_env(prog: S.Program) -> dict:
    """Evaluate a desugared program's definitions into one environment."""
    env = builtin_env()
    for d in prog.defs:
        if isinstance(d, S.TypeDef):
            continue
        env[d.name] = reduce_expr(env, d.expr)
    return env
