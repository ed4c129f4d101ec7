"""The type grammar: base types, commands with event-effect sets, widget types.

Command and widget types carry an effect set: the event signatures the value
may raise when performed.  An effect annotation of None on a command type
means "unspecified" and is treated as empty except where a checking rule
explicitly allows inference to fill it in.
"""

from __future__ import annotations

from dataclasses import dataclass


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TStr(Type):
    pass


@dataclass(frozen=True)
class TInt(Type):
    pass


@dataclass(frozen=True)
class TBool(Type):
    pass


@dataclass(frozen=True)
class TUnit(Type):
    pass


@dataclass(frozen=True)
class TTop(Type):
    pass


@dataclass(frozen=True)
class TList(Type):
    elem: Type


@dataclass(frozen=True)
class TRecord(Type):
    fields: tuple  # of (name, Type)


@dataclass(frozen=True)
class EventSignature:
    name: str
    arg_types: tuple  # of Type

    def __str__(self):
        return f"{self.name}({','.join(show_type(t) for t in self.arg_types)})"


@dataclass(frozen=True)
class TCommand(Type):
    result: Type
    effects: frozenset | None = None  # of EventSignature; None = unannotated


@dataclass(frozen=True)
class TUnion(Type):
    members: tuple  # of Type, flattened, order-insensitive for equality


@dataclass(frozen=True)
class TWidget(Type):
    parent: Type
    effects: frozenset | None
    fields: tuple  # of (name, Type)


@dataclass(frozen=True)
class TFun(Type):
    params: tuple  # of Type
    result: Type


@dataclass(frozen=True)
class TName(Type):
    """Reference to a declared type, an external widget type, or a type variable."""

    name: str


@dataclass(frozen=True)
class TApp(Type):
    """Application of a named type operator, e.g. Phone[Clock, DoAdd+DoDel]."""

    op: str
    args: tuple


@dataclass(frozen=True)
class TRec(Type):
    var: str
    body: Type


@dataclass(frozen=True)
class TForall(Type):
    vars: tuple  # of str
    body: Type


@dataclass(frozen=True)
class TLoc(Type):
    elem: Type


@dataclass(frozen=True)
class TTypeRecord(Type):
    fields: tuple  # of (name, Type); compile-time namespace only


@dataclass(frozen=True)
class TTypeRef(Type):
    subject: Type
    name: str


STR = TStr()
INT = TInt()
BOOL = TBool()
UNIT = TUnit()
TOP = TTop()

NO_EFFECTS: frozenset = frozenset()


def sig(name, *arg_types) -> EventSignature:
    return EventSignature(name, tuple(arg_types))


def union(*members) -> Type:
    """Flatten and dedupe a union; a single member collapses to itself."""
    flat = []
    for m in members:
        parts = m.members if isinstance(m, TUnion) else (m,)
        for p in parts:
            if p not in flat:
                flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return TUnion(tuple(flat))


def substitute(t: Type, mapping: dict) -> Type:
    """Capture-avoiding substitution of type names (used for Forall/rec binders)."""
    if isinstance(t, TName):
        return mapping.get(t.name, t)
    if isinstance(t, TList):
        return TList(substitute(t.elem, mapping))
    if isinstance(t, TLoc):
        return TLoc(substitute(t.elem, mapping))
    if isinstance(t, TRecord):
        return TRecord(tuple((n, substitute(ft, mapping)) for n, ft in t.fields))
    if isinstance(t, TTypeRecord):
        return TTypeRecord(tuple((n, substitute(ft, mapping)) for n, ft in t.fields))
    if isinstance(t, TTypeRef):
        return TTypeRef(substitute(t.subject, mapping), t.name)
    if isinstance(t, TCommand):
        return TCommand(substitute(t.result, mapping), substitute_effects(t.effects, mapping))
    if isinstance(t, TUnion):
        return union(*(substitute(m, mapping) for m in t.members))
    if isinstance(t, TWidget):
        return TWidget(
            substitute(t.parent, mapping),
            substitute_effects(t.effects, mapping),
            tuple((n, substitute(ft, mapping)) for n, ft in t.fields),
        )
    if isinstance(t, TFun):
        return TFun(tuple(substitute(p, mapping) for p in t.params), substitute(t.result, mapping))
    if isinstance(t, TApp):
        return TApp(t.op, tuple(substitute(a, mapping) for a in t.args))
    if isinstance(t, TRec):
        inner = {k: v for k, v in mapping.items() if k != t.var}
        return TRec(t.var, substitute(t.body, inner))
    if isinstance(t, TForall):
        inner = {k: v for k, v in mapping.items() if k not in t.vars}
        return TForall(t.vars, substitute(t.body, inner))
    return t


def substitute_effects(effects, mapping):
    if effects is None:
        return None
    return frozenset(
        EventSignature(s.name, tuple(substitute(a, mapping) for a in s.arg_types)) for s in effects
    )


def show_effects(effects) -> str:
    return ",".join(sorted(str(s) for s in effects))


def show_type(t: Type) -> str:
    """Canonical textual form; re-parses to an equal type."""
    if isinstance(t, TStr):
        return "str"
    if isinstance(t, TInt):
        return "int"
    if isinstance(t, TBool):
        return "bool"
    if isinstance(t, TUnit):
        return "*"
    if isinstance(t, TTop):
        return "Top"
    if isinstance(t, TList):
        return f"[{show_type(t.elem)}]"
    if isinstance(t, TRecord):
        return "{" + ";".join(f"{n}:{show_type(ft)}" for n, ft in t.fields) + "}"
    if isinstance(t, TTypeRecord):
        return "{{" + ";".join(f"{n}={show_type(ft)}" for n, ft in t.fields) + "}}"
    if isinstance(t, TTypeRef):
        return f"{_atom(t.subject)}.{t.name}"
    if isinstance(t, TCommand):
        s = f"<{show_type(t.result)}>"
        if t.effects:
            s += " raises " + show_effects(t.effects)
        return s
    if isinstance(t, TUnion):
        return "+".join(_atom(m) for m in t.members)
    if isinstance(t, TWidget):
        s = f"Widget({show_type(t.parent)})"
        if t.effects:
            s += " raises " + show_effects(t.effects)
        if t.fields:
            s += " {" + ";".join(f"{n}:{show_type(ft)}" for n, ft in t.fields) + "}"
        return s
    if isinstance(t, TFun):
        return f"({','.join(show_type(p) for p in t.params)})->{show_type(t.result)}"
    if isinstance(t, TName):
        return t.name
    if isinstance(t, TApp):
        return f"{t.op}[{','.join(show_type(a) for a in t.args)}]"
    if isinstance(t, TRec):
        return f"rec {t.var}.{show_type(t.body)}"
    if isinstance(t, TForall):
        return f"Forall({','.join(t.vars)}){show_type(t.body)}"
    if isinstance(t, TLoc):
        return f"!{_atom(t.elem)}"
    raise AssertionError(f"unknown type node {t!r}")


def _atom(t: Type) -> str:
    s = show_type(t)
    if isinstance(t, (TUnion, TFun, TRec, TForall)):
        return f"({s})"
    return s
