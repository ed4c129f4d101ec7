"""Abstract syntax for Widget programs.

Positions are carried for diagnostics but excluded from structural equality,
so round-trip tests can compare parse(pretty_print(ast)) == ast directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Pos
from .types import Type


def _pos():
    return field(default_factory=Pos, compare=False, repr=False)


class Expr:
    __slots__ = ()


@dataclass
class Var(Expr):
    name: str
    pos: Pos = _pos()


@dataclass
class Const(Expr):
    value: object  # str | int | bool
    pos: Pos = _pos()


@dataclass
class ListLit(Expr):
    items: list
    pos: Pos = _pos()


@dataclass
class EmptyList(Expr):
    elem_type: Type
    pos: Pos = _pos()


@dataclass
class RecordLit(Expr):
    fields: list  # of (name, Expr)
    pos: Pos = _pos()


@dataclass
class FieldRef(Expr):
    subject: Expr
    name: str
    pos: Pos = _pos()


@dataclass
class Fn(Expr):
    params: list  # of (name, Type)
    ret: Type
    body: Expr
    pos: Pos = _pos()


@dataclass
class App(Expr):
    fn: Expr
    args: list
    pos: Pos = _pos()


@dataclass
class If(Expr):
    cond: Expr
    then: Expr
    els: Expr
    pos: Pos = _pos()


@dataclass
class Fix(Expr):
    fn: Expr
    pos: Pos = _pos()


@dataclass
class Raise(Expr):
    name: str
    args: list
    pos: Pos = _pos()


@dataclass
class DoBinding:
    name: str
    type: Type
    expr: Expr
    arrow: bool = True  # False for the `x:t = e` sugar form
    pos: Pos = _pos()


@dataclass
class Do(Expr):
    bindings: list  # of DoBinding
    result: Expr
    pos: Pos = _pos()


@dataclass
class ValBind:
    """Widget body definition `x:t <- e` (arrow) or `x:t = e` (value sugar)."""

    name: str
    type: Type
    expr: Expr
    arrow: bool = True
    pos: Pos = _pos()


@dataclass
class HandlerDef:
    """Widget body sugar `name(x:t,...):t = e` for an event handler."""

    name: str
    params: list  # of (name, Type)
    ret: Type
    body: Expr
    pos: Pos = _pos()


@dataclass
class WidgetExpr(Expr):
    self_name: str | None
    self_type: Type | None
    parent: Expr
    body: list  # of ValBind | HandlerDef
    pos: Pos = _pos()


@dataclass
class Top(Expr):
    pos: Pos = _pos()


@dataclass
class TypeAbs(Expr):
    vars: list  # of str
    body: Expr
    pos: Pos = _pos()


@dataclass
class TypeInst(Expr):
    subject: Expr
    type_args: list
    pos: Pos = _pos()


@dataclass
class Let(Expr):
    name: str
    type: Type
    bound: Expr
    body: Expr
    pos: Pos = _pos()


@dataclass
class Letrec(Expr):
    bindings: list  # of (name, Type, Expr)
    body: Expr
    pos: Pos = _pos()


@dataclass
class BinOp(Expr):
    op: str  # '+', '-', '='
    left: Expr
    right: Expr
    pos: Pos = _pos()


# ---------- top-level definitions ----------


@dataclass
class FunDef:
    name: str
    params: list  # of (name, Type)
    ret: Type
    body: Expr
    rec: bool = False
    pos: Pos = _pos()


@dataclass
class ValDef:
    name: str
    type: Type | None
    expr: Expr
    pos: Pos = _pos()


@dataclass
class TypeDef:
    name: str
    type: Type
    pos: Pos = _pos()


@dataclass
class Program:
    defs: list
    entry: str | None = "main"


def is_value(e: Expr) -> bool:
    """Does e belong to the value (normal form) subset of the grammar?"""
    if isinstance(e, (Var, Const, Fn, Do, WidgetExpr, Top)):
        return True
    if isinstance(e, ListLit):
        return all(is_value(x) for x in e.items)
    if isinstance(e, EmptyList):
        return True
    if isinstance(e, RecordLit):
        return all(is_value(x) for _, x in e.fields)
    if isinstance(e, Raise):
        return all(is_value(x) for x in e.args)
    return False


def _is_handler_binding(d) -> bool:
    from .types import TFun

    return isinstance(d.type, TFun)


def free_vars(e: Expr, bound=frozenset()) -> set:
    """Free term variables of an expression (used to close recursive groups)."""
    if isinstance(e, Var):
        return set() if e.name in bound else {e.name}
    if isinstance(e, (Const, EmptyList, Top)):
        return set()
    if isinstance(e, ListLit):
        return set().union(*(free_vars(x, bound) for x in e.items)) if e.items else set()
    if isinstance(e, RecordLit):
        out = set()
        for _, x in e.fields:
            out |= free_vars(x, bound)
        return out
    if isinstance(e, FieldRef):
        return free_vars(e.subject, bound)
    if isinstance(e, Fn):
        return free_vars(e.body, bound | {n for n, _ in e.params})
    if isinstance(e, App):
        out = free_vars(e.fn, bound)
        for a in e.args:
            out |= free_vars(a, bound)
        return out
    if isinstance(e, If):
        return free_vars(e.cond, bound) | free_vars(e.then, bound) | free_vars(e.els, bound)
    if isinstance(e, Fix):
        return free_vars(e.fn, bound)
    if isinstance(e, Raise):
        out = set()
        for a in e.args:
            out |= free_vars(a, bound)
        return out
    if isinstance(e, Do):
        out = set()
        b = bound
        for binding in e.bindings:
            out |= free_vars(binding.expr, b)
            b = b | {binding.name}
        return out | free_vars(e.result, b)
    if isinstance(e, WidgetExpr):
        # handler names are reachable only through event dispatch, so they do
        # not bind; component names do
        b = bound
        if e.self_name:
            b = b | {e.self_name}
        names = set()
        for d in e.body:
            if isinstance(d, ValBind) and not _is_handler_binding(d):
                names.add(d.name)
        b = b | names
        out = free_vars(e.parent, b)
        for d in e.body:
            if isinstance(d, HandlerDef):
                out |= free_vars(d.body, b | {n for n, _ in d.params})
            else:
                out |= free_vars(d.expr, b)
        return out
    if isinstance(e, TypeAbs):
        return free_vars(e.body, bound)
    if isinstance(e, TypeInst):
        return free_vars(e.subject, bound)
    if isinstance(e, Let):
        return free_vars(e.bound, bound) | free_vars(e.body, bound | {e.name})
    if isinstance(e, Letrec):
        b = bound | {n for n, _, _ in e.bindings}
        out = free_vars(e.body, b)
        for _, _, be in e.bindings:
            out |= free_vars(be, b)
        return out
    if isinstance(e, BinOp):
        return free_vars(e.left, bound) | free_vars(e.right, bound)
    raise AssertionError(f"unknown expr node {e!r}")
