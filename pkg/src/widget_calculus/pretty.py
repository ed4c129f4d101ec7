"""Pretty-printer for programs and expressions.

Output re-parses to a structurally equal AST.  Layout is line-oriented with
two-space indentation; do-blocks and widget bodies always break.
"""

from __future__ import annotations

from .syntax import (
    App, BinOp, Const, Do, EmptyList, FieldRef, Fix, Fn, FunDef, HandlerDef,
    If, Let, Letrec, ListLit, Program, Raise, RecordLit, Top, TypeAbs,
    TypeDef, TypeInst, ValBind, ValDef, Var, WidgetExpr,
)
from .types import show_type

INDENT = "  "


def show_program(prog: Program) -> str:
    chunks = []
    for d in prog.defs:
        if isinstance(d, TypeDef):
            chunks.append(f"type {d.name} = {show_type(d.type)}")
        elif isinstance(d, ValDef):
            ann = f":{show_type(d.type)}" if d.type is not None else ""
            chunks.append(f"val {d.name}{ann} = {show_expr(d.expr)}")
        elif isinstance(d, FunDef):
            rec = "rec " if d.rec else ""
            params = ", ".join(f"{n}:{show_type(t)}" for n, t in d.params)
            chunks.append(
                f"{rec}fun {d.name}({params}):{show_type(d.ret)} =\n"
                + _indent(show_expr(d.body))
            )
        else:
            raise AssertionError(f"unknown top-level definition {d!r}")
    return "\n\n".join(chunks) + "\n"


def show_expr(e) -> str:
    return _expr(e, 0)


def _indent(s: str) -> str:
    return "\n".join(INDENT + line if line else line for line in s.split("\n"))


# level: 0 = any expression, 1 = additive operand, 2 = postfix subject
def _expr(e, level) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        if isinstance(e.value, int):
            s = str(e.value)
            return f"({s})" if e.value < 0 and level >= 2 else s
        return "'" + e.value.replace("\\", "\\\\").replace("'", "\\'") + "'"
    if isinstance(e, ListLit):
        return "[" + ", ".join(_expr(x, 0) for x in e.items) + "]"
    if isinstance(e, EmptyList):
        return f"[][{show_type(e.elem_type)}]"
    if isinstance(e, RecordLit):
        return "{" + "; ".join(f"{n} = {_expr(x, 0)}" for n, x in e.fields) + "}"
    if isinstance(e, FieldRef):
        return f"{_expr(e.subject, 2)}.{e.name}"
    if isinstance(e, App):
        return f"{_expr(e.fn, 2)}({', '.join(_expr(a, 0) for a in e.args)})"
    if isinstance(e, TypeInst):
        return f"{_expr(e.subject, 2)}[{', '.join(show_type(t) for t in e.type_args)}]"
    if isinstance(e, BinOp):
        s = f"{_expr(e.left, 1)} {e.op} {_expr(e.right, 1 if e.op == '=' else 2)}"
        return f"({s})" if level >= 1 else s
    if isinstance(e, Fn):
        params = ", ".join(f"{n}:{show_type(t)}" for n, t in e.params)
        s = f"fun({params}):{show_type(e.ret)} {_expr(e.body, 0)}"
        return f"({s})" if level >= 1 else s
    if isinstance(e, If):
        s = (
            f"if {_expr(e.cond, 0)}\n"
            f"then {_expr(e.then, 0)}\n"
            f"else {_expr(e.els, 0)}"
        )
        return f"({s})" if level >= 1 else s
    if isinstance(e, Fix):
        return f"fix({_expr(e.fn, 0)})"
    if isinstance(e, Raise):
        s = f"raise {e.name}({', '.join(_expr(a, 0) for a in e.args)})"
        return f"({s})" if level >= 1 else s
    if isinstance(e, Do):
        lines = ["do {"]
        for b in e.bindings:
            op = "<-" if b.arrow else "="
            lines.append(_indent(f"{b.name}:{show_type(b.type)} {op} {_expr(b.expr, 0)}"))
        lines.append(_indent(f"return {_expr(e.result, 0)}"))
        lines.append("}")
        s = "\n".join(lines)
        return f"({s})" if level >= 2 else s
    if isinstance(e, WidgetExpr):
        head = "widget"
        if e.self_name:
            head += f" {e.self_name}"
            if e.self_type is not None:
                head += f":{show_type(e.self_type)}"
        lines = [f"{head} ({_expr(e.parent, 0)}) {{"]
        for d in e.body:
            if isinstance(d, HandlerDef):
                params = ", ".join(f"{n}:{show_type(t)}" for n, t in d.params)
                lines.append(_indent(f"{d.name}({params}):{show_type(d.ret)} = {_expr(d.body, 0)}"))
            else:
                op = "<-" if d.arrow else "="
                lines.append(_indent(f"{d.name}:{show_type(d.type)} {op} {_expr(d.expr, 0)}"))
        lines.append("}")
        s = "\n".join(lines)
        return f"({s})" if level >= 2 else s
    if isinstance(e, Top):
        return "top"
    if isinstance(e, TypeAbs):
        s = f"Fun[{', '.join(e.vars)}] {_expr(e.body, 0)}"
        return f"({s})" if level >= 1 else s
    if isinstance(e, Let):
        s = (
            f"let {e.name}:{show_type(e.type)} = {_expr(e.bound, 0)}\n"
            f"in {_expr(e.body, 0)}"
        )
        return f"({s})" if level >= 1 else s
    if isinstance(e, Letrec):
        lines = ["letrec"]
        for n, t, b in e.bindings:
            lines.append(_indent(f"{n}:{show_type(t)} = {_expr(b, 0)}"))
        lines.append(f"in {_expr(e.body, 0)}")
        s = "\n".join(lines)
        return f"({s})" if level >= 1 else s
    raise AssertionError(f"unknown expr node {e!r}")
