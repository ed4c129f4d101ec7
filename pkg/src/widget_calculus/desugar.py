"""Desugaring: reduce surface forms to the small core the checker and
evaluator understand.

Three rewrites happen here:
  * handler sugar `name(x:t,...):r = e` in widget bodies becomes a plain
    function-typed binding `name:(t,...)->r = fun(x:t,...):r e`;
  * `letrec` becomes `let` + `fix`, using a record of the bindings when the
    group is mutual;
  * top-level `fun`/`val` definitions are sorted by dependency, with
    recursive groups closed by the same record-fix construction.

Hidden names introduced here start with `$`, which the lexer rejects, so
they can never collide with user identifiers.
"""

from __future__ import annotations

from .errors import TypeErr
from .syntax import (
    App, BinOp, Do, DoBinding, FieldRef, Fix, Fn, FunDef, HandlerDef, If,
    Let, Letrec, ListLit, Program, Raise, RecordLit, TypeAbs, TypeDef,
    TypeInst, ValBind, ValDef, Var, WidgetExpr, free_vars,
)
from .types import TFun, TRecord


def desugar_program(prog: Program) -> Program:
    type_defs = [d for d in prog.defs if isinstance(d, TypeDef)]
    term_defs = [d for d in prog.defs if not isinstance(d, TypeDef)]
    out = list(type_defs)
    counter = [0]
    for group in _sccs(term_defs):
        out.extend(_close_group(group, counter))
    return Program(out, prog.entry)


def desugar_expr(e):
    """Rewrite an expression bottom-up."""
    if isinstance(e, ListLit):
        return ListLit([desugar_expr(x) for x in e.items], pos=e.pos)
    if isinstance(e, RecordLit):
        return RecordLit([(n, desugar_expr(x)) for n, x in e.fields], pos=e.pos)
    if isinstance(e, FieldRef):
        return FieldRef(desugar_expr(e.subject), e.name, pos=e.pos)
    if isinstance(e, Fn):
        return Fn(e.params, e.ret, desugar_expr(e.body), pos=e.pos)
    if isinstance(e, App):
        return App(desugar_expr(e.fn), [desugar_expr(a) for a in e.args], pos=e.pos)
    if isinstance(e, If):
        return If(desugar_expr(e.cond), desugar_expr(e.then), desugar_expr(e.els), pos=e.pos)
    if isinstance(e, Fix):
        return Fix(desugar_expr(e.fn), pos=e.pos)
    if isinstance(e, Raise):
        return Raise(e.name, [desugar_expr(a) for a in e.args], pos=e.pos)
    if isinstance(e, Do):
        bindings = []
        for b in e.bindings:
            expr = desugar_expr(b.expr)
            if not b.arrow:
                expr = Do([], expr, pos=b.pos)
            bindings.append(DoBinding(b.name, b.type, expr, True, pos=b.pos))
        return Do(bindings, desugar_expr(e.result), pos=e.pos)
    if isinstance(e, WidgetExpr):
        body = []
        for d in e.body:
            if isinstance(d, HandlerDef):
                fn = Fn(d.params, d.ret, desugar_expr(d.body), pos=d.pos)
                ty = TFun(tuple(t for _, t in d.params), d.ret)
                body.append(ValBind(d.name, ty, Do([], fn, pos=d.pos), arrow=True, pos=d.pos))
            else:
                expr = desugar_expr(d.expr)
                if not d.arrow:
                    expr = Do([], expr, pos=d.pos)
                body.append(ValBind(d.name, d.type, expr, True, pos=d.pos))
        return WidgetExpr(e.self_name, e.self_type, desugar_expr(e.parent), body, pos=e.pos)
    if isinstance(e, TypeAbs):
        return TypeAbs(e.vars, desugar_expr(e.body), pos=e.pos)
    if isinstance(e, TypeInst):
        return TypeInst(desugar_expr(e.subject), e.type_args, pos=e.pos)
    if isinstance(e, Let):
        return Let(e.name, e.type, desugar_expr(e.bound), desugar_expr(e.body), pos=e.pos)
    if isinstance(e, Letrec):
        bindings = [(n, t, desugar_expr(b)) for n, t, b in e.bindings]
        return _letrec(bindings, desugar_expr(e.body), [0], pos=e.pos)
    if isinstance(e, BinOp):
        return BinOp(e.op, desugar_expr(e.left), desugar_expr(e.right), pos=e.pos)
    return e  # Var, Const, EmptyList, Top


# ---------- letrec ----------


def _subst_vars(e, mapping):
    """Replace free occurrences of the named variables, respecting shadowing."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, ListLit):
        return ListLit([_subst_vars(x, mapping) for x in e.items], pos=e.pos)
    if isinstance(e, RecordLit):
        return RecordLit([(n, _subst_vars(x, mapping)) for n, x in e.fields], pos=e.pos)
    if isinstance(e, FieldRef):
        return FieldRef(_subst_vars(e.subject, mapping), e.name, pos=e.pos)
    if isinstance(e, Fn):
        inner = {k: v for k, v in mapping.items() if k not in {n for n, _ in e.params}}
        return Fn(e.params, e.ret, _subst_vars(e.body, inner), pos=e.pos)
    if isinstance(e, App):
        return App(_subst_vars(e.fn, mapping), [_subst_vars(a, mapping) for a in e.args], pos=e.pos)
    if isinstance(e, If):
        return If(*(_subst_vars(x, mapping) for x in (e.cond, e.then, e.els)), pos=e.pos)
    if isinstance(e, Fix):
        return Fix(_subst_vars(e.fn, mapping), pos=e.pos)
    if isinstance(e, Raise):
        return Raise(e.name, [_subst_vars(a, mapping) for a in e.args], pos=e.pos)
    if isinstance(e, Do):
        m = dict(mapping)
        bindings = []
        for b in e.bindings:
            bindings.append(DoBinding(b.name, b.type, _subst_vars(b.expr, m), b.arrow, pos=b.pos))
            m.pop(b.name, None)
        return Do(bindings, _subst_vars(e.result, m), pos=e.pos)
    if isinstance(e, WidgetExpr):
        m = dict(mapping)
        if e.self_name:
            m.pop(e.self_name, None)
        for d in e.body:
            # handler names are dispatch-only and never shadow outer variables
            if not isinstance(d.type, TFun):
                m.pop(d.name, None)
        body = [ValBind(d.name, d.type, _subst_vars(d.expr, m), d.arrow, pos=d.pos) for d in e.body]
        return WidgetExpr(e.self_name, e.self_type, _subst_vars(e.parent, m), body, pos=e.pos)
    if isinstance(e, TypeAbs):
        return TypeAbs(e.vars, _subst_vars(e.body, mapping), pos=e.pos)
    if isinstance(e, TypeInst):
        return TypeInst(_subst_vars(e.subject, mapping), e.type_args, pos=e.pos)
    if isinstance(e, Let):
        inner = {k: v for k, v in mapping.items() if k != e.name}
        return Let(e.name, e.type, _subst_vars(e.bound, mapping), _subst_vars(e.body, inner), pos=e.pos)
    if isinstance(e, BinOp):
        return BinOp(e.op, _subst_vars(e.left, mapping), _subst_vars(e.right, mapping), pos=e.pos)
    return e  # Const, EmptyList, Top (Letrec is gone by the time this runs)


def _letrec(bindings, body, counter, pos):
    if len(bindings) == 1:
        name, ty, bound = bindings[0]
        if name not in free_vars(bound):
            return Let(name, ty, bound, body, pos=pos)
        return Let(name, ty, Fix(Fn([(name, ty)], ty, bound, pos=pos), pos=pos), body, pos=pos)
    rec_ty = TRecord(tuple((n, t) for n, t, _ in bindings))
    grp = f"$rec{counter[0]}"
    counter[0] += 1
    mapping = {n: FieldRef(Var(grp, pos=pos), n, pos=pos) for n, _, _ in bindings}
    record = RecordLit([(n, _subst_vars(b, mapping)) for n, _, b in bindings], pos=pos)
    knot = Fix(Fn([(grp, rec_ty)], rec_ty, record, pos=pos), pos=pos)
    opened = body
    for n, t, _ in reversed(bindings):
        opened = Let(n, t, FieldRef(Var(grp, pos=pos), n, pos=pos), opened, pos=pos)
    return Let(grp, rec_ty, knot, opened, pos=pos)


# ---------- top-level definitions ----------


def _def_type(d):
    if isinstance(d, FunDef):
        return TFun(tuple(t for _, t in d.params), d.ret)
    return d.type


def _def_body(d):
    if isinstance(d, FunDef):
        return Fn(d.params, d.ret, desugar_expr(d.body), pos=d.pos)
    return desugar_expr(d.expr)


def _sccs(defs):
    """Tarjan's strongly connected components over top-level term definitions,
    emitted in dependency order."""
    names = {d.name: i for i, d in enumerate(defs)}
    deps = []
    for d in defs:
        fv = free_vars(d.body if isinstance(d, FunDef) else d.expr)
        if isinstance(d, FunDef):
            fv -= {n for n, _ in d.params}
        deps.append([names[v] for v in fv if v in names])

    index = [None] * len(defs)
    low = [0] * len(defs)
    on_stack = [False] * len(defs)
    stack = []
    next_index = [0]
    out = []

    def strongconnect(v):
        # iterative to survive long dependency chains
        work = [(v, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                index[node] = low[node] = next_index[0]
                next_index[0] += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            for j in range(pi, len(deps[node])):
                w = deps[node][j]
                if index[w] is None:
                    work[-1] = (node, j + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                out.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for v in range(len(defs)):
        if index[v] is None:
            strongconnect(v)
    return [[defs[i] for i in comp] for comp in out]


def _close_group(group, counter):
    if len(group) == 1:
        d = group[0]
        body = _def_body(d)
        ty = _def_type(d)
        if d.name in free_vars(d.body if isinstance(d, FunDef) else d.expr):
            if ty is None:
                raise TypeErr(f"recursive definition {d.name!r} needs a type annotation", d.pos)
            body = Fix(Fn([(d.name, ty)], ty, body, pos=d.pos), pos=d.pos)
        return [ValDef(d.name, ty, body, pos=d.pos)]
    for d in group:
        if _def_type(d) is None:
            raise TypeErr(f"recursive definition {d.name!r} needs a type annotation", d.pos)
    rec_ty = TRecord(tuple((d.name, _def_type(d)) for d in group))
    grp = f"$grp{counter[0]}"
    counter[0] += 1
    pos = group[0].pos
    mapping = {d.name: FieldRef(Var(grp, pos=pos), d.name, pos=pos) for d in group}
    record = RecordLit(
        [(d.name, _subst_vars(_def_body(d), mapping)) for d in group], pos=pos
    )
    knot = Fix(Fn([(grp, rec_ty)], rec_ty, record, pos=pos), pos=pos)
    out = [ValDef(grp, rec_ty, knot, pos=pos)]
    for d in group:
        out.append(ValDef(d.name, _def_type(d), FieldRef(Var(grp, pos=pos), d.name, pos=pos), pos=d.pos))
    return out
