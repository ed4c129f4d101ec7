"""Type checker: event-effect tracking, unions, recursive named types,
polymorphism, and the runnability condition.

Checking is bidirectional: every binder carries an annotation, `infer`
synthesizes a type, and `compatible` decides whether a synthesized type fits
an annotation (union membership, widget parent chains, effect subsets).
"""

from __future__ import annotations

from .errors import TypeErr
from . import externals
from . import syntax as S
from . import types as T
from .types import (
    BOOL, INT, NO_EFFECTS, STR, TOP, UNIT, EventSignature, TApp, TBool,
    TCommand, TForall, TFun, TInt, TList, TLoc, TName, TRec, TRecord, TStr,
    TTop, TTypeRecord, TTypeRef, TUnion, TUnit, TWidget, show_effects,
    show_type, substitute,
)


def builtin_env() -> dict:
    t = TName("t")
    env = {
        "loc": TForall(("t",), TFun((t,), TCommand(TLoc(t), NO_EFFECTS))),
        "get": TForall(("t",), TFun((TLoc(t),), TCommand(t, NO_EFFECTS))),
        "set": TForall(("t",), TFun((TLoc(t), t), TCommand(t, NO_EFFECTS))),
        "head": TForall(("t",), TFun((TList(t),), t)),
        "tail": TForall(("t",), TFun((TList(t),), TList(t))),
    }
    for spec in externals.SPECS.values():
        env[spec.name] = spec.ctor_type()
    return env


class Checker:
    def __init__(self, type_defs=None):
        self.type_defs = dict(type_defs or {})
        self.type_vars = set()

    # ---------- type well-formedness ----------

    def validate_type(self, t, pos=None, bound=frozenset()):
        """Check every type name is known; resolve is separate (lazy)."""
        if isinstance(t, TName):
            if (
                t.name not in self.type_defs
                and t.name not in externals.SPECS_BY_TYPE
                and t.name not in self.type_vars
                and t.name not in bound
            ):
                raise TypeErr(f"unknown type {t.name!r}", pos)
        elif isinstance(t, TApp):
            spec = externals.SPECS_BY_TYPE.get(t.op)
            if spec is None:
                raise TypeErr(f"unknown type operator {t.op!r}", pos)
            if len(t.args) != len(spec.type_params):
                raise TypeErr(
                    f"{t.op} expects {len(spec.type_params)} type arguments", pos
                )
            for a in t.args:
                self.validate_type(a, pos, bound)
        elif isinstance(t, (TList, TLoc)):
            self.validate_type(t.elem, pos, bound)
        elif isinstance(t, (TRecord, TTypeRecord)):
            for _, ft in t.fields:
                self.validate_type(ft, pos, bound)
        elif isinstance(t, TCommand):
            self.validate_type(t.result, pos, bound)
            for s in t.effects or ():
                for a in s.arg_types:
                    self.validate_type(a, pos, bound)
        elif isinstance(t, TUnion):
            for m in t.members:
                self.validate_type(m, pos, bound)
        elif isinstance(t, TWidget):
            self.validate_type(t.parent, pos, bound)
            for s in t.effects or ():
                for a in s.arg_types:
                    self.validate_type(a, pos, bound)
            for _, ft in t.fields:
                self.validate_type(ft, pos, bound)
        elif isinstance(t, TFun):
            for p in t.params:
                self.validate_type(p, pos, bound)
            self.validate_type(t.result, pos, bound)
        elif isinstance(t, TRec):
            self.validate_type(t.body, pos, bound | {t.var})
        elif isinstance(t, TForall):
            self.validate_type(t.body, pos, bound | set(t.vars))
        elif isinstance(t, TTypeRef):
            self.member_type(t, pos)  # resolves eagerly, raising on failure

    def member_type(self, t: TTypeRef, pos=None):
        subject = self.normalize(t.subject)
        if isinstance(subject, TTypeRecord):
            for n, ft in subject.fields:
                if n == t.name:
                    return ft
        raise TypeErr(f"no type member {t.name!r} on {show_type(t.subject)}", pos)

    def normalize(self, t):
        """Unfold named/recursive/member types until a structural head appears.
        External widget names are structural heads and stay put."""
        seen = 0
        while True:
            if isinstance(t, TName) and t.name in self.type_defs:
                t = self.type_defs[t.name]
            elif isinstance(t, TRec):
                t = substitute(t.body, {t.var: t})
            elif isinstance(t, TTypeRef):
                t = self.member_type(t)
            else:
                return t
            seen += 1
            if seen > 100:
                raise TypeErr("unproductive recursive type")

    # ---------- compatibility ----------

    def compatible(self, expected, actual, assume=None) -> bool:
        if assume is None:
            assume = set()
        key = (expected, actual)
        if expected == actual or key in assume:
            return True
        assume = assume | {key}
        exp, act = self.normalize(expected), self.normalize(actual)
        if exp == act:
            return True
        c = lambda e, a: self.compatible(e, a, assume)

        if isinstance(exp, TUnion):
            if isinstance(act, TUnion):
                return all(any(c(m, a) for m in exp.members) for a in act.members)
            return any(c(m, act) for m in exp.members)
        if isinstance(act, TUnion):
            return all(c(exp, a) for a in act.members)
        if isinstance(exp, TCommand) and isinstance(act, TCommand):
            if not c(exp.result, act.result):
                return False
            if exp.effects is None:
                return True
            return self.effects_subset(act.effects or NO_EFFECTS, exp.effects)
        if isinstance(exp, TList) and isinstance(act, TList):
            return c(exp.elem, act.elem)
        if isinstance(exp, TLoc) and isinstance(act, TLoc):
            return c(exp.elem, act.elem) and c(act.elem, exp.elem)
        if isinstance(exp, TRecord) and isinstance(act, TRecord):
            af = dict(act.fields)
            return all(n in af and c(ft, af[n]) for n, ft in exp.fields)
        if isinstance(exp, TFun) and isinstance(act, TFun):
            return (
                len(exp.params) == len(act.params)
                and all(c(a, e) for e, a in zip(exp.params, act.params))
                and c(exp.result, act.result)
            )
        if isinstance(exp, TApp) and isinstance(act, TApp):
            return (
                exp.op == act.op
                and len(exp.args) == len(act.args)
                and all(
                    c(e, a) and c(a, e) for e, a in zip(exp.args, act.args)
                )
            )
        if isinstance(exp, TForall) and isinstance(act, TForall):
            if len(exp.vars) != len(act.vars):
                return False
            renamed = substitute(
                act.body, {av: TName(ev) for av, ev in zip(act.vars, exp.vars)}
            )
            return c(exp.body, renamed)
        if isinstance(act, TWidget):
            if isinstance(exp, TWidget):
                if (
                    c(exp.parent, act.parent)
                    and self.effects_subset(act.effects or NO_EFFECTS, exp.effects or NO_EFFECTS)
                ):
                    af = dict(act.fields)
                    if all(n in af and c(ft, af[n]) for n, ft in exp.fields):
                        return True
            # widget is compatible with anything up its parent chain
            return c(exp, act.parent)
        return False

    def effects_subset(self, sub, sup) -> bool:
        return all(self.find_sig(s, sup) for s in sub)

    def find_sig(self, s: EventSignature, effects) -> bool:
        for other in effects:
            if other.name == s.name and len(other.arg_types) == len(s.arg_types):
                if all(
                    self.compatible(a, b) and self.compatible(b, a)
                    for a, b in zip(other.arg_types, s.arg_types)
                ):
                    return True
                raise TypeErr(
                    f"event {s.name!r} used with conflicting signatures: "
                    f"{s} vs {other}"
                )
        return False

    def combine(self, t1, t2):
        """Branch combination for conditionals: commands merge pointwise."""
        if t1 == t2:
            return t1
        n1, n2 = self.normalize(t1), self.normalize(t2)
        if isinstance(n1, TCommand) and isinstance(n2, TCommand):
            if n1.effects is None and n2.effects is None:
                eff = None
            else:
                eff = (n1.effects or NO_EFFECTS) | (n2.effects or NO_EFFECTS)
            return TCommand(self.combine(t_result(t1, n1), t_result(t2, n2)), eff)
        return T.union(t1, t2)

    # ---------- events of widget-like types ----------

    def events_of(self, t, seen=None) -> frozenset:
        if seen is None:
            seen = set()
        if t in seen:
            return NO_EFFECTS
        seen = seen | {t}
        t = self.normalize(t)
        if isinstance(t, TWidget):
            return t.effects or NO_EFFECTS
        if isinstance(t, TUnion):
            out = NO_EFFECTS
            for m in t.members:
                out |= self.events_of(m, seen)
            return out
        spec = externals.spec_for_type(t)
        if spec is not None:
            out = spec.raises
            if isinstance(t, TApp):
                for i in spec.flow_params:
                    out |= self.events_of(t.args[i], seen)
            return out
        return NO_EFFECTS

    # ---------- inference ----------

    def infer(self, env, e):
        if isinstance(e, S.Var):
            if e.name not in env:
                raise TypeErr(f"unbound variable {e.name!r}", e.pos)
            return env[e.name]
        if isinstance(e, S.Const):
            if isinstance(e.value, bool):
                return BOOL
            if isinstance(e.value, int):
                return INT
            return STR
        if isinstance(e, S.EmptyList):
            self.validate_type(e.elem_type, e.pos)
            return TList(e.elem_type)
        if isinstance(e, S.ListLit):
            elem = None
            for x in e.items:
                xt = self.infer(env, x)
                elem = xt if elem is None else self.combine(elem, xt)
            return TList(elem)
        if isinstance(e, S.RecordLit):
            return TRecord(tuple((n, self.infer(env, x)) for n, x in e.fields))
        if isinstance(e, S.FieldRef):
            return self.infer_field(env, e)
        if isinstance(e, S.Fn):
            for _, pt in e.params:
                self.validate_type(pt, e.pos)
            self.validate_type(e.ret, e.pos)
            inner = dict(env)
            inner.update({n: pt for n, pt in e.params})
            body_t = self.check_expr(inner, e.body, e.ret)
            return TFun(tuple(pt for _, pt in e.params), body_t)
        if isinstance(e, S.App):
            ft = self.normalize(self.infer(env, e.fn))
            if isinstance(ft, TForall):
                raise TypeErr("polymorphic value needs type instantiation", e.pos)
            if not isinstance(ft, TFun):
                raise TypeErr(f"cannot apply non-function of type {show_type(ft)}", e.pos)
            if len(ft.params) != len(e.args):
                raise TypeErr(
                    f"expected {len(ft.params)} arguments, got {len(e.args)}", e.pos
                )
            for a, pt in zip(e.args, ft.params):
                self.check_expr(env, a, pt)
            return ft.result
        if isinstance(e, S.If):
            self.check_expr(env, e.cond, BOOL)
            return self.combine(self.infer(env, e.then), self.infer(env, e.els))
        if isinstance(e, S.Fix):
            ft = self.normalize(self.infer(env, e.fn))
            if not (isinstance(ft, TFun) and len(ft.params) == 1):
                raise TypeErr("fix expects a one-argument function", e.pos)
            if not self.compatible(ft.params[0], ft.result):
                raise TypeErr(
                    f"fix argument must map {show_type(ft.params[0])} to itself, "
                    f"got result {show_type(ft.result)}",
                    e.pos,
                )
            return ft.params[0]
        if isinstance(e, S.Raise):
            args = tuple(self.infer(env, a) for a in e.args)
            return TCommand(UNIT, frozenset({EventSignature(e.name, args)}))
        if isinstance(e, S.Do):
            inner = dict(env)
            effects = NO_EFFECTS
            for b in e.bindings:
                self.validate_type(b.type, b.pos)
                bt = self.normalize(self.infer(inner, b.expr))
                if not isinstance(bt, TCommand):
                    raise TypeErr(
                        f"do-binding {b.name!r} needs a command, got {show_type(bt)}",
                        b.pos,
                    )
                if not self.compatible(b.type, bt.result):
                    raise TypeErr(
                        f"binding {b.name!r} declared {show_type(b.type)} but the "
                        f"command yields {show_type(bt.result)}",
                        b.pos,
                    )
                effects |= bt.effects or NO_EFFECTS
                inner[b.name] = b.type
            return TCommand(self.infer(inner, e.result), effects)
        if isinstance(e, S.WidgetExpr):
            return self.infer_widget(env, e)
        if isinstance(e, S.Top):
            return TCommand(TOP, NO_EFFECTS)
        if isinstance(e, S.TypeAbs):
            added = [v for v in e.vars if v not in self.type_vars]
            self.type_vars.update(added)
            try:
                body_t = self.infer(env, e.body)
            finally:
                self.type_vars.difference_update(added)
            return TForall(tuple(e.vars), body_t)
        if isinstance(e, S.TypeInst):
            st = self.normalize(self.infer(env, e.subject))
            if not isinstance(st, TForall):
                raise TypeErr("type instantiation of a non-polymorphic value", e.pos)
            if len(st.vars) != len(e.type_args):
                raise TypeErr(
                    f"expected {len(st.vars)} type arguments, got {len(e.type_args)}",
                    e.pos,
                )
            for a in e.type_args:
                self.validate_type(a, e.pos)
            return substitute(st.body, dict(zip(st.vars, e.type_args)))
        if isinstance(e, S.Let):
            self.validate_type(e.type, e.pos)
            self.check_expr(env, e.bound, e.type)
            inner = dict(env)
            inner[e.name] = e.type
            return self.infer(inner, e.body)
        if isinstance(e, S.BinOp):
            lt = self.normalize(self.infer(env, e.left))
            rt = self.normalize(self.infer(env, e.right))
            if e.op == "=":
                if not (self.compatible(lt, rt) or self.compatible(rt, lt)):
                    raise TypeErr(
                        f"cannot compare {show_type(lt)} with {show_type(rt)}", e.pos
                    )
                return BOOL
            if e.op == "+" and isinstance(lt, TStr) and isinstance(rt, TStr):
                return STR
            if isinstance(lt, TInt) and isinstance(rt, TInt):
                return INT
            raise TypeErr(
                f"operator {e.op!r} undefined on {show_type(lt)} and {show_type(rt)}",
                e.pos,
            )
        raise TypeErr(f"cannot type expression {type(e).__name__}", getattr(e, "pos", None))

    def infer_field(self, env, e: S.FieldRef):
        st = self.normalize(self.infer(env, e.subject))
        ft = self.field_of(st, e.name)
        if ft is not None:
            return ft
        if isinstance(st, TCommand):
            inner = self.field_of(self.normalize(st.result), e.name)
            if isinstance(inner, TCommand):
                return TCommand(
                    inner.result,
                    (st.effects or NO_EFFECTS) | (inner.effects or NO_EFFECTS),
                )
        raise TypeErr(f"no field {e.name!r} on {show_type(st)}", e.pos)

    def field_of(self, st, name):
        if isinstance(st, TRecord):
            for n, ft in st.fields:
                if n == name:
                    return ft
        if isinstance(st, TWidget):
            for n, ft in st.fields:
                if n == name:
                    return ft
        ct = externals.command_type(st, name)
        if ct is not None:
            return ct
        return None

    def infer_widget(self, env, e: S.WidgetExpr):
        self_t = None
        if e.self_type is not None:
            self.validate_type(e.self_type, e.pos)
            self_t = e.self_type
        inner = dict(env)
        if e.self_name:
            if self_t is None:
                if e.self_name in S.free_vars(
                    S.WidgetExpr(None, None, e.parent, e.body)
                ):
                    raise TypeErr(
                        f"widget self name {e.self_name!r} is referenced; "
                        "annotate it with a type",
                        e.pos,
                    )
            else:
                inner[e.self_name] = self_t

        handlers = [d for d in e.body if isinstance(d.type, TFun)]
        components = [d for d in e.body if not isinstance(d.type, TFun)]

        fields = []
        comp_events = NO_EFFECTS
        for d in components:
            self.validate_type(d.type, d.pos)
            dt = self.normalize(self.infer(inner, d.expr))
            if not isinstance(dt, TCommand):
                raise TypeErr(
                    f"widget binding {d.name!r} needs a command, got {show_type(dt)}",
                    d.pos,
                )
            if not self.compatible(d.type, dt.result):
                raise TypeErr(
                    f"binding {d.name!r} declared {show_type(d.type)} but the "
                    f"command yields {show_type(dt.result)}",
                    d.pos,
                )
            inner[d.name] = d.type
            fields.append((d.name, d.type))
            comp_events |= (dt.effects or NO_EFFECTS) | self.events_of(d.type)

        parent_env = dict(env)
        if e.self_name and self_t is not None:
            parent_env[e.self_name] = self_t
        pt = self.normalize(self.infer(parent_env, e.parent))
        if not isinstance(pt, TCommand):
            raise TypeErr(
                f"widget parent must be a command, got {show_type(pt)}", e.pos
            )
        parent_w = pt.result
        parent_events = self.events_of(parent_w) | (pt.effects or NO_EFFECTS)

        # handler names are reachable only through event dispatch; they never
        # enter the expression environment, so outer bindings with the same
        # name stay visible inside handler bodies
        for h in handlers:
            self.validate_type(h.type, h.pos)
        handled = []
        handler_events = NO_EFFECTS
        for h in handlers:
            ht = self.normalize(self.infer(inner, h.expr))
            # desugared handlers are do { return fun ... }: a pure command
            # yielding the handler function
            if not (isinstance(ht, TCommand) and not ht.effects):
                raise TypeErr(f"handler {h.name!r} must be a pure binding", h.pos)
            fn_t = self.normalize(ht.result)
            if not isinstance(fn_t, TFun):
                raise TypeErr(f"handler {h.name!r} must be a function", h.pos)
            ret = self.normalize(fn_t.result)
            if not isinstance(ret, TCommand):
                raise TypeErr(
                    f"handler {h.name!r} body must be a command, got "
                    f"{show_type(fn_t.result)}",
                    h.pos,
                )
            handled.append(EventSignature(h.name, fn_t.params))
            handler_events |= ret.effects or NO_EFFECTS
            fields.append((h.name, fn_t))

        raised = parent_events | comp_events | handler_events
        surviving = frozenset(
            s
            for s in raised
            if not any(
                s.name == z.name and len(s.arg_types) == len(z.arg_types)
                for z in handled
            )
        )
        wt = TWidget(parent_w, surviving, tuple(fields))
        if self_t is not None:
            if not self.compatible(self_t, wt):
                declared = self.normalize(self_t)
                if isinstance(declared, TWidget):
                    extra = surviving - (declared.effects or NO_EFFECTS)
                    if extra:
                        raise TypeErr(
                            "widget raises unhandled events not in its declared "
                            f"type: {show_effects(extra)}",
                            e.pos,
                        )
                raise TypeErr(
                    f"widget does not match its declared type {show_type(self_t)}; "
                    f"inferred {show_type(wt)}",
                    e.pos,
                )
            return TCommand(self_t, NO_EFFECTS)
        return TCommand(wt, NO_EFFECTS)

    def check_expr(self, env, e, expected):
        self.validate_type(expected, getattr(e, "pos", None))
        actual = self.infer(env, e)
        if not self.compatible(expected, actual):
            raise TypeErr(
                f"expected {show_type(expected)}, got {show_type(actual)}",
                getattr(e, "pos", None),
            )
        return self.refine(expected, actual)

    @staticmethod
    def refine(expected, actual):
        """Fill unannotated effect sets of `expected` from the inferred type."""
        if (
            isinstance(expected, TCommand)
            and isinstance(actual, TCommand)
            and expected.effects is None
        ):
            return TCommand(expected.result, actual.effects)
        return expected


def t_result(orig, norm):
    return norm.result


def check_program(prog: S.Program):
    """Type-check a desugared program; returns (checker, name -> type)."""
    type_defs = {}
    for d in prog.defs:
        if isinstance(d, S.TypeDef):
            if d.name in type_defs:
                raise TypeErr(f"duplicate type definition {d.name!r}", d.pos)
            type_defs[d.name] = d.type
    checker = Checker(type_defs)
    for d in prog.defs:
        if isinstance(d, S.TypeDef):
            checker.validate_type(d.type, d.pos)
    env = builtin_env()
    inferred = {}
    seen = set()
    for d in prog.defs:
        if isinstance(d, S.TypeDef):
            continue
        if d.name in seen:
            raise TypeErr(f"duplicate definition {d.name!r}", d.pos)
        seen.add(d.name)
        if d.type is not None:
            t = checker.check_expr(env, d.expr, d.type)
        else:
            t = checker.infer(env, d.expr)
        env[d.name] = t
        inferred[d.name] = t
    return checker, inferred


def check_runnable(prog: S.Program, checker=None, inferred=None) -> list:
    """Diagnostics list; empty iff the entry denotes a runnable command."""
    if checker is None:
        checker, inferred = check_program(prog)
    entry = prog.entry
    if entry is None or entry not in inferred:
        return ["no entry definition to run"]
    t = checker.normalize(inferred[entry])
    if isinstance(t, TFun) and not t.params:
        t = checker.normalize(t.result)
    if not isinstance(t, TCommand):
        return [f"entry {entry!r} is not a command yielding a widget: {show_type(t)}"]
    diags = []
    for s in sorted(t.effects or NO_EFFECTS, key=str):
        diags.append(f"unhandled event {s} escaping to entry {entry!r}")
    w = checker.normalize(t.result)
    if not (
        isinstance(w, TWidget)
        or externals.spec_for_type(w) is not None
        or isinstance(w, TTop)
    ):
        diags.append(
            f"entry {entry!r} does not yield a widget: {show_type(t.result)}"
        )
        return diags
    for s in sorted(checker.events_of(t.result), key=str):
        diags.append(f"unhandled event {s} escaping to entry {entry!r}")
    return diags
