"""Recursive-descent parser for Widget programs and types.

Precedence, tightest first: postfix suffixes (application, field reference,
type instantiation), then `+`/`-`, then `=` equality.
"""

from __future__ import annotations

from .errors import SyntaxErr
from .lexer import Token, tokenize
from .syntax import (
    App, BinOp, Const, Do, DoBinding, EmptyList, FieldRef, Fix, Fn, FunDef,
    HandlerDef, If, Let, Letrec, ListLit, Program, Raise, RecordLit, Top,
    TypeAbs, TypeDef, TypeInst, ValBind, ValDef, Var, WidgetExpr,
)
from . import types as T


class _EmptyListMarker:
    def __init__(self, pos):
        self.pos = pos


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    # ---------- token helpers ----------

    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def accept_punct(self, v) -> bool:
        if self.peek().is_punct(v):
            self.next()
            return True
        return False

    def accept_kw(self, v) -> bool:
        if self.peek().is_kw(v):
            self.next()
            return True
        return False

    def expect_punct(self, v) -> Token:
        t = self.peek()
        if not t.is_punct(v):
            raise SyntaxErr(f"expected {v!r}, found {self._show(t)}", t.pos)
        return self.next()

    def expect_kw(self, v) -> Token:
        t = self.peek()
        if not t.is_kw(v):
            raise SyntaxErr(f"expected {v!r}, found {self._show(t)}", t.pos)
        return self.next()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise SyntaxErr(f"expected identifier, found {self._show(t)}", t.pos)
        return self.next()

    def expect_field_name(self) -> Token:
        """Field names are contextual: keywords like `val` are fine here."""
        t = self.peek()
        if t.kind not in ("ident", "keyword"):
            raise SyntaxErr(f"expected field name, found {self._show(t)}", t.pos)
        return self.next()

    @staticmethod
    def _show(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.value)

    def at_ident(self, v) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.value == v

    # ---------- program ----------

    def parse_program(self) -> Program:
        defs = []
        entry = None
        while self.peek().kind != "eof":
            t = self.peek()
            if t.is_kw("type") or t.is_kw("val") or t.is_kw("fun") or (
                t.is_kw("rec") and self.peek(1).is_kw("fun")
            ):
                defs.append(self.parse_topdef())
                self.accept_punct(";")
            else:
                expr = self.parse_expr()
                defs.append(ValDef("main", None, expr, pos=t.pos))
                entry = "main"
                self.accept_punct(";")
                if self.peek().kind != "eof":
                    raise SyntaxErr("entry expression must be last", self.peek().pos)
        if entry is None and any(getattr(d, "name", None) == "main" for d in defs):
            entry = "main"
        return Program(defs, entry)

    def parse_topdef(self):
        t = self.peek()
        if self.accept_kw("type"):
            name = self.expect_ident().value
            self.expect_punct("=")
            return TypeDef(name, self.parse_type(), pos=t.pos)
        if self.accept_kw("val"):
            name = self.expect_ident().value
            ty = None
            if self.accept_punct(":"):
                ty = self.parse_type()
            self.expect_punct("=")
            return ValDef(name, ty, self.parse_expr(), pos=t.pos)
        rec = self.accept_kw("rec")
        self.expect_kw("fun")
        name = self.expect_ident().value
        self.expect_punct("(")
        params = self.parse_params()
        self.expect_punct(":")
        ret = self.parse_type()
        self.expect_punct("=")
        return FunDef(name, params, ret, self.parse_expr(), rec=rec, pos=t.pos)

    def parse_params(self):
        """Parse `x:t, ...` up to and including the closing paren."""
        params = []
        if not self.accept_punct(")"):
            while True:
                name = self.expect_ident()
                self.expect_punct(":")
                ty = self.parse_type()
                if any(name.value == n for n, _ in params):
                    raise SyntaxErr(f"duplicate parameter {name.value!r}", name.pos)
                params.append((name.value, ty))
                if self.accept_punct(")"):
                    break
                self.expect_punct(",")
        return params

    # ---------- expressions ----------

    def parse_expr(self):
        left = self.parse_add()
        t = self.peek()
        if self.accept_punct("="):
            return BinOp("=", left, self.parse_add(), pos=t.pos)
        return left

    def parse_add(self):
        left = self.parse_unary()
        while True:
            t = self.peek()
            if t.is_punct("+") or t.is_punct("-"):
                self.next()
                left = BinOp(t.value, left, self.parse_unary(), pos=t.pos)
            else:
                return left

    def parse_unary(self):
        t = self.peek()
        if t.is_punct("-") and self.peek(1).kind == "int":
            self.next()
            lit = self.next()
            return Const(-lit.value, pos=t.pos)
        return self.parse_postfix()

    def parse_postfix(self):
        e = self.parse_primary()
        while True:
            t = self.peek()
            if t.is_punct("("):
                self.next()
                args = []
                if not self.accept_punct(")"):
                    while True:
                        args.append(self.parse_expr())
                        if self.accept_punct(")"):
                            break
                        self.expect_punct(",")
                e = App(self._resolve(e), args, pos=t.pos)
            elif t.is_punct(".") and self.peek(1).kind in ("ident", "keyword"):
                self.next()
                name = self.next().value
                e = FieldRef(self._resolve(e), name, pos=t.pos)
            elif t.is_punct("["):
                self.next()
                tys = [self.parse_type()]
                while self.accept_punct(","):
                    tys.append(self.parse_type())
                self.expect_punct("]")
                if isinstance(e, _EmptyListMarker):
                    if len(tys) != 1:
                        raise SyntaxErr("empty list takes one element type", t.pos)
                    e = EmptyList(tys[0], pos=e.pos)
                else:
                    e = TypeInst(e, tys, pos=t.pos)
            else:
                return self._resolve(e)

    def _resolve(self, e):
        if isinstance(e, _EmptyListMarker):
            raise SyntaxErr("empty list literal requires an element type: [][t]", e.pos)
        return e

    def parse_primary(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return Const(t.value, pos=t.pos)
        if t.kind == "str":
            self.next()
            return Const(t.value, pos=t.pos)
        if self.accept_kw("true"):
            return Const(True, pos=t.pos)
        if self.accept_kw("false"):
            return Const(False, pos=t.pos)
        if t.kind == "ident":
            self.next()
            return Var(t.value, pos=t.pos)
        if self.accept_kw("top"):
            return Top(pos=t.pos)
        if self.accept_punct("("):
            e = self.parse_expr()
            self.expect_punct(")")
            return e
        if self.accept_punct("["):
            if self.accept_punct("]"):
                return _EmptyListMarker(t.pos)
            items = [self.parse_expr()]
            while self.accept_punct(","):
                items.append(self.parse_expr())
            self.expect_punct("]")
            return ListLit(items, pos=t.pos)
        if self.accept_punct("{"):
            fields = []
            if not self.accept_punct("}"):
                while True:
                    name = self.expect_field_name().value
                    self.expect_punct("=")
                    fields.append((name, self.parse_expr()))
                    if self.accept_punct("}"):
                        break
                    self.expect_punct(";")
            return RecordLit(fields, pos=t.pos)
        if self.accept_kw("fun"):
            self.expect_punct("(")
            params = self.parse_params()
            self.expect_punct(":")
            ret = self.parse_type()
            return Fn(params, ret, self.parse_expr(), pos=t.pos)
        if self.accept_kw("if"):
            cond = self.parse_expr()
            self.expect_kw("then")
            then = self.parse_expr()
            self.expect_kw("else")
            return If(cond, then, self.parse_expr(), pos=t.pos)
        if self.accept_kw("fix"):
            self.expect_punct("(")
            e = self.parse_expr()
            self.expect_punct(")")
            return Fix(e, pos=t.pos)
        if self.accept_kw("raise"):
            name = self.expect_ident().value
            self.expect_punct("(")
            args = []
            if not self.accept_punct(")"):
                while True:
                    args.append(self.parse_expr())
                    if self.accept_punct(")"):
                        break
                    self.expect_punct(",")
            return Raise(name, args, pos=t.pos)
        if self.accept_kw("do"):
            return self.parse_do(t.pos)
        if self.accept_kw("widget"):
            return self.parse_widget(t.pos)
        if self.accept_kw("Fun"):
            self.expect_punct("[")
            vars_ = [self.expect_ident().value]
            while self.accept_punct(","):
                vars_.append(self.expect_ident().value)
            self.expect_punct("]")
            return TypeAbs(vars_, self.parse_expr(), pos=t.pos)
        if self.accept_kw("letrec"):
            bindings = []
            while True:
                name = self.expect_ident().value
                self.expect_punct(":")
                ty = self.parse_type()
                self.expect_punct("=")
                bindings.append((name, ty, self.parse_expr()))
                self.accept_punct(";")
                if self.accept_kw("in"):
                    break
            return Letrec(bindings, self.parse_expr(), pos=t.pos)
        if self.accept_kw("let"):
            name = self.expect_ident().value
            self.expect_punct(":")
            ty = self.parse_type()
            self.expect_punct("=")
            bound = self.parse_expr()
            self.expect_kw("in")
            return Let(name, ty, bound, self.parse_expr(), pos=t.pos)
        raise SyntaxErr(f"unexpected {self._show(t)} in expression", t.pos)

    def parse_do(self, pos):
        self.expect_punct("{")
        bindings = []
        while not self.peek().is_kw("return"):
            bt = self.peek()
            name = self.expect_ident().value
            self.expect_punct(":")
            ty = self.parse_type()
            if self.accept_punct("<-"):
                arrow = True
            else:
                self.expect_punct("=")
                arrow = False
            bindings.append(DoBinding(name, ty, self.parse_expr(), arrow, pos=bt.pos))
            self.accept_punct(";")
        self.expect_kw("return")
        result = self.parse_expr()
        self.expect_punct("}")
        return Do(bindings, result, pos=pos)

    def parse_widget(self, pos):
        self_name = None
        self_type = None
        if not self.peek().is_punct("("):
            self_name = self.expect_ident().value
            if self.accept_punct(":"):
                self_type = self.parse_type()
        self.expect_punct("(")
        parent = self.parse_expr()
        self.expect_punct(")")
        self.expect_punct("{")
        body = []
        seen = set()
        while not self.accept_punct("}"):
            bt = self.peek()
            name = self.expect_ident().value
            if name in seen:
                raise SyntaxErr(f"duplicate widget body definition {name!r}", bt.pos)
            seen.add(name)
            if self.accept_punct("("):
                params = self.parse_params()
                self.expect_punct(":")
                ret = self.parse_type()
                self.expect_punct("=")
                body.append(HandlerDef(name, params, ret, self.parse_expr(), pos=bt.pos))
            else:
                self.expect_punct(":")
                ty = self.parse_type()
                if self.accept_punct("<-"):
                    arrow = True
                else:
                    self.expect_punct("=")
                    arrow = False
                body.append(ValBind(name, ty, self.parse_expr(), arrow, pos=bt.pos))
            self.accept_punct(";")
        return WidgetExpr(self_name, self_type, parent, body, pos=pos)

    # ---------- types ----------

    def parse_type(self):
        members = [self.parse_type_postfix()]
        while self.accept_punct("+"):
            members.append(self.parse_type_postfix())
        if len(members) == 1:
            return members[0]
        return T.TUnion(tuple(members))

    def parse_type_postfix(self):
        ty = self.parse_type_primary()
        while True:
            t = self.peek()
            if t.is_punct("["):
                if not isinstance(ty, T.TName):
                    raise SyntaxErr("type arguments require a named type operator", t.pos)
                self.next()
                args = [self.parse_type()]
                while self.accept_punct(","):
                    args.append(self.parse_type())
                self.expect_punct("]")
                ty = T.TApp(ty.name, tuple(args))
            elif t.is_punct(".") and self.peek(1).kind in ("ident", "keyword"):
                self.next()
                ty = T.TTypeRef(ty, self.next().value)
            else:
                return ty

    def parse_raises(self):
        """Parse an optional `raises x(t,...),...` clause; None when absent."""
        if not self.at_ident("raises"):
            return None
        self.next()
        sigs = [self.parse_event_sig()]
        while (
            self.peek().is_punct(",")
            and self.peek(1).kind == "ident"
            and self.peek(2).is_punct("(")
        ):
            self.next()
            sigs.append(self.parse_event_sig())
        return frozenset(sigs)

    def parse_event_sig(self):
        name = self.expect_ident().value
        self.expect_punct("(")
        args = []
        if not self.accept_punct(")"):
            while True:
                args.append(self.parse_type())
                if self.accept_punct(")"):
                    break
                self.expect_punct(",")
        return T.EventSignature(name, tuple(args))

    def parse_type_primary(self):
        t = self.peek()
        if t.kind == "ident":
            word = t.value
            if word == "str":
                self.next()
                return T.STR
            if word == "int":
                self.next()
                return T.INT
            if word == "bool":
                self.next()
                return T.BOOL
            if word == "Top":
                self.next()
                return T.TOP
            if word == "Widget":
                self.next()
                self.expect_punct("(")
                parent = self.parse_type()
                self.expect_punct(")")
                effects = self.parse_raises()
                if effects is None:
                    effects = T.NO_EFFECTS
                fields = ()
                if self.peek().is_punct("{") and not self.peek(1).is_punct("{"):
                    fields = self.parse_field_list(":")
                return T.TWidget(parent, effects, fields)
            if word == "Forall":
                self.next()
                self.expect_punct("(")
                vars_ = [self.expect_ident().value]
                while self.accept_punct(","):
                    vars_.append(self.expect_ident().value)
                self.expect_punct(")")
                return T.TForall(tuple(vars_), self.parse_type())
            self.next()
            return T.TName(word)
        if t.is_punct("*"):
            self.next()
            return T.UNIT
        if t.is_punct("!"):
            self.next()
            return T.TLoc(self.parse_type_primary())
        if t.is_punct("["):
            self.next()
            inner = self.parse_type()
            self.expect_punct("]")
            return T.TList(inner)
        if t.is_punct("<"):
            self.next()
            inner = self.parse_type()
            self.expect_punct(">")
            return T.TCommand(inner, self.parse_raises())
        if t.is_punct("{") and self.peek(1).is_punct("{"):
            self.next()
            self.next()
            fields = []
            while True:
                name = self.expect_field_name().value
                self.expect_punct("=")
                fields.append((name, self.parse_type()))
                if self.peek().is_punct("}") and self.peek(1).is_punct("}"):
                    self.next()
                    self.next()
                    break
                self.expect_punct(";")
            return T.TTypeRecord(tuple(fields))
        if t.is_punct("{"):
            return T.TRecord(self.parse_field_list(":"))
        if t.is_kw("rec"):
            self.next()
            var = self.expect_ident().value
            self.expect_punct(".")
            return T.TRec(var, self.parse_type())
        if t.is_punct("("):
            self.next()
            if self.accept_punct(")"):
                self.expect_punct("->")
                return T.TFun((), self.parse_type())
            first = self.parse_type()
            if self.accept_punct(")"):
                if self.accept_punct("->"):
                    return T.TFun((first,), self.parse_type())
                return first
            params = [first]
            while self.accept_punct(","):
                params.append(self.parse_type())
            self.expect_punct(")")
            self.expect_punct("->")
            return T.TFun(tuple(params), self.parse_type())
        raise SyntaxErr(f"unexpected {self._show(t)} in type", t.pos)

    def parse_field_list(self, sep):
        self.expect_punct("{")
        fields = []
        if not self.accept_punct("}"):
            while True:
                name = self.expect_field_name().value
                self.expect_punct(sep)
                fields.append((name, self.parse_type()))
                if self.accept_punct("}"):
                    break
                self.expect_punct(";")
        return tuple(fields)


def parse_program(source: str) -> Program:
    return Parser(source).parse_program()


def parse_expr(source: str):
    p = Parser(source)
    e = p.parse_expr()
    t = p.peek()
    if t.kind != "eof":
        raise SyntaxErr(f"trailing input after expression: {Parser._show(t)}", t.pos)
    return e


def parse_type(source: str):
    p = Parser(source)
    ty = p.parse_type()
    t = p.peek()
    if t.kind != "eof":
        raise SyntaxErr(f"trailing input after type: {Parser._show(t)}", t.pos)
    return ty
