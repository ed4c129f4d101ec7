"""Parser and pretty-printer: round-trips, precedence, and error reporting."""

import pytest

from widget_calculus.errors import SyntaxErr
from widget_calculus.parser import parse_expr, parse_program, parse_type
from widget_calculus.pretty import show_expr, show_program
from widget_calculus import types as T

from helpers import sample_source

EXPR_FORMS = [
    "x",
    "42",
    "-7",
    "'hello'",
    "true",
    "[1, 2, 3]",
    "[][int]",
    "{ a = 1; b = 'x' }",
    "r.field",
    "fun(x:int):int x + 1",
    "f(1, 'a')",
    "if a = b then 1 else 2",
    "fix(fun(f:(int)->int):(int)->int f)",
    "raise push(3)",
    "do { x:int <- get[int](l) return x + 1 }",
    "widget (button('hi')) { push(i:int):<*> = raise go() }",
    "top",
    "Fun[t] fun(x:t):t x",
    "head[int]([1])",
    "let x:int = 1 in x + x",
    "letrec f:(int)->int = fun(n:int):int f(n) in f",
    "1 + 2 - 3",
]

TYPE_FORMS = [
    "str",
    "int",
    "bool",
    "*",
    "Top",
    "[int]",
    "!str",
    "<int>",
    "<* > raises push(int)",
    "<*> raises a(), b(int,str)",
    "{ x:int; y:str }",
    "{{ T = int }}",
    "(int, str) -> bool",
    "() -> <*>",
    "int + str",
    "rec x.[x]",
    "Forall(t)(t)-><t>",
    "Widget(Button) { push:(int)-><*> }",
    "Widget(Screen[PushB]) raises move(int,int) { f:()-><*> }",
    "DB[str,str]",
    "M.T",
]


@pytest.mark.parametrize("src", EXPR_FORMS)
def test_expr_round_trip(src):
    ast = parse_expr(src)
    assert parse_expr(show_expr(ast)) == ast


@pytest.mark.parametrize("src", TYPE_FORMS)
def test_type_round_trip(src):
    ty = parse_type(src)
    assert parse_type(T.show_type(ty)) == ty


@pytest.mark.parametrize(
    "name", ["example1.wdg", "example2.wdg", "buddy.wdg", "buddy-gen.wdg"]
)
def test_sample_round_trip(name):
    prog = parse_program(sample_source(name))
    again = parse_program(show_program(prog))
    assert again == prog


def test_precedence_application_binds_tighter_than_add():
    assert parse_expr("f(1) + g(2)") == parse_expr("(f(1)) + (g(2))")


def test_equality_is_loosest():
    e = parse_expr("a + b = c + d")
    assert type(e).__name__ == "BinOp" and e.op == "="


def test_field_access_on_call_result():
    e = parse_expr("f(1).x")
    assert type(e).__name__ == "FieldRef"


def test_keyword_field_names_are_contextual():
    parse_type("{ key:str; val:str }")
    parse_expr("{ val = 'x' }")
    e = parse_expr("contact.val")
    assert e.name == "val"


def test_negative_int_literal():
    assert parse_expr("-3").value == -3


def test_empty_list_requires_element_type():
    with pytest.raises(SyntaxErr):
        parse_expr("[] + [1]")


def test_duplicate_parameter_rejected():
    with pytest.raises(SyntaxErr):
        parse_expr("fun(x:int, x:str):int 1")


def test_duplicate_widget_body_name_rejected():
    with pytest.raises(SyntaxErr):
        parse_expr("widget (button('a')) { b:Label <- label('x'); b:Label <- label('y') }")


def test_entry_expression_must_be_last():
    with pytest.raises(SyntaxErr):
        parse_program("1 + 1; val x:int = 2")


def test_error_positions_point_at_the_problem():
    try:
        parse_program("val x:int =\n  @")
    except SyntaxErr as err:
        assert err.pos.line == 2
    else:
        raise AssertionError("expected a syntax error")


def test_trailing_input_rejected():
    with pytest.raises(SyntaxErr):
        parse_expr("1 1")
    with pytest.raises(SyntaxErr):
        parse_type("int int")


def test_comments_and_string_escapes():
    e = parse_expr("'a\\nb' // trailing comment ignored by the lexer\n + 'c'")
    assert type(e).__name__ == "BinOp"


def test_type_annotation_effects_default():
    cmd = parse_type("<int>")
    assert cmd.effects is None
    widget = parse_type("Widget(Button) {}")
    assert widget.effects == frozenset()
