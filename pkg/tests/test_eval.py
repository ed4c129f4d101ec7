"""Pure reduction: arithmetic, closures, recursion, and value equality."""

import pytest
from hypothesis import given, strategies as st

from widget_calculus import evaluate as E
from widget_calculus.desugar import desugar_expr
from widget_calculus.errors import RuntimeErr
from widget_calculus.parser import parse_expr, parse_program
from widget_calculus.desugar import desugar_program


def ev(src, env=None):
    base = E.builtin_env()
    base.update(env or {})
    return E.reduce_expr(base, desugar_expr(parse_expr(src)))


def test_arithmetic_and_strings():
    assert ev("1 + 2 - 3") == 0
    assert ev("'a' + 'b'") == "ab"
    assert ev("-5 + 5") == 0


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=8))
def test_additive_chains_match_python(xs):
    src = str(xs[0]) if xs[0] >= 0 else f"0 - {-xs[0]}"
    total = xs[0]
    for x in xs[1:]:
        op = "+" if x >= 0 else "-"
        src += f" {op} {abs(x)}"
        total = total + x
    assert ev(src) == total


def test_equality_is_structural_for_data():
    assert ev("[1, 2] = [1, 2]") is True
    assert ev("[1] = [1, 2]") is False
    assert ev("{ a = 1 } = { a = 1 }") is True
    assert ev("'x' = 'y'") is False


def test_bools_and_ints_are_distinct():
    assert ev("true = true") is True
    assert E.value_eq(True, 1) is False


def test_if_selects_branch():
    assert ev("if 1 = 1 then 'y' else 'n'") == "y"
    assert ev("if 1 = 2 then 'y' else 'n'") == "n"


def test_closures_capture_their_environment():
    assert ev("(fun(x:int):(int)->int fun(y:int):int x + y)(10)(5)") == 15


def test_shadowing():
    assert ev("let x:int = 1 in (fun(x:int):int x)(9)") == 9


def test_let_and_letrec():
    assert ev("let x:int = 3 in x + x") == 6
    assert ev(
        "letrec total:(int)->int = fun(n:int):int "
        "if n = 0 then 0 else n + total(n - 1) in total(10)"
    ) == 55


def test_mutual_letrec():
    src = """
    letrec
      even:(int)->bool = fun(n:int):bool if n = 0 then true else odd(n - 1)
      odd:(int)->bool = fun(n:int):bool if n = 0 then false else even(n - 1)
    in even(10)
    """
    assert ev(src) is True


def test_fix_computes_fixpoints():
    src = """
    fix(fun(total:(int)->int):(int)->int
      fun(n:int):int if n = 0 then 0 else n + total(n - 1))(4)
    """
    assert ev(src) == 10


def test_fix_value_is_cached():
    v = ev("fix(fun(x:{a:int}):{a:int} { a = 1 })")
    assert isinstance(v, E.FixValue)
    assert v.force() is v.force()
    assert v.force() == {"a": 1}


def test_ill_founded_fix_detected():
    with pytest.raises(RuntimeErr):
        ev("fix(fun(r:{a:int}):{a:int} { a = r.a })").force()


def test_head_and_tail():
    assert ev("head[int]([7, 8])") == 7
    assert ev("tail[int]([7, 8])") == [8]
    assert ev("tail[int]([7])") == []
    with pytest.raises(RuntimeErr):
        ev("head[int]([][int])")


def test_record_field_access():
    assert ev("{ a = 1; b = 'x' }.b") == "x"


def test_type_abstraction_erases():
    assert ev("(Fun[t] fun(x:t):t x)[int](3)") == 3


def test_do_and_widget_are_values():
    assert isinstance(ev("do { return 1 }"), E.DoValue)
    assert isinstance(ev("widget (button('x')) { }"), E.WidgetValue)
    assert isinstance(ev("raise go(1)"), E.RaiseValue)
    assert ev("top") is E.TOP_VALUE


def test_do_captures_but_does_not_run():
    # reducing a do-expression must not evaluate its bindings
    v = ev("do { x:int <- nonsense return x }", env={"nonsense": E.TOP_VALUE})
    assert isinstance(v, E.DoValue)


def test_top_level_dependency_order_is_flexible():
    prog = desugar_program(
        parse_program(
            """
            fun double(n:int):int = twice(n)
            fun twice(n:int):int = n + n
            val main:int = double(21)
            """
        )
    )
    env = E.global_env(prog)
    assert env["main"] == 42


def test_mutually_recursive_top_level_functions():
    prog = desugar_program(
        parse_program(
            """
            rec fun ping(n:int):str = if n = 0 then 'ping' else pong(n - 1)
            rec fun pong(n:int):str = if n = 0 then 'pong' else ping(n - 1)
            val main:str = ping(5)
            """
        )
    )
    assert E.global_env(prog)["main"] == "pong"
