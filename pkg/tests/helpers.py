"""Shared fixtures: sample loading, program running, and random program
generation for the property suites."""

import json
import pathlib

from widget_calculus import check
from widget_calculus.desugar import desugar_expr, desugar_program
from widget_calculus.harness import run_script
from widget_calculus.parser import parse_expr, parse_program, parse_type

SAMPLES = pathlib.Path(__file__).resolve().parents[1] / "samples"


def sample_source(name: str) -> str:
    return (SAMPLES / name).read_text(encoding="utf-8")


def sample_script(name: str):
    return json.loads((SAMPLES / name).read_text(encoding="utf-8"))


def load(src: str):
    return desugar_program(parse_program(src))


def load_sample(name: str):
    return load(sample_source(name))


def checked(src: str):
    prog = load(src)
    check.check_program(prog)
    return prog


def run(prog, script, workdir, range_=10):
    trace = run_script(prog, script, workdir=str(workdir), range_=range_)
    return [d.to_json() if d is not None else None for d in trace]


def infer_expr(src: str, type_defs=None):
    checker = check.Checker(type_defs or {})
    expr = desugar_expr(parse_expr(src))
    return checker, checker.infer(check.builtin_env(), expr)


# ---------- random program generation ----------


def toggle_source(rng, n_buttons=None, parent=None) -> tuple:
    """A runnable program cycling through n button states, with a random
    screen or window container.  Returns (source, n_buttons)."""
    n = n_buttons or rng.randint(1, 3)
    parent = parent or rng.choice(["screen", "window"])
    if parent == "screen":
        geo = ", ".join(str(rng.randint(0, 99)) for _ in range(4))
        parent_ctor = f"screen[PushB]({geo}, w0)"
        parent_ty = "Screen[PushB]"
    else:
        parent_ctor = f"window[PushB]('t{rng.randint(0, 99)}', w0)"
        parent_ty = "Window[PushB]"
    lines = [
        "type PushB = Widget(Button) { push:(int)-><PushB> }",
        f"type Main = Widget({parent_ty}) {{ move:(int,int)-><Main> }}",
        "letrec",
        f"  main:<Main> = widget self:Main ({parent_ctor}) {{",
        "    move(x:int, y:int):<Main> = do { return self }",
        "  }",
    ]
    for i in range(n):
        nxt = (i + 1) % n
        label = f"s{i}x{rng.randint(0, 999)}"
        lines.append(
            f"  w{i}:<PushB> = widget (button('{label}')) {{\n"
            f"    push(k:int):<PushB> = do {{ p:PushB <- w{nxt} return p }}\n"
            "  }"
        )
    lines.append("in main")
    return "\n".join(lines), n


def random_script(rng, n_events: int) -> list:
    """Random mix of button pushes and context moves for a toggle program."""
    out = []
    for _ in range(n_events):
        if rng.random() < 0.7:
            out.append({"type": "ui-event", "select": "button", "name": "push"})
        else:
            out.append(
                {
                    "type": "context-event",
                    "name": "move",
                    "args": [rng.randint(-50, 50), rng.randint(-50, 50)],
                }
            )
    return out
