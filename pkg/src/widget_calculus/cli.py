"""Command line entry point: check, run, gen."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import WidgetError
from . import check as C
from .desugar import desugar_program
from .parser import parse_program


def load_program(path):
    with open(path, encoding="utf-8") as f:
        source = f.read()
    return desugar_program(parse_program(source))


def cmd_check(args) -> int:
    try:
        prog = load_program(args.input)
        checker, inferred = C.check_program(prog)
        diags = C.check_runnable(prog, checker, inferred)
    except WidgetError as err:
        print(err.render(args.input), file=sys.stderr)
        return 1
    for d in diags:
        print(f"{args.input}: {d}", file=sys.stderr)
    return 1 if diags else 0


def cmd_run(args) -> int:
    from . import harness

    try:
        prog = load_program(args.input)
        checker, inferred = C.check_program(prog)
        diags = C.check_runnable(prog, checker, inferred)
        if diags:
            for d in diags:
                print(f"{args.input}: {d}", file=sys.stderr)
            return 1
        script = []
        if args.script:
            with open(args.script, encoding="utf-8") as f:
                script = json.load(f)
        if args.backend == "headless":
            trace = harness.run_script(
                prog, script, workdir=args.workdir, range_=args.range
            )
            frames = [d.to_json() if d else None for d in trace]
            if args.trace:
                with open(args.trace, "w", encoding="utf-8") as f:
                    json.dump(frames, f, indent=2)
            else:
                for frame in frames:
                    print(json.dumps(frame))
        else:
            harness.serve_renderer(
                prog,
                args.port,
                script=script,
                workdir=args.workdir,
                range_=args.range,
                ready_cb=lambda p: print(f"listening on {p}", flush=True),
            )
    except WidgetError as err:
        print(err.render(args.input), file=sys.stderr)
        return 1
    return 0


def cmd_gen(args) -> int:
    from . import modelgen

    try:
        with open(args.input, encoding="utf-8") as f:
            model = modelgen.load_model(json.load(f))
        source = modelgen.generate(model).render()
    except (WidgetError, modelgen.ModelError) as err:
        print(f"{args.input}: {err}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(source)
    else:
        sys.stdout.write(source)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="widget", description=__doc__)
    p.add_argument("--version", action="version", version="widget-calculus 0.1.0")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="type-check a program and its runnability")
    c.add_argument("input")
    c.set_defaults(fn=cmd_check)

    r = sub.add_parser("run", help="run a program against a backend")
    r.add_argument("input")
    r.add_argument("--backend", choices=["headless", "remote"], default="headless")
    r.add_argument("--script", default=None, help="JSON event script")
    r.add_argument("--port", type=int, default=0)
    r.add_argument("--range", type=int, default=10, help="provider notify range")
    r.add_argument("--workdir", default=".", help="base directory for db files")
    r.add_argument("--trace", default=None, help="write the display trace here")
    r.set_defaults(fn=cmd_run)

    g = sub.add_parser("gen", help="generate Widget code from a model")
    g.add_argument("input")
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(fn=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OSError as err:
        print(f"widget: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
