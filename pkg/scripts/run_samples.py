#!/usr/bin/env python3
"""Run the shipped sample programs headless and print their display traces.

Usage: python scripts/run_samples.py [sample ...]
With no arguments, runs example1, example2, and buddy.
"""

import json
import pathlib
import sys
import tempfile

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from widget_calculus import check
from widget_calculus.cli import load_program
from widget_calculus.harness import run_script

SAMPLES = pathlib.Path(__file__).resolve().parents[1] / "samples"


def run_one(name: str):
    prog = load_program(str(SAMPLES / f"{name}.wdg"))
    checker, inferred = check.check_program(prog)
    diags = check.check_runnable(prog, checker, inferred)
    if diags:
        for d in diags:
            print(f"{name}: {d}", file=sys.stderr)
        return 1
    script_path = SAMPLES / f"{name}-script.json"
    script = json.loads(script_path.read_text()) if script_path.exists() else []
    with tempfile.TemporaryDirectory() as workdir:
        trace = run_script(prog, script, workdir=workdir)
    print(f"== {name}: {len(trace)} frames ==")
    for frame in trace:
        print(json.dumps(frame.to_json() if frame else None))
    return 0


def main():
    names = sys.argv[1:] or ["example1", "example2", "buddy"]
    return max(run_one(n) for n in names)


if __name__ == "__main__":
    sys.exit(main())
