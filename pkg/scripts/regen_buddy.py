#!/usr/bin/env python3
"""Regenerate samples/buddy-gen.wdg from samples/buddy-model.json.

The generated file is the golden fixture for the model-to-code tests;
rerun this after changing the generator or the model, then review the diff.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from widget_calculus import modelgen

SAMPLES = pathlib.Path(__file__).resolve().parents[1] / "samples"


def main():
    model = modelgen.load_model(json.loads((SAMPLES / "buddy-model.json").read_text()))
    out = modelgen.generate(model)
    (SAMPLES / "buddy-gen.wdg").write_text(out.render())
    print(f"wrote {SAMPLES / 'buddy-gen.wdg'} ({len(out.todos)} TODO holes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
