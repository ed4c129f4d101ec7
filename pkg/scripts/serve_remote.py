#!/usr/bin/env python3
"""Serve a sample over the remote renderer protocol.

Usage: python scripts/serve_remote.py [sample] [port]
Defaults to example2 on an ephemeral port.  Connect with the frontend
renderer (frontend/, `?host=127.0.0.1&port=NNNN`) or any client speaking
the newline-delimited JSON protocol, then click away.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from widget_calculus.cli import load_program
from widget_calculus.harness import serve_renderer

SAMPLES = pathlib.Path(__file__).resolve().parents[1] / "samples"


def main():
    name = sys.argv[1] if len(sys.argv) > 1 else "example2"
    port = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    prog = load_program(str(SAMPLES / f"{name}.wdg"))
    serve_renderer(
        prog, port, ready_cb=lambda p: print(f"listening on {p}", flush=True)
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
