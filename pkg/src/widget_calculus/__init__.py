"""Widget calculus toolchain: parser, effect-tracking type checker,
interpreter with an event dispatch loop, model-to-code generator, and a
scriptable headless backend."""

__version__ = "0.1.0"
