"""Hand-rolled lexer for `.wdg` sources."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Pos, SyntaxErr

PUNCT2 = ("<-", "->")
PUNCT1 = "()[]{}<>,;:.+-=!*"

KEYWORDS = {
    "fun", "val", "type", "if", "then", "else", "fix", "raise", "do",
    "return", "widget", "top", "Fun", "letrec", "let", "in", "rec",
    "true", "false",
}


@dataclass
class Token:
    kind: str  # ident | keyword | int | str | punct | eof
    value: object
    pos: Pos

    def is_punct(self, v):
        return self.kind == "punct" and self.value == v

    def is_kw(self, v):
        return self.kind == "keyword" and self.value == v


def tokenize(source: str) -> list:
    toks = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        pos = Pos(line, col)
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, pos))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("int", int(source[i:j]), pos))
            col += j - i
            i = j
            continue
        if c == "'":
            j = i + 1
            out = []
            while j < n and source[j] != "'":
                if source[j] == "\\" and j + 1 < n:
                    esc = source[j + 1]
                    out.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    j += 2
                else:
                    out.append(source[j])
                    j += 1
            if j >= n:
                raise SyntaxErr("unterminated string literal", pos)
            toks.append(Token("str", "".join(out), pos))
            col += j + 1 - i
            i = j + 1
            continue
        two = source[i : i + 2]
        if two in PUNCT2:
            toks.append(Token("punct", two, pos))
            i += 2
            col += 2
            continue
        if c in PUNCT1:
            toks.append(Token("punct", c, pos))
            i += 1
            col += 1
            continue
        raise SyntaxErr(f"unexpected character {c!r}", pos)
    toks.append(Token("eof", None, Pos(line, col)))
    return toks
