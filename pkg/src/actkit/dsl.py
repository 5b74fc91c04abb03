"""Text format for act models.

Grammar::

    file   := 'act' STRING '{' 'root' IDENT ';' (def)+ '}'
    def    := IDENT STRING? '=' expr ';'
    expr   := 'AND' '(' idlist ')' | 'OR' '(' idlist ')'
            | 'CM' '(' IDENT ',' IDENT ')'
            | 'ATTACK' params | 'DETECT' params | 'MITIGATE' params
    params := '(' 'p' '=' FLOAT (',' 't' '=' FLOAT | ',' 'lambda' '=' FLOAT)? ')'
    idlist := IDENT (',' IDENT)*

Identifiers are ``[A-Za-z_][A-Za-z0-9_]*``; the optional quoted string after
an identifier is the node's display name (default: the identifier itself) and
is preserved byte-exactly apart from ``\\"`` and ``\\\\`` escapes. ``#``
starts a comment running to the end of the line. Definitions may reference
identifiers defined later in the file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ActParseError, ActValidationError, MissingParameter
from .model import (
    Act,
    AndGate,
    AttackLeaf,
    CmGate,
    DetectLeaf,
    LeafTiming,
    MitigateLeaf,
    Node,
    OrGate,
    validate_act,
)

_PUNCT = "{}();,="
_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_BODY = _IDENT_START | set("0123456789")
_DEFAULT_HORIZON = 1.0


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident', 'string', 'number', 'punct', 'eof'
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, line, col))
            advance(1)
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance(1)
            out = []
            while True:
                if i >= n:
                    raise ActParseError("unterminated string", start_line, start_col)
                c = text[i]
                if c == "\\" and i + 1 < n and text[i + 1] in '"\\':
                    out.append(text[i + 1])
                    advance(2)
                    continue
                if c == '"':
                    advance(1)
                    break
                out.append(c)
                advance(1)
            tokens.append(_Token("string", "".join(out), start_line, start_col))
            continue
        if ch in _IDENT_START:
            start_line, start_col = line, col
            j = i
            while j < n and text[j] in _IDENT_BODY:
                j += 1
            tokens.append(_Token("ident", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if ch.isdigit() or ch == "." or (ch in "+-" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")):
            start_line, start_col = line, col
            j = i
            if text[j] in "+-":
                j += 1
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            word = text[i:j]
            try:
                float(word)
            except ValueError:
                raise ActParseError(f"bad number {word!r}", start_line, start_col) from None
            tokens.append(_Token("number", word, start_line, start_col))
            advance(j - i)
            continue
        raise ActParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def _fail(self, expected: str) -> ActParseError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        return ActParseError(f"expected {expected}, found {found}", tok.line, tok.column)

    def expect_punct(self, ch: str) -> None:
        if self.tok.kind != "punct" or self.tok.value != ch:
            raise self._fail(f"'{ch}'")
        self.pos += 1

    def expect_keyword(self, word: str) -> None:
        if self.tok.kind != "ident" or self.tok.value != word:
            raise self._fail(f"'{word}'")
        self.pos += 1

    def expect_ident(self) -> _Token:
        if self.tok.kind != "ident":
            raise self._fail("an identifier")
        tok = self.tok
        self.pos += 1
        return tok

    def expect_string(self) -> str:
        if self.tok.kind != "string":
            raise self._fail("a quoted string")
        value = self.tok.value
        self.pos += 1
        return value

    def expect_number(self) -> float:
        if self.tok.kind != "number":
            raise self._fail("a number")
        value = float(self.tok.value)
        self.pos += 1
        return value

    def accept_punct(self, ch: str) -> bool:
        if self.tok.kind == "punct" and self.tok.value == ch:
            self.pos += 1
            return True
        return False


def _parse_params(p: _Parser) -> LeafTiming:
    p.expect_punct("(")
    p.expect_keyword("p")
    p.expect_punct("=")
    prob = p.expect_number()
    horizon: float | None = None
    lam: float | None = None
    if p.accept_punct(","):
        key = p.expect_ident()
        if key.value == "t":
            p.expect_punct("=")
            horizon = p.expect_number()
        elif key.value == "lambda":
            p.expect_punct("=")
            lam = p.expect_number()
        else:
            raise ActParseError(f"expected 't' or 'lambda', found {key.value!r}", key.line, key.column)
    p.expect_punct(")")
    if lam is None and horizon is None:
        horizon = _DEFAULT_HORIZON
    return LeafTiming(p=prob, t=horizon, lam=lam)


def _parse_idlist(p: _Parser) -> list[_Token]:
    p.expect_punct("(")
    items = [p.expect_ident()]
    while p.accept_punct(","):
        items.append(p.expect_ident())
    p.expect_punct(")")
    return items


def parse_act(text: str) -> Act:
    """Parse model text into a validated Act.

    Raises ActParseError on malformed text, undefined references or duplicate
    definitions, and ActValidationError when the tree breaks a structural rule.
    """
    p = _Parser(_tokenize(text))
    p.expect_keyword("act")
    title = p.expect_string()
    p.expect_punct("{")
    p.expect_keyword("root")
    root_tok = p.expect_ident()
    p.expect_punct(";")

    # (ident token, display name, expr tag, payload)
    defs: list[tuple[_Token, str, str, object]] = []
    by_ident: dict[str, int] = {}
    while not p.accept_punct("}"):
        ident = p.expect_ident()
        name = ident.value
        if p.tok.kind == "string":
            name = p.expect_string()
        p.expect_punct("=")
        head = p.expect_ident()
        if head.value in ("AND", "OR"):
            payload: object = _parse_idlist(p)
        elif head.value == "CM":
            p.expect_punct("(")
            d = p.expect_ident()
            p.expect_punct(",")
            m = p.expect_ident()
            p.expect_punct(")")
            payload = (d, m)
        elif head.value in ("ATTACK", "DETECT", "MITIGATE"):
            payload = _parse_params(p)
        else:
            raise ActParseError(
                f"expected one of AND, OR, CM, ATTACK, DETECT, MITIGATE, found {head.value!r}",
                head.line,
                head.column,
            )
        p.expect_punct(";")
        if ident.value in by_ident:
            raise ActParseError(f"duplicate definition of {ident.value!r}", ident.line, ident.column,
                                code="duplicate-definition")
        by_ident[ident.value] = len(defs)
        defs.append((ident, name, head.value, payload))
    if p.tok.kind != "eof":
        raise p._fail("end of input")
    if not defs:
        raise ActParseError("a model needs at least one definition", root_tok.line, root_tok.column)

    def resolve(tok: _Token) -> int:
        if tok.value not in by_ident:
            raise ActParseError(f"reference to undefined node {tok.value!r}", tok.line, tok.column,
                                code="undefined-reference")
        return by_ident[tok.value]

    nodes: list[Node] = []
    for ident, name, tag, payload in defs:
        if tag == "AND":
            kind: object = AndGate(tuple(resolve(t) for t in payload))
        elif tag == "OR":
            kind = OrGate(tuple(resolve(t) for t in payload))
        elif tag == "CM":
            kind = CmGate(resolve(payload[0]), resolve(payload[1]))
        elif tag == "ATTACK":
            kind = AttackLeaf(payload)
        elif tag == "DETECT":
            kind = DetectLeaf(payload)
        else:
            kind = MitigateLeaf(payload)
        nodes.append(Node(ident.value, name, kind))

    act = Act(title, resolve(root_tok), tuple(nodes))
    diagnostics = validate_act(act)
    if diagnostics:
        raise ActValidationError(diagnostics)
    return act


def _escape(name: str) -> str:
    return name.replace("\\", "\\\\").replace('"', '\\"')


def _fmt_float(x: float) -> str:
    return repr(float(x))


def serialize_act(act: Act) -> str:
    """Render an Act back to canonical model text (inverse of parse_act)."""
    lines = [f'act "{_escape(act.title)}" {{']
    lines.append(f"  root {act.nodes[act.root].ident};")
    for node in act.nodes:
        kind = node.kind
        if isinstance(kind, AndGate):
            expr = f"AND({', '.join(act.nodes[c].ident for c in kind.children)})"
        elif isinstance(kind, OrGate):
            expr = f"OR({', '.join(act.nodes[c].ident for c in kind.children)})"
        elif isinstance(kind, CmGate):
            expr = f"CM({act.nodes[kind.detect].ident}, {act.nodes[kind.mitigate].ident})"
        else:
            word = {AttackLeaf: "ATTACK", DetectLeaf: "DETECT", MitigateLeaf: "MITIGATE"}[type(kind)]
            tm = kind.timing
            if tm.p is None:
                raise MissingParameter(
                    f"leaf '{node.name}' has no probability; rate-only leaves cannot be written as text"
                )
            parts = [f"p={_fmt_float(tm.p)}"]
            if tm.lam is not None:
                parts.append(f"lambda={_fmt_float(tm.lam)}")
            elif tm.t is not None:
                parts.append(f"t={_fmt_float(tm.t)}")
            expr = f"{word}({', '.join(parts)})"
        label = "" if node.name == node.ident else f' "{_escape(node.name)}"'
        lines.append(f"  {node.ident}{label} = {expr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_act(path: str | os.PathLike) -> Act:
    """Parse a model file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_act(fh.read())
