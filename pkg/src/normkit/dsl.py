"""Parser and renderer for the line-oriented `.nfs` schema format.

Grammar:
    file        := line*
    line        := statement? comment?
    comment     := '#' <anything to end of line>
    statement   := 'schema' ident
                 | 'attributes' ident-list
                 | 'fd' ident-list '->' ident-list
                 | 'mvd' ident-list '->>' ident-list
                 | 'key' ident-list
    ident       := [A-Za-z_][A-Za-z0-9_]*
    ident-list  := ident (',' ident)*

A line whose last token is a comma continues on the next line.  Exactly one
`schema` and one `attributes` statement are required; at most one `key`.
Identifiers are case-sensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .model import (
    Attribute,
    AttributeSet,
    EmptyRHSError,
    FunctionalDependency,
    MultivaluedDependency,
    RelationSchema,
    SchemaError,
)


@dataclass(frozen=True)
class ParseDiagnostic:
    """A location-tagged message; line and column are 1-based."""

    line: int
    column: int
    kind: str
    message: str

    def render(self) -> str:
        return f"{self.line}:{self.column}: {self.kind}: {self.message}"


class ParseError(SchemaError):
    """Base for all parse failures; always carries a ParseDiagnostic."""

    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


class DslSyntaxError(ParseError):
    pass


class UndeclaredAttribute(ParseError):
    pass


class DuplicateAttribute(ParseError):
    pass


class DuplicateSchema(ParseError):
    pass


class MissingAttributes(ParseError):
    pass


class MissingSchema(ParseError):
    pass


_TOKEN_RE = re.compile(r"[ \t\r]*(->>|->|,|[A-Za-z_][A-Za-z0-9_]*)")

_Token = Tuple[str, int, int]  # (text, line, column)


def _tokenize_line(text: str, lineno: int) -> List[_Token]:
    hash_pos = text.find("#")
    if hash_pos >= 0:
        text = text[:hash_pos]
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise DslSyntaxError(
                ParseDiagnostic(lineno, col, "syntax", f"unexpected character {text[col - 1]!r}")
            )
        tokens.append((match.group(1), lineno, match.start(1) + 1))
        pos = match.end()
    return tokens


def _logical_statements(text: str) -> Iterator[List[_Token]]:
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        tokens = _tokenize_line(lines[i], i + 1)
        i += 1
        # comma continuation: keep pulling lines while the statement is open
        while tokens and tokens[-1][0] == "," and i < len(lines):
            tokens.extend(_tokenize_line(lines[i], i + 1))
            i += 1
        if tokens:
            yield tokens


class _StatementReader:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Optional[_Token]:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def end_location(self) -> Tuple[int, int]:
        last = self.tokens[-1]
        return last[1], last[2] + len(last[0])

    def fail(self, message: str) -> "DslSyntaxError":
        tok = self.peek()
        if tok is None:
            line, col = self.end_location()
        else:
            line, col = tok[1], tok[2]
        return DslSyntaxError(ParseDiagnostic(line, col, "syntax", message))

    def ident(self, what: str) -> _Token:
        tok = self.take()
        if tok is None or tok[0] in {",", "->", "->>"}:
            self.pos = max(self.pos - 1, 0) if tok else self.pos
            raise self.fail(f"expected {what}")
        return tok

    def ident_list(self, what: str) -> List[_Token]:
        items = [self.ident(what)]
        while True:
            tok = self.peek()
            if tok is None or tok[0] != ",":
                return items
            self.take()
            items.append(self.ident(what))

    def expect_end(self) -> None:
        if self.peek() is not None:
            raise self.fail(f"unexpected trailing token {self.peek()[0]!r}")

    def expect_arrow(self, arrow: str) -> None:
        tok = self.take()
        if tok is None or tok[0] != arrow:
            if tok is not None:
                self.pos -= 1
            raise self.fail(f"expected {arrow!r}")


def parse_schema_with_warnings(text: str) -> Tuple[RelationSchema, List[ParseDiagnostic]]:
    """Parse schema text; also report non-fatal warnings (stripped overlap)."""
    schema_name: Optional[_Token] = None
    attribute_tokens: Optional[List[_Token]] = None
    key_tokens: Optional[List[_Token]] = None
    dep_statements: List[Tuple[str, List[_Token], List[_Token]]] = []

    for tokens in _logical_statements(text):
        reader = _StatementReader(tokens)
        head = reader.take()
        keyword = head[0]
        if keyword == "schema":
            if schema_name is not None:
                raise DuplicateSchema(
                    ParseDiagnostic(head[1], head[2], "duplicate-schema", "second schema statement")
                )
            schema_name = reader.ident("schema name")
            reader.expect_end()
        elif keyword == "attributes":
            if attribute_tokens is not None:
                raise DslSyntaxError(
                    ParseDiagnostic(head[1], head[2], "syntax", "second attributes statement")
                )
            attribute_tokens = reader.ident_list("attribute name")
            reader.expect_end()
        elif keyword == "key":
            if key_tokens is not None:
                raise DslSyntaxError(
                    ParseDiagnostic(head[1], head[2], "syntax", "second key statement")
                )
            key_tokens = reader.ident_list("attribute name")
            reader.expect_end()
        elif keyword in ("fd", "mvd"):
            lhs = reader.ident_list("attribute name")
            reader.expect_arrow("->" if keyword == "fd" else "->>")
            rhs = reader.ident_list("attribute name")
            reader.expect_end()
            dep_statements.append((keyword, lhs, rhs))
        else:
            raise DslSyntaxError(
                ParseDiagnostic(
                    head[1], head[2], "syntax", f"unknown statement {keyword!r}"
                )
            )

    if schema_name is None:
        raise MissingSchema(ParseDiagnostic(1, 1, "missing-schema", "no schema statement"))
    if attribute_tokens is None:
        raise MissingAttributes(
            ParseDiagnostic(1, 1, "missing-attributes", "no attributes statement")
        )

    attributes: List[Attribute] = []
    by_name: dict[str, Attribute] = {}
    for tok in attribute_tokens:
        if tok[0] in by_name:
            raise DuplicateAttribute(
                ParseDiagnostic(
                    tok[1], tok[2], "duplicate-attribute", f"attribute {tok[0]!r} declared twice"
                )
            )
        attr = Attribute(tok[0], len(attributes))
        attributes.append(attr)
        by_name[tok[0]] = attr

    def resolve(tokens: List[_Token]) -> AttributeSet:
        members = set()
        for tok in tokens:
            attr = by_name.get(tok[0])
            if attr is None:
                raise UndeclaredAttribute(
                    ParseDiagnostic(
                        tok[1],
                        tok[2],
                        "undeclared-attribute",
                        f"attribute {tok[0]!r} is not declared",
                    )
                )
            members.add(attr)
        return AttributeSet(frozenset(members))

    warnings: List[ParseDiagnostic] = []
    fds: List[FunctionalDependency] = []
    mvds: List[MultivaluedDependency] = []
    for index, (kind, lhs_toks, rhs_toks) in enumerate(dep_statements):
        lhs = resolve(lhs_toks)
        rhs = resolve(rhs_toks)
        overlap = lhs & rhs
        if overlap:
            warnings.append(
                ParseDiagnostic(
                    lhs_toks[0][1],
                    lhs_toks[0][2],
                    "stripped-overlap",
                    f"removed {overlap.render()} from the right side of a {kind}",
                )
            )
        try:
            if kind == "fd":
                fds.append(FunctionalDependency(lhs, rhs, index))
            else:
                mvds.append(MultivaluedDependency(lhs, rhs, index))
        except EmptyRHSError as exc:
            raise DslSyntaxError(
                ParseDiagnostic(lhs_toks[0][1], lhs_toks[0][2], "empty-rhs", str(exc))
            ) from exc

    return (
        RelationSchema(
            name=schema_name[0],
            attributes=tuple(attributes),
            fds=tuple(fds),
            mvds=tuple(mvds),
            declared_key=resolve(key_tokens) if key_tokens is not None else None,
        ),
        warnings,
    )


def parse_schema(text: str) -> RelationSchema:
    """Parse schema text into a canonical RelationSchema."""
    schema, _ = parse_schema_with_warnings(text)
    return schema


def render_schema(schema: RelationSchema) -> str:
    """Deterministic text form; re-parsing yields an equal schema."""
    lines = [f"schema {schema.name}"]
    lines.append("attributes " + ", ".join(a.name for a in schema.attributes))
    if schema.declared_key is not None:
        lines.append(f"key {schema.declared_key.render()}")
    for dep in schema.dependencies():
        keyword = "fd" if isinstance(dep, FunctionalDependency) else "mvd"
        lines.append(f"{keyword} {dep.render()}")
    return "\n".join(lines) + "\n"
