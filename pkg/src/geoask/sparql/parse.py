"""Parser for exactly the SPARQL subset the generator emits."""

from __future__ import annotations

import re

from ..terms import GeoAskError, Iri, Literal, RDF, XSD, expand
from .ast import (
    ASK,
    Aggregate,
    And,
    Comparison,
    Filter,
    FunctionCall,
    OrderKey,
    PropertyPath,
    Query,
    SELECT,
    TriplePattern,
    Var,
    validate_query,
)


class SparqlSyntaxError(GeoAskError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"at offset {pos}: {message}")
        self.pos = pos


class UnsupportedFeatureError(SparqlSyntaxError):
    pass


_UNSUPPORTED = {
    "OPTIONAL", "UNION", "PREFIX", "CONSTRUCT", "DESCRIBE", "INSERT", "DELETE",
    "SERVICE", "MINUS", "BIND", "VALUES", "GRAPH", "HAVING", "OFFSET", "EXISTS",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iri><[^<>\s]+>)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<dtsep>\^\^)
  | (?P<lang>@[A-Za-z][A-Za-z0-9-]*)
  | (?P<op><=|>=|&&|[<>=~])
  | (?P<punct>[{}().,;/])
  | (?P<word>[A-Za-z][A-Za-z0-9_:.-]*)
    """,
    re.X,
)


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SparqlSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str):
        raise SparqlSyntaxError(message, self.peek().pos)

    def expect_word(self, *words: str) -> str:
        tok = self.next()
        if tok.kind != "word" or tok.text.upper() not in words:
            raise SparqlSyntaxError(f"expected {' or '.join(words)}, got {tok.text!r}", tok.pos)
        return tok.text.upper()

    def expect_punct(self, char: str):
        tok = self.next()
        if tok.kind != "punct" or tok.text != char:
            raise SparqlSyntaxError(f"expected {char!r}, got {tok.text!r}", tok.pos)

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "word" and tok.text.upper() in words

    def check_supported(self, tok: _Token):
        if tok.kind == "word" and tok.text.upper() in _UNSUPPORTED:
            raise UnsupportedFeatureError(f"keyword {tok.text.upper()} is outside the supported subset", tok.pos)

    # -- terms ---------------------------------------------------------

    def parse_iri(self) -> Iri:
        tok = self.next()
        if tok.kind == "iri":
            return Iri(tok.text[1:-1])
        if tok.kind == "word" and ":" in tok.text:
            iri = expand(tok.text)
            if iri is not None:
                return iri
        raise SparqlSyntaxError(f"expected IRI, got {tok.text!r}", tok.pos)

    def parse_term(self):
        tok = self.peek()
        self.check_supported(tok)
        if tok.kind == "var":
            self.next()
            return Var(tok.text[1:])
        if tok.kind == "number":
            self.next()
            dt = XSD.decimal if "." in tok.text else XSD.integer
            return Literal(tok.text, dt)
        if tok.kind == "string":
            self.next()
            value = tok.text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            nxt = self.peek()
            if nxt.kind == "dtsep":
                self.next()
                return Literal(value, self.parse_iri())
            if nxt.kind == "lang":
                self.next()
                return Literal(value, None, nxt.text[1:])
            return Literal(value, None)
        if tok.kind in ("iri", "word"):
            return self.parse_iri()
        raise SparqlSyntaxError(f"expected term, got {tok.text!r}", tok.pos)

    def parse_predicate(self):
        tok = self.peek()
        if tok.kind == "word" and tok.text == "a":
            self.next()
            return RDF.type
        first = self.parse_iri()
        if self.peek().kind == "punct" and self.peek().text == "/":
            self.next()
            second = self.parse_iri()
            return PropertyPath((first, second))
        return first

    # -- patterns --------------------------------------------------------

    def parse_where(self) -> list:
        self.expect_word("WHERE")
        self.expect_punct("{")
        patterns = []
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            self.check_supported(self.peek())
            if self.at_word("FILTER"):
                patterns.append(self.parse_filter())
                continue
            subject = self.parse_term()
            while True:
                predicate = self.parse_predicate()
                obj = self.parse_term()
                patterns.append(TriplePattern(subject, predicate, obj))
                tok = self.peek()
                if tok.kind == "punct" and tok.text == ";":
                    self.next()
                    continue
                break
            tok = self.peek()
            if tok.kind == "punct" and tok.text == ".":
                self.next()
            elif not (tok.kind == "punct" and tok.text == "}"):
                self.error(f"expected '.' or '}}', got {tok.text!r}")
        self.expect_punct("}")
        return patterns

    def parse_filter(self) -> Filter:
        self.expect_word("FILTER")
        self.expect_punct("(")
        expr = self.parse_expression()
        self.expect_punct(")")
        return Filter(expr)

    def parse_expression(self):
        operands = [self.parse_comparison()]
        while self.peek().kind == "op" and self.peek().text == "&&":
            self.next()
            operands.append(self.parse_comparison())
        if len(operands) == 1:
            return operands[0]
        return And(tuple(operands))

    def parse_comparison(self):
        left = self.parse_operand()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("<", ">", "<=", ">=", "=", "~"):
            self.next()
            right = self.parse_operand()
            return Comparison(tok.text, left, right)
        if isinstance(left, FunctionCall):
            return left
        raise SparqlSyntaxError(f"expected comparison operator, got {tok.text!r}", tok.pos)

    def parse_operand(self):
        tok = self.peek()
        if tok.kind in ("iri", "word") and not (tok.kind == "word" and tok.text == "a"):
            save = self.i
            try:
                fn = self.parse_iri()
            except SparqlSyntaxError:
                self.i = save
                return self.parse_term()
            if self.peek().kind == "punct" and self.peek().text == "(":
                self.next()
                args = []
                while True:
                    args.append(self.parse_term())
                    nxt = self.next()
                    if nxt.kind == "punct" and nxt.text == ",":
                        continue
                    if nxt.kind == "punct" and nxt.text == ")":
                        break
                    raise SparqlSyntaxError(f"expected ',' or ')', got {nxt.text!r}", nxt.pos)
                return FunctionCall(fn, tuple(args))
            self.i = save
            return self.parse_term()
        return self.parse_term()

    # -- query forms -------------------------------------------------------

    def parse_query(self) -> Query:
        tok = self.peek()
        self.check_supported(tok)
        if self.at_word("ASK"):
            self.next()
            where = self.parse_where()
            self._expect_eof()
            return Query(ASK, where=tuple(where))
        if not self.at_word("SELECT"):
            self.error(f"expected SELECT or ASK, got {tok.text!r}")
        self.next()
        distinct = False
        if self.at_word("DISTINCT"):
            self.next()
            distinct = True
        projection = []
        while True:
            tok = self.peek()
            if tok.kind == "var":
                self.next()
                projection.append(Var(tok.text[1:]))
            elif tok.kind == "punct" and tok.text == "(":
                projection.append(self.parse_aggregate())
            else:
                break
        if not projection:
            self.error("SELECT needs at least one projection")
        where = self.parse_where()
        group_by: list[Var] = []
        order_by: list[OrderKey] = []
        limit = None
        while self.peek().kind != "eof":
            self.check_supported(self.peek())
            if self.at_word("GROUP"):
                self.next()
                self.expect_word("BY")
                while self.peek().kind == "var":
                    group_by.append(Var(self.next().text[1:]))
            elif self.at_word("ORDER"):
                self.next()
                self.expect_word("BY")
                while True:
                    tok = self.peek()
                    if tok.kind == "var":
                        self.next()
                        order_by.append(OrderKey(Var(tok.text[1:]), True))
                    elif self.at_word("ASC", "DESC"):
                        word = self.next().text.upper()
                        self.expect_punct("(")
                        var_tok = self.next()
                        if var_tok.kind != "var":
                            raise SparqlSyntaxError("expected variable in ORDER BY", var_tok.pos)
                        self.expect_punct(")")
                        order_by.append(OrderKey(Var(var_tok.text[1:]), word == "ASC"))
                    else:
                        break
            elif self.at_word("LIMIT"):
                self.next()
                tok = self.next()
                if tok.kind != "number" or "." in tok.text:
                    raise SparqlSyntaxError("LIMIT needs an integer", tok.pos)
                limit = int(tok.text)
            else:
                self.error(f"unexpected trailing token {self.peek().text!r}")
        return Query(
            SELECT,
            projection=tuple(projection),
            where=tuple(where),
            distinct=distinct,
            group_by=tuple(group_by),
            order_by=tuple(order_by),
            limit=limit,
        )

    def parse_aggregate(self) -> Aggregate:
        self.expect_punct("(")
        word = self.expect_word("COUNT")
        self.expect_punct("(")
        distinct = False
        if self.at_word("DISTINCT"):
            self.next()
            distinct = True
        tok = self.next()
        if tok.kind != "var":
            raise SparqlSyntaxError("COUNT needs a variable", tok.pos)
        var = Var(tok.text[1:])
        self.expect_punct(")")
        self.expect_word("AS")
        alias_tok = self.next()
        if alias_tok.kind != "var":
            raise SparqlSyntaxError("AS needs a variable", alias_tok.pos)
        self.expect_punct(")")
        return Aggregate(word, var, distinct, Var(alias_tok.text[1:]))

    def _expect_eof(self):
        if self.peek().kind != "eof":
            self.error(f"unexpected trailing token {self.peek().text!r}")


def parse(text: str) -> Query:
    """Parse query text; raises SparqlSyntaxError with the failing offset."""
    if not text or not text.strip():
        raise SparqlSyntaxError("empty query text", 0)
    query = _Parser(text).parse_query()
    validate_query(query)
    return query
