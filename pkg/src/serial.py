"""
Prefix text form of expression trees, used by experiment configs.

    (quot (var) (fp 4 64))
    (gpf (0.5j -1+1j) (-0.5j -1-1j 2))
    (shift (pow (fp 4) 4) 1)

Literals are decimal complex numbers ('2', '-1.5e3', '0.5j', '1-2j'); printing
uses enough digits for parse(dumps(e)) == e at literal precision.
"""
import re
from typing import List, Tuple

from src.errors import ExprSyntaxError
from src.expr import (Const, FactorProduct, FactorProductDerivative, FactorProductSecondDerivative, FunctionExpr,
                      GroupedPartialFractions, Monomial,
                      PowerCompose, Product, Quotient, Shift, Sum, Var)
from src.precision import format_complex, parse_complex

_FACTOR_TAGS = {"fp": FactorProduct, "dfp": FactorProductDerivative, "ddfp": FactorProductSecondDerivative}
_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def tokenize(text: str) -> List[str]:
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", len(tokens))
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: List[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str:
        if self.i >= len(self.tokens):
            raise ExprSyntaxError("unexpected end of input", self.i)
        return self.tokens[self.i]

    def take(self, expected: str = "") -> str:
        tok = self.peek()
        if expected and tok != expected:
            raise ExprSyntaxError(f"expected {expected!r}, got {tok!r}", self.i)
        self.i += 1
        return tok

    def number(self):
        tok = self.take()
        if tok in "()":
            raise ExprSyntaxError(f"expected a number, got {tok!r}", self.i - 1)
        try:
            return parse_complex(tok)
        except ValueError:
            raise ExprSyntaxError(f"bad complex literal {tok!r}", self.i - 1)

    def integer(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise ExprSyntaxError(f"expected a positive integer, got {tok!r}", self.i - 1)
        return int(tok)

    def exprs(self) -> Tuple[FunctionExpr, ...]:
        out = []
        while self.peek() != ")":
            out.append(self.expr())
        return tuple(out)

    def expr(self) -> FunctionExpr:
        self.take("(")
        tag = self.take()
        try:
            if tag == "const":
                node: FunctionExpr = Const(self.number())
            elif tag == "var":
                node = Var()
            elif tag == "mono":
                node = Monomial(self.integer())
            elif tag == "sum":
                node = Sum(self.exprs())
            elif tag == "prod":
                node = Product(self.exprs())
            elif tag == "quot":
                node = Quotient(self.expr(), self.expr())
            elif tag == "shift":
                child = self.expr()
                node = Shift(child, self.number())
            elif tag == "pow":
                child = self.expr()
                node = PowerCompose(child, self.integer())
            elif tag in _FACTOR_TAGS:
                values = []
                while self.peek() != ")":
                    values.append(self.number())
                node = _FACTOR_TAGS[tag](tuple(values))
            elif tag == "gpf":
                terms = []
                while self.peek() != ")":
                    self.take("(")
                    c, p = self.number(), self.number()
                    m = self.integer() if self.peek() != ")" else 1
                    self.take(")")
                    terms.append((c, p, m))
                node = GroupedPartialFractions(tuple(terms))
            else:
                raise ExprSyntaxError(f"unknown node tag {tag!r}", self.i - 1)
        except ValueError as e:
            raise ExprSyntaxError(str(e), self.i)
        self.take(")")
        return node


def parse(text: str) -> FunctionExpr:
    tokens = tokenize(text)
    parser = _Parser(tokens)
    node = parser.expr()
    if parser.i != len(tokens):
        raise ExprSyntaxError("trailing tokens after expression", parser.i)
    return node


def dumps(e: FunctionExpr) -> str:
    if isinstance(e, Const):
        return f"(const {format_complex(e.c)})"
    if isinstance(e, Var):
        return "(var)"
    if isinstance(e, Monomial):
        return f"(mono {e.k})"
    if isinstance(e, Sum):
        return "(sum " + " ".join(dumps(c) for c in e.children) + ")"
    if isinstance(e, Product):
        return "(prod " + " ".join(dumps(c) for c in e.children) + ")"
    if isinstance(e, Quotient):
        return f"(quot {dumps(e.num)} {dumps(e.den)})"
    if isinstance(e, Shift):
        return f"(shift {dumps(e.child)} {format_complex(e.c)})"
    if isinstance(e, PowerCompose):
        return f"(pow {dumps(e.child)} {e.k})"
    for tag, cls in _FACTOR_TAGS.items():
        if type(e) is cls:
            return f"({tag} " + " ".join(format_complex(a) for a in e.a) + ")"
    if isinstance(e, GroupedPartialFractions):
        terms = []
        for c, p, m in e.terms:
            order = f" {m}" if m != 1 else ""
            terms.append(f"({format_complex(c)} {format_complex(p)}{order})")
        return "(gpf " + " ".join(terms) + ")"
    raise ExprSyntaxError(f"cannot serialise node {type(e).__name__}")
