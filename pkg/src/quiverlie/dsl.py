"""The expression DSL used by the CLI.

Grammar (documented in the README):

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor (['.'] factor)*          products by '.' or juxtaposition
    factor   := INT ['/' INT]                   rational literal
              | IDENT ['*']                     arrow (star suffix = reverse arrow)
              | 'e' '(' vertex ')'              vertex idempotent
              | 'cyc' '(' expr ')'              projection to a necklace
              | 'd' '(' expr ')'                differential
              | 'i' '(' deriv ',' expr ')'      contraction
              | 'L' '(' deriv ',' expr ')'      Lie derivative
              | 'theta' '{' arrow '->' expr (',' arrow '->' expr)* '}'
              | '(' expr ')'

Products of forms evaluate in the unreduced calculus and are projected to
de Rham classes only where a consumer needs one, so expressions like
``d(x) d(x*)`` or ``x d(x) d(x*)`` denote 2-form classes.  Projected
values (cyc(...), results of i/L) can be added and scaled but not
multiplied further.

Evaluation reports precise source positions: unknown arrows, products
inside cyc(...) that vanish because endpoints do not compose, and cyc
arguments with no closed path at all each raise a distinct diagnostic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import ParseError, UnknownArrowError
from .forms import OneForm, RawForm, TwoForm, contract, d0, d1, lie_derivative, raw_d_of_element
from .necklace import Derivation, Necklace, project_to_necklace
from .quiver import DoubledQuiver, Path, PathAlgebraElement

Value = Union[Fraction, PathAlgebraElement, RawForm, Necklace, OneForm, TwoForm, Derivation]

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*\*?)"
    r"|(?P<arrow_op>->)"
    r"|(?P<sym>[()+\-.,{}/])"
)

_FUNCTIONS = {"e", "cyc", "d", "i", "L", "theta"}


@dataclass
class Token:
    kind: str  # "num" | "ident" | "sym" | "arrow_op" | "end"
    text: str
    line: int
    column: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


# -- AST --------------------------------------------------------------------


@dataclass
class Node:
    line: int
    column: int


@dataclass
class NumberNode(Node):
    value: Fraction


@dataclass
class ArrowNode(Node):
    name: str


@dataclass
class IdempotentNode(Node):
    vertex: str


@dataclass
class CallNode(Node):
    func: str
    args: list


@dataclass
class ThetaNode(Node):
    images: list  # (arrow name, node, line, column)


@dataclass
class ProductNode(Node):
    factors: list


@dataclass
class SumNode(Node):
    terms: list  # (sign, node)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.column)
        return self.advance()

    def parse(self) -> Node:
        node = self.parse_expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)
        return node

    def parse_expr(self) -> Node:
        tok = self.peek()
        terms = []
        sign = 1
        if tok.text == "-":
            self.advance()
            sign = -1
        terms.append((sign, self.parse_term()))
        while self.peek().text in ("+", "-"):
            op = self.advance()
            terms.append((1 if op.text == "+" else -1, self.parse_term()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return SumNode(tok.line, tok.column, terms)

    def parse_term(self) -> Node:
        first = self.parse_factor()
        factors = [first]
        while True:
            tok = self.peek()
            if tok.text == ".":
                self.advance()
                factors.append(self.parse_factor())
            elif tok.kind in ("num", "ident") or tok.text == "(":
                factors.append(self.parse_factor())
            else:
                break
        if len(factors) == 1:
            return first
        return ProductNode(first.line, first.column, factors)

    def parse_factor(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            value = Fraction(int(tok.text))
            if self.peek().text == "/":
                self.advance()
                den = self.peek()
                if den.kind != "num":
                    raise ParseError("expected an integer denominator", den.line, den.column)
                self.advance()
                if int(den.text) == 0:
                    raise ParseError("zero denominator", den.line, den.column)
                value = Fraction(int(tok.text), int(den.text))
            return NumberNode(tok.line, tok.column, value)
        if tok.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            name = tok.text
            if name in _FUNCTIONS and not name.endswith("*"):
                nxt = self.tokens[self.pos + 1]
                if name == "theta" and nxt.text == "{":
                    return self.parse_theta()
                if nxt.text == "(":
                    return self.parse_call()
            self.advance()
            return ArrowNode(tok.line, tok.column, name)
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}", tok.line, tok.column)

    def parse_call(self) -> Node:
        head = self.advance()
        self.expect("(")
        if head.text == "e":
            tok = self.peek()
            if tok.kind not in ("ident", "num"):
                raise ParseError("expected a vertex identifier", tok.line, tok.column)
            self.advance()
            self.expect(")")
            return IdempotentNode(head.line, head.column, tok.text)
        args = [self.parse_expr()]
        while self.peek().text == ",":
            self.advance()
            args.append(self.parse_expr())
        self.expect(")")
        expected = {"cyc": 1, "d": 1, "i": 2, "L": 2}[head.text]
        if len(args) != expected:
            raise ParseError(
                f"{head.text} takes {expected} argument(s), got {len(args)}",
                head.line, head.column,
            )
        return CallNode(head.line, head.column, head.text, args)

    def parse_theta(self) -> Node:
        head = self.advance()
        self.expect("{")
        images = []
        while True:
            tok = self.peek()
            if tok.kind != "ident":
                raise ParseError("expected an arrow name", tok.line, tok.column)
            self.advance()
            self.expect("->")
            images.append((tok.text, self.parse_expr(), tok.line, tok.column))
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("}")
        return ThetaNode(head.line, head.column, images)


# -- evaluation --------------------------------------------------------------


@dataclass
class _EvalContext:
    quiver: DoubledQuiver
    vanished_products: list = field(default_factory=list)  # (line, column) pairs


def _err(message: str, node: Node) -> ParseError:
    return ParseError(message, node.line, node.column)


def _is_form_class(value) -> bool:
    return isinstance(value, (Necklace, OneForm, TwoForm))


def _raw_degree(value) -> int | None:
    if isinstance(value, PathAlgebraElement):
        return 0
    if isinstance(value, RawForm):
        return value.degree
    return None


def _add_values(a: Value, b: Value, node: Node, ctx: _EvalContext) -> Value:
    quiver = ctx.quiver
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    # scalars promote to multiples of the unit in the other operand's kind
    if isinstance(a, Fraction):
        a = PathAlgebraElement.unit(quiver).scale(a)
    if isinstance(b, Fraction):
        b = PathAlgebraElement.unit(quiver).scale(b)
    if isinstance(a, PathAlgebraElement) and isinstance(b, Necklace):
        a = project_to_necklace(a)
    if isinstance(b, PathAlgebraElement) and isinstance(a, Necklace):
        b = project_to_necklace(b)
    if isinstance(a, PathAlgebraElement) and isinstance(b, PathAlgebraElement):
        return a + b
    if isinstance(a, RawForm) and isinstance(b, PathAlgebraElement) and a.degree == 0:
        return a + RawForm.from_element(b)
    if isinstance(a, RawForm) and isinstance(b, RawForm) and a.degree == b.degree:
        return a + b
    if isinstance(a, RawForm):
        a = a.project()
    if isinstance(b, RawForm):
        b = b.project()
    if type(a) is type(b) and _is_form_class(a):
        return a + b
    raise _err(f"cannot add a {type(a).__name__} and a {type(b).__name__}", node)


def _mul_values(a: Value, b: Value, node: Node, ctx: _EvalContext) -> Value:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if isinstance(a, Fraction):
        if isinstance(b, (PathAlgebraElement, RawForm, Necklace, OneForm, TwoForm, Derivation)):
            return b.scale(a)
    if isinstance(b, Fraction):
        return _mul_values(b, a, node, ctx)
    da, db = _raw_degree(a), _raw_degree(b)
    if da is None or db is None:
        raise _err(
            "projected classes cannot be multiplied; apply cyc/i/L after the product",
            node,
        )
    if da + db > 2:
        raise _err("form degree above 2 is not supported", node)
    if da == 0 and db == 0:
        product = a * b
        if not a.is_zero() and not b.is_zero() and product.is_zero():
            ctx.vanished_products.append((node.line, node.column))
        return product
    ra = a if isinstance(a, RawForm) else RawForm.from_element(a)
    rb = b if isinstance(b, RawForm) else RawForm.from_element(b)
    product = ra * rb
    if not ra.is_zero() and not rb.is_zero() and product.is_zero():
        ctx.vanished_products.append((node.line, node.column))
    return product


def _as_necklace(value: Value, node: Node, ctx: _EvalContext, marker: int) -> Necklace:
    if isinstance(value, Necklace):
        return value
    if isinstance(value, Fraction):
        value = PathAlgebraElement.unit(ctx.quiver).scale(value)
    if isinstance(value, RawForm) and value.degree == 0:
        value = PathAlgebraElement(
            ctx.quiver, {k[0]: c for k, c in value.terms.items()}
        )
    if not isinstance(value, PathAlgebraElement):
        raise _err(f"cyc expects a path-algebra expression, got a {type(value).__name__}", node)
    neck = project_to_necklace(value)
    new_events = ctx.vanished_products[marker:]
    if neck.is_zero() and new_events:
        line, column = new_events[0]
        raise ParseError(
            "product inside cyc(...) vanishes: its factors do not compose "
            "(head/tail mismatch)", line, column,
        )
    if neck.is_zero() and not value.is_zero():
        raise _err("cyc argument contains no closed path (all terms are open)", node)
    return neck


def _evaluate(node: Node, ctx: _EvalContext) -> Value:
    quiver = ctx.quiver
    if isinstance(node, NumberNode):
        return node.value
    if isinstance(node, ArrowNode):
        try:
            arrow = quiver.arrow_by_name(node.name)
        except UnknownArrowError:
            raise _err(f"unknown arrow {node.name!r}", node) from None
        return PathAlgebraElement.from_path(Path(quiver, (arrow.index,)))
    if isinstance(node, IdempotentNode):
        for v in quiver.vertices:
            if str(v) == node.vertex:
                return PathAlgebraElement.idempotent(quiver, v)
        raise _err(f"unknown vertex {node.vertex!r}", node)
    if isinstance(node, SumNode):
        total: Value | None = None
        for sign, sub in node.terms:
            value = _evaluate(sub, ctx)
            if sign < 0:
                if isinstance(value, Fraction):
                    value = -value
                else:
                    value = value.scale(-1)
            total = value if total is None else _add_values(total, value, node, ctx)
        return total
    if isinstance(node, ProductNode):
        total = None
        for sub in node.factors:
            value = _evaluate(sub, ctx)
            total = value if total is None else _mul_values(total, value, sub, ctx)
        return total
    if isinstance(node, ThetaNode):
        images = {}
        for name, sub, line, column in node.images:
            try:
                arrow = quiver.arrow_by_name(name)
            except UnknownArrowError:
                raise ParseError(f"unknown arrow {name!r}", line, column) from None
            value = _evaluate(sub, ctx)
            if isinstance(value, Fraction):
                if arrow.head != arrow.tail:
                    raise ParseError(
                        f"a scalar image needs a loop; {name!r} is not a loop", line, column
                    )
                value = PathAlgebraElement.idempotent(quiver, arrow.head).scale(value)
            if not isinstance(value, PathAlgebraElement):
                raise ParseError("derivation images must be path-algebra expressions",
                                 line, column)
            try:
                Derivation(quiver, {arrow.index: value})
            except Exception as exc:
                raise ParseError(f"bad image for {name!r}: {exc}", line, column) from None
            images[arrow.index] = value
        return Derivation(quiver, images)
    if isinstance(node, CallNode):
        if node.func == "cyc":
            marker = len(ctx.vanished_products)
            value = _evaluate(node.args[0], ctx)
            return _as_necklace(value, node, ctx, marker)
        if node.func == "d":
            value = _evaluate(node.args[0], ctx)
            if isinstance(value, Fraction):
                return RawForm(quiver, 1)
            if isinstance(value, PathAlgebraElement):
                return raw_d_of_element(value)
            if isinstance(value, RawForm):
                if value.degree >= 2:
                    raise _err("d of a 2-form needs degree 3, which is not stored", node)
                return value.d()
            if isinstance(value, Necklace):
                return d0(value)
            if isinstance(value, OneForm):
                return d1(value)
            raise _err(f"cannot differentiate a {type(value).__name__}", node)
        # i / L take a derivation and a form
        theta = _evaluate(node.args[0], ctx)
        if not isinstance(theta, Derivation):
            raise _err(f"{node.func} expects a derivation first argument", node)
        value = _evaluate(node.args[1], ctx)
        if isinstance(value, RawForm):
            value = value.project()
        if isinstance(value, PathAlgebraElement):
            if node.func == "L":
                return theta.apply(value)
            value = project_to_necklace(value)
        if not _is_form_class(value):
            raise _err(f"{node.func} expects a form argument", node)
        if node.func == "i":
            return contract(theta, value)
        return lie_derivative(theta, value)
    raise _err("unhandled expression", node)  # pragma: no cover


def parse_expression(src: str, quiver: DoubledQuiver) -> Value:
    """Parse and evaluate a DSL expression over the given doubled quiver."""
    tokens = tokenize(src)
    tree = Parser(tokens).parse()
    ctx = _EvalContext(quiver)
    return _evaluate(tree, ctx)


def coerce(value: Value, kind: str, quiver: DoubledQuiver):
    """Coerce an evaluated value to the kind a CLI command expects."""
    if kind == "necklace":
        if isinstance(value, Fraction):
            value = PathAlgebraElement.unit(quiver).scale(value)
        if isinstance(value, RawForm) and value.degree == 0:
            value = value.project()
        if isinstance(value, PathAlgebraElement):
            value = project_to_necklace(value)
        if not isinstance(value, Necklace):
            raise ParseError(f"expected a necklace, got a {type(value).__name__}", 1, 1)
        return value
    if kind == "element":
        if isinstance(value, Fraction):
            value = PathAlgebraElement.unit(quiver).scale(value)
        if not isinstance(value, PathAlgebraElement):
            raise ParseError(f"expected a path-algebra element, got a {type(value).__name__}", 1, 1)
        return value
    if kind == "oneform":
        if isinstance(value, RawForm) and value.degree == 1:
            value = value.project()
        if not isinstance(value, OneForm):
            raise ParseError(f"expected a 1-form, got a {type(value).__name__}", 1, 1)
        return value
    if kind == "twoform":
        if isinstance(value, RawForm) and value.degree == 2:
            value = value.project()
        if not isinstance(value, TwoForm):
            raise ParseError(f"expected a 2-form, got a {type(value).__name__}", 1, 1)
        return value
    if kind == "derivation":
        if not isinstance(value, Derivation):
            raise ParseError(f"expected a derivation, got a {type(value).__name__}", 1, 1)
        return value
    raise ValueError(f"unknown coercion target {kind!r}")
