###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Text language for densities and operators.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ['^' int | '^(' int ')']
    atom   := integer | ident | ident quotes | 'd' | '(' expr ')'
    matrix := '[' '[' expr (',' expr)* ']' (',' '[' ... ']')* ']'

Jets are written with primes (``u''``) or as ``u^(n)`` with n >= 0. The total
derivative is ``d``; ``*`` is composition as soon as one side is an operator.
"""
# stdlib
from dataclasses import dataclass, field
import logging
from typing import Sequence, Tuple, Union

# third-party
import pyparsing as pp
import sympy

# package
from pvakit.const import PvakitError
from pvakit.diffalg import DiffAlgebra, normalize
from pvakit.psdo import OpMatrix, Psdo
from pvakit.ratop import (
    RationalOp,
    StringOp,
    frac_add,
    frac_inverse,
    frac_mul,
    frac_neg,
    fraction_matrix,
    from_diffop,
    reduce_scalar,
)

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)


class DslError(PvakitError):
    pass


class DslSyntaxError(DslError):
    def __init__(self, text: str, loc: int, msg: str):
        self.text = text
        self.loc = loc
        super().__init__(f"Syntax error at position {loc} in '{text}': {msg}")


class UnknownIdentifier(DslError):
    def __init__(self, name: str, loc: int = -1):
        self.name = name
        self.loc = loc
        where = f" at position {loc}" if loc >= 0 else ""
        super().__init__(f"Unknown identifier '{name}'{where}")


class InverseNotAllowed(DslError):
    def __init__(self, what: str):
        super().__init__(f"Inverses are not allowed in {what}")


# -- syntax tree --


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    name: str
    loc: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Jet:
    name: str
    order: int
    loc: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class D:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Sum:
    terms: Tuple["Node", ...]


@dataclass(frozen=True)
class Product:
    """First factor, then (operator, factor) pairs with operator '*' or '/'."""

    first: "Node"
    rest: Tuple[Tuple[str, "Node"], ...]


@dataclass(frozen=True)
class Power:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Matrix:
    rows: Tuple[Tuple["Node", ...], ...]


Node = Union[Num, Name, Jet, D, Neg, Sum, Product, Power, Matrix]


class _Exponent:
    def __init__(self, value: int, paren: bool):
        self.value = value
        self.paren = paren


def _ident(s, loc, toks):
    text = toks[0]
    name = text.rstrip("'")
    primes = len(text) - len(name)
    if name == "d":
        if primes:
            raise pp.ParseFatalException(s, loc, "the derivative d cannot carry primes")
        return D()
    return Jet(name, primes, loc) if primes else Name(name, loc)


def _factor(toks):
    base = toks[0]
    if len(toks) == 1:
        return base
    exp = toks[1]
    if isinstance(base, Name) and exp.paren and exp.value >= 0:
        return Jet(base.name, exp.value, base.loc) if exp.value else base
    return Power(base, exp.value)


def _term(toks):
    if len(toks) == 1:
        return toks[0]
    rest = tuple((toks[i], toks[i + 1]) for i in range(1, len(toks), 2))
    return Product(toks[0], rest)


def _expr(toks):
    toks = list(toks)
    negate_first = False
    if toks[0] in ("-", "+"):
        negate_first = toks[0] == "-"
        toks = toks[1:]
    first = Neg(toks[0]) if negate_first else toks[0]
    if len(toks) == 1:
        return first
    terms = [first]
    for i in range(1, len(toks), 2):
        terms.append(Neg(toks[i + 1]) if toks[i] == "-" else toks[i + 1])
    return Sum(tuple(terms))


def _matrix(toks):
    return Matrix(tuple(tuple(row) for row in toks))


def make_grammar() -> pp.ParserElement:
    integer = pp.Regex(r"\d+").set_parse_action(lambda t: Num(int(t[0])))
    signed = pp.Regex(r"-?\d+").set_parse_action(lambda t: int(t[0]))
    ident = pp.Regex(r"[A-Za-z][A-Za-z0-9]*'*").set_parse_action(_ident)
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    exp_paren = (pp.Suppress("^") + lpar + signed + rpar).set_parse_action(
        lambda t: _Exponent(t[0], True)
    )
    exp_plain = (pp.Suppress("^") + signed).set_parse_action(lambda t: _Exponent(t[0], False))

    expr = pp.Forward()
    atom = integer | ident | (lpar + expr + rpar)
    factor = (atom + pp.Optional(exp_paren | exp_plain)).set_parse_action(_factor)
    term = (factor + pp.ZeroOrMore(pp.one_of("* /") + factor)).set_parse_action(_term)
    expr <<= (
        pp.Optional(pp.one_of("- +")) + term + pp.ZeroOrMore(pp.one_of("+ -") + term)
    ).set_parse_action(_expr)

    row = pp.Group(pp.Suppress("[") + pp.DelimitedList(expr) + pp.Suppress("]"))
    matrix = (pp.Suppress("[") + pp.DelimitedList(row) + pp.Suppress("]")).set_parse_action(
        _matrix
    )
    return (matrix | expr) + pp.StringEnd()


_grammar = None


def parse(text: str) -> Node:
    """Parse text into a syntax tree.

    Raises:
        DslSyntaxError: with the position of the first problem
    """
    global _grammar
    if _grammar is None:
        _grammar = make_grammar()
    try:
        result = _grammar.parse_string(text, parse_all=True)
    except pp.ParseBaseException as err:
        raise DslSyntaxError(text, err.loc, err.msg)
    node = result[0]
    if isinstance(node, Matrix):
        widths = {len(r) for r in node.rows}
        if len(widths) != 1:
            raise DslSyntaxError(text, 0, f"rows of unequal length {sorted(widths)}")
    return node


# -- printing --

_SUM, _PRODUCT, _POWER, _ATOM = 1, 2, 3, 4


def _prec(node: Node) -> int:
    if isinstance(node, (Sum, Neg)):
        return _SUM
    if isinstance(node, Product):
        return _PRODUCT
    if isinstance(node, Power):
        return _POWER
    return _ATOM


def _wrapped(node: Node, above: int) -> str:
    text = print_ast(node)
    return f"({text})" if _prec(node) <= above else text


def print_ast(node: Node) -> str:
    """Canonical text of a syntax tree; `parse` reads it back to an equal tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Jet):
        return node.name + "'" * node.order if node.order <= 3 else f"{node.name}^({node.order})"
    if isinstance(node, D):
        return "d"
    if isinstance(node, Neg):
        return "-" + _wrapped(node.arg, _SUM)
    if isinstance(node, Sum):
        first = node.terms[0]
        parts = [f"({print_ast(first)})" if isinstance(first, Sum) else print_ast(first)]
        for t in node.terms[1:]:
            if isinstance(t, Neg):
                parts.append(" - " + _wrapped(t.arg, _SUM))
            else:
                parts.append(" + " + _wrapped(t, _SUM))
        return "".join(parts)
    if isinstance(node, Product):
        text = _wrapped(node.first, _SUM)
        for op, f in node.rest:
            text += f"{op}{_wrapped(f, _PRODUCT)}"
        return text
    if isinstance(node, Power):
        base = _wrapped(node.base, _POWER)
        return f"{base}^{node.exp}" if node.exp >= 0 else f"{base}^({node.exp})"
    if isinstance(node, Matrix):
        rows = ("[" + ", ".join(print_ast(e) for e in row) + "]" for row in node.rows)
        return "[" + ", ".join(rows) + "]"
    raise TypeError(f"Not a syntax tree node: {node!r}")


# -- compilation --


class _Ring:
    """Operator arithmetic used while compiling; functions stay sympy expressions."""

    what = "functions"

    def __init__(self, alg: DiffAlgebra):
        self.alg = alg

    def d(self):
        raise DslError("The derivative d cannot appear in a function")


class _DiffRing(_Ring):
    what = "differential operators"

    def lift(self, f) -> Psdo:
        return Psdo.function(self.alg, f)

    def d(self) -> Psdo:
        return Psdo.d(self.alg)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a.compose(b)

    def inverse(self, a):
        raise InverseNotAllowed(self.what)


class _FractionRing(_Ring):
    what = "rational operators"

    def lift(self, f) -> RationalOp:
        return from_diffop(Psdo.function(self.alg, f))

    def d(self) -> RationalOp:
        return from_diffop(Psdo.d(self.alg))

    def add(self, a, b):
        return reduce_scalar(frac_add(a, b))

    def neg(self, a):
        return frac_neg(a)

    def mul(self, a, b):
        return reduce_scalar(frac_mul(a, b))

    def inverse(self, a):
        return frac_inverse(a)


def _is_function(value) -> bool:
    return isinstance(value, sympy.Basic)


class Compiler:
    """Turns syntax trees into expressions and operators over one algebra."""

    def __init__(self, alg: DiffAlgebra):
        self.alg = alg

    def _leaf(self, node: Node):
        alg = self.alg
        if isinstance(node, Num):
            return sympy.Integer(node.value)
        if isinstance(node, Name):
            if node.name in alg.variables:
                return alg.jet(alg.variables.index(node.name))
            if node.name in alg.constant_symbols:
                return alg.constant_symbols[node.name]
            raise UnknownIdentifier(node.name, node.loc)
        if node.name in alg.variables:
            return alg.jet(alg.variables.index(node.name), node.order)
        raise UnknownIdentifier(node.name + "'" * node.order, node.loc)

    def _eval(self, node: Node, ring: _Ring):
        if isinstance(node, (Num, Name, Jet)):
            return self._leaf(node)
        if isinstance(node, D):
            return ring.d()
        if isinstance(node, Neg):
            v = self._eval(node.arg, ring)
            return -v if _is_function(v) else ring.neg(v)
        if isinstance(node, Sum):
            total = self._eval(node.terms[0], ring)
            for t in node.terms[1:]:
                v = self._eval(t, ring)
                if _is_function(total) and _is_function(v):
                    total = total + v
                else:
                    total = ring.add(self._op(total, ring), self._op(v, ring))
            return total
        if isinstance(node, Product):
            acc = self._eval(node.first, ring)
            for op, f in node.rest:
                v = self._eval(f, ring)
                if op == "/":
                    if _is_function(v):
                        if v == 0:
                            raise DslError("Division by zero")
                        v = 1 / v
                    else:
                        v = ring.inverse(v)
                if _is_function(acc) and _is_function(v):
                    acc = acc * v
                else:
                    acc = ring.mul(self._op(acc, ring), self._op(v, ring))
            return acc
        if isinstance(node, Power):
            v = self._eval(node.base, ring)
            if _is_function(v):
                return v**node.exp
            if node.exp < 0:
                v = ring.inverse(v)
            result = ring.lift(sympy.Integer(1))
            for _ in range(abs(node.exp)):
                result = ring.mul(result, v)
            return result
        raise DslError(f"Matrix found where a single entry was expected: {print_ast(node)}")

    @staticmethod
    def _op(value, ring: _Ring):
        return ring.lift(value) if _is_function(value) else value

    def _entries(self, node: Matrix, ring: _Ring) -> list:
        return [[self._op(self._eval(e, ring), ring) for e in row] for row in node.rows]

    def expression(self, node: Node) -> sympy.Expr:
        """A differential function."""
        return normalize(self._eval(node, _Ring(self.alg)))

    def differential(self, node: Node) -> OpMatrix:
        """An exact differential operator or matrix of them; no inverses."""
        ring = _DiffRing(self.alg)
        if isinstance(node, Matrix):
            return OpMatrix(self.alg, self._entries(node, ring))
        return OpMatrix.scalar(self._op(self._eval(node, ring), ring))

    def rational(self, node: Node) -> RationalOp:
        """A rational operator, scalar or matrix, as a right fraction."""
        ring = _FractionRing(self.alg)
        if isinstance(node, Matrix):
            entries = self._entries(node, ring)
            if all(e.is_differential() for row in entries for e in row):
                rows = [[e.A[0, 0] for e in row] for row in entries]
                return from_diffop(OpMatrix(self.alg, rows))
            return fraction_matrix(entries)
        return self._op(self._eval(node, ring), ring)


def compile_expression(alg: DiffAlgebra, text: str) -> sympy.Expr:
    return Compiler(alg).expression(parse(text))


def compile_vector(alg: DiffAlgebra, texts: Sequence[str]) -> Tuple[sympy.Expr, ...]:
    return tuple(compile_expression(alg, t) for t in texts)


def compile_differential(alg: DiffAlgebra, text: str) -> OpMatrix:
    return Compiler(alg).differential(parse(text))


def compile_operator(alg: DiffAlgebra, text: str) -> RationalOp:
    _log.debug(f"Compile operator '{text}'")
    return Compiler(alg).rational(parse(text))


def compile_string(
    alg: DiffAlgebra, strings: Sequence[Sequence[str]], differential: str = "0"
) -> StringOp:
    """Weakly non-local operator from its local part and (a, b) pairs."""
    local = compile_differential(alg, differential)
    if local.shape != (1, 1):
        raise DslError("String operators are scalar")
    pairs = [(compile_expression(alg, a), compile_expression(alg, b)) for a, b in strings]
    return StringOp(alg, local[0, 0], pairs)
