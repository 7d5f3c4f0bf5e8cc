###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Algebra of differential functions.

Elements of the differential field are plain sympy expressions kept in
`sympy.cancel` normal form. Jet variables u_i^(n) are sympy symbols named
`<variable>_<n>`; named constants are ordinary symbols. The spectral
parameters `LAM` and `MU` are constants for the total derivative.

The `DiffAlgebra` class carries the variable and constant names and implements the
differential calculus: total derivative, partial derivatives, variational and
Frechet derivatives, antiderivatives and homotopy reconstruction of local
functionals.
"""
# stdlib
from dataclasses import dataclass
from functools import lru_cache
import logging
import re
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

# third-party
import sympy
from sympy.printing.str import StrPrinter

# package
from pvakit.const import PvakitError

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)

#: Spectral parameters of lambda-brackets
LAM = sympy.Symbol("λ")
MU = sympy.Symbol("μ")

Vector = Tuple[sympy.Expr, ...]

NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")
JET_RE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)_(\d+)$")
RESERVED = frozenset(("d", "xi", "O"))


class NotExact(PvakitError):
    def __init__(self, f, reason=""):
        self.f = f
        extra = f": {reason}" if reason else ""
        super().__init__(f"Not a total derivative: {f}{extra}")


class NotClosed(PvakitError):
    def __init__(self, xi):
        self.xi = xi
        super().__init__(f"Covector is not closed (Frechet derivative not self-adjoint): {xi}")


class NonPolynomial(PvakitError):
    def __init__(self, what):
        super().__init__(f"Jet variables appear in a denominator: {what}")


class UnsupportedDensity(PvakitError):
    def __init__(self, f):
        super().__init__(
            f"Canonical densities are only defined for polynomials, got: {f}"
        )


class BadName(PvakitError):
    def __init__(self, name, why):
        super().__init__(f"Invalid name '{name}': {why}")


@lru_cache(maxsize=4096)
def _parse_jet_name(name: str) -> Optional[Tuple[str, int]]:
    m = JET_RE.match(name)
    if m is None:
        return None
    return m.group(1), int(m.group(2))


def normalize(f) -> sympy.Expr:
    """Canonical reduced form of an element of the field of fractions."""
    return sympy.cancel(sympy.sympify(f))


def is_zero(f) -> bool:
    return normalize(f) == 0


class DiffAlgebra:
    """Algebra of differential functions in the variables u_1..u_l, over Q(c_1..c_k).

    Args:
        variables: Names of the differential variables, e.g. ``["u", "v"]``
        constants: Names of the transcendental constants, e.g. ``["c"]``
    """

    def __init__(self, variables: Sequence[str], constants: Sequence[str] = ()):
        variables, constants = tuple(variables), tuple(constants)
        if len(variables) < 1:
            raise BadName("", "at least one differential variable is required")
        seen = set()
        for name in variables + constants:
            if not NAME_RE.match(name):
                raise BadName(name, "must be a letter followed by letters or digits")
            if name in RESERVED:
                raise BadName(name, "reserved")
            if name in seen:
                raise BadName(name, "duplicate")
            seen.add(name)
        self.variables = variables
        self.constants = constants
        self._index = {name: i for i, name in enumerate(variables)}
        self.constant_symbols = {name: sympy.Symbol(name) for name in constants}

    def __eq__(self, other):
        return (
            isinstance(other, DiffAlgebra)
            and self.variables == other.variables
            and self.constants == other.constants
        )

    def __hash__(self):
        return hash((self.variables, self.constants))

    def __repr__(self):
        return f"DiffAlgebra(variables={list(self.variables)}, constants={list(self.constants)})"

    @property
    def ell(self) -> int:
        return len(self.variables)

    # -- jets --

    def jet(self, i: int, n: int = 0) -> sympy.Symbol:
        """Jet variable u_i^(n), with 0-based variable index."""
        if n < 0:
            raise ValueError(f"Negative derivative order {n}")
        return sympy.Symbol(f"{self.variables[i]}_{n}")

    def jet_info(self, sym) -> Optional[Tuple[int, int]]:
        """(variable index, order) of a jet symbol, or None for anything else."""
        if not isinstance(sym, sympy.Symbol):
            return None
        parsed = _parse_jet_name(sym.name)
        if parsed is None or parsed[0] not in self._index:
            return None
        return self._index[parsed[0]], parsed[1]

    def jets_of(self, f) -> List[Tuple[int, int]]:
        """Sorted (variable, order) pairs of the jets appearing in `f`."""
        found = []
        for s in sympy.sympify(f).free_symbols:
            info = self.jet_info(s)
            if info is not None:
                found.append(info)
        return sorted(found)

    def jet_symbols(self, f) -> List[sympy.Symbol]:
        return [self.jet(i, n) for i, n in self.jets_of(f)]

    def order(self, f) -> Optional[int]:
        """Differential order of `f`; None stands for minus infinity (quasiconstants)."""
        jets = self.jets_of(f)
        return max(n for _, n in jets) if jets else None

    def is_polynomial(self, f) -> bool:
        _, den = sympy.fraction(normalize(f))
        return not self.jets_of(den)

    def constant_term(self, f) -> sympy.Expr:
        f = sympy.sympify(f)
        return normalize(f.xreplace({s: 0 for s in self.jet_symbols(f)}))

    def zero_vector(self) -> Vector:
        return tuple(sympy.Integer(0) for _ in range(self.ell))

    # -- calculus --

    def total_derivative(self, f, times: int = 1) -> sympy.Expr:
        """The derivation sending u_i^(n) to u_i^(n+1)."""
        f = sympy.sympify(f)
        for _ in range(times):
            terms = []
            for i, n in self.jets_of(f):
                terms.append(sympy.diff(f, self.jet(i, n)) * self.jet(i, n + 1))
            f = normalize(sympy.Add(*terms))
        return f

    def partial(self, f, i: int, n: int) -> sympy.Expr:
        return normalize(sympy.diff(sympy.sympify(f), self.jet(i, n)))

    def variational_derivative(self, f) -> Vector:
        """Vector of variational derivatives sum_n (-d)^n df/du_i^(n)."""
        f = sympy.sympify(f)
        jets = self.jets_of(f)
        result = []
        for i in range(self.ell):
            orders = [n for j, n in jets if j == i]
            total = sympy.Integer(0)
            for n in range(max(orders) + 1 if orders else 0):
                term = self.partial(f, i, n)
                if term != 0:
                    total += (-1) ** n * self.total_derivative(term, n)
            result.append(normalize(total))
        return tuple(result)

    def frechet(self, X: Sequence):
        """Frechet derivative D_X as an exact matrix differential operator (len(X) x l)."""
        from pvakit.psdo import OpMatrix, Psdo

        rows = []
        for x in X:
            row = []
            jets = self.jets_of(x)
            for j in range(self.ell):
                coeffs = {n: self.partial(x, j, n) for jj, n in jets if jj == j}
                row.append(Psdo(self, coeffs))
            rows.append(row)
        return OpMatrix(self, rows)

    def frechet_adjoint(self, X: Sequence):
        """Adjoint D*_X, an l x len(X) matrix differential operator."""
        return self.frechet(X).adjoint()

    def is_closed(self, xi: Sequence) -> bool:
        if len(xi) != self.ell:
            raise ValueError(f"Covector length {len(xi)} != {self.ell}")
        return self.frechet(xi).equals_exactly(self.frechet_adjoint(xi))

    def antiderivative(self, f) -> sympy.Expr:
        """Return g with total_derivative(g) == f and zero constant term.

        Integrates the highest jet (then the first variable among the highest) with
        respect to the jet one order below, subtracts, and repeats.

        Raises:
            NotExact: if `f` is not a total derivative within the field
        """
        f = normalize(f)
        g = sympy.Integer(0)
        remaining = f
        while remaining != 0:
            jets = self.jets_of(remaining)
            if not jets:
                raise NotExact(f, "nonzero constant remainder")
            top = max(n for _, n in jets)
            if top == 0:
                raise NotExact(f, "remainder has differential order 0")
            i = min(j for j, n in jets if n == top)
            s_top, s_below = self.jet(i, top), self.jet(i, top - 1)
            a = sympy.diff(remaining, s_top)
            if sympy.diff(a, s_top) != 0:
                raise NotExact(f, f"non-linear in {s_top}")
            a = normalize(a)
            if any(n >= top for _, n in self.jets_of(a)):
                raise NotExact(f, f"coefficient of {s_top} has order >= {top}")
            g1 = sympy.integrate(a, s_below)
            if g1.has(sympy.Integral) or not g1.is_rational_function(
                *g1.free_symbols
            ):
                raise NotExact(f, "antiderivative leaves the field of fractions")
            g1 = normalize(g1)
            g = g + g1
            remaining = normalize(remaining - self.total_derivative(g1))
        g = normalize(g)
        return normalize(g - self.constant_term(g)) if self.is_polynomial(g) else g

    def homotopy_reconstruct(self, xi: Sequence) -> "LocalFunctional":
        """Density h with variational derivative `xi`, by the radial homotopy.

        Raises:
            NonPolynomial: if `xi` has jet variables in a denominator
            NotClosed: if `xi` is not closed
        """
        xi = tuple(normalize(x) for x in xi)
        for x in xi:
            if not self.is_polynomial(x):
                raise NonPolynomial(x)
        if not self.is_closed(xi):
            raise NotClosed(xi)
        t = sympy.Dummy("t")
        h = sympy.Integer(0)
        for i, x in enumerate(xi):
            scaled = sympy.expand(
                self.jet(i, 0)
                * x.xreplace({s: t * s for s in self.jet_symbols(x)})
            )
            if scaled == 0:
                continue
            poly = sympy.Poly(scaled, t)
            for (k,), coeff in poly.terms():
                h += coeff / (k + 1)
        return LocalFunctional(self, normalize(h))

    def functional_normalize(self, f) -> sympy.Expr:
        """Deterministic representative of the class of `f` modulo total derivatives.

        Raises:
            UnsupportedDensity: for densities with jet variables in a denominator
        """
        f = normalize(f)
        if not self.is_polynomial(f):
            raise UnsupportedDensity(f)
        xi = self.variational_derivative(f)
        h = self.homotopy_reconstruct(xi).density
        return normalize(h + self.constant_term(f))

    def functional_equal(self, f, g) -> bool:
        diff = normalize(sympy.sympify(f) - sympy.sympify(g))
        if any(x != 0 for x in self.variational_derivative(diff)):
            return False
        if not self.is_polynomial(diff):
            _log.debug("Rational density: equality decided by variational derivative only")
            return True
        return self.constant_term(diff) == 0

    def pairing(self, F: Sequence, P: Sequence) -> "LocalFunctional":
        """(F|P) = integral of F.P"""
        if len(F) != len(P):
            raise ValueError(f"Length mismatch {len(F)} != {len(P)}")
        return LocalFunctional(self, normalize(sum(a * b for a, b in zip(F, P))))

    def apply(self, op, vector: Sequence) -> Vector:
        """Apply a matrix differential operator to a vector of functions."""
        return op.apply(vector)

    def ev_bracket(self, P: Sequence, Q: Sequence) -> Vector:
        """Lie bracket of evolutionary vector fields, D_Q(d)P - D_P(d)Q."""
        a = self.frechet(Q).apply(P)
        b = self.frechet(P).apply(Q)
        return tuple(normalize(x - y) for x, y in zip(a, b))

    def courant_dorfman(
        self, first: Tuple[Sequence, Sequence], second: Tuple[Sequence, Sequence]
    ) -> Tuple[Vector, Vector]:
        """Courant-Dorfman product of (F, P) and (G, Q)."""
        (F, P), (G, Q) = first, second
        parts = (
            self.frechet(G).apply(P),
            self.frechet_adjoint(P).apply(G),
            tuple(-x for x in self.frechet(F).apply(Q)),
            self.frechet_adjoint(F).apply(Q),
        )
        covector = tuple(normalize(sum(col)) for col in zip(*parts))
        return covector, self.ev_bracket(P, Q)

    def random_density(
        self, rng, degree: int = 3, max_order: int = 2, terms: int = 3
    ) -> sympy.Expr:
        """Random polynomial density in at most two variables, for identity checks.

        Args:
            rng: A `random.Random` instance
        """
        jets = [self.jet(i, n) for i in range(min(self.ell, 2)) for n in range(max_order + 1)]
        total = sympy.Integer(0)
        for _ in range(terms):
            monomial = sympy.Mul(*(rng.choice(jets) for _ in range(rng.randint(1, degree))))
            total += (rng.randint(-3, 3) or 1) * monomial
        return sympy.expand(total)

    # -- linear algebra over the constants --

    def coefficient_equations(self, exprs: Iterable, extra: Sequence = ()) -> List:
        """Split expressions into the coefficients of their jet monomials.

        Each expression is put over a common denominator; the numerator vanishes
        identically iff all returned coefficients vanish. Symbols in `extra` are
        treated like jet variables.
        """
        equations = []
        for e in exprs:
            num, _ = sympy.fraction(sympy.together(sympy.sympify(e)))
            num = sympy.expand(num)
            if num == 0:
                continue
            gens = self.jet_symbols(num) + [s for s in extra if num.has(s)]
            if not gens:
                equations.append(num)
                continue
            equations.extend(sympy.Poly(num, *gens).coeffs())
        return equations

    def solve_constants(
        self, exprs: Iterable, unknowns: Sequence[sympy.Symbol], extra: Sequence = ()
    ) -> Optional[Dict[sympy.Symbol, sympy.Expr]]:
        """Values of `unknowns` (elements of the constant field) making every expression
        vanish identically, or None. Free unknowns are set to zero."""
        equations = self.coefficient_equations(exprs, extra=extra)
        if not equations:
            return {u: sympy.Integer(0) for u in unknowns}
        solutions = sympy.linsolve(equations, list(unknowns))
        if not solutions:
            return None
        values = next(iter(solutions))
        free = {u: 0 for u in unknowns}
        return {u: normalize(v.xreplace(free)) for u, v in zip(unknowns, values)}


@dataclass(frozen=True)
class LocalFunctional:
    """Class of a density modulo total derivatives (and nothing else)."""

    alg: DiffAlgebra
    density: sympy.Expr

    def normalized(self) -> "LocalFunctional":
        return LocalFunctional(self.alg, self.alg.functional_normalize(self.density))

    def equals(self, other) -> bool:
        other_density = other.density if isinstance(other, LocalFunctional) else other
        return self.alg.functional_equal(self.density, other_density)

    def is_zero(self) -> bool:
        return self.equals(0)

    def variational_derivative(self) -> Vector:
        return self.alg.variational_derivative(self.density)


class _TextPrinter(StrPrinter):
    """Prints expressions in the operator language: primes for jets, ^ for powers."""

    def __init__(self, alg: DiffAlgebra, **settings):
        super().__init__(settings)
        self._alg = alg

    def _print_Symbol(self, expr):
        info = self._alg.jet_info(expr)
        if info is None:
            return expr.name
        i, n = info
        name = self._alg.variables[i]
        return name + "'" * n if n <= 3 else f"{name}^({n})"

    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational=rational).replace("**", "^")


def to_text(alg: DiffAlgebra, f) -> str:
    """Expression text, e.g. ``u*u'' + 2*u'^2``."""
    return _TextPrinter(alg, order="lex").doprint(sympy.sympify(f))


def to_tree(alg: DiffAlgebra, f) -> Dict:
    """JSON tree form ``{op, args}`` of an expression."""
    f = sympy.sympify(f)
    if isinstance(f, sympy.Symbol):
        info = alg.jet_info(f)
        if info is not None:
            return {"op": "jet", "var": alg.variables[info[0]], "order": info[1]}
        return {"op": "const", "name": f.name}
    if isinstance(f, sympy.Rational):
        return {"op": "num", "value": str(f)}
    return {"op": type(f).__name__, "args": [to_tree(alg, a) for a in f.args]}
