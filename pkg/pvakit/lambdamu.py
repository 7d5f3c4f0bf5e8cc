###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Lambda symbols and the space of rational functions in two spectral variables.

A `LamMuElement` is a finite sum of terms f * lam^a * mu^b * (lam+mu)^-c, kept in a
canonical basis per total degree d: with t = mu/lam, every homogeneous part is
lam^d R(t) and R(t) is split into powers t^i and negative powers (1+t)^-j.

A `DoubleSeries` holds a window of the expansion of such an element in one of the
six directions (outer variable, inner variable); `reconstruct_from_window` recovers
the canonical element from enough window entries, which makes finite zero tests
rigorous.
"""
# stdlib
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import logging
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

# third-party
import sympy

# package
from pvakit.const import PvakitError
from pvakit.diffalg import LAM, MU, DiffAlgebra, normalize, to_text
from pvakit.psdo import Psdo
from pvakit.util import resolve_floor

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)

NU = sympy.Symbol("ν")

#: A lambda symbol is a pseudodifferential operator read as a series in lam.
LambdaSymbol = Psdo

Direction = Tuple[str, str]
DIRECTIONS: Tuple[Direction, ...] = (
    ("mu", "lam"),
    ("lam", "mu"),
    ("lam", "nu"),
    ("nu", "lam"),
    ("mu", "nu"),
    ("nu", "mu"),
)

# (sign, a, p, q) stands for sign * z^a (1+z)^p (1-z)^q, with z = inner/outer.
# Columns: t = mu/lam, 1 + t, lam/outer.
_ONE = (1, 0, 0, 0)
_FORWARD = {
    ("mu", "lam"): ((1, -1, 0, 0), (1, -1, 1, 0), (1, 1, 0, 0)),
    ("lam", "mu"): ((1, 1, 0, 0), (1, 0, 1, 0), _ONE),
    ("lam", "nu"): ((-1, 0, 0, 1), (1, 1, 0, 0), _ONE),
    ("nu", "lam"): ((1, -1, 0, 1), (1, -1, 0, 0), (1, 1, 0, 0)),
    ("mu", "nu"): ((-1, 0, 0, -1), (-1, 1, 0, -1), (-1, 0, 0, 1)),
    ("nu", "mu"): ((1, 1, 0, -1), (1, 0, 0, -1), (1, 0, 0, 1)),
}

# sigma, then (sign, alpha, beta) = sign * t^alpha (1+t)^beta for z, 1 + sigma z and
# lam/outer. 1 + sigma z vanishes where the variable not in the direction does.
_INVERSE = {
    ("mu", "lam"): (1, (1, -1, 0), (1, -1, 1), (1, -1, 0)),
    ("lam", "mu"): (1, (1, 1, 0), (1, 0, 1), (1, 0, 0)),
    ("lam", "nu"): (-1, (1, 0, 1), (-1, 1, 0), (1, 0, 0)),
    ("nu", "lam"): (-1, (1, 0, -1), (1, 1, -1), (1, 0, -1)),
    ("mu", "nu"): (-1, (1, -1, 1), (-1, -1, 0), (1, -1, 0)),
    ("nu", "mu"): (-1, (1, 1, -1), (1, 0, -1), (1, 0, -1)),
}


class Inconsistent(PvakitError):
    def __init__(self, degree, detail):
        self.degree = degree
        super().__init__(f"Window entries of degree {degree} do not fit the bounds: {detail}")


class WindowTooSmall(PvakitError):
    def __init__(self, degree, detail):
        self.degree = degree
        super().__init__(f"Window of degree {degree} is too small: {detail}")


class FloorExceeded(PvakitError):
    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(
            f"Requested validity floor {requested} is below the available floor {available}"
        )


class ZeroTest(Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Bounds:
    """Claimed shape of one homogeneous part: t^i for -M <= i <= N, (1+t)^-j for j <= P."""

    M: int
    N: int
    P: int


# -- canonical decomposition --

Key = Tuple[str, int]


@lru_cache(maxsize=None)
def _decompose(a: int, e: int) -> Tuple[Tuple[Key, sympy.Rational], ...]:
    """t^a (1+t)^e in the basis t^i, (1+t)^-j (j >= 1)."""
    out: Dict[Key, sympy.Rational] = defaultdict(lambda: sympy.Integer(0))
    if e >= 0:
        for k in range(e + 1):
            out[("t", a + k)] += sympy.binomial(e, k)
    elif a >= 0:
        # t^a = ((1+t) - 1)^a
        for k in range(a + 1):
            c = sympy.binomial(a, k) * (-1) ** (a - k)
            if k + e >= 0:
                for key, v in _decompose(0, k + e):
                    out[key] += c * v
            else:
                out[("nu", -(k + e))] += c
    else:
        # 1/(t(1+t)) = 1/t - 1/(1+t)
        for key, v in _decompose(a, e + 1):
            out[key] += v
        for key, v in _decompose(a + 1, e):
            out[key] -= v
    return tuple((k, v) for k, v in sorted(out.items()) if v != 0)


def _raw_of(d: int, key: Key) -> Tuple[int, int, int]:
    """(a, b, e) of the basis monomial lam^a mu^b nu^e."""
    kind, idx = key
    if kind == "t":
        return d - idx, idx, 0
    return d + idx, 0, -idx


class LamMuElement:
    """Canonical element of the two-variable space, optionally known only for total
    degrees >= `floor`.

    Args:
        alg: Algebra of the coefficients
        terms: Map (degree, kind, index) to coefficient, kind "t" or "nu"
        floor: Lowest total degree known, or None for an exact element
    """

    __slots__ = ("alg", "terms", "floor")

    def __init__(
        self,
        alg: DiffAlgebra,
        terms: Optional[Mapping[Tuple[int, str, int], object]] = None,
        floor: Optional[int] = None,
    ):
        cleaned = {}
        for key, c in (terms or {}).items():
            if floor is not None and key[0] < floor:
                continue
            c = normalize(c)
            if c != 0:
                cleaned[key] = c
        self.alg = alg
        self.terms: Dict[Tuple[int, str, int], sympy.Expr] = cleaned
        self.floor = floor

    @classmethod
    def from_raw(
        cls, alg: DiffAlgebra, raw: Iterable[Tuple[object, int, int, int]], floor=None
    ) -> "LamMuElement":
        """Canonical form of sum coeff * lam^a mu^b nu^e."""
        acc = defaultdict(list)
        for coeff, a, b, e in raw:
            d = a + b + e
            for (kind, idx), v in _decompose(b, e):
                acc[(d, kind, idx)].append(v * coeff)
        return cls(alg, {k: sympy.Add(*cs) for k, cs in acc.items()}, floor)

    @classmethod
    def from_expr(cls, alg: DiffAlgebra, expr) -> "LamMuElement":
        """Element from a Laurent polynomial in LAM, MU and NU (standing for lam + mu)."""
        raw = []
        for term in sympy.Add.make_args(sympy.expand(sympy.sympify(expr))):
            coeff, rest = term.as_independent(LAM, MU, NU, as_Add=False)
            powers = rest.as_powers_dict() if rest != 1 else {}
            exps = [int(powers.get(s, 0)) for s in (LAM, MU, NU)]
            raw.append((coeff, *exps))
        return cls.from_raw(alg, raw)

    def to_raw(self) -> List[Tuple[sympy.Expr, int, int, int]]:
        return [(c, *_raw_of(d, (kind, idx))) for (d, kind, idx), c in self.terms.items()]

    def degrees(self) -> List[int]:
        return sorted({d for d, _, _ in self.terms}, reverse=True)

    def degree_part(self, d: int) -> "LamMuElement":
        return LamMuElement(
            self.alg, {k: c for k, c in self.terms.items() if k[0] == d}
        )

    def coeff(self, d: int, kind: str, idx: int) -> sympy.Expr:
        if self.floor is not None and d < self.floor:
            raise FloorExceeded(d, self.floor)
        return self.terms.get((d, kind, idx), sympy.Integer(0))

    def is_zero(self) -> bool:
        return not self.terms

    def _floor_with(self, other: "LamMuElement") -> Optional[int]:
        floors = [f for f in (self.floor, other.floor) if f is not None]
        return max(floors) if floors else None

    def __add__(self, other: "LamMuElement") -> "LamMuElement":
        acc = defaultdict(list)
        for k, c in list(self.terms.items()) + list(other.terms.items()):
            acc[k].append(c)
        return LamMuElement(
            self.alg, {k: sympy.Add(*cs) for k, cs in acc.items()}, self._floor_with(other)
        )

    def __neg__(self) -> "LamMuElement":
        return self.scale(-1)

    def __sub__(self, other: "LamMuElement") -> "LamMuElement":
        return self + (-other)

    def scale(self, f) -> "LamMuElement":
        return LamMuElement(self.alg, {k: f * c for k, c in self.terms.items()}, self.floor)

    def __mul__(self, other: "LamMuElement") -> "LamMuElement":
        if self.floor is not None or other.floor is not None:
            raise ValueError("Products are only defined for exact elements")
        raw = []
        for c1, a1, b1, e1 in self.to_raw():
            for c2, a2, b2, e2 in other.to_raw():
                raw.append((c1 * c2, a1 + a2, b1 + b2, e1 + e2))
        return LamMuElement.from_raw(self.alg, raw)

    def equals(self, other: "LamMuElement") -> bool:
        return (self - other).is_zero()

    def to_expr(self) -> sympy.Expr:
        """Rational function in LAM and MU."""
        return sympy.Add(
            *(c * LAM**a * MU**b * (LAM + MU) ** e for c, a, b, e in self.to_raw())
        )

    def to_terms(self) -> List[dict]:
        return [
            {"coeff": to_text(self.alg, c), "lam": a, "mu": b, "nu": e}
            for c, a, b, e in sorted(
                self.to_raw(), key=lambda r: (-(r[1] + r[2] + r[3]), r[2], r[3])
            )
        ]

    def to_text(self) -> str:
        parts = []
        for term in self.to_terms():
            factors = []
            for name, sym in (("lam", "λ"), ("mu", "μ")):
                if term[name]:
                    factors.append(sym if term[name] == 1 else f"{sym}^{term[name]}")
            if term["nu"]:
                factors.append(f"(λ+μ)^{term['nu']}")
            coeff = term["coeff"]
            if not factors:
                parts.append(coeff)
            elif coeff == "1":
                parts.append("*".join(factors))
            else:
                parts.append(f"({coeff})*" + "*".join(factors))
        text = " + ".join(parts) if parts else "0"
        if self.floor is not None:
            text += f" + O(degree {self.floor - 1})"
        return text

    def __repr__(self):
        return f"LamMuElement({self.to_text()})"


def canonicalize(alg: DiffAlgebra, raw: Iterable[Tuple[object, int, int, int]]) -> LamMuElement:
    """Canonical element of a raw list of (coeff, a, b, e) for coeff lam^a mu^b (lam+mu)^e."""
    return LamMuElement.from_raw(alg, raw)


# -- expansions --


@lru_cache(maxsize=None)
def _binomial_series(P: int, Q: int, n: int) -> Tuple[int, ...]:
    """First n coefficients of (1+z)^P (1-z)^Q."""
    a = [int(sympy.binomial(P, k)) for k in range(n)]
    b = [int(sympy.binomial(Q, k)) * (-1) ** k for k in range(n)]
    return tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n))


def _power(entry, k: int):
    sign, *exps = entry
    return (sign ** abs(k), *(x * k for x in exps))


def _monomial_form(direction: Direction, d: int, key: Key) -> Tuple[int, int, int, int]:
    """(sign, A, P, Q) of a basis monomial divided by outer^d, as a function of z."""
    t_entry, one_t_entry, lam_entry = _FORWARD[direction]
    kind, idx = key
    factors = [_power(lam_entry, d)]
    factors.append(_power(t_entry, idx) if kind == "t" else _power(one_t_entry, -idx))
    sign, A, P, Q = 1, 0, 0, 0
    for s, a, p, q in factors:
        sign, A, P, Q = sign * s, A + a, P + p, Q + q
    return sign, A, P, Q


def _expand_monomial(direction: Direction, d: int, key: Key, hi: int) -> Dict[int, int]:
    """Coefficients of z^b, b <= hi, of a basis monomial of degree d."""
    sign, A, P, Q = _monomial_form(direction, d, key)
    if hi < A:
        return {}
    series = _binomial_series(P, Q, hi - A + 1)
    return {A + k: sign * c for k, c in enumerate(series) if c != 0}


@dataclass
class DoubleSeries:
    """Window of an expansion: coeffs[(d, b)] multiplies outer^(d-b) inner^b.

    For each degree d the window (lo, hi) is known; entries below lo are zero.
    """

    alg: DiffAlgebra
    direction: Direction
    coeffs: Dict[Tuple[int, int], sympy.Expr] = field(default_factory=dict)
    window: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def coeff(self, d: int, b: int) -> sympy.Expr:
        lo, hi = self.window[d]
        if b < lo:
            return sympy.Integer(0)
        if b > hi:
            raise WindowTooSmall(d, f"entry {b} beyond {hi}")
        return self.coeffs.get((d, b), sympy.Integer(0))

    def entries(self, d: int) -> List[sympy.Expr]:
        lo, hi = self.window[d]
        return [self.coeff(d, b) for b in range(lo, hi + 1)]

    def degrees(self) -> List[int]:
        return sorted(self.window, reverse=True)

    def __add__(self, other: "DoubleSeries") -> "DoubleSeries":
        if self.direction != other.direction:
            raise ValueError(f"Direction mismatch {self.direction} != {other.direction}")
        window = {}
        for d in set(self.window) & set(other.window):
            lo = min(self.window[d][0], other.window[d][0])
            hi = min(self.window[d][1], other.window[d][1])
            window[d] = (lo, hi)
        coeffs = {}
        for d, (lo, hi) in window.items():
            for b in range(lo, hi + 1):
                coeffs[(d, b)] = normalize(self.coeff(d, b) + other.coeff(d, b))
        return DoubleSeries(self.alg, self.direction, coeffs, window)


def iota_expand(E: LamMuElement, direction: Direction, length: int = 16) -> DoubleSeries:
    """Expansion of E with `length` window entries per degree, starting at the lowest
    power of the inner variable present."""
    if direction not in _FORWARD:
        raise ValueError(f"Unknown direction {direction}")
    by_degree = defaultdict(list)
    for (d, kind, idx), c in E.terms.items():
        by_degree[d].append(((kind, idx), c))
    series = DoubleSeries(E.alg, direction)
    for d, terms in by_degree.items():
        lo = min(_monomial_form(direction, d, key)[1] for key, _ in terms)
        hi = lo + length - 1
        acc = defaultdict(list)
        for key, c in terms:
            for b, v in _expand_monomial(direction, d, key, hi).items():
                acc[b].append(v * c)
        series.window[d] = (lo, hi)
        for b, vs in acc.items():
            value = normalize(sympy.Add(*vs))
            if value != 0:
                series.coeffs[(d, b)] = value
    return series


def _to_canonical(direction: Direction, d: int, b: int, pole: int):
    """Canonical terms of z^b (1 + sigma z)^-pole (lam/outer)^-d, times lam^d."""
    _, z_entry, pole_entry, lam_entry = _INVERSE[direction]
    sign, alpha, beta = 1, 0, 0
    for entry, k in ((z_entry, b), (pole_entry, -pole), (lam_entry, -d)):
        s, a, e = entry
        sign, alpha, beta = sign * s ** abs(k), alpha + a * k, beta + e * k
    return [(key, sign * v) for key, v in _decompose(alpha, beta)]


def _infer_degree(D: DoubleSeries, d: int, surplus: int, max_pole: int):
    lo, hi = D.window[d]
    g = D.entries(d)
    n = len(g)
    if n < surplus + 1:
        raise WindowTooSmall(d, f"{n} entries, need more than {surplus}")
    sigma = _INVERSE[D.direction][0]
    for P in range(max_pole + 1):
        weights = [int(sympy.binomial(P, m)) * sigma**m for m in range(P + 1)]
        prod = [
            normalize(sum(weights[m] * g[k - m] for m in range(min(P, k) + 1)))
            for k in range(n)
        ]
        if any(x != 0 for x in prod[n - surplus:]):
            continue
        acc = defaultdict(list)
        for k, value in enumerate(prod[: n - surplus]):
            if value == 0:
                continue
            for key, v in _to_canonical(D.direction, d, lo + k, P):
                acc[(d,) + key].append(v * value)
        element = LamMuElement(D.alg, {k: sympy.Add(*vs) for k, vs in acc.items()})
        _check_residual(D, d, element)
        return element
    raise WindowTooSmall(d, f"no pole order up to {max_pole} clears the window")


def _check_residual(D: DoubleSeries, d: int, element: LamMuElement):
    lo, hi = D.window[d]
    acc = defaultdict(list)
    for (_, kind, idx), c in element.terms.items():
        for b, v in _expand_monomial(D.direction, d, (kind, idx), hi).items():
            acc[b].append(v * c)
    for b, vs in acc.items():
        value = normalize(sympy.Add(*vs))
        if b < lo and value != 0:
            raise Inconsistent(d, f"reconstruction has a nonzero entry {b} below the window")
        if b >= lo and normalize(value - D.coeff(d, b)) != 0:
            raise Inconsistent(d, f"entry {b} differs after reconstruction")
    for b in range(lo, hi + 1):
        if b not in acc and D.coeff(d, b) != 0:
            raise Inconsistent(d, f"entry {b} differs after reconstruction")


def _solve_degree(D: DoubleSeries, d: int, bounds: Bounds) -> LamMuElement:
    """Solve the Pascal-type linear system for the claimed bounds."""
    lo, hi = D.window[d]
    keys = [("t", i) for i in range(-bounds.M, bounds.N + 1)]
    keys += [("nu", j) for j in range(1, bounds.P + 1)]
    columns = [_expand_monomial(D.direction, d, key, hi) for key in keys]
    start = min([lo] + [min(col) for col in columns if col])
    rows = list(range(start, hi + 1))
    matrix = sympy.Matrix(
        [[col.get(b, 0) for col in columns] for b in rows]
    )
    rhs = [D.coeff(d, b) for b in rows]
    _, independent = matrix.T.rref()
    if len(independent) < len(keys):
        raise WindowTooSmall(d, f"rank {len(independent)} < {len(keys)} unknowns")
    square = matrix.extract(list(independent), list(range(len(keys))))
    solution = square.inv() * sympy.Matrix([rhs[r] for r in independent])
    values = [normalize(v) for v in solution]
    for r, b in enumerate(rows):
        residual = sum(matrix[r, c] * values[c] for c in range(len(keys))) - rhs[r]
        if normalize(residual) != 0:
            raise Inconsistent(d, f"overdetermined row {b} disagrees")
    return LamMuElement(
        D.alg, {(d,) + key: v for key, v in zip(keys, values)}
    )


def reconstruct_from_window(
    D: DoubleSeries,
    bounds: Optional[Bounds] = None,
    surplus: int = 3,
    max_pole: int = 8,
) -> LamMuElement:
    """Canonical element with expansion D.

    With `bounds`, solves the linear system for the claimed shape. Without, the pole
    order at the third point is found as the smallest P for which (1 + sigma z)^P
    times the window ends in `surplus` zeros.

    Raises:
        WindowTooSmall: if the window cannot determine the element
        Inconsistent: if the window contradicts the bounds
    """
    result = LamMuElement(D.alg)
    for d in D.degrees():
        if bounds is not None:
            part = _solve_degree(D, d, bounds)
        else:
            part = _infer_degree(D, d, surplus, max_pole)
        result = result + part
    return result


def is_zero_window(
    D: DoubleSeries, bounds: Optional[Bounds] = None, surplus: int = 3
) -> ZeroTest:
    for d in D.degrees():
        if any(x != 0 for x in D.entries(d)):
            return ZeroTest.NONZERO
    for d in D.degrees():
        if bounds is not None:
            try:
                _solve_degree(D, d, bounds)
            except WindowTooSmall:
                return ZeroTest.UNDETERMINED
        elif len(D.entries(d)) < surplus + 1:
            return ZeroTest.UNDETERMINED
    return ZeroTest.ZERO


# -- shifted application --

_SHIFTED = {"lam": (0, 2), "mu": (1, 2), "nu": (2,)}


def apply_shifted(
    sym: Union[Psdo, LamMuElement], f, slot: str = "lam", floor: Optional[int] = None
):
    """Replace the slot variable x by x + d acting on f.

    For a lambda symbol this is the symbol of S o f. For a two-variable element,
    slot "lam" shifts lam and lam+mu, "mu" shifts mu and lam+mu, and "nu" shifts
    lam+mu alone; negative powers expand geometrically and the result is kept for
    total degrees >= floor.

    Raises:
        FloorExceeded: if the input is not known down to the requested floor
    """
    target = resolve_floor(floor)
    if isinstance(sym, Psdo):
        if slot != "lam":
            raise ValueError(f"A lambda symbol has no slot {slot}")
        result = sym.compose(Psdo.function(sym.alg, f), floor=target)
        if not result.exact and result.floor > target:
            raise FloorExceeded(target, result.floor)
        return result
    if sym.floor is not None and sym.floor > target:
        raise FloorExceeded(target, sym.floor)
    alg = sym.alg
    shifted = _SHIFTED[slot]
    derivs = [sympy.sympify(f)]
    raw = []
    truncated = False
    for coeff, a, b, e in sym.to_raw():
        exps = [a, b, e]
        d = a + b + e
        budget = d - target
        moving = [exps[i] if i in shifted else 0 for i in range(3)]
        if any(m < 0 for m in moving):
            truncated = True
        ranges = [
            range(0, (m if m >= 0 else max(budget, -1)) + 1) if i in shifted else range(1)
            for i, m in enumerate(moving)
        ]
        for k0 in ranges[0]:
            for k1 in ranges[1]:
                for k2 in ranges[2]:
                    k = k0 + k1 + k2
                    if k > budget:
                        truncated = True
                        continue
                    while len(derivs) <= k:
                        derivs.append(alg.total_derivative(derivs[-1]))
                    c = (
                        sympy.binomial(moving[0], k0)
                        * sympy.binomial(moving[1], k1)
                        * sympy.binomial(moving[2], k2)
                    )
                    raw.append((coeff * c * derivs[k], a - k0, b - k1, e - k2))
    floors = [x for x in (sym.floor, target if truncated else None) if x is not None]
    return LamMuElement.from_raw(alg, raw, floor=max(floors) if floors else None)
