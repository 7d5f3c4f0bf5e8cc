###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Scalar and matrix pseudodifferential operators over the differential field.

A `Psdo` is a Laurent series sum a_n d^n in d^-1. Exact operators (finite sums) carry
`exact=True`; truncated series carry a validity `floor`: coefficients below it are
unknown, not zero, and every operation propagates the floor so that no coefficient
is ever fabricated.

`OpMatrix` holds rectangular arrays of `Psdo`. Row echelon form, the Dieudonne
determinant and matrix inversion work over the skewfield of series; right division,
right gcd and Ore multiples work exactly over differential operators.
"""
# stdlib
from collections import defaultdict
from dataclasses import dataclass, field
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

# third-party
import sympy

# package
from pvakit.const import Agreement, PvakitError
from pvakit.diffalg import LAM, DiffAlgebra, normalize, to_text
from pvakit.util import resolve_floor

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)


class ZeroOperator(PvakitError):
    def __init__(self, what="operator"):
        super().__init__(f"Cannot invert a zero {what}")


class SingularMatrix(PvakitError):
    def __init__(self, detail=""):
        extra = f": {detail}" if detail else ""
        super().__init__(f"Matrix has zero Dieudonne determinant{extra}")


class DivisionByZero(PvakitError):
    def __init__(self):
        super().__init__("Right division by the zero operator")


class NotDifferential(PvakitError):
    def __init__(self, op, where):
        super().__init__(f"{where} needs an exact differential operator, got: {op}")


class Psdo:
    """Pseudodifferential operator sum_n a_n d^n.

    Args:
        alg: Algebra of the coefficients
        coeffs: Map from exponent to coefficient; zeros are dropped
        floor: Validity floor, required when `exact` is False
        exact: True when the operator is a finite sum
    """

    __slots__ = ("alg", "coeffs", "floor", "exact")

    def __init__(
        self,
        alg: DiffAlgebra,
        coeffs: Optional[Mapping[int, object]] = None,
        floor: Optional[int] = None,
        exact: bool = True,
    ):
        cleaned = {}
        for n, c in (coeffs or {}).items():
            c = normalize(c)
            if c != 0:
                cleaned[int(n)] = c
        if exact:
            floor = min(cleaned, default=0)
        else:
            if floor is None:
                raise ValueError("A truncated series needs a validity floor")
            cleaned = {n: c for n, c in cleaned.items() if n >= floor}
        self.alg = alg
        self.coeffs: Dict[int, sympy.Expr] = cleaned
        self.floor: int = floor
        self.exact: bool = exact

    # -- constructors --

    @classmethod
    def zero(cls, alg: DiffAlgebra) -> "Psdo":
        return cls(alg)

    @classmethod
    def one(cls, alg: DiffAlgebra) -> "Psdo":
        return cls(alg, {0: 1})

    @classmethod
    def d(cls, alg: DiffAlgebra, n: int = 1) -> "Psdo":
        return cls(alg, {n: 1})

    @classmethod
    def function(cls, alg: DiffAlgebra, f) -> "Psdo":
        """Multiplication operator by `f`."""
        return cls(alg, {0: f})

    @classmethod
    def from_symbol(cls, alg: DiffAlgebra, expr, var=LAM) -> "Psdo":
        """Exact operator from a Laurent polynomial symbol in `var`."""
        expr = sympy.expand(sympy.sympify(expr))
        coeffs = defaultdict(list)
        for term in sympy.Add.make_args(expr):
            c, powers = term.as_independent(var, as_Add=False)
            _, exp = powers.as_base_exp()
            coeffs[int(exp) if powers != 1 else 0].append(c)
        return cls(alg, {n: sympy.Add(*cs) for n, cs in coeffs.items()})

    # -- properties --

    @property
    def order(self) -> Optional[int]:
        """Highest exponent with a nonzero known coefficient; None if there is none."""
        return max(self.coeffs) if self.coeffs else None

    @property
    def top(self) -> Optional[int]:
        """Highest exponent a nonzero term can have (known or not)."""
        if self.coeffs:
            return max(self.coeffs)
        return None if self.exact else self.floor - 1

    @property
    def leading(self) -> sympy.Expr:
        if not self.coeffs:
            raise ZeroOperator()
        return self.coeffs[self.order]

    def is_zero(self) -> bool:
        return self.exact and not self.coeffs

    def is_differential(self) -> bool:
        return self.exact and all(n >= 0 for n in self.coeffs)

    def coeff(self, n: int) -> sympy.Expr:
        if not self.exact and n < self.floor:
            raise ValueError(f"Coefficient of d^{n} is below the validity floor {self.floor}")
        return self.coeffs.get(n, sympy.Integer(0))

    def __repr__(self):
        return f"Psdo({self.to_text()})"

    # -- arithmetic --

    def _combine(self, other: "Psdo", sign: int) -> "Psdo":
        floors = [p.floor for p in (self, other) if not p.exact]
        coeffs = defaultdict(list)
        for n, c in self.coeffs.items():
            coeffs[n].append(c)
        for n, c in other.coeffs.items():
            coeffs[n].append(sign * c)
        merged = {n: sympy.Add(*cs) for n, cs in coeffs.items()}
        if floors:
            return Psdo(self.alg, merged, floor=max(floors), exact=False)
        return Psdo(self.alg, merged)

    def __add__(self, other: "Psdo") -> "Psdo":
        return self._combine(other, 1)

    def __sub__(self, other: "Psdo") -> "Psdo":
        return self._combine(other, -1)

    def __neg__(self) -> "Psdo":
        return self.scale(-1)

    def scale(self, f) -> "Psdo":
        """Left multiplication f o A (coefficientwise)."""
        return Psdo(
            self.alg,
            {n: f * c for n, c in self.coeffs.items()},
            floor=self.floor,
            exact=self.exact,
        )

    def times_lambda(self, k: int) -> "Psdo":
        """Multiply the symbol by lambda^k."""
        return Psdo(
            self.alg,
            {n + k: c for n, c in self.coeffs.items()},
            floor=self.floor + k,
            exact=self.exact,
        )

    def truncate(self, floor: int) -> "Psdo":
        if not self.exact and floor <= self.floor:
            return self
        return Psdo(self.alg, self.coeffs, floor=floor, exact=False)

    def compose(self, other: "Psdo", floor: Optional[int] = None) -> "Psdo":
        """A o B by the rule d^m o b = sum_k binomial(m, k) b^(k) d^(m-k).

        The result is exact when both factors are exact and `self` has no negative
        powers; otherwise it is truncated at the larger of `floor` and the validity
        floor implied by the inputs.
        """
        if self.is_zero() or other.is_zero():
            return Psdo.zero(self.alg)
        validity = []
        if not self.exact and other.top is not None:
            validity.append(self.floor + other.top)
        if not other.exact and self.top is not None:
            validity.append(other.floor + self.top)
        finite = self.exact and other.exact and min(self.coeffs) >= 0
        target = None
        if not finite:
            target = max([resolve_floor(floor)] + validity)
        derivs: Dict[int, List[sympy.Expr]] = {}

        def derivative(n: int, k: int) -> sympy.Expr:
            chain = derivs.setdefault(n, [other.coeffs[n]])
            while len(chain) <= k:
                chain.append(self.alg.total_derivative(chain[-1]))
            return chain[k]

        terms = defaultdict(list)
        for m, a in self.coeffs.items():
            for n in other.coeffs:
                k = 0
                while True:
                    e = m + n - k
                    if target is not None and e < target:
                        break
                    if m >= 0 and k > m:
                        break
                    b_k = derivative(n, k)
                    if b_k == 0:
                        break
                    terms[e].append(sympy.binomial(m, k) * a * b_k)
                    k += 1
        coeffs = {e: sympy.Add(*ts) for e, ts in terms.items()}
        if finite:
            return Psdo(self.alg, coeffs)
        return Psdo(self.alg, coeffs, floor=target, exact=False)

    def __matmul__(self, other: "Psdo") -> "Psdo":
        return self.compose(other)

    def adjoint(self, floor: Optional[int] = None) -> "Psdo":
        """(sum a_n d^n)* = sum (-d)^n o a_n"""
        result = Psdo.zero(self.alg)
        target = resolve_floor(floor)
        if not self.exact:
            target = max(target, self.floor)
        for n, a in self.coeffs.items():
            term = Psdo(self.alg, {n: sympy.Integer(-1) ** n}).compose(
                Psdo.function(self.alg, a), floor=target
            )
            result = result + term
        if not self.exact and result.exact:
            result = result.truncate(target)
        return result

    def invert(self, floor: Optional[int] = None) -> "Psdo":
        """A^-1 by geometric progression, valid down to `floor`.

        Writing A = a d^N (1 + T), A^-1 = sum_k (-T)^k o d^-N o a^-1.

        Raises:
            ZeroOperator: if A has no nonzero known coefficient
        """
        if not self.coeffs:
            raise ZeroOperator()
        target = resolve_floor(floor)
        N, a = self.order, self.leading
        rest = self - Psdo(self.alg, {N: a})
        if rest.is_zero() and not self.alg.jets_of(a):
            return Psdo(self.alg, {-N: 1 / a})
        if rest.is_zero() and N <= 0:
            return Psdo(self.alg, {-N: 1}).compose(Psdo.function(self.alg, 1 / a))
        head_inv = Psdo(self.alg, {-N: 1}).compose(
            Psdo.function(self.alg, 1 / a), floor=target
        )
        if rest.is_zero():
            return head_inv
        inner_floor = target + N
        T = head_inv.compose(rest, floor=inner_floor)
        term = Psdo.one(self.alg)
        total = Psdo.one(self.alg)
        for _ in range(max(1, -inner_floor + 1)):
            term = (-T).compose(term, floor=inner_floor)
            if not term.coeffs:
                break
            total = total + term
        total = total.truncate(inner_floor) if total.exact else total
        return total.compose(head_inv, floor=target)

    def monic(self) -> "Psdo":
        """Left multiple with leading coefficient 1."""
        return self.scale(1 / self.leading)

    def apply(self, f) -> sympy.Expr:
        """Apply a differential operator to a function."""
        if not self.is_differential():
            raise NotDifferential(self.to_text(), "apply")
        return normalize(
            sympy.Add(
                *(c * self.alg.total_derivative(f, n) for n, c in self.coeffs.items())
            )
        )

    def shift_apply(self, x, f) -> sympy.Expr:
        """A(x + d) f = sum_r a_r sum_q binomial(r, q) x^(r-q) d^q f, for differential A."""
        if not self.is_differential():
            raise NotDifferential(self.to_text(), "shift_apply")
        derivs = [sympy.sympify(f)]
        total = []
        for r, a in self.coeffs.items():
            for q in range(r + 1):
                while len(derivs) <= q:
                    derivs.append(self.alg.total_derivative(derivs[-1]))
                total.append(a * sympy.binomial(r, q) * x ** (r - q) * derivs[q])
        return sympy.Add(*total)

    def partial(self, i: int, n: int) -> "Psdo":
        """Coefficientwise partial derivative with respect to u_i^(n)."""
        return Psdo(
            self.alg,
            {m: self.alg.partial(c, i, n) for m, c in self.coeffs.items()},
            floor=self.floor,
            exact=self.exact,
        )

    def symbol(self, var=LAM) -> sympy.Expr:
        """Symbol sum a_n var^n of the known part."""
        return sympy.Add(*(c * var**n for n, c in self.coeffs.items()))

    # -- comparison --

    def compare(self, other: "Psdo") -> Agreement:
        diff = self - other
        if diff.coeffs:
            return Agreement.DIFFERENT
        return Agreement.EXACT if diff.exact else Agreement.TO_FLOOR

    def equals_exactly(self, other: "Psdo") -> bool:
        return self.compare(other) == Agreement.EXACT

    def agrees(self, other: "Psdo") -> bool:
        """Equal, exactly or to the shallower floor."""
        return self.compare(other) != Agreement.DIFFERENT

    def to_text(self, name: str = "d") -> str:
        parts = []
        for n in sorted(self.coeffs, reverse=True):
            c = self.coeffs[n]
            power = "" if n == 0 else (name if n == 1 else f"{name}^{n}")
            if not power:
                parts.append(to_text(self.alg, c))
            elif c == 1:
                parts.append(power)
            elif c == -1:
                parts.append("-" + power)
            elif isinstance(c, sympy.Add):
                parts.append(f"({to_text(self.alg, c)})*{power}")
            else:
                parts.append(f"{to_text(self.alg, c)}*{power}")
        if not self.exact:
            parts.append(f"O({name}^{self.floor - 1})")
        text = " + ".join(parts) if parts else "0"
        return text.replace("+ -", "- ")


Entry = Union[Psdo, sympy.Expr, int]


class OpMatrix:
    """Rectangular matrix of pseudodifferential operators."""

    __slots__ = ("alg", "rows")

    def __init__(self, alg: DiffAlgebra, rows: Sequence[Sequence[Entry]]):
        self.alg = alg
        converted = []
        for row in rows:
            converted.append(
                tuple(e if isinstance(e, Psdo) else Psdo.function(alg, e) for e in row)
            )
        widths = {len(r) for r in converted}
        if len(widths) > 1:
            raise ValueError(f"Ragged matrix, row lengths {sorted(widths)}")
        self.rows: Tuple[Tuple[Psdo, ...], ...] = tuple(converted)

    @classmethod
    def identity(cls, alg: DiffAlgebra, n: int) -> "OpMatrix":
        return cls(alg, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, alg: DiffAlgebra, m: int, n: int) -> "OpMatrix":
        return cls(alg, [[0] * n for _ in range(m)])

    @classmethod
    def scalar(cls, op: Psdo) -> "OpMatrix":
        return cls(op.alg, [[op]])

    @classmethod
    def diagonal(cls, entries: Sequence[Psdo]) -> "OpMatrix":
        alg = entries[0].alg
        n = len(entries)
        return cls(
            alg,
            [[entries[i] if i == j else Psdo.zero(alg) for j in range(n)] for i in range(n)],
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def is_square(self) -> bool:
        m, n = self.shape
        return m == n

    def __getitem__(self, ij: Tuple[int, int]) -> Psdo:
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for row in self.rows:
            yield from row

    def is_exact(self) -> bool:
        return all(e.exact for e in self.entries())

    def is_differential(self) -> bool:
        return all(e.is_differential() for e in self.entries())

    def is_identity(self) -> bool:
        return self.is_square() and self.equals_exactly(
            OpMatrix.identity(self.alg, self.shape[0])
        )

    def order(self) -> Optional[int]:
        orders = [e.order for e in self.entries() if e.order is not None]
        return max(orders) if orders else None

    def _check_shape(self, other: "OpMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch {self.shape} != {other.shape}")

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        self._check_shape(other)
        return OpMatrix(
            self.alg,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
        )

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        return self + (-other)

    def __neg__(self) -> "OpMatrix":
        return self.scale(-1)

    def scale(self, f) -> "OpMatrix":
        return OpMatrix(self.alg, [[e.scale(f) for e in row] for row in self.rows])

    def map(self, func) -> "OpMatrix":
        return OpMatrix(self.alg, [[func(e) for e in row] for row in self.rows])

    def transpose(self) -> "OpMatrix":
        return OpMatrix(self.alg, [list(col) for col in zip(*self.rows)])

    def compose(self, other: "OpMatrix", floor: Optional[int] = None) -> "OpMatrix":
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError(f"Cannot compose shapes {self.shape} and {other.shape}")
        rows = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = Psdo.zero(self.alg)
                for t in range(k):
                    acc = acc + self.rows[i][t].compose(other.rows[t][j], floor=floor)
                row.append(acc)
            rows.append(row)
        return OpMatrix(self.alg, rows)

    def __matmul__(self, other: "OpMatrix") -> "OpMatrix":
        return self.compose(other)

    def adjoint(self, floor: Optional[int] = None) -> "OpMatrix":
        """(A*)_ij = (A_ji)*"""
        return OpMatrix(
            self.alg, [[e.adjoint(floor) for e in col] for col in zip(*self.rows)]
        )

    def apply(self, vector: Sequence) -> Tuple[sympy.Expr, ...]:
        if len(vector) != self.shape[1]:
            raise ValueError(f"Vector length {len(vector)} != {self.shape[1]}")
        return tuple(
            normalize(sympy.Add(*(e.apply(x) for e, x in zip(row, vector))))
            for row in self.rows
        )

    def truncate(self, floor: int) -> "OpMatrix":
        return self.map(lambda e: e.truncate(floor))

    def compare(self, other: "OpMatrix") -> Agreement:
        self._check_shape(other)
        worst = Agreement.EXACT
        for a, b in zip(self.entries(), other.entries()):
            agreement = a.compare(b)
            if agreement == Agreement.DIFFERENT:
                return agreement
            if agreement == Agreement.TO_FLOOR:
                worst = agreement
        return worst

    def equals_exactly(self, other: "OpMatrix") -> bool:
        return self.shape == other.shape and self.compare(other) == Agreement.EXACT

    def agrees(self, other: "OpMatrix") -> bool:
        return self.compare(other) != Agreement.DIFFERENT

    def to_text(self) -> str:
        if self.shape == (1, 1):
            return self.rows[0][0].to_text()
        rows = ", ".join("[" + ", ".join(e.to_text() for e in row) + "]" for row in self.rows)
        return f"[{rows}]"

    def to_lists(self) -> List[List[str]]:
        return [[e.to_text() for e in row] for row in self.rows]

    def __repr__(self):
        return f"OpMatrix({self.to_text()})"


# -- echelon form and determinant --


@dataclass(frozen=True)
class RowOp:
    """Elementary row operation: a swap of rows i and j, or row_i += factor o row_j."""

    kind: str
    i: int
    j: int
    factor: Optional[Psdo] = None


@dataclass(frozen=True)
class EchelonForm:
    matrix: OpMatrix
    log: Tuple[RowOp, ...]
    pivots: Tuple[Tuple[int, int], ...]
    sign: int = 1


@dataclass(frozen=True)
class DieuDet:
    """Dieudonne determinant c * xi^d; `c == 0` is the zero determinant."""

    c: sympy.Expr
    d: int = 0
    alg: Optional[DiffAlgebra] = field(default=None, compare=False)

    @classmethod
    def zero(cls, alg=None) -> "DieuDet":
        return cls(sympy.Integer(0), 0, alg)

    def is_zero(self) -> bool:
        return normalize(self.c) == 0

    def __mul__(self, other: "DieuDet") -> "DieuDet":
        if self.is_zero() or other.is_zero():
            return DieuDet.zero(self.alg)
        return DieuDet(normalize(self.c * other.c), self.d + other.d, self.alg)

    def inverse(self) -> "DieuDet":
        if self.is_zero():
            raise SingularMatrix()
        return DieuDet(normalize(1 / self.c), -self.d, self.alg)

    def equals(self, other: "DieuDet") -> bool:
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.d == other.d and normalize(self.c - other.c) == 0

    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        c = to_text(self.alg, self.c) if self.alg else str(self.c)
        return f"{c} * xi^{self.d}"


def _reduce(rows: List[List[Psdo]], npivot: int, floor: Optional[int]):
    """Forward elimination on the first `npivot` columns, in place.

    Returns (log, pivots, sign).
    """
    nrows = len(rows)
    log, pivots, sign = [], [], 1
    r = 0
    for c in range(npivot):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c].coeffs), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            log.append(RowOp("swap", r, p))
            sign = -sign
        pinv = rows[r][c].invert(floor)
        for i in range(r + 1, nrows):
            entry = rows[i][c]
            if not entry.coeffs:
                rows[i][c] = Psdo.zero(entry.alg)
                continue
            factor = -entry.compose(pinv, floor=floor)
            rows[i] = [
                rows[i][k] + factor.compose(rows[r][k], floor=floor)
                for k in range(len(rows[i]))
            ]
            rows[i][c] = Psdo.zero(entry.alg)
            log.append(RowOp("add", i, r, factor))
        pivots.append((r, c))
        r += 1
    return log, pivots, sign


def row_echelon(M: OpMatrix, floor: Optional[int] = None) -> EchelonForm:
    """Row echelon form over the skewfield, with the list of row operations used."""
    rows = [list(row) for row in M.rows]
    log, pivots, sign = _reduce(rows, M.shape[1], floor)
    return EchelonForm(OpMatrix(M.alg, rows), tuple(log), tuple(pivots), sign)


def dieudonne_det(M: OpMatrix, floor: Optional[int] = None) -> DieuDet:
    """Dieudonne determinant: signed product of pivot leading coefficients times
    xi to the sum of the pivot orders."""
    if not M.is_square():
        raise ValueError(f"Determinant of a non-square {M.shape} matrix")
    form = row_echelon(M, floor)
    n = M.shape[0]
    if len(form.pivots) < n:
        return DieuDet.zero(M.alg)
    c, d = sympy.Integer(form.sign), 0
    for r, col in form.pivots:
        entry = form.matrix[r, col]
        c = c * entry.leading
        d += entry.order
    return DieuDet(normalize(c), d, M.alg)


def mat_invert(M: OpMatrix, floor: Optional[int] = None) -> OpMatrix:
    """Two-sided inverse to the validity floor, by Gauss-Jordan elimination.

    Raises:
        SingularMatrix: if the Dieudonne determinant is zero
    """
    if not M.is_square():
        raise SingularMatrix(f"non-square shape {M.shape}")
    n = M.shape[0]
    alg = M.alg
    if n == 1:
        entry = M[0, 0]
        if not entry.coeffs:
            raise SingularMatrix()
        return OpMatrix.scalar(entry.invert(floor))
    identity = OpMatrix.identity(alg, n)
    rows = [list(M.rows[i]) + list(identity.rows[i]) for i in range(n)]
    _, pivots, _ = _reduce(rows, n, floor)
    if len(pivots) < n:
        raise SingularMatrix()
    for r, c in pivots:
        pinv = rows[r][c].invert(floor)
        rows[r] = [pinv.compose(e, floor=floor) for e in rows[r]]
        rows[r][c] = Psdo.one(alg)
    for r in range(n - 1, -1, -1):
        for i in range(r):
            factor = rows[i][r]
            if not factor.coeffs:
                continue
            rows[i] = [
                rows[i][k] - factor.compose(rows[r][k], floor=floor)
                for k in range(2 * n)
            ]
            rows[i][r] = Psdo.zero(alg)
    return OpMatrix(alg, [row[n:] for row in rows])


# -- exact Euclidean algorithms over differential operators --


def _require_differential(op: Psdo, where: str):
    if not op.is_differential():
        raise NotDifferential(op.to_text(), where)


def right_divide(A: Psdo, B: Psdo) -> Tuple[Psdo, Psdo]:
    """Q, R with A = Q o B + R and order(R) < order(B).

    Raises:
        DivisionByZero: if B is zero
    """
    _require_differential(A, "right_divide")
    _require_differential(B, "right_divide")
    if B.order is None:
        raise DivisionByZero()
    nb, lb = B.order, B.leading
    Q, R = Psdo.zero(A.alg), A
    while R.order is not None and R.order >= nb:
        term = Psdo(A.alg, {R.order - nb: R.leading / lb})
        Q = Q + term
        R = R - term.compose(B)
    return Q, R


def left_divide(B: Psdo, A: Psdo) -> Tuple[Psdo, Psdo]:
    """Q, R with A = B o Q + R and order(R) < order(B).

    Raises:
        DivisionByZero: if B is zero
    """
    _require_differential(A, "left_divide")
    _require_differential(B, "left_divide")
    if B.order is None:
        raise DivisionByZero()
    nb, lb = B.order, B.leading
    Q, R = Psdo.zero(A.alg), A
    while R.order is not None and R.order >= nb:
        term = Psdo(A.alg, {R.order - nb: R.leading / lb})
        Q = Q + term
        R = R - B.compose(term)
    return Q, R


def has_constant_coefficients(op: Psdo) -> bool:
    return op.exact and not any(op.alg.jets_of(c) for c in op.coeffs.values())


def rgcd(A: Psdo, B: Psdo) -> Psdo:
    """Monic right greatest common divisor."""
    if A.order is None and B.order is None:
        raise DivisionByZero()
    r0, r1 = A, B
    while r1.order is not None:
        _, r = right_divide(r0, r1)
        r0, r1 = r1, r
    return r0.monic()


def left_multiple(a: Psdo, b: Psdo) -> Tuple[Psdo, Psdo]:
    """X, Y of minimal order with X o a = Y o b (extended Euclid on right division)."""
    alg = a.alg
    r_prev, r_cur = a, b
    s_prev, s_cur = Psdo.one(alg), Psdo.zero(alg)
    t_prev, t_cur = Psdo.zero(alg), Psdo.one(alg)
    while r_cur.order is not None:
        q, r = right_divide(r_prev, r_cur)
        r_prev, r_cur = r_cur, r
        s_prev, s_cur = s_cur, s_prev - q.compose(s_cur)
        t_prev, t_cur = t_cur, t_prev - q.compose(t_cur)
    return s_cur, -t_cur


def _ore_scalar(B1: Psdo, B2: Psdo) -> Tuple[Psdo, Psdo]:
    _require_differential(B1, "ore_right_multiple")
    _require_differential(B2, "ore_right_multiple")
    if B1.order is None or B2.order is None:
        raise DivisionByZero()
    if B1.equals_exactly(B2):
        one = Psdo.one(B1.alg)
        return one, one
    X, Y = left_multiple(B1.adjoint(), B2.adjoint())
    E, F = X.adjoint(), Y.adjoint()
    g = Psdo.function(B1.alg, 1 / E.leading)
    return E.compose(g), F.compose(g)


def common_right_multiple(ops: Sequence[Psdo]) -> Tuple[Psdo, List[Psdo]]:
    """M and cofactors z_i with ops[i] o z_i = M for every i."""
    M = ops[0]
    cofactors = [Psdo.one(M.alg)]
    for op in ops[1:]:
        e, f = _ore_scalar(M, op)
        cofactors = [z.compose(e) for z in cofactors] + [f]
        M = M.compose(e)
    return M, cofactors


def _diagonalize(B: OpMatrix):
    """U, V with U o B o V diagonal, using exact row and column operations."""
    alg = B.alg
    n = B.shape[0]
    T = [list(row) for row in B.rows]
    U = [list(row) for row in OpMatrix.identity(alg, n).rows]
    V = [list(row) for row in OpMatrix.identity(alg, n).rows]
    for c in range(n):
        candidates = [i for i in range(c, n) if T[i][c].order is not None]
        if not candidates:
            raise SingularMatrix(f"column {c} has no pivot")
        p = min(candidates, key=lambda i: (T[i][c].order, i))
        T[c], T[p] = T[p], T[c]
        U[c], U[p] = U[p], U[c]
        for j in range(c + 1, n):
            if T[j][c].order is None:
                continue
            X, Y = left_multiple(T[c][c], T[j][c])
            T[j] = [Y.compose(T[j][k]) - X.compose(T[c][k]) for k in range(n)]
            U[j] = [Y.compose(U[j][k]) - X.compose(U[c][k]) for k in range(n)]
    for c in range(n):
        if T[c][c].order is None:
            raise SingularMatrix(f"zero diagonal entry {c}")
        for k in range(c + 1, n):
            if T[c][k].order is None:
                continue
            x, y = _ore_scalar(T[c][c], T[c][k])
            for r in range(n):
                T[r][k] = T[r][k].compose(y) - T[r][c].compose(x)
                V[r][k] = V[r][k].compose(y) - V[r][c].compose(x)
    return OpMatrix(alg, U), [T[i][i] for i in range(n)], OpMatrix(alg, V)


def ore_right_multiple(
    B1: Union[Psdo, OpMatrix], B2: Union[Psdo, OpMatrix]
) -> Tuple[Union[Psdo, OpMatrix], Union[Psdo, OpMatrix]]:
    """Exact E, F with B1 o E = B2 o F.

    Scalars: the minimal common right multiple, from the adjoint of a left common
    multiple, normalized so that E is monic. Matrices: B1 is diagonalized,
    U o B1 o V = diag(delta); each entry of U o B2 is swapped past its delta and each
    column is put over a common right denominator y_c, giving E = V o X and
    F = diag(y_c). Only det B1 != 0 is needed.

    The matrix case does not search E, F by an ansatz of increasing order, so the
    pair it returns need not have minimal order. The result is always checked by
    composing both sides.

    Raises:
        PvakitError: if the composition check fails
    """
    if isinstance(B1, Psdo):
        return _ore_scalar(B1, B2)
    alg = B1.alg
    n = B1.shape[0]
    if not (B1.is_differential() and B2.is_differential()):
        raise NotDifferential(B1.to_text(), "ore_right_multiple")
    if B1.equals_exactly(B2):
        return OpMatrix.identity(alg, n), OpMatrix.identity(alg, n)
    if B2.is_identity():
        return OpMatrix.identity(alg, n), B1
    if B1.is_identity():
        return B2, OpMatrix.identity(alg, B2.shape[1])
    _log.debug(f"[begin] matrix Ore multiple of {B1.to_text()} and {B2.to_text()}")
    U, delta, V = _diagonalize(B1)
    W = U.compose(B2)
    ncols = W.shape[1]
    X = [[Psdo.zero(alg) for _ in range(ncols)] for _ in range(n)]
    ys = []
    for c in range(ncols):
        pending = []
        for i in range(n):
            if W[i, c].order is not None:
                pending.append((i,) + _ore_scalar(delta[i], W[i, c]))
        if not pending:
            ys.append(Psdo.one(alg))
            continue
        y_c, cofactors = common_right_multiple([y for _, _, y in pending])
        for (i, x, _), z in zip(pending, cofactors):
            X[i][c] = x.compose(z)
        ys.append(y_c)
    E = V.compose(OpMatrix(alg, X))
    F = OpMatrix.diagonal(ys)
    if not B1.compose(E).equals_exactly(B2.compose(F)):
        raise PvakitError("Ore multiple failed its composition check")
    _log.debug("[ end ] matrix Ore multiple")
    return E, F
