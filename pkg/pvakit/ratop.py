###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Rational matrix pseudodifferential operators as right fractions A o B^-1.

Every rational operator is stored as a pair of exact matrix differential operators
(A, B) with nonzero Dieudonne determinant of B. Ring operations are carried out on
the pairs with Ore multiples; `to_series` expands a fraction into a truncated series.

`StringOp` is the weakly non-local form D + sum a d^-1 b, with an exact product as
long as the needed antiderivatives exist.
"""
# stdlib
from dataclasses import dataclass
import logging
from typing import List, Optional, Sequence, Tuple, Union

# third-party
import sympy

# package
from pvakit.const import Agreement, PvakitError
from pvakit.diffalg import DiffAlgebra, NotExact, normalize, to_text
from pvakit.psdo import (
    DieuDet,
    OpMatrix,
    Psdo,
    common_right_multiple,
    dieudonne_det,
    has_constant_coefficients,
    left_divide,
    mat_invert,
    ore_right_multiple,
    rgcd,
    right_divide,
)
from pvakit.util import resolve_floor

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)


class SingularDenominator(PvakitError):
    def __init__(self, B: OpMatrix):
        self.denominator = B
        super().__init__(f"Denominator has zero Dieudonne determinant: {B.to_text()}")


class NotWeaklyClosed(PvakitError):
    def __init__(self, q, alg: DiffAlgebra):
        self.integrand = q
        super().__init__(
            f"Product leaves the weakly non-local form: no antiderivative of {to_text(alg, q)}"
        )


class WitnessNotInKernel(PvakitError):
    def __init__(self, v, residual):
        self.witness = v
        self.residual = residual
        super().__init__(f"Claimed kernel vector {list(v)} gives B(d)v = {list(residual)}")


OpLike = Union[Psdo, OpMatrix]


def _as_matrix(op: OpLike) -> OpMatrix:
    return OpMatrix.scalar(op) if isinstance(op, Psdo) else op


@dataclass(frozen=True)
class RationalOp:
    """Right fraction A o B^-1 of exact matrix differential operators."""

    A: OpMatrix
    B: OpMatrix

    @property
    def alg(self) -> DiffAlgebra:
        return self.A.alg

    @property
    def shape(self) -> Tuple[int, int]:
        return self.A.shape[0], self.B.shape[1]

    def is_scalar(self) -> bool:
        return self.shape == (1, 1)

    def is_differential(self) -> bool:
        """True when B is the identity."""
        return self.B.is_identity()

    def to_series(self, floor: Optional[int] = None) -> OpMatrix:
        return to_series(self, floor)

    def agrees(self, other: "RationalOp", floor: Optional[int] = None) -> bool:
        """Series of the two fractions agree to the floor."""
        return to_series(self, floor).agrees(to_series(other, floor))

    def to_text(self) -> str:
        if self.is_differential():
            return self.A.to_text()
        return f"({self.A.to_text()}) o ({self.B.to_text()})^-1"

    def to_dict(self) -> dict:
        return {"A": self.A.to_lists(), "B": self.B.to_lists()}


def make_fraction(A: OpLike, B: OpLike) -> RationalOp:
    """Build A o B^-1.

    Raises:
        SingularDenominator: if det B is zero
        ValueError: on shape mismatch or non-differential inputs
    """
    A, B = _as_matrix(A), _as_matrix(B)
    if not B.is_square() or A.shape[1] != B.shape[0]:
        raise ValueError(f"Incompatible fraction shapes {A.shape} and {B.shape}")
    for name, M in (("A", A), ("B", B)):
        if not M.is_differential():
            raise ValueError(f"Fraction part {name} must be a differential operator")
    if not B.is_identity() and dieudonne_det(B).is_zero():
        raise SingularDenominator(B)
    return RationalOp(A, B)


def from_diffop(A: OpLike) -> RationalOp:
    A = _as_matrix(A)
    return RationalOp(A, OpMatrix.identity(A.alg, A.shape[1]))


def zero_fraction(alg: DiffAlgebra, n: int) -> RationalOp:
    return RationalOp(OpMatrix.zero(alg, n, n), OpMatrix.identity(alg, n))


def to_series(R: RationalOp, floor: Optional[int] = None) -> OpMatrix:
    """A o B^-1 expanded to the validity floor."""
    target = resolve_floor(floor)
    if R.B.is_identity():
        return R.A
    inner = target - max(R.A.order() or 0, 0)
    return R.A.compose(mat_invert(R.B, inner), floor=target)


def _ore(B1: OpMatrix, B2: OpMatrix) -> Tuple[OpMatrix, OpMatrix]:
    if B1.shape == (1, 1) and B2.shape == (1, 1):
        E, F = ore_right_multiple(B1[0, 0], B2[0, 0])
        return OpMatrix.scalar(E), OpMatrix.scalar(F)
    return ore_right_multiple(B1, B2)


def frac_add(R1: RationalOp, R2: RationalOp) -> RationalOp:
    """A1 B1^-1 + A2 B2^-1 = (A1 E + A2 F)(B1 E)^-1 with B1 E = B2 F."""
    if R1.shape != R2.shape:
        raise ValueError(f"Shape mismatch {R1.shape} != {R2.shape}")
    if R2.A.equals_exactly(OpMatrix.zero(R2.alg, *R2.A.shape)):
        return R1
    if R1.A.equals_exactly(OpMatrix.zero(R1.alg, *R1.A.shape)):
        return R2
    E, F = _ore(R1.B, R2.B)
    return RationalOp(R1.A.compose(E) + R2.A.compose(F), R1.B.compose(E))


def frac_neg(R: RationalOp) -> RationalOp:
    return RationalOp(-R.A, R.B)


def frac_sub(R1: RationalOp, R2: RationalOp) -> RationalOp:
    return frac_add(R1, frac_neg(R2))


def frac_scale(R: RationalOp, f) -> RationalOp:
    """Left multiplication by the function (or constant) f."""
    return RationalOp(R.A.scale(f), R.B)


def frac_mul(R1: RationalOp, R2: RationalOp) -> RationalOp:
    """A1 B1^-1 A2 B2^-1 = A1 E (B2 F)^-1, where B1 E = A2 F."""
    if R1.shape[1] != R2.shape[0]:
        raise ValueError(f"Cannot multiply shapes {R1.shape} and {R2.shape}")
    n = R2.shape[1]
    if R2.A.equals_exactly(OpMatrix.zero(R2.alg, *R2.A.shape)):
        return zero_fraction(R1.alg, n)
    if R1.B.is_identity():
        return RationalOp(R1.A.compose(R2.A), R2.B)
    if R2.A.shape == (1, 1) and R2.A[0, 0].order is None:
        return zero_fraction(R1.alg, n)
    quotient = _left_quotient(R1.B, R2.A)
    if quotient is not None:
        return RationalOp(R1.A.compose(quotient), R2.B)
    E, F = _ore(R1.B, R2.A)
    return RationalOp(R1.A.compose(E), R2.B.compose(F))


def _left_quotient(B: OpMatrix, A: OpMatrix) -> Optional[OpMatrix]:
    """Q with A = B o Q, for a scalar B with constant coefficients; None otherwise."""
    if B.shape != (1, 1) or not has_constant_coefficients(B[0, 0]):
        return None
    row = []
    for j in range(A.shape[1]):
        q, r = left_divide(B[0, 0], A[0, j])
        if r.order is not None:
            return None
        row.append(q)
    return OpMatrix(A.alg, [row])


def frac_inverse(R: RationalOp) -> RationalOp:
    """(A B^-1)^-1 = B A^-1.

    Raises:
        SingularDenominator: if det A is zero
    """
    return make_fraction(R.B, R.A)


def frac_det(R: RationalOp) -> DieuDet:
    """det(A) * det(B)^-1"""
    det_a = dieudonne_det(R.A)
    if det_a.is_zero():
        return det_a
    return det_a * dieudonne_det(R.B).inverse()


def reduce_scalar(R: RationalOp) -> RationalOp:
    """Cancel the right gcd of a scalar fraction and make B monic.

    Matrix fractions are returned unchanged.
    """
    if not R.is_scalar():
        return R
    a, b = R.A[0, 0], R.B[0, 0]
    if a.order is None:
        return zero_fraction(R.alg, 1)
    if len(b.coeffs) == 1 and has_constant_coefficients(b):
        # the right divisors of c d^n are the powers of d
        n, c = b.order, b.leading
        coeffs = dict(a.coeffs)
        while n > 0 and 0 not in coeffs:
            coeffs = {k - 1: v for k, v in coeffs.items()}
            n -= 1
        return RationalOp(
            OpMatrix.scalar(Psdo(R.alg, {k: v / c for k, v in coeffs.items()})),
            OpMatrix.scalar(Psdo.d(R.alg, n)),
        )
    g = rgcd(a, b)
    a, _ = right_divide(a, g)
    b, _ = right_divide(b, g)
    unit = Psdo.function(R.alg, 1 / b.leading)
    return RationalOp(OpMatrix.scalar(a.compose(unit)), OpMatrix.scalar(b.compose(unit)))


def fraction_matrix(entries: Sequence[Sequence[RationalOp]]) -> RationalOp:
    """Matrix of scalar fractions as one right fraction, one denominator per column.

    With a_ij b_ij^-1 = (a_ij z_ij) y_j^-1 where b_ij z_ij = y_j, A = [a_ij z_ij] and
    B = diag(y_j).
    """
    alg = entries[0][0].alg
    nrows, ncols = len(entries), len(entries[0])
    A = [[Psdo.zero(alg)] * ncols for _ in range(nrows)]
    ys = []
    for j in range(ncols):
        live = [i for i in range(nrows) if entries[i][j].A[0, 0].order is not None]
        if not live:
            ys.append(Psdo.one(alg))
            continue
        y, cofactors = common_right_multiple([entries[i][j].B[0, 0] for i in live])
        for i, z in zip(live, cofactors):
            A[i][j] = entries[i][j].A[0, 0].compose(z)
        ys.append(y)
    return RationalOp(OpMatrix(alg, A), OpMatrix.diagonal(ys))


def lenard_power(H: RationalOp, K: RationalOp, n: int) -> RationalOp:
    """H^[n] = (H o K^-1)^(n-1) o H, with H^[0] = K.

    Scalar intermediates are reduced by their right gcd, so that a denominator
    d^k left-divides the next factor whenever it can.
    """
    if n < 0:
        raise ValueError(f"Negative power {n}")
    if n == 0:
        return K
    if n == 1:
        return H
    _log.info(f"[begin] Lenard power {n}")
    step = reduce_scalar(frac_mul(H, frac_inverse(K)))
    result = H
    for _ in range(n - 1):
        result = reduce_scalar(frac_mul(step, result))
    _log.info(f"[ end ] Lenard power {n}")
    return result


def is_minimal_scalar(R: RationalOp) -> bool:
    if not R.is_scalar():
        raise ValueError("Minimality by right gcd needs a scalar fraction")
    if R.A[0, 0].order is None:
        return R.B[0, 0].order == 0
    return rgcd(R.A[0, 0], R.B[0, 0]).order == 0


def kernel_witness_check(R: RationalOp, V: Sequence[Sequence]) -> bool:
    """Check claimed kernel vectors of B and that A maps them to independent vectors.

    Returns True when B(d)v = 0 for every v and the A(d)v are linearly independent
    over the constants, so that ker A and ker B meet only in zero on their span.

    Raises:
        WitnessNotInKernel: if some B(d)v is nonzero
    """
    alg = R.alg
    images = []
    for v in V:
        v = tuple(normalize(x) for x in v)
        residual = R.B.apply(v)
        if any(x != 0 for x in residual):
            raise WitnessNotInKernel(v, residual)
        images.append(R.A.apply(v))
    if not images:
        return True
    ks = [sympy.Dummy(f"k{j}") for j in range(len(images))]
    combos = [
        sum(k * img[i] for k, img in zip(ks, images)) for i in range(len(images[0]))
    ]
    equations = alg.coefficient_equations(combos)
    if not equations:
        return False
    matrix, _ = sympy.linear_eq_to_matrix(equations, ks)
    return matrix.rank() == len(images)


# -- weakly non-local operators --


class StringOp:
    """Weakly non-local scalar operator D + sum_k a_k d^-1 o b_k.

    Args:
        alg: Algebra of the coefficients
        differential: Exact differential part D
        strings: Pairs (a, b) of functions
    """

    def __init__(
        self,
        alg: DiffAlgebra,
        differential: Optional[Psdo] = None,
        strings: Sequence[Tuple] = (),
    ):
        self.alg = alg
        self.differential = differential if differential is not None else Psdo.zero(alg)
        if not self.differential.is_differential():
            raise ValueError("The local part of a string operator must be differential")
        merged: List[List[sympy.Expr]] = []
        for a, b in strings:
            a, b = normalize(a), normalize(b)
            if a == 0 or b == 0:
                continue
            for entry in merged:
                if normalize(entry[1] - b) == 0:
                    entry[0] = normalize(entry[0] + a)
                    break
            else:
                merged.append([a, b])
        self.strings: Tuple[Tuple[sympy.Expr, sympy.Expr], ...] = tuple(
            (a, b) for a, b in merged if a != 0
        )

    def __add__(self, other: "StringOp") -> "StringOp":
        return StringOp(
            self.alg, self.differential + other.differential, self.strings + other.strings
        )

    def __neg__(self) -> "StringOp":
        return StringOp(self.alg, -self.differential, [(-a, b) for a, b in self.strings])

    def __sub__(self, other: "StringOp") -> "StringOp":
        return self + (-other)

    def __mul__(self, other: "StringOp") -> "StringOp":
        return string_mul(self, other)

    def to_series(self, floor: Optional[int] = None) -> Psdo:
        target = resolve_floor(floor)
        inv = Psdo.d(self.alg, -1)
        total = self.differential
        for a, b in self.strings:
            term = Psdo.function(self.alg, a).compose(
                inv.compose(Psdo.function(self.alg, b), floor=target), floor=target
            )
            total = total + term
        return total

    def to_fraction(self) -> RationalOp:
        """As a right fraction: a d^-1 b = a o ((1/b) d)^-1."""
        result = from_diffop(self.differential)
        for a, b in self.strings:
            term = make_fraction(
                Psdo.function(self.alg, a),
                Psdo(self.alg, {1: 1 / b}),
            )
            result = frac_add(result, term)
        return result

    def compare(self, other: "StringOp", floor: Optional[int] = None) -> Agreement:
        return self.to_series(floor).compare(other.to_series(floor))

    def to_text(self) -> str:
        parts = [] if self.differential.is_zero() else [self.differential.to_text()]
        for a, b in self.strings:
            left = "" if a == 1 else f"({to_text(self.alg, a)})*"
            right = "" if b == 1 else f"*({to_text(self.alg, b)})"
            parts.append(f"{left}d^-1{right}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"StringOp({self.to_text()})"


def _times_dinv(M: Psdo) -> Tuple[Psdo, sympy.Expr]:
    """M o d^-1 = Q + r d^-1 for differential M."""
    alg = M.alg
    if M.order is None:
        return Psdo.zero(alg), sympy.Integer(0)
    Q, R = right_divide(M, Psdo.d(alg))
    return Q, R.coeff(0)


def _dinv_times(M: Psdo) -> Tuple[Psdo, sympy.Expr]:
    """d^-1 o M = Q + d^-1 r for differential M, via the adjoint of M* o d^-1."""
    Q, r = _times_dinv(M.adjoint())
    return -Q.adjoint(), r


def string_mul(S1: StringOp, S2: StringOp) -> StringOp:
    """Exact product in weakly non-local form.

    Uses d^-1 o q o d^-1 = rho d^-1 - d^-1 rho with rho' = q.

    Raises:
        NotWeaklyClosed: if a needed antiderivative does not exist
    """
    alg = S1.alg
    D1, D2 = S1.differential, S2.differential
    local = D1.compose(D2)
    strings = []
    for c, d in S2.strings:
        Q, r = _times_dinv(D1.compose(Psdo.function(alg, c)))
        local = local + Q.compose(Psdo.function(alg, d))
        strings.append((r, d))
    for a, b in S1.strings:
        Q, r = _dinv_times(Psdo.function(alg, b).compose(D2))
        local = local + Psdo.function(alg, a).compose(Q)
        strings.append((a, r))
        for c, d in S2.strings:
            q = normalize(b * c)
            try:
                rho = alg.antiderivative(q)
            except NotExact:
                raise NotWeaklyClosed(q, alg)
            strings.append((a * rho, d))
            strings.append((-a, rho * d))
    return StringOp(alg, local, strings)
