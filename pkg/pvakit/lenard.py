###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Lenard-Magri recursion for a pair H = A B^-1, K = C D^-1.

Starting from F_-1 in ker B (or from a density h_0), each step solves

    B F_(n+1) = xi_n,   P_(n+1) = A F_(n+1),   C G_(n+1) = P_(n+1),   xi_(n+1) = D G_(n+1)

checks that xi_(n+1) is closed and recovers the density h_(n+1) with
delta h_(n+1)/delta u = xi_(n+1) by the homotopy formula. Failures are reported as
`Obstruction` errors naming the stage; nothing is skipped silently.
"""
# stdlib
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

# third-party
import sympy

# package
from pvakit.const import PvakitError
from pvakit.diffalg import (
    DiffAlgebra,
    LocalFunctional,
    NotClosed,
    NotExact,
    Vector,
    normalize,
    to_text,
)
from pvakit.psdo import OpMatrix, Psdo, left_multiple, right_divide
from pvakit.ratop import RationalOp
from pvakit.report import HierarchyReport, StepReport

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)


class NoSolution(PvakitError):
    def __init__(self, detail):
        self.detail = detail
        super().__init__(f"Linear system has no solution in the field: {detail}")


class AnsatzExhausted(PvakitError):
    def __init__(self, order_bound, degree_bound):
        self.order_bound = order_bound
        self.degree_bound = degree_bound
        super().__init__(
            f"No polynomial solution of differential order <= {order_bound} "
            f"and degree <= {degree_bound}"
        )


class Obstruction(PvakitError):
    def __init__(self, stage: str, step: int, detail: str):
        self.stage = stage
        self.step = step
        self.detail = detail
        super().__init__(f"Recursion stopped at step {step}, stage '{stage}': {detail}")


# -- linear solver --


def _integrating_factor(alg: DiffAlgebra, p, q) -> Optional[sympy.Expr]:
    """r with r'/r = (q - p')/p, as a product of powers of factors of p and q."""
    w = normalize((q - alg.total_derivative(p)) / p)
    if w == 0:
        return sympy.Integer(1)
    factors = set()
    for e in (p, q, w):
        num, den = sympy.fraction(sympy.together(e))
        for part in (num, den):
            for f, _ in sympy.factor_list(part)[1]:
                if alg.jets_of(f):
                    factors.add(f)
    factors = sorted(factors, key=sympy.default_sort_key)
    if not factors:
        return None
    ks = [sympy.Dummy(f"k{i}") for i in range(len(factors))]
    residual = w - sum(k * alg.total_derivative(f) / f for k, f in zip(ks, factors))
    solution = alg.solve_constants([residual], ks)
    if solution is None:
        return None
    powers = [solution[k] for k in ks]
    if not all(isinstance(x, sympy.Rational) for x in powers):
        return None
    return sympy.Mul(*(f**x for f, x in zip(factors, powers)))


def _ansatz(alg: DiffAlgebra, L: Psdo, g, order_bound: int, degree_bound: int):
    jets = [alg.jet(i, n) for i in range(alg.ell) for n in range(order_bound + 1)]
    monomials = [sympy.Integer(1)]
    for degree in range(1, degree_bound + 1):
        monomials.extend(sympy.Mul(*c) for c in combinations_with_replacement(jets, degree))
    ks = [sympy.Dummy(f"a{i}") for i in range(len(monomials))]
    X = sympy.Add(*(k * m for k, m in zip(ks, monomials)))
    solution = alg.solve_constants([L.apply(X) - g], ks)
    if solution is None:
        raise AnsatzExhausted(order_bound, degree_bound)
    return normalize(X.xreplace(solution))


def solve_scalar(
    L: Psdo, g, order_bound: int = 3, degree_bound: int = 3
) -> sympy.Expr:
    """One X with L(d)X = g.

    Raises:
        NoSolution: if no X exists in the field
        AnsatzExhausted: if the bounded polynomial ansatz finds nothing
    """
    alg = L.alg
    g = normalize(g)
    if L.order is None:
        if g == 0:
            return sympy.Integer(0)
        raise NoSolution(f"zero operator with right side {to_text(alg, g)}")
    if g == 0:
        return sympy.Integer(0)
    if L.order == 0:
        return normalize(g / L.coeff(0))
    if L.coeff(0) == 0:
        M, _ = right_divide(L, Psdo.d(alg))
        Y = solve_scalar(M, g, order_bound, degree_bound)
        try:
            return alg.antiderivative(Y)
        except NotExact as err:
            if M.order == 0:
                raise NoSolution(str(err))
            _log.debug(f"Antiderivative failed, trying ansatz: {err}")
            return _ansatz(alg, L, g, order_bound, degree_bound)
    if L.order == 1:
        p, q = L.coeff(1), L.coeff(0)
        r = _integrating_factor(alg, p, q)
        if r is not None:
            try:
                return normalize(alg.antiderivative(normalize(r * g)) / (r * p))
            except NotExact as err:
                raise NoSolution(str(err))
    return _ansatz(alg, L, g, order_bound, degree_bound)


def _is_triangular(rows, lower: bool) -> bool:
    n = len(rows)
    for r in range(n):
        for c in range(n):
            if (c > r if lower else c < r) and rows[r][c].order is not None:
                return False
    return True


def solve_linear(
    Bop: Union[OpMatrix, Psdo],
    xi: Sequence,
    order_bound: int = 3,
    degree_bound: int = 3,
) -> Vector:
    """X with Bop(d)X = xi, verified by substitution.

    Triangular operators are solved by substitution; others are first brought to
    upper triangular form with exact row operations.

    Raises:
        NoSolution: if some scalar equation has no solution, or verification fails
        AnsatzExhausted: if a scalar equation needs an ansatz and it finds nothing
    """
    if isinstance(Bop, Psdo):
        Bop = OpMatrix.scalar(Bop)
    xi = tuple(normalize(x) for x in xi)
    n = Bop.shape[0]
    if len(xi) != n:
        raise ValueError(f"Right side length {len(xi)} != {n}")
    if Bop.is_identity():
        return xi
    rows = [list(r) for r in Bop.rows]
    rhs = list(xi)
    X: List[Optional[sympy.Expr]] = [None] * n
    kw = {"order_bound": order_bound, "degree_bound": degree_bound}
    if _is_triangular(rows, lower=True):
        for r in range(n):
            rest = sum(rows[r][c].apply(X[c]) for c in range(r))
            X[r] = solve_scalar(rows[r][r], rhs[r] - rest, **kw)
    else:
        if not _is_triangular(rows, lower=False):
            for c in range(n):
                cands = [r for r in range(c, n) if rows[r][c].order is not None]
                if not cands:
                    raise NoSolution(f"no pivot in column {c}")
                p = min(cands, key=lambda r: (rows[r][c].order, r))
                rows[c], rows[p] = rows[p], rows[c]
                rhs[c], rhs[p] = rhs[p], rhs[c]
                for j in range(c + 1, n):
                    if rows[j][c].order is None:
                        continue
                    left, right = left_multiple(rows[c][c], rows[j][c])
                    rows[j] = [
                        right.compose(rows[j][k]) - left.compose(rows[c][k]) for k in range(n)
                    ]
                    rhs[j] = normalize(right.apply(rhs[j]) - left.apply(rhs[c]))
        for r in range(n - 1, -1, -1):
            rest = sum(rows[r][c].apply(X[c]) for c in range(r + 1, n))
            X[r] = solve_scalar(rows[r][r], rhs[r] - rest, **kw)
    X = tuple(normalize(x) for x in X)
    residual = [normalize(a - b) for a, b in zip(Bop.apply(X), xi)]
    if any(x != 0 for x in residual):
        raise NoSolution(f"verification failed, residual {residual}")
    return X


# -- recursion --


@dataclass
class LenardConfig:
    """Pair H = A B^-1, K = C D^-1 with a seed.

    Attributes:
        H: First structure
        K: Second structure
        seed_kernel: F_-1 with B F_-1 = 0
        h0: Density h_0; used alone when no kernel seed is given
        max_steps: Number of recursion steps
        order_bound: Differential order bound for the solver ansatz
        degree_bound: Degree bound for the solver ansatz
    """

    H: RationalOp
    K: RationalOp
    seed_kernel: Optional[Sequence] = None
    h0: Optional[object] = None
    max_steps: int = 3
    order_bound: int = 3
    degree_bound: int = 3

    def __post_init__(self):
        if self.seed_kernel is None and self.h0 is None:
            raise ValueError("A kernel seed or a density h0 is required")
        if self.max_steps < 0:
            raise ValueError(f"Negative number of steps {self.max_steps}")

    @property
    def alg(self) -> DiffAlgebra:
        return self.H.alg

    @property
    def solver_kw(self) -> Dict[str, int]:
        return {"order_bound": self.order_bound, "degree_bound": self.degree_bound}


@dataclass
class HierarchyState:
    """Sequences of the recursion, indexed by n = 0, 1, ..."""

    alg: DiffAlgebra
    h: List[Optional[LocalFunctional]] = field(default_factory=list)
    P: List[Vector] = field(default_factory=list)
    xi: List[Vector] = field(default_factory=list)
    F: List[Vector] = field(default_factory=list)
    G: List[Vector] = field(default_factory=list)
    flags: List[Dict[str, bool]] = field(default_factory=list)
    checks: List[Dict[str, bool]] = field(default_factory=list)
    involution: Dict[str, bool] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.P)

    def to_report(self, operator: str, obstruction: Optional[str] = None) -> HierarchyReport:
        alg = self.alg
        steps = []
        for n in range(self.steps):
            h = self.h[n]
            steps.append(
                StepReport(
                    n=n,
                    h=to_text(alg, h.normalized().density) if h is not None else None,
                    P=[to_text(alg, x) for x in self.P[n]],
                    xi=[to_text(alg, x) for x in self.xi[n]],
                    closed=self.flags[n]["closed"],
                    exact=self.flags[n]["exact"],
                    polynomial=self.flags[n]["polynomial"],
                    checks=self.checks[n],
                )
            )
        return HierarchyReport(
            operator=operator,
            steps=steps,
            involution=dict(self.involution),
            obstruction=obstruction,
            assumptions=["orthogonality conditions are assumed, not verified"],
        )


def _equal(a: Sequence, b: Sequence) -> bool:
    return all(normalize(x - y) == 0 for x, y in zip(a, b))


def _close(alg: DiffAlgebra, state: HierarchyState, n: int, xi: Vector, given_h=None):
    """Record xi_n with its density."""
    closed = alg.is_closed(xi)
    polynomial = all(alg.is_polynomial(x) for x in xi)
    if not closed:
        raise Obstruction("closedness", n, f"xi = {[to_text(alg, x) for x in xi]} is not closed")
    h = None
    if given_h is not None:
        h = LocalFunctional(alg, normalize(given_h))
    elif polynomial:
        try:
            h = alg.homotopy_reconstruct(xi)
        except NotClosed as err:
            raise Obstruction("closedness", n, str(err))
    state.xi.append(xi)
    state.h.append(h)
    state.flags.append({"closed": closed, "exact": h is not None, "polynomial": polynomial})


def _solve(stage: str, n: int, op: OpMatrix, rhs: Sequence, config: LenardConfig) -> Vector:
    try:
        return solve_linear(op, rhs, **config.solver_kw)
    except (NoSolution, AnsatzExhausted) as err:
        raise Obstruction(stage, n, str(err))


def lenard_seed(config: LenardConfig) -> HierarchyState:
    """State holding h_0, P_0 and xi_0.

    Raises:
        Obstruction: if the seed is inconsistent
    """
    alg = config.alg
    A, B = config.H.A, config.H.B
    C, D = config.K.A, config.K.B
    state = HierarchyState(alg)
    checks = {}
    if config.seed_kernel is not None:
        F = tuple(normalize(x) for x in config.seed_kernel)
        residual = B.apply(F)
        if any(x != 0 for x in residual):
            raise Obstruction("seed", 0, f"B F_-1 = {[to_text(alg, x) for x in residual]}")
        P = A.apply(F)
        G = _solve("solve C", 0, C, P, config)
        xi = D.apply(G)
        _close(alg, state, 0, xi)
        if config.h0 is not None:
            checks["seed_h0"] = _equal(xi, alg.variational_derivative(config.h0))
            if state.h[0] is not None:
                checks["seed_h0"] &= state.h[0].equals(config.h0)
    else:
        F = alg.zero_vector()
        xi = alg.variational_derivative(config.h0)
        G = _solve("solve D", 0, D, xi, config)
        P = C.apply(G)
        _close(alg, state, 0, xi, given_h=config.h0)
    checks["C G = P"] = _equal(C.apply(G), P)
    checks["D G = xi"] = _equal(D.apply(G), xi)
    state.F.append(F)
    state.G.append(G)
    state.P.append(P)
    state.checks.append(checks)
    return state


def lenard_step(state: HierarchyState, config: LenardConfig) -> HierarchyState:
    """Extend the state by one step.

    Raises:
        Obstruction: if a solve fails or the new covector is not closed
    """
    alg = config.alg
    A, B = config.H.A, config.H.B
    C, D = config.K.A, config.K.B
    n = state.steps
    _log.info(f"[begin] Lenard step {n}")
    xi_prev = state.xi[-1]
    F = _solve("solve B", n, B, xi_prev, config)
    P = A.apply(F)
    G = _solve("solve C", n, C, P, config)
    xi = D.apply(G)
    _close(alg, state, n, xi)
    checks = {
        "B F = xi": _equal(B.apply(F), xi_prev),
        "C G = P": _equal(C.apply(G), P),
        "D G = xi": _equal(D.apply(G), xi),
    }
    if state.h[n] is not None:
        checks["delta h = xi"] = _equal(state.h[n].variational_derivative(), xi)
    state.F.append(F)
    state.G.append(G)
    state.P.append(P)
    state.checks.append(checks)
    _log.info(f"[ end ] Lenard step {n}")
    return state


def lenard_run(config: LenardConfig) -> HierarchyState:
    """Seed, then `max_steps` steps; the state holds h_0 .. h_max_steps.

    Raises:
        Obstruction: with the step index, from the seed or any step
    """
    state = lenard_seed(config)
    for _ in range(config.max_steps):
        lenard_step(state, config)
    return state


def associate(h, H: RationalOp, **solver_kw) -> Tuple[Vector, Vector]:
    """(F, P) with B F = delta h/delta u and P = A F, certifying h <-> P for H."""
    from pvakit.pva import hamiltonian_vector

    return hamiltonian_vector(h, H, **solver_kw)


def verify_involution(
    state: HierarchyState, H: RationalOp, K: RationalOp, **solver_kw
) -> Dict[str, bool]:
    """Pairwise brackets of the densities for H and K, and [P_m, P_n] in ker B* and ker D*.

    Results are stored on the state and returned; keys name the pair. A pair with a
    missing density counts as failed.
    """
    from pvakit.pva import NotHamiltonianFunctional, functional_bracket

    alg = state.alg
    B_star, D_star = H.B.adjoint(), K.B.adjoint()
    results = {}
    n = state.steps
    for m in range(n):
        for k in range(m + 1, n):
            hm, hk = state.h[m], state.h[k]
            if hm is not None and hk is not None:
                for name, op in (("H", H), ("K", K)):
                    try:
                        value = functional_bracket(hm.density, hk.density, op, **solver_kw)
                        results[f"{name}({m},{k})"] = value.is_zero()
                    except NotHamiltonianFunctional as err:
                        _log.warning(f"Bracket {name}({m},{k}) not computed: {err}")
                        results[f"{name}({m},{k})"] = False
            else:
                missing = m if hm is None else k
                _log.warning(f"Brackets of pair ({m},{k}) not computed: no density h_{missing}")
                for name in ("H", "K"):
                    results[f"{name}({m},{k})"] = False
            commutator = alg.ev_bracket(state.P[m], state.P[k])
            in_kernels = all(x == 0 for x in B_star.apply(commutator)) and all(
                x == 0 for x in D_star.apply(commutator)
            )
            results[f"[P{m},P{k}]"] = in_kernels
    state.involution.update(results)
    return results
