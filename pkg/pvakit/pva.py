###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Lambda brackets defined by rational matrix operators, and the structure checks:
skewadjointness, the Jacobi identity (an exact polynomial engine and a windowed
engine), compatibility of pairs, the symplectic identity and Hamiltonian functionals.

Brackets are computed with the Master Formula in operator form,
{f_lam g}_H = symbol of D_g o H o D_f*, so fraction and series inputs share one path.
"""
# stdlib
from collections import defaultdict
import logging
import random
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

# third-party
import sympy

# package
from pvakit.const import Engine, PvakitError, Verdict
from pvakit.diffalg import LAM, MU, DiffAlgebra, LocalFunctional, normalize, to_text
from pvakit.lambdamu import (
    Direction,
    DoubleSeries,
    FloorExceeded,
    Inconsistent,
    LamMuElement,
    WindowTooSmall,
    apply_shifted,
    reconstruct_from_window,
)
from pvakit.psdo import OpMatrix, Psdo
from pvakit.ratop import (
    RationalOp,
    frac_add,
    frac_scale,
    from_diffop,
    to_series,
)
from pvakit.report import CheckReport, JacobiReport, TripleVerdict
from pvakit.util import Defaults, Window, resolve_floor

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)


class IsotropyFailed(PvakitError):
    def __init__(self, A: OpMatrix, B: OpMatrix):
        super().__init__(
            f"A*B + B*A != 0 for A = {A.to_text()}, B = {B.to_text()}"
        )


class NotSkewadjoint(PvakitError):
    def __init__(self, op_text: str):
        super().__init__(f"Operator is not skewadjoint: {op_text}")


class NotHamiltonianFunctional(PvakitError):
    def __init__(self, f, reason):
        self.reason = reason
        super().__init__(f"No B(d)F = delta f/delta u for f = {f}: {reason}")


OperatorLike = Union[RationalOp, OpMatrix, Psdo]


def as_fraction(H: OperatorLike) -> RationalOp:
    if isinstance(H, RationalOp):
        return H
    return from_diffop(H)


class BracketContext:
    """Operator defining a lambda bracket, with its series expansion cached at the
    deepest floor requested so far."""

    def __init__(self, H: OperatorLike, floor: Optional[int] = None):
        self.H = as_fraction(H)
        self.alg: DiffAlgebra = self.H.alg
        self.floor = resolve_floor(floor)
        self._series: Optional[OpMatrix] = None
        self._series_floor: Optional[int] = None

    @property
    def ell(self) -> int:
        return self.H.shape[0]

    def is_local(self) -> bool:
        return self.H.is_differential()

    def series(self, floor: Optional[int] = None) -> OpMatrix:
        floor = self.floor if floor is None else floor
        if self.is_local():
            return self.H.A
        if self._series is None or self._series_floor > floor:
            _log.debug(f"Expanding {self.H.to_text()} to floor {floor}")
            self._series = to_series(self.H, floor)
            self._series_floor = floor
        return self._series

    def top(self) -> int:
        """Largest exponent appearing in the operator."""
        order = self.series().order()
        return 0 if order is None else order

    def to_text(self) -> str:
        return self.H.to_text()


def master_bracket(f, g, ctx: BracketContext, floor: Optional[int] = None) -> Psdo:
    """{f_lam g}_H as a lambda symbol valid down to `floor`.

    Raises:
        FloorExceeded: if the result cannot be delivered to the floor
    """
    alg = ctx.alg
    target = ctx.floor if floor is None else floor
    Dg = alg.frechet([g])
    Dfs = alg.frechet_adjoint([f])
    og, of = Dg.order() or 0, Dfs.order() or 0
    Hs = ctx.series(target - og - of)
    result = Dg.compose(Hs, floor=target - of).compose(Dfs, floor=target)[0, 0]
    if not result.exact and result.floor > target:
        raise FloorExceeded(target, result.floor)
    return result


def beltrami_bracket(f, g, alg: DiffAlgebra) -> Psdo:
    """Bracket with <u_i lam u_j> = delta_ij."""
    return master_bracket(f, g, BracketContext(OpMatrix.identity(alg, alg.ell)))


# -- axioms --


def check_sesquilinearity(ctx: BracketContext, f, g, floor: Optional[int] = None) -> bool:
    """{df_lam g} = -lam {f_lam g} and {f_lam dg} = (lam + d){f_lam g}."""
    alg = ctx.alg
    S = master_bracket(f, g, ctx, floor)
    left = master_bracket(alg.total_derivative(f), g, ctx, floor)
    right = master_bracket(f, alg.total_derivative(g), ctx, floor)
    ok_left = left.agrees(-S.times_lambda(1))
    ok_right = right.agrees(Psdo.d(alg).compose(S, floor=S.floor if not S.exact else None))
    return ok_left and ok_right


def check_leibniz(ctx: BracketContext, f, g, h, floor: Optional[int] = None) -> bool:
    """Left rule {f_lam gh} = g{f_lam h} + h{f_lam g}; right rule
    {fh_lam g} = {f_(lam+d) g}_-> h + {h_(lam+d) g}_-> f."""
    target = ctx.floor if floor is None else floor
    left = master_bracket(f, g * h, ctx, target)
    expected = master_bracket(f, h, ctx, target).scale(g) + master_bracket(
        f, g, ctx, target
    ).scale(h)
    right = master_bracket(f * h, g, ctx, target)
    shifted = apply_shifted(master_bracket(f, g, ctx, target), h, floor=target) + (
        apply_shifted(master_bracket(h, g, ctx, target), f, floor=target)
    )
    return left.agrees(expected) and right.agrees(shifted)


def check_axioms(
    ctx: BracketContext, rng: Optional[random.Random] = None, draws: int = 3
) -> CheckReport:
    """Sesquilinearity and both Leibniz rules on random polynomial densities."""
    rng = rng or random.Random(0)
    alg = ctx.alg
    results = {"sesquilinearity": True, "leibniz": True}
    for _ in range(draws):
        f, g, h = (alg.random_density(rng) for _ in range(3))
        results["sesquilinearity"] &= check_sesquilinearity(ctx, f, g)
        results["leibniz"] &= check_leibniz(ctx, f, g, h)
    verdict = Verdict.PASS if all(results.values()) else Verdict.FAIL
    return CheckReport(
        check="axioms", operator=ctx.to_text(), result=verdict, details=results
    )


# -- skewadjointness --


def dirac_isotropy(A: OpMatrix, B: OpMatrix) -> bool:
    """A* o B + B* o A == 0, exactly."""
    total = A.adjoint().compose(B) + B.adjoint().compose(A)
    return total.equals_exactly(OpMatrix.zero(A.alg, *total.shape))


def check_skewadjoint(H: OperatorLike) -> bool:
    R = as_fraction(H)
    if R.is_differential():
        total = R.A + R.A.adjoint()
        return total.equals_exactly(OpMatrix.zero(R.alg, *total.shape))
    return dirac_isotropy(R.A, R.B)


def check_skewsymmetry(ctx: BracketContext, floor: Optional[int] = None) -> bool:
    """{u_j lam u_i} = -{u_i (-lam-d) u_j} on all generators, to the floor."""
    alg = ctx.alg
    for i in range(ctx.ell):
        for j in range(i, ctx.ell):
            ij = master_bracket(alg.jet(i), alg.jet(j), ctx, floor)
            ji = master_bracket(alg.jet(j), alg.jet(i), ctx, floor)
            if not (ji + ij.adjoint(ij.floor if not ij.exact else floor)).agrees(
                Psdo.zero(alg)
            ):
                return False
    return True


def skew_report(H: OperatorLike, floor: Optional[int] = None) -> CheckReport:
    ctx = BracketContext(H, floor)
    adjoint = check_skewadjoint(ctx.H)
    symmetric = check_skewsymmetry(ctx, floor)
    return CheckReport(
        check="skew",
        operator=ctx.to_text(),
        result=Verdict.PASS if adjoint and symmetric else Verdict.FAIL,
        details={"skewadjoint": adjoint, "skewsymmetric_on_generators": symmetric},
    )


# -- exact Jacobi engine --


class _ExactJacobi:
    """Polynomial identity in lam, mu equivalent to the Jacobi identity for A o B^-1."""

    def __init__(self, A: OpMatrix, B: OpMatrix):
        self.alg = A.alg
        self.A, self.B = A, B
        self.ell = A.shape[0]
        orders = [
            self.alg.order(c) for M in (A, B) for e in M.entries() for c in e.coeffs.values()
        ]
        self.max_jet = max([o for o in orders if o is not None], default=-1)
        self._cache: Dict = {}

    def _sym(self, M: str, p: int, q: int, var) -> sympy.Expr:
        key = ("sym", M, p, q, var)
        if key not in self._cache:
            self._cache[key] = getattr(self, M)[p, q].symbol(var)
        return self._cache[key]

    def _dsym(self, M: str, p: int, q: int, t: int, n: int, var) -> sympy.Expr:
        key = ("dsym", M, p, q, t, n, var)
        if key not in self._cache:
            self._cache[key] = getattr(self, M)[p, q].partial(t, n).symbol(var)
        return self._cache[key]

    def _shifted(self, M: str, p: int, q: int, n: int, var) -> sympy.Expr:
        """(var + d)^n M_pq(var)"""
        key = ("shift", M, p, q, n, var)
        if key not in self._cache:
            self._cache[key] = Psdo.d(self.alg, n).shift_apply(var, self._sym(M, p, q, var))
        return self._cache[key]

    def _star(self, M: str, k: int, s: int) -> Psdo:
        """(M*)_ks = (M_sk)*"""
        key = ("star", M, k, s)
        if key not in self._cache:
            self._cache[key] = getattr(self, M)[s, k].adjoint()
        return self._cache[key]

    def total(self, i: int, j: int, k: int) -> sympy.Expr:
        alg, ell = self.alg, self.ell
        nu = LAM + MU
        jets = range(self.max_jet + 1)
        parts = []
        for s in range(ell):
            inner = {"B": [], "A": []}
            for M in ("B", "A"):
                for t in range(ell):
                    for n in jets:
                        inner[M].append(
                            self._dsym(M, s, j, t, n, MU) * self._shifted("A", t, i, n, LAM)
                            - self._dsym(M, s, i, t, n, LAM) * self._shifted("A", t, j, n, MU)
                        )
            parts.append(self._star("A", k, s).shift_apply(nu, sympy.Add(*inner["B"])))
            parts.append(self._star("B", k, s).shift_apply(nu, sympy.Add(*inner["A"])))
            for n in jets:
                arg = sympy.Add(
                    *(
                        self._dsym("A", t, i, s, n, LAM) * self._sym("B", t, j, MU)
                        + self._dsym("B", t, i, s, n, LAM) * self._sym("A", t, j, MU)
                        for t in range(ell)
                    )
                )
                if arg == 0:
                    continue
                op = self._star("A", k, s).compose(Psdo(alg, {n: sympy.Integer(-1) ** n}))
                parts.append(op.shift_apply(nu, arg))
        return sympy.Add(*parts)

    def verdict(self, i: int, j: int, k: int) -> TripleVerdict:
        num, den = sympy.fraction(sympy.together(self.total(i, j, k)))
        num = sympy.expand(num)
        if num == 0:
            return TripleVerdict(i=i, j=j, k=k, verdict=Verdict.PASS)
        (a, b), c = sympy.Poly(num, LAM, MU).terms()[0]
        witness = f"coefficient of λ^{a} μ^{b}: {to_text(self.alg, normalize(c / den))}"
        return TripleVerdict(i=i, j=j, k=k, verdict=Verdict.FAIL, witness=witness)


def _triples(ell: int):
    for i in range(ell):
        for j in range(ell):
            for k in range(ell):
                yield i, j, k


def jacobi_exact(A: OpMatrix, B: OpMatrix, operator: Optional[str] = None) -> JacobiReport:
    """Exact Jacobi test for A o B^-1 as a polynomial identity in lam and mu.

    Raises:
        IsotropyFailed: if A*B + B*A != 0
    """
    if not dirac_isotropy(A, B):
        raise IsotropyFailed(A, B)
    text = operator or RationalOp(A, B).to_text()
    _log.info(f"[begin] exact Jacobi check of {text}")
    engine = _ExactJacobi(A, B)
    verdicts = [engine.verdict(i, j, k) for i, j, k in _triples(A.shape[0])]
    _log.info(f"[ end ] exact Jacobi check of {text}")
    return JacobiReport(operator=text, engine=Engine.EXACT.value, verdicts=verdicts)


# -- windowed engines --


def _window_dict(window: Window) -> Dict[str, int]:
    return {
        "floor": window.floor,
        "surplus": window.surplus,
        "depth": window.depth,
        "max_pole": window.max_pole,
    }


def build_double_series(
    alg: DiffAlgebra,
    direction: Direction,
    outer: Dict[int, Psdo],
    degrees: Sequence[int],
    outer_top: int,
    outer_floor: int,
) -> DoubleSeries:
    """DoubleSeries of sum_n x^n inner_n(y) for the given total degrees.

    `outer` maps outer exponents n in [outer_floor, outer_top] to inner series; absent
    exponents are zero.
    """
    series = DoubleSeries(alg, direction)
    for d in degrees:
        lo, hi = d - outer_top, d - outer_floor
        series.window[d] = (lo, hi)
        for b in range(lo, hi + 1):
            inner = outer.get(d - b)
            if inner is None:
                continue
            value = inner.coeff(b)
            if value != 0:
                series.coeffs[(d, b)] = value
    return series


def _canonical(series: DoubleSeries, window: Window) -> LamMuElement:
    return reconstruct_from_window(
        series, surplus=window.surplus, max_pole=window.max_pole
    )


class _WindowedJacobi:
    """Jacobi expression J(M, S) = {u_i lam {u_j mu u_k}_S}_M - {u_j mu {u_i lam u_k}_S}_M
    - {{u_i lam u_j}_S lam+mu u_k}_M, reconstructed degree by degree."""

    _DIRECTIONS = (("mu", "lam"), ("lam", "mu"), ("lam", "nu"))

    def __init__(self, bracket: BracketContext, inner: BracketContext, window: Window):
        self.M, self.S, self.window = bracket, inner, window
        self.alg = bracket.alg

    def _outer(self, p: int, q: int) -> Tuple[Dict[int, sympy.Expr], int]:
        entry = self.S.series(self.window.floor)[p, q]
        coeffs = {n: c for n, c in entry.coeffs.items() if n >= self.window.floor}
        top = max(coeffs, default=self.window.floor)
        return coeffs, top

    def top_degree(self) -> int:
        best = None
        M_top = self.M.top()
        for p in range(self.S.ell):
            for q in range(self.S.ell):
                coeffs, _ = self._outer(p, q)
                for n, h in coeffs.items():
                    order = self.alg.order(h)
                    if order is None:
                        continue
                    d = n + order + M_top
                    best = d if best is None else max(best, d)
        return best

    def _term(self, kind: int, i: int, j: int, k: int, degrees: List[int]) -> LamMuElement:
        alg = self.alg
        d_min = min(degrees)
        if kind == 0:
            (p, q), f_of = (k, j), (lambda h: (alg.jet(i), h))
        elif kind == 1:
            (p, q), f_of = (k, i), (lambda h: (alg.jet(j), h))
        else:
            (p, q), f_of = (j, i), (lambda h: (h, alg.jet(k)))
        coeffs, top = self._outer(p, q)
        inner = {}
        for n, h in coeffs.items():
            if not alg.jets_of(h):
                continue
            f, g = f_of(h)
            inner[n] = master_bracket(f, g, self.M, floor=d_min - n)
        series = build_double_series(
            alg, self._DIRECTIONS[kind], inner, degrees, top, self.window.floor
        )
        return _canonical(series, self.window)

    def element(self, i: int, j: int, k: int, degrees: List[int]) -> LamMuElement:
        t1 = self._term(0, i, j, k, degrees)
        t2 = self._term(1, i, j, k, degrees)
        t3 = self._term(2, i, j, k, degrees)
        return t1 - t2 - t3


def _degrees(top: Optional[int], window: Window) -> List[int]:
    if top is None:
        return []
    return list(range(top, top - window.depth - 1, -1))


def _windowed_verdict(i, j, k, compute) -> TripleVerdict:
    try:
        element = compute()
    except (WindowTooSmall, Inconsistent, FloorExceeded) as err:
        _log.info(f"Window insufficient for ({i},{j},{k}): {err}")
        return TripleVerdict(i=i, j=j, k=k, verdict=Verdict.UNDETERMINED, witness=str(err))
    if element.is_zero():
        return TripleVerdict(i=i, j=j, k=k, verdict=Verdict.PASS)
    term = element.to_terms()[0]
    witness = f"{term['coeff']} at λ^{term['lam']} μ^{term['mu']} (λ+μ)^{term['nu']}"
    return TripleVerdict(i=i, j=j, k=k, verdict=Verdict.FAIL, witness=witness)


def jacobi_windowed(
    H: OperatorLike, window: Optional[Window] = None, operator: Optional[str] = None
) -> JacobiReport:
    """Jacobi test on generators by reconstruction from expansion windows.

    Raises:
        NotSkewadjoint: if H is not skewadjoint
    """
    window = window or Defaults().window
    ctx = BracketContext(H, window.floor)
    text = operator or ctx.to_text()
    if not check_skewadjoint(ctx.H):
        raise NotSkewadjoint(text)
    _log.info(f"[begin] windowed Jacobi check of {text}")
    engine = _WindowedJacobi(ctx, ctx, window)
    degrees = _degrees(engine.top_degree(), window)
    verdicts = []
    for i, j, k in _triples(ctx.ell):
        verdicts.append(
            _windowed_verdict(i, j, k, lambda: engine.element(i, j, k, degrees))
        )
    _log.info(f"[ end ] windowed Jacobi check of {text}")
    return JacobiReport(
        operator=text,
        engine=Engine.WINDOWED.value,
        window=_window_dict(window),
        verdicts=verdicts,
    )


def check_jacobi(
    H: OperatorLike,
    engine: Engine = Engine.EXACT,
    window: Optional[Window] = None,
    operator: Optional[str] = None,
) -> List[JacobiReport]:
    """Run one or both engines; the exact engine needs H as a fraction A o B^-1."""
    R = as_fraction(H)
    reports = []
    if engine in (Engine.EXACT, Engine.BOTH):
        reports.append(jacobi_exact(R.A, R.B, operator))
    if engine in (Engine.WINDOWED, Engine.BOTH):
        reports.append(jacobi_windowed(R, window, operator))
    return reports


def check_compatible(
    H: OperatorLike,
    K: OperatorLike,
    window: Optional[Window] = None,
    operator: Optional[str] = None,
) -> JacobiReport:
    """Mixed Jacobi identity J(H, K) + J(K, H) = 0 on generators."""
    window = window or Defaults().window
    h, k_ = BracketContext(H, window.floor), BracketContext(K, window.floor)
    if h.ell != k_.ell:
        raise ValueError(f"Size mismatch {h.ell} != {k_.ell}")
    text = operator or f"{h.to_text()} | {k_.to_text()}"
    _log.info(f"[begin] compatibility check of {text}")
    hk = _WindowedJacobi(h, k_, window)
    kh = _WindowedJacobi(k_, h, window)
    tops = [t for t in (hk.top_degree(), kh.top_degree()) if t is not None]
    degrees = _degrees(max(tops) if tops else None, window)
    verdicts = []
    for i, j, k in _triples(h.ell):
        verdicts.append(
            _windowed_verdict(
                i, j, k, lambda: hk.element(i, j, k, degrees) + kh.element(i, j, k, degrees)
            )
        )
    _log.info(f"[ end ] compatibility check of {text}")
    return JacobiReport(
        check="compatibility",
        operator=text,
        engine=Engine.WINDOWED.value,
        window=_window_dict(window),
        verdicts=verdicts,
    )


def check_pencil(
    H: OperatorLike, K: OperatorLike, alpha=1, beta=1, window: Optional[Window] = None
) -> JacobiReport:
    """Windowed Jacobi test of alpha H + beta K."""
    pencil = frac_add(frac_scale(as_fraction(H), alpha), frac_scale(as_fraction(K), beta))
    return jacobi_windowed(pencil, window)


# -- symplectic identity --


def _symplectic_exact(S: OpMatrix) -> List[TripleVerdict]:
    alg = S.alg
    ell = S.shape[0]
    nu = LAM + MU
    max_jet = max(
        [o for e in S.entries() for c in e.coeffs.values() if (o := alg.order(c)) is not None],
        default=-1,
    )
    verdicts = []
    for i, j, k in _triples(ell):
        parts = []
        for n in range(max_jet + 1):
            parts.append(S[k, i].partial(j, n).symbol(MU) * LAM**n)
            parts.append(-S[k, j].partial(i, n).symbol(LAM) * MU**n)
            op = Psdo(alg, {n: sympy.Integer(-1) ** n})
            parts.append(op.shift_apply(nu, S[i, j].partial(k, n).symbol(LAM)))
        num, den = sympy.fraction(sympy.together(sympy.Add(*parts)))
        num = sympy.expand(num)
        if num == 0:
            verdicts.append(TripleVerdict(i=i, j=j, k=k, verdict=Verdict.PASS))
            continue
        (a, b), c = sympy.Poly(num, LAM, MU).terms()[0]
        witness = f"coefficient of λ^{a} μ^{b}: {to_text(alg, normalize(c / den))}"
        verdicts.append(TripleVerdict(i=i, j=j, k=k, verdict=Verdict.FAIL, witness=witness))
    return verdicts


def _symplectic_windowed(ctx: BracketContext, window: Window) -> List[TripleVerdict]:
    alg = ctx.alg
    series = ctx.series(window.floor)
    directions = (("mu", "lam"), ("lam", "mu"), ("lam", "nu"))
    best = None
    for e in series.entries():
        for n, c in e.coeffs.items():
            order = alg.order(c)
            if order is not None:
                best = n + order if best is None else max(best, n + order)
    degrees = _degrees(best, window)
    verdicts = []

    def term(entry: Psdo, inner_of, direction) -> LamMuElement:
        coeffs = {n: c for n, c in entry.coeffs.items() if n >= window.floor}
        top = max(coeffs, default=window.floor)
        inner = {n: inner_of(c) for n, c in coeffs.items() if alg.jets_of(c)}
        double = build_double_series(alg, direction, inner, degrees, top, window.floor)
        return _canonical(double, window)

    for i, j, k in _triples(ctx.ell):

        def compute(i=i, j=j, k=k):
            t1 = term(series[k, i], lambda c: alg.frechet([c])[0, j], directions[0])
            t2 = term(series[k, j], lambda c: alg.frechet([c])[0, i], directions[1])
            t3 = term(
                series[i, j], lambda c: alg.frechet_adjoint([c])[k, 0], directions[2]
            )
            return t1 - t2 + t3

        verdicts.append(_windowed_verdict(i, j, k, compute))
    return verdicts


def check_symplectic(
    S: OperatorLike, window: Optional[Window] = None, operator: Optional[str] = None
) -> CheckReport:
    """Symplectic identity, exactly for differential S and windowed otherwise.

    Raises:
        NotSkewadjoint: if S is not skewadjoint
    """
    R = as_fraction(S)
    text = operator or R.to_text()
    if not check_skewadjoint(R):
        raise NotSkewadjoint(text)
    if R.is_differential():
        return CheckReport(
            check="symplectic",
            operator=text,
            engine=Engine.EXACT.value,
            verdicts=_symplectic_exact(R.A),
        )
    window = window or Defaults().window
    return CheckReport(
        check="symplectic",
        operator=text,
        engine=Engine.WINDOWED.value,
        window=_window_dict(window),
        verdicts=_symplectic_windowed(BracketContext(R, window.floor), window),
    )


# -- local functionals --


def hamiltonian_vector(f, H: OperatorLike, **solver_kw) -> Tuple[Tuple, Tuple]:
    """(F, P) with B(d)F = delta f/delta u and P = A(d)F.

    Raises:
        NotHamiltonianFunctional: if no F exists in the field
    """
    from pvakit.lenard import AnsatzExhausted, NoSolution, solve_linear

    R = as_fraction(H)
    xi = R.alg.variational_derivative(f)
    try:
        F = solve_linear(R.B, xi, **solver_kw)
    except (NoSolution, AnsatzExhausted) as err:
        raise NotHamiltonianFunctional(to_text(R.alg, f), str(err))
    return F, R.A.apply(F)


def functional_bracket(f, g, H: OperatorLike, **solver_kw) -> LocalFunctional:
    """{integral f, integral g}_H = integral of P . delta g/delta u, with f <-> P."""
    R = as_fraction(H)
    _, P = hamiltonian_vector(f, R, **solver_kw)
    return R.alg.pairing(P, R.alg.variational_derivative(g))
