"""
Tests for `pva` module.
"""
import random

import pytest
import sympy

from pvakit.const import Engine, Verdict
from pvakit.psdo import OpMatrix, Psdo
from pvakit.pva import BracketContext, IsotropyFailed, NotHamiltonianFunctional
from pvakit.pva import NotSkewadjoint, beltrami_bracket, check_axioms, check_compatible
from pvakit.pva import check_jacobi, check_pencil, check_symplectic, dirac_isotropy
from pvakit.pva import functional_bracket, hamiltonian_vector, jacobi_exact, jacobi_windowed
from pvakit.pva import master_bracket, skew_report
from pvakit.tests.example_data import alg1, alg_nls, catalog_operator, nls_operators
from pvakit.tests.example_data import nls_vector_fields
from pvakit.tests.util import make_rng, random_diffop, random_skew
from pvakit.util import Window

_1, _2, _3, _4 = alg1, alg_nls, nls_operators, nls_vector_fields

HAMILTONIAN = ["gfz", "d3", "toda", "sokolov", "dorfman", "potential-vm", "modified-vm", "nls"]


@pytest.mark.unit
def test_master_bracket_local(alg1):
    u = alg1.jet(0)
    ctx = BracketContext(Psdo.d(alg1))
    assert master_bracket(u, u, ctx).equals_exactly(Psdo.d(alg1))
    assert master_bracket(u, u**2, ctx).equals_exactly(Psdo(alg1, {1: 2 * u}))
    assert master_bracket(u**2, u, ctx).equals_exactly(
        Psdo(alg1, {1: 2 * u, 0: 2 * alg1.jet(0, 1)})
    )


@pytest.mark.unit
def test_master_bracket_nonlocal(alg1):
    u1, u2 = alg1.jet(0, 1), alg1.jet(0, 2)
    ctx = BracketContext(catalog_operator("sokolov"), floor=-5)
    bracket = master_bracket(alg1.jet(0), alg1.jet(0), ctx)
    assert not bracket.exact
    assert bracket.coeff(-1) == u1**2
    assert sympy.expand(bracket.coeff(-2) + u1 * u2) == 0


@pytest.mark.unit
def test_beltrami(alg_nls):
    u, v = alg_nls.jet(0), alg_nls.jet(1)
    assert beltrami_bracket(u, u, alg_nls).equals_exactly(Psdo.one(alg_nls))
    assert beltrami_bracket(u, v, alg_nls).is_zero()


@pytest.mark.unit
@pytest.mark.parametrize("example", ["d3", "negative-control", "toda"])
def test_axioms(example):
    ctx = BracketContext(catalog_operator(example), floor=-6)
    report = check_axioms(ctx, random.Random(7), draws=2)
    assert report.verdict == Verdict.PASS
    assert report.details == {"sesquilinearity": True, "leibniz": True}


@pytest.mark.unit
def test_skew(alg1):
    assert skew_report(catalog_operator("sokolov"), floor=-6).passed
    u = alg1.jet(0)
    report = skew_report(Psdo(alg1, {1: u}))
    assert report.verdict == Verdict.FAIL
    assert report.details["skewadjoint"] is False


@pytest.mark.unit
def test_skew_verdicts_agree(alg1):
    rng = make_rng(31)
    for i in range(20):
        skew = i % 2 == 0
        H = random_skew(alg1, rng) if skew else random_diffop(alg1, rng, 2)
        details = skew_report(H, floor=-4).details
        assert details["skewadjoint"] == details["skewsymmetric_on_generators"]
        assert details["skewadjoint"] is skew


@pytest.mark.unit
def test_dirac_isotropy(nls_operators):
    A, B, _ = nls_operators
    assert dirac_isotropy(A, B)
    assert not dirac_isotropy(A, OpMatrix.identity(A.alg, 2))


@pytest.mark.component
@pytest.mark.parametrize("example", HAMILTONIAN)
def test_jacobi_exact_pass(example):
    H = catalog_operator(example)
    report = jacobi_exact(H.A, H.B, example)
    assert report.verdict == Verdict.PASS
    assert report.engine == "exact"
    assert len(report.verdicts) == H.shape[0] ** 3


@pytest.mark.component
def test_jacobi_exact_fail():
    H = catalog_operator("negative-control")
    report = jacobi_exact(H.A, H.B)
    assert report.verdict == Verdict.FAIL
    assert all(v.witness for v in report.witnesses())


@pytest.mark.unit
def test_jacobi_errors(alg1):
    u = alg1.jet(0)
    not_skew = OpMatrix.scalar(Psdo(alg1, {1: u}))
    with pytest.raises(IsotropyFailed):
        jacobi_exact(not_skew, OpMatrix.identity(alg1, 1))
    with pytest.raises(NotSkewadjoint):
        jacobi_windowed(not_skew)


@pytest.mark.component
@pytest.mark.parametrize("example", HAMILTONIAN + ["negative-control", "toda-matrix"])
def test_engines_agree(example):
    H = catalog_operator(example)
    exact, windowed = check_jacobi(H, Engine.BOTH, operator=example)
    assert windowed.engine == "windowed"
    assert windowed.window["depth"] >= 1
    assert exact.verdict == windowed.verdict
    expected = Verdict.FAIL if example == "negative-control" else Verdict.PASS
    assert windowed.verdict == expected


@pytest.mark.component
@pytest.mark.parametrize(
    "example,first,second",
    [
        ("sokolov", "H", "K"),
        ("sokolov", "H", "T"),
        ("sokolov", "K", "T"),
        ("modified-vm", "H", "K"),
        ("modified-vm", "H", "T"),
        ("modified-vm", "K", "T"),
        ("dorfman", "H", "K"),
        ("pencil", "H", "K"),
        ("nls", "H", "K"),
    ],
)
def test_compatible(example, first, second):
    H, K = catalog_operator(example, first), catalog_operator(example, second)
    report = check_compatible(H, K)
    assert report.check == "compatibility"
    assert report.verdict == Verdict.PASS


@pytest.mark.component
def test_pencil():
    H, K = catalog_operator("sokolov"), catalog_operator("sokolov", "K")
    assert check_pencil(H, K).verdict == Verdict.PASS
    assert check_pencil(H, K, alpha=2, beta=-3).verdict == Verdict.PASS


@pytest.mark.component
@pytest.mark.parametrize("example", ["sokolov-symplectic", "dorfman-symplectic"])
def test_symplectic_exact(example):
    report = check_symplectic(catalog_operator(example))
    assert report.engine == "exact"
    assert report.verdict == Verdict.PASS


@pytest.mark.component
def test_symplectic_windowed():
    report = check_symplectic(catalog_operator("toda"))
    assert report.engine == "windowed"
    assert report.verdict == Verdict.PASS


@pytest.mark.unit
def test_symplectic_not_skew(alg1):
    with pytest.raises(NotSkewadjoint):
        check_symplectic(Psdo(alg1, {1: alg1.jet(0)}))


@pytest.mark.unit
def test_hamiltonian_vector(nls_operators, nls_vector_fields, alg_nls):
    _, _, K = nls_operators
    u, v = alg_nls.jet(0), alg_nls.jet(1)
    F, P = hamiltonian_vector((u**2 + v**2) / 2, K)
    assert F == (u, v)
    assert P == nls_vector_fields[0]


@pytest.mark.unit
def test_hamiltonian_vector_nonlocal(alg1):
    u, u1, u2 = (alg1.jet(0, n) for n in range(3))
    toda = catalog_operator("toda")
    F, P = hamiltonian_vector(u * u2, toda)
    assert sympy.expand(F[0] - 2 * u1) == 0
    assert sympy.expand(P[0] - 2 * u1) == 0
    with pytest.raises(NotHamiltonianFunctional):
        hamiltonian_vector(u, toda)


@pytest.mark.unit
def test_functional_bracket(nls_operators, alg_nls):
    _, _, K = nls_operators
    u, v = alg_nls.jet(0), alg_nls.jet(1)
    c = sympy.Symbol("c")
    h0, h1 = (u**2 + v**2) / 2, c * u * alg_nls.jet(1, 1)
    assert functional_bracket(h0, h1, K).is_zero()
    assert functional_bracket(h0, h0, K).is_zero()
    assert not functional_bracket(u, v, K).is_zero()


@pytest.mark.component
@pytest.mark.parametrize("example", ["gfz", "sokolov", "nls"])
def test_axioms_examples(example):
    ctx = BracketContext(catalog_operator(example), floor=-8)
    assert check_axioms(ctx, random.Random(11), draws=1).passed


@pytest.mark.integration
@pytest.mark.parametrize("example", ["nls", "dorfman", "negative-control"])
def test_deep_window(example):
    window = Window(floor=-16, surplus=4, depth=3)
    (report,) = check_jacobi(catalog_operator(example), Engine.WINDOWED, window, example)
    assert report.window["depth"] == 3
    expected = Verdict.FAIL if example == "negative-control" else Verdict.PASS
    assert report.verdict == expected
