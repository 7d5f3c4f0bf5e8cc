"""
Tests for `ratop` module.
"""
import pytest
import sympy

from pvakit.const import Verdict
from pvakit.dsl import compile_operator
from pvakit.psdo import OpMatrix, Psdo
from pvakit.pva import check_compatible, jacobi_windowed
from pvakit.ratop import NotWeaklyClosed, SingularDenominator, StringOp, WitnessNotInKernel
from pvakit.ratop import frac_add, frac_det, frac_inverse, frac_mul, frac_sub, from_diffop
from pvakit.ratop import is_minimal_scalar, kernel_witness_check, lenard_power
from pvakit.ratop import make_fraction, reduce_scalar, string_mul, zero_fraction
from pvakit.tests.example_data import alg1, alg_nls, catalog_operator, nls_operators

_1, _2, _3 = alg1, alg_nls, nls_operators

FLOOR = -6


@pytest.fixture
def sokolov(alg1):
    return compile_operator(alg1, "u'*d^-1*u'")


@pytest.mark.unit
def test_make_fraction(alg1):
    u = alg1.jet(0)
    d = Psdo.d(alg1)
    R = make_fraction(Psdo.function(alg1, u), d)
    assert R.shape == (1, 1) and R.is_scalar()
    assert not R.is_differential()
    assert R.to_dict() == {"A": [["u"]], "B": [["d"]]}
    with pytest.raises(ValueError):
        make_fraction(d, Psdo.d(alg1, -1))
    with pytest.raises(SingularDenominator):
        make_fraction(d, Psdo.zero(alg1))


@pytest.mark.unit
def test_series(sokolov, alg1):
    u1, u2 = alg1.jet(0, 1), alg1.jet(0, 2)
    series = sokolov.to_series(FLOOR)
    assert series.shape == (1, 1)
    entry = series[0, 0]
    assert entry.coeff(0) == 0
    assert entry.coeff(-1) == u1**2
    assert sympy.expand(entry.coeff(-2) + u1 * u2) == 0
    string = StringOp(alg1, strings=[(u1, u1)])
    assert string.to_series(FLOOR).agrees(entry)


@pytest.mark.unit
def test_add_and_sub(sokolov, alg1):
    K = from_diffop(Psdo.d(alg1))
    total = frac_add(sokolov, K)
    expected = sokolov.to_series(FLOOR) + K.to_series(FLOOR)
    assert total.to_series(FLOOR).agrees(expected)
    back = frac_sub(total, K)
    assert back.agrees(sokolov, FLOOR)
    assert frac_add(sokolov, zero_fraction(alg1, 1)) is sokolov


@pytest.mark.unit
def test_mul(sokolov, alg1):
    K = from_diffop(Psdo.d(alg1))
    product = frac_mul(sokolov, K)
    expected = sokolov.to_series(FLOOR).compose(K.to_series(FLOOR), floor=FLOOR)
    assert product.to_series(FLOOR).agrees(expected)
    product = frac_mul(K, sokolov)
    expected = K.to_series(FLOOR).compose(sokolov.to_series(FLOOR), floor=FLOOR)
    assert product.to_series(FLOOR).agrees(expected)


@pytest.mark.unit
def test_inverse(sokolov, alg1):
    inv = frac_inverse(sokolov)
    one = OpMatrix.identity(alg1, 1)
    assert frac_mul(sokolov, inv).to_series(FLOOR).agrees(one)
    assert frac_mul(inv, sokolov).to_series(FLOOR).agrees(one)
    with pytest.raises(SingularDenominator):
        frac_inverse(zero_fraction(alg1, 1))


@pytest.mark.unit
def test_det(sokolov, nls_operators):
    assert frac_det(sokolov).to_text() == "u'^2 * xi^-1"
    _, _, K = nls_operators
    assert frac_det(K).to_text() == "1 * xi^0"


@pytest.mark.unit
def test_reduce_scalar(alg1):
    u = alg1.jet(0)
    g = Psdo(alg1, {1: 1, 0: u})
    R = make_fraction(g, Psdo.d(alg1).compose(g))
    assert not is_minimal_scalar(R)
    reduced = reduce_scalar(R)
    assert is_minimal_scalar(reduced)
    assert reduced.A[0, 0].equals_exactly(Psdo.one(alg1))
    assert reduced.B[0, 0].equals_exactly(Psdo.d(alg1))
    assert reduced.agrees(R, FLOOR)


@pytest.mark.unit
def test_lenard_power(alg1):
    H = from_diffop(Psdo.d(alg1, 3))
    K = from_diffop(Psdo.d(alg1))
    assert lenard_power(H, K, 0) is K
    assert lenard_power(H, K, 1) is H
    second = lenard_power(H, K, 2)
    assert second.to_series(FLOOR).agrees(OpMatrix.scalar(Psdo.d(alg1, 5)))
    with pytest.raises(ValueError):
        lenard_power(H, K, -1)


def _pencil_power(alg, n):
    """d^2 o (u^-1 d)^(2n) o d"""
    factor = Psdo.function(alg, 1 / alg.jet(0)).compose(Psdo.d(alg))
    op = Psdo.d(alg, 2)
    for _ in range(2 * n):
        op = op.compose(factor)
    return op.compose(Psdo.d(alg))


@pytest.mark.unit
def test_reduce_by_power_of_d(alg1):
    u = alg1.jet(0)
    A = Psdo(alg1, {3: 2, 1: u})
    reduced = reduce_scalar(make_fraction(A, Psdo(alg1, {2: 3})))
    assert reduced.A[0, 0].equals_exactly(Psdo(alg1, {2: sympy.Rational(2, 3), 0: u / 3}))
    assert reduced.B[0, 0].equals_exactly(Psdo.d(alg1))
    assert reduce_scalar(make_fraction(A, Psdo(alg1, {0: 2}))).is_differential()


@pytest.mark.unit
def test_mul_left_quotient(alg1):
    u = alg1.jet(0)
    Q = Psdo(alg1, {2: u, 0: 1})
    R1 = make_fraction(Psdo.function(alg1, u), Psdo.d(alg1, 2))
    product = frac_mul(R1, from_diffop(Psdo.d(alg1, 2).compose(Q)))
    assert product.is_differential()
    assert product.A[0, 0].equals_exactly(Psdo.function(alg1, u).compose(Q))


@pytest.mark.component
def test_lenard_power_pencil(alg1):
    H, K = catalog_operator("pencil", "H"), catalog_operator("pencil", "K")
    first, second = lenard_power(H, K, 1), lenard_power(H, K, 2)
    for n, power in ((1, first), (2, second)):
        expected = OpMatrix.scalar(_pencil_power(alg1, n))
        assert power.to_series(-12).agrees(expected)
        assert power.A.equals_exactly(expected.compose(power.B))
    assert second.is_differential()
    assert jacobi_windowed(second, operator="H^[2]").verdict == Verdict.PASS
    assert check_compatible(second, H).verdict == Verdict.PASS
    assert check_compatible(second, K).verdict == Verdict.PASS


@pytest.mark.integration
@pytest.mark.parametrize("example", ["sokolov", "dorfman"])
def test_symplectic_inverse(example):
    H, S = catalog_operator(example, "H"), catalog_operator(example, "S")
    assert frac_inverse(S).to_series(-12).agrees(H.to_series(-12))


@pytest.mark.unit
def test_kernel_witness(nls_operators, alg_nls):
    A, B, _ = nls_operators
    u = alg_nls.jet(0)
    R = make_fraction(A, B)
    assert kernel_witness_check(R, [(0, u**-2)])
    with pytest.raises(WitnessNotInKernel):
        kernel_witness_check(R, [(1, 0)])


@pytest.mark.unit
def test_string_fraction(alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    S = StringOp(alg1, Psdo.d(alg1), [(u1, u1), (u, 1), (-u, 1)])
    assert len(S.strings) == 1
    assert S.to_text() == "d + (u')*d^-1*(u')"
    series = S.to_series(FLOOR)
    assert S.to_fraction().to_series(FLOOR)[0, 0].agrees(series)


@pytest.mark.unit
def test_string_mul(alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    S = StringOp(alg1, strings=[(u1, u1)])
    T = StringOp(alg1, strings=[(u, 1)])
    D = StringOp(alg1, Psdo.d(alg1))
    for left, right in ((S, D), (D, S), (S, T)):
        product = string_mul(left, right)
        expected = left.to_series(FLOOR).compose(right.to_series(FLOOR), floor=FLOOR)
        assert product.to_series(FLOOR).agrees(expected)
    dinv = StringOp(alg1, strings=[(1, 1)])
    with pytest.raises(NotWeaklyClosed):
        string_mul(dinv, dinv)
