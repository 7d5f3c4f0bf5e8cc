"""
Tests for `psdo` module.
"""
import pytest
import sympy

from pvakit.const import Agreement
from pvakit.psdo import DivisionByZero, NotDifferential, OpMatrix, Psdo, SingularMatrix
from pvakit.psdo import ZeroOperator, dieudonne_det, has_constant_coefficients, left_divide
from pvakit.psdo import left_multiple, mat_invert, ore_right_multiple, rgcd, right_divide
from pvakit.tests.example_data import alg1, alg_nls, nls_operators
from pvakit.tests.util import make_rng, random_diffop, random_matrix

_1, _2, _3 = alg1, alg_nls, nls_operators

FLOOR = -6


@pytest.mark.unit
def test_construct(alg1):
    u = alg1.jet(0)
    op = Psdo(alg1, {1: u, 0: 0, -1: 3})
    assert op.order == 1
    assert op.leading == u
    assert op.coeff(0) == 0
    assert op.exact and not op.is_differential()
    assert Psdo.zero(alg1).is_zero()
    with pytest.raises(ZeroOperator):
        _ = Psdo.zero(alg1).leading
    with pytest.raises(ValueError):
        Psdo(alg1, {0: 1}, exact=False)
    series = Psdo(alg1, {0: 1, -5: u}, floor=-3, exact=False)
    assert -5 not in series.coeffs
    with pytest.raises(ValueError):
        series.coeff(-4)


@pytest.mark.unit
def test_compose_leibniz(alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    d = Psdo.d(alg1)
    left = d.compose(Psdo.function(alg1, u))
    assert left.equals_exactly(Psdo(alg1, {1: u, 0: u1}))
    assert left.to_text() == "u*d + u'"


@pytest.mark.unit
def test_compose_negative(alg1):
    u, u1, u2 = (alg1.jet(0, n) for n in range(3))
    dinv = Psdo.d(alg1, -1)
    op = dinv.compose(Psdo.function(alg1, u), floor=-3)
    assert not op.exact and op.floor == -3
    assert op.coeff(-1) == u
    assert op.coeff(-2) == -u1
    assert op.coeff(-3) == u2
    assert dinv.compose(Psdo.d(alg1)).agrees(Psdo.one(alg1))


@pytest.mark.unit
def test_associativity(alg1):
    rng = make_rng(10)
    for _ in range(10):
        a, b, c = (random_diffop(alg1, rng, 2) for _ in range(3))
        left = a.compose(b).compose(c)
        right = a.compose(b.compose(c))
        assert left.equals_exactly(right)


@pytest.mark.unit
def test_adjoint(alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    op = Psdo(alg1, {1: u})
    assert op.adjoint().equals_exactly(Psdo(alg1, {1: -u, 0: -u1}))
    rng = make_rng(11)
    for _ in range(10):
        a = random_diffop(alg1, rng, 3)
        assert a.adjoint().adjoint().equals_exactly(a)
        b = random_diffop(alg1, rng, 2)
        assert a.compose(b).adjoint().equals_exactly(b.adjoint().compose(a.adjoint()))


@pytest.mark.unit
def test_invert(alg1):
    u = alg1.jet(0)
    d = Psdo.d(alg1)
    assert d.invert().equals_exactly(Psdo.d(alg1, -1))
    op = Psdo(alg1, {1: u, 0: 1})
    inv = op.invert(FLOOR)
    assert op.compose(inv, floor=FLOOR).agrees(Psdo.one(alg1))
    assert inv.compose(op, floor=FLOOR).agrees(Psdo.one(alg1))
    assert op.compose(inv, floor=FLOOR).compare(Psdo.one(alg1)) == Agreement.TO_FLOOR
    with pytest.raises(ZeroOperator):
        Psdo.zero(alg1).invert()


@pytest.mark.unit
def test_invert_random(alg1):
    rng = make_rng(12)
    for _ in range(5):
        op = random_diffop(alg1, rng, 2)
        inv = op.invert(FLOOR)
        assert op.compose(inv, floor=FLOOR).agrees(Psdo.one(alg1))


@pytest.mark.unit
def test_apply(alg1):
    u, u1, u2 = (alg1.jet(0, n) for n in range(3))
    op = Psdo(alg1, {2: 1, 0: u})
    assert sympy.expand(op.apply(u) - u2 - u**2) == 0
    with pytest.raises(NotDifferential):
        Psdo.d(alg1, -1).apply(u)
    x = sympy.Symbol("x")
    shifted = Psdo.d(alg1).shift_apply(x, u)
    assert sympy.expand(shifted - x * u - u1) == 0


@pytest.mark.unit
def test_symbol(alg1):
    u = alg1.jet(0)
    lam = sympy.Symbol("lambda")
    op = Psdo.from_symbol(alg1, u * lam**2 + 3 / lam, lam)
    assert op.coeff(2) == u
    assert op.coeff(-1) == 3
    assert sympy.expand(op.symbol(lam) - u * lam**2 - 3 / lam) == 0


@pytest.mark.unit
def test_right_divide(alg1):
    rng = make_rng(13)
    for _ in range(10):
        A = random_diffop(alg1, rng, 3)
        B = random_diffop(alg1, rng, 1)
        Q, R = right_divide(A, B)
        assert (Q.compose(B) + R).equals_exactly(A)
        assert R.order is None or R.order < B.order
    with pytest.raises(DivisionByZero):
        right_divide(Psdo.d(alg1), Psdo.zero(alg1))
    with pytest.raises(NotDifferential):
        right_divide(Psdo.d(alg1, -1), Psdo.d(alg1))


@pytest.mark.unit
def test_left_divide(alg1):
    rng = make_rng(16)
    for _ in range(10):
        A = random_diffop(alg1, rng, 3)
        B = random_diffop(alg1, rng, 1)
        Q, R = left_divide(B, A)
        assert (B.compose(Q) + R).equals_exactly(A)
        assert R.order is None or R.order < B.order
    u = alg1.jet(0)
    Q, R = left_divide(Psdo.d(alg1, 2), Psdo.d(alg1, 2).compose(Psdo(alg1, {1: u})))
    assert R.is_zero()
    assert Q.equals_exactly(Psdo(alg1, {1: u}))
    with pytest.raises(DivisionByZero):
        left_divide(Psdo.zero(alg1), Psdo.d(alg1))


@pytest.mark.unit
def test_constant_coefficients(alg1):
    assert has_constant_coefficients(Psdo(alg1, {3: 1, 1: -2}))
    assert not has_constant_coefficients(Psdo(alg1, {1: alg1.jet(0)}))


@pytest.mark.unit
def test_rgcd(alg1):
    u = alg1.jet(0)
    g = Psdo(alg1, {1: 1, 0: u})
    a = Psdo(alg1, {1: u, 0: 2}).compose(g)
    b = Psdo(alg1, {2: 1}).compose(g)
    assert rgcd(a, b).equals_exactly(g)


@pytest.mark.unit
def test_left_multiple(alg1):
    rng = make_rng(14)
    for _ in range(5):
        a = random_diffop(alg1, rng, 2)
        b = random_diffop(alg1, rng, 1)
        X, Y = left_multiple(a, b)
        assert X.compose(a).equals_exactly(Y.compose(b))
        assert not X.is_zero()


@pytest.mark.unit
def test_ore_scalar(alg1):
    u = alg1.jet(0)
    B1 = Psdo(alg1, {1: 1})
    B2 = Psdo(alg1, {0: u})
    E, F = ore_right_multiple(B1, B2)
    assert B1.compose(E).equals_exactly(B2.compose(F))
    assert E.leading == 1


@pytest.mark.unit
def test_ore_matrix(nls_operators):
    A, B, _ = nls_operators
    alg = B.alg
    T = OpMatrix.diagonal([Psdo.d(alg), Psdo.d(alg)])
    E, F = ore_right_multiple(B, T)
    assert B.compose(E).equals_exactly(T.compose(F))


@pytest.mark.unit
def test_matrix_basics(alg_nls):
    u, v = alg_nls.jet(0), alg_nls.jet(1)
    M = OpMatrix(alg_nls, [[Psdo.d(alg_nls), u], [0, v]])
    assert M.shape == (2, 2)
    assert M.is_differential()
    assert M[0, 1].equals_exactly(Psdo.function(alg_nls, u))
    assert M.order() == 1
    assert (M - M).equals_exactly(OpMatrix.zero(alg_nls, 2, 2))
    assert OpMatrix.identity(alg_nls, 2).is_identity()
    assert M.transpose()[1, 0].equals_exactly(M[0, 1])
    applied = M.apply((u, v))
    assert sympy.expand(applied[0] - alg_nls.jet(0, 1) - u * v) == 0
    assert M.to_lists() == [["d", "u"], ["0", "v"]]


@pytest.mark.unit
def test_matrix_adjoint(nls_operators):
    A, B, K = nls_operators
    assert A.adjoint().adjoint().equals_exactly(A)
    left = A.compose(B).adjoint()
    right = B.adjoint().compose(A.adjoint())
    assert left.equals_exactly(right)


@pytest.mark.unit
def test_det_nls(nls_operators):
    _, B, K = nls_operators
    assert dieudonne_det(B).to_text() == "u^2 * xi^1"
    assert dieudonne_det(K.A).to_text() == "1 * xi^0"
    singular = OpMatrix(B.alg, [[Psdo.d(B.alg), Psdo.d(B.alg)]] * 2)
    assert dieudonne_det(singular).is_zero()


@pytest.mark.component
def test_det_multiplicative(alg1):
    rng = make_rng(15)
    for _ in range(50):
        M = random_matrix(alg1, rng, 2, 2)
        N = random_matrix(alg1, rng, 2, 2)
        product = dieudonne_det(M.compose(N))
        assert product.equals(dieudonne_det(M) * dieudonne_det(N))


@pytest.mark.unit
def test_mat_invert(nls_operators):
    _, B, _ = nls_operators
    inv = mat_invert(B, FLOOR)
    identity = OpMatrix.identity(B.alg, 2)
    assert B.compose(inv, floor=FLOOR).agrees(identity)
    assert inv.compose(B, floor=FLOOR).agrees(identity)
    singular = OpMatrix(B.alg, [[Psdo.d(B.alg), Psdo.d(B.alg)]] * 2)
    with pytest.raises(SingularMatrix):
        mat_invert(singular, FLOOR)
