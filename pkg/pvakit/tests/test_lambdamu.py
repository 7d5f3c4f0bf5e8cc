"""
Tests for `lambdamu` module.
"""
import pytest
import sympy

from pvakit.diffalg import LAM, MU
from pvakit.lambdamu import DIRECTIONS, NU, Bounds, DoubleSeries, FloorExceeded
from pvakit.lambdamu import Inconsistent, LamMuElement, WindowTooSmall, ZeroTest
from pvakit.lambdamu import apply_shifted, canonicalize, iota_expand, is_zero_window
from pvakit.lambdamu import reconstruct_from_window
from pvakit.psdo import Psdo
from pvakit.tests.example_data import alg1
from pvakit.tests.util import make_rng, random_lammu

_1 = alg1


@pytest.fixture
def element(alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    return LamMuElement.from_expr(alg1, u * LAM**2 * MU * NU**-2 + u1 * MU + 3)


@pytest.mark.unit
def test_canonical_form(alg1):
    u = alg1.jet(0)
    split = LamMuElement.from_expr(alg1, u * LAM * NU**-1 + u * MU * NU**-1)
    assert split.equals(LamMuElement.from_expr(alg1, u))
    assert split.degrees() == [0]
    raw = canonicalize(alg1, [(u, 1, 0, -1), (u, 0, 1, -1)])
    assert raw.equals(split)


@pytest.mark.unit
def test_product(alg1):
    nu = LamMuElement.from_expr(alg1, NU)
    inv = LamMuElement.from_expr(alg1, NU**-1)
    assert (nu * inv).equals(LamMuElement.from_expr(alg1, 1))
    square = LamMuElement.from_expr(alg1, LAM + MU) * nu
    assert square.equals(LamMuElement.from_expr(alg1, LAM**2 + 2 * LAM * MU + MU**2))


@pytest.mark.unit
def test_to_expr(element, alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    expected = u * LAM**2 * MU / (LAM + MU) ** 2 + u1 * MU + 3
    assert sympy.simplify(element.to_expr() - expected) == 0
    assert element.degrees() == [1, 0]
    assert element.degree_part(0).equals(LamMuElement.from_expr(alg1, 3))


@pytest.mark.unit
def test_text(alg1):
    assert LamMuElement.from_expr(alg1, LAM * MU).to_text() == "λ*μ"
    assert LamMuElement(alg1).to_text() == "0"
    truncated = LamMuElement(alg1, {(0, "t", 0): 1}, floor=-2)
    assert truncated.to_text().endswith("O(degree -3)")


@pytest.mark.unit
def test_floor(alg1):
    truncated = LamMuElement(alg1, {(0, "t", 0): 1, (-4, "t", 0): 1}, floor=-2)
    assert (-4, "t", 0) not in truncated.terms
    with pytest.raises(FloorExceeded):
        truncated.coeff(-3, "t", 0)
    with pytest.raises(ValueError):
        _ = truncated * truncated


@pytest.mark.unit
@pytest.mark.parametrize("direction", DIRECTIONS)
def test_reconstruct_every_direction(element, direction):
    window = iota_expand(element, direction, length=16)
    assert reconstruct_from_window(window).equals(element)


@pytest.mark.unit
def test_reconstruct_with_bounds(element):
    window = iota_expand(element, ("lam", "mu"))
    assert reconstruct_from_window(window, Bounds(M=0, N=1, P=2)).equals(element)
    with pytest.raises(Inconsistent):
        reconstruct_from_window(window, Bounds(M=0, N=0, P=0))


@pytest.mark.unit
def test_window_too_small(element):
    window = iota_expand(element, ("mu", "lam"), length=2)
    with pytest.raises(WindowTooSmall):
        reconstruct_from_window(window)
    with pytest.raises(WindowTooSmall):
        window.coeff(1, 100)


@pytest.mark.unit
def test_zero_window(element, alg1):
    assert is_zero_window(iota_expand(element, ("lam", "nu"))) == ZeroTest.NONZERO
    assert is_zero_window(iota_expand(element - element, ("lam", "nu"))) == ZeroTest.ZERO
    short = DoubleSeries(alg1, ("lam", "mu"), window={0: (0, 1)})
    assert is_zero_window(short) == ZeroTest.UNDETERMINED
    long = DoubleSeries(alg1, ("lam", "mu"), window={0: (0, 5)})
    assert is_zero_window(long) == ZeroTest.ZERO


@pytest.mark.unit
def test_series_sum(element, alg1):
    a = iota_expand(element, ("mu", "nu"))
    b = iota_expand(-element, ("mu", "nu"))
    total = a + b
    assert all(x == 0 for d in total.degrees() for x in total.entries(d))
    with pytest.raises(ValueError):
        _ = a + iota_expand(element, ("nu", "mu"))


@pytest.mark.unit
def test_apply_shifted(alg1):
    u, u1 = alg1.jet(0), alg1.jet(0, 1)
    result = apply_shifted(Psdo.d(alg1), u)
    assert result.equals_exactly(Psdo(alg1, {1: u, 0: u1}))
    with pytest.raises(ValueError):
        apply_shifted(Psdo.d(alg1), u, slot="mu")
    shifted = apply_shifted(LamMuElement.from_expr(alg1, LAM), u)
    assert shifted.equals(LamMuElement.from_expr(alg1, u * LAM + u1))
    assert shifted.floor is None
    shifted = apply_shifted(LamMuElement.from_expr(alg1, MU * NU), u, slot="mu")
    expected = LamMuElement.from_expr(alg1, u * MU * NU + u1 * (MU + NU) + alg1.jet(0, 2))
    assert shifted.equals(expected)


@pytest.mark.unit
def test_apply_shifted_floor(alg1):
    u = alg1.jet(0)
    truncated = LamMuElement(alg1, {(0, "t", 0): 1}, floor=-2)
    with pytest.raises(FloorExceeded):
        apply_shifted(truncated, u, floor=-5)
    pole = LamMuElement.from_expr(alg1, NU**-1)
    shifted = apply_shifted(pole, u, slot="nu", floor=-4)
    assert shifted.floor == -4
    assert shifted.coeff(-1, "nu", 1) == u


@pytest.mark.unit
def test_apply_shifted_budget(alg1):
    u, u1, u2 = (alg1.jet(0, n) for n in range(3))
    shifted = apply_shifted(LamMuElement.from_expr(alg1, LAM**5), u, "lam", floor=3)
    assert shifted.floor == 3
    assert shifted.equals(
        LamMuElement.from_expr(alg1, u * LAM**5 + 5 * u1 * LAM**4 + 10 * u2 * LAM**3)
    )
    with pytest.raises(FloorExceeded):
        shifted.coeff(2, "t", 0)
    whole = apply_shifted(LamMuElement.from_expr(alg1, LAM**5), u, "lam", floor=0)
    assert whole.floor is None
    assert whole.coeff(0, "t", 0) == alg1.jet(0, 5)


@pytest.mark.unit
@pytest.mark.parametrize("direction", DIRECTIONS)
def test_pascal_rank(alg1, direction):
    keys = [("t", i) for i in range(-3, 4)] + [("nu", j) for j in range(1, 4)]
    for d in range(-2, 3):
        columns = []
        for kind, idx in keys:
            basis = LamMuElement(alg1, {(d, kind, idx): 1})
            series = iota_expand(basis, direction, length=40)
            columns.append([series.coeff(d, b) for b in range(-12, 20)])
        assert sympy.Matrix(columns).rank() == len(keys)


@pytest.mark.component
def test_random_roundtrip(alg1):
    rng = make_rng(21)
    bounds = Bounds(M=3, N=3, P=3)
    for i in range(100):
        element = random_lammu(alg1, rng)
        assert canonicalize(alg1, element.to_raw()).equals(element)
        direction = DIRECTIONS[i % len(DIRECTIONS)]
        window = iota_expand(element, direction, length=24)
        assert reconstruct_from_window(window, bounds).equals(element)
