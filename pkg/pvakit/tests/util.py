"""
Test utility: seeded generators of random instances.
"""

import random
from typing import List

import sympy

from pvakit.diffalg import DiffAlgebra
from pvakit.lambdamu import LamMuElement
from pvakit.psdo import OpMatrix, Psdo

SEED = 1729


def make_rng(offset: int = 0) -> random.Random:
    return random.Random(SEED + offset)


def random_polynomial(
    alg: DiffAlgebra, rng: random.Random, degree: int = 3, max_order: int = 3, terms: int = 3
) -> sympy.Expr:
    """Polynomial in at most two variables, degree and jet order bounded."""
    return alg.random_density(rng, degree=degree, max_order=max_order, terms=terms)


def random_vector(alg: DiffAlgebra, rng: random.Random, **kw) -> tuple:
    return tuple(random_polynomial(alg, rng, **kw) for _ in range(alg.ell))


def random_diffop(alg: DiffAlgebra, rng: random.Random, order: int = 2) -> Psdo:
    """Differential operator with polynomial coefficients in u, u'."""
    u, u1 = alg.jet(0, 0), alg.jet(0, 1)
    pool = [sympy.Integer(1), u, u1, u**2, u * u1]
    coeffs = {}
    for n in range(order + 1):
        coeffs[n] = sum(rng.randint(-2, 2) * rng.choice(pool) for _ in range(2))
    if coeffs.get(order, 0) == 0:
        coeffs[order] = rng.choice(pool[1:])
    return Psdo(alg, coeffs)


def random_matrix(alg: DiffAlgebra, rng: random.Random, n: int = 2, order: int = 2) -> OpMatrix:
    rows: List[List[Psdo]] = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j or rng.random() < 0.7:
                row.append(random_diffop(alg, rng, rng.randint(0, order)))
            else:
                row.append(Psdo.zero(alg))
        rows.append(row)
    return OpMatrix(alg, rows)


def random_skew(alg: DiffAlgebra, rng: random.Random, order: int = 3) -> Psdo:
    """L - L*, always skewadjoint."""
    L = random_diffop(alg, rng, order)
    return L - L.adjoint()


def random_lammu(
    alg: DiffAlgebra, rng: random.Random, M: int = 3, N: int = 3, P: int = 3
) -> LamMuElement:
    """Exact element with one or two homogeneous parts, each within Bounds(M, N, P)."""
    u, u1 = alg.jet(0, 0), alg.jet(0, 1)
    pool = [sympy.Integer(1), u, u1, u**2]
    keys = [("t", i) for i in range(-M, N + 1)] + [("nu", j) for j in range(1, P + 1)]
    terms = {}
    for d in rng.sample(range(-2, 3), rng.randint(1, 2)):
        for kind, idx in rng.sample(keys, rng.randint(1, 3)):
            terms[(d, kind, idx)] = rng.randint(1, 3) * rng.choice(pool)
    return LamMuElement(alg, terms)
