import random
from fractions import Fraction

import numpy as np
import pytest

from lefloc import complexlab as cl
from lefloc.morse import BPoly
from lefloc.ratfun import divide_one_plus_b


def _circle():
    # triangle: 3 vertices, 3 edges; rotation by one step
    d0 = cl.mat([[-1, 1, 0], [0, -1, 1], [1, 0, -1]])
    c = cl.FiniteComplex((3, 3), (d0,))
    rot = cl.mat([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    return c, cl.ComplexEndomorphism((rot, rot))


class TestExactLinearAlgebra:
    def test_rank_and_nullspace(self):
        a = cl.mat([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
        assert cl.rank(a) == 2
        ns = cl.nullspace(a, 3)
        assert len(ns) == 1
        assert cl.is_zero(cl.matmul(a, cl.transpose([list(ns[0])])))

    def test_rank_fractions(self):
        assert cl.rank(cl.mat([[Fraction(1, 3), Fraction(1, 2)], [2, 3]])) == 1

    def test_solve(self):
        cols = [(Fraction(1), Fraction(0)), (Fraction(1), Fraction(1))]
        assert cl.solve(cols, (Fraction(3), Fraction(2))) == [1, 2]


class TestComplexes:
    def test_circle(self):
        c, t = _circle()
        assert cl.validate(c, t)
        assert cl.cohomology_dims(c) == [1, 1]
        assert cl.lefschetz_poly(c, t) == BPoly([1, 1])
        assert cl.lefschetz_number(c, t) == 0

    def test_not_a_complex(self):
        d = cl.mat([[1]])
        c = cl.FiniteComplex((1, 1, 1), (d, d))
        assert not cl.is_complex(c)

    def test_not_a_chain_map(self):
        c, _ = _circle()
        t = cl.ComplexEndomorphism((cl.identity(3), cl.zeros(3, 3)))
        assert not cl.intertwines(c, t)

    def test_shape_check(self):
        with pytest.raises(ValueError):
            cl.FiniteComplex((2, 2), (cl.mat([[1, 0, 0]]),))

    @pytest.mark.parametrize("A,want", [([[0, -1], [1, 0]], [1, 0, 1]),
                                        ([[-1, 0], [0, -1]], [1, -2, 1]),
                                        ([[1, 0], [0, -1]], [1, 0, -1])])
    def test_torus_maps(self, A, want):
        c, t = cl.torus_pair(3, A)
        assert cl.cohomology_dims(c) == [1, 2, 1]
        assert cl.lefschetz_poly(c, t) == BPoly(want)


class TestSpectral:
    def test_jacobi_against_numpy(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 5, 12):
            a = rng.normal(size=(n, n))
            a = a + a.T
            lam, V = cl.jacobi_eigh(a)
            assert np.allclose(np.sort(lam), np.linalg.eigvalsh(a), atol=1e-10)
            assert np.allclose(V @ np.diag(lam) @ V.T, a, atol=1e-10)

    def test_heat_limit(self):
        c, t = cl.torus_pair(3, [[0, -1], [1, 0]])
        L = cl.lefschetz_poly(c, t)
        for b in (0.5, 2.0):
            vals = [cl.heat_supertrace(c, t, s, b) for s in (0.5, 5.0, 50.0, 500.0)]
            gaps = [abs(v - float(L(b))) for v in vals]
            assert gaps[-1] < 1e-9
            assert all(x >= y - 1e-12 for x, y in zip(gaps, gaps[1:]))

    def test_b_minus_one_constant(self):
        c, t = _circle()
        vals = [cl.heat_supertrace(c, t, s, -1.0) for s in (0.05, 0.5, 5.0, 50.0)]
        assert max(vals) - min(vals) < 1e-9
        assert abs(vals[0]) < 1e-9

    def test_time_must_be_positive(self):
        c, t = _circle()
        with pytest.raises(ValueError):
            cl.heat_supertrace(c, t, 0.0, -1.0)

    def test_supersymmetry(self):
        c, _ = _circle()
        assert cl.supersymmetry_check(c)


class TestConstructions:
    def test_dual_reverses_cohomology(self):
        rng = random.Random(11)
        for _ in range(5):
            rp = cl.random_pair(rng)
            cd, _ = cl.dual_pair(rp.complex, rp.endo)
            assert cl.cohomology_dims(cd) == cl.cohomology_dims(rp.complex)[::-1]
            assert cl.duality_check(rp.complex, rp.endo)

    def test_kunneth_circles(self):
        c, t = _circle()
        res = cl.kunneth_check(c, t, c, t)
        assert res.ok and res.exact and res.heat_error < 1e-8
        tc, tt = cl.tensor_pair(c, t, c, t)
        assert cl.cohomology_dims(tc) == [1, 2, 1]

    def test_random_pairs(self):
        rng = random.Random(2024)
        for _ in range(10):
            rp = cl.random_pair(rng)
            assert sum(rp.complex.dims) <= 24
            assert cl.validate(rp.complex, rp.endo)
            assert cl.lefschetz_poly(rp.complex, rp.endo) == rp.expected
            _, r = divide_one_plus_b(rp.expected.coeffs)
            heat = cl.heat_supertrace(rp.complex, rp.endo, 1.0, -1.0)
            assert abs(heat - float(r)) < 1e-9

