import numpy as np
import pytest

from rootdensity.errors import DegenerateLeadingCoefficient
from rootdensity.oracle import aberth_solve, match_roots, random_separated_roots
from rootdensity.polynomial import (
    CompanionMatrix,
    Polynomial,
    companion,
    evaluate,
    from_roots,
    make_monic,
)


class TestMakeMonic:
    def test_scalar_division(self):
        # 2z^2 + 0z + 1 -> z^2 + 0.5
        p = make_monic([1.0, 0.0, 2.0])
        assert p.degree == 2
        np.testing.assert_allclose(p.coeffs, [0.5, 0.0])

    def test_already_monic(self):
        p = make_monic([-6.0, 1.0, 1.0])
        np.testing.assert_array_equal(p.coeffs, [-6.0, 1.0])

    def test_degenerate_leading(self):
        with pytest.raises(DegenerateLeadingCoefficient):
            make_monic([1.0, 1e-30])

    def test_idempotent(self, rng):
        coeffs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        once = make_monic(np.concatenate([coeffs, [1.0]]))
        twice = make_monic(np.concatenate([once.coeffs, [1.0]]))
        np.testing.assert_array_equal(once.coeffs, twice.coeffs)

    def test_fp32_threshold(self):
        # below the fp32 threshold but fine in fp64
        coeffs = np.array([1.0, 1e-7], dtype=np.complex64)
        with pytest.raises(DegenerateLeadingCoefficient):
            make_monic(coeffs)
        make_monic(np.array([1.0, 1e-7], dtype=np.complex128))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Polynomial(np.array([np.nan + 0j, 1.0]))


class TestCompanion:
    def test_z2_minus_1(self):
        c = companion(Polynomial(np.array([-1.0 + 0j, 0.0])))
        np.testing.assert_array_equal(c.first_row, [0.0, 1.0])
        np.testing.assert_array_equal(c.to_dense(), [[0.0, 1.0], [1.0, 0.0]])

    def test_z3_minus_1(self):
        c = companion(Polynomial(np.array([-1.0 + 0j, 0.0, 0.0])))
        np.testing.assert_array_equal(c.first_row, [0.0, 0.0, 1.0])
        dense = c.to_dense()
        assert dense[1, 0] == 1.0 and dense[2, 1] == 1.0
        assert dense[1, 1] == 0.0 and dense[2, 0] == 0.0

    def test_z2_plus_z_minus_6(self):
        c = companion(Polynomial(np.array([-6.0 + 0j, 1.0])))
        np.testing.assert_array_equal(c.first_row, [-1.0, 6.0])
        # eigenvalues {2, -3}: trace and determinant of the dense form
        dense = c.to_dense()
        assert np.isclose(np.trace(dense), -1.0)
        assert np.isclose(np.linalg.det(dense), -6.0)

    def test_first_row_is_characteristic(self, rng):
        # det(zI - C) == p(z) at a few points, via the dense expansion
        coeffs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        p = Polynomial(coeffs)
        dense = companion(p).to_dense()
        for z in (0.3 + 0.1j, -1.2 + 0.8j, 2.0 - 0.5j):
            char = np.linalg.det(z * np.eye(4) - dense)
            np.testing.assert_allclose(char, evaluate(p, z), rtol=1e-9, atol=1e-9)


class TestEvaluate:
    def test_root(self):
        p = Polynomial(np.array([-1.0 + 0j, 0.0]))
        assert evaluate(p, 1.0 + 0j) == 0.0

    def test_constant_term(self):
        p = Polynomial(np.array([-1.0 + 0j, 0.0]))
        assert evaluate(p, 0.0 + 0j) == -1.0

    def test_direct_arithmetic(self):
        # (i)^2 + i - 6 = -7 + i
        p = Polynomial(np.array([-6.0 + 0j, 1.0]))
        assert evaluate(p, 1j) == -7.0 + 1.0j

    def test_array_argument(self):
        p = Polynomial(np.array([-1.0 + 0j, 0.0]))
        np.testing.assert_array_equal(evaluate(p, np.array([1.0, -1.0, 0.0])),
                                      [0.0, 0.0, -1.0])


class TestFromRoots:
    def test_difference_of_squares(self):
        p = from_roots([1.0, -1.0])
        np.testing.assert_allclose(p.coeffs, [-1.0, 0.0])

    def test_expansion(self):
        p = from_roots([2.0, -3.0])
        np.testing.assert_allclose(p.coeffs, [-6.0, 1.0])

    def test_repeated_zero_root(self):
        p = from_roots([0.0, 0.0, 0.0])
        np.testing.assert_array_equal(p.coeffs, [0.0, 0.0, 0.0])

    def test_construction_residual(self, rng):
        for _ in range(20):
            roots = random_separated_roots(rng, 6)
            p = from_roots(roots)
            residuals = np.abs(evaluate(p, roots))
            assert residuals.max() < 1e-10

    def test_round_trip_against_reference(self, rng):
        # degree <= 8 random roots in the radius-2 disk recover through the
        # independent Aberth route within matching tolerance
        for degree in (2, 4, 8):
            roots = random_separated_roots(rng, degree)
            p = from_roots(roots)
            recovered = aberth_solve(p)
            assert match_roots(recovered, roots).max_error < 1e-8


def test_solver_roots_satisfy_polynomial(rng):
    # eigenvalues returned by either solver route evaluate to ~0 through
    # the characteristic-polynomial identity (well-conditioned corpus)
    from rootdensity.eigensolver import SolveConfig, solve_roots

    for _ in range(10):
        p = from_roots(random_separated_roots(rng, 5))
        for roots in (solve_roots(p, SolveConfig(iterations=20)), aberth_solve(p)):
            assert np.abs(evaluate(p, roots)).max() < 1e-8


def test_dense_companion_round_trip():
    first_row = np.array([0.5 - 0.25j, 1.0, -2.0 + 1j])
    dense = CompanionMatrix(first_row=first_row).to_dense()
    np.testing.assert_array_equal(dense[0], first_row)
    sub = np.diag(dense, -1)
    np.testing.assert_array_equal(sub, np.ones(2))
    assert dense[2, 0] == 0.0
