import cmath
import math
import os
import random
from fractions import Fraction
import sys
import unittest

import numpy as np

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../../")))

from affine_compact.classify.generators import make_birth_death, make_simplex, simplex_rates_2d
from affine_compact.core.markov import embed_markov_chain
from affine_compact.core.models import AffineFunctional, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.errors import NonPolynomialSystem, NotCounterCoordinates, ParameterError
from affine_compact.simulate.estimators import empirical_transform
from affine_compact.simulate.ssa import sample_at
from affine_compact.transforms.closed_form import binomial_limit, closed_form_1d, closed_form_transform
from affine_compact.transforms.oracle import generator_matrix, transform_oracle
from affine_compact.transforms.polynomial import SparsePolynomial
from affine_compact.transforms.riccati import (
    RiccatiTransform,
    build_riccati,
    decompose_kernel,
    solve_riccati,
    solve_riccati_grid,
)
from affine_compact.transforms.zeros import SearchRectangle, find_psi_zero
from affine_compact.utilities.constants import SE_MULTIPLIER

U_GRID = (0.3j, 0.7j, 1.2j)
T_GRID = (0.1, 1.0, 5.0)


def _vanishing_u(t: float) -> complex:
    return 1j * math.pi + math.log(math.exp(t) - 1)


class TestSparsePolynomial(unittest.TestCase):
    def test_arithmetic(self):
        x = SparsePolynomial.variable(2, 0)
        y = SparsePolynomial.variable(2, 1)
        p = (x + y) * (x - y)
        self.assertEqual(p.coefficient((2, 0)), 1)
        self.assertEqual(p.coefficient((0, 2)), -1)
        self.assertEqual(p.coefficient((1, 1)), 0)
        self.assertEqual(p.degree, 2)
        self.assertTrue((p - p).is_zero())

    def test_evaluation(self):
        p = SparsePolynomial(2, {(0, 0): 3, (1, 1): 2, (0, 2): -1})
        self.assertAlmostEqual(p.evaluate([2, 1j]), 3 + 4j + 1)
        batch = p.evaluate_batch(np.array([[2, 1j], [0, 0]]))
        self.assertAlmostEqual(batch[1], 3)

    def test_zero_to_the_zero_is_one(self):
        p = SparsePolynomial.constant(1, 5)
        self.assertEqual(p.evaluate([0]), 5)

    def test_rejects_negative_exponents(self):
        with self.assertRaises(ParameterError):
            SparsePolynomial(1, {(-1,): 1})


class TestRiccatiSystem(unittest.TestCase):
    def test_birth_death_coefficients(self):
        system = build_riccati(decompose_kernel(make_birth_death(3, 2, 1)))
        psi = system.psi_rhs[0]
        self.assertEqual((psi.coefficient((0,)), psi.coefficient((1,)), psi.coefficient((2,))), (2, -1, -1))
        self.assertEqual((system.phi_rhs.coefficient((0,)), system.phi_rhs.coefficient((1,))), (-3, 3))

    def test_planar_simplex_coefficients(self):
        system = build_riccati(decompose_kernel(make_simplex(2, 3, simplex_rates_2d(1, 2, 3, 4, 5, 6))))
        phi, psi1, psi2 = system.phi_rhs, system.psi_rhs[0], system.psi_rhs[1]
        self.assertEqual(phi.terms, {(0, 0): -33, (0, 1): 18, (1, 0): 15})
        self.assertEqual(psi1.terms, {(0, 0): 1, (0, 1): 2, (1, 0): 8, (1, 1): -6, (2, 0): -5})
        self.assertEqual(psi2.terms, {(0, 0): 3, (0, 1): 4, (0, 2): -6, (1, 0): 4, (1, 1): -5})

    def test_non_polynomial_system(self):
        # x1 written as 1 - x2 puts a jump that leaves N^2 into the constant part
        space = StateSpace(2, ((1, 0), (0, 1)))
        model = AffineModel(space, JumpKernel((JumpChannel((-1, 1), AffineFunctional((0, -1), 1)),)), full_span=False)
        with self.assertRaises(NonPolynomialSystem):
            build_riccati(decompose_kernel(model))

    def test_decomposition_needs_counter_coordinates(self):
        space = StateSpace(1, ((-1,), (0,), (1,)))
        model = AffineModel(space, JumpKernel((JumpChannel((-1,), AffineFunctional((1,), 1)),)))
        with self.assertRaises(NotCounterCoordinates):
            decompose_kernel(model)
        with self.assertRaises(NotCounterCoordinates):
            decompose_kernel(make_simplex(2, 2), k=1)

    def test_initial_value(self):
        system = build_riccati(decompose_kernel(make_birth_death(3, 2, 1)))
        value = solve_riccati(system, [0.5j], 0.0)
        self.assertEqual(value.phi, 1)
        self.assertAlmostEqual(value.psi[0], cmath.exp(0.5j))

    def test_zero_argument_is_a_fixed_point(self):
        for model in (make_birth_death(3, 2, 1), make_simplex(2, 3)):
            system = build_riccati(decompose_kernel(model))
            phi_rate, dpsi = system.rhs(np.ones((1, system.k), dtype=np.complex128))
            self.assertAlmostEqual(abs(phi_rate[0]), 0.0, places=12)
            self.assertLess(np.max(np.abs(dpsi)), 1e-12)
            value = solve_riccati(system, [0.0] * system.k, 2.0)
            self.assertAlmostEqual(abs(value.phi - 1), 0.0, places=9)
            self.assertLess(max(abs(p - 1) for p in value.psi), 1e-9)

    def test_grid_matches_single_solves(self):
        system = build_riccati(decompose_kernel(make_birth_death(3, 2, 1)))
        grid = solve_riccati_grid(system, [0.7j], [2.0, 0.5, 1.0])
        for t, value in zip([2.0, 0.5, 1.0], grid):
            single = solve_riccati(system, [0.7j], t)
            self.assertAlmostEqual(value.psi[0], single.psi[0], places=7)


class TestClosedForm(unittest.TestCase):
    def test_matches_riccati(self):
        system = build_riccati(decompose_kernel(make_birth_death(3, 2, 1)))
        for u in U_GRID:
            for t in T_GRID:
                closed = closed_form_1d(3, 2, 1, u, t)
                solved = solve_riccati(system, [u], t)
                self.assertLess(abs(closed.phi - solved.phi), 1e-8)
                self.assertLess(abs(closed.psi[0] - solved.psi[0]), 1e-8)

    def test_long_time_limit_is_binomial(self):
        value = closed_form_1d(3, 2, 1, 0.7j, 60.0)
        self.assertAlmostEqual(value.at((2,)), binomial_limit(3, 2, 1, 0.7j), places=12)

    def test_transform_of_shifted_model(self):
        space = StateSpace(1, tuple((x,) for x in range(2, 6)))
        model = AffineModel(space, JumpKernel((
            JumpChannel((-1,), AffineFunctional((2,), -4)),
            JumpChannel((1,), AffineFunctional((-1,), 5)),
        )))
        closed = closed_form_transform(model, [0.7j], 1.0)
        oracle = transform_oracle(model, [0.7j], 1.0)
        for x in model.space:
            self.assertLess(abs(closed[x] - oracle[x]), 1e-8)

    def test_vanishing_transform(self):
        system = build_riccati(decompose_kernel(make_birth_death(1, 1, 0)))
        for t in (math.log(2), 1.0, 2.0):
            u = _vanishing_u(t)
            self.assertLess(abs(closed_form_1d(1, 1, 0, u, t).psi[0]), 1e-8)
            self.assertLess(abs(solve_riccati(system, [u], t).psi[0]), 1e-8)


class TestThreeWayAgreement(unittest.TestCase):
    def _check(self, model, x0, u_of):
        riccati = RiccatiTransform(model)
        for t in T_GRID:
            samples = sample_at(model, x0, t, 100_000, seed=42)
            for u in U_GRID:
                u_vec = u_of(u)
                solved = riccati.values(u_vec, t)
                oracle = transform_oracle(model, u_vec, t)
                gap = max(abs(solved[x] - oracle[x]) for x in model.space)
                self.assertLess(gap, 1e-7, f"u={u}, t={t}")
                estimate = empirical_transform(samples, u_vec)
                self.assertTrue(estimate.within(oracle[tuple(x0)], SE_MULTIPLIER), f"u={u}, t={t}: {estimate}")
        return riccati

    def test_birth_death(self):
        model = make_birth_death(3, 2, 1)
        self._check(model, (3,), lambda u: [u])
        for u in U_GRID:
            for t in T_GRID:
                closed = closed_form_transform(model, [u], t)
                solved = RiccatiTransform(model).values([u], t)
                self.assertLess(max(abs(closed[x] - solved[x]) for x in model.space), 1e-8)

    def test_simplex(self):
        self._check(make_simplex(2, 3), (1, 1), lambda u: [u, u])

    def test_non_canonical_coordinates(self):
        space = StateSpace(1, tuple((x,) for x in range(2, 6)))
        model = AffineModel(space, JumpKernel((
            JumpChannel((-1,), AffineFunctional((2,), -4)),
            JumpChannel((1,), AffineFunctional((-1,), 5)),
        )))
        solved = RiccatiTransform(model).values([0.3 + 0.7j], 1.0)
        oracle = transform_oracle(model, [0.3 + 0.7j], 1.0)
        self.assertLess(max(abs(solved[x] - oracle[x]) for x in model.space), 1e-7)


class TestRiccatiAgainstOracle(unittest.TestCase):
    def _gap(self, model, u, t, **kwargs):
        solved = RiccatiTransform(model).values(u, t, **kwargs)
        oracle = transform_oracle(model, u, t)
        return max(abs(solved[x] - oracle[x]) for x in model.space)

    def test_every_small_birth_death(self):
        for N in (1, 2, 3):
            for alpha, beta in ((1, 1), (2, 1), (Fraction(3, 2), Fraction(1, 4)), (1, 0)):
                model = make_birth_death(N, alpha, beta)
                for u in (0.3 + 0.5j, -0.4 + 1.2j, 2.5j):
                    for t in (0.2, 1.0, 3.0):
                        self.assertLess(self._gap(model, [u], t), 1e-7, f"N={N}, rates=({alpha}, {beta}), u={u}, t={t}")

    def test_random_markov_embeddings(self):
        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(2, 4)
            Q = [[Fraction(rng.randint(0, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
            for i in range(n):
                Q[i][(i + 1) % n] += 1
                Q[i][i] = 0
                Q[i][i] = -sum(Q[i])
            model = embed_markov_chain(Q)
            u = [complex(rng.uniform(-0.5, 0.5), rng.uniform(-2, 2)) for _ in range(n)]
            for t in (0.5, 2.0):
                self.assertLess(self._gap(model, u, t), 1e-7, f"Q={Q}, u={u}, t={t}")

    def test_imaginary_arguments_stay_in_the_unit_disc(self):
        for model in (make_birth_death(3, 2, 1), make_simplex(2, 3), make_birth_death(2, 1, 0)):
            riccati = RiccatiTransform(model)
            for s in np.linspace(-3.0, 3.0, 7):
                for t in T_GRID:
                    u = [1j * s * (j + 1) for j in range(model.dimension)]
                    values = riccati.values(u, t)
                    self.assertLessEqual(max(abs(v) for v in values.values()), 1 + 1e-9, f"u={u}, t={t}")

    def test_halving_the_tolerance_barely_moves_the_values(self):
        for model, u in ((make_birth_death(3, 2, 1), [0.3 + 0.7j]), (make_simplex(2, 3), [0.5j, -0.2 + 0.4j])):
            riccati = RiccatiTransform(model)
            coarse = riccati.values(u, 1.5, tol=1e-10)
            fine = riccati.values(u, 1.5, tol=5e-11)
            self.assertLess(max(abs(coarse[x] - fine[x]) for x in model.space), 1e-8)


class TestOracle(unittest.TestCase):
    def test_generator_rows_sum_to_zero(self):
        Q = generator_matrix(make_simplex(2, 3))
        self.assertTrue(np.allclose(Q.sum(axis=1), 0))
        self.assertTrue(np.all(Q - np.diag(np.diag(Q)) >= 0))

    def test_zero_time(self):
        values = transform_oracle(make_birth_death(3, 2, 1), [0.5j], 0.0)
        self.assertAlmostEqual(values[(2,)], cmath.exp(1j))


class TestPsiZeros(unittest.TestCase):
    def test_finds_vanishing_point(self):
        system = build_riccati(decompose_kernel(make_birth_death(1, 1, 0)))
        for t in (math.log(2), 1.0, 2.0):
            expected = _vanishing_u(t)
            root = find_psi_zero(system, t, SearchRectangle.around(expected, 0.3))
            self.assertIsNotNone(root)
            self.assertLess(abs(root - expected), 1e-6)

    def test_no_zero_in_far_rectangle(self):
        system = build_riccati(decompose_kernel(make_birth_death(1, 1, 0)))
        self.assertIsNone(find_psi_zero(system, 1.0, SearchRectangle(-1.0, 1.0, -0.5, 0.5)))

    def test_no_zero_near_the_origin(self):
        system = build_riccati(decompose_kernel(make_birth_death(1, 1, 1)))
        for t in (0.5, 1.0, 3.0):
            self.assertIsNone(find_psi_zero(system, t, SearchRectangle.around(0j, 0.5)))

    def test_needs_one_dimension(self):
        system = build_riccati(decompose_kernel(make_simplex(2, 2)))
        with self.assertRaises(ParameterError):
            find_psi_zero(system, 1.0, SearchRectangle(-1, 1, -1, 1))


if __name__ == "__main__":
    unittest.main()
