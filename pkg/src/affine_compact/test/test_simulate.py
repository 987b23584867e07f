import os
import sys
import unittest
from fractions import Fraction

import numpy as np

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../../")))

from affine_compact.classify.generators import make_birth_death, make_simplex
from affine_compact.errors import ParameterError, SchemaError
from affine_compact.simulate.estimators import binomial_stationarity_test, empirical_transform, martingale_check
from affine_compact.simulate.hybrid import (
    hybrid_from_document,
    hybrid_state_at,
    hybrid_to_document,
    layer_normalizing_map,
    make_drift_coupled_example,
    make_k1_example,
    normalize_layers,
    simulate_hybrid,
)
from affine_compact.simulate.rng import CounterRNG, splitmix64
from affine_compact.simulate.ssa import CompiledModel, Trajectory, sample_at, simulate_ssa, state_counts
from affine_compact.utilities.constants import SE_MULTIPLIER


class TestCounterRNG(unittest.TestCase):
    def test_splitmix64_reference_value(self):
        self.assertEqual(int(splitmix64(np.array([1234567], dtype=np.uint64))[0]), 6457827717110365317)

    def test_uniforms_are_open_interval_and_reproducible(self):
        rng = CounterRNG(99)
        keys = rng.stream_keys(np.arange(4, dtype=np.uint64))
        u = rng.uniform(np.repeat(keys, 1000), np.tile(np.arange(1000, dtype=np.uint64), 4))
        self.assertTrue(np.all((u > 0) & (u < 1)))
        again = CounterRNG(99).uniform(np.repeat(keys, 1000), np.tile(np.arange(1000, dtype=np.uint64), 4))
        self.assertTrue(np.array_equal(u, again))

    def test_rejects_negative_seed(self):
        with self.assertRaises(ParameterError):
            CounterRNG(-1)


class TestSSA(unittest.TestCase):
    def setUp(self):
        self.model = make_birth_death(3, 2, 1)

    def test_single_path_matches_ensemble(self):
        samples = sample_at(self.model, (3,), 1.5, 20, seed=5)
        for p in range(20):
            path = simulate_ssa(self.model, (3,), 1.5, seed=5, stream=p)
            self.assertEqual(path.final_state(), tuple(samples[p]))

    def test_chunks_reproduce_the_full_ensemble(self):
        model = make_simplex(2, 3)
        full = sample_at(model, (1, 1), 2.0, 300, seed=17)
        parts = [sample_at(model, (1, 1), 2.0, 100, seed=17, first_path=start) for start in (0, 100, 200)]
        self.assertTrue(np.array_equal(full, np.concatenate(parts)))

    def test_trajectory_stays_in_state_space(self):
        model = make_simplex(2, 3)
        path = simulate_ssa(model, (0, 0), 5.0, seed=3)
        path.check(model)
        self.assertGreater(path.n_jumps, 0)
        self.assertEqual(path.state_at(0.0), (0, 0))

    def test_check_rejects_foreign_jumps(self):
        path = Trajectory(((0.0, (1,)), (0.5, (3,))), 1.0)
        with self.assertRaises(ParameterError):
            path.check(self.model)

    def test_absorbing_state_never_moves(self):
        model = make_birth_death(3, 1, 0)
        path = simulate_ssa(model, (0,), 10.0, seed=1)
        self.assertEqual(path.n_jumps, 0)
        self.assertEqual(state_counts(sample_at(model, (0,), 10.0, 50, seed=1)), {(0,): 50})

    def test_initial_state_must_be_in_space(self):
        with self.assertRaises(ParameterError):
            sample_at(self.model, (4,), 1.0, 10, seed=1)

    def test_top_uniform_picks_an_existing_channel(self):
        compiled = CompiledModel(make_simplex(3, 2))
        self.assertEqual(compiled.jumps.shape[0], 12)
        states = np.flatnonzero(compiled.total > 0)
        for top in ((2**53 - 0.5) / 2**53, 1.0):
            channel = compiled.pick(states, np.full(states.size, top))
            self.assertTrue(np.all(channel < 12))
            self.assertTrue(np.all(compiled.next_index[states, channel] >= 0))
        channel = compiled.pick(states, np.ones(states.size))
        self.assertTrue(np.array_equal(channel, compiled.last_channel[states]))


class TestEstimators(unittest.TestCase):
    def test_zero_argument_is_exactly_one(self):
        samples = sample_at(make_birth_death(3, 2, 1), (3,), 1.0, 100, seed=2)
        estimate = empirical_transform(samples, [0])
        self.assertEqual((estimate.value, estimate.se_real, estimate.se_imag), (1, 0, 0))

    def test_martingale_birth_death(self):
        report = martingale_check(make_birth_death(3, 2, 1), (3,), [0.7j], 1.0, [0.0, 0.5, 1.0], 100_000, seed=42)
        self.assertEqual(len(report.estimates), 3)
        self.assertTrue(report.within(SE_MULTIPLIER), report.to_dict())

    def test_martingale_simplex(self):
        report = martingale_check(make_simplex(2, 3), (1, 1), [0.3j, 0.5j], 1.0, [0.0, 0.5, 1.0], 100_000, seed=42)
        self.assertTrue(report.within(SE_MULTIPLIER), report.to_dict())

    def test_martingale_grid_must_fit_horizon(self):
        with self.assertRaises(ParameterError):
            martingale_check(make_birth_death(3, 2, 1), (3,), [0.7j], 1.0, [0.0, 2.0], 10, seed=1)

    def test_long_run_distribution_is_binomial(self):
        samples = sample_at(make_birth_death(3, 2, 1), (3,), 50.0, 100_000, seed=42)
        report = binomial_stationarity_test(samples, 3, 1 / 3)
        self.assertEqual(sum(report.observed), 100_000)
        self.assertTrue(report.passed(0.001), report.to_dict())


class TestHybrid(unittest.TestCase):
    def test_k1_example_is_contained(self):
        hmodel = make_k1_example(3)
        for stream in range(1000):
            path = simulate_hybrid(hmodel, (3, 0.0), 5.0, seed=8, stream=stream)
            self.assertLessEqual(path.n_z_jumps, 3)
            self.assertTrue(path.contained(hmodel), f"stream {stream}")
            self.assertLessEqual(set(path.z_jump_times), set(path.y_jump_times))

    def test_z_jump_sizes_follow_the_y_jumps(self):
        hmodel = make_k1_example(3)
        for stream in range(200):
            path = simulate_hybrid(hmodel, (3, 0.0), 5.0, seed=8, stream=stream)
            self.assertEqual(len(path.z_jump_sizes), path.n_y_jumps)
            self.assertEqual(sum(1 for s in path.z_jump_sizes if s != 0), path.n_z_jumps)
            self.assertTrue(all(0 < s < 1 for s in path.z_jump_sizes))

    def test_drift_coupled_example_is_contained(self):
        hmodel = make_drift_coupled_example(4)
        for stream in range(200):
            path = simulate_hybrid(hmodel, (2, 0.5), 3.0, seed=4, stream=stream)
            self.assertTrue(path.contained(hmodel), f"stream {stream}")
            self.assertEqual(path.n_z_jumps, 0)
            self.assertTrue(all(s == 0 for s in path.z_jump_sizes))

    def test_state_follows_the_flow(self):
        hmodel = make_drift_coupled_example(4)
        path = simulate_hybrid(hmodel, (2, 0.5), 3.0, seed=4)
        first = path.segments[0]
        t = (first.t_start + first.t_end) / 2
        self.assertEqual(hybrid_state_at(path, hmodel, t), (2, hmodel.flow(2, 0.5, t)))

    def test_invalid_start(self):
        with self.assertRaises(ParameterError):
            simulate_hybrid(make_k1_example(3), (3, 0.5), 1.0, seed=1)

    def test_document_round_trip(self):
        hmodel = make_k1_example(3)
        self.assertEqual(hybrid_from_document(hybrid_to_document(hmodel)), hmodel)

    def test_document_errors_carry_pointers(self):
        doc = hybrid_to_document(make_k1_example(2))
        doc["z_drift"] = [0, 1]
        with self.assertRaises(SchemaError) as ctx:
            hybrid_from_document(doc)
        self.assertIn("/z_drift", [e["pointer"] for e in ctx.exception.details["errors"]])


class TestLayerNormalization(unittest.TestCase):
    def test_shear_moves_first_two_minima_to_zero(self):
        T = layer_normalizing_map(1, 3)
        self.assertEqual(T((0, 1)), (0, 0))
        self.assertEqual(T((1, 3)), (1, 0))

    def test_shifted_minima(self):
        _, shifted = normalize_layers([1, 3, 6])
        self.assertEqual(shifted, [0, 0, Fraction(1)])

    def test_needs_two_layers(self):
        with self.assertRaises(ParameterError):
            normalize_layers([0])


if __name__ == "__main__":
    unittest.main()
