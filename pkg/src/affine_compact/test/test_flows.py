import os
import sys
import unittest

import numpy as np
from prefect.logging import disable_run_logger

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../../")))

from affine_compact.classify.generators import make_birth_death, make_simplex
from affine_compact.errors import ParameterError
from affine_compact.flows.simulation_flow import chunk_bounds, simulate_chunk
from affine_compact.flows.verify_flow import (
    build_report,
    closed_form_values,
    oracle_values,
    report_markdown,
    riccati_values,
)
from affine_compact.simulate.estimators import empirical_transform
from affine_compact.simulate.ssa import ensemble_states, sample_at


class TestChunking(unittest.TestCase):
    def test_chunks_cover_every_path_once(self):
        self.assertEqual(chunk_bounds(10, 4), [(0, 4), (4, 4), (8, 2)])
        self.assertEqual(chunk_bounds(3, 10), [(0, 3)])

    def test_rejects_empty_ensembles(self):
        with self.assertRaises(ParameterError):
            chunk_bounds(0, 4)

    def test_chunk_task_is_a_slice_of_the_ensemble(self):
        model = make_simplex(2, 3)
        full = ensemble_states(model, [1, 1], [0.5, 1.0], 120, seed=13)
        with disable_run_logger():
            parts = [simulate_chunk.fn(model, [1, 1], [0.5, 1.0], bounds, 13) for bounds in chunk_bounds(120, 50)]
        self.assertTrue(np.array_equal(np.concatenate(parts, axis=1), full))


class TestVerifyTasks(unittest.TestCase):
    def setUp(self):
        self.model = make_birth_death(3, 2, 1)

    def test_riccati_and_oracle_agree(self):
        with disable_run_logger():
            riccati = riccati_values.fn(self.model, [0.7j], 1.0)
            oracle = oracle_values.fn(self.model, [0.7j], 1.0)
        self.assertLess(max(abs(riccati[x] - oracle[x]) for x in self.model.space), 1e-7)

    def test_closed_form_only_in_one_dimension(self):
        with disable_run_logger():
            self.assertIsNone(closed_form_values.fn(make_simplex(2, 2), [0.7j, 0.7j], 1.0))
            self.assertEqual(len(closed_form_values.fn(self.model, [0.7j], 1.0)), 4)

    def test_report(self):
        u, t, x0 = [0.7j], 1.0, (3,)
        with disable_run_logger():
            riccati = riccati_values.fn(self.model, u, t)
            oracle = oracle_values.fn(self.model, u, t)
            closed = closed_form_values.fn(self.model, u, t)
        estimate = empirical_transform(sample_at(self.model, x0, t, 50_000, seed=21), u)
        report = build_report(u, t, x0, riccati, oracle, closed, estimate)
        self.assertTrue(report["riccati_vs_oracle"]["agree"])
        self.assertTrue(report["closed_form_vs_riccati"]["agree"])
        self.assertEqual(len(report["states"]), 4)
        self.assertEqual(report["passed"], report["monte_carlo"]["agree"])
        text = report_markdown(report)
        self.assertIn("max closed form - riccati", text)
        self.assertIn("x0 = [3]", text)

    def test_report_flags_disagreement(self):
        u, t, x0 = [0.7j], 1.0, (3,)
        oracle = {x: 1 + 0j for x in self.model.space}
        estimate = empirical_transform(sample_at(self.model, x0, t, 1000, seed=1), u)
        report = build_report(u, t, x0, {x: 2 + 0j for x in self.model.space}, oracle, None, estimate)
        self.assertFalse(report["riccati_vs_oracle"]["agree"])
        self.assertFalse(report["passed"])
        self.assertNotIn("closed_form_vs_riccati", report)


if __name__ == "__main__":
    unittest.main()
