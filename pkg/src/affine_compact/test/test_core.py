import json
import math
import os
import random
import sys
import unittest
from fractions import Fraction

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../../")))

from affine_compact.classify.generators import make_birth_death, make_simplex
from affine_compact.core.markov import embed_markov_chain
from affine_compact.core.models import AffineFunctional, AffineMap, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.core.pushforward import transform_model
from affine_compact.core.schema import dump_model, load_model, model_from_document
from affine_compact.core.validation import affine_span_dim, check_model, validate_model
from affine_compact.errors import (
    DegenerateSpan,
    MalformedRateMatrix,
    NegativeIntensity,
    ParameterError,
    ParseError,
    SchemaError,
    SupportViolation,
)
from affine_compact.simulate.estimators import empirical_probability
from affine_compact.simulate.ssa import sample_at
from affine_compact.transforms.oracle import transform_oracle


def _interval_model(N, channels, **kwargs):
    return AffineModel(StateSpace.interval(N), JumpKernel(tuple(channels)), **kwargs)


class TestAffineTypes(unittest.TestCase):
    def test_functional_is_exact(self):
        psi = AffineFunctional(("1/3", 2), "-1/2")
        self.assertEqual(psi((3, 1)), Fraction(5, 2))
        self.assertEqual(psi.increment((3, 0)), 1)
        self.assertEqual(str(AffineFunctional((-1, -1), 3)), "3 - x1 - x2")

    def test_map_inverse_composes_to_identity(self):
        T = AffineMap(((1, 1), (0, 2)), (3, -1), declared_invertible=True)
        self.assertTrue(T.compose(T.inverse()).is_identity)
        self.assertEqual(T.inverse()(T((4, 5))), (4, 5))

    def test_sum_of_functionals_is_exact(self):
        rng = random.Random(7)

        def rational():
            return Fraction(rng.randint(-9, 9), rng.randint(1, 7))

        for _ in range(200):
            d = rng.randint(1, 4)
            psi = AffineFunctional(tuple(rational() for _ in range(d)), rational())
            phi = AffineFunctional(tuple(rational() for _ in range(d)), rational())
            x = tuple(rational() for _ in range(d))
            self.assertEqual((psi + phi)(x), psi(x) + phi(x))

    def test_singular_map_cannot_be_declared_invertible(self):
        with self.assertRaises(ParameterError):
            AffineMap(((1, 2), (2, 4)), (0, 0), declared_invertible=True)

    def test_state_space_generators(self):
        self.assertEqual(len(StateSpace.interval(3)), 4)
        self.assertEqual(len(StateSpace.simplex(2, 3)), 10)
        self.assertEqual(len(StateSpace.box([2, 3])), 12)
        self.assertEqual(StateSpace.simplex(2, 3).span_dim, 2)

    def test_duplicate_jumps_merge(self):
        kernel = JumpKernel.from_channels([
            JumpChannel((1,), AffineFunctional((0,), 1)),
            JumpChannel((1,), AffineFunctional((2,), 0)),
        ])
        self.assertEqual(len(kernel), 1)
        self.assertEqual(kernel.channels[0].intensity, AffineFunctional((2,), 1))

    def test_repeated_jumps_rejected(self):
        channel = JumpChannel((1,), AffineFunctional((0,), 1))
        with self.assertRaises(ParameterError):
            JumpKernel((channel, channel))


class TestValidation(unittest.TestCase):
    def test_birth_death_is_valid(self):
        report = validate_model(make_birth_death(3, 2, 1))
        self.assertTrue(report.valid)
        self.assertEqual(report.span_dim, 1)
        self.assertEqual(report.n_states, 4)

    def test_negative_intensity(self):
        model = _interval_model(3, [JumpChannel((-1,), AffineFunctional((-1,), 0))])
        with self.assertRaises(NegativeIntensity) as ctx:
            validate_model(model)
        self.assertEqual(ctx.exception.report.issues[0].kind, "NegativeIntensity")

    def test_support_violation(self):
        model = _interval_model(3, [JumpChannel((1,), AffineFunctional((0,), 1))])
        with self.assertRaises(SupportViolation):
            validate_model(model)

    def test_degenerate_span(self):
        model = AffineModel(StateSpace(2, ((0, 0), (1, 1))))
        with self.assertRaises(DegenerateSpan):
            validate_model(model)

    def test_check_model_collects_every_issue(self):
        model = _interval_model(2, [
            JumpChannel((1,), AffineFunctional((0,), 1)),
            JumpChannel((-1,), AffineFunctional((-1,), 0)),
        ])
        kinds = {issue.kind for issue in check_model(model).issues}
        self.assertEqual(kinds, {"SupportViolation", "NegativeIntensity"})

    def test_affine_span_dim(self):
        self.assertEqual(affine_span_dim([(0, 0, 0)]), 0)
        self.assertEqual(affine_span_dim([(0, 0), (1, 1), (2, 2)]), 1)
        self.assertEqual(affine_span_dim([(1, 0, 0), (0, 1, 0), (0, 0, 1)]), 2)

    def test_affine_span_dim_survives_invertible_maps(self):
        T = AffineMap(((1, 1, 0), (0, 2, 1), ("1/2", 0, 1)), (3, -1, 2), declared_invertible=True)
        families = [
            [(0, 0, 0), (1, 2, 3), (2, 4, 6)],
            [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
            list(StateSpace.simplex(3, 2)),
            [(5, 5, 5)],
        ]
        for points in families:
            self.assertEqual(affine_span_dim([T(p) for p in points]), affine_span_dim(points), points)


class TestMarkovEmbedding(unittest.TestCase):
    Q = [[-1, 1], [2, -2]]

    def test_embedding_is_a_valid_reduced_span_model(self):
        model = embed_markov_chain(self.Q)
        self.assertFalse(model.full_span)
        self.assertEqual(model.space.points, ((0, 1), (1, 0)))
        self.assertEqual(validate_model(model).span_dim, 1)
        self.assertEqual(model.kernel.channel_for((-1, 1)).intensity, AffineFunctional((1, 0), 0))
        self.assertEqual(model.kernel.channel_for((1, -1)).intensity, AffineFunctional((0, 2), 0))

    def test_random_rate_matrices_embed_validly(self):
        rng = random.Random(11)
        for _ in range(30):
            n = rng.randint(2, 4)
            Q = [[Fraction(rng.randint(0, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
            for i in range(n):
                Q[i][(i + 1) % n] += 1
                Q[i][i] = 0
                Q[i][i] = -sum(Q[i])
            model = embed_markov_chain(Q)
            self.assertFalse(model.full_span)
            self.assertEqual(validate_model(model).span_dim, n - 1)
            self.assertEqual(len(model.space), n)

    def test_rows_must_sum_to_zero(self):
        with self.assertRaises(MalformedRateMatrix):
            embed_markov_chain([[-1, 2], [1, -1]])

    def test_negative_off_diagonal(self):
        with self.assertRaises(MalformedRateMatrix):
            embed_markov_chain([[1, -1], [1, -1]])

    def test_occupancy_matches_two_state_solution(self):
        model = embed_markov_chain(self.Q)
        expected = (1 - math.exp(-3)) / 3
        # E[2^{X_2}] = 1 + P(state 2)
        oracle = transform_oracle(model, [0, math.log(2)], 1.0)[(1, 0)]
        self.assertAlmostEqual(oracle.real - 1, expected, places=10)

        samples = sample_at(model, (1, 0), 1.0, 100_000, seed=42)
        estimate = empirical_probability(samples, (0, 1))
        self.assertTrue(estimate.within(expected), f"{estimate} vs {expected}")


class TestPushforward(unittest.TestCase):
    def test_reflection_swaps_birth_and_death(self):
        model = make_birth_death(3, 2, 1)
        reflected = transform_model(model, AffineMap(((-1,),), (3,), declared_invertible=True))
        self.assertEqual(reflected.space, model.space)
        self.assertEqual(reflected.kernel.channel_for((1,)).intensity, AffineFunctional((-2,), 6))
        self.assertEqual(reflected.kernel.channel_for((-1,)).intensity, AffineFunctional((1,), 0))
        validate_model(reflected)

    def test_non_lattice_image_rejected(self):
        with self.assertRaises(ParameterError):
            transform_model(make_birth_death(2, 1, 1), AffineMap((("1/2",),), (0,)))


class TestSchema(unittest.TestCase):
    def test_generators_expand(self):
        interval = model_from_document({"dimension": 1, "states": {"kind": "interval", "N": 3}})
        simplex = model_from_document({"dimension": 2, "states": {"kind": "simplex", "N": 3}})
        self.assertEqual(len(interval.space), 4)
        self.assertEqual(len(simplex.space), 10)

    def test_malformed_rational(self):
        doc = {"dimension": 1, "states": {"kind": "interval", "N": 3},
               "channels": [{"jump": [-1], "intensity": {"linear": ["1/0"], "offset": 0}}]}
        with self.assertRaises(SchemaError) as ctx:
            model_from_document(doc)
        pointers = [e["pointer"] for e in ctx.exception.details["errors"]]
        self.assertTrue(any(p.startswith("/channels/0/intensity/linear") for p in pointers), pointers)

    def test_unknown_keys_rejected(self):
        with self.assertRaises(SchemaError):
            model_from_document({"dimension": 1, "states": [[0], [1]], "colour": "red"})

    def test_dimension_mismatch(self):
        with self.assertRaises(SchemaError):
            model_from_document({"dimension": 2, "states": [[0], [1]]})

    def test_round_trip_is_exact(self):
        for model in (make_birth_death(4, "2/3", "5/7"), make_simplex(2, 3, {(0, 1): "1/2", (1, 0): 3}),
                      embed_markov_chain([[-1, 1], [2, -2]])):
            text = dump_model(model)
            self.assertEqual(model_from_document(json.loads(text)), model)

    def test_load_model_errors(self):
        with self.assertRaises(ParseError):
            load_model("/nonexistent/model.json")


if __name__ == "__main__":
    unittest.main()
