"""Brute-force transform through the generator matrix, evaluated by uniformization."""
import logging
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from affine_compact.core.models import AffineModel, Point
from affine_compact.core.validation import validate_model
from affine_compact.errors import ParameterError
from affine_compact.utilities.constants import UNIFORMIZATION_TRUNCATION
from affine_compact.utilities.timing import time_it

logger = logging.getLogger(__name__)


@time_it
def generator_matrix(model: AffineModel) -> np.ndarray:
    """Q[x, x+u] = lambda_u(x), Q[x, x] = -Lambda(x), rows in state order."""
    validate_model(model)
    space = model.space
    Q = np.zeros((len(space), len(space)))
    for i, x in enumerate(space):
        for c in model.kernel.channels:
            rate = c.intensity(x)
            if rate > 0:
                Q[i, space.index(tuple(a + b for a, b in zip(x, c.jump)))] += float(rate)
        Q[i, i] = -Q[i].sum()
    return Q


def uniformized_action(Q: np.ndarray, g: np.ndarray, t: float, truncation: float = UNIFORMIZATION_TRUNCATION) -> np.ndarray:
    """e^{tQ} g as a Poisson mixture of powers of P = I + Q / Lambda_max."""
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    rate = float(np.max(-np.diag(Q))) if Q.size else 0.0
    if t == 0 or rate == 0:
        return np.array(g, dtype=np.complex128)
    P = np.eye(Q.shape[0]) + Q / rate
    mean = rate * t
    n_max = int(poisson.isf(truncation, mean)) + 1
    weights = poisson.pmf(np.arange(n_max + 1), mean)
    v = np.array(g, dtype=np.complex128)
    out = weights[0] * v
    for w in weights[1:]:
        v = P @ v
        out = out + w * v
    logger.debug(f"Uniformization used {n_max} terms for Lambda*t={mean:.3g}")
    return out


class TransformOracle:
    """Keeps the generator of one model so many (u, t) pairs reuse it."""

    def __init__(self, model: AffineModel):
        self.model = model
        self.Q = generator_matrix(model)
        self.points = np.array(model.space.points, dtype=float)

    def values(self, u: Sequence[complex], t: float) -> dict[Point, complex]:
        if len(u) != self.model.dimension:
            raise ParameterError(f"Expected u of length {self.model.dimension}, got {len(u)}")
        g = np.exp(self.points @ np.asarray(u, dtype=np.complex128))
        out = uniformized_action(self.Q, g, t)
        return {x: complex(v) for x, v in zip(self.model.space.points, out)}


def transform_oracle(model: AffineModel, u: Sequence[complex], t: float) -> dict[Point, complex]:
    return TransformOracle(model).values(u, t)
