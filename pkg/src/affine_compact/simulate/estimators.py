import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import binom, chisquare

from affine_compact.core.models import AffineModel
from affine_compact.errors import ParameterError
from affine_compact.simulate.ssa import ensemble_states
from affine_compact.transforms.riccati import RiccatiTransform, solve_riccati_grid
from affine_compact.utilities.constants import SE_MULTIPLIER

logger = logging.getLogger(__name__)


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    n = values.shape[0]
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


@dataclass(frozen=True)
class TransformEstimate:
    value: complex
    se_real: float
    se_imag: float
    n: int

    def within(self, target: complex, k: float = SE_MULTIPLIER, slack: float = 1e-12) -> bool:
        return (abs(self.value.real - target.real) <= k * self.se_real + slack
                and abs(self.value.imag - target.imag) <= k * self.se_imag + slack)

    def to_dict(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag, "se_re": self.se_real, "se_im": self.se_imag, "n": self.n}


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float
    n: int

    def within(self, target: float, k: float = SE_MULTIPLIER, slack: float = 1e-12) -> bool:
        return abs(self.value - target) <= k * self.se + slack

    def to_dict(self) -> dict:
        return {"value": self.value, "se": self.se, "n": self.n}


def empirical_transform(samples: np.ndarray, u: Sequence[complex]) -> TransformEstimate:
    """Sample mean of exp(<u, x>) with componentwise standard errors."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if not samples.shape[0]:
        raise ParameterError("empirical_transform needs at least one sample")
    u = np.asarray(u, dtype=np.complex128)
    if not np.any(u):
        return TransformEstimate(1 + 0j, 0.0, 0.0, samples.shape[0])
    values = np.exp(samples @ u)
    re, se_re = _mean_and_se(values.real)
    im, se_im = _mean_and_se(values.imag)
    return TransformEstimate(complex(re, im), se_re, se_im, samples.shape[0])


def empirical_probability(samples: np.ndarray, state: Sequence[int]) -> Estimate:
    samples = np.asarray(samples)
    hits = np.all(samples == np.asarray(state)[None, :], axis=1).astype(float)
    mean, se = _mean_and_se(hits)
    return Estimate(mean, se, hits.shape[0])


@dataclass(frozen=True)
class MartingaleReport:
    times: tuple[float, ...]
    initial: complex
    estimates: tuple[TransformEstimate, ...]

    @property
    def deviations(self) -> list[float]:
        return [abs(e.value - self.initial) for e in self.estimates]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)

    def within(self, k: float = SE_MULTIPLIER) -> bool:
        return all(e.within(self.initial, k) for e in self.estimates)

    def to_dict(self) -> dict:
        return {
            "times": list(self.times),
            "initial": {"re": self.initial.real, "im": self.initial.imag},
            "estimates": [e.to_dict() for e in self.estimates],
            "deviations": self.deviations,
            "max_deviation": self.max_deviation,
            "within": self.within(),
        }


def martingale_check(model: AffineModel, x0: Sequence[int], u: Sequence[complex], T: float,
                     time_grid: Sequence[float], n_paths: int, seed: int) -> MartingaleReport:
    """
    Monte Carlo mean of M_u(t) = Phi(u, T - t) prod_j Psi_j(u, T - t)^{X_j(t)}
    at each grid time, against the deterministic M_u(0).
    """
    grid = sorted(float(t) for t in time_grid)
    if any(t < 0 or t > T for t in grid):
        raise ParameterError(f"Grid times must lie in [0, {T}], got {grid}")
    transform = RiccatiTransform(model)
    u_y, shift = transform.dual(u)
    *solved, at_zero = solve_riccati_grid(transform.system, list(u_y), [T - t for t in grid] + [T])
    paths = ensemble_states(model, x0, grid, n_paths, seed)

    coords = {x: transform.map(x) for x in model.space}
    initial = shift * at_zero.at(coords[tuple(int(v) for v in x0)])

    estimates = []
    for value, states in zip(solved, paths):
        lookup = {x: shift * value.at(y) for x, y in coords.items()}
        uniq, inverse = np.unique(states, axis=0, return_inverse=True)
        table = np.array([lookup[tuple(int(v) for v in s)] for s in uniq])
        m = table[np.asarray(inverse).ravel()]
        re, se_re = _mean_and_se(m.real)
        im, se_im = _mean_and_se(m.imag)
        estimates.append(TransformEstimate(complex(re, im), se_re, se_im, n_paths))
    report = MartingaleReport(tuple(grid), complex(initial), tuple(estimates))
    logger.info(f"Martingale check max deviation {report.max_deviation:.3g}")
    return report


@dataclass(frozen=True)
class StationarityReport:
    statistic: float
    p_value: float
    observed: tuple[int, ...]
    expected: tuple[float, ...]

    def passed(self, significance: float = 0.001) -> bool:
        return self.p_value >= significance

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "p_value": self.p_value,
                "observed": list(self.observed), "expected": list(self.expected)}


def binomial_stationarity_test(samples: np.ndarray, N: int, p: float) -> StationarityReport:
    """Chi-square goodness of fit of one-dimensional samples against Binomial(N, p)."""
    values = np.asarray(samples).reshape(-1).astype(np.int64)
    observed = np.bincount(values, minlength=N + 1)[: N + 1]
    expected = binom.pmf(np.arange(N + 1), N, p) * values.size
    result = chisquare(observed, expected)
    return StationarityReport(float(result.statistic), float(result.pvalue),
                              tuple(int(v) for v in observed), tuple(float(v) for v in expected))
