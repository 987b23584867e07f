"""Closed-form transform of the birth–death process on {0..N}."""
import cmath
from typing import Sequence

from affine_compact.classify.one_dim import OneDimKind, classify_1d
from affine_compact.core.models import AffineModel, Point
from affine_compact.errors import NotAffine1D, ParameterError
from affine_compact.transforms.riccati import TransformValue


def _check(N: int, alpha_rate: float, beta_rate: float) -> None:
    if N < 1 or alpha_rate <= 0 or beta_rate < 0:
        raise ParameterError(f"Birth-death closed form needs N >= 1, alpha > 0, beta >= 0; "
                             f"got N={N}, alpha={alpha_rate}, beta={beta_rate}")


def closed_form_1d(N: int, alpha_rate: float, beta_rate: float, u: complex, t: float) -> TransformValue:
    """
    Phi(u, t) = ((alpha + beta(e^u + (1 - e^u) e^{-t(alpha+beta)})) / (alpha + beta))^N
    Psi(u, t) = 1 + (alpha + beta)(e^u - 1) / ((beta e^u + alpha) e^{t(alpha+beta)} - beta(e^u - 1))
    """
    _check(N, alpha_rate, beta_rate)
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    a, b = float(alpha_rate), float(beta_rate)
    s = a + b
    eu = cmath.exp(complex(u))
    phi = ((a + b * (eu + (1 - eu) * cmath.exp(-t * s))) / s) ** N
    denominator = (b * eu + a) * cmath.exp(t * s) - b * (eu - 1)
    if denominator == 0:
        raise ParameterError(f"Psi has a pole at u={u}, t={t}")
    psi = 1 + s * (eu - 1) / denominator
    return TransformValue(complex(phi), (complex(psi),))


def binomial_limit(N: int, alpha_rate: float, beta_rate: float, u: complex) -> complex:
    """((alpha + beta e^u) / (alpha + beta))^N: the transform of Binomial(N, beta / (alpha + beta))."""
    _check(N, alpha_rate, beta_rate)
    a, b = float(alpha_rate), float(beta_rate)
    return complex(((a + b * cmath.exp(complex(u))) / (a + b)) ** N)


def closed_form_transform(model: AffineModel, u: Sequence[complex], t: float) -> dict[Point, complex]:
    """
    E_x[exp(u X_t)] for every x of a one-dimensional model that classifies as
    birth–death. With y = a x + c the normalized coordinate,
    exp(u x) = exp(-u c / a) exp((u / a) y).
    """
    if model.dimension != 1 or len(u) != 1:
        raise ParameterError(f"The closed form needs a one-dimensional model and u, got d={model.dimension}")
    verdict = classify_1d(model)
    if verdict.kind is not OneDimKind.BIRTH_DEATH:
        raise NotAffine1D(f"{model.name or 'Model'} is deterministic; no birth–death closed form", kind=verdict.kind.value)
    T = verdict.normalizing_map
    scale, offset = float(T.matrix[0][0]), float(T.offset[0])
    u_y = complex(u[0]) / scale
    value = closed_form_1d(verdict.N, float(verdict.alpha_rate), float(verdict.beta_rate), u_y, t)
    shift = cmath.exp(-u_y * offset)
    return {x: shift * value.at(T(x)) for x in model.space}
