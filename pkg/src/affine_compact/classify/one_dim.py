import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from affine_compact.core.models import AffineMap, AffineModel
from affine_compact.core.pushforward import transform_model
from affine_compact.core.validation import validate_model
from affine_compact.counters.transform import build_transform
from affine_compact.errors import NotAffine1D, ParameterError
from affine_compact.utilities.linalg import fraction_to_json

logger = logging.getLogger(__name__)


class OneDimKind(str, Enum):
    DETERMINISTIC = "Deterministic"
    BIRTH_DEATH = "BirthDeath"


@dataclass(frozen=True)
class Classification1D:
    kind: OneDimKind
    N: int
    alpha_rate: Fraction
    beta_rate: Fraction
    normalizing_map: AffineMap

    def __post_init__(self):
        if self.kind is OneDimKind.BIRTH_DEATH and (self.N < 1 or self.alpha_rate <= 0 or self.beta_rate < 0):
            raise ParameterError(f"Invalid birth-death parameters N={self.N}, alpha={self.alpha_rate}, beta={self.beta_rate}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "N": self.N,
            "alpha_rate": fraction_to_json(self.alpha_rate),
            "beta_rate": fraction_to_json(self.beta_rate),
            "normalizing_map": self.normalizing_map.to_dict(),
        }


def classify_1d(model: AffineModel) -> Classification1D:
    """
    Bring a one-dimensional model to the form E = {0..N} with kernel
    x*alpha*delta(-1) + (N-x)*beta*delta(+1) and read off (N, alpha, beta).
    """
    if model.dimension != 1:
        raise ParameterError(f"classify_1d needs a one-dimensional model, got d={model.dimension}")
    validate_model(model)
    if not model.kernel.support_jumps(model.space):
        return Classification1D(OneDimKind.DETERMINISTIC, 0, Fraction(0), Fraction(0), AffineMap.identity(1))

    result = build_transform(model)
    normal = transform_model(model, result.map)
    points = [p[0] for p in normal.space]
    N = max(points)
    if points != list(range(N + 1)):
        raise NotAffine1D(f"Normalized state space {points} is not an interval {{0..N}}", states=points)

    alpha = beta = Fraction(0)
    for channel in normal.kernel.support_channels(normal.space):
        lam = channel.intensity
        if channel.jump == (-1,) and lam.offset == 0:
            alpha = lam.linear[0]
        elif channel.jump == (1,) and lam.offset == -lam.linear[0] * N:
            beta = -lam.linear[0]
        else:
            raise NotAffine1D(f"Channel {channel.jump} with intensity {lam} is not of birth-death form",
                              jump=list(channel.jump), intensity=str(lam))
    if alpha <= 0 or beta < 0:
        raise NotAffine1D(f"Rates alpha={alpha}, beta={beta} are outside the birth-death domain")
    logger.info(f"Classified as birth-death N={N}, alpha={alpha}, beta={beta}")
    return Classification1D(OneDimKind.BIRTH_DEATH, N, alpha, beta, result.map)
