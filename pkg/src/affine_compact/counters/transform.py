import logging
from dataclasses import dataclass, field
from itertools import combinations

from affine_compact.core.models import AffineFunctional, AffineMap, AffineModel
from affine_compact.core.validation import validate_model
from affine_compact.counters.jump_counters import JumpCounter, compute_jump_counter, pairwise_case
from affine_compact.errors import Inconsistent, TrichotomyViolation
from affine_compact.utilities import linalg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransformResult:
    """
    Invertible T whose first k components are normalized jump counters, so
    T(E) lies in N^k x Z^(d-k). ``counters`` holds the counter of every
    possible jump, in channel order.
    """
    map: AffineMap
    k: int
    counter_basis: tuple[JumpCounter, ...]
    counters: tuple[JumpCounter, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "map": self.map.to_dict(),
            "components": [str(c) for c in self.map.components()],
            "counter_basis": [c.to_dict() for c in self.counter_basis],
            "counters": [c.to_dict() for c in self.counters],
        }


def channel_counters(model: AffineModel) -> list[JumpCounter]:
    """Counters of all jumps in S, checked pairwise against the trichotomy."""
    counters = [compute_jump_counter(model.space, u) for u in model.kernel.support_jumps(model.space)]
    for c_u, c_v in combinations(counters, 2):
        try:
            pairwise_case(c_u, c_v)
        except TrichotomyViolation as e:
            raise Inconsistent(f"Jumps {c_u.jump} and {c_v.jump} cannot coexist in one affine model: {e.message}",
                               **e.details) from e
    return counters


def build_transform(model: AffineModel) -> TransformResult:
    validate_model(model)
    d = model.dimension
    counters = channel_counters(model)

    basis: list[JumpCounter] = []
    rows: list[list] = []
    for counter in counters:
        candidate = rows + [list(counter.functional.linear)]
        if linalg.rank(candidate) > len(rows):
            rows = candidate
            basis.append(counter)
    k = len(basis)

    components: list[AffineFunctional] = [c.functional for c in basis]
    for i in range(d):
        if len(components) == d:
            break
        direction = AffineFunctional.coordinate(d, i)
        candidate = rows + [list(direction.linear)]
        if linalg.rank(candidate) > len(rows):
            rows = candidate
            components.append(direction)
    T = AffineMap.from_components(components)

    for x in model.space:
        image = T(x)
        if any(v.denominator != 1 for v in image) or any(v < 0 for v in image[:k]):
            raise Inconsistent(f"T maps state {x} to {tuple(str(v) for v in image)}, outside N^k x Z^(d-k)",
                               state=list(x))
    logger.info(f"Built transform with k={k} for model {model.name or ''}")
    return TransformResult(T, k, tuple(basis), tuple(counters))
