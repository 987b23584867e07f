"""
Normalized jump counters.

For a jump u the counter psi_u is the affine functional that vanishes exactly
on the states from which u would leave E, nonnegative and integer on E, and
drops by one per jump: psi_u(u) - psi_u(0) = -1. It counts how many more
u-jumps the process can make.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from affine_compact.core.models import AffineFunctional, Point, StateSpace
from affine_compact.errors import NoCounter, ParameterError, TrichotomyViolation
from affine_compact.utilities import linalg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JumpCounter:
    jump: Point
    functional: AffineFunctional

    def __call__(self, x: Sequence) -> Fraction:
        return self.functional(x)

    def to_dict(self) -> dict:
        return {"jump": list(self.jump), "counter": self.functional.to_dict(), "formula": str(self.functional)}


class CaseKind(str, Enum):
    SAME_COUNTER = "SameCounter"
    OPPOSITE = "Opposite"
    ORTHOGONAL = "Orthogonal"


@dataclass(frozen=True)
class PairwiseCase:
    alpha: int
    beta: int
    case: CaseKind

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "case": self.case.value}


def boundary_set(space: StateSpace, u: Sequence[int]) -> list[Point]:
    """States from which a jump by u leaves E."""
    u = tuple(u)
    if not any(u):
        raise ParameterError("boundary_set needs a nonzero jump")
    return [x for x in space if tuple(a + b for a, b in zip(x, u)) not in space]


def counter_from_points(points: Sequence[Point], u: Sequence[int], dimension: int) -> AffineFunctional:
    """
    The affine functional vanishing on ``points`` and normalized along u.

    ``points`` must affinely span a hyperplane; the kernel of the system
    [x, 1] · (a, c) = 0 is then one-dimensional.
    """
    if not points:
        raise NoCounter(f"No state exits E along {tuple(u)}, so no counter can vanish there", jump=list(u))
    hull = linalg.affine_rank(list(points))
    if hull != dimension - 1:
        raise NoCounter(
            f"Boundary set of jump {tuple(u)} spans dimension {hull}, expected {dimension - 1}",
            jump=list(u), boundary=[list(p) for p in points],
        )
    rows = [list(p) + [1] for p in points]
    kernel = linalg.nullspace(rows)
    if len(kernel) != 1:
        raise NoCounter(f"Counter for jump {tuple(u)} is not unique", jump=list(u))
    normal = kernel[0]
    slope = sum((a * b for a, b in zip(normal[:dimension], u)), Fraction(0))
    if slope == 0:
        raise NoCounter(f"Jump {tuple(u)} runs parallel to its own boundary hyperplane", jump=list(u))
    scale = Fraction(-1) / slope
    return AffineFunctional(tuple(scale * a for a in normal[:dimension]), scale * normal[dimension])


def verify_counter(space: StateSpace, counter: JumpCounter) -> None:
    """Raise NoCounter unless psi is a nonnegative integer on E, positive only where the jump stays in E, and hits 1."""
    u, psi = counter.jump, counter.functional
    if psi.increment(u) != -1:
        raise NoCounter(f"Counter for {u} is not normalized", jump=list(u))
    hits_one = False
    for x in space:
        value = psi(x)
        if value < 0 or value.denominator != 1:
            raise NoCounter(f"Counter {psi} for jump {u} takes value {value} at {x}", jump=list(u), state=list(x))
        if value > 0 and tuple(a + b for a, b in zip(x, u)) not in space:
            raise NoCounter(f"Counter {psi} is positive at {x} but {x} + {u} leaves E", jump=list(u), state=list(x))
        hits_one = hits_one or value == 1
    if not hits_one:
        raise NoCounter(f"Counter {psi} for jump {u} never equals 1 on E", jump=list(u))


def compute_jump_counter(space: StateSpace, u: Sequence[int]) -> JumpCounter:
    u = tuple(int(v) for v in u)
    functional = counter_from_points(boundary_set(space, u), u, space.dimension)
    counter = JumpCounter(u, functional)
    verify_counter(space, counter)
    logger.debug(f"Counter for jump {u}: {functional}")
    return counter


def pairwise_case(c_u: JumpCounter, c_v: JumpCounter) -> PairwiseCase:
    """Classify how two counters interact: identical, opposite jumps, or orthogonal."""
    alpha = c_u.functional.increment(c_v.jump)
    beta = c_v.functional.increment(c_u.jump)
    details = dict(u=list(c_u.jump), v=list(c_v.jump), alpha=str(alpha), beta=str(beta))
    if alpha.denominator != 1 or beta.denominator != 1:
        raise TrichotomyViolation(f"Non-integer interaction ({alpha}, {beta}) between {c_u.jump} and {c_v.jump}", **details)
    a, b = int(alpha), int(beta)
    if a == -1 and b == -1:
        if c_u.functional != c_v.functional:
            raise TrichotomyViolation(
                f"Jumps {c_u.jump} and {c_v.jump} decrement each other's counters but the counters differ", **details)
        return PairwiseCase(a, b, CaseKind.SAME_COUNTER)
    if a == 1 and b == 1 and all(x == -y for x, y in zip(c_u.jump, c_v.jump)):
        return PairwiseCase(a, b, CaseKind.OPPOSITE)
    if min(a, b) == 0 and a >= 0 and b >= 0:
        return PairwiseCase(a, b, CaseKind.ORTHOGONAL)
    raise TrichotomyViolation(f"Jumps {c_u.jump} and {c_v.jump} fit no admissible case (alpha={a}, beta={b})", **details)
