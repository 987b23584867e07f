"""
Classification of planar affine processes with E ⊆ N^2 and pi_1, pi_2 as
normalized jump counters into the layered, independent-product and simplex
cases.

The decision order follows the proof: large jumps first, then the
two-counter case, the (1, 1) jump, the simplex counter triple, and finally
the layered and product cases that remain.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

from affine_compact.classify.diagnostics import autonomous_directions, is_irreducible
from affine_compact.core.models import AffineFunctional, AffineMap, AffineModel, Point
from affine_compact.core.pushforward import transform_model
from affine_compact.counters.jump_counters import JumpCounter, compute_jump_counter
from affine_compact.counters.transform import TransformResult
from affine_compact.errors import ParameterError, UnclassifiableModel

logger = logging.getLogger(__name__)

SIMPLEX_JUMPS = frozenset({(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)})
PRODUCT_JUMPS = frozenset({(-1, 0), (0, -1), (1, 0), (0, 1)})

PI_1 = AffineFunctional.coordinate(2, 0)
PI_2 = AffineFunctional.coordinate(2, 1)
SWAP = AffineMap(((0, 1), (1, 0)), (0, 0), declared_invertible=True)


class TwoDimCase(str, Enum):
    LAYERED = "Layered"
    INDEPENDENT_PRODUCT = "IndependentProduct"
    SIMPLEX_TYPE = "SimplexType"


@dataclass(frozen=True)
class Classification2D:
    case: TwoDimCase
    witness_map: AffineMap
    jump_set: tuple[Point, ...]
    counters: tuple[JumpCounter, ...]
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "witness_map": self.witness_map.to_dict(),
            "witness_components": [str(c) for c in self.witness_map.components()],
            "jump_set": [list(u) for u in self.jump_set],
            "counters": [c.to_dict() for c in self.counters],
            "diagnostics": self.diagnostics,
        }


def _is_layered_jump(u: Point) -> bool:
    return u in ((-1, 0), (1, 0)) or (u[1] == -1 and u[0] >= 0)


def _is_simplex_counter(psi: AffineFunctional) -> bool:
    """pi_1, pi_2 or N - pi_1 - pi_2 with N a nonnegative integer."""
    if psi in (PI_1, PI_2):
        return True
    return psi.linear == (-1, -1) and psi.offset.denominator == 1 and psi.offset >= 0


def _is_product_counter(psi: AffineFunctional) -> bool:
    """pi_1, pi_2, N - pi_1 or K - pi_2."""
    if psi in (PI_1, PI_2):
        return True
    return psi.linear in ((-1, 0), (0, -1)) and psi.offset.denominator == 1


def _large_jump_map(u: Point, counter: AffineFunctional) -> AffineMap:
    first = PI_1 if abs(u[0]) >= 2 else PI_2
    return AffineMap.from_components([first, counter])


def _decide(counters: dict[Point, AffineFunctional]) -> tuple[TwoDimCase, AffineMap, str]:
    """Pick the case and the extra map W applied on top of the counter coordinates."""
    jumps = list(counters)
    functionals = set(counters.values())
    identity = AffineMap.identity(2)

    large = next((u for u in jumps if max(abs(u[0]), abs(u[1])) >= 2), None)
    if large is not None:
        return TwoDimCase.LAYERED, _large_jump_map(large, counters[large]), f"large jump {large}"
    if functionals == {PI_1, PI_2}:
        return TwoDimCase.SIMPLEX_TYPE, identity, "exactly two counters pi_1, pi_2"
    if (1, 1) in counters:
        return TwoDimCase.LAYERED, AffineMap.from_components([PI_1, counters[(1, 1)]]), "jump (1, 1)"
    if all(_is_simplex_counter(psi) for psi in functionals):
        return TwoDimCase.SIMPLEX_TYPE, identity, "counters among pi_0, pi_1, pi_2"
    if all(u[1] <= 0 for u in jumps):
        return TwoDimCase.LAYERED, identity, "no upward jumps in x2"
    if all(u[0] <= 0 for u in jumps):
        return TwoDimCase.LAYERED, SWAP, "no upward jumps in x1"
    if set(jumps) <= PRODUCT_JUMPS and all(_is_product_counter(psi) for psi in functionals):
        return TwoDimCase.INDEPENDENT_PRODUCT, identity, "coordinate jumps with box counters"
    pair = next(((u, psi) for u, psi in counters.items() if psi not in (PI_1, PI_2)), None)
    raise UnclassifiableModel(
        "No planar case matches; the model cannot be affine",
        jump=list(pair[0]) if pair else None,
        counter=str(pair[1]) if pair else None,
        jumps=[list(u) for u in jumps],
    )


def _check_case(case: TwoDimCase, jumps: list[Point]) -> None:
    if case is TwoDimCase.LAYERED:
        bad = [u for u in jumps if not _is_layered_jump(u)]
    elif case is TwoDimCase.INDEPENDENT_PRODUCT:
        bad = [u for u in jumps if u not in PRODUCT_JUMPS]
    else:
        bad = [u for u in jumps if u not in SIMPLEX_JUMPS]
    if bad:
        raise UnclassifiableModel(f"Jumps {bad} break the {case.value} structure",
                                  case=case.value, jumps=[list(u) for u in bad])


def _counters(model: AffineModel) -> dict[Point, AffineFunctional]:
    return {u: compute_jump_counter(model.space, u).functional for u in model.kernel.support_jumps(model.space)}


def classify_2d(model: AffineModel, transform: TransformResult, diagnostics: bool = True) -> Classification2D:
    """
    ``transform`` must come from build_transform(model) with k = 2; the
    model is mapped by it explicitly and never re-normalized here.
    """
    if model.dimension != 2:
        raise ParameterError(f"classify_2d needs a two-dimensional model, got d={model.dimension}")
    if transform.k != 2:
        raise ParameterError(f"classify_2d needs two basis counters, build_transform returned k={transform.k}")

    normal = transform_model(model, transform.map)
    counters = _counters(normal)
    if PI_1 not in counters.values() or PI_2 not in counters.values():
        raise ParameterError("pi_1 and pi_2 are not both jump counters after the transform")

    case, extra, reason = _decide(counters)
    witness = extra.compose(transform.map)
    final = transform_model(model, witness)
    final_counters = _counters(final)
    jumps = tuple(final_counters)
    _check_case(case, list(jumps))
    logger.info(f"Classified {model.name or 'model'} as {case.value} ({reason})")

    report = {}
    if diagnostics:
        report = {
            "irreducible": is_irreducible(final),
            "autonomous_directions": [str(a) for a in autonomous_directions(final)],
        }
    return Classification2D(
        case=case,
        witness_map=witness,
        jump_set=jumps,
        counters=tuple(JumpCounter(u, psi) for u, psi in final_counters.items()),
        diagnostics=report,
    )
