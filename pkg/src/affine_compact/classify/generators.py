"""Constructors for the canonical models: birth–death, lattice simplex, layered example, product."""
from fractions import Fraction
from typing import Mapping, Optional

from affine_compact.core.models import AffineFunctional, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.core.validation import validate_model
from affine_compact.errors import ParameterError
from affine_compact.utilities.linalg import to_fraction

LAYER_EXAMPLE_STATES = (
    (0, 2),
    (0, 1), (1, 1), (2, 1), (3, 1),
    (0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (5, 0), (6, 0), (7, 0),
)


def _rate(value, name: str) -> Fraction:
    try:
        rate = to_fraction(value)
    except ValueError as e:
        raise ParameterError(f"{name} must be an exact rational, got {value!r}") from e
    if rate < 0:
        raise ParameterError(f"{name} must be nonnegative, got {rate}")
    return rate


def make_birth_death(N: int, alpha_rate, beta_rate) -> AffineModel:
    """x -> x-1 at rate alpha*x and x -> x+1 at rate beta*(N-x) on {0, ..., N}."""
    if N < 1:
        raise ParameterError(f"Birth-death model needs N >= 1, got {N}")
    alpha = _rate(alpha_rate, "alpha_rate")
    beta = _rate(beta_rate, "beta_rate")
    if alpha == 0:
        raise ParameterError("Birth-death model needs alpha_rate > 0")
    channels = [JumpChannel((-1,), AffineFunctional((alpha,), 0))]
    if beta > 0:
        channels.append(JumpChannel((1,), AffineFunctional((-beta,), beta * N)))
    model = AffineModel(StateSpace.interval(N), JumpKernel(tuple(channels)), name=f"birth-death-{N}")
    validate_model(model)
    return model


def simplex_pairs(d: int) -> list[tuple[int, int]]:
    """Ordered pairs (j, k) behind the jumps e_j - e_k, grouped by counter pi_k with pi_0 last."""
    return [(j, k) for k in list(range(1, d + 1)) + [0] for j in range(d + 1) if j != k]


def simplex_rates_2d(l1, l2, l3, l4, l5, l6) -> dict[tuple[int, int], Fraction]:
    """
    Rates of the planar simplex kernel
    x1(l1 d(-1,0) + l2 d(-1,1)) + x2(l3 d(0,-1) + l4 d(1,-1)) + (N-x1-x2)(l5 d(1,0) + l6 d(0,1)).
    """
    return {(0, 1): l1, (2, 1): l2, (0, 2): l3, (1, 2): l4, (1, 0): l5, (2, 0): l6}


def make_simplex(d: int, N: int, rates: Optional[Mapping[tuple[int, int], object]] = None) -> AffineModel:
    """
    Lattice simplex {x in N^d : sum x <= N} with jump e_j - e_k (e_0 = 0) fired
    at rate rates[(j, k)] * pi_k(x), where pi_0 = N - sum x. Missing pairs and
    zero rates contribute no channel; ``rates=None`` sets every rate to 1.
    """
    if d < 1 or N < 1:
        raise ParameterError(f"Simplex model needs d >= 1 and N >= 1, got d={d}, N={N}")
    pairs = simplex_pairs(d)
    if rates is None:
        rates = {p: 1 for p in pairs}
    unknown = [p for p in rates if tuple(p) not in pairs]
    if unknown:
        raise ParameterError(f"Rate keys {unknown} are not pairs (j, k) with 0 <= j, k <= {d}, j != k")

    def unit(j: int) -> tuple[int, ...]:
        return tuple(int(i == j - 1) for i in range(d))

    def projection(k: int) -> AffineFunctional:
        if k == 0:
            return AffineFunctional((-1,) * d, N)
        return AffineFunctional.coordinate(d, k - 1)

    channels = []
    for j, k in pairs:
        rate = _rate(rates.get((j, k), 0), f"rate{(j, k)}")
        if rate == 0:
            continue
        jump = tuple(a - b for a, b in zip(unit(j), unit(k)))
        channels.append(JumpChannel(jump, projection(k).scaled(rate)))
    model = AffineModel(StateSpace.simplex(d, N), JumpKernel(tuple(channels)), name=f"simplex-{d}-{N}")
    validate_model(model)
    return model


def make_layer_example(extra_base_points: int = 0) -> AffineModel:
    """
    Three layers x2 = 2, 1, 0 with S = {(-1,0), (0,-1), (2,-1), (3,-1)}: the
    first jump is counted by pi_1, the others by pi_2. The base layer may be
    extended by the points (8, 0), (9, 0), ... without breaking the model.
    """
    if extra_base_points < 0:
        raise ParameterError("extra_base_points must be nonnegative")
    states = LAYER_EXAMPLE_STATES + tuple((8 + i, 0) for i in range(extra_base_points))
    pi1 = AffineFunctional.coordinate(2, 0)
    pi2 = AffineFunctional.coordinate(2, 1)
    channels = (
        JumpChannel((-1, 0), pi1),
        JumpChannel((0, -1), pi2),
        JumpChannel((2, -1), pi2),
        JumpChannel((3, -1), pi2),
    )
    model = AffineModel(StateSpace(2, states), JumpKernel(channels), name="layer-example")
    validate_model(model)
    return model


def make_independent_product(N1: int, alpha1, beta1, N2: int, alpha2, beta2) -> AffineModel:
    """Two independent birth–death processes run side by side on {0..N1} x {0..N2}."""
    if N1 < 1 or N2 < 1:
        raise ParameterError(f"Product model needs N1, N2 >= 1, got {N1}, {N2}")
    a1, b1 = _rate(alpha1, "alpha1"), _rate(beta1, "beta1")
    a2, b2 = _rate(alpha2, "alpha2"), _rate(beta2, "beta2")
    if a1 == 0 or a2 == 0:
        raise ParameterError("Product model needs positive death rates")
    channels = [
        JumpChannel((-1, 0), AffineFunctional((a1, 0), 0)),
        JumpChannel((0, -1), AffineFunctional((0, a2), 0)),
    ]
    if b1 > 0:
        channels.append(JumpChannel((1, 0), AffineFunctional((-b1, 0), b1 * N1)))
    if b2 > 0:
        channels.append(JumpChannel((0, 1), AffineFunctional((0, -b2), b2 * N2)))
    model = AffineModel(StateSpace.box([N1, N2]), JumpKernel(tuple(channels)), name=f"product-{N1}-{N2}")
    validate_model(model)
    return model
