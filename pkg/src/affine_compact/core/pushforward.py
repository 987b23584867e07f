from affine_compact.core.models import AffineMap, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.errors import ParameterError


def _integral(v, what: str) -> tuple[int, ...]:
    if any(c.denominator != 1 for c in v):
        raise ParameterError(f"{what} {tuple(str(c) for c in v)} is not a lattice vector")
    return tuple(int(c) for c in v)


def transform_model(model: AffineModel, T: AffineMap) -> AffineModel:
    """
    The model of T(X): states T(E), jumps A·u, intensities lambda_u(T^{-1} y)
    and, when present, the conjugated drift A·b(T^{-1} y).
    """
    if not T.is_invertible:
        raise ParameterError("transform_model needs an invertible affine map")
    if T.dimension != model.dimension:
        raise ParameterError(f"Map dimension {T.dimension} does not match model dimension {model.dimension}")
    T_inv = T.inverse()
    space = StateSpace(model.dimension, tuple(_integral(T(x), "Transformed state") for x in model.space))
    channels = [
        JumpChannel(_integral(T.apply_linear(c.jump), "Transformed jump"), c.intensity.compose(T_inv))
        for c in model.kernel.channels
    ]
    drift = None
    if model.drift is not None:
        linear_part = AffineMap(T.matrix, (0,) * T.dimension)
        drift = linear_part.compose(model.drift.compose(T_inv))
    return AffineModel(space, JumpKernel(tuple(channels)), drift=drift, full_span=model.full_span, name=model.name)
