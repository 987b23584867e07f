"""
Piecewise-deterministic simulation of the k = 1 case X = (Y, Z).

Y is a birth–death chain on {0..N}; between its jumps Z follows
dZ = (b0 + b1*Y + b2*Z) dt, solved in closed form; Z may only jump together
with Y, by a constant or a uniformly distributed amount.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from affine_compact.classify.generators import make_birth_death
from affine_compact.core.models import AffineMap, AffineModel
from affine_compact.core.schema import model_from_document, model_to_document
from affine_compact.errors import ParameterError, ParseError, SchemaError
from affine_compact.simulate.rng import CounterRNG
from affine_compact.simulate.ssa import CompiledModel
from affine_compact.utilities.linalg import to_fraction

logger = logging.getLogger(__name__)

# float slack for containment checks on the closed-form flow
CONTAINMENT_SLACK = 1e-12


@dataclass(frozen=True)
class ZJump:
    """Z jumps by Uniform[low, high]; low == high is a constant jump."""
    low: float
    high: float

    def __post_init__(self):
        if self.high < self.low:
            raise ParameterError(f"Empty Z jump range [{self.low}, {self.high}]")

    @classmethod
    def constant(cls, c: float) -> "ZJump":
        return cls(float(c), float(c))

    @classmethod
    def uniform(cls, c: float) -> "ZJump":
        return cls(0.0, float(c)) if c >= 0 else cls(float(c), 0.0)

    @property
    def is_constant(self) -> bool:
        return self.low == self.high

    def sample(self, u: float) -> float:
        return self.low + (self.high - self.low) * u

    def to_dict(self) -> dict:
        if self.is_constant:
            return {"kind": "constant", "size": self.low}
        return {"kind": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class HybridModel:
    layer_model: AffineModel
    z_drift: tuple[float, float, float]
    z_jumps: Mapping[int, ZJump] = field(default_factory=dict)
    z_bounds: Optional[tuple[tuple[float, float], ...]] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.layer_model.dimension != 1:
            raise ParameterError("The Y component of a hybrid model must be one-dimensional")
        if len(self.z_drift) != 3:
            raise ParameterError(f"z_drift needs (b0, b1, b2), got {self.z_drift}")
        object.__setattr__(self, "z_drift", tuple(float(v) for v in self.z_drift))
        jumps = {c.jump[0] for c in self.layer_model.kernel.channels}
        unknown = [j for j in self.z_jumps if j not in jumps]
        if unknown:
            raise ParameterError(f"Z jump laws given for Y jumps {unknown} that the layer model does not have")
        if self.z_bounds is not None:
            layers = [p[0] for p in self.layer_model.space]
            if len(self.z_bounds) != max(layers) + 1:
                raise ParameterError(f"z_bounds needs one (low, high) pair per layer 0..{max(layers)}")
            if any(lo > hi for lo, hi in self.z_bounds):
                raise ParameterError("z_bounds contains an empty layer")

    def flow(self, y: int, z0: float, s: float) -> float:
        """Z after time s in layer y, starting from z0."""
        b0, b1, b2 = self.z_drift
        c = b0 + b1 * y
        if b2 == 0:
            return z0 + c * s
        fixed = -c / b2
        return fixed + (z0 - fixed) * math.exp(b2 * s)

    def in_layer(self, y: int, z: float) -> bool:
        if self.z_bounds is None:
            return True
        lo, hi = self.z_bounds[y]
        return lo - CONTAINMENT_SLACK <= z <= hi + CONTAINMENT_SLACK


@dataclass(frozen=True)
class HybridSegment:
    t_start: float
    t_end: float
    y: int
    z_start: float
    z_end: float

    @property
    def z_range(self) -> tuple[float, float]:
        """The flow is monotone, so its extremes sit at the endpoints."""
        return min(self.z_start, self.z_end), max(self.z_start, self.z_end)


@dataclass(frozen=True)
class HybridTrajectory:
    """z_jump_sizes holds one entry per Y jump, 0.0 where that jump carries no Z law."""

    segments: tuple[HybridSegment, ...]
    horizon: float
    z_jump_sizes: tuple[float, ...] = ()

    @property
    def y_jump_times(self) -> list[float]:
        return [s.t_start for s in self.segments[1:]]

    @property
    def z_jump_times(self) -> list[float]:
        return [b.t_start for a, b in zip(self.segments, self.segments[1:]) if b.z_start != a.z_end]

    @property
    def n_y_jumps(self) -> int:
        return len(self.segments) - 1

    @property
    def n_z_jumps(self) -> int:
        return len(self.z_jump_times)

    def contained(self, hmodel: HybridModel) -> bool:
        return all(hmodel.in_layer(s.y, lo) and hmodel.in_layer(s.y, hi)
                   for s in self.segments for lo, hi in [s.z_range])

    def to_rows(self) -> list[dict]:
        return [{"t_start": s.t_start, "t_end": s.t_end, "y": s.y, "z_start": s.z_start, "z_end": s.z_end}
                for s in self.segments]


def hybrid_state_at(trajectory: HybridTrajectory, hmodel: HybridModel, t: float) -> tuple[int, float]:
    if t < 0 or t > trajectory.horizon:
        raise ParameterError(f"t={t} is outside [0, {trajectory.horizon}]")
    segment = trajectory.segments[0]
    for s in trajectory.segments:
        if s.t_start > t:
            break
        segment = s
    return segment.y, hmodel.flow(segment.y, segment.z_start, t - segment.t_start)


def simulate_hybrid(hmodel: HybridModel, start: Sequence[float], horizon: float, seed: int,
                    stream: int = 0) -> HybridTrajectory:
    """
    Draws per path: one uniform for each holding time, and at each event one
    uniform to pick the Y channel followed by one for the Z jump size.
    """
    y0, z0 = int(start[0]), float(start[1])
    if (y0,) not in hmodel.layer_model.space or not hmodel.in_layer(y0, z0):
        raise ParameterError(f"Start ({y0}, {z0}) is not in the layered state space")
    if horizon < 0:
        raise ParameterError(f"Horizon must be nonnegative, got {horizon}")

    compiled = CompiledModel(hmodel.layer_model)
    rng = CounterRNG(seed)
    key = rng.stream_keys(np.array([stream]))
    counter = 0

    def draw() -> np.ndarray:
        nonlocal counter
        u = rng.uniform(key, np.array([counter]))
        counter += 1
        return u

    state = np.array([compiled.index_of((y0,))])
    t, y, z = 0.0, y0, z0
    segments: list[HybridSegment] = []
    sizes: list[float] = []
    next_time = float(compiled.holding_times(state, draw())[0])
    while next_time <= horizon:
        z_end = hmodel.flow(y, z, next_time - t)
        segments.append(HybridSegment(t, next_time, y, z, z_end))
        channel = int(compiled.pick(state, draw())[0])
        jump = int(compiled.jumps[channel][0])
        law = hmodel.z_jumps.get(jump)
        size_u = float(draw()[0])
        size = law.sample(size_u) if law is not None else 0.0
        state = compiled.next_index[state, channel]
        t, y, z = next_time, y + jump, z_end + size
        sizes.append(size)
        next_time = t + float(compiled.holding_times(state, draw())[0])
    segments.append(HybridSegment(t, float(horizon), y, z, hmodel.flow(y, z, horizon - t)))
    logger.debug(f"Hybrid path {stream}: {len(sizes)} Y jumps up to t={horizon}")
    return HybridTrajectory(tuple(segments), float(horizon), tuple(sizes))


def make_k1_example(N: int) -> HybridModel:
    """
    Pure-death Y with unit rate per individual, dZ = -Z dt, and a Uniform[0, 1]
    upward Z jump at every Y jump; layer y is [0, N - y].
    """
    layer = make_birth_death(N, 1, 0)
    bounds = tuple((0.0, float(N - y)) for y in range(N + 1))
    return HybridModel(layer, (0.0, 0.0, -1.0), {-1: ZJump.uniform(1.0)}, bounds, name=f"k1-example-{N}")


def make_drift_coupled_example(N: int) -> HybridModel:
    """Birth–death Y with alpha = beta = 1 and continuous Z with dZ = (Y/N - Z) dt on [0, 1]."""
    layer = make_birth_death(N, 1, 1)
    bounds = tuple((0.0, 1.0) for _ in range(N + 1))
    return HybridModel(layer, (0.0, 1.0 / N, -1.0), {}, bounds, name=f"drift-coupled-{N}")


def layer_normalizing_map(f0, f1) -> AffineMap:
    """(y, z) -> (y, z - f0 - y(f1 - f0)): moves the lowest points of layers 0 and 1 to z = 0."""
    f0, f1 = to_fraction(f0), to_fraction(f1)
    return AffineMap(((1, 0), (-(f1 - f0), 1)), (0, -f0), declared_invertible=True)


def normalize_layers(minima: Sequence) -> tuple[AffineMap, list[Fraction]]:
    """The normalizing shear for layer minima f_0..f_N and the shifted minima it produces."""
    if len(minima) < 2:
        raise ParameterError("Need the minima of at least two layers")
    T = layer_normalizing_map(minima[0], minima[1])
    shifted = [T((j, to_fraction(f)))[1] for j, f in enumerate(minima)]
    return T, shifted


class ZJumpSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")
    jump: int
    kind: Literal["constant", "uniform"]
    size: float


class HybridDocument(BaseModel):
    """
    A hybrid file: the Y layer model plus the Z dynamics::

        {"layer_model": {...}, "z_drift": [0, 0, -1],
         "z_jumps": [{"jump": -1, "kind": "uniform", "size": 1}],
         "z_bounds": [[0, 3], [0, 2], [0, 1], [0, 0]]}
    """
    model_config = ConfigDict(extra="forbid")
    layer_model: dict
    z_drift: list[float] = Field(min_length=3, max_length=3)
    z_jumps: list[ZJumpSchema] = Field(default_factory=list)
    z_bounds: Optional[list[tuple[float, float]]] = None
    name: Optional[str] = None


def hybrid_from_document(doc: dict) -> HybridModel:
    try:
        parsed = HybridDocument.model_validate(doc)
    except ValidationError as e:
        errors = [{"pointer": "/" + "/".join(str(p) for p in err["loc"]), "message": err["msg"]} for err in e.errors()]
        raise SchemaError(f"Hybrid document failed schema validation ({len(errors)} error(s))", errors=errors) from e
    laws = {z.jump: ZJump.constant(z.size) if z.kind == "constant" else ZJump.uniform(z.size) for z in parsed.z_jumps}
    bounds = tuple(tuple(b) for b in parsed.z_bounds) if parsed.z_bounds is not None else None
    return HybridModel(model_from_document(parsed.layer_model), tuple(parsed.z_drift), laws, bounds, parsed.name)


def hybrid_to_document(hmodel: HybridModel) -> dict:
    z_jumps = []
    for jump, law in hmodel.z_jumps.items():
        if law.is_constant:
            z_jumps.append({"jump": jump, "kind": "constant", "size": law.low})
        else:
            z_jumps.append({"jump": jump, "kind": "uniform", "size": law.high if law.low == 0 else law.low})
    doc = {"layer_model": model_to_document(hmodel.layer_model), "z_drift": list(hmodel.z_drift), "z_jumps": z_jumps}
    if hmodel.z_bounds is not None:
        doc["z_bounds"] = [list(b) for b in hmodel.z_bounds]
    if hmodel.name:
        doc["name"] = hmodel.name
    return doc


def load_hybrid(path: str | Path) -> HybridModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise ParseError(f"Cannot read hybrid model file {path}: {e}", path=str(path)) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON in {path}: {e.msg}", path=str(path), line=e.lineno, column=e.colno) from e
    return hybrid_from_document(doc)
