"""
Model file codec.

A model document looks like::

    {"dimension": 1,
     "states": {"kind": "interval", "N": 3},
     "channels": [{"jump": [-1], "intensity": {"linear": [2], "offset": 0}},
                  {"jump": [1], "intensity": {"linear": [-1], "offset": 3}}]}

Rationals are integers or "p/q" strings. ``states`` is an explicit list of
integer points or one of the generators interval / simplex / box.
"""
import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, field_validator, model_validator

from affine_compact.core.models import AffineFunctional, AffineMap, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.errors import ParseError, SchemaError
from affine_compact.utilities.linalg import to_fraction

RationalValue = Union[int, str]


def _check_rational(value):
    try:
        to_fraction(value)
    except SchemaError as e:
        raise ValueError(e.message) from e
    return value


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IntensitySchema(_Strict):
    linear: list[RationalValue]
    offset: RationalValue = 0

    @field_validator("linear")
    @classmethod
    def _linear_rationals(cls, v):
        return [_check_rational(x) for x in v]

    @field_validator("offset")
    @classmethod
    def _offset_rational(cls, v):
        return _check_rational(v)


class ChannelSchema(_Strict):
    jump: list[int]
    intensity: IntensitySchema


class IntervalStates(_Strict):
    kind: Literal["interval"]
    N: int = Field(ge=0)


class SimplexStates(_Strict):
    kind: Literal["simplex"]
    N: int = Field(ge=0)


class BoxStates(_Strict):
    kind: Literal["box"]
    N: list[Annotated[int, Field(ge=0)]]


StateGenerator = Annotated[Union[IntervalStates, SimplexStates, BoxStates], Field(discriminator="kind")]


class DriftSchema(_Strict):
    matrix: list[list[RationalValue]]
    offset: list[RationalValue]

    @field_validator("matrix")
    @classmethod
    def _matrix_rationals(cls, v):
        return [[_check_rational(x) for x in row] for row in v]

    @field_validator("offset")
    @classmethod
    def _offset_rationals(cls, v):
        return [_check_rational(x) for x in v]


class ModelDocument(_Strict):
    dimension: PositiveInt
    states: Union[list[list[int]], StateGenerator]
    channels: list[ChannelSchema] = Field(default_factory=list)
    drift: Optional[DriftSchema] = None
    full_span: bool = True
    name: Optional[str] = None

    @model_validator(mode="after")
    def _dimensions_agree(self):
        d = self.dimension
        if isinstance(self.states, list):
            for i, p in enumerate(self.states):
                if len(p) != d:
                    raise ValueError(f"states[{i}] has dimension {len(p)}, expected {d}")
        elif isinstance(self.states, (IntervalStates,)) and d != 1:
            raise ValueError("interval generator requires dimension 1")
        elif isinstance(self.states, BoxStates) and len(self.states.N) != d:
            raise ValueError(f"box generator needs {d} bounds")
        for i, c in enumerate(self.channels):
            if len(c.jump) != d or len(c.intensity.linear) != d:
                raise ValueError(f"channels[{i}] does not match dimension {d}")
            if not any(c.jump):
                raise ValueError(f"channels[{i}] has a zero jump")
        if self.drift is not None and (len(self.drift.offset) != d or len(self.drift.matrix) != d
                                       or any(len(r) != d for r in self.drift.matrix)):
            raise ValueError(f"drift must be a {d}x{d} matrix with a length-{d} offset")
        return self


def _pointer(loc: tuple) -> str:
    return "/" + "/".join(str(p) for p in loc)


def parse_document(doc: dict) -> ModelDocument:
    try:
        return ModelDocument.model_validate(doc)
    except ValidationError as e:
        errors = [{"pointer": _pointer(err["loc"]), "message": err["msg"]} for err in e.errors()]
        raise SchemaError(f"Model document failed schema validation ({len(errors)} error(s))", errors=errors) from e


def model_from_document(doc: dict) -> AffineModel:
    parsed = parse_document(doc)
    d = parsed.dimension
    states = parsed.states
    if isinstance(states, IntervalStates):
        space = StateSpace.interval(states.N)
    elif isinstance(states, SimplexStates):
        space = StateSpace.simplex(d, states.N)
    elif isinstance(states, BoxStates):
        space = StateSpace.box(states.N)
    else:
        if len(set(map(tuple, states))) != len(states):
            raise SchemaError("states contains duplicate points", errors=[{"pointer": "/states", "message": "duplicate point"}])
        space = StateSpace(d, tuple(tuple(p) for p in states))
    kernel = JumpKernel.from_channels(
        JumpChannel(tuple(c.jump), AffineFunctional(tuple(c.intensity.linear), c.intensity.offset))
        for c in parsed.channels
    )
    drift = None
    if parsed.drift is not None:
        drift = AffineMap(tuple(tuple(r) for r in parsed.drift.matrix), tuple(parsed.drift.offset))
    return AffineModel(space, kernel, drift=drift, full_span=parsed.full_span, name=parsed.name)


def model_to_document(model: AffineModel) -> dict:
    doc = {
        "dimension": model.dimension,
        "states": [list(p) for p in model.space],
        "channels": [{"jump": list(c.jump), "intensity": c.intensity.to_dict()} for c in model.kernel.channels],
    }
    if model.drift is not None:
        doc["drift"] = model.drift.to_dict()
    if not model.full_span:
        doc["full_span"] = False
    if model.name:
        doc["name"] = model.name
    return doc


def load_model(path: str | Path) -> AffineModel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"Cannot read model file {path}: {e}", path=str(path)) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON in {path}: {e.msg}", path=str(path), line=e.lineno, column=e.colno) from e
    return model_from_document(doc)


def dump_model(model: AffineModel, path: str | Path | None = None) -> str:
    text = json.dumps(model_to_document(model), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
