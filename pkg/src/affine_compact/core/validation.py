import logging
from typing import Literal, Optional, Sequence

from pydantic import BaseModel, Field

from affine_compact.core.models import AffineModel
from affine_compact.errors import DegenerateSpan, NegativeIntensity, SupportViolation
from affine_compact.utilities import linalg

logger = logging.getLogger(__name__)


class ValidationIssue(BaseModel):
    kind: Literal["NegativeIntensity", "SupportViolation", "DegenerateSpan"]
    state: Optional[list[int]] = None
    jump: Optional[list[int]] = None
    intensity: Optional[str] = None
    message: str


class ValidationReport(BaseModel):
    """Outcome of validate_model. ``valid`` is False as soon as one issue is present."""

    dimension: int
    n_states: int
    n_channels: int
    span_dim: int
    full_span_required: bool
    levy_integrable: bool = Field(
        default=True,
        description="Finite-atom kernels always integrate min(|xi|^2, 1); reported for completeness.",
    )
    issues: list[ValidationIssue] = Field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    def to_dict(self) -> dict:
        out = self.model_dump()
        out["valid"] = self.valid
        return out


def affine_span_dim(points: Sequence[Sequence[int]]) -> int:
    """Dimension of the affine hull of a nonempty point set, computed exactly."""
    if not points:
        raise ValueError("affine_span_dim needs at least one point")
    return linalg.affine_rank(list(points))


def check_model(model: AffineModel) -> ValidationReport:
    """Run every validation check and collect the issues without raising."""
    space, kernel = model.space, model.kernel
    report = ValidationReport(
        dimension=model.dimension,
        n_states=len(space),
        n_channels=len(kernel),
        span_dim=space.span_dim,
        full_span_required=model.full_span,
    )
    for x in space:
        for channel in kernel.channels:
            lam = channel.intensity(x)
            if lam < 0:
                report.issues.append(ValidationIssue(
                    kind="NegativeIntensity", state=list(x), jump=list(channel.jump), intensity=str(lam),
                    message=f"Intensity of jump {channel.jump} is {lam} < 0 at {x}",
                ))
            elif lam > 0:
                target = tuple(a + b for a, b in zip(x, channel.jump))
                if target not in space:
                    report.issues.append(ValidationIssue(
                        kind="SupportViolation", state=list(x), jump=list(channel.jump), intensity=str(lam),
                        message=f"Jump {channel.jump} fires at {x} with intensity {lam} but {target} is not a state",
                    ))
    if model.full_span and space.span_dim < model.dimension:
        report.issues.append(ValidationIssue(
            kind="DegenerateSpan",
            message=f"Affine span of E has dimension {space.span_dim} < {model.dimension}",
        ))
    return report


_ERRORS = {
    "NegativeIntensity": NegativeIntensity,
    "SupportViolation": SupportViolation,
    "DegenerateSpan": DegenerateSpan,
}


def validate_model(model: AffineModel) -> ValidationReport:
    """Return the report of a valid model; raise the first issue's error otherwise."""
    report = check_model(model)
    if report.issues:
        first = report.issues[0]
        logger.info(f"Model {model.name or ''} failed validation with {len(report.issues)} issue(s)")
        raise _ERRORS[first.kind](first.message, report=report, state=first.state, jump=first.jump)
    return report
