from affine_compact.core.models import (
    AffineFunctional,
    AffineMap,
    AffineModel,
    JumpChannel,
    JumpKernel,
    Point,
    StateSpace,
)
from affine_compact.core.validation import ValidationReport, affine_span_dim, check_model, validate_model
from affine_compact.core.markov import embed_markov_chain
from affine_compact.core.pushforward import transform_model
from affine_compact.core.schema import dump_model, load_model, model_from_document, model_to_document
