"""Affine jump processes on compact state spaces."""
from affine_compact.core import AffineFunctional, AffineMap, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.core import dump_model, load_model, validate_model
from affine_compact.errors import AffineError

__version__ = "0.1"
