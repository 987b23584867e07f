from affine_compact.classify.generators import (
    make_birth_death,
    make_independent_product,
    make_layer_example,
    make_simplex,
    simplex_pairs,
    simplex_rates_2d,
)
from affine_compact.classify.one_dim import Classification1D, OneDimKind, classify_1d
from affine_compact.classify.two_dim import Classification2D, TwoDimCase, classify_2d
from affine_compact.classify.diagnostics import autonomous_directions, is_irreducible
