from affine_compact.transforms.polynomial import SparsePolynomial
from affine_compact.transforms.riccati import (
    KernelDecomposition,
    RiccatiSystem,
    RiccatiTransform,
    TransformValue,
    build_riccati,
    decompose_kernel,
    initial_value,
    riccati_system_for,
    solve_riccati,
    solve_riccati_batch,
    solve_riccati_grid,
)
from affine_compact.transforms.closed_form import binomial_limit, closed_form_1d, closed_form_transform
from affine_compact.transforms.oracle import TransformOracle, generator_matrix, transform_oracle, uniformized_action
from affine_compact.transforms.zeros import SearchRectangle, find_psi_zero
