from affine_compact.counters.jump_counters import (
    CaseKind,
    JumpCounter,
    PairwiseCase,
    boundary_set,
    compute_jump_counter,
    counter_from_points,
    pairwise_case,
    verify_counter,
)
from affine_compact.counters.transform import TransformResult, build_transform, channel_counters
