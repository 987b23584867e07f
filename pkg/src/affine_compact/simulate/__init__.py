from affine_compact.simulate.rng import CounterRNG, splitmix64
from affine_compact.simulate.ssa import (
    CompiledModel,
    Trajectory,
    ensemble_states,
    sample_at,
    simulate_ssa,
    state_counts,
)
from affine_compact.simulate.hybrid import (
    HybridModel,
    HybridSegment,
    HybridTrajectory,
    ZJump,
    hybrid_from_document,
    hybrid_state_at,
    hybrid_to_document,
    layer_normalizing_map,
    load_hybrid,
    make_drift_coupled_example,
    make_k1_example,
    normalize_layers,
    simulate_hybrid,
)
from affine_compact.simulate.estimators import (
    Estimate,
    MartingaleReport,
    StationarityReport,
    TransformEstimate,
    binomial_stationarity_test,
    empirical_probability,
    empirical_transform,
    martingale_check,
)
