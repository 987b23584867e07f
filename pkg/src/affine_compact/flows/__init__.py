from affine_compact.flows.simulation_flow import chunk_bounds, run_ensemble, sample_flow, simulate_chunk
from affine_compact.flows.verify_flow import build_report, report_markdown, verify_flow

__all__ = [
    "build_report",
    "chunk_bounds",
    "report_markdown",
    "run_ensemble",
    "sample_flow",
    "simulate_chunk",
    "verify_flow",
]
