from typing import List, Optional

import numpy as np
import prefect
from prefect import flow, task, unmapped
from prefect.cache_policies import NO_CACHE
from prefect.task_runners import ThreadPoolTaskRunner

from affine_compact.core.models import AffineModel
from affine_compact.core.schema import load_model
from affine_compact.errors import ParameterError
from affine_compact.simulate.ssa import ensemble_states
from affine_compact.utilities.constants import AFFINE_NUM_THREADS, DEFAULT_CHUNK_SIZE


def chunk_bounds(n_paths: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> list[tuple[int, int]]:
    """(first_path, n) pairs covering 0..n_paths-1 in order."""
    if n_paths < 1 or chunk_size < 1:
        raise ParameterError(f"Need n_paths >= 1 and chunk_size >= 1, got {n_paths}, {chunk_size}")
    return [(start, min(chunk_size, n_paths - start)) for start in range(0, n_paths, chunk_size)]


@task(cache_policy=NO_CACHE)
def simulate_chunk(model: AffineModel, x0: List[int], times: List[float], bounds: tuple[int, int], seed: int) -> np.ndarray:
    first_path, n = bounds
    logger = prefect.get_run_logger()
    logger.debug(f"Simulating paths {first_path}..{first_path + n - 1}")
    return ensemble_states(model, x0, times, n, seed, first_path=first_path)


def run_ensemble(model: AffineModel, x0: List[int], times: List[float], n_paths: int, seed: int,
                 chunk_size: int = DEFAULT_CHUNK_SIZE) -> np.ndarray:
    """Maps simulate_chunk over path chunks; must be called inside a flow."""
    chunks = chunk_bounds(n_paths, chunk_size)
    futures = simulate_chunk.map(unmapped(model), unmapped(x0), unmapped(times), chunks, unmapped(seed))
    return np.concatenate(futures.result(), axis=1)


@flow(name="affine-sample-flow", log_prints=True, timeout_seconds=3600,
      task_runner=ThreadPoolTaskRunner(max_workers=AFFINE_NUM_THREADS))
def sample_flow(model_path: str, x0: List[int], t: float, n_paths: int, seed: int,
                chunk_size: Optional[int] = None) -> np.ndarray:
    """
    Endpoint samples of ``n_paths`` paths at time t. Chunks are independent
    because every path owns its random stream, so the result equals
    sample_at(model, x0, t, n_paths, seed) whatever the chunking.
    """
    model = load_model(model_path)
    samples = run_ensemble(model, x0, [t], n_paths, seed, chunk_size or DEFAULT_CHUNK_SIZE)[0]
    print(f"Sampled {n_paths} paths of {model.name or model_path} at t={t}")
    return samples


if __name__ == '__main__':
    sample_flow(model_path="birth_death_3.json", x0=[3], t=2.0, n_paths=50_000, seed=11)
