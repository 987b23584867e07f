"""
Exact event-driven simulation of pure-jump lattice models.

Draw protocol per path (stream p, counter starting at 0):
  * on entering a state, one uniform U gives the holding time -log(U) / Lambda(x),
    infinite when Lambda(x) = 0;
  * at each event, one uniform U picks the channel: the first channel whose
    cumulative rate exceeds U * Lambda(x).
The ensemble engine and the single-path simulator follow the same protocol,
so path p of an ensemble is exactly simulate_ssa(..., stream=p).
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from affine_compact.core.models import AffineModel, Point
from affine_compact.core.validation import validate_model
from affine_compact.errors import ParameterError
from affine_compact.simulate.rng import CounterRNG
from affine_compact.utilities.timing import time_it

logger = logging.getLogger(__name__)


class CompiledModel:
    """State-indexed float tables built once from the exact model."""

    def __init__(self, model: AffineModel):
        validate_model(model)
        self.model = model
        space = model.space
        channels = model.kernel.channels
        self.points = np.array(space.points, dtype=np.int64).reshape(len(space), model.dimension)
        self.jumps = np.array([c.jump for c in channels], dtype=np.int64).reshape(len(channels), model.dimension)
        self.rates = np.zeros((len(space), len(channels)))
        self.next_index = np.full((len(space), len(channels)), -1, dtype=np.int64)
        for i, x in enumerate(space):
            for c_idx, c in enumerate(channels):
                rate = c.intensity(x)
                if rate > 0:
                    self.rates[i, c_idx] = float(rate)
                    self.next_index[i, c_idx] = space.index(tuple(a + b for a, b in zip(x, c.jump)))
        self.cumulative = np.cumsum(self.rates, axis=1)
        self.total = self.rates.sum(axis=1)
        # last positive-rate channel per state, 0 for absorbing states
        positive = np.where(self.rates > 0, np.arange(len(channels)), -1)
        self.last_channel = np.maximum(positive.max(axis=1, initial=-1), 0)

    def index_of(self, x0: Sequence[int]) -> int:
        x0 = tuple(int(v) for v in x0)
        if x0 not in self.model.space:
            raise ParameterError(f"Initial state {x0} is not in E")
        return self.model.space.index(x0)

    def holding_times(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        total = self.total[states]
        with np.errstate(divide="ignore"):
            return np.where(total > 0, -np.log(u) / np.where(total > 0, total, 1.0), np.inf)

    def pick(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        """
        Channel index: number of cumulative rates <= U * Lambda(x), capped at
        the last positive-rate channel for when U * Lambda(x) rounds up to Lambda(x).
        """
        threshold = u * self.total[states]
        index = np.sum(self.cumulative[states] <= threshold[:, None], axis=1)
        return np.minimum(index, self.last_channel[states])


@dataclass(frozen=True)
class Trajectory:
    events: tuple[tuple[float, Point], ...]
    horizon: float

    def state_at(self, t: float) -> Point:
        if t < 0 or t > self.horizon:
            raise ParameterError(f"t={t} is outside [0, {self.horizon}]")
        state = self.events[0][1]
        for time, x in self.events:
            if time > t:
                break
            state = x
        return state

    @property
    def n_jumps(self) -> int:
        return len(self.events) - 1

    @cached_property
    def jumps(self) -> list[Point]:
        return [tuple(b - a for a, b in zip(x, y)) for (_, x), (_, y) in zip(self.events, self.events[1:])]

    def final_state(self) -> Point:
        return self.events[-1][1]

    def check(self, model: AffineModel) -> None:
        """Raise ParameterError unless every transition is a positive-rate channel jump inside E."""
        times = [t for t, _ in self.events]
        if times[0] != 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ParameterError("Event times are not strictly increasing from 0")
        for (_, x), u in zip(self.events, self.jumps):
            channel = model.kernel.channel_for(u)
            if channel is None or channel.intensity(x) <= 0:
                raise ParameterError(f"Transition {x} -> {u} is not a positive-rate jump")
        if any(x not in model.space for _, x in self.events):
            raise ParameterError("Trajectory leaves E")

    def to_rows(self) -> list[dict]:
        return [{"time": t, **{f"x{j + 1}": v for j, v in enumerate(x)}} for t, x in self.events]


def simulate_ssa(model: AffineModel, x0: Sequence[int], horizon: float, seed: int, stream: int = 0,
                 compiled: Optional[CompiledModel] = None) -> Trajectory:
    if horizon < 0:
        raise ParameterError(f"Horizon must be nonnegative, got {horizon}")
    compiled = compiled or CompiledModel(model)
    rng = CounterRNG(seed)
    key = rng.stream_keys(np.array([stream]))
    state = np.array([compiled.index_of(x0)])
    counter = 0

    def draw() -> np.ndarray:
        nonlocal counter
        u = rng.uniform(key, np.array([counter]))
        counter += 1
        return u

    events = [(0.0, tuple(int(v) for v in compiled.points[state[0]]))]
    next_time = compiled.holding_times(state, draw())
    while next_time[0] <= horizon:
        channel = compiled.pick(state, draw())
        state = compiled.next_index[state, channel]
        events.append((float(next_time[0]), tuple(int(v) for v in compiled.points[state[0]])))
        next_time = next_time + compiled.holding_times(state, draw())
    return Trajectory(tuple(events), float(horizon))


@time_it
def ensemble_states(model: AffineModel, x0: Sequence[int], times: Sequence[float], n_paths: int, seed: int,
                    first_path: int = 0, compiled: Optional[CompiledModel] = None) -> np.ndarray:
    """
    States of paths first_path .. first_path + n_paths - 1 at each of
    ``times`` (nondecreasing). Returns an int array of shape
    (len(times), n_paths, d).
    """
    if n_paths < 1:
        raise ParameterError(f"n_paths must be at least 1, got {n_paths}")
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ParameterError(f"Sample times must be nonnegative and nondecreasing, got {times}")
    compiled = compiled or CompiledModel(model)
    rng = CounterRNG(seed)
    keys = rng.stream_keys(np.arange(first_path, first_path + n_paths, dtype=np.uint64))
    state = np.full(n_paths, compiled.index_of(x0), dtype=np.int64)
    counters = np.zeros(n_paths, dtype=np.uint64)

    def draw(idx: np.ndarray) -> np.ndarray:
        u = rng.uniform(keys[idx], counters[idx])
        counters[idx] += np.uint64(1)
        return u

    everyone = np.arange(n_paths)
    next_time = compiled.holding_times(state, draw(everyone))
    out = np.empty((len(times), n_paths, model.dimension), dtype=np.int64)
    for i, t in enumerate(times):
        active = np.flatnonzero(next_time <= t)
        while active.size:
            channel = compiled.pick(state[active], draw(active))
            state[active] = compiled.next_index[state[active], channel]
            next_time[active] = next_time[active] + compiled.holding_times(state[active], draw(active))
            active = active[next_time[active] <= t]
        out[i] = compiled.points[state]
    logger.debug(f"Simulated {n_paths} paths to t={times[-1] if times else 0}")
    return out


def sample_at(model: AffineModel, x0: Sequence[int], t: float, n_paths: int, seed: int,
              first_path: int = 0) -> np.ndarray:
    """Endpoint samples X_t of ``n_paths`` independent paths, shape (n_paths, d)."""
    return ensemble_states(model, x0, [t], n_paths, seed, first_path)[0]


def state_counts(samples: np.ndarray) -> dict[Point, int]:
    """The multiset of sampled states as {state: count}."""
    states, counts = np.unique(np.asarray(samples), axis=0, return_counts=True)
    return {tuple(int(v) for v in s): int(c) for s, c in zip(states, counts)}
