"""
Counter-based uniforms: the draw for (seed, stream, counter) is a pure
function of the three integers, so every path can be replayed on its own
and ensembles can be split across workers without changing a single bit.

The hash is the SplitMix64 finalizer applied three times:
    key    = mix(seed)
    skey   = mix(key + stream)
    draw   = mix(skey + counter)
and the top 53 bits become ((z >> 11) + 0.5) / 2^53, which lies strictly
inside (0, 1).
"""
import numpy as np

from affine_compact.errors import ParameterError

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)
MASK_64 = (1 << 64) - 1


def splitmix64(x: np.ndarray) -> np.ndarray:
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * MIX_1
        z = (z ^ (z >> np.uint64(27))) * MIX_2
    return z ^ (z >> np.uint64(31))


def to_unit_interval(z: np.ndarray) -> np.ndarray:
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) / 9007199254740992.0


class CounterRNG:
    """Uniform draws addressed by (stream, counter) under a fixed seed."""

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
            raise ParameterError(f"Seed must be a nonnegative integer, got {seed!r}")
        self.seed = int(seed) & MASK_64
        self._key = splitmix64(np.array([self.seed], dtype=np.uint64))[0]

    def stream_keys(self, streams: np.ndarray) -> np.ndarray:
        streams = np.asarray(streams, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return splitmix64(self._key + streams)

    def uniform(self, stream_keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
        counters = np.asarray(counters, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return to_unit_interval(splitmix64(stream_keys + counters))
