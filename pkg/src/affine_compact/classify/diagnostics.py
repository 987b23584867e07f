"""
Best-effort checks for irreducibility and autonomous one-dimensional directions.
Neither check changes a classification verdict.
"""
from collections import deque
from fractions import Fraction

from affine_compact.core.models import AffineFunctional, AffineModel
from affine_compact.counters.jump_counters import compute_jump_counter
from affine_compact.errors import NoCounter
from affine_compact.utilities import linalg


def _edges(model: AffineModel) -> dict:
    out = {x: [] for x in model.space}
    for x in model.space:
        for c in model.kernel.channels:
            if c.intensity(x) > 0:
                y = tuple(a + b for a, b in zip(x, c.jump))
                if y in model.space:
                    out[x].append(y)
    return out


def _reaches_all(start, edges: dict) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        for y in edges[queue.popleft()]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(edges)


def is_irreducible(model: AffineModel) -> bool:
    """True when every state can reach every other state through positive-rate jumps."""
    forward = _edges(model)
    reverse = {x: [] for x in forward}
    for x, targets in forward.items():
        for y in targets:
            reverse[y].append(x)
    start = model.space.points[0]
    return _reaches_all(start, forward) and _reaches_all(start, reverse)


def _candidate_directions(model: AffineModel) -> list[tuple[Fraction, ...]]:
    d = model.dimension
    candidates = [AffineFunctional.coordinate(d, j).linear for j in range(d)]
    for u in model.kernel.support_jumps(model.space):
        try:
            candidates.append(compute_jump_counter(model.space, u).functional.linear)
        except NoCounter:
            continue
    unique: list[tuple[Fraction, ...]] = []
    for a in candidates:
        if not any(linalg.rank([list(a), list(b)]) == 1 for b in unique):
            unique.append(a)
    return unique


def autonomous_directions(model: AffineModel) -> list[AffineFunctional]:
    """
    Directions a (coordinate projections and counter directions) for which
    <a, X> is a one-dimensional affine process on its own: for every
    increment value of <a, u>, the summed intensity of the jumps producing
    it has a linear part proportional to a. Directions along which no jump
    moves are not reported.
    """
    result = []
    channels = model.kernel.support_channels(model.space)
    for a in _candidate_directions(model):
        direction = AffineFunctional(a, 0)
        groups: dict[Fraction, AffineFunctional] = {}
        for c in channels:
            step = direction.increment(c.jump)
            if step == 0:
                continue
            groups[step] = groups[step] + c.intensity if step in groups else c.intensity
        if not groups:
            continue
        if all(linalg.rank([list(a), list(lam.linear)]) <= 1 for lam in groups.values()):
            result.append(direction)
    return result
