"""
Exact-arithmetic value types: affine functionals and maps, lattice state
spaces, jump channels and kernels, and the model that bundles them.

All types are frozen after construction. There is deliberately no diffusion
field anywhere: on a compact state space an affine process has c = 0.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from affine_compact.errors import ParameterError
from affine_compact.utilities import linalg
from affine_compact.utilities.linalg import to_fraction, fraction_to_json

Point = tuple[int, ...]


def _as_point(x: Iterable) -> Point:
    out = []
    for v in x:
        f = to_fraction(v)
        if f.denominator != 1:
            raise ParameterError(f"Lattice point has a non-integer coordinate: {list(x)}")
        out.append(int(f))
    return tuple(out)


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class AffineFunctional:
    """psi(x) = <linear, x> + offset, evaluated exactly."""
    linear: tuple[Fraction, ...]
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "linear", tuple(to_fraction(v) for v in self.linear))
        object.__setattr__(self, "offset", to_fraction(self.offset))

    @classmethod
    def constant(cls, dimension: int, value=0) -> "AffineFunctional":
        return cls((0,) * dimension, value)

    @classmethod
    def coordinate(cls, dimension: int, j: int, scale=1, offset=0) -> "AffineFunctional":
        return cls(tuple(scale if i == j else 0 for i in range(dimension)), offset)

    @property
    def dimension(self) -> int:
        return len(self.linear)

    def __call__(self, x: Sequence) -> Fraction:
        if len(x) != self.dimension:
            raise ParameterError(f"Expected a point of dimension {self.dimension}, got {tuple(x)}")
        return sum((a * b for a, b in zip(self.linear, x)), Fraction(0)) + self.offset

    def increment(self, u: Sequence) -> Fraction:
        """psi(u) - psi(0): the change of psi along a jump u."""
        return sum((a * b for a, b in zip(self.linear, u)), Fraction(0))

    def __add__(self, other: "AffineFunctional") -> "AffineFunctional":
        return AffineFunctional(tuple(a + b for a, b in zip(self.linear, other.linear)), self.offset + other.offset)

    def __neg__(self) -> "AffineFunctional":
        return self.scaled(-1)

    def __sub__(self, other: "AffineFunctional") -> "AffineFunctional":
        return self + (-other)

    def scaled(self, c) -> "AffineFunctional":
        c = to_fraction(c)
        return AffineFunctional(tuple(c * a for a in self.linear), c * self.offset)

    def is_zero(self) -> bool:
        return self.offset == 0 and not any(self.linear)

    def is_constant(self) -> bool:
        return not any(self.linear)

    def compose(self, amap: "AffineMap") -> "AffineFunctional":
        """The functional x -> psi(amap(x))."""
        cols = list(zip(*amap.matrix))
        linear = tuple(sum((a * b for a, b in zip(self.linear, col)), Fraction(0)) for col in cols)
        return AffineFunctional(linear, self(amap.offset))

    def to_dict(self) -> dict:
        return {"linear": [fraction_to_json(v) for v in self.linear], "offset": fraction_to_json(self.offset)}

    def __str__(self) -> str:
        parts = []
        if self.offset != 0 or not any(self.linear):
            parts.append(_fmt(self.offset))
        for j, a in enumerate(self.linear, start=1):
            if a == 0:
                continue
            mag = abs(a)
            term = f"x{j}" if mag == 1 else f"{_fmt(mag)}*x{j}"
            if parts:
                parts.append(("- " if a < 0 else "+ ") + term)
            else:
                parts.append(("-" if a < 0 else "") + term)
        return " ".join(parts)


@dataclass(frozen=True)
class AffineMap:
    """T(x) = matrix · x + offset."""
    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]
    declared_invertible: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(to_fraction(v) for v in row) for row in self.matrix))
        object.__setattr__(self, "offset", tuple(to_fraction(v) for v in self.offset))
        d = len(self.offset)
        if len(self.matrix) != d or any(len(row) != d for row in self.matrix):
            raise ParameterError(f"AffineMap needs a {d}x{d} matrix")
        if self.declared_invertible and not self.is_invertible:
            raise ParameterError("AffineMap declared invertible but its determinant is zero")

    @classmethod
    def identity(cls, dimension: int) -> "AffineMap":
        return cls(tuple(tuple(int(i == j) for j in range(dimension)) for i in range(dimension)),
                   (0,) * dimension, declared_invertible=True)

    @classmethod
    def from_components(cls, components: Sequence[AffineFunctional], declared_invertible: bool = True) -> "AffineMap":
        return cls(tuple(c.linear for c in components), tuple(c.offset for c in components), declared_invertible)

    @property
    def dimension(self) -> int:
        return len(self.offset)

    @cached_property
    def determinant(self) -> Fraction:
        return linalg.determinant(self.matrix)

    @property
    def is_invertible(self) -> bool:
        return self.determinant != 0

    @property
    def is_identity(self) -> bool:
        return self.matrix == AffineMap.identity(self.dimension).matrix and not any(self.offset)

    def components(self) -> list[AffineFunctional]:
        return [AffineFunctional(row, off) for row, off in zip(self.matrix, self.offset)]

    def __call__(self, x: Sequence) -> tuple[Fraction, ...]:
        return tuple(a + b for a, b in zip(linalg.mat_vec(self.matrix, x), self.offset))

    def apply_linear(self, u: Sequence) -> tuple[Fraction, ...]:
        """Image of a jump vector: jumps transform with the linear part only."""
        return tuple(linalg.mat_vec(self.matrix, u))

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """self ∘ inner."""
        matrix = linalg.mat_mul(self.matrix, inner.matrix)
        return AffineMap(tuple(tuple(r) for r in matrix), self(inner.offset),
                         declared_invertible=self.is_invertible and inner.is_invertible)

    def inverse(self) -> "AffineMap":
        if not self.is_invertible:
            raise ParameterError("Cannot invert a singular affine map")
        inv = linalg.inverse(self.matrix)
        offset = tuple(-v for v in linalg.mat_vec(inv, self.offset))
        return AffineMap(tuple(tuple(r) for r in inv), offset, declared_invertible=True)

    def to_dict(self) -> dict:
        return {
            "matrix": [[fraction_to_json(v) for v in row] for row in self.matrix],
            "offset": [fraction_to_json(v) for v in self.offset],
        }


@dataclass(frozen=True)
class StateSpace:
    """Finite set of integer lattice points in Z^d, kept in sorted order."""
    dimension: int
    points: tuple[Point, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise ParameterError(f"State space dimension must be positive, got {self.dimension}")
        pts = [_as_point(p) for p in self.points]
        if not pts:
            raise ParameterError("State space must be nonempty")
        if any(len(p) != self.dimension for p in pts):
            raise ParameterError(f"Every state must have dimension {self.dimension}")
        if len(set(pts)) != len(pts):
            raise ParameterError("State space contains duplicate points")
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @classmethod
    def interval(cls, N: int) -> "StateSpace":
        if N < 0:
            raise ParameterError(f"Interval generator needs N >= 0, got {N}")
        return cls(1, tuple((x,) for x in range(N + 1)))

    @classmethod
    def simplex(cls, d: int, N: int) -> "StateSpace":
        if d < 1 or N < 0:
            raise ParameterError(f"Simplex generator needs d >= 1 and N >= 0, got d={d}, N={N}")
        pts = [p for p in product(range(N + 1), repeat=d) if sum(p) <= N]
        return cls(d, tuple(pts))

    @classmethod
    def box(cls, bounds: Sequence[int]) -> "StateSpace":
        if not bounds or any(b < 0 for b in bounds):
            raise ParameterError(f"Box generator needs nonnegative bounds, got {list(bounds)}")
        return cls(len(bounds), tuple(product(*(range(b + 1) for b in bounds))))

    @cached_property
    def span_dim(self) -> int:
        return linalg.affine_rank(self.points)

    @cached_property
    def _index(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    def index(self, x: Sequence) -> int:
        return self._index[tuple(x)]

    def __contains__(self, x) -> bool:
        try:
            return tuple(int(v) for v in x) in self._index and all(to_fraction(v).denominator == 1 for v in x)
        except (TypeError, ValueError):
            return False

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class JumpChannel:
    """One atom of the jump kernel: jump u fired with intensity lambda_u(x)."""
    jump: Point
    intensity: AffineFunctional

    def __post_init__(self):
        object.__setattr__(self, "jump", _as_point(self.jump))
        if not any(self.jump):
            raise ParameterError("Jump vector must be nonzero")
        if len(self.jump) != self.intensity.dimension:
            raise ParameterError(f"Jump {self.jump} and its intensity have different dimensions")


@dataclass(frozen=True)
class JumpKernel:
    """F(x, .) = sum over channels of lambda_u(x) delta_u; jump vectors pairwise distinct."""
    channels: tuple[JumpChannel, ...] = ()

    def __post_init__(self):
        jumps = [c.jump for c in self.channels]
        if len(set(jumps)) != len(jumps):
            raise ParameterError("Jump kernel has repeated jump vectors; build it with JumpKernel.from_channels")
        object.__setattr__(self, "channels", tuple(self.channels))

    @classmethod
    def from_channels(cls, channels: Iterable[JumpChannel]) -> "JumpKernel":
        """Duplicate jumps are merged by summing intensities, keeping first-seen order."""
        merged: dict[Point, AffineFunctional] = {}
        for c in channels:
            merged[c.jump] = merged[c.jump] + c.intensity if c.jump in merged else c.intensity
        return cls(tuple(JumpChannel(u, lam) for u, lam in merged.items()))

    @property
    def jumps(self) -> list[Point]:
        return [c.jump for c in self.channels]

    def intensities(self, x: Sequence) -> list[Fraction]:
        return [c.intensity(x) for c in self.channels]

    def total_intensity(self, x: Sequence) -> Fraction:
        return sum(self.intensities(x), Fraction(0))

    def channel_for(self, jump: Sequence) -> Optional[JumpChannel]:
        jump = tuple(jump)
        return next((c for c in self.channels if c.jump == jump), None)

    def support_channels(self, space: StateSpace) -> list[JumpChannel]:
        return [c for c in self.channels if any(c.intensity(x) > 0 for x in space)]

    def support_jumps(self, space: StateSpace) -> list[Point]:
        """The set S of jump sizes that can actually occur from some state."""
        return [c.jump for c in self.support_channels(space)]

    def __len__(self) -> int:
        return len(self.channels)


@dataclass(frozen=True)
class AffineModel:
    """The triplet (b, 0, F) on a lattice state space."""
    space: StateSpace
    kernel: JumpKernel = field(default_factory=JumpKernel)
    drift: Optional[AffineMap] = None
    full_span: bool = True
    name: Optional[str] = None

    def __post_init__(self):
        d = self.space.dimension
        for c in self.kernel.channels:
            if len(c.jump) != d:
                raise ParameterError(f"Channel {c.jump} does not match model dimension {d}")
        if self.drift is not None and self.drift.dimension != d:
            raise ParameterError(f"Drift dimension {self.drift.dimension} does not match model dimension {d}")

    @property
    def dimension(self) -> int:
        return self.space.dimension
