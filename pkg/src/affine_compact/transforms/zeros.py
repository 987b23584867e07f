import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import newton

from affine_compact.errors import ParameterError
from affine_compact.transforms.riccati import RiccatiSystem, solve_riccati, solve_riccati_batch
from affine_compact.utilities.constants import PSI_GRID_POINTS, PSI_GRID_THRESHOLD, PSI_ZERO_THRESHOLD

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchRectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ParameterError(f"Empty search rectangle {self}")

    @classmethod
    def around(cls, center: complex, radius: float) -> "SearchRectangle":
        return cls(center.real - radius, center.real + radius, center.imag - radius, center.imag + radius)

    def __contains__(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max

    def grid(self, n: int) -> np.ndarray:
        re, im = np.meshgrid(np.linspace(self.re_min, self.re_max, n), np.linspace(self.im_min, self.im_max, n))
        return (re + 1j * im).ravel()


def find_psi_zero(system: RiccatiSystem, t: float, rectangle: SearchRectangle,
                  grid_points: int = PSI_GRID_POINTS, threshold: float = PSI_ZERO_THRESHOLD) -> Optional[complex]:
    """
    Locate u in ``rectangle`` with |Psi(u, t)| < threshold for a system with
    k = 1. The grid is scanned in one batched solve, then the best cell is
    refined with a secant iteration on Psi itself. Returns None if nothing
    is found.
    """
    if system.k != 1:
        raise ParameterError(f"find_psi_zero needs a one-dimensional system, got k={system.k}")
    if t <= 0:
        raise ParameterError(f"find_psi_zero needs t > 0, got {t}")

    grid = rectangle.grid(grid_points)
    values = solve_riccati_batch(system, grid[:, None], t)
    magnitudes = np.array([abs(v.psi[0]) for v in values])
    best = int(np.argmin(magnitudes))
    logger.debug(f"Grid minimum |Psi| = {magnitudes[best]:.3g} at u = {grid[best]}")
    if magnitudes[best] > PSI_GRID_THRESHOLD:
        return None

    def psi(u):
        return solve_riccati(system, [complex(u)], t).psi[0]

    start = complex(grid[best])
    try:
        root = complex(newton(psi, start, x1=start + 1e-3 * (1 + 1j), tol=1e-12, maxiter=100))
    except (RuntimeError, OverflowError, ZeroDivisionError) as e:
        logger.debug(f"Secant refinement failed from {start}: {e}")
        root = start
    if root in rectangle and abs(psi(root)) < threshold:
        return root
    return None
