"""
Riccati equations for the transform E_x[exp(<u, X_t>)] = Phi * prod_j Psi_j^{x_j}.

Writing lambda_u(x) = nu0(u) + sum_j x_j nu_j(u), matching the generator on
x -> Psi^x gives

    dPhi/dt   = Phi * sum_u nu0(u) (Psi^u - 1)
    dPsi_j/dt = sum_u nu_j(u) (Psi^{u + e_j} - Psi_j)

which are polynomial as long as every atom of nu0 lies in N^k and every
atom u of nu_j has u + e_j in N^k.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from affine_compact.core.models import AffineMap, AffineModel, Point
from affine_compact.core.pushforward import transform_model
from affine_compact.core.validation import validate_model
from affine_compact.counters.transform import build_transform
from affine_compact.errors import NonPolynomialSystem, NotCounterCoordinates, ParameterError, ToleranceNotMet
from affine_compact.transforms.polynomial import SparsePolynomial
from affine_compact.utilities.constants import ODE_METHOD, ODE_TOLERANCE
from affine_compact.utilities.formatting import complex_to_json
from affine_compact.utilities.linalg import fraction_to_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelDecomposition:
    """Signed atom weights nu0 and nu_1..nu_k of the affine intensities."""
    k: int
    nu0: dict[Point, Fraction]
    nuj: tuple[dict[Point, Fraction], ...]

    def intensity(self, u: Sequence[int], x: Sequence[int]) -> Fraction:
        u = tuple(u)
        return self.nu0.get(u, Fraction(0)) + sum((x[j] * self.nuj[j].get(u, Fraction(0)) for j in range(self.k)),
                                                  Fraction(0))

    def is_empty(self) -> bool:
        return not self.nu0 and not any(self.nuj)

    def to_dict(self) -> dict:
        def atoms(measure):
            return [{"jump": list(u), "weight": fraction_to_json(w)} for u, w in measure.items()]
        return {"k": self.k, "nu0": atoms(self.nu0), "nuj": [atoms(m) for m in self.nuj]}


def decompose_kernel(model: AffineModel, k: Optional[int] = None) -> KernelDecomposition:
    """Read nu0 and nu_j off the intensities of a pure-jump model whose states lie in N^d."""
    d = model.dimension
    if k is not None and k != d:
        raise NotCounterCoordinates(f"Pure-jump decomposition needs k = d = {d}, got k={k}", k=k)
    if model.drift is not None:
        raise NotCounterCoordinates("Model has a drift; the Riccati system covers pure-jump models only")
    outside = [x for x in model.space if any(v < 0 for v in x)]
    if outside:
        raise NotCounterCoordinates(f"States {outside[:3]} lie outside N^{d}", states=[list(x) for x in outside])

    nu0: dict[Point, Fraction] = {}
    nuj: list[dict[Point, Fraction]] = [{} for _ in range(d)]
    for channel in model.kernel.support_channels(model.space):
        lam = channel.intensity
        if lam.offset != 0:
            nu0[channel.jump] = lam.offset
        for j, coef in enumerate(lam.linear):
            if coef != 0:
                nuj[j][channel.jump] = coef
    return KernelDecomposition(d, nu0, tuple(nuj))


@dataclass(frozen=True)
class RiccatiSystem:
    k: int
    phi_rhs: SparsePolynomial
    psi_rhs: tuple[SparsePolynomial, ...]

    def rhs(self, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate (phi_rhs, psi_rhs) at a batch of Psi values of shape (m, k)."""
        phi_rate = self.phi_rhs.evaluate_batch(psi)
        if not self.k:
            return phi_rate, np.zeros((psi.shape[0], 0), dtype=np.complex128)
        return phi_rate, np.stack([p.evaluate_batch(psi) for p in self.psi_rhs], axis=1)

    def to_dict(self) -> dict:
        return {"k": self.k, "phi_rhs": str(self.phi_rhs), "psi_rhs": [str(p) for p in self.psi_rhs]}


def _power(u: Sequence[int]) -> SparsePolynomial:
    return SparsePolynomial.monomial(tuple(u))


def build_riccati(decomp: KernelDecomposition) -> RiccatiSystem:
    k = decomp.k
    one = SparsePolynomial.constant(k, 1)
    phi_rhs = SparsePolynomial.zero(k)
    for u, weight in decomp.nu0.items():
        if any(v < 0 for v in u):
            raise NonPolynomialSystem(f"Jump {u} carries constant intensity {weight} but leaves N^{k}", jump=list(u))
        phi_rhs = phi_rhs + (_power(u) - one) * weight

    psi_rhs = []
    for j, measure in enumerate(decomp.nuj):
        psi_j = SparsePolynomial.variable(k, j)
        rhs = SparsePolynomial.zero(k)
        for u, weight in measure.items():
            shifted = tuple(v + int(i == j) for i, v in enumerate(u))
            if any(v < 0 for v in shifted):
                raise NonPolynomialSystem(
                    f"Jump {u} has intensity coefficient {weight} on x{j + 1} but {u} + e{j + 1} leaves N^{k}",
                    jump=list(u), coordinate=j + 1,
                )
            rhs = rhs + (_power(shifted) - psi_j) * weight
        psi_rhs.append(rhs)
    return RiccatiSystem(k, phi_rhs, tuple(psi_rhs))


@dataclass(frozen=True)
class TransformValue:
    phi: complex
    psi: tuple[complex, ...]

    def at(self, x: Sequence[int]) -> complex:
        """Phi * prod_j Psi_j^{x_j}, with 0**0 = 1."""
        value = complex(self.phi)
        for p, e in zip(self.psi, x):
            value *= complex(p) ** int(e) if int(e) else 1
        return value

    def to_dict(self) -> dict:
        return {"phi": complex_to_json(self.phi), "psi": [complex_to_json(p) for p in self.psi]}


def initial_value(u: Sequence[complex]) -> TransformValue:
    return TransformValue(1 + 0j, tuple(complex(np.exp(complex(v))) for v in u))


def _integrate(system: RiccatiSystem, us: np.ndarray, times: Sequence[float], tol: float) -> np.ndarray:
    """Integrate all rows of ``us`` jointly; returns shape (len(times), m, k + 1)."""
    m, k = us.shape
    y0 = np.concatenate([np.ones((m, 1), dtype=np.complex128), np.exp(us)], axis=1).ravel()
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ParameterError(f"Transform times must be nonnegative, got {times}")
    horizon = max(times, default=0.0)
    if horizon == 0.0:
        return np.broadcast_to(y0.reshape(m, k + 1), (len(times), m, k + 1)).copy()

    def f(_t, y):
        state = y.reshape(m, k + 1)
        phi_rate, dpsi = system.rhs(state[:, 1:])
        return np.concatenate([(state[:, 0] * phi_rate)[:, None], dpsi], axis=1).ravel()

    sol = solve_ivp(f, (0.0, horizon), y0, method=ODE_METHOD, t_eval=sorted(set(times)), rtol=tol, atol=tol)
    if sol.status != 0:
        raise ToleranceNotMet(f"Riccati integration failed: {sol.message}", tolerance=tol, horizon=horizon)
    if not np.all(np.isfinite(sol.y)):
        raise ToleranceNotMet("Riccati solution left the finite range", tolerance=tol, horizon=horizon)
    by_time = {t: sol.y[:, i].reshape(m, k + 1) for i, t in enumerate(sol.t)}
    return np.stack([by_time[t] for t in times])


def solve_riccati(system: RiccatiSystem, u: Sequence[complex], t: float, tol: float = ODE_TOLERANCE) -> TransformValue:
    if len(u) != system.k:
        raise ParameterError(f"Expected u of length {system.k}, got {len(u)}")
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    if t == 0:
        return initial_value(u)
    return solve_riccati_batch(system, [u], t, tol)[0]


def solve_riccati_batch(system: RiccatiSystem, us: Sequence[Sequence[complex]], t: float,
                        tol: float = ODE_TOLERANCE) -> list[TransformValue]:
    """Solve for many u at once in a single stacked integration."""
    us = np.asarray(us, dtype=np.complex128).reshape(-1, system.k)
    state = _integrate(system, us, [t], tol)[0]
    return [TransformValue(complex(row[0]), tuple(complex(v) for v in row[1:])) for row in state]


def solve_riccati_grid(system: RiccatiSystem, u: Sequence[complex], times: Sequence[float],
                       tol: float = ODE_TOLERANCE) -> list[TransformValue]:
    """(Phi, Psi)(u, t) at each of ``times`` from a single integration."""
    us = np.asarray([u], dtype=np.complex128).reshape(1, system.k)
    states = _integrate(system, us, times, tol)
    return [TransformValue(complex(s[0, 0]), tuple(complex(v) for v in s[0, 1:])) for s in states]


class RiccatiTransform:
    """
    Transform of an arbitrary valid pure-jump model through its Riccati system.

    Models in N^d whose system is already polynomial are used as they are;
    otherwise build_transform supplies y = T(x) = A x + a with k = d and
    exp(<u, x>) = exp(<A^{-T} u, y> - <A^{-T} u, a>).
    """

    def __init__(self, model: AffineModel):
        validate_model(model)
        self.model = model
        d = model.dimension
        try:
            self.decomposition = decompose_kernel(model)
            self.system = build_riccati(self.decomposition)
            self.map = AffineMap.identity(d)
        except (NotCounterCoordinates, NonPolynomialSystem) as e:
            logger.debug(f"Falling back to counter coordinates: {e.message}")
            result = build_transform(model)
            if result.k != d:
                raise NotCounterCoordinates(f"Only {result.k} of {d} coordinates are jump counters", k=result.k)
            self.map = result.map
            self.decomposition = decompose_kernel(transform_model(model, result.map))
            self.system = build_riccati(self.decomposition)
        A = np.array([[float(v) for v in row] for row in self.map.matrix])
        self._dual = np.linalg.inv(A).T
        self._offset = np.array([float(v) for v in self.map.offset])
        logger.debug(f"Riccati system for {model.name or 'model'}: {self.system.to_dict()}")

    def dual(self, u: Sequence[complex]) -> tuple[np.ndarray, complex]:
        """Map u to counter coordinates; returns (u_y, multiplicative shift)."""
        u_y = self._dual @ np.asarray(u, dtype=np.complex128)
        return u_y, complex(np.exp(-u_y @ self._offset))

    def solve(self, u: Sequence[complex], t: float, tol: float = ODE_TOLERANCE) -> TransformValue:
        """(Phi, Psi) in counter coordinates for the original argument u."""
        u_y, _ = self.dual(u)
        return solve_riccati(self.system, list(u_y), t, tol)

    def values(self, u: Sequence[complex], t: float, tol: float = ODE_TOLERANCE) -> dict[Point, complex]:
        if len(u) != self.model.dimension:
            raise ParameterError(f"Expected u of length {self.model.dimension}, got {len(u)}")
        u_y, shift = self.dual(u)
        value = solve_riccati(self.system, list(u_y), t, tol)
        return {x: shift * value.at(self.map(x)) for x in self.model.space}


def riccati_system_for(model: AffineModel) -> RiccatiSystem:
    return RiccatiTransform(model).system
