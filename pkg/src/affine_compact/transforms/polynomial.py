from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Number, Rational
from typing import Mapping, Sequence

import numpy as np

from affine_compact.errors import ParameterError

Exponent = tuple[int, ...]


def _coefficient(value: Number):
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, complex) and value.imag == 0 and float(value.real).is_integer():
        return Fraction(int(value.real))
    return complex(value)


@dataclass(frozen=True)
class SparsePolynomial:
    """
    Polynomial in ``nvars`` variables stored as {exponent: coefficient}.
    Rational coefficients stay exact so systems built from rational rates
    can be compared term by term; zero terms are never stored.
    """
    nvars: int
    terms: Mapping[Exponent, Number] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[Exponent, Number] = {}
        for exps, coef in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or any(e < 0 for e in exps):
                raise ParameterError(f"Exponent {exps} is not a multi-index in N^{self.nvars}")
            coef = _coefficient(coef)
            if coef != 0:
                clean[exps] = clean.get(exps, 0) + coef
        object.__setattr__(self, "terms", {e: c for e, c in sorted(clean.items()) if c != 0})

    @classmethod
    def zero(cls, nvars: int) -> "SparsePolynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> "SparsePolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def monomial(cls, exps: Sequence[int], coef=1) -> "SparsePolynomial":
        return cls(len(exps), {tuple(exps): coef})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "SparsePolynomial":
        return cls.monomial(tuple(int(i == j) for i in range(nvars)))

    def __hash__(self):
        return hash((self.nvars, tuple(self.terms.items())))

    def _check(self, other: "SparsePolynomial"):
        if other.nvars != self.nvars:
            raise ParameterError(f"Cannot combine polynomials in {self.nvars} and {other.nvars} variables")

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePolynomial(self.nvars, out)

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other) -> "SparsePolynomial":
        if not isinstance(other, SparsePolynomial):
            return SparsePolynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Number] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return SparsePolynomial(self.nvars, out)

    __rmul__ = __mul__

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), Fraction(0))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def compiled(self) -> tuple[np.ndarray, np.ndarray]:
        exps = np.zeros((len(self.terms), self.nvars), dtype=np.int64)
        for i, e in enumerate(self.terms):
            exps[i] = e
        coefs = np.array([complex(c) for c in self.terms.values()], dtype=np.complex128)
        return exps, coefs

    def evaluate(self, values: Sequence[complex]) -> complex:
        values = np.asarray(values, dtype=np.complex128)
        return complex(self.evaluate_batch(values[None, :])[0])

    def evaluate_batch(self, values: np.ndarray) -> np.ndarray:
        """``values`` has shape (m, nvars); returns shape (m,). 0**0 evaluates to 1."""
        exps, coefs = self.compiled
        values = np.asarray(values, dtype=np.complex128)
        if not len(coefs):
            return np.zeros(values.shape[0], dtype=np.complex128)
        raised = np.where(exps[None, :, :] == 0, 1, values[:, None, :] ** exps[None, :, :])
        powers = np.prod(raised, axis=2)
        return powers @ coefs

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, coef in self.terms.items():
            factors = [f"P{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(exps) if e]
            parts.append("*".join([f"({coef})"] + factors) if factors else f"({coef})")
        return " + ".join(parts)
