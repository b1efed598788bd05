"""Closed-form algebra linking the class prior to the triplet mixtures.

A random triplet is kept with probability ``pi_T = 1 - pi_plus * pi_minus``.
The three pointwise bags are mixtures of the class-conditional densities
with weight matrix ``T = [[pi+, pi-], [A, B], [pi-, pi+]]``; its
pseudo-inverse, scaled by the test prior, gives the six signed weights of
the unbiased risk estimator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError, EstimationError, SingularPriorError

#: half-width of the rejected band around pi_plus = 0.5
DEFAULT_GUARD = 0.005
#: how far below 0.75 an estimated pi_T may fall before it is an error
PI_T_CLAMP_TOL = 0.05


@dataclass(frozen=True)
class ClassPrior:
    pi_plus: float
    pi_test: float | None = None

    def __post_init__(self):
        if not 0.0 < self.pi_plus <= 1.0:
            raise DomainError(f"pi_plus must lie in (0, 1], got {self.pi_plus}")
        if self.pi_test is None:
            object.__setattr__(self, "pi_test", self.pi_plus)
        if not 0.0 <= self.pi_test <= 1.0:
            raise DomainError(f"pi_test must lie in [0, 1], got {self.pi_test}")

    @property
    def pi_minus(self) -> float:
        return 1.0 - self.pi_plus


@dataclass(frozen=True)
class MixingCoefficients:
    A: float
    B: float
    a: float
    b: float
    c: float
    det: float
    pi_T: float

    def mixing_matrix(self, pi_plus: float) -> np.ndarray:
        """The 3x2 matrix mapping (p+, p-) to the three bag densities."""
        q = 1.0 - pi_plus
        return np.array([[pi_plus, q], [self.A, self.B], [q, pi_plus]])

    def reconstruction_matrix(self, pi_plus: float) -> np.ndarray:
        """Moore-Penrose inverse of :meth:`mixing_matrix`, in closed form.

        Row 0 recovers p+, row 1 recovers p-.
        """
        p, q = pi_plus, 1.0 - pi_plus
        a, b, c, A, B = self.a, self.b, self.c, self.A, self.B
        return np.array([
            [c * p - b * q, c * A - b * B, c * q - b * p],
            [a * q - b * p, a * B - b * A, a * p - b * q],
        ]) / self.det


@dataclass(frozen=True)
class RiskWeights:
    """Per-bag coefficients of l(f(x), +1) and l(f(x), -1)."""

    w1_pos: float
    w1_neg: float
    w2_pos: float
    w2_neg: float
    w3_pos: float
    w3_neg: float

    @classmethod
    def zeros(cls) -> "RiskWeights":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        """Shape ``(3, 2)``: one row per bag, columns (positive, negative)."""
        return np.array([
            [self.w1_pos, self.w1_neg],
            [self.w2_pos, self.w2_neg],
            [self.w3_pos, self.w3_neg],
        ])


@dataclass(frozen=True)
class BoundParams:
    n: int
    delta: float = 0.05
    rho: float = 1.0
    c_f: float = 1.0
    c_ell: float = 1.0

    def __post_init__(self):
        if self.n <= 0:
            raise DomainError(f"n must be positive, got {self.n}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        for name in ("rho", "c_f", "c_ell"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")


def _check_probability(name, value):
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def pi_T_from_prior(pi_plus: float) -> float:
    """Probability that a random triplet is kept: ``1 - pi+ (1 - pi+)``."""
    _check_probability("pi_plus", pi_plus)
    return 1.0 - pi_plus * (1.0 - pi_plus)


def prior_from_pi_T(pi_T: float, clamp_tol: float = PI_T_CLAMP_TOL) -> float:
    """Larger root of ``p**2 - p + (1 - pi_T) = 0``.

    Values of ``pi_T`` slightly below 0.75 (sampling noise) are clamped to a
    zero discriminant and return 0.5; values more than ``clamp_tol`` below
    raise :class:`EstimationError`.
    """
    _check_probability("pi_T", pi_T)
    disc = 1.0 - 4.0 * (1.0 - pi_T)
    if disc < 0.0:
        if pi_T < 0.75 - clamp_tol:
            raise EstimationError(
                f"pi_T={pi_T:.6g} is below 0.75; keep/flip counts are inconsistent with any class prior")
        disc = 0.0
    return (1.0 + math.sqrt(disc)) / 2.0


def estimate_pi_T(n1: int, n2: int) -> float:
    if n1 < 0 or n2 < 0:
        raise DomainError("counts must be non-negative")
    if n1 + n2 == 0:
        raise DataError("cannot estimate pi_T from an empty triplet set")
    return n1 / (n1 + n2)


def estimate_prior(n1: int, n2: int) -> float:
    """Class prior estimated from keep/flip counts."""
    return prior_from_pi_T(estimate_pi_T(n1, n2))


def mixing_coefficients(pi_plus: float) -> MixingCoefficients:
    if not 0.0 < pi_plus <= 1.0:
        raise DomainError(f"pi_plus must lie in (0, 1], got {pi_plus}")
    p, q = pi_plus, 1.0 - pi_plus
    pi_T = 1.0 - p * q
    A = (p ** 3 + 2.0 * p * p * q) / pi_T
    B = (2.0 * p * q * q + q ** 3) / pi_T
    a = p * p + A * A + q * q
    b = 2.0 * p * q + A * B
    c = q * q + B * B + p * p
    return MixingCoefficients(A=A, B=B, a=a, b=b, c=c, det=a * c - b * b, pi_T=pi_T)


def check_nonsingular(pi_plus: float, guard: float = DEFAULT_GUARD) -> None:
    if abs(pi_plus - 0.5) < guard:
        raise SingularPriorError(
            f"pi_plus={pi_plus:.6g} lies within {guard} of 0.5; the risk estimator is undefined there")


def _numerators(pi_plus, pi_test, guard):
    check_nonsingular(pi_plus, guard)
    if not 0.0 <= pi_test <= 1.0:
        raise DomainError(f"pi_test must lie in [0, 1], got {pi_test}")
    m = mixing_coefficients(pi_plus)
    recon = m.reconstruction_matrix(pi_plus) * m.det
    # rows: bags 1..3; columns: positive, negative
    nums = np.column_stack([pi_test * recon[0], (1.0 - pi_test) * recon[1]])
    return nums, m.det


def risk_weights(pi_plus: float, pi_test: float | None = None,
                 guard: float = DEFAULT_GUARD) -> RiskWeights:
    if pi_test is None:
        pi_test = pi_plus
    nums, det = _numerators(pi_plus, pi_test, guard)
    w = nums / det
    return RiskWeights(w[0, 0], w[0, 1], w[1, 0], w[1, 1], w[2, 0], w[2, 1])


def bound_coefficient(pi_plus: float, pi_test: float | None = None,
                      guard: float = DEFAULT_GUARD) -> float:
    """``C_R / |ac - b^2|``: how strongly the prior inflates the error bound."""
    if pi_test is None:
        pi_test = pi_plus
    nums, det = _numerators(pi_plus, pi_test, guard)
    return float(np.abs(nums).sum() / abs(det))


def estimation_error_bound(params: BoundParams, pi_plus: float, pi_test: float | None = None,
                           guard: float = DEFAULT_GUARD) -> float:
    """High-probability bound on ``R(f_hat) - R(f_star)``.

    ``(2 rho C_F / sqrt(n) + sqrt(C_ell^2 log(2/delta) / (2n))) * C_R / |det|``
    """
    n = params.n
    rate = (2.0 * params.rho * params.c_f / math.sqrt(n)
            + math.sqrt(params.c_ell ** 2 * math.log(2.0 / params.delta) / (2.0 * n)))
    return rate * bound_coefficient(pi_plus, pi_test, guard)
