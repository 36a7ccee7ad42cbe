"""Stationary covariance kernels K(tau) on tau >= 0.

Each family stores its second derivative at the origin in closed form; the
zero-count formulas need it exactly rather than via finite differences.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import as_float_array, check_positive, scalar_or_array
from .exceptions import DomainError, NotTwiceDifferentiable

_SQRT3 = np.sqrt(3.0)
_SQRT5 = np.sqrt(5.0)


class KernelFamily(str, Enum):
    SQUARED_EXPONENTIAL = "SquaredExponential"
    MATERN12 = "Matern12"
    MATERN32 = "Matern32"
    MATERN52 = "Matern52"


# K''(0) = -coefficient * variance / lengthscale**2
_CURVATURE = {
    KernelFamily.SQUARED_EXPONENTIAL: 1.0,
    KernelFamily.MATERN32: 3.0,
    KernelFamily.MATERN52: 5.0 / 3.0,
}


@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily
    variance: float = 1.0
    lengthscale: float = 1.0

    def __post_init__(self):
        try:
            family = KernelFamily(self.family)
        except ValueError:
            names = ", ".join(f.value for f in KernelFamily)
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {names}") from None
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "variance", check_positive(self.variance, "variance"))
        object.__setattr__(self, "lengthscale", check_positive(self.lengthscale, "lengthscale"))

    @property
    def twice_differentiable(self):
        return self.family in _CURVATURE

    def to_dict(self):
        return {"family": self.family.value, "variance": self.variance, "lengthscale": self.lengthscale}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d.get("variance", 1.0), d.get("lengthscale", 1.0))

    def __call__(self, tau):
        return evaluate(self, tau)


def evaluate(spec, tau):
    """Evaluate K(tau) for scalar or array ``tau >= 0``."""
    tau_arr = as_float_array(tau, "tau")
    if np.any(tau_arr < 0):
        raise DomainError("kernel lag tau must be nonnegative; pass |t - s|")
    r = tau_arr / spec.lengthscale
    fam = spec.family
    if fam is KernelFamily.SQUARED_EXPONENTIAL:
        k = np.exp(-0.5 * r * r)
    elif fam is KernelFamily.MATERN12:
        k = np.exp(-r)
    elif fam is KernelFamily.MATERN32:
        k = (1.0 + _SQRT3 * r) * np.exp(-_SQRT3 * r)
    else:
        k = (1.0 + _SQRT5 * r + 5.0 / 3.0 * r * r) * np.exp(-_SQRT5 * r)
    return scalar_or_array(spec.variance * k, tau)


def second_derivative_at_zero(spec):
    """Analytic K''(0); strictly negative for the smooth families."""
    if not spec.twice_differentiable:
        raise NotTwiceDifferentiable(
            f"{spec.family.value} kernel has a kink at tau=0; K''(0) does not exist "
            "and the zero-crossing intensity is infinite"
        )
    return -_CURVATURE[spec.family] * spec.variance / spec.lengthscale**2
