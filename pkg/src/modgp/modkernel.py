"""The modulated kernel K_theta(t, s) = K(|theta(t) - theta(s)|)."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernel as _kernel
from . import warp as _warp
from .exceptions import JitterExceeded


@dataclass(frozen=True)
class JitterPolicy:
    """Relative jitter schedule: ``start * variance`` times ``factor`` up to ``cap * variance``."""

    start: float = 1e-12
    factor: float = 10.0
    cap: float = 1e-6

    def levels(self, variance):
        level = self.start
        while level <= self.cap * (1 + 1e-9):
            yield level * variance
            level *= self.factor


DEFAULT_JITTER = JitterPolicy()


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Gram matrix of K_theta on a grid.

    ``values`` is the exact (unjittered) matrix; ``cholesky`` is the lower
    factor of ``values + jitter_applied * I`` when a jitter policy was used.
    """

    values: np.ndarray
    grid: object
    jitter_applied: float = 0.0
    cholesky: np.ndarray = None


def evaluate_modulated(k, w, t, s):
    """K(|theta(t) - theta(s)|), broadcasting over ``t`` and ``s``."""
    return _kernel.evaluate(k, np.abs(np.subtract(_warp.theta(w, t), _warp.theta(w, s))))


def modulated_matrix(k, w, t, s):
    """Cross-covariance matrix ``K_theta(t_i, s_j)``."""
    tt = np.atleast_1d(_warp.theta(w, t))
    ss = np.atleast_1d(_warp.theta(w, s))
    return _kernel.evaluate(k, np.abs(tt[:, None] - ss[None, :]))


def gram(k, w, grid, jitter_policy=DEFAULT_JITTER):
    """Assemble the Gram matrix on ``grid`` and, with a policy, factor it.

    Jitter escalates through the policy until Cholesky succeeds.
    """
    nodes = grid.nodes if hasattr(grid, "nodes") else np.asarray(grid, dtype=np.float64)
    values = modulated_matrix(k, w, nodes, nodes)
    # exact symmetry regardless of rounding in the lag computation
    values = 0.5 * (values + values.T)
    if jitter_policy is None:
        return GramMatrix(values, grid)
    eye = np.eye(values.shape[0])
    for jitter in jitter_policy.levels(k.variance):
        try:
            chol = scipy.linalg.cholesky(values + jitter * eye, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        return GramMatrix(values, grid, jitter, chol)
    raise JitterExceeded(
        f"Cholesky failed at jitter {jitter_policy.cap:g} * variance on {values.shape[0]} nodes"
    )


def mixed_partial_diag(k, w, t):
    """lim_{s -> t} d^2/dt ds K_theta(t, s) = -K''(0) * theta'(t)**2."""
    curvature = -_kernel.second_derivative_at_zero(k)
    return curvature * np.square(_warp.theta_dot(w, t))


FD_STEP = 1e-4


def mixed_partial_fd(k, w, t, h=FD_STEP):
    """Central-difference estimate of the mixed partial of K_theta at ``(t, t)``.

    Test oracle only; steps outside the warping domain raise.
    """
    tp, tm = np.add(t, h), np.subtract(t, h)
    kpp = evaluate_modulated(k, w, tp, tp)
    kpm = evaluate_modulated(k, w, tp, tm)
    kmp = evaluate_modulated(k, w, tm, tp)
    kmm = evaluate_modulated(k, w, tm, tm)
    return (kpp - kpm - kmp + kmm) / (4.0 * h * h)
