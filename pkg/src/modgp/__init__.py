"""Gaussian processes from monotonically modulated stationary kernels."""

from .exceptions import (
    ConfigError,
    DomainError,
    JitterExceeded,
    NotTwiceDifferentiable,
    QuadratureError,
    WarpingCSVError,
)
from .grid import Grid, QuadratureRule, gauss_legendre, trapezoid
from .kernel import KernelFamily, KernelSpec, evaluate, second_derivative_at_zero
from .modkernel import GramMatrix, JitterPolicy, evaluate_modulated, gram, mixed_partial_diag
from .pathsim import PathEnsemble, count_zeros, mc_expected_zeros, sample_paths
from .spectral import (
    EigenSystem,
    check_conjugation,
    check_eigenvalue_invariance,
    check_transport_eigenfunctions,
    inverse_transport,
    nystrom_eig,
    transport,
)
from .warp import Warping, WarpKind, theta, theta_dot, theta_inverse, validate
from .zeros import (
    ZeroCountReport,
    compare,
    expected_zeros_paper,
    expected_zeros_quadrature,
    expected_zeros_rice,
)

__version__ = "0.1.0"
