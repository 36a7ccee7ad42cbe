"""scikit-learn compatible wrappers.

``WarpTransformer`` maps time stamps through a validated warping,
``KarhunenLoeveTransformer`` evaluates the leading covariance eigenfunctions
as features, and ``ModulatedGPSampler`` draws paths of the modulated process
in the style of ``GaussianProcessRegressor.sample_y``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import grid as _grid
from . import pathsim, spectral, warp, zeros
from ._validation import check_times
from .kernel import KernelSpec
from .modkernel import gram


def _build_warping(kind, a, b, nodes, values):
    kind = warp.WarpKind(kind)
    if kind is warp.WarpKind.AFFINE:
        return warp.Warping.affine(a, b)
    if kind is warp.WarpKind.TABULATED:
        if nodes is None or values is None:
            raise ValueError("Tabulated warping needs nodes and values")
        return warp.Warping.tabulated(nodes, values)
    return warp.from_dict({"kind": kind.value})


class WarpTransformer(TransformerMixin, BaseEstimator):
    """Time-change transformer ``t -> theta(t)``.

    ``fit`` validates the warping over the range of the training times and
    raises if it is not admissible there.
    """

    def __init__(self, kind="Identity", a=1.0, b=0.0, nodes=None, values=None, probe_count=1001):
        self.kind = kind
        self.a = a
        self.b = b
        self.nodes = nodes
        self.values = values
        self.probe_count = probe_count

    def fit(self, X, y=None):
        t = check_times(X)
        w = _build_warping(self.kind, self.a, self.b, self.nodes, self.values)
        report = warp.validate(w, self.probe_count, (float(t.min()), float(t.max())))
        if not report.validated:
            raise ValueError(f"warping is not admissible on the data range: {report.violations}")
        self.warping_ = report.warping
        self.validation_ = report
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "warping_")
        return np.asarray(warp.theta(self.warping_, check_times(X)))[:, None]

    def inverse_transform(self, X):
        check_is_fitted(self, "warping_")
        return np.asarray(warp.theta_inverse(self.warping_, check_times(X)))[:, None]

    def derivative(self, X):
        check_is_fitted(self, "warping_")
        return np.asarray(warp.theta_dot(self.warping_, check_times(X)))


class KarhunenLoeveTransformer(TransformerMixin, BaseEstimator):
    """Leading eigenfunctions of the (modulated) covariance operator as features.

    ``fit`` solves the eigenproblem on the range of the training times;
    ``transform`` evaluates the eigenfunctions at new times by Nystrom
    extension.
    """

    def __init__(
        self,
        family="SquaredExponential",
        variance=1.0,
        lengthscale=1.0,
        warping=None,
        n_modes=10,
        n_nodes=200,
        rule="GaussLegendre",
        operator="modulated",
    ):
        self.family = family
        self.variance = variance
        self.lengthscale = lengthscale
        self.warping = warping
        self.n_modes = n_modes
        self.n_nodes = n_nodes
        self.rule = rule
        self.operator = operator

    def fit(self, X, y=None):
        t = check_times(X)
        lo, hi = float(t.min()), float(t.max())
        if not hi > lo:
            raise ValueError("need at least two distinct time points")
        self.kernel_ = KernelSpec(self.family, self.variance, self.lengthscale)
        self.warping_ = self.warping if self.warping is not None else warp.Warping.identity()
        g = _grid.make_grid(self.rule, lo, hi, self.n_nodes)
        self.eigensystem_ = spectral.nystrom_eig(self.kernel_, self.warping_, g, self.n_modes, self.operator)
        self.eigenvalues_ = self.eigensystem_.eigenvalues
        self.interval_ = (lo, hi)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "eigensystem_")
        t = check_times(X)
        lo, hi = self.interval_
        if np.any(t < lo) or np.any(t > hi):
            raise ValueError(f"times outside the fitted interval [{lo}, {hi}]")
        return self.eigensystem_(t)


class ModulatedGPSampler(BaseEstimator):
    """Prior sampler for the centered process with covariance K(|theta(t) - theta(s)|)."""

    def __init__(self, family="SquaredExponential", variance=1.0, lengthscale=1.0, warping=None):
        self.family = family
        self.variance = variance
        self.lengthscale = lengthscale
        self.warping = warping

    def fit(self, X=None, y=None):
        self.kernel_ = KernelSpec(self.family, self.variance, self.lengthscale)
        self.warping_ = self.warping if self.warping is not None else warp.Warping.identity()
        return self

    def covariance(self, X):
        check_is_fitted(self, "kernel_")
        t = check_times(X)
        return gram(self.kernel_, self.warping_, t, jitter_policy=None).values

    def sample_y(self, X, n_samples=1, random_state=0):
        """Paths at sorted times ``X``; shape ``(len(X), n_samples)``."""
        check_is_fitted(self, "kernel_")
        t = check_times(X)
        ens = pathsim.sample_paths(self.kernel_, self.warping_, _grid.trapezoid(t), n_samples, random_state)
        return ens.paths.T.copy()

    def expected_zeros(self, T):
        check_is_fitted(self, "kernel_")
        return zeros.expected_zeros_rice(self.kernel_, self.warping_, T)
