"""Nystrom eigensolver for covariance integral operators and the transport checks.

Two discretized operators are available on a warped interval:

``"modulated"``
    kernel ``K(|theta(t) - theta(s)|)`` against ``ds``; the operator with the
    modulated kernel taken literally.
``"conjugated"``
    kernel ``sqrt(theta'(t) theta'(s)) K(|theta(t) - theta(s)|)`` against
    ``ds``, which is ``M T_K M^-1`` with ``M[f](t) = sqrt(theta'(t)) f(theta(t))``.

The two coincide when ``theta' == 1``. For any other warping they differ by
the Jacobian of the time change: an affine warping with slope ``a`` scales the
whole ``"modulated"`` spectrum by ``1/a`` while leaving its eigenfunctions
unchanged.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import grid as _grid
from . import kernel as _kernel
from . import warp as _warp
from ._validation import check_positive_int
from .exceptions import DomainError
from .modkernel import gram

OPERATORS = ("modulated", "conjugated")
CLAMP_RELATIVE = 1e-10
DEGENERACY_GAP = 1e-6


def _check_operator(operator):
    if operator not in OPERATORS:
        raise ValueError(f"operator must be one of {OPERATORS}, got {operator!r}")


def operator_kernel(k, w, t, s, operator="modulated"):
    """Matrix of the operator kernel between point sets ``t`` and ``s``."""
    _check_operator(operator)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    mat = _kernel.evaluate(k, np.abs(_warp.theta(w, t)[:, None] - _warp.theta(w, s)[None, :]))
    if operator == "conjugated":
        mat = mat * np.sqrt(_warp.theta_dot(w, t))[:, None] * np.sqrt(_warp.theta_dot(w, s))[None, :]
    return mat


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Top eigenpairs of a discretized covariance operator.

    Columns of ``eigenvectors`` sample the eigenfunctions at ``grid.nodes``
    and have unit quadrature norm. Calling the system evaluates the
    eigenfunctions anywhere in the interval by Nystrom extension.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    grid: _grid.Grid
    kernel: _kernel.KernelSpec
    warping: _warp.Warping
    operator: str = "modulated"
    jitter_applied: float = 0.0
    _next_eigenvalue: float = field(default=np.nan, repr=False)

    @property
    def n_modes(self):
        return self.eigenvalues.size

    def __call__(self, t, modes=None):
        """Nystrom extension ``(1/lambda) sum_j w_j k(t, t_j) phi(t_j)``; shape ``(len(t), n)``."""
        idx = np.arange(self.n_modes) if modes is None else np.atleast_1d(modes)
        lam = self.eigenvalues[idx]
        if np.any(lam <= 0):
            raise ValueError("cannot extend modes with zero eigenvalue")
        cross = operator_kernel(self.kernel, self.warping, t, self.grid.nodes, self.operator)
        return (cross * self.grid.weights[None, :]) @ self.eigenvectors[:, idx] / lam[None, :]

    def degenerate_modes(self, gap=DEGENERACY_GAP):
        """Boolean mask of modes whose eigenvalue is within ``gap`` of a neighbour's."""
        lam = np.append(self.eigenvalues, self._next_eigenvalue)
        with np.errstate(divide="ignore", invalid="ignore"):
            close = lam[:-1] / lam[1:] < 1.0 + gap
        close = np.where(np.isnan(lam[1:]), False, close)
        flags = close.copy()
        flags[1:] |= close[:-1]
        return flags


def nystrom_eig(k, w, grid, n_modes, operator="modulated", jitter_policy=None):
    """Eigenpairs of the operator on ``grid`` via ``W^1/2 G W^1/2``.

    Eigenvalues come back descending; values below ``1e-10 * lambda_max`` in
    magnitude are clamped to 0. ``jitter_policy`` is forwarded to
    :func:`modgp.modkernel.gram` and, when given, the jittered matrix is used.
    """
    n_modes = check_positive_int(n_modes, "n_modes")
    if n_modes > len(grid):
        raise ValueError(f"n_modes={n_modes} exceeds the grid size {len(grid)}")
    _check_operator(operator)
    g = gram(k, w, grid, jitter_policy)
    mat = g.values
    if g.jitter_applied:
        mat = mat + g.jitter_applied * np.eye(len(grid))
    if operator == "conjugated":
        root = np.sqrt(_warp.theta_dot(w, grid.nodes))
        mat = mat * root[:, None] * root[None, :]
    sw = np.sqrt(grid.weights)
    sym = sw[:, None] * mat * sw[None, :]
    n = len(grid)
    want = min(n_modes + 1, n)
    vals, vecs = scipy.linalg.eigh(sym, subset_by_index=(n - want, n - 1), driver="evr")
    vals, vecs = vals[::-1], vecs[:, ::-1]
    lam_max = max(vals[0], 0.0)
    vals = np.where(vals < CLAMP_RELATIVE * lam_max, 0.0, vals)
    funcs = vecs / sw[:, None]
    # deterministic sign: largest-magnitude sample positive
    pivots = funcs[np.argmax(np.abs(funcs), axis=0), np.arange(funcs.shape[1])]
    funcs = funcs * np.where(pivots < 0, -1.0, 1.0)[None, :]
    nxt = vals[n_modes] if want > n_modes else np.nan
    return EigenSystem(
        eigenvalues=vals[:n_modes].copy(),
        eigenvectors=funcs[:, :n_modes].copy(),
        grid=grid,
        kernel=k,
        warping=w,
        operator=operator,
        jitter_applied=g.jitter_applied,
        _next_eigenvalue=nxt,
    )


def stationary_eig(k, interval, n_nodes, n_modes, rule=_grid.QuadratureRule.GAUSS_LEGENDRE):
    """Eigenpairs of the unwarped operator T_K on ``interval``."""
    g = _grid.make_grid(rule, interval[0], interval[1], n_nodes)
    return nystrom_eig(k, _warp.Warping.identity(), g, n_modes)


def _evaluate(source, t):
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if isinstance(source, EigenSystem):
        lo, hi = source.grid.interval
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError(f"evaluation points leave the source interval [{lo}, {hi}]")
        return source(t)
    out = np.asarray(source(t), dtype=np.float64)
    return out[:, None] if out.ndim == 1 else out


def transport(source, w, target_grid):
    """Samples of ``M[psi](t) = sqrt(theta'(t)) psi(theta(t))`` on ``target_grid``.

    ``source`` is an :class:`EigenSystem` on the warped interval (evaluated by
    Nystrom extension) or a callable returning values at arbitrary points.
    Output has one column per source function.
    """
    t = target_grid.nodes if hasattr(target_grid, "nodes") else np.asarray(target_grid, dtype=np.float64)
    vals = _evaluate(source, _warp.theta(w, t))
    return np.sqrt(_warp.theta_dot(w, t))[:, None] * vals


def inverse_transport(source, w, target_grid):
    """Samples of ``M^-1[phi](v) = phi(theta^-1(v)) / sqrt(theta'(theta^-1(v)))``.

    ``target_grid`` lives in warped coordinates; ``source`` is evaluated on
    the original axis (an :class:`EigenSystem` or a callable).
    """
    v = target_grid.nodes if hasattr(target_grid, "nodes") else np.asarray(target_grid, dtype=np.float64)
    t = _warp.theta_inverse(w, v)
    vals = _evaluate(source, t)
    return vals / np.sqrt(_warp.theta_dot(w, t))[:, None]


def _image_grid(w, grid):
    a, b = grid.interval
    return _grid.make_grid(grid.rule, float(_warp.theta(w, a)), float(_warp.theta(w, b)), len(grid))


def _relative_difference(x, y):
    x, y = np.asarray(x), np.asarray(y)
    scale = np.maximum(np.abs(x), np.abs(y))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(scale > 0, np.abs(x - y) / scale, 0.0)


@dataclass
class InvarianceReport:
    kernel: dict
    warping: dict
    operator: str
    interval: tuple
    image: tuple
    rule: str
    grid_sizes: list
    eigenvalues_warped: list
    eigenvalues_stationary: list
    relative_differences: list
    max_relative_difference: list

    def csv_rows(self):
        for i, n in enumerate(self.grid_sizes):
            for m, (a, b, r) in enumerate(
                zip(self.eigenvalues_warped[i], self.eigenvalues_stationary[i], self.relative_differences[i])
            ):
                yield {
                    "grid_size": n,
                    "mode": m,
                    "eigenvalue_warped": a,
                    "eigenvalue_stationary": b,
                    "relative_difference": r,
                }


def check_eigenvalue_invariance(
    k, w, interval, grid_sizes=(400,), n_modes=10, operator="modulated", rule=_grid.QuadratureRule.GAUSS_LEGENDRE
):
    """Compare eigenvalues on ``[a, b]`` with those of T_K on ``[theta(a), theta(b)]``.

    One row of per-mode relative differences per grid size.
    """
    a, b = (float(x) for x in interval)
    image = (float(_warp.theta(w, a)), float(_warp.theta(w, b)))
    warped, stationary, diffs = [], [], []
    for n in grid_sizes:
        g = _grid.make_grid(rule, a, b, n)
        lam_w = nystrom_eig(k, w, g, n_modes, operator).eigenvalues
        lam_s = nystrom_eig(k, _warp.Warping.identity(), _image_grid(w, g), n_modes).eigenvalues
        warped.append(lam_w.tolist())
        stationary.append(lam_s.tolist())
        diffs.append(_relative_difference(lam_w, lam_s).tolist())
    return InvarianceReport(
        kernel=k.to_dict(),
        warping=w.to_dict(),
        operator=operator,
        interval=(a, b),
        image=image,
        rule=_grid.QuadratureRule(rule).value,
        grid_sizes=list(grid_sizes),
        eigenvalues_warped=warped,
        eigenvalues_stationary=stationary,
        relative_differences=diffs,
        max_relative_difference=[max(d) for d in diffs],
    )


@dataclass
class TransportReport:
    kernel: dict
    warping: dict
    operator: str
    interval: tuple
    grid_size: int
    eigenvalues_warped: list
    eigenvalues_stationary: list
    errors: list
    transported_norms: list
    degenerate: list
    max_error: float

    def csv_rows(self):
        for m in range(len(self.errors)):
            yield {
                "mode": m,
                "eigenvalue_warped": self.eigenvalues_warped[m],
                "eigenvalue_stationary": self.eigenvalues_stationary[m],
                "error": self.errors[m],
                "transported_norm": self.transported_norms[m],
                "degenerate": self.degenerate[m],
            }


def check_transport_eigenfunctions(k, w, grid, n_modes, operator="modulated"):
    """Sign-resolved distance between computed eigenfunctions and transported ones.

    ``e_n = min_s || phi_n - s M[psi_n] ||`` in the quadrature norm of ``grid``,
    with ``psi_n`` from T_K on the image interval. Near-degenerate modes are
    flagged and left out of ``max_error``.
    """
    modulated = nystrom_eig(k, w, grid, n_modes, operator)
    stationary = nystrom_eig(k, _warp.Warping.identity(), _image_grid(w, grid), n_modes)
    if w.kind is _warp.WarpKind.IDENTITY:
        moved = stationary.eigenvectors
    else:
        moved = transport(stationary, w, grid)
    errors, norms = [], []
    for n in range(n_modes):
        phi, mpsi = modulated.eigenvectors[:, n], moved[:, n]
        errors.append(min(grid.norm(phi - mpsi), grid.norm(phi + mpsi)))
        norms.append(grid.norm(mpsi))
    degenerate = modulated.degenerate_modes() | stationary.degenerate_modes()
    kept = [e for e, d in zip(errors, degenerate) if not d]
    return TransportReport(
        kernel=k.to_dict(),
        warping=w.to_dict(),
        operator=operator,
        interval=grid.interval,
        grid_size=len(grid),
        eigenvalues_warped=modulated.eigenvalues.tolist(),
        eigenvalues_stationary=stationary.eigenvalues.tolist(),
        errors=errors,
        transported_norms=norms,
        degenerate=degenerate.tolist(),
        max_error=max(kept) if kept else float("nan"),
    )


class _SinusoidSum:
    """``sum_m c_m cos(m pi x + p_m)`` on ``x = (t - a)/(b - a)``."""

    def __init__(self, interval, amplitudes, phases):
        self.a, self.b = interval
        self.amplitudes = np.asarray(amplitudes)
        self.phases = np.asarray(phases)

    def __call__(self, t):
        x = (np.asarray(t, dtype=np.float64) - self.a) / (self.b - self.a)
        m = np.arange(1, self.amplitudes.size + 1)
        return np.cos(np.pi * x[..., None] * m + self.phases) @ self.amplitudes


class _Mode:
    def __init__(self, system, index):
        self.system, self.index = system, index

    def __call__(self, t):
        return self.system(t, modes=[self.index])[:, 0]


def default_test_functions(
    k, w, interval, n_nodes=400, n_eigen=5, n_random=5, seed=0, operator="modulated", n_frequencies=3
):
    """The top eigenfunctions of the checked operator plus seeded sinusoid sums.

    Returns ``(label, callable)`` pairs. Eigenfunctions are Nystrom extensions
    from an ``n_nodes`` Gauss-Legendre solve, so they stay fixed while the
    checking grid is refined.
    """
    a, b = (float(x) for x in interval)
    funcs = []
    if n_eigen:
        ref = nystrom_eig(k, w, _grid.gauss_legendre(a, b, n_nodes), n_eigen, operator)
        funcs += [(f"eigenfunction_{i}", _Mode(ref, i)) for i in range(n_eigen)]
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        amps = rng.standard_normal(n_frequencies)
        phases = rng.uniform(0.0, 2.0 * np.pi, n_frequencies)
        funcs.append((f"sinusoids_{i}", _SinusoidSum((a, b), amps, phases)))
    return funcs


@dataclass
class ConjugationReport:
    kernel: dict
    warping: dict
    operator: str
    interval: tuple
    grid_size: int
    labels: list
    residuals: list
    max_residual: float

    def csv_rows(self):
        for label, r in zip(self.labels, self.residuals):
            yield {"grid_size": self.grid_size, "function": label, "residual": r}


def apply_operator(k, w, grid, values, operator="modulated"):
    """Quadrature discretization of the operator applied to samples on ``grid``."""
    mat = operator_kernel(k, w, grid.nodes, grid.nodes, operator)
    return mat @ (grid.weights * values)


def apply_conjugated(k, w, grid, func):
    """``M T_K M^-1 [f]`` at ``grid.nodes``, with T_K on its own grid over the image."""
    image = _image_grid(w, grid)
    inner = inverse_transport(func, w, image)[:, 0]
    stat = _kernel.evaluate(k, np.abs(_warp.theta(w, grid.nodes)[:, None] - image.nodes[None, :]))
    return np.sqrt(_warp.theta_dot(w, grid.nodes)) * (stat @ (image.weights * inner))


def check_conjugation(k, w, grid, test_functions=None, operator="modulated", seed=0):
    """Residual ``||T f - M T_K M^-1 f|| / ||f||`` for each test function.

    ``T`` is the chosen warped operator discretized on ``grid``; the right-hand
    side applies T_K on an independent grid of the same rule and size over the
    image interval, so the residual of a true identity is pure quadrature
    error.
    """
    if test_functions is None:
        test_functions = default_test_functions(k, w, grid.interval, len(grid), seed=seed, operator=operator)
    labels, residuals = [], []
    for label, f in test_functions:
        fv = np.asarray(f(grid.nodes), dtype=np.float64)
        lhs = apply_operator(k, w, grid, fv, operator)
        rhs = apply_conjugated(k, w, grid, f)
        labels.append(label)
        residuals.append(grid.norm(lhs - rhs) / grid.norm(fv))
    return ConjugationReport(
        kernel=k.to_dict(),
        warping=w.to_dict(),
        operator=operator,
        interval=grid.interval,
        grid_size=len(grid),
        labels=labels,
        residuals=residuals,
        max_residual=max(residuals),
    )
