"""Exact Cholesky sampling of the modulated process and zero counting.

Each path draws its standard normals from its own Philox stream keyed by the
seed with the path index in the top counter word, so the ensemble does not
depend on how paths are split across workers.
"""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import grid as _grid
from . import warp as _warp
from ._validation import check_positive_int
from .modkernel import DEFAULT_JITTER, gram

CHUNK = 256
_MAX_SEED = 2**64


def path_normals(seed, path_index, n):
    """The ``n`` standard normals of path ``path_index``; a pure function of its arguments."""
    bitgen = np.random.Philox(key=seed, counter=path_index << 192)
    return np.random.Generator(bitgen).standard_normal(n)


def _check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    seed: int
    grid: _grid.Grid
    paths: np.ndarray
    kernel: object = None
    warping: object = None
    jitter_applied: float = 0.0

    @property
    def n_paths(self):
        return self.paths.shape[0]

    def metadata(self):
        return {
            "seed": self.seed,
            "n_paths": self.n_paths,
            "grid": {"nodes": self.grid.nodes.tolist(), "rule": self.grid.rule.value},
            "kernel": None if self.kernel is None else self.kernel.to_dict(),
            "warping": None if self.warping is None else self.warping.to_dict(),
            "jitter_applied": self.jitter_applied,
        }


def _chunks(n_paths):
    return [(lo, min(lo + CHUNK, n_paths)) for lo in range(0, n_paths, CHUNK)]


def _iter_path_chunks(chol, n_paths, seed, n_jobs):
    n = chol.shape[0]

    def draw(bounds):
        lo, hi = bounds
        z = np.stack([path_normals(seed, i, n) for i in range(lo, hi)])
        return z @ chol.T

    chunks = _chunks(n_paths)
    if n_jobs == 1:
        yield from map(draw, chunks)
        return
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        yield from pool.map(draw, chunks)


def sample_paths(k, w, grid, n_paths, seed, n_jobs=1, jitter_policy=DEFAULT_JITTER):
    """Draw ``n_paths`` samples of the centered process on ``grid``.

    Returns a :class:`PathEnsemble` whose ``paths`` has shape
    ``(n_paths, len(grid))``.
    """
    n_paths = check_positive_int(n_paths, "n_paths")
    seed = _check_seed(seed)
    n_jobs = check_positive_int(n_jobs, "n_jobs")
    g = gram(k, w, grid, jitter_policy)
    paths = np.concatenate(list(_iter_path_chunks(g.cholesky, n_paths, seed, n_jobs)))
    paths.flags.writeable = False
    return PathEnsemble(seed, grid, paths, k, w, g.jitter_applied)


def count_zeros(samples):
    """Number of sign changes along a sampled path.

    A maximal run of exact zeros counts as a single crossing and the sign
    comparison resumes at the next nonzero sample, so ``(1, 0, -1)`` gives 1.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("count_zeros needs a 1-D path with at least 2 samples")
    signs = np.sign(x)
    if np.all(signs != 0):
        return int(np.count_nonzero(signs[:-1] != signs[1:]))
    count, prev, in_zero = 0, 0.0, False
    for s in signs:
        if s == 0:
            if not in_zero:
                count += 1
                in_zero = True
            continue
        if prev != 0 and not in_zero and s != prev:
            count += 1
        in_zero = False
        prev = s
    return count


def count_zeros_batch(paths):
    """:func:`count_zeros` applied to each row of a 2-D array."""
    paths = np.asarray(paths, dtype=np.float64)
    signs = np.sign(paths)
    counts = np.count_nonzero(signs[:, :-1] != signs[:, 1:], axis=1)
    for i in np.flatnonzero(np.any(signs == 0, axis=1)):
        counts[i] = count_zeros(paths[i])
    return counts


def warped_uniform_grid(w, T, density):
    """Trapezoid grid on ``[0, T]`` whose images are equispaced in warped time.

    Uses ``ceil(density * (theta(T) - theta(0)))`` intervals, so resolution
    follows the local clock speed theta'.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    if not density > 0:
        raise ValueError("grid density must be positive")
    if T == 0:
        return _grid.trapezoid([0.0])
    v0, v1 = _warp.theta(w, 0.0), _warp.theta(w, T)
    n_intervals = max(1, math.ceil(density * (v1 - v0) - 1e-9))
    nodes = np.asarray(_warp.theta_inverse(w, np.linspace(v0, v1, n_intervals + 1)))
    nodes[0], nodes[-1] = 0.0, T
    return _grid.trapezoid(nodes)


@dataclass
class MonteCarloResult:
    mean: float
    std_error: float  # None when n_paths == 1
    n_paths: int
    n_nodes: int
    jitter_applied: float


def mc_expected_zeros(k, w, T, grid_density, n_paths, seed, n_jobs=1):
    """Monte Carlo mean and standard error of the zero count on ``[0, T]``."""
    n_paths = check_positive_int(n_paths, "n_paths")
    seed = _check_seed(seed)
    grid = warped_uniform_grid(w, T, grid_density)
    if len(grid) < 2:
        return MonteCarloResult(0.0, 0.0 if n_paths > 1 else None, n_paths, len(grid), 0.0)
    g = gram(k, w, grid)
    counts = np.concatenate(
        [count_zeros_batch(c) for c in _iter_path_chunks(g.cholesky, n_paths, seed, n_jobs)]
    )
    mean = float(counts.mean())
    std_error = float(counts.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else None
    return MonteCarloResult(mean, std_error, n_paths, len(grid), g.jitter_applied)


def write_ensemble(ensemble, directory, stem="paths"):
    """Dump paths to ``<stem>.csv`` (one row per path) with a JSON sidecar."""
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, f"{stem}.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"t{i}" for i in range(len(ensemble.grid))])
        for row in ensemble.paths:
            writer.writerow([repr(float(x)) for x in row])
    with open(os.path.join(directory, f"{stem}.json"), "w") as fh:
        json.dump(ensemble.metadata(), fh, indent=2, sort_keys=True)
    return csv_path
