import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modgp.grid import trapezoid, uniform_trapezoid
from modgp.kernel import KernelSpec
from modgp.modkernel import gram
from modgp.pathsim import (
    count_zeros,
    count_zeros_batch,
    mc_expected_zeros,
    path_normals,
    sample_paths,
    warped_uniform_grid,
    write_ensemble,
)
from modgp.warp import Warping, theta


def test_single_node_variance():
    k = KernelSpec("SquaredExponential", 2.0, 1.0)
    ens = sample_paths(k, Warping.identity(), trapezoid([0.0]), 100_000, seed=3)
    x = ens.paths[:, 0]
    n = x.size
    # SE of the sample variance of a Gaussian: sigma^2 sqrt(2 / (n - 1))
    se = 2.0 * math.sqrt(2.0 / (n - 1))
    assert abs(x.var(ddof=1) - 2.0) <= 5 * se
    assert abs(x.mean()) <= 5 * math.sqrt(2.0 / n)


def test_identity_and_unit_affine_are_bit_identical(se):
    g = uniform_trapezoid(0, 3, 40)
    a = sample_paths(se, Warping.identity(), g, 50, seed=9).paths
    b = sample_paths(se, Warping.affine(1, 0), g, 50, seed=9).paths
    assert np.array_equal(a, b)


def test_fixed_seed_is_deterministic(se):
    g = uniform_trapezoid(0, 3, 40)
    a = sample_paths(se, Warping.soft_shift(), g, 600, seed=2**64 - 1).paths
    b = sample_paths(se, Warping.soft_shift(), g, 600, seed=2**64 - 1).paths
    c = sample_paths(se, Warping.soft_shift(), g, 600, seed=2**64 - 1, n_jobs=4).paths
    assert np.array_equal(a, b) and np.array_equal(a, c)
    d = sample_paths(se, Warping.soft_shift(), g, 600, seed=1).paths
    assert not np.array_equal(a, d)


def test_paths_are_indexed_streams(se):
    g = uniform_trapezoid(0, 2, 20)
    ens = sample_paths(se, Warping.identity(), g, 300, seed=42)
    chol = gram(se, Warping.identity(), g).cholesky
    for i in [0, 255, 256, 299]:
        np.testing.assert_allclose(ens.paths[i], chol @ path_normals(42, i, 20), rtol=1e-12, atol=1e-14)
    # a shorter ensemble is a prefix of a longer one
    short = sample_paths(se, Warping.identity(), g, 10, seed=42)
    np.testing.assert_array_equal(short.paths, ens.paths[:10])


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True])
def test_bad_seed(se, seed):
    with pytest.raises(ValueError):
        sample_paths(se, Warping.identity(), uniform_trapezoid(0, 1, 3), 2, seed)


def test_marginal_variance(se):
    k = KernelSpec("Matern52", 1.5, 0.8)
    g = uniform_trapezoid(0, 4, 25)
    ens = sample_paths(k, Warping.exp_approach(), g, 20_000, seed=5)
    v = ens.paths.var(axis=0, ddof=1)
    se_var = 1.5 * math.sqrt(2.0 / (ens.n_paths - 1))
    assert np.all(np.abs(v - 1.5) <= 5 * se_var)


@pytest.mark.parametrize(
    "samples,expected",
    [((1, 2, 3), 0), ((1, -1, 1), 2), ((1, 0, -1), 1), ((1, 0, 0, 1), 1), ((0, 1, -1), 2), ((-1, 0, -1, 0, 1), 2)],
)
def test_count_zeros_examples(samples, expected):
    assert count_zeros(samples) == expected


def test_count_zeros_needs_two_samples():
    with pytest.raises(ValueError):
        count_zeros([1.0])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=2, max_size=60))
def test_count_zeros_properties(x):
    x = np.asarray(x)
    n = count_zeros(x)
    assert 0 <= n <= x.size - 1
    assert count_zeros(-x) == n
    assert count_zeros(3.0 * x) == n
    assert count_zeros_batch(x[None, :])[0] == n


@given(st.lists(finite.filter(lambda v: v != 0), min_size=2, max_size=60))
def test_count_zeros_without_exact_zeros(x):
    x = np.asarray(x)
    assert count_zeros(x) == sum((a > 0) != (b > 0) for a, b in zip(x, x[1:]))


def test_warped_uniform_grid():
    w = Warping.soft_shift()
    g = warped_uniform_grid(w, 4.0, 20)
    increment = theta(w, 4.0) - theta(w, 0.0)
    assert len(g) == math.ceil(20 * increment) + 1
    np.testing.assert_allclose(np.diff(theta(w, g.nodes)), increment / (len(g) - 1), rtol=1e-9)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 4.0
    assert len(warped_uniform_grid(Warping.identity(), 10.0, 50)) == 501
    assert len(warped_uniform_grid(w, 0.0, 50)) == 1


def test_mc_identity_matches_rice_rate(se):
    r = mc_expected_zeros(se, Warping.identity(), 10.0, 50, 10_000, seed=2024)
    assert abs(r.mean - 10 / math.pi) <= 3 * r.std_error
    assert r.n_nodes == 501


def test_mc_single_path(se):
    r = mc_expected_zeros(se, Warping.identity(), 10.0, 50, 1, seed=4)
    g = warped_uniform_grid(Warping.identity(), 10.0, 50)
    path = sample_paths(se, Warping.identity(), g, 1, seed=4).paths[0]
    assert r.mean == count_zeros(path)
    assert r.std_error is None


def test_mc_empty_interval(se):
    r = mc_expected_zeros(se, Warping.identity(), 0.0, 50, 100, seed=1)
    assert r.mean == 0.0 and r.std_error == 0.0


def test_mc_depends_on_theta_increment_only(se):
    a = mc_expected_zeros(se, Warping.identity(), 10.0, 50, 10_000, seed=11)
    b = mc_expected_zeros(se, Warping.affine(2, 0), 5.0, 50, 10_000, seed=12)
    assert abs(a.mean - b.mean) <= 3 * math.hypot(a.std_error, b.std_error)
    c = mc_expected_zeros(se, Warping.soft_shift(), 5.868, 50, 10_000, seed=13)
    rate = (theta(Warping.soft_shift(), 5.868) - theta(Warping.soft_shift(), 0.0)) / math.pi
    assert abs(c.mean - rate) <= 3 * c.std_error


def test_density_convergence(se):
    # the density-50 grid is every other node of the density-100 grid, so the
    # same paths give both counts and only missed crossings separate them
    w = Warping.soft_shift()
    fine = warped_uniform_grid(w, 5.0, 100)
    ens = sample_paths(se, w, fine, 5_000, seed=8)
    fine_counts = count_zeros_batch(ens.paths)
    coarse_counts = count_zeros_batch(ens.paths[:, ::2])
    np.testing.assert_allclose(fine.nodes[::2], warped_uniform_grid(w, 5.0, 50).nodes, rtol=1e-12, atol=1e-15)
    se_mean = fine_counts.std(ddof=1) / math.sqrt(fine_counts.size)
    assert abs(fine_counts.mean() - coarse_counts.mean()) < se_mean


def test_write_ensemble(tmp_path, se):
    g = uniform_trapezoid(0, 1, 5)
    ens = sample_paths(se, Warping.identity(), g, 3, seed=0)
    path = write_ensemble(ens, tmp_path)
    rows = open(path).read().strip().splitlines()
    assert len(rows) == 4 and rows[0].split(",") == ["t0", "t1", "t2", "t3", "t4"]
    np.testing.assert_array_equal(np.loadtxt(path, delimiter=",", skiprows=1), ens.paths)
    meta = json.loads((tmp_path / "paths.json").read_text())
    assert meta["seed"] == 0 and meta["kernel"]["family"] == "SquaredExponential"
    assert meta["grid"]["nodes"] == g.nodes.tolist()
