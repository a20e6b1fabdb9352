import numpy as np
import pytest

from dopolab.errors import InsufficientDataError
from dopolab.observables.stats import GroupedMoments, ensemble_variance, group_ids, jackknife, linear_fit


def test_jackknife_of_identical_estimates_has_no_error():
    mean, err = jackknife(np.full((8, 3), 2.5))
    assert np.allclose(mean, 2.5)
    assert np.allclose(err, 0.0)
    with pytest.raises(InsufficientDataError):
        jackknife(np.ones((1, 3)))


def test_jackknife_of_group_means_matches_standard_error():
    # delete-one means of n points give exactly the textbook standard error of the mean
    x = np.random.default_rng(0).normal(size=50)
    loo = (x.sum() - x) / (x.size - 1)
    _, err = jackknife(loo)
    assert err == pytest.approx(x.std(ddof=1) / np.sqrt(x.size))


def test_ensemble_variance_matches_numpy():
    rng = np.random.default_rng(1)
    theta = rng.normal(scale=[[1.0], [2.0], [3.0]], size=(3, 2000))
    result = ensemble_variance(theta, np.arange(3.0), n_groups=16)
    assert np.allclose(result.variance, theta.var(axis=1, ddof=1))
    assert np.allclose(result.mean, theta.mean(axis=1))
    assert result.n_trajectories == 2000
    assert np.all(result.stderr_variance > 0)
    assert result.variance[2] == pytest.approx(9.0, rel=0.1)


def test_blocks_merge_to_the_whole():
    rng = np.random.default_rng(2)
    values = rng.normal(size=(4, 90))
    indices = np.arange(90)
    whole = GroupedMoments(4, n_groups=8)
    whole.add(values, group_ids(indices, 8))
    merged = GroupedMoments(4, n_groups=8)
    for block in (slice(60, 90), slice(0, 30), slice(30, 60)):
        part = GroupedMoments(4, n_groups=8)
        part.add(values[:, block], group_ids(indices[block], 8))
        merged.merge(part)
    a = whole.stats(np.arange(4.0))
    b = merged.stats(np.arange(4.0))
    assert np.allclose(a.variance, b.variance)
    assert np.allclose(a.stderr_variance, b.stderr_variance)


def test_mask_drops_diverged_trajectories():
    theta = np.vstack([np.zeros(5), [1.0, 2.0, 3.0, 4.0, 1e9]])
    mask = np.array([True, True, True, True, False])
    result = ensemble_variance(theta, [0.0, 1.0], n_groups=2, mask=mask)
    assert result.n_trajectories == 4
    assert result.n_diverged == 1
    assert result.variance[1] == pytest.approx(np.var([1.0, 2.0, 3.0, 4.0], ddof=1))


def test_too_few_trajectories():
    moments = GroupedMoments(2, n_groups=4)
    moments.add(np.ones((2, 1)), np.array([0]))
    with pytest.raises(InsufficientDataError):
        moments.stats(np.arange(2.0))
    assert np.all(np.isnan(moments.stats(np.arange(2.0), strict=False).variance))


def test_normalized_variance_and_frame():
    theta = np.random.default_rng(3).normal(size=(3, 40))
    result = ensemble_variance(theta, [0.0, 0.5, 1.0], n_groups=4).normalized(0.5)
    assert result.meta["normalized_by"] == 0.5
    assert np.allclose(result.variance, 2.0 * theta.var(axis=1, ddof=1))
    assert list(result.to_frame().columns) == ["tau", "var_theta", "stderr"]


def test_linear_fit():
    x = np.linspace(0.0, 10.0, 21)
    fit = linear_fit(x, 1.5 * x + 0.25)
    assert fit.slope == pytest.approx(1.5)
    assert fit.intercept == pytest.approx(0.25)
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(InsufficientDataError):
        linear_fit([0.0, 1.0], [0.0, 1.0])
