from itertools import product

import numpy as np
import pandas as pd
import pytest

from SvcjRolling.clustering import (PointSet, _lloyd, _transfer, _update,
                                    elbow_from_curve, elbow_select, kmeans,
                                    overlay_labels, pair_cluster, zscore)
from SvcjRolling.data_io import PriceSeries
from SvcjRolling.errors import (DegenerateDimensionError, EmptySeriesError,
                                TooFewPointsError, UnknownParameterError)


def _partition(labels):
    """Labels renumbered by first appearance, so partitions compare directly."""
    order = {}
    return [order.setdefault(label, len(order)) for label in labels]


def _brute_force_wcss(points, k):
    best = np.inf
    for rest in product(range(k), repeat=len(points) - 1):
        labels = np.array((0,) + rest)
        if len(set(labels)) < k:
            continue
        wcss = sum(((points[labels == c] - points[labels == c].mean(axis=0)) ** 2).sum()
                   for c in range(k))
        best = min(best, wcss)
    return best


def _blobs(centers, seed, n=30, sd=1.0):
    rng = np.random.default_rng(seed)
    return np.vstack([rng.normal(center, sd, size=(n, 2)) for center in centers])


def test_zscore_example():
    # Act
    scaled, scaling = zscore(PointSet([[0.0, 0.0], [2.0, 2.0]]))

    # Assert
    np.testing.assert_array_equal(scaled.points, [[-1.0, -1.0], [1.0, 1.0]])
    assert scaling == ((1.0, 1.0), (1.0, 1.0))


def test_zscore_leaves_standardized_data_unchanged():
    # Arrange
    x = np.random.default_rng(0).normal(size=(50, 2))
    x = (x - x.mean(axis=0)) / x.std(axis=0)

    # Act
    scaled, _ = zscore(PointSet(x))

    # Assert
    np.testing.assert_allclose(scaled.points, x, atol=1e-12)


def test_zscore_constant_dimension():
    # Act & Assert
    with pytest.raises(DegenerateDimensionError, match="beta"):
        zscore(PointSet([[0.0, 1.0], [2.0, 1.0]], dim_names=("mu", "beta")))


def test_kmeans_single_point():
    # Act
    result = kmeans([[3.0, 4.0]], 1, restarts=3)

    # Assert
    np.testing.assert_array_equal(result.centroids, [[3.0, 4.0]])
    assert result.wcss == 0.0
    assert list(result.labels) == [0]


def test_kmeans_separated_pairs():
    # Act
    result = kmeans([[0, 0], [0.1, 0], [10, 10], [10.1, 10]], 2, restarts=10, seed=1)

    # Assert
    assert _partition(result.labels) == [0, 0, 1, 1]


def test_kmeans_matches_exhaustive_optimum():
    # Arrange
    rng = np.random.default_rng(42)

    for instance in range(100):
        points = rng.normal(size=(8, 2))

        # Act
        result = kmeans(points, 2, restarts=50, seed=instance)

        # Assert
        assert result.wcss == pytest.approx(_brute_force_wcss(points, 2), rel=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_kmeans_small_sets_are_optimal(k):
    # Arrange
    points = np.random.default_rng(k).uniform(size=(7, 2))

    # Act
    result = kmeans(points, k, restarts=50, seed=0)

    # Assert
    assert result.wcss == pytest.approx(_brute_force_wcss(points, k), rel=1e-9)


def test_kmeans_result_invariants():
    # Arrange
    points = _blobs([(0, 0), (8, 0), (4, 7)], seed=3)

    # Act
    result = kmeans(points, 4, restarts=20, seed=5)

    # Assert
    assert set(result.labels) <= set(range(4))
    recomputed = ((points - result.centroids[result.labels]) ** 2).sum()
    assert result.wcss == pytest.approx(recomputed, rel=1e-12)
    for c in range(4):
        np.testing.assert_allclose(result.centroids[c],
                                   points[result.labels == c].mean(axis=0), rtol=1e-12)


def test_kmeans_is_deterministic_and_independent_of_workers():
    # Arrange
    points = _blobs([(0, 0), (5, 5)], seed=8)

    # Act
    serial = kmeans(points, 3, restarts=12, seed=4)
    threaded = kmeans(points, 3, restarts=12, seed=4, workers=4)

    # Assert
    np.testing.assert_array_equal(serial.labels, threaded.labels)
    assert serial.wcss == threaded.wcss


def test_kmeans_rejects_k_above_distinct_points():
    # Act & Assert
    with pytest.raises(TooFewPointsError, match="distinct"):
        kmeans([[1, 1], [1, 1], [2, 2]], 3)


def test_update_reseeds_empty_cluster():
    # Arrange
    x = np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [9.0, 0.0]])

    # Act
    centroids, labels = _update(x, np.zeros(4, dtype=int), 2)

    # Assert
    assert labels[3] == 1
    np.testing.assert_allclose(centroids[1], [9.0, 0.0])
    np.testing.assert_allclose(centroids[0], [0.1, 0.0])


@pytest.mark.parametrize("seed", range(10))
def test_lloyd_wcss_never_increases(seed):
    # Arrange
    points = _blobs([(0, 0), (3, 1), (1, 4)], seed=seed, n=20, sd=1.5)
    trace = []

    # Act
    _, _, wcss, _ = _lloyd(points, 4, np.random.default_rng(seed), 300, trace=trace)

    # Assert
    assert len(trace) >= 1
    assert all(b <= a * (1 + 1e-12) for a, b in zip(trace, trace[1:]))
    assert wcss == pytest.approx(trace[-1], rel=1e-12)


def test_transfer_leaves_a_lloyd_fixed_point():
    # Arrange
    x = np.array([[0.0], [2.0], [3.0], [5.0]])
    # {0, 2} | {3, 5} is a Lloyd fixed point with wcss 4; {0} | {2, 3, 5} has 14/3
    # and {0, 2, 3} | {5} has 14/3 too, so no single transfer improves it
    labels = np.array([0, 0, 1, 1])

    # Act
    centroids, moved = _transfer(x, labels, 2)

    # Assert
    np.testing.assert_array_equal(moved, labels)
    np.testing.assert_allclose(centroids, [[1.0], [4.0]])


def test_transfer_improves_a_poor_partition():
    # Arrange
    x = np.array([[0.0], [1.0], [10.0], [11.0], [12.0]])
    labels = np.array([0, 0, 0, 1, 1])

    # Act
    centroids, moved = _transfer(x, labels, 2)

    # Assert
    assert _partition(moved) == [0, 0, 1, 1, 1]
    np.testing.assert_allclose(sorted(centroids[:, 0]), [0.5, 11.0])


def test_elbow_from_curve_prefers_smaller_k_on_ties():
    # Act & Assert
    assert elbow_from_curve([10.0, 5.0, 1.0, 0.0]) == 3
    assert elbow_from_curve([9.0, 4.0, 1.0, 0.0]) == 2
    with pytest.raises(ValueError):
        elbow_from_curve([2.0, 1.0])


@pytest.mark.parametrize("seed", range(20))
def test_elbow_finds_three_blobs(seed):
    # Arrange
    side = 20.0
    centers = [(0, 0), (side, 0), (side / 2, side * np.sqrt(3) / 2)]
    scaled, _ = zscore(PointSet(_blobs(centers, seed)))

    # Act
    k_star, curve = elbow_select(scaled, k_max=8, restarts=10, seed=seed)

    # Assert
    assert k_star == 3
    assert len(curve) == 8


@pytest.mark.parametrize("seed", range(20))
def test_elbow_finds_two_blobs(seed):
    # Arrange
    scaled, _ = zscore(PointSet(_blobs([(0, 0), (20, 0)], seed)))

    # Act
    k_star, _ = elbow_select(scaled, k_max=8, restarts=10, seed=seed)

    # Assert
    assert k_star == 2


def test_pair_cluster_three_regimes(make_series):
    # Arrange
    rng = np.random.default_rng(0)
    rows = [{"mu": m + rng.normal(0, 0.02), "beta": b + rng.normal(0, 0.02)}
            for m, b in [(0.0, 0.0)] * 40 + [(0.6, 0.0)] * 40 + [(0.3, 0.52)] * 40]
    series = make_series(rows[:60] + [None] + rows[60:])

    # Act
    result = pair_cluster(series, "mu", "beta", restarts=10)

    # Assert
    assert result.k == 3
    assert len(result.labels) == 120
    assert result.wcss_curve and len(result.wcss_curve) == 8
    assert series.dates[60] not in result.dates
    assert _partition(result.labels) == [0] * 40 + [1] * 40 + [2] * 40
    centroids = result.centroids_frame()
    assert sorted(centroids["mu"].round(1)) == [0.0, 0.3, 0.6]


def test_pair_cluster_partition_is_scale_invariant(make_series):
    # Arrange
    rng = np.random.default_rng(1)
    mu = rng.normal(size=60)
    beta = rng.normal(size=60)
    original = make_series([{"mu": m, "beta": b} for m, b in zip(mu, beta)])
    rescaled = make_series([{"mu": 50 * m - 3, "beta": b} for m, b in zip(mu, beta)])

    # Act
    first = pair_cluster(original, "mu", "beta", k=3, restarts=20, seed=2)
    second = pair_cluster(rescaled, "mu", "beta", k=3, restarts=20, seed=2)

    # Assert
    assert _partition(first.labels) == _partition(second.labels)
    assert first.wcss == pytest.approx(second.wcss, rel=1e-9)


def test_pair_cluster_identical_rows(make_series):
    # Arrange
    series = make_series([{"mu": 0.5, "beta": 0.2}] * 5)

    # Act
    result = pair_cluster(series, "mu", "beta")

    # Assert
    assert result.k == 1
    assert list(result.labels) == [0] * 5
    assert result.wcss == 0.0
    np.testing.assert_allclose(result.unscaled_centroids(), [[0.5, 0.2]])


def test_pair_cluster_two_distinct_points(make_series):
    # Arrange
    series = make_series([{"mu": 0.0, "beta": 0.0}, {"mu": 1.0, "beta": 1.0}] * 3)

    # Act
    result = pair_cluster(series, "mu", "beta")

    # Assert
    assert result.k == 2
    assert _partition(result.labels) == [0, 1] * 3


def test_pair_cluster_errors(make_series):
    # Act & Assert
    with pytest.raises(UnknownParameterError, match="gamma"):
        pair_cluster(make_series([{}]), "mu", "gamma")
    with pytest.raises(EmptySeriesError):
        pair_cluster(make_series([None, None]), "mu", "beta")


def test_overlay_labels_joins_prices_by_date(make_series):
    # Arrange
    series = make_series([{"mu": 0.0, "beta": 0.0}, {"mu": 0.0, "beta": 0.1},
                          {"mu": 5.0, "beta": 5.0}, {"mu": 5.0, "beta": 5.1}])
    result = pair_cluster(series, "mu", "beta", k=2, restarts=5)
    prices = PriceSeries(dates=pd.date_range("2020-12-30", periods=10, freq="D"),
                         prices=np.arange(1.0, 11.0))

    # Act
    overlay = overlay_labels(result, prices)

    # Assert
    assert list(overlay.columns) == ["price", "label"]
    assert list(overlay.index) == list(series.dates)
    assert list(overlay["price"]) == [3.0, 4.0, 5.0, 6.0]
    assert _partition(overlay["label"]) == [0, 0, 1, 1]
