"""
k-means clustering of parameter pairs with elbow selection of k.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from .data_io import PARAM_COLUMNS, PriceSeries
from .errors import (DegenerateDimensionError, EmptySeriesError,
                     NonFiniteInputError, TooFewPointsError,
                     UnknownParameterError)
from .settings import ELBOW_K_MAX, KMEANS_MAX_ITER, KMEANS_RESTARTS
from .utils import distinct_rows, spawn_streams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray
    dates: Optional[pd.DatetimeIndex] = None
    dim_names: tuple = ()

    def __post_init__(self):
        points = np.array(self.points, dtype=float, ndmin=2)
        if points.ndim != 2:
            raise ValueError(f"points must be two-dimensional, got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise NonFiniteInputError("points contain non-finite coordinates")
        if self.dates is not None and len(self.dates) != len(points):
            raise ValueError(f"{len(self.dates)} dates for {len(points)} points")
        names = tuple(self.dim_names) or tuple(f"x{i}" for i in range(points.shape[1]))
        if len(names) != points.shape[1]:
            raise ValueError(f"{len(names)} names for {points.shape[1]} dimensions")
        points.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "dim_names", names)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class ClusterResult:
    k: int
    # centroids in scaled space, one row per label
    centroids: np.ndarray
    labels: np.ndarray
    wcss: float
    # per dimension (mean, sd); None when the points were not scaled
    scaling: Optional[tuple] = None
    dates: Optional[pd.DatetimeIndex] = None
    dim_names: tuple = ()
    n_iter: int = 0
    wcss_curve: tuple = ()

    def unscaled_centroids(self) -> np.ndarray:
        if self.scaling is None:
            return np.array(self.centroids)
        means = np.array([mean for mean, _ in self.scaling])
        sds = np.array([sd for _, sd in self.scaling])
        return means + sds * self.centroids

    def labels_frame(self) -> pd.DataFrame:
        if self.dates is not None:
            index = pd.Index(self.dates, name="date")
        else:
            index = pd.RangeIndex(len(self.labels), name="point")
        return pd.DataFrame({"label": np.asarray(self.labels, dtype=int)},
                            index=index)

    def centroids_frame(self) -> pd.DataFrame:
        """Centroids in the original units, then in scaled units."""
        frame = pd.DataFrame(self.unscaled_centroids(), columns=list(self.dim_names),
                             index=pd.RangeIndex(self.k, name="label"))
        for i, name in enumerate(self.dim_names):
            frame[f"{name}_scaled"] = self.centroids[:, i]
        return frame


def zscore(points: PointSet) -> tuple:
    """
    Standardize every dimension with its mean and population sd.

    Returns:
        (scaled PointSet, ((mean, sd) per dimension))

    Raises:
        DegenerateDimensionError: A dimension is constant.
    """
    x = points.points
    means = x.mean(axis=0)
    sds = x.std(axis=0)
    for name, sd in zip(points.dim_names, sds):
        if sd == 0:
            raise DegenerateDimensionError(
                f"dimension {name!r} is constant and cannot be scaled")
    scaled = PointSet((x - means) / sds, dates=points.dates,
                      dim_names=points.dim_names)
    return scaled, tuple((float(m), float(s)) for m, s in zip(means, sds))


def _assign(x, centroids):
    # argmin keeps the first minimum, so ties go to the lowest index
    return cdist(x, centroids, "sqeuclidean").argmin(axis=1)


def _means(x, labels, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        return sums / counts[:, None], counts


def _update(x, labels, k):
    """Recompute centroids, moving the farthest point into each empty cluster."""
    labels = labels.copy()
    centroids, counts = _means(x, labels, k)
    for empty in np.flatnonzero(counts == 0):
        distance = ((x - centroids[labels]) ** 2).sum(axis=1)
        distance[counts[labels] <= 1] = -1.0
        farthest = int(np.argmax(distance))
        logger.debug("reseeding empty cluster %d with point %d", empty, farthest)
        labels[farthest] = empty
        centroids, counts = _means(x, labels, k)
    return centroids, labels


def _kmeans_plus_plus(x, k, rng):
    chosen = [int(rng.integers(len(x)))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        index = int(rng.choice(len(x), p=d2 / d2.sum()))
        chosen.append(index)
        d2 = np.minimum(d2, ((x - x[index]) ** 2).sum(axis=1))
    return x[chosen]


def _wcss(x, centroids, labels):
    return float(((x - centroids[labels]) ** 2).sum())


def _transfer(x, labels, k, trace=None):
    """
    Single-point transfers after Lloyd has converged.

    A point leaves a cluster of two or more members when the move strictly
    lowers the wcss; points are visited in index order and the best target
    is the lowest cluster index among equals.
    """
    labels = labels.copy()
    centroids, counts = _means(x, labels, k)
    moved = True
    while moved:
        moved = False
        for i in range(len(x)):
            a = labels[i]
            if counts[a] <= 1:
                continue
            d2 = ((centroids - x[i]) ** 2).sum(axis=1)
            cost = counts / (counts + 1.0) * d2
            cost[a] = counts[a] / (counts[a] - 1.0) * d2[a]
            b = int(np.argmin(cost))
            if b == a or not cost[b] < cost[a] * (1.0 - 1e-12):
                continue
            labels[i] = b
            centroids, counts = _means(x, labels, k)
            moved = True
            if trace is not None:
                trace.append(_wcss(x, centroids, labels))
    return centroids, labels


def _lloyd(x, k, rng, max_iter, trace=None):
    """One restart; `trace` collects the wcss after every centroid update."""
    labels = _assign(x, _kmeans_plus_plus(x, k, rng))
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        centroids, labels = _update(x, labels, k)
        if trace is not None:
            trace.append(_wcss(x, centroids, labels))
        new_labels = _assign(x, centroids)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    else:
        centroids, labels = _update(x, labels, k)
        if trace is not None:
            trace.append(_wcss(x, centroids, labels))
    centroids, labels = _transfer(x, labels, k, trace)
    return centroids, labels, _wcss(x, centroids, labels), n_iter


def kmeans(points, k: int, restarts: int = KMEANS_RESTARTS, seed: int = 0,
           workers: int = 1, max_iter: int = KMEANS_MAX_ITER) -> ClusterResult:
    """
    Lloyd's algorithm from k-means++ starts, refined by single-point
    transfers, keeping the best restart.

    Restart r draws from its own generator spawned from `seed`, so the
    result does not depend on `workers`. Among equal wcss the lowest
    restart index wins.

    Args:
        points: PointSet or (n, d) array.
        k: Number of clusters.
        restarts: Independent initializations.
        seed: Base seed.
        workers: Threads running restarts.
        max_iter: Iteration cap per restart.

    Raises:
        TooFewPointsError: k exceeds the number of distinct points.
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    if k < 1 or restarts < 1:
        raise ValueError(f"k and restarts must be >= 1, got k={k}, restarts={restarts}")
    distinct = distinct_rows(points.points)
    if k > distinct:
        raise TooFewPointsError(
            f"k={k} exceeds the number of distinct points ({distinct})")

    x = np.asarray(points.points)
    streams = spawn_streams(seed, restarts)

    def run(stream):
        return _lloyd(x, k, np.random.default_rng(stream), max_iter)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, streams))
    else:
        runs = [run(stream) for stream in streams]

    best = min(range(restarts), key=lambda r: (runs[r][2], r))
    centroids, labels, wcss, n_iter = runs[best]
    logger.debug("k=%d: best restart %d of %d, wcss %.6g after %d iterations",
                 k, best, restarts, wcss, n_iter)
    return ClusterResult(k=k, centroids=centroids, labels=labels, wcss=wcss,
                         dates=points.dates, dim_names=points.dim_names,
                         n_iter=n_iter)


def elbow_from_curve(wcss_curve) -> int:
    """
    k with the largest second difference of wcss, over the interior ks.

    `wcss_curve[i]` is the wcss for k = i + 1. Ties go to the smaller k.
    """
    curve = np.asarray(wcss_curve, dtype=float)
    if len(curve) < 3:
        raise ValueError(f"elbow needs wcss for k = 1..3 at least, got {len(curve)}")
    second = curve[:-2] - 2 * curve[1:-1] + curve[2:]
    return int(np.argmax(second)) + 2


def elbow_select(points, k_max: int = ELBOW_K_MAX,
                 restarts: int = KMEANS_RESTARTS, seed: int = 0,
                 workers: int = 1) -> tuple:
    """
    Run kmeans for k = 1..k_max and pick k by the elbow rule.

    Returns:
        (k_star, wcss curve as a tuple)
    """
    if k_max < 3:
        raise ValueError(f"k_max must be >= 3, got {k_max}")
    curve = tuple(kmeans(points, k, restarts=restarts, seed=seed,
                         workers=workers).wcss for k in range(1, k_max + 1))
    k_star = elbow_from_curve(curve)
    logger.info("Elbow selected k=%d over k=1..%d", k_star, k_max)
    return k_star, curve


def _pair_points(series, dim_a, dim_b) -> PointSet:
    for name in (dim_a, dim_b):
        if name not in PARAM_COLUMNS:
            raise UnknownParameterError(f"unknown parameter {name!r}")
    frame = series.to_frame()[[dim_a, dim_b]].dropna()
    if frame.empty:
        raise EmptySeriesError("no estimated rows to cluster")
    return PointSet(frame.to_numpy(), dates=pd.DatetimeIndex(frame.index, name="date"),
                    dim_names=(dim_a, dim_b))


def pair_cluster(series, dim_a: str, dim_b: str, k: Optional[int] = None,
                 k_max: int = ELBOW_K_MAX,
                 restarts: int = KMEANS_RESTARTS, seed: int = 0,
                 workers: int = 1) -> ClusterResult:
    """
    Cluster the posterior means of two parameters, labels keyed by date.

    Missing rows are dropped and both dimensions z-scored. Without `k`,
    k comes from elbow_select over k = 1..min(k_max, distinct points); with
    fewer than 3 distinct points k is the distinct count.

    Raises:
        UnknownParameterError: A name is not a parameter column.
        EmptySeriesError: No row left after dropping missing ones.
        TooFewPointsError: `k` exceeds the distinct points.
    """
    points = _pair_points(series, dim_a, dim_b)
    distinct = distinct_rows(points.points)

    if distinct == 1:
        if k not in (None, 1):
            raise TooFewPointsError(f"k={k} exceeds the number of distinct points (1)")
        logger.warning("All %d points are identical, using k=1", len(points))
        first = points.points[0]
        return ClusterResult(
            k=1, centroids=np.zeros((1, 2)), labels=np.zeros(len(points), dtype=int),
            wcss=0.0, scaling=((float(first[0]), 0.0), (float(first[1]), 0.0)),
            dates=points.dates, dim_names=points.dim_names)

    scaled, scaling = zscore(points)
    curve = ()
    if k is None:
        if distinct < 3:
            k = distinct
            logger.warning("Only %d distinct points, using k=%d", distinct, k)
        else:
            k, curve = elbow_select(scaled, min(k_max, distinct),
                                    restarts=restarts, seed=seed, workers=workers)

    result = kmeans(scaled, k, restarts=restarts, seed=seed, workers=workers)
    logger.info("Clustered %d points on (%s, %s) into %d clusters, wcss %.6g",
                len(points), dim_a, dim_b, k, result.wcss)
    return replace(result, scaling=scaling, wcss_curve=curve)


def overlay_labels(result: ClusterResult, prices: PriceSeries) -> pd.DataFrame:
    """Prices on the labelled dates, as columns `price,label` indexed by date."""
    if result.dates is None:
        raise ValueError("cluster result has no dates to overlay")
    frame = prices.to_frame().join(result.labels_frame(), how="inner")
    if frame.empty:
        logger.warning("No price date matches a labelled date")
    return frame
