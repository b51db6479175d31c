"""Seeded Lloyd k-means with k-means++ init, plus a k-scan report.

Cluster count selection stays a human/config decision; scan_k only emits
the evidence (inertia and silhouette per k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class KMeansResult:
    assignments: np.ndarray  # (n,) int cluster ids
    centroids: np.ndarray  # (k, d)
    inertia: float
    inertia_history: list[float]  # one entry per assignment pass, non-increasing
    n_iter: int


@dataclass(frozen=True)
class KScanRow:
    k: int
    inertia: float
    silhouette: float


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x - c||^2 via expansion; clip tiny negatives from cancellation.
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = points[first]
    d2 = _sq_dists(points, centroids[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # All remaining points coincide with chosen centroids.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[j] = points[idx]
        d2 = np.minimum(d2, _sq_dists(points, centroids[j : j + 1]).ravel())
    return centroids


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> KMeansResult:
    """Cluster points into k groups; deterministic for a fixed seed.

    Stops when the largest centroid shift drops below tol or after
    max_iter passes. An emptied cluster is repaired by moving its centroid
    onto the point currently farthest from its assigned centroid.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    n = points.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    if k < 1 or max_iter < 1 or tol < 0:
        raise ValueError("k and max_iter must be >= 1, tol >= 0")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp(points, k, rng)
    history: list[float] = []
    assignments = np.zeros(n, dtype=np.int64)
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        d2 = _sq_dists(points, centroids)
        assignments = d2.argmin(axis=1)
        point_cost = d2[np.arange(n), assignments]
        history.append(float(point_cost.sum()))

        new_centroids = centroids.copy()
        sizes = np.bincount(assignments, minlength=k)
        for j in range(k):
            if sizes[j] > 0:
                new_centroids[j] = points[assignments == j].mean(axis=0)
        empty = [j for j in range(k) if sizes[j] == 0]
        if empty:
            stolen: set[int] = set()
            order = np.argsort(-point_cost, kind="stable")
            for j in empty:
                for idx in order:
                    idx = int(idx)
                    if idx in stolen or sizes[assignments[idx]] < 2:
                        continue
                    new_centroids[j] = points[idx]
                    sizes[assignments[idx]] -= 1
                    stolen.add(idx)
                    break

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break

    # Final pass so assignments and inertia match the returned centroids.
    d2 = _sq_dists(points, centroids)
    assignments = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), assignments].sum())
    history.append(inertia)
    return KMeansResult(
        assignments=assignments,
        centroids=centroids,
        inertia=inertia,
        inertia_history=history,
        n_iter=n_iter,
    )


def silhouette(points: np.ndarray, assignments: np.ndarray) -> float:
    """Mean silhouette coefficient (euclidean); singleton clusters score 0."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(assignments)
    uniq = np.unique(labels)
    if uniq.size < 2:
        return 0.0
    dists = np.sqrt(_sq_dists(points, points))
    scores = np.zeros(points.shape[0])
    for i in range(points.shape[0]):
        own = labels == labels[i]
        own_size = own.sum()
        if own_size < 2:
            scores[i] = 0.0
            continue
        a = dists[i, own].sum() / (own_size - 1)
        b = min(dists[i, labels == other].mean() for other in uniq if other != labels[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def scan_k(
    points: np.ndarray,
    k_range: tuple[int, int],
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
    n_init: int = 5,
) -> list[KScanRow]:
    """Inertia + silhouette for each k in the inclusive range.

    Each k takes the best of n_init seeded restarts (seed, seed+1, ...),
    which keeps the per-k inertia comparable across k. No k is selected
    here; selection is a config input.
    """
    points = np.asarray(points, dtype=np.float64)
    lo, hi = k_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad k range {k_range}")
    if points.shape[0] <= hi:
        raise ValueError(f"need more than {hi} points, got {points.shape[0]}")
    rows: list[KScanRow] = []
    for k in range(lo, hi + 1):
        best: KMeansResult | None = None
        for restart in range(n_init):
            result = kmeans(points, k, seed=seed + restart, max_iter=max_iter, tol=tol)
            if best is None or result.inertia < best.inertia:
                best = result
        assert best is not None
        rows.append(KScanRow(k=k, inertia=best.inertia, silhouette=silhouette(points, best.assignments)))
    return rows
