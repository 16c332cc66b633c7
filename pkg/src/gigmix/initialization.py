"""K-means based initialization shared by all four mixture fitters.

A seeded 1-D k-means (k-means++ seeding, Lloyd iterations) splits the data
into three clusters sorted by center. The middle cluster seeds the Gaussian,
the outer ones seed the activation components through the method of moments
on (mirrored) cluster statistics, and an ordinary density-weighted e-step
with those parameters yields the initial responsibilities.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .distributions import GaussianParams, MixtureParams, mom_gamma, mom_invgamma

_VAR_FLOOR = 1e-6
_MAX_LLOYD_ITER = 100

# Fallback prior-style moments for a side cluster whose mirrored mean is not
# positive (e.g. no negative cluster in very sparse data).
_FALLBACK_MEAN = 10.0
_FALLBACK_VAR = 10.0


@dataclass
class KMeansResult:
    centers: np.ndarray
    assignments: np.ndarray
    cluster_means: np.ndarray
    cluster_vars: np.ndarray
    cluster_counts: np.ndarray


def _kmeanspp_seed(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty(k)
    centers[0] = x[rng.integers(x.size)]
    for j in range(1, k):
        d2 = np.min((x[:, None] - centers[None, :j]) ** 2, axis=1)
        total = d2.sum()
        if total > 0:
            centers[j] = x[rng.choice(x.size, p=d2 / total)]
        else:
            centers[j] = x[rng.integers(x.size)]
    return centers


def kmeans_1d(data, k: int = 3, seed: int = 0) -> KMeansResult:
    """Lloyd's algorithm on scalars with k-means++ seeding.

    Deterministic given ``seed``; clusters are returned sorted by center
    ascending. Degenerate all-equal data collapses to a single cluster
    duplicated ``k`` times with a floored variance.
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < k:
        raise ValueError(f"need at least k={k} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")

    if np.ptp(x) == 0.0:
        warnings.warn("k-means input is constant; duplicating a single cluster")
        v = float(x[0])
        assignments = np.full(x.size, k // 2, dtype=int)
        counts = np.zeros(k, dtype=int)
        counts[k // 2] = x.size
        return KMeansResult(
            centers=np.full(k, v),
            assignments=assignments,
            cluster_means=np.full(k, v),
            cluster_vars=np.full(k, _VAR_FLOOR),
            cluster_counts=counts,
        )

    rng = np.random.default_rng(seed)
    centers = _kmeanspp_seed(x, k, rng)
    assignments = np.full(x.size, -1, dtype=int)
    for _ in range(_MAX_LLOYD_ITER):
        new_assignments = np.argmin(np.abs(x[:, None] - centers[None, :]), axis=1)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for j in range(k):
            member = assignments == j
            if member.any():
                centers[j] = x[member].mean()
            else:
                # Reseed an empty cluster at the point farthest from its center.
                centers[j] = x[np.argmax(np.abs(x - centers[assignments]))]

    order = np.argsort(centers, kind="stable")
    centers = centers[order]
    remap = np.empty(k, dtype=int)
    remap[order] = np.arange(k)
    assignments = remap[assignments]

    means = np.empty(k)
    variances = np.empty(k)
    counts = np.zeros(k, dtype=int)
    for j in range(k):
        member = x[assignments == j]
        counts[j] = member.size
        if member.size:
            means[j] = member.mean()
            variances[j] = max(member.var(), _VAR_FLOOR)
        else:
            means[j] = centers[j]
            variances[j] = _VAR_FLOOR
    return KMeansResult(centers, assignments, means, variances, counts)


def _side_component(mean: float, variance: float, family):
    mom = mom_gamma if family.kind == "gamma" else mom_invgamma
    if mean > 0:
        return mom(mean, variance, sign=family.sign)
    return mom(_FALLBACK_MEAN, _FALLBACK_VAR, sign=family.sign)


def init_mixture(data, km: KMeansResult, families):
    """Map sorted clusters to mixture parameters and initial responsibilities.

    The highest-center cluster always becomes component 2 and the lowest
    component 3, with moments mirrored for the negative side. Returns the
    parameter point estimate together with the responsibilities of a density
    e-step under it.
    """
    from .ml_em import e_step

    pos_family, neg_family = families
    if pos_family.sign != 1 or neg_family.sign != -1:
        raise ValueError("families must be (positive-support, negative-support)")

    comp1 = GaussianParams(float(km.cluster_means[1]), 1.0 / float(km.cluster_vars[1]))
    comp2 = _side_component(float(km.cluster_means[2]), float(km.cluster_vars[2]), pos_family)
    comp3 = _side_component(-float(km.cluster_means[0]), float(km.cluster_vars[0]), neg_family)
    counts = km.cluster_counts.astype(float)
    pi = np.array([counts[1], counts[2], counts[0]]) / counts.sum()

    params = MixtureParams(pi, comp1, comp2, comp3)
    gamma = e_step(np.asarray(data, dtype=float).ravel(), params)
    return params, gamma
