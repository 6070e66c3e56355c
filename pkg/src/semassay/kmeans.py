"""Seeded K-means over sparse rows: Lloyd iterations, k-means++ init, elbow pick.

Distances are squared Euclidean.  All randomness flows through
``np.random.default_rng(seed)``, so a fixed seed gives bit-identical models
within one build.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

__all__ = ["KMeansModel", "fit", "assign", "inertia_curve", "elbow_select"]


@dataclass(frozen=True)
class KMeansModel:
    """Fitted model: dense centroids plus fit bookkeeping.

    ``inertia`` is the sum of squared distances of the training points to
    their assigned centroid under the returned assignment; the returned
    centroids are exactly the means of those assignments.
    ``inertia_history`` logs the objective at each Lloyd assignment step and
    is non-increasing (up to 1e-9 numeric slack).
    """

    k: int
    centroids: np.ndarray
    seed: int
    n_iter: int
    inertia: float
    inertia_history: tuple[float, ...]
    labels: tuple[int, ...]

    @property
    def dim(self) -> int:
        return int(self.centroids.shape[1])

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "dim": self.dim,
            "centroids": self.centroids.tolist(),
            "seed": self.seed,
            "n_iter": self.n_iter,
            "inertia": self.inertia,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "KMeansModel":
        centroids = np.asarray(payload["centroids"], dtype=np.float64)
        return cls(
            k=int(payload["k"]),
            centroids=centroids.reshape(int(payload["k"]), int(payload["dim"])),
            seed=int(payload["seed"]),
            n_iter=int(payload["n_iter"]),
            inertia=float(payload["inertia"]),
            inertia_history=(),
            labels=(),
        )


def _as_matrix(vectors) -> sparse.csr_matrix:
    """Stack input vectors into one CSR matrix, enforcing a shared dim."""
    if sparse.issparse(vectors):
        return sparse.csr_matrix(vectors, dtype=np.float64)
    if isinstance(vectors, np.ndarray):
        if vectors.ndim != 2:
            raise ValueError("expected a 2-D array of row vectors")
        return sparse.csr_matrix(vectors.astype(np.float64, copy=False))
    rows = []
    dim = None
    for v in vectors:
        row = v if sparse.issparse(v) else sparse.csr_matrix(np.atleast_2d(v))
        if row.shape[0] != 1:
            raise ValueError("each vector must be a single row")
        if dim is None:
            dim = row.shape[1]
        elif row.shape[1] != dim:
            raise ValueError(f"mixed vector dims: {dim} vs {row.shape[1]}")
        rows.append(sparse.csr_matrix(row, dtype=np.float64))
    if not rows:
        raise ValueError("no vectors given")
    return sparse.csr_matrix(sparse.vstack(rows))


def _sq_distances(x: sparse.csr_matrix, x_sq: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance of every row of x to every centroid."""
    cross = x @ centroids.T
    cross = np.asarray(cross)
    c_sq = np.einsum("ij,ij->i", centroids, centroids)
    return np.maximum(x_sq[:, None] - 2.0 * cross + c_sq[None, :], 0.0)


def _plus_plus_init(
    x: sparse.csr_matrix, x_sq: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k-means++ seeding: D^2-weighted draws from the data rows.

    Keeps a running min distance to the chosen set, so seeding costs
    O(n k) distance evaluations total.
    """
    n = x.shape[0]
    chosen = {int(rng.integers(n))}
    center = np.asarray(x[next(iter(chosen))].todense(), dtype=np.float64).reshape(1, -1)
    centers = [center[0]]
    min_d2 = _sq_distances(x, x_sq, center)[:, 0]
    for _ in range(1, k):
        total = float(min_d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=min_d2 / total))
        else:
            # all points coincide with chosen centers; take an unused row
            unused = [i for i in range(n) if i not in chosen]
            idx = unused[int(rng.integers(len(unused)))] if unused else int(rng.integers(n))
        chosen.add(idx)
        center = np.asarray(x[idx].todense(), dtype=np.float64).reshape(1, -1)
        centers.append(center[0])
        min_d2 = np.minimum(min_d2, _sq_distances(x, x_sq, center)[:, 0])
    return np.asarray(centers, dtype=np.float64)


def _lloyd(
    x: sparse.csr_matrix, k: int, seed: int, max_iter: int, tol: float
) -> tuple[np.ndarray, np.ndarray, int, list[float]]:
    n = x.shape[0]
    x_sq = np.asarray(x.multiply(x).sum(axis=1)).ravel()
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(x, x_sq, k, rng)
    labels = np.zeros(n, dtype=np.int64)
    history: list[float] = []
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        d2 = _sq_distances(x, x_sq, centroids)
        labels = d2.argmin(axis=1)  # argmin takes the lowest index on ties
        assigned_d2 = d2[np.arange(n), labels]
        history.append(float(assigned_d2.sum()))
        # repair empty clusters: hand each the farthest point from a donor
        # cluster that keeps >= 2 members, so no donor is emptied in turn
        sizes = np.bincount(labels, minlength=k)
        movable = np.ones(n, dtype=bool)
        for empty in np.flatnonzero(sizes == 0):
            eligible = movable & (sizes[labels] >= 2)
            candidates = np.flatnonzero(eligible)
            farthest = candidates[int(assigned_d2[candidates].argmax())]
            sizes[labels[farthest]] -= 1
            labels[farthest] = empty
            sizes[empty] += 1
            movable[farthest] = False
        counts = np.bincount(labels, minlength=k).astype(np.float64)
        # sum rows per cluster via a sparse indicator, then divide by size
        indicator = sparse.csr_matrix(
            (np.ones(n), (labels, np.arange(n))), shape=(k, n)
        )
        new_centroids = np.asarray((indicator @ x).todense()) / counts[:, None]
        shift = float(np.linalg.norm(new_centroids - centroids, axis=1).sum())
        centroids = new_centroids
        if shift < tol:
            break
    return centroids, labels, n_iter, history


def fit(
    vectors,
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-4,
    restarts: int = 1,
) -> KMeansModel:
    """Fit K-means with k-means++ seeding and Lloyd iterations.

    ``restarts`` independent runs use seeds seed, seed+1, ...; the lowest
    final inertia wins (ties keep the earliest run).
    """
    x = _as_matrix(vectors)
    n = x.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k = {k} exceeds number of vectors {n}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    x_sq = np.asarray(x.multiply(x).sum(axis=1)).ravel()
    best: KMeansModel | None = None
    for run in range(restarts):
        run_seed = seed + run
        centroids, labels, n_iter, history = _lloyd(x, k, run_seed, max_iter, tol)
        final = float(_sq_distances(x, x_sq, centroids)[np.arange(n), labels].sum())
        model = KMeansModel(
            k=k,
            centroids=centroids,
            seed=run_seed,
            n_iter=n_iter,
            inertia=final,
            inertia_history=tuple(history),
            labels=tuple(int(v) for v in labels),
        )
        if best is None or model.inertia < best.inertia:
            best = model
    assert best is not None
    return best


def assign(model: KMeansModel, vector) -> int:
    """Index of the nearest centroid (squared Euclidean; ties -> lowest)."""
    row = vector if sparse.issparse(vector) else sparse.csr_matrix(np.atleast_2d(vector))
    if row.shape != (1, model.dim):
        raise ValueError(f"vector dim {row.shape} does not match centroid dim {model.dim}")
    row = sparse.csr_matrix(row, dtype=np.float64)
    x_sq = np.asarray(row.multiply(row).sum(axis=1)).ravel()
    d2 = _sq_distances(row, x_sq, model.centroids)
    return int(d2[0].argmin())


def assign_many(model: KMeansModel, vectors) -> np.ndarray:
    """Vectorized ``assign`` over rows; same tie rule."""
    x = _as_matrix(vectors)
    if x.shape[1] != model.dim:
        raise ValueError(f"vector dim {x.shape[1]} does not match centroid dim {model.dim}")
    x_sq = np.asarray(x.multiply(x).sum(axis=1)).ravel()
    return _sq_distances(x, x_sq, model.centroids).argmin(axis=1)


def inertia_curve(
    vectors,
    k_grid: Sequence[int],
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-4,
    restarts: int = 1,
) -> list[tuple[int, float]]:
    """Best-of-``restarts`` fit per k (same seed each time), paired with its
    final inertia. Restarts smooth out single-init local optima that would
    otherwise distort knee selection."""
    x = _as_matrix(vectors)
    return [
        (int(k), fit(x, int(k), seed, max_iter, tol, restarts).inertia) for k in k_grid
    ]


def elbow_select(curve: Sequence[tuple[int, float]]) -> int:
    """Knee of an inertia curve: the interior grid point farthest from the
    chord joining the curve's endpoints; ties pick the smaller k.
    """
    if len(curve) < 3:
        raise ValueError("elbow selection needs at least 3 curve points")
    ks = [float(k) for k, _ in curve]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("curve k values must be strictly ascending")
    x1, y1 = float(curve[0][0]), float(curve[0][1])
    x2, y2 = float(curve[-1][0]), float(curve[-1][1])
    best_k = None
    best_dist = -1.0
    for k, inertia in curve[1:-1]:
        # |cross product| is proportional to distance from the chord
        dist = abs((x2 - x1) * (y1 - float(inertia)) - (x1 - float(k)) * (y2 - y1))
        if dist > best_dist:
            best_dist = dist
            best_k = int(k)
    assert best_k is not None
    return best_k
