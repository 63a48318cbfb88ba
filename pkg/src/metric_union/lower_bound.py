"""Distortion lower bound from a spectral split of a complete bipartite graph.

A uniform coin per cross edge splits K_{n,n} into two spanning subgraphs
whose Laplacians each sandwich half the full Laplacian within a factor
(1 + delta).  On the metric space that assigns distance 2 within sides and
1 / 3 across the two edge classes — whose sides are regular simplices, so
each side embeds isometrically — any Euclidean embedding must then distort
by at least 3/(1 + delta)^2.  ``delta_star`` is measured per sample from
the generalized eigenvalues of the (half-Laplacian, subgraph-Laplacian)
pencil, so every downstream claim is checkable without appeal to the
asymptotic behaviour of random graphs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (DuplicateEdge, InputError, RangeViolation,
                     RetryBudgetExceeded, SelfLoop, SingularPencil)
from .linalg import sym_eigen
from .metric import (FiniteMetricSpace, UnionPartition, _readonly,
                     build_partition, validate_metric)
from .seeds import stream

__all__ = [
    "BipartiteSplit", "laplacian", "sample_split", "measure_delta",
    "sandwich_margin", "build_123_metric", "certified_lower_bound",
    "ratio_check", "choose_n_for_epsilon",
]

_MAX_ATTEMPTS = 64
_DELTA_CUSHION = 1e-9


@dataclass(frozen=True)
class BipartiteSplit:
    """Edge partition of K_{n,n} with its measured sandwich parameter.

    Edges are (u, v) pairs of global vertex ids with u in [0, n) on side A
    and v in [n, 2n) on side B.  ``delta_star`` already includes a 1e-9
    cushion above the measured minimum.
    """

    n: int
    e1: np.ndarray
    e2: np.ndarray
    delta_star: float
    seed: int
    attempts: int


def laplacian(n_vertices: int, edges) -> np.ndarray:
    """Graph Laplacian: degrees on the diagonal, -1 per edge."""
    e = np.asarray(edges, dtype=np.intp).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n_vertices):
        raise InputError("edge endpoint out of range")
    loops = e[:, 0] == e[:, 1]
    if loops.any():
        raise SelfLoop(int(e[np.argmax(loops), 0]))
    key = np.sort(e, axis=1)
    order = np.lexsort((key[:, 1], key[:, 0]))
    k = key[order]
    if k.shape[0] > 1:
        dup = (k[1:] == k[:-1]).all(axis=1)
        if dup.any():
            u, v = k[int(np.argmax(dup))]
            raise DuplicateEdge(int(u), int(v))
    L = np.zeros((n_vertices, n_vertices))
    np.add.at(L, (e[:, 0], e[:, 1]), -1.0)
    np.add.at(L, (e[:, 1], e[:, 0]), -1.0)
    deg = np.bincount(e.ravel(), minlength=n_vertices).astype(np.float64)
    L[np.arange(n_vertices), np.arange(n_vertices)] = deg
    return L


def _helmert(n):
    """Orthonormal basis of the hyperplane orthogonal to the ones vector,
    as the columns of an (n, n-1) matrix."""
    Q = np.zeros((n, n - 1))
    for k in range(1, n):
        Q[:k, k - 1] = 1.0
        Q[k, k - 1] = -float(k)
        Q[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return Q


def _pencil_delta(M, K, which):
    """Smallest delta with (1+delta)^-1 K <= M <= (1+delta) K, both
    matrices already restricted to the ones-complement."""
    try:
        C = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        raise SingularPencil(which) from None
    W = np.linalg.solve(C, np.linalg.solve(C, M).T)
    W = (W + W.T) / 2.0
    mu = sym_eigen(W).values
    if mu[-1] <= 0.0:
        raise SingularPencil(which)
    return max(float(mu[0]) - 1.0, 1.0 / float(mu[-1]) - 1.0)


def measure_delta(L, L1, L2) -> float:
    """Minimal sandwich parameter over both subgraph Laplacians."""
    L = np.asarray(L, dtype=np.float64)
    n = L.shape[0]
    Q = _helmert(n)
    M = Q.T @ (L / 2.0) @ Q
    deltas = []
    for which, Li in (("e1", L1), ("e2", L2)):
        K = Q.T @ np.asarray(Li, dtype=np.float64) @ Q
        deltas.append(_pencil_delta(M, K, which))
    return max(deltas)


def sandwich_margin(L, Li, delta) -> float:
    """Worst PSD margin of the two sandwich sides at the given delta.

    Nonnegative (within round-off) iff
    (1+delta)^-1 Li <= L/2 <= (1+delta) Li on the ones-complement.
    """
    Q = _helmert(L.shape[0])
    M = Q.T @ (np.asarray(L) / 2.0) @ Q
    K = Q.T @ np.asarray(Li, dtype=np.float64) @ Q
    hi = sym_eigen((1.0 + delta) * K - M).values[-1]
    lo = sym_eigen(M - K / (1.0 + delta)).values[-1]
    return float(min(hi, lo))


def _connected_bipartite(mask):
    """Connectivity of the bipartite graph with biadjacency ``mask``."""
    n = mask.shape[0]
    if not (mask.any(axis=1).all() and mask.any(axis=0).all()):
        return False
    reach_a = np.zeros(n, dtype=bool)
    reach_a[0] = True
    reach_b = np.zeros(n, dtype=bool)
    while True:
        nb = reach_b | (mask[reach_a].any(axis=0) if reach_a.any() else False)
        na = reach_a | (mask[:, nb].any(axis=1) if nb.any() else False)
        if nb.sum() == reach_b.sum() and na.sum() == reach_a.sum():
            break
        reach_a, reach_b = na, nb
    return bool(reach_a.all() and reach_b.all())


def _mask_edges(mask, n):
    rows, cols = np.nonzero(mask)
    return np.column_stack([rows, cols + n]).astype(np.intp)


def sample_split(n: int, seed: int) -> BipartiteSplit:
    """Uniform edge split of K_{n,n}, resampled until usable.

    A sample is accepted when both subgraphs are connected and the
    measured delta is below 1; failures draw a fresh derived stream, up
    to 64 attempts (exhaustion signals a bug, not bad luck).
    """
    if n < 4:
        raise InputError(f"need n >= 4, got {n}")
    for attempt in range(_MAX_ATTEMPTS):
        rng = stream(seed, "lower_bound.split", attempt)
        mask = rng.random((n, n)) < 0.5
        if not (_connected_bipartite(mask) and _connected_bipartite(~mask)):
            continue
        e1 = _mask_edges(mask, n)
        e2 = _mask_edges(~mask, n)
        L = laplacian(2 * n, np.concatenate([e1, e2]))
        delta = measure_delta(L, laplacian(2 * n, e1), laplacian(2 * n, e2))
        delta_star = delta + _DELTA_CUSHION
        if delta_star < 1.0:
            return BipartiteSplit(n=int(n), e1=_readonly(e1),
                                  e2=_readonly(e2),
                                  delta_star=float(delta_star),
                                  seed=int(seed), attempts=attempt + 1)
    raise RetryBudgetExceeded(
        _MAX_ATTEMPTS, f"no usable split of K_{{{n},{n}}} found")


def build_123_metric(split: BipartiteSplit):
    """The 1/2/3-distance space over the split, with its partition.

    Distance 2 within each side, 1 across e1 edges, 3 across e2 edges.
    Returns (space, partition) with side A = [0, n), side B = [n, 2n).
    """
    n2 = 2 * split.n
    D = np.full((n2, n2), 2.0)
    np.fill_diagonal(D, 0.0)
    D[split.e1[:, 0], split.e1[:, 1]] = 1.0
    D[split.e1[:, 1], split.e1[:, 0]] = 1.0
    D[split.e2[:, 0], split.e2[:, 1]] = 3.0
    D[split.e2[:, 1], split.e2[:, 0]] = 3.0
    X = validate_metric(D)
    P = build_partition(X, np.arange(split.n), np.arange(split.n, n2))
    return X, P


def certified_lower_bound(split: BipartiteSplit) -> float:
    """Every Euclidean embedding of the 1/2/3 space distorts this much."""
    return 3.0 / (1.0 + split.delta_star) ** 2


def ratio_check(split: BipartiteSplit, images) -> tuple:
    """Mean squared image distances over e1 and e2, relative to all edges.

    Both ratios must land in [(1+delta*)^-2, (1+delta*)^2]; a value
    outside (beyond round-off) would contradict the sandwich and raises
    RangeViolation.
    """
    pts = np.asarray(getattr(images, "points", images), dtype=np.float64)
    if pts.shape[0] != 2 * split.n:
        raise InputError(f"{pts.shape[0]} image rows for {2 * split.n} "
                         f"vertices")
    def sq(e):
        return ((pts[e[:, 0]] - pts[e[:, 1]]) ** 2).sum(axis=1)

    cross = np.column_stack([
        np.repeat(np.arange(split.n), split.n),
        np.tile(np.arange(split.n, 2 * split.n), split.n)])
    mean_all = float(sq(cross).mean())
    if mean_all == 0.0:
        raise InputError("all cross images coincide; ratios are undefined")
    lo = (1.0 + split.delta_star) ** -2
    hi = (1.0 + split.delta_star) ** 2
    out = []
    for name, e in (("e1", split.e1), ("e2", split.e2)):
        r = float(sq(e).mean()) / mean_all
        tol = 1e-9 * hi
        if not (lo - tol <= r <= hi + tol):
            raise RangeViolation(name, r, lo, hi)
        out.append(r)
    return tuple(out)


def choose_n_for_epsilon(epsilon: float, seed: int, samples: int = 5,
                         n_cap: int = 512) -> tuple:
    """Smallest power-of-two n whose median delta meets 3/(1+d)^2 >= 3-eps.

    Returns (n, median_delta).  Doubles n from 16 up to ``n_cap``;
    exceeding the cap raises RetryBudgetExceeded.
    """
    if not (0.0 < epsilon < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    target = np.sqrt(3.0 / (3.0 - epsilon)) - 1.0
    n = 16
    while n <= n_cap:
        try:
            deltas = sorted(
                sample_split(n, seed + 1000 * i).delta_star
                for i in range(samples))
        except RetryBudgetExceeded:
            # small n cannot even clear the delta < 1 sampling gate, so it
            # certainly misses the (always < 0.225) target; keep doubling
            n *= 2
            continue
        med = deltas[samples // 2]
        if med <= target:
            return n, med
        n *= 2
    raise RetryBudgetExceeded(
        samples, f"epsilon {epsilon} unreachable at n <= {n_cap}")
