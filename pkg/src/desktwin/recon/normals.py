"""Normal estimation for raw point clouds.

Per-point directions come from the smallest-eigenvalue eigenvector of the
k-nearest-neighbor covariance; a consistent global orientation is then
propagated along a minimum spanning tree of the kNN graph (bridged between
components by their closest point pairs), flipping a normal whenever it
disagrees with its tree parent. Each tree root is oriented away from the
cloud centroid.
"""
from __future__ import annotations

from collections import deque

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial import cKDTree

from .cloud import OrientedPointCloud

RANK_EPS = 1e-12


def estimate_normals(points: np.ndarray, k: int = 16) -> tuple[OrientedPointCloud, int]:
    """Estimate oriented unit normals; returns (cloud, flagged_count).

    Points whose neighborhood is rank-deficient (all neighbors collinear)
    keep a zero normal and are counted in flagged_count; they are excluded
    from orientation propagation.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(points)
    if k < 3:
        raise ValueError("k must be >= 3")
    if n < k + 1:
        raise ValueError(f"need at least k+1={k + 1} points")

    tree = cKDTree(points)
    _, nbrs = tree.query(points, k=k + 1)  # first neighbor is the point itself
    neighborhood = points[nbrs]                       # (n, k+1, 3)
    centered = neighborhood - neighborhood.mean(axis=1, keepdims=True)
    cov = np.einsum("nki,nkj->nij", centered, centered) / (k + 1)
    eigvals, eigvecs = np.linalg.eigh(cov)            # ascending eigenvalues
    normals = eigvecs[:, :, 0].copy()
    flagged = eigvals[:, 1] <= RANK_EPS * np.maximum(eigvals[:, 2], RANK_EPS)
    normals[flagged] = 0.0
    lens = np.linalg.norm(normals, axis=1)
    good = ~flagged & (lens > 0)
    normals[good] /= lens[good, None]

    _propagate_orientation(points, normals, nbrs[:, 1:], good)
    return OrientedPointCloud(points, _unit_or_placeholder(normals, good)), \
        int(np.count_nonzero(~good))


def _unit_or_placeholder(normals: np.ndarray, good: np.ndarray) -> np.ndarray:
    # flagged points get an arbitrary unit placeholder so the cloud type
    # invariant holds; callers see the flagged count
    out = normals.copy()
    out[~good] = (0.0, 0.0, 1.0)
    return out


def _propagate_orientation(points, normals, nbrs, good):
    n = len(points)
    idx = np.nonzero(good)[0]
    if len(idx) == 0:
        return
    rows = np.repeat(np.arange(n), nbrs.shape[1])
    cols = nbrs.ravel()
    keep = good[rows] & good[cols]
    rows, cols = rows[keep], cols[keep]
    dists = np.linalg.norm(points[rows] - points[cols], axis=1)
    # strictly positive weights so the sparse graph keeps every edge
    graph = coo_matrix((dists + 1e-12, (rows, cols)), shape=(n, n)).tocsr()

    n_comp, labels = connected_components(graph, directed=False)
    bridges_r, bridges_c, bridges_w = [], [], []
    comp_ids = [c for c in range(n_comp) if np.any(good & (labels == c))]
    if len(comp_ids) > 1:
        # connect components through their closest point pairs, Prim-style
        # over component AABB centroids kept simple: all pairs closest points
        members = {c: np.nonzero(good & (labels == c))[0] for c in comp_ids}
        trees = {c: cKDTree(points[members[c]]) for c in comp_ids}
        connected = {comp_ids[0]}
        remaining = set(comp_ids[1:])
        while remaining:
            best = None
            for a in connected:
                pa = members[a]
                for b in remaining:
                    d, j = trees[b].query(points[pa])
                    kp = int(np.argmin(d))
                    cand = (float(d[kp]), int(pa[kp]), int(members[b][j[kp]]), b)
                    if best is None or cand[0] < best[0]:
                        best = cand
            _, i, j, b = best
            bridges_r.append(i)
            bridges_c.append(j)
            bridges_w.append(best[0] + 1e-12)
            connected.add(b)
            remaining.discard(b)
        graph = graph + coo_matrix((bridges_w, (bridges_r, bridges_c)),
                                   shape=(n, n)).tocsr()

    mst = minimum_spanning_tree(graph)
    mst = mst + mst.T
    indptr, indices = mst.indptr, mst.indices

    centroid = points[good].mean(axis=0)
    visited = np.zeros(n, dtype=bool)
    order = np.argsort(-np.linalg.norm(points - centroid, axis=1))
    for root in order:
        if not good[root] or visited[root]:
            continue
        if np.dot(normals[root], points[root] - centroid) < 0:
            normals[root] = -normals[root]
        visited[root] = True
        queue = deque([int(root)])
        while queue:
            u = queue.popleft()
            for v in indices[indptr[u]:indptr[u + 1]]:
                if visited[v] or not good[v]:
                    continue
                if np.dot(normals[u], normals[v]) < 0:
                    normals[v] = -normals[v]
                visited[v] = True
                queue.append(int(v))