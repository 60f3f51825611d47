import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from fair_sor_api.config import solver_alpha
from fair_sor_api.constants import (
    DEFAULT_EPSILON,
    MAX_EXACT_ELEMENTS,
    RELATIVE_TOLERANCE,
    SOLVER_EXACT,
    SOLVER_PRIMAL_DUAL,
    SOLVERS,
)
from fair_sor_api.errors import InstanceTooLargeError, InvalidInputError
from fair_sor_api.partitions import best_partition, blocks_of

logger = logging.getLogger("fair_sor.sor")

MAX_BISECTION_STEPS = 64


@dataclass(frozen=True)
class Cluster:
    members: Tuple[int, ...]
    center: int
    radius: float

    def to_json(self, ids=None):
        if ids is None:
            return {"members": list(self.members), "center": self.center, "radius": self.radius}
        return {"members": [ids[p] for p in self.members], "center": ids[self.center], "radius": self.radius}


@dataclass(frozen=True)
class Clustering:
    """Clusters sorted by smallest member; cost is the sum of radii."""

    clusters: Tuple[Cluster, ...]

    @property
    def cost(self):
        return float(sum(c.radius for c in self.clusters))

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def members_of(self, index):
        return self.clusters[index].members

    def labels(self, n):
        labels = [-1] * n
        for index, cluster in enumerate(self.clusters):
            for p in cluster.members:
                labels[p] = index
        return labels

    def to_json(self, ids=None):
        return {"clusters": [c.to_json(ids) for c in self.clusters], "cost": self.cost}


def cluster_radius(dist, members, centers=None):
    """(center, radius) minimising the largest distance to members; smallest index wins ties."""
    dist = np.asarray(dist)
    candidates = np.arange(dist.shape[0]) if centers is None else np.asarray(centers, dtype=int)
    ecc = dist[np.ix_(candidates, np.asarray(members, dtype=int))].max(axis=1)
    best = int(np.argmin(ecc))
    return int(candidates[best]), float(ecc[best])


def make_clustering(dist, blocks, centers=None):
    clusters = []
    for block in blocks:
        members = tuple(sorted(int(p) for p in block))
        if not members:
            continue
        center, radius = cluster_radius(dist, members, centers)
        clusters.append(Cluster(members=members, center=center, radius=radius))
    clusters.sort(key=lambda c: c.members[0])
    return Clustering(clusters=tuple(clusters))


def singletons(m):
    return Clustering(clusters=tuple(Cluster(members=(p,), center=p, radius=0.0) for p in range(m)))


def sor_exact(dist, k):
    """Optimal sum-of-radii clustering with at most k clusters, centers drawn from the elements."""
    dist = np.asarray(dist, dtype=float)
    m = dist.shape[0]
    if m > MAX_EXACT_ELEMENTS:
        raise InstanceTooLargeError(f"Exact solver handles at most {MAX_EXACT_ELEMENTS} elements, got {m}")
    if k < 1:
        raise InvalidInputError(f"k must be positive, got {k}")
    if k >= m:
        return singletons(m)
    _, labels = best_partition(dist, k)
    return make_clustering(dist, blocks_of(labels))


def _ball_matrix(dist):
    """Every candidate ball (c, r) with r a distance from c; membership as a boolean matrix."""
    balls = []
    for c in range(dist.shape[0]):
        for r in np.unique(dist[c]):
            balls.append((c, float(r)))
    centers = np.array([c for c, _ in balls], dtype=int)
    radii = np.array([r for _, r in balls], dtype=float)
    inside = dist[centers, :] <= radii[:, None]
    return centers, radii, inside


def primal_dual_cover(dist, penalty, balls=None):
    """One Lagrangian run: every open ball costs radius + penalty.

    Duals of uncovered elements grow together; a ball opens when its dual constraint
    becomes tight and freezes the elements it holds. Open balls are then pruned greedily
    by decreasing radius to a pairwise disjoint set, and each survivor triples its radius
    so it swallows the pruned balls it met. Returns a Clustering.
    """
    dist = np.asarray(dist, dtype=float)
    m = dist.shape[0]
    centers, radii, inside = balls if balls is not None else _ball_matrix(dist)
    weight = inside.astype(float)
    alpha = np.zeros(m)
    active = np.ones(m, dtype=bool)
    opened = []
    while np.any(active):
        frozen_sum = weight @ np.where(active, 0.0, alpha)
        active_count = weight @ active.astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            tight_at = np.where(active_count > 0, (radii + penalty - frozen_sum) / active_count, np.inf)
        ball = int(np.argmin(tight_at))
        time = max(float(tight_at[ball]), 0.0)
        alpha[active] = time
        opened.append(ball)
        active &= ~inside[ball]

    order = sorted(range(len(opened)), key=lambda i: (-radii[opened[i]], i))
    selected = []
    for i in order:
        ball = opened[i]
        if not any(np.any(inside[ball] & inside[other]) for other in selected):
            selected.append(ball)

    blocks = [[] for _ in selected]
    for p in range(m):
        for index, ball in enumerate(selected):
            if dist[centers[ball], p] <= 3.0 * radii[ball]:
                blocks[index].append(p)
                break
    return make_clustering(dist, [b for b in blocks if b])


def _best_split(dist, members):
    """Cheapest way to cover members with two balls; (cost, first, second) or None."""
    members = np.asarray(members, dtype=int)
    if members.size < 2:
        return None
    sub = dist[:, members]
    best = None
    for c1 in range(dist.shape[0]):
        order = np.argsort(sub[c1], kind="stable")
        near = sub[c1, order]
        for c2 in range(dist.shape[0]):
            far = sub[c2, order]
            # suffix maxima: radius the second ball needs once the first takes a prefix
            tail = np.maximum.accumulate(far[::-1])[::-1]
            for j in range(1, members.size):
                if near[j] == near[j - 1]:
                    continue
                cost = near[j - 1] + tail[j]
                if best is None or cost < best[0]:
                    best = (float(cost), members[order[:j]], members[order[j:]])
    return best


def refine_clustering(dist, clustering, k):
    """Re-centre every cluster and spend unused budget on the most profitable splits."""
    dist = np.asarray(dist, dtype=float)
    blocks = [list(c.members) for c in clustering]
    current = make_clustering(dist, blocks)
    while len(current) < k:
        best = None
        for index, cluster in enumerate(current):
            split = _best_split(dist, cluster.members)
            if split is None:
                continue
            saving = cluster.radius - split[0]
            if saving > RELATIVE_TOLERANCE * max(cluster.radius, 1e-300) and (best is None or saving > best[0]):
                best = (saving, index, split)
        if best is None:
            break
        _, index, split = best
        blocks = [list(c.members) for i, c in enumerate(current) if i != index]
        blocks += [list(split[1]), list(split[2])]
        current = make_clustering(dist, blocks)
    return current


def merge_to_budget(dist, clustering, k):
    """Greedily merge the two clusters whose union adds the least radius until k remain."""
    dist = np.asarray(dist, dtype=float)
    blocks = [list(c.members) for c in clustering]
    radii = [c.radius for c in clustering]
    while len(blocks) > k:
        best = None
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                _, radius = cluster_radius(dist, blocks[i] + blocks[j])
                added = radius - radii[i] - radii[j]
                if best is None or added < best[0]:
                    best = (added, i, j, radius)
        _, i, j, radius = best
        blocks[i] = blocks[i] + blocks[j]
        radii[i] = radius
        del blocks[j]
        del radii[j]
    return make_clustering(dist, blocks)


def combine_bracket(dist, low_solution, high_solution, k):
    """Join the bracketing covers into one clustering with at most k clusters.

    low_solution opens too many balls and high_solution at most k. The low side is
    merged down to the budget, both sides are refined, and the cheaper one wins.
    """
    candidates = [refine_clustering(dist, high_solution, k)]
    if len(low_solution) > k:
        candidates.append(refine_clustering(dist, merge_to_budget(dist, low_solution, k), k))
    else:
        candidates.append(refine_clustering(dist, low_solution, k))
    return min(candidates, key=lambda c: c.cost)


def sor_approx(dist, k, epsilon=DEFAULT_EPSILON):
    """Lagrangian primal-dual sum-of-radii with bisection on the per-ball penalty."""
    dist = np.asarray(dist, dtype=float)
    m = dist.shape[0]
    if k < 1:
        raise InvalidInputError(f"k must be positive, got {k}")
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    if k >= m:
        return singletons(m)
    max_dist = float(dist.max())
    if max_dist == 0:
        return make_clustering(dist, [list(range(m))])

    balls = _ball_matrix(dist)
    lo, hi = 0.0, max_dist * m
    low_solution = primal_dual_cover(dist, lo, balls)
    if len(low_solution) <= k:
        return refine_clustering(dist, low_solution, k)
    high_solution = primal_dual_cover(dist, hi, balls)
    candidates = [refine_clustering(dist, high_solution, k)]
    for step in range(MAX_BISECTION_STEPS):
        if k * (hi - lo) <= epsilon * candidates[-1].cost / 4 or hi - lo <= RELATIVE_TOLERANCE * hi:
            break
        mid = (lo + hi) / 2
        solution = primal_dual_cover(dist, mid, balls)
        if len(solution) <= k:
            hi, high_solution = mid, solution
            candidates.append(refine_clustering(dist, solution, k))
        else:
            lo, low_solution = mid, solution
    candidates.append(combine_bracket(dist, low_solution, high_solution, k))
    best = min(candidates, key=lambda c: c.cost)
    logger.debug(f"Primal-dual on {m} elements, k={k}: penalty bracket [{lo}, {hi}], "
                 f"{len(low_solution)}/{len(high_solution)} balls, cost {best.cost}")
    return best


def verify_clustering(clustering, dist, k):
    dist = np.asarray(dist, dtype=float)
    m = dist.shape[0]
    if len(clustering) > k:
        return False
    seen = set()
    for cluster in clustering:
        if not cluster.members or cluster.radius < 0:
            return False
        if not 0 <= cluster.center < m:
            return False
        for p in cluster.members:
            if p in seen or not 0 <= p < m:
                return False
            seen.add(p)
        reach = float(dist[cluster.center, list(cluster.members)].max())
        if cluster.radius + RELATIVE_TOLERANCE * max(reach, 1.0) < reach:
            return False
    return len(seen) == m


def solve_sor(dist, k, solver=SOLVER_PRIMAL_DUAL, epsilon=DEFAULT_EPSILON):
    if solver == SOLVER_EXACT:
        return sor_exact(dist, k)
    if solver == SOLVER_PRIMAL_DUAL:
        return sor_approx(dist, k, epsilon)
    raise InvalidInputError(f"Unknown solver {solver!r}, expected one of {', '.join(SOLVERS)}")


__all__ = [
    "Cluster",
    "Clustering",
    "cluster_radius",
    "combine_bracket",
    "make_clustering",
    "merge_to_budget",
    "primal_dual_cover",
    "refine_clustering",
    "solve_sor",
    "solver_alpha",
    "sor_approx",
    "sor_exact",
    "verify_clustering",
]
