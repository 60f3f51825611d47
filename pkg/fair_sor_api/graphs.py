import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from fair_sor_api.constants import MAX_BRUTEFORCE_EDGES
from fair_sor_api.errors import InfeasibleError, InstanceTooLargeError, InvalidInputError

logger = logging.getLogger("fair_sor.graphs")

INF = float("inf")


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Complete bipartite graph; weight[i][j] is the weight of edge (left[i], right[j])."""

    left: Tuple[int, ...]
    right: Tuple[int, ...]
    weight: np.ndarray

    def __post_init__(self):
        if self.weight.shape != (len(self.left), len(self.right)):
            raise InvalidInputError(
                f"Weight matrix shape {self.weight.shape} does not match sides "
                f"{len(self.left)}x{len(self.right)}")
        if np.any(self.weight < 0):
            raise InvalidInputError("Edge weights must be nonnegative")

    def w(self, p, q):
        return float(self.weight[self.left.index(p), self.right.index(q)])


@dataclass(frozen=True)
class DegreeConstrainedSubgraph:
    edges: Tuple[Tuple[int, int], ...]
    total_weight: float
    degree: Dict[int, int] = field(default_factory=dict)

    def within_bounds(self, lower, upper):
        return all(lower <= d <= upper for d in self.degree.values())

    def neighbors(self):
        adjacent = {v: [] for v in self.degree}
        for p, q in self.edges:
            adjacent[p].append(q)
            adjacent[q].append(p)
        return adjacent

    def has_three_edge_path(self):
        """True if some path a-b-c-d exists, i.e. the subgraph is not a star forest."""
        adjacent = self.neighbors()
        for b, c in self.edges:
            if len(adjacent[b]) >= 2 and len(adjacent[c]) >= 2:
                return True
        return False


@dataclass(frozen=True)
class Matching:
    edges: Tuple[Tuple[int, int], ...]
    total_weight: float


def bipartite_from_instance(inst, left_group=1, right_group=2):
    left = inst.members_of(left_group)
    right = inst.members_of(right_group)
    weight = np.array(inst.dist[np.ix_(left, right)], dtype=float)
    return BipartiteGraph(left=left, right=right, weight=weight)


def check_dcs_feasible(n_left, n_right, lower, upper):
    """Closed-form Hall condition for uniform degree bounds on a complete bipartite graph."""
    if lower < 0 or lower > upper:
        raise InvalidInputError(f"Degree bounds must satisfy 0 <= lower <= upper, got [{lower}, {upper}]")
    if lower == 0:
        return
    cap_left = min(upper, n_right)
    cap_right = min(upper, n_left)
    if lower > cap_left or lower > cap_right:
        raise InfeasibleError(
            f"Degree lower bound {lower} cannot be met with sides {n_left} and {n_right}")
    if lower * n_left > cap_right * n_right or lower * n_right > cap_left * n_left:
        raise InfeasibleError(
            f"Sides {n_left} and {n_right} are not {upper}-balanced; no subgraph with degrees "
            f"in [{lower}, {upper}] exists")


class _FlowNetwork(object):
    def __init__(self, size):
        self.size = size
        self.graph = [[] for _ in range(size)]
        self.head = []
        self.cap = []
        self.cost = []

    def add_arc(self, u, v, cap, cost):
        self.graph[u].append(len(self.head))
        self.head.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.graph[v].append(len(self.head))
        self.head.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        return len(self.head) - 2

    def flow_on(self, arc):
        return self.cap[arc ^ 1]

    def min_cost_flow(self, source, sink, demand):
        """Successive shortest paths with Dijkstra on reduced costs.

        All initial costs are nonnegative, so zero potentials are valid to start with.
        Equal distances pop in ascending node order, which fixes tie-breaking.
        """
        potential = [0.0] * self.size
        sent = 0
        total = 0.0
        while sent < demand:
            dist = [INF] * self.size
            parent = [-1] * self.size
            dist[source] = 0.0
            heap = [(0.0, source)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                for arc in self.graph[u]:
                    if self.cap[arc] <= 0:
                        continue
                    v = self.head[arc]
                    nd = d + self.cost[arc] + potential[u] - potential[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        parent[v] = arc
                        heapq.heappush(heap, (nd, v))
            if dist[sink] == INF:
                break
            for v in range(self.size):
                if dist[v] < INF:
                    potential[v] += dist[v]
            push = demand - sent
            v = sink
            while v != source:
                arc = parent[v]
                push = min(push, self.cap[arc])
                v = self.head[arc ^ 1]
            v = sink
            while v != source:
                arc = parent[v]
                self.cap[arc] -= push
                self.cap[arc ^ 1] += push
                total += push * self.cost[arc]
                v = self.head[arc ^ 1]
            sent += push
        return sent, total


def min_cost_dcs(g, lower=1, upper=1):
    """Minimum-weight subgraph of g with every degree in [lower, upper].

    Reduced to a minimum-cost circulation: s->left and right->t arcs carry the degree
    bounds, left->right arcs have unit capacity and the edge weight as cost, and t->s
    closes the circulation. Lower bounds are moved into node excesses served from a
    super source, then the flow is found by successive shortest paths.
    """
    n_left, n_right = len(g.left), len(g.right)
    check_dcs_feasible(n_left, n_right, lower, upper)

    s, t = 0, n_left + n_right + 1
    super_source, super_sink = t + 1, t + 2
    network = _FlowNetwork(t + 3)
    excess = [0] * (t + 1)
    for i in range(n_left):
        network.add_arc(s, 1 + i, upper - lower, 0.0)
        excess[1 + i] += lower
        excess[s] -= lower
    edge_arcs = {}
    for i in range(n_left):
        for j in range(n_right):
            edge_arcs[(i, j)] = network.add_arc(1 + i, 1 + n_left + j, 1, float(g.weight[i, j]))
    for j in range(n_right):
        network.add_arc(1 + n_left + j, t, upper - lower, 0.0)
        excess[t] += lower
        excess[1 + n_left + j] -= lower
    network.add_arc(t, s, upper * (n_left + n_right) + 1, 0.0)
    demand = 0
    for v, e in enumerate(excess):
        if e > 0:
            network.add_arc(super_source, v, e, 0.0)
            demand += e
        elif e < 0:
            network.add_arc(v, super_sink, -e, 0.0)

    sent, _ = network.min_cost_flow(super_source, super_sink, demand)
    if sent < demand:
        raise InfeasibleError(f"No subgraph with degrees in [{lower}, {upper}] exists")

    chosen = [(i, j) for (i, j), arc in sorted(edge_arcs.items()) if network.flow_on(arc) > 0]
    if lower == 1:
        chosen = _drop_middle_edges(chosen)
    dcs = _subgraph(g, chosen)
    logger.debug(f"DCS over {n_left}x{n_right} sides, bounds [{lower}, {upper}]: "
                 f"{len(dcs.edges)} edges, weight {dcs.total_weight}")
    return dcs


def _drop_middle_edges(chosen):
    """Remove edges whose endpoints both have degree two or more, one at a time.

    Each such edge is the middle of a three-edge path. With a lower bound of 1 the
    remaining degrees stay feasible, and in an optimal subgraph the edge weighs 0.
    """
    chosen = list(chosen)
    while True:
        left = Counter(i for i, _ in chosen)
        right = Counter(j for _, j in chosen)
        middle = next((e for e in chosen if left[e[0]] >= 2 and right[e[1]] >= 2), None)
        if middle is None:
            return chosen
        chosen.remove(middle)


def _subgraph(g, chosen):
    degree = {p: 0 for p in g.left + g.right}
    edges = []
    total = 0.0
    for i, j in chosen:
        p, q = g.left[i], g.right[j]
        edges.append((p, q))
        degree[p] += 1
        degree[q] += 1
        total += float(g.weight[i, j])
    return DegreeConstrainedSubgraph(edges=tuple(edges), total_weight=total, degree=degree)


def min_cost_dcs_bruteforce(g, lower=1, upper=1):
    """Exhaustive search over all edge subsets, for |left|*|right| <= 20."""
    n_left, n_right = len(g.left), len(g.right)
    n_edges = n_left * n_right
    if n_edges > MAX_BRUTEFORCE_EDGES:
        raise InstanceTooLargeError(
            f"{n_edges} edges exceed the exhaustive limit of {MAX_BRUTEFORCE_EDGES}")
    if lower < 0 or lower > upper:
        raise InvalidInputError(f"Degree bounds must satisfy 0 <= lower <= upper, got [{lower}, {upper}]")
    pairs = [(i, j) for i in range(n_left) for j in range(n_right)]
    masks = (np.arange(2 ** n_edges)[:, None] >> np.arange(n_edges)[None, :]) & 1
    incidence = np.zeros((n_edges, n_left + n_right), dtype=int)
    for e, (i, j) in enumerate(pairs):
        incidence[e, i] = 1
        incidence[e, n_left + j] = 1
    degrees = masks @ incidence
    feasible = np.all((degrees >= lower) & (degrees <= upper), axis=1)
    if not np.any(feasible):
        raise InfeasibleError(f"No subgraph with degrees in [{lower}, {upper}] exists")
    weights = masks @ g.weight.reshape(-1)
    weights = np.where(feasible, weights, np.inf)
    best = int(np.argmin(weights))
    return _subgraph(g, [pairs[e] for e in range(n_edges) if masks[best, e]])


def min_weight_perfect_matching(g):
    """Assignment problem by the primal-dual potentials (Hungarian) method."""
    n = len(g.left)
    if n != len(g.right):
        raise InvalidInputError(f"Perfect matching needs equal sides, got {n} and {len(g.right)}")
    cost = g.weight
    # 1-indexed; column 0 is the virtual start of each augmenting search
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    owner = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    edges = sorted((g.left[owner[j] - 1], g.right[j - 1]) for j in range(1, n + 1))
    total = 0.0
    for j in range(1, n + 1):
        total += float(cost[owner[j] - 1, j - 1])
    return Matching(edges=tuple(edges), total_weight=total)
