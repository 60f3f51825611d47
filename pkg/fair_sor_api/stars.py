import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import networkx as nx
import numpy as np

from fair_sor_api.constants import EXPANSION_FACTOR, RELATIVE_TOLERANCE
from fair_sor_api.errors import ComponentNotAStarError, FairSorError
from fair_sor_api.metric import shortest_path_closure
from fair_sor_api.sor import cluster_radius, make_clustering

logger = logging.getLogger("fair_sor.stars")


@dataclass(frozen=True)
class Star:
    center: int
    leaves: Tuple[int, ...]

    @property
    def points(self):
        return tuple(sorted((self.center,) + self.leaves))


@dataclass(frozen=True)
class StarForest:
    stars: Tuple[Star, ...]
    star_of: Dict[int, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.stars)

    def star_points(self, i):
        return self.stars[i].points

    def validate(self, inst, t=None):
        """Problems with the forest as readable strings; empty when it is well formed.

        With t the stars are checked as two-color stars (opposite colors, 1 to t leaves),
        without it as one-point-per-group sets centered on group 1.
        """
        problems = []
        seen = {}
        for i, star in enumerate(self.stars):
            for p in star.points:
                if p in seen:
                    problems.append(f"point {p} is in stars {seen[p]} and {i}")
                seen[p] = i
        missing = sorted(set(range(inst.n)) - set(seen))
        if missing:
            problems.append(f"points {missing} are in no star")
        for i, star in enumerate(self.stars):
            center_group = inst.group_of(star.center)
            if t is not None:
                if not 1 <= len(star.leaves) <= t:
                    problems.append(f"star {i} has {len(star.leaves)} leaves, expected 1..{t}")
                if any(inst.group_of(q) == center_group for q in star.leaves):
                    problems.append(f"star {i} has a leaf of its center's group")
            else:
                if center_group != 1:
                    problems.append(f"star {i} is centered on group {center_group}")
                groups = sorted(inst.group_of(p) for p in star.points)
                if groups != list(range(1, inst.ell + 1)):
                    problems.append(f"star {i} holds groups {groups}")
        return problems


@dataclass(frozen=True, eq=False)
class DerivedMetric:
    m: int
    dprime: np.ndarray
    point_to_star: np.ndarray


def _forest(stars):
    stars = sorted(stars, key=lambda s: s.points[0])
    star_of = {p: i for i, star in enumerate(stars) for p in star.points}
    return StarForest(stars=tuple(stars), star_of=star_of)


def extract_stars(dcs, inst):
    """One star per connected component of the subgraph.

    The center is the only vertex of degree two or more; a single edge is centered on
    its group 1 endpoint.
    """
    if dcs.has_three_edge_path():
        raise ComponentNotAStarError("Subgraph contains a path of three edges")
    graph = nx.Graph()
    graph.add_nodes_from(range(inst.n))
    graph.add_edges_from(dcs.edges)
    stars = []
    for component in nx.connected_components(graph):
        nodes = sorted(component)
        hubs = [v for v in nodes if graph.degree(v) >= 2]
        if len(hubs) > 1:
            raise ComponentNotAStarError(f"Component {nodes} has {len(hubs)} vertices of degree 2 or more")
        if graph.subgraph(nodes).number_of_edges() != len(nodes) - 1:
            raise ComponentNotAStarError(f"Component {nodes} is not a tree")
        if hubs:
            center = hubs[0]
        else:
            center = min(nodes, key=lambda v: (inst.group_of(v) != 1, v))
        leaves = tuple(sorted(graph.neighbors(center)))
        if len(leaves) != len(nodes) - 1:
            raise ComponentNotAStarError(f"Component {nodes} is not centered on {center}")
        stars.append(Star(center=center, leaves=leaves))
    forest = _forest(stars)
    logger.debug(f"Extracted {len(forest)} stars from {len(dcs.edges)} edges")
    return forest


def stars_from_matchings(matchings, inst):
    """Star of each group 1 point: the point plus its partner in every matching."""
    partners = {p: [] for p in inst.members_of(1)}
    for matching in matchings:
        for p, q in matching.edges:
            if inst.group_of(p) != 1:
                p, q = q, p
            partners[p].append(q)
    return _forest(Star(center=p, leaves=tuple(sorted(qs))) for p, qs in partners.items())


def build_derived_metric(inst, forest):
    """Shortest-path metric over the stars of an auxiliary graph.

    The graph has a vertex per point and per star. Points are joined at their distance,
    and a point is joined to a star at its largest distance to the star's points. Star
    vertices are not joined to each other directly.
    """
    n, m = inst.n, len(forest)
    weights = np.full((n + m, n + m), np.inf)
    weights[:n, :n] = inst.dist
    for i, star in enumerate(forest.stars):
        reach = inst.dist[:, list(star.points)].max(axis=1)
        weights[:n, n + i] = reach
        weights[n + i, :n] = reach
    np.fill_diagonal(weights, 0.0)
    closure = shortest_path_closure(weights)
    dprime = closure[n:, n:].copy()
    point_to_star = closure[:n, n:].copy()
    dprime.setflags(write=False)
    point_to_star.setflags(write=False)
    return DerivedMetric(m=m, dprime=dprime, point_to_star=point_to_star)


def expand_clustering(star_clusters, forest, inst):
    """Replace every star by its points; centers are chosen again over all points.

    A cluster of two or more stars ends up within 3 times its star-level radius. A
    cluster of one star has star-level radius 0 and expands to that star's own radius.
    """
    blocks = []
    for cluster in star_clusters:
        block = [p for i in cluster.members for p in forest.star_points(i)]
        blocks.append(block)
        if len(cluster.members) < 2:
            continue
        radius = cluster_radius(inst.dist, block)[1]
        limit = EXPANSION_FACTOR * cluster.radius
        if radius > limit * (1 + RELATIVE_TOLERANCE) + RELATIVE_TOLERANCE:
            raise FairSorError(f"Stars {cluster.members} expand to radius {radius}, above "
                               f"{EXPANSION_FACTOR} times their star-level radius {cluster.radius}")
    return make_clustering(inst.dist, blocks)


def multi_star_cost(clustering, forest):
    """Cost of the expanded clusters that hold more than one star."""
    return float(sum(c.radius for c in clustering
                     if len({forest.star_of[p] for p in c.members}) > 1))
