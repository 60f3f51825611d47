"""Checks of the cost bounds behind the fair pipelines, run against an optimal clustering.

Every bound checked here is a theorem about the pipelines, so a reported violation
means a bug in the code that built the subgraph, the stars or the optimum.
"""
import heapq
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import networkx as nx
from networkx.utils import UnionFind

from fair_sor_api.constants import (
    COLOR_PATH_FACTOR,
    MERGE_FACTOR,
    MODE_BALANCED,
    RELATIVE_TOLERANCE,
    SUPERCLUSTER_FACTOR_BALANCED,
    SUPERCLUSTER_FACTOR_TWO_COLOR,
    SWITCH_FACTOR,
    SWITCHLESS_FACTOR,
)
from fair_sor_api.errors import UnreachableError
from fair_sor_api.sor import cluster_radius
from fair_sor_api.stars import build_derived_metric

logger = logging.getLogger("fair_sor.analysis")

PARITY = "parity"
COLOR = "color"


@dataclass(frozen=True)
class BoundViolation:
    check: str
    witness: Tuple
    value: float
    bound: float

    def to_json(self):
        return {"check": self.check, "witness": list(self.witness), "value": self.value, "bound": self.bound}


def _exceeds(value, bound):
    return value > bound * (1 + RELATIVE_TOLERANCE) + RELATIVE_TOLERANCE


def _ratio(value, base):
    # 0/0 counts as a pass; anything positive over a zero base is unbounded
    if base == 0:
        return 0.0 if value <= RELATIVE_TOLERANCE else float("inf")
    return value / base


@dataclass(frozen=True)
class Supercluster:
    index: int
    clusters: Tuple[int, ...]
    points: Tuple[int, ...]


def build_superclusters(opt, edges):
    """Merge optimal clusters joined by an edge; the smallest cluster id names each merge."""
    labels = opt.labels(sum(len(c.members) for c in opt))
    sets = UnionFind(range(len(opt)))
    for p, q in edges:
        if labels[p] != labels[q]:
            sets.union(labels[p], labels[q])
    merged = sorted(sorted(group) for group in sets.to_sets())
    return [
        Supercluster(index=group[0],
                     clusters=tuple(group),
                     points=tuple(sorted(p for i in group for p in opt.members_of(i))))
        for group in merged
    ]


class ClusterGraph(object):
    """Directed multigraph over optimal clusters.

    Each edge {p, q} between two clusters, p in group 1, yields a 0-edge from p's
    cluster to q's and a 1-edge back, both carrying d(p, q), the color of q and the
    source edge. Edges inside one cluster are left out.
    """

    def __init__(self, vertices):
        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(vertices)

    @property
    def vertices(self):
        return sorted(self.graph.nodes)

    def add_pair(self, i, j, weight, color, source_edge):
        self.graph.add_edge(i, j, parity=0, color=color, weight=weight, source_edge=source_edge)
        self.graph.add_edge(j, i, parity=1, color=color, weight=weight, source_edge=source_edge)

    def edges(self, color=None):
        for u, v, key, data in sorted(self.graph.edges(keys=True, data=True), key=lambda e: e[:3]):
            if color is None or data[COLOR] == color:
                yield u, v, key, data

    def colors(self):
        return sorted({data[COLOR] for _, _, _, data in self.edges()})

    def out_edges(self, u, color=None):
        for _, v, key, data in sorted(self.graph.out_edges(u, keys=True, data=True), key=lambda e: e[1:3]):
            if color is None or data[COLOR] == color:
                yield v, key, data

    def restricted(self, color):
        sub = ClusterGraph(self.graph.nodes)
        for u, v, key, data in self.edges(color):
            sub.graph.add_edge(u, v, key=key, **data)
        return sub

    def components(self, color=None):
        """Vertex sets of the weak components, over edges of one color when given."""
        view = self.graph if color is None else self.restricted(color).graph
        return sorted((tuple(sorted(c)) for c in nx.weakly_connected_components(view)), key=lambda c: c[0])

    def unpaired_edges(self):
        """Edges lacking the reverse edge of opposite parity with the same source edge."""
        pending = Counter()
        for u, v, _, data in self.edges():
            pending[(u, v, data[PARITY], data["source_edge"], data["weight"])] += 1
        missing = []
        for (u, v, parity, source, weight), count in pending.items():
            if pending[(v, u, 1 - parity, source, weight)] != count:
                missing.append((u, v, parity, source))
        return missing


def build_cluster_graph(inst, opt, edges, clusters=None):
    labels = opt.labels(inst.n)
    vertices = range(len(opt)) if clusters is None else clusters
    g = ClusterGraph(vertices)
    allowed = set(vertices)
    for p, q in edges:
        if inst.group_of(p) != 1:
            p, q = q, p
        i, j = labels[p], labels[q]
        if i == j or i not in allowed or j not in allowed:
            continue
        g.add_pair(i, j, float(inst.dist[p, q]), inst.group_of(q), (p, q))
    return g


@dataclass(frozen=True)
class SwitchPath:
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int, int, int, float], ...]
    switches: int
    weight: float

    def segments(self):
        """Maximal runs of edges of one color, as (start, end, color, edges)."""
        runs = []
        for edge in self.edges:
            if runs and runs[-1][2] == edge[3]:
                start, _, color, members = runs[-1]
                runs[-1] = (start, edge[1], color, members + (edge,))
            else:
                runs.append((edge[0], edge[1], edge[3], (edge,)))
        return runs


def _lexicographic_path(g, a, b, attribute, color=None):
    """Dijkstra over (vertex, attribute of the last edge) with labels (switches, weight)."""
    if a not in g.graph or b not in g.graph:
        raise UnreachableError(f"Vertex {a if a not in g.graph else b} is not in the graph")
    if a == b:
        return SwitchPath(vertices=(a,), edges=(), switches=0, weight=0.0)
    start = (a, -1)
    best = {start: (0, 0.0)}
    parent = {}
    heap = [(0, 0.0, a, -1)]
    while heap:
        switches, weight, u, last = heapq.heappop(heap)
        if best.get((u, last)) != (switches, weight):
            continue
        for v, key, data in g.out_edges(u, color):
            mark = data[attribute]
            label = (switches + (last != -1 and mark != last), weight + data["weight"])
            state = (v, mark)
            if state not in best or label < best[state]:
                best[state] = label
                parent[state] = ((u, last), (u, v, data[PARITY], data[COLOR], data["weight"]))
                heapq.heappush(heap, label + state)
    finals = sorted((best[s], s) for s in best if s[0] == b)
    if not finals:
        raise UnreachableError(f"No directed path from cluster {a} to cluster {b}")
    state = finals[0][1]
    walk = []
    while state != start:
        state, edge = parent[state]
        walk.append(edge)
    walk.reverse()
    return _simple(walk, attribute)


def _simple(walk, attribute):
    # cutting a closed loop never adds a switch: the kept edges were already separated by it
    edges = []
    position = {walk[0][0]: 0}
    for edge in walk:
        v = edge[1]
        if v in position:
            del edges[position[v]:]
            position = {u: i for u, i in position.items() if i <= position[v]}
        else:
            edges.append(edge)
            position[v] = len(edges)
    index = 2 if attribute == PARITY else 3
    switches = sum(1 for e, f in zip(edges, edges[1:]) if e[index] != f[index])
    vertices = (walk[0][0],) + tuple(e[1] for e in edges)
    return SwitchPath(vertices=vertices, edges=tuple(edges), switches=switches,
                      weight=float(sum(e[4] for e in edges)))


def min_switch_path(g, a, b, color=None):
    """Path from a to b with the fewest parity switches, then the least weight."""
    return _lexicographic_path(g, a, b, PARITY, color)


def min_color_switch_path(g, a, b):
    return _lexicographic_path(g, a, b, COLOR)


@dataclass
class MergeReport:
    star_merge_ratio: float
    merge_ratio: float
    violations: List[BoundViolation] = field(default_factory=list)


def check_merge_bounds(inst, opt, edges, forest, balanced=False, derived=None):
    """Compare the merged optimum with the stars grouped by merge and with the optimum itself."""
    superclusters = build_superclusters(opt, edges)
    derived = derived if derived is not None else build_derived_metric(inst, forest)
    owner = {p: s.index for s in superclusters for p in s.points}
    violations = []
    star_groups = {s.index: [] for s in superclusters}
    for i, star in enumerate(forest.stars):
        homes = {owner[p] for p in star.points}
        if len(homes) != 1:
            violations.append(BoundViolation("star-split", (i,) + tuple(sorted(homes)), float(len(homes)), 1.0))
        star_groups[min(homes)].append(i)

    merged_cost = 0.0
    star_cost = 0.0
    factor = SUPERCLUSTER_FACTOR_BALANCED if balanced else SUPERCLUSTER_FACTOR_TWO_COLOR
    for s in superclusters:
        radius = cluster_radius(inst.dist, s.points)[1]
        merged_cost += radius
        if star_groups[s.index]:
            star_cost += cluster_radius(derived.dprime, star_groups[s.index])[1]
        own = sum(cluster_radius(inst.dist, opt.members_of(i))[1] for i in s.clusters)
        if _exceeds(radius, factor * own):
            violations.append(BoundViolation("supercluster-radius", s.clusters, radius, factor * own))
    opt_cost = sum(cluster_radius(inst.dist, c.members)[1] for c in opt)
    if _exceeds(star_cost, MERGE_FACTOR * merged_cost):
        violations.append(BoundViolation("merged-star-cost", (), star_cost, MERGE_FACTOR * merged_cost))
    if _exceeds(merged_cost, factor * opt_cost):
        violations.append(BoundViolation("merged-cost", (), merged_cost, factor * opt_cost))
    return MergeReport(star_merge_ratio=_ratio(star_cost, merged_cost),
                       merge_ratio=_ratio(merged_cost, opt_cost),
                       violations=violations)


@dataclass
class SwitchReport:
    max_switch_weight_ratio: float
    pairs_checked: int
    violations: List[BoundViolation] = field(default_factory=list)


def check_switch_bounds(g, radii):
    """Every min-switch witness weighs at most 6 times the radii of its component, 4 without switches."""
    violations = [BoundViolation("unpaired-edge", edge, 1.0, 0.0) for edge in g.unpaired_edges()]
    worst = 0.0
    checked = 0
    for component in g.components():
        total = float(sum(radii[v] for v in component))
        for a, b in itertools.permutations(component, 2):
            try:
                path = min_switch_path(g, a, b)
            except UnreachableError:
                violations.append(BoundViolation("unreachable", (a, b), float("inf"), 0.0))
                continue
            checked += 1
            factor = SWITCHLESS_FACTOR if path.switches == 0 else SWITCH_FACTOR
            worst = max(worst, _ratio(path.weight, total))
            if _exceeds(path.weight, factor * total):
                check = "switchless-path" if path.switches == 0 else "switch-path"
                violations.append(BoundViolation(check, (a, b, path.switches), path.weight, factor * total))
    return SwitchReport(max_switch_weight_ratio=worst, pairs_checked=checked, violations=violations)


@dataclass
class ColorReport:
    color_degree_balance: bool
    max_color_path_ratio: float
    violations: List[BoundViolation] = field(default_factory=list)


def check_color_graph(g, radii):
    """Per-color structure of the cluster graph built from per-group perfect matchings.

    For each color the 0-in-degree matches the 0-out-degree at every vertex, and any two
    vertices of a color component are joined by a path of that color without switches.
    Along a minimum-color-switch path the components of segments two or more apart share
    no vertex, each segment is replaced by a switchless path of at most 4 times the radii of
    its component, and the replaced path weighs at most 8 times the radii of the supercluster.
    """
    violations = []
    balanced = True
    for color in g.colors():
        for v in g.vertices:
            outgoing = sum(1 for w, _, data in g.out_edges(v, color) if data[PARITY] == 0)
            incoming = sum(1 for u, w, _, data in g.edges(color) if w == v and data[PARITY] == 0)
            if outgoing != incoming:
                balanced = False
                violations.append(BoundViolation("color-degree", (v, color), float(incoming), float(outgoing)))
        colored = g.restricted(color)
        for component in colored.components():
            for a, b in itertools.permutations(component, 2):
                path = min_switch_path(colored, a, b)
                if path.switches:
                    violations.append(BoundViolation("color-switchless", (a, b, color), float(path.switches), 0.0))

    worst = 0.0
    components = {color: g.components(color) for color in g.colors()}

    def component_of(v, color):
        for component in components[color]:
            if v in component:
                return component
        return (v,)

    for supercluster in g.components():
        total = float(sum(radii[v] for v in supercluster))
        for a, b in itertools.permutations(supercluster, 2):
            segments = min_color_switch_path(g, a, b).segments()
            comps = [component_of(start, color) for start, _, color, _ in segments]
            weight = 0.0
            for h, (start, end, color, _) in enumerate(segments):
                if end not in comps[h]:
                    violations.append(BoundViolation("segment-component", (a, b, h), 1.0, 0.0))
                replacement = min_switch_path(g, start, end, color)
                share = float(sum(radii[v] for v in comps[h]))
                weight += replacement.weight
                if replacement.switches or _exceeds(replacement.weight, SWITCHLESS_FACTOR * share):
                    violations.append(BoundViolation("segment-path", (a, b, h), replacement.weight,
                                                     SWITCHLESS_FACTOR * share))
            for x, y in itertools.combinations(range(len(segments)), 2):
                if y - x >= 2 and set(comps[x]) & set(comps[y]):
                    violations.append(BoundViolation("segment-overlap", (a, b, x, y), 1.0, 0.0))
            worst = max(worst, _ratio(weight, total))
            if _exceeds(weight, COLOR_PATH_FACTOR * total):
                violations.append(BoundViolation("color-path", (a, b), weight, COLOR_PATH_FACTOR * total))
    return ColorReport(color_degree_balance=balanced, max_color_path_ratio=worst, violations=violations)


@dataclass
class DiagnosticReport:
    instance_id: str
    star_merge_ratio: float
    merge_ratio: float
    max_switch_weight_ratio: float
    color_degree_balance: Optional[bool]
    max_color_path_ratio: Optional[float]
    violations: List[BoundViolation] = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def to_json(self):
        return {
            "instance_id": self.instance_id,
            "lemma5_ratio": self.star_merge_ratio,
            "lemma6_ratio": self.merge_ratio,
            "max_switch_weight_ratio": self.max_switch_weight_ratio,
            "color_degree_balance": self.color_degree_balance,
            "max_color_path_ratio": self.max_color_path_ratio,
            "passed": self.passed,
            "violations": [v.to_json() for v in self.violations],
        }


def _zero_cost_edges(inst, opt, edges, superclusters):
    """With zero radii in a supercluster every edge inside it must have zero weight."""
    violations = []
    labels = opt.labels(inst.n)
    for s in superclusters:
        if any(opt.clusters[i].radius > 0 for i in s.clusters):
            continue
        members = set(s.clusters)
        for p, q in edges:
            if labels[p] in members and inst.dist[p, q] > RELATIVE_TOLERANCE:
                violations.append(BoundViolation("zero-cost-edge", (p, q), float(inst.dist[p, q]), 0.0))
    return violations


def diagnose(inst, result, opt, instance_id=""):
    """Run every check that applies to the result's mode against the optimum opt.

    opt is an OracleResult or a Clustering.
    """
    optimum = getattr(opt, "clustering", opt)
    balanced = result.mode == MODE_BALANCED
    edges = result.edges
    superclusters = build_superclusters(optimum, edges)
    merge = check_merge_bounds(inst, optimum, edges, result.forest, balanced=balanced)
    g = build_cluster_graph(inst, optimum, edges)
    radii = [cluster_radius(inst.dist, c.members)[1] for c in optimum]

    violations = list(merge.violations)
    violations += _zero_cost_edges(inst, optimum, edges, superclusters)
    color_balance = None
    color_ratio = None
    if balanced:
        switch_ratio = 0.0
        for color in g.colors():
            switch = check_switch_bounds(g.restricted(color), radii)
            switch_ratio = max(switch_ratio, switch.max_switch_weight_ratio)
            violations += switch.violations
        colors = check_color_graph(g, radii)
        color_balance = colors.color_degree_balance
        color_ratio = colors.max_color_path_ratio
        violations += colors.violations
    else:
        switch = check_switch_bounds(g, radii)
        switch_ratio = switch.max_switch_weight_ratio
        violations += switch.violations

    report = DiagnosticReport(
        instance_id=str(instance_id),
        star_merge_ratio=merge.star_merge_ratio,
        merge_ratio=merge.merge_ratio,
        max_switch_weight_ratio=switch_ratio,
        color_degree_balance=color_balance,
        max_color_path_ratio=color_ratio,
        violations=violations,
    )
    for violation in violations:
        logger.warning(f"{report.instance_id}: {violation.check} {violation.witness} "
                       f"value {violation.value} above {violation.bound}")
    return report
