import logging
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Tuple

from fair_sor_api.config import balanced_bound, solver_alpha, two_color_bound
from fair_sor_api.constants import DEFAULT_EPSILON, MODE_BALANCED, MODE_TWO_COLOR, SOLVER_PRIMAL_DUAL
from fair_sor_api.errors import FairSorError, GroupSizesUnequalError, InfeasibleError, InvalidInputError
from fair_sor_api.graphs import bipartite_from_instance, min_cost_dcs, min_weight_perfect_matching
from fair_sor_api.metric import FairnessSpec
from fair_sor_api.sor import Clustering, cluster_radius, solve_sor
from fair_sor_api.stars import (
    StarForest,
    build_derived_metric,
    expand_clustering,
    extract_stars,
    multi_star_cost,
    stars_from_matchings,
)

logger = logging.getLogger("fair_sor.fair")


@dataclass(frozen=True)
class FairClusteringResult:
    clustering: Clustering
    star_clustering: Clustering
    forest: StarForest
    dcs_weight: float
    # subgraph edges (two-color) or the union of the matchings (balanced), group 1 endpoint first
    edges: Tuple[Tuple[int, int], ...]
    fairness_ok: bool
    mode: str
    solver: str
    alpha: float
    k: int
    t: Optional[int] = None

    @property
    def cost(self):
        return self.clustering.cost

    @property
    def star_cost(self):
        return self.star_clustering.cost

    @property
    def k_used(self):
        return len(self.clustering)

    @property
    def expansion_ratio(self):
        """Expanded over star-level cost, counting only clusters of two or more stars."""
        covered = multi_star_cost(self.clustering, self.forest)
        if self.star_cost == 0:
            return 0.0 if covered == 0 else float("inf")
        return covered / self.star_cost

    @property
    def implied_bound(self):
        if self.mode == MODE_BALANCED:
            return balanced_bound(self.alpha)
        return two_color_bound(self.alpha)

    def to_json(self, ids=None):
        data = self.clustering.to_json(ids)
        data.update({
            "fair": self.fairness_ok,
            "k_used": self.k_used,
            "dcs_weight": self.dcs_weight,
            "expansion_ratio": self.expansion_ratio,
            "star_cost": self.star_cost,
            "solver": self.solver,
            "alpha": self.alpha,
            "mode": self.mode,
            "implied_bound": self.implied_bound,
        })
        return data


def check_t_balanced(inst, t):
    """True if the whole point set is a t-fair cluster, i.e. some fair clustering exists."""
    sizes = inst.group_sizes()
    red, blue = sizes.get(1, 0), sizes.get(2, 0)
    return blue <= t * red and red <= t * blue


def verify_fair(clustering, inst, t):
    for cluster in clustering:
        counts = Counter(inst.group_of(p) for p in cluster.members)
        red, blue = counts[1], counts[2]
        if blue > t * red or red > t * blue:
            return False
    return True


def verify_balanced(clustering, inst):
    for cluster in clustering:
        counts = Counter(inst.group_of(p) for p in cluster.members)
        if len({counts[g] for g in range(1, inst.ell + 1)}) != 1:
            return False
    return True


def clustering_cost(clustering, inst):
    """Sum of radii with centers drawn from every point of the instance."""
    total = 0.0
    for cluster in clustering:
        members = cluster.members if hasattr(cluster, "members") else tuple(cluster)
        total += cluster_radius(inst.dist, members)[1]
    return total


def _finish(inst, forest, k, solver, epsilon):
    derived = build_derived_metric(inst, forest)
    star_clustering = solve_sor(derived.dprime, k, solver, epsilon)
    clustering = expand_clustering(star_clustering, forest, inst)
    logger.debug(f"{len(forest)} stars clustered at cost {star_clustering.cost}, "
                 f"expanded to cost {clustering.cost}")
    if len(clustering) > k:
        raise FairSorError(f"Solver used {len(clustering)} clusters with a budget of {k}")
    return star_clustering, clustering


def fair_tk_cluster(inst, t, k, solver=SOLVER_PRIMAL_DUAL, epsilon=DEFAULT_EPSILON, alpha=None):
    """(t,k)-fair sum-of-radii clustering of a two-group instance."""
    spec = FairnessSpec.parse(t, k, ell=inst.ell, two_color=True)
    if not check_t_balanced(inst, spec.t):
        sizes = inst.group_sizes()
        raise InfeasibleError(f"Group sizes {sizes[1]} and {sizes[2]} are not {spec.t}-balanced")
    dcs = min_cost_dcs(bipartite_from_instance(inst), lower=1, upper=spec.t)
    forest = extract_stars(dcs, inst)
    star_clustering, clustering = _finish(inst, forest, spec.k, solver, epsilon)
    fairness_ok = verify_fair(clustering, inst, spec.t)
    if not fairness_ok:
        raise FairSorError("Expanded clustering is not fair")
    result = FairClusteringResult(
        clustering=clustering,
        star_clustering=star_clustering,
        forest=forest,
        dcs_weight=dcs.total_weight,
        edges=dcs.edges,
        fairness_ok=fairness_ok,
        mode=MODE_TWO_COLOR,
        solver=solver,
        alpha=solver_alpha(solver) if alpha is None else alpha,
        k=spec.k,
        t=spec.t,
    )
    logger.info(f"Fair clustering with t={spec.t}, k={spec.k}: {result.k_used} clusters, cost {result.cost}")
    return result


def balanced_cluster(inst, k, solver=SOLVER_PRIMAL_DUAL, epsilon=DEFAULT_EPSILON, alpha=None):
    """Balanced clustering over ell groups of equal size."""
    if inst.ell < 2:
        raise InvalidInputError(f"Balanced clustering needs at least 2 groups, got {inst.ell}")
    spec = FairnessSpec.parse(1, k, ell=inst.ell, two_color=False)
    sizes = inst.group_sizes()
    if len(set(sizes.values())) != 1:
        raise GroupSizesUnequalError(f"Group sizes {sizes} differ")
    matchings = [min_weight_perfect_matching(bipartite_from_instance(inst, 1, z))
                 for z in range(2, inst.ell + 1)]
    forest = stars_from_matchings(matchings, inst)
    star_clustering, clustering = _finish(inst, forest, spec.k, solver, epsilon)
    fairness_ok = verify_balanced(clustering, inst)
    if not fairness_ok:
        raise FairSorError("Expanded clustering is not balanced")
    result = FairClusteringResult(
        clustering=clustering,
        star_clustering=star_clustering,
        forest=forest,
        dcs_weight=float(sum(m.total_weight for m in matchings)),
        edges=tuple(sorted(e for m in matchings for e in m.edges)),
        fairness_ok=fairness_ok,
        mode=MODE_BALANCED,
        solver=solver,
        alpha=solver_alpha(solver) if alpha is None else alpha,
        k=spec.k,
        t=1,
    )
    logger.info(f"Balanced clustering over {inst.ell} groups, k={spec.k}: "
                f"{result.k_used} clusters, cost {result.cost}")
    return result
