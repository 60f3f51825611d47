import logging
from collections import Counter
from typing import NamedTuple

from fair_sor_api.constants import MAX_ORACLE_POINTS
from fair_sor_api.errors import GroupSizesUnequalError, InfeasibleError, InstanceTooLargeError
from fair_sor_api.fair import check_t_balanced
from fair_sor_api.metric import FairnessSpec
from fair_sor_api.partitions import best_partition, blocks_of
from fair_sor_api.sor import Clustering, make_clustering

logger = logging.getLogger("fair_sor.oracle")


class OracleResult(NamedTuple):
    cost: float
    clustering: Clustering

    def to_json(self, ids=None):
        return self.clustering.to_json(ids)


def _check_size(inst):
    if inst.n > MAX_ORACLE_POINTS:
        raise InstanceTooLargeError(f"Oracle handles at most {MAX_ORACLE_POINTS} points, got {inst.n}")


def _block_counts(labels, groups):
    counts = {}
    for p, label in enumerate(labels):
        counts.setdefault(label, Counter())[groups[p]] += 1
    return counts.values()


def _search(inst, k, accept):
    # fairness is not monotone along prefixes, so only complete partitions are filtered
    found = best_partition(inst.dist, k, accept=accept)
    if found is None:
        return None
    _, labels = found
    clustering = make_clustering(inst.dist, blocks_of(labels))
    return OracleResult(cost=clustering.cost, clustering=clustering)


def opt_fair_bruteforce(inst, t, k):
    """Optimal (t,k)-fair clustering by enumerating every partition into at most k parts."""
    _check_size(inst)
    spec = FairnessSpec.parse(t, k, ell=inst.ell, two_color=True)
    groups = [inst.group_of(p) for p in range(inst.n)]

    def fair(labels):
        return all(c[2] <= spec.t * c[1] and c[1] <= spec.t * c[2] for c in _block_counts(labels, groups))

    result = _search(inst, spec.k, fair) if check_t_balanced(inst, spec.t) else None
    if result is None:
        raise InfeasibleError(f"No {spec.t}-fair clustering of {inst.n} points exists")
    logger.debug(f"Fair optimum for t={spec.t}, k={spec.k}: cost {result.cost}")
    return result


def opt_balanced_bruteforce(inst, k):
    _check_size(inst)
    spec = FairnessSpec.parse(1, k, ell=inst.ell, two_color=False)
    sizes = inst.group_sizes()
    if len(set(sizes.values())) != 1:
        raise GroupSizesUnequalError(f"Group sizes {sizes} differ")
    groups = [inst.group_of(p) for p in range(inst.n)]
    ell = inst.ell

    def balanced(labels):
        return all(len({c[g] for g in range(1, ell + 1)}) == 1 for c in _block_counts(labels, groups))

    result = _search(inst, spec.k, balanced)
    if result is None:
        raise InfeasibleError(f"No balanced clustering of {inst.n} points exists")
    logger.debug(f"Balanced optimum for k={spec.k}: cost {result.cost}")
    return result
