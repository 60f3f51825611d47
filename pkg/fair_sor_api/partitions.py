import numpy as np

INF = float("inf")


def best_partition(dist, k, accept=None, centers=None):
    """Cheapest partition of the elements into at most k blocks, by restricted-growth strings.

    A block's radius is the smallest eccentricity over the candidate centers (all elements
    when centers is None). Radii only grow as members join, so the running sum is a lower
    bound and branches at or above the incumbent are cut. accept(labels) filters complete
    partitions; it is not applied to prefixes. Ties go to the lexicographically smallest
    label string. Returns (cost, labels) or None when nothing is accepted.
    """
    dist = np.asarray(dist, dtype=float)
    m = dist.shape[0]
    columns = dist if centers is None else dist[np.asarray(centers, dtype=int), :]
    labels = [0] * m
    ecc = []
    radii = []
    best = [INF, None]

    def beaten(partial, depth):
        if partial > best[0]:
            return True
        if partial == best[0] and best[1] is not None:
            return tuple(labels[:depth]) > best[1][:depth]
        return False

    def visit(i):
        if i == m:
            if accept is not None and not accept(labels):
                return
            cost = sum(radii)
            candidate = tuple(labels)
            if cost < best[0] or (cost == best[0] and (best[1] is None or candidate < best[1])):
                best[0], best[1] = cost, candidate
            return
        column = columns[:, i]
        for b in range(min(len(ecc) + 1, k)):
            labels[i] = b
            if b == len(ecc):
                ecc.append(column.copy())
                radii.append(float(column.min()))
                if not beaten(sum(radii), i + 1):
                    visit(i + 1)
                ecc.pop()
                radii.pop()
            else:
                saved_ecc, saved_radius = ecc[b], radii[b]
                ecc[b] = np.maximum(saved_ecc, column)
                radii[b] = float(ecc[b].min())
                if not beaten(sum(radii), i + 1):
                    visit(i + 1)
                ecc[b], radii[b] = saved_ecc, saved_radius

    if m == 0:
        return (0.0, ()) if accept is None or accept([]) else None
    visit(0)
    if best[1] is None:
        return None
    return best[0], best[1]


def blocks_of(labels):
    blocks = {}
    for element, label in enumerate(labels):
        blocks.setdefault(label, []).append(element)
    return [tuple(blocks[label]) for label in sorted(blocks)]
