from dataclasses import replace

import numpy as np
import pytest

from fair_sor_api.analysis import (
    ClusterGraph,
    build_cluster_graph,
    build_superclusters,
    check_merge_bounds,
    check_switch_bounds,
    diagnose,
    min_color_switch_path,
    min_switch_path,
)
from fair_sor_api.constants import SOLVER_EXACT
from fair_sor_api.errors import UnreachableError
from fair_sor_api.fair import balanced_cluster, fair_tk_cluster
from fair_sor_api.metric import balanced_groups, generate_instance, instance_from_coords, make_instance
from fair_sor_api.oracle import opt_balanced_bruteforce, opt_fair_bruteforce
from fair_sor_api.sor import make_clustering


def _chain():
    """0 -> 1 -> 2 as 0-edges, with the 1-edges running back."""
    g = ClusterGraph(range(3))
    g.add_pair(0, 1, 1.0, 2, (10, 11))
    g.add_pair(1, 2, 2.0, 2, (12, 13))
    return g


def test_pairs_are_mirrored():
    g = _chain()
    assert g.unpaired_edges() == []
    assert g.components() == [(0, 1, 2)]
    assert g.colors() == [2]


def test_forward_path_keeps_its_parity():
    path = min_switch_path(_chain(), 0, 2)
    assert path.vertices == (0, 1, 2)
    assert path.switches == 0
    assert path.weight == 3.0
    back = min_switch_path(_chain(), 2, 0)
    assert back.switches == 0
    assert [e[2] for e in back.edges] == [1, 1]


def test_opposite_pairs_force_a_switch():
    g = ClusterGraph(range(3))
    g.add_pair(0, 1, 1.0, 2, (10, 11))
    g.add_pair(2, 1, 1.0, 2, (12, 13))
    path = min_switch_path(g, 0, 2)
    assert path.switches == 1
    assert path.weight == 2.0


def test_fewer_switches_beat_lower_weight():
    g = ClusterGraph(range(3))
    g.add_pair(0, 1, 1.0, 2, (10, 11))
    g.add_pair(2, 1, 1.0, 2, (12, 13))
    g.add_pair(0, 2, 50.0, 2, (14, 15))
    path = min_switch_path(g, 0, 2)
    assert path.switches == 0
    assert path.weight == 50.0


def test_disconnected_clusters_are_unreachable():
    g = ClusterGraph(range(4))
    g.add_pair(0, 1, 1.0, 2, (10, 11))
    with pytest.raises(UnreachableError):
        min_switch_path(g, 0, 3)
    with pytest.raises(UnreachableError):
        min_switch_path(g, 0, 7)


def test_color_segments():
    g = ClusterGraph(range(3))
    g.add_pair(0, 1, 1.0, 2, (10, 11))
    g.add_pair(1, 2, 1.0, 3, (12, 13))
    path = min_color_switch_path(g, 0, 2)
    assert path.switches == 1
    assert [(start, end, color) for start, end, color, _ in path.segments()] == [(0, 1, 2), (1, 2, 3)]
    assert g.restricted(3).components() == [(0,), (1, 2)]


def test_superclusters_follow_crossing_edges(line_instance):
    opt = make_clustering(line_instance.dist, [[0, 1], [2, 3]])
    assert len(build_superclusters(opt, [(0, 1), (2, 3)])) == 2
    merged = build_superclusters(opt, [(0, 3), (2, 1)])
    assert len(merged) == 1
    assert merged[0].points == (0, 1, 2, 3)


def test_cluster_graph_skips_edges_inside_clusters(line_instance):
    opt = make_clustering(line_instance.dist, [[0, 1], [2, 3]])
    assert list(build_cluster_graph(line_instance, opt, [(0, 1), (2, 3)]).edges()) == []
    g = build_cluster_graph(line_instance, opt, [(0, 3), (2, 1)])
    assert len(list(g.edges())) == 4
    assert g.unpaired_edges() == []


def test_switch_bound_on_crossing_pairs(line_instance):
    opt = make_clustering(line_instance.dist, [[0, 1], [2, 3]])
    g = build_cluster_graph(line_instance, opt, [(0, 3), (2, 1)])
    report = check_switch_bounds(g, [1.0, 1.0])
    assert report.pairs_checked == 2
    # crossing edges of weight 11 and 9 against radii summing to 2
    assert report.violations
    assert report.max_switch_weight_ratio == pytest.approx(4.5)


def test_line_diagnostics_pass(line_instance):
    result = fair_tk_cluster(line_instance, 1, 2, solver=SOLVER_EXACT)
    opt = opt_fair_bruteforce(line_instance, 1, 2)
    report = diagnose(line_instance, result, opt, instance_id="line")
    assert report.passed
    assert report.star_merge_ratio == 0.0
    assert report.merge_ratio == 1.0
    assert report.color_degree_balance is None
    data = report.to_json()
    assert data["instance_id"] == "line"
    assert data["lemma6_ratio"] == 1.0
    assert data["violations"] == []


def test_merge_bounds_on_colocated_pairs(colocated_pairs):
    result = fair_tk_cluster(colocated_pairs, 1, 2)
    opt = opt_fair_bruteforce(colocated_pairs, 1, 2)
    report = check_merge_bounds(colocated_pairs, opt.clustering, result.edges, result.forest)
    assert report.violations == []
    assert report.merge_ratio == 0.0


def test_diagnose_accepts_a_plain_clustering(colocated_pairs):
    result = fair_tk_cluster(colocated_pairs, 1, 2)
    opt = opt_fair_bruteforce(colocated_pairs, 1, 2)
    assert diagnose(colocated_pairs, result, opt.clustering).passed


@pytest.mark.parametrize("seed", range(12))
def test_two_color_diagnostics_pass(seed):
    rng = np.random.default_rng(100 + seed)
    n = 2 * int(rng.integers(2, 4, endpoint=True))
    t = int(rng.integers(1, 2, endpoint=True))
    k = int(rng.integers(1, 3, endpoint=True))
    inst = generate_instance(seed, n, 2)
    result = fair_tk_cluster(inst, t, k)
    opt = opt_fair_bruteforce(inst, t, k)
    report = diagnose(inst, result, opt, instance_id=str(seed))
    assert report.passed, [v.to_json() for v in report.violations]
    assert report.merge_ratio <= 8.0 * (1 + 1e-9)
    assert report.max_switch_weight_ratio <= 6.0 * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_balanced_diagnostics_pass(seed):
    base = generate_instance(seed, 6, 3)
    inst = make_instance(base.dist, balanced_groups(seed, 6, 3), coords=base.coords)
    result = balanced_cluster(inst, 2)
    opt = opt_balanced_bruteforce(inst, 2)
    report = diagnose(inst, result, opt, instance_id=str(seed))
    assert report.passed, [v.to_json() for v in report.violations]
    assert report.color_degree_balance is True
    assert report.max_color_path_ratio <= 8.0 * (1 + 1e-9)


def test_zero_radius_optimum_reports_heavy_edges():
    inst = instance_from_coords([(0, 0), (0, 0), (5, 0), (5, 0)], [1, 2, 1, 2])
    opt = make_clustering(inst.dist, [[0, 1], [2, 3]])
    result = fair_tk_cluster(inst, 1, 2)
    heavy = replace(result, edges=((0, 3), (2, 1)))
    report = diagnose(inst, heavy, opt)
    assert not report.passed
    assert any(v.check == "zero-cost-edge" for v in report.violations)
