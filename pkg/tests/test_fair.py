import numpy as np
import pytest

from fair_sor_api.constants import MODE_BALANCED, MODE_TWO_COLOR, SOLVER_EXACT, SOLVER_PRIMAL_DUAL
from fair_sor_api.errors import GroupSizesUnequalError, InfeasibleError, InvalidInputError
from fair_sor_api.fair import (
    balanced_cluster,
    check_t_balanced,
    clustering_cost,
    fair_tk_cluster,
    verify_balanced,
    verify_fair,
)
from fair_sor_api.metric import balanced_groups, generate_instance, instance_from_coords, make_instance
from fair_sor_api.oracle import opt_balanced_bruteforce, opt_fair_bruteforce
from fair_sor_api.sor import make_clustering


def test_colocated_pairs_cost_nothing(colocated_pairs):
    result = fair_tk_cluster(colocated_pairs, 1, 2)
    assert result.cost == 0.0
    assert result.fairness_ok
    assert result.k_used == 2
    assert result.expansion_ratio == 0.0


def test_line_matches_the_optimum(line_instance):
    result = fair_tk_cluster(line_instance, 1, 2, solver=SOLVER_EXACT)
    assert result.cost == 2.0
    assert result.dcs_weight == 2.0
    assert set(result.edges) == {(0, 1), (2, 3)}
    assert result.star_cost == 0.0


def test_line_with_one_cluster(line_instance):
    result = fair_tk_cluster(line_instance, 1, 1)
    assert result.k_used == 1
    assert result.cost == 10.0
    assert result.expansion_ratio <= 3.0


def test_result_json_carries_the_bound(line_instance):
    data = fair_tk_cluster(line_instance, 1, 2, solver=SOLVER_EXACT).to_json()
    assert data["fair"] is True
    assert data["mode"] == MODE_TWO_COLOR
    assert data["alpha"] == 1.0
    assert data["implied_bound"] == 48.0
    assert [c["members"] for c in data["clusters"]] == [[0, 1], [2, 3]]


def test_explicit_alpha_changes_the_bound(line_instance):
    assert fair_tk_cluster(line_instance, 1, 2, alpha=2.0).implied_bound == 96.0


def test_json_uses_point_ids():
    inst = instance_from_coords([(0, 0), (1, 0)], [1, 2], ids=["red", "blue"])
    data = fair_tk_cluster(inst, 1, 1).to_json(inst.ids)
    assert data["clusters"][0]["members"] == ["red", "blue"]


def test_unbalanced_groups_are_infeasible():
    inst = instance_from_coords([(0, 0), (1, 0), (2, 0), (3, 0)], [1, 1, 1, 2])
    assert not check_t_balanced(inst, 2)
    with pytest.raises(InfeasibleError):
        fair_tk_cluster(inst, 2, 2)


def test_three_groups_are_not_two_color(colocated_triples):
    with pytest.raises(InvalidInputError):
        fair_tk_cluster(colocated_triples, 1, 2)


def test_fairness_checks():
    inst = make_instance(np.zeros((4, 4)), [1, 1, 1, 2])
    together = make_clustering(inst.dist, [[0, 1, 2, 3]])
    apart = make_clustering(inst.dist, [[0, 3], [1, 2]])
    assert verify_fair(together, inst, 3)
    assert not verify_fair(together, inst, 2)
    assert not verify_fair(apart, inst, 3)


def test_cost_reuses_every_point_as_center(line_instance):
    assert clustering_cost([[0, 3]], line_instance) == 10.0
    assert clustering_cost([[0, 1], [2, 3]], line_instance) == 2.0


def _within_loose_bound(result, opt):
    # single-star clusters add their own spread on top of the star-level bound
    return result.cost <= 3 * result.implied_bound * opt.cost * (1 + 1e-9) + 1e-9


@pytest.mark.parametrize("solver", [SOLVER_EXACT, SOLVER_PRIMAL_DUAL])
@pytest.mark.parametrize("seed", range(12))
def test_random_two_color_instances(seed, solver):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 8, endpoint=True))
    t = int(rng.integers(1, 3, endpoint=True))
    k = int(rng.integers(1, 3, endpoint=True))
    inst = generate_instance(seed, n, 2)
    if not check_t_balanced(inst, t):
        with pytest.raises(InfeasibleError):
            fair_tk_cluster(inst, t, k, solver=solver)
        return
    result = fair_tk_cluster(inst, t, k, solver=solver)
    opt = opt_fair_bruteforce(inst, t, k)
    assert verify_fair(result.clustering, inst, t)
    assert result.k_used <= k
    assert sorted(p for c in result.clustering for p in c.members) == list(range(n))
    assert result.forest.validate(inst, t=t) == []
    assert result.cost >= opt.cost - 1e-9
    assert _within_loose_bound(result, opt)
    if opt.cost == 0:
        assert result.cost == 0


def test_balanced_triples(colocated_triples):
    result = balanced_cluster(colocated_triples, 2)
    assert result.cost == 0.0
    assert result.mode == MODE_BALANCED
    assert result.implied_bound == 60.0 * result.alpha
    assert verify_balanced(result.clustering, colocated_triples)


def test_balanced_needs_equal_groups():
    inst = instance_from_coords(np.zeros((5, 2)), [1, 2, 3, 1, 2])
    with pytest.raises(GroupSizesUnequalError):
        balanced_cluster(inst, 2)


def test_balanced_needs_two_groups():
    inst = make_instance(np.zeros((2, 2)), [1, 1])
    with pytest.raises(InvalidInputError):
        balanced_cluster(inst, 1)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("ell", [2, 3])
def test_random_balanced_instances(seed, ell):
    n = ell * (2 if ell == 3 else 3)
    base = generate_instance(seed, n, ell)
    inst = make_instance(base.dist, balanced_groups(seed, n, ell), coords=base.coords)
    result = balanced_cluster(inst, 2, solver=SOLVER_EXACT)
    opt = opt_balanced_bruteforce(inst, 2)
    assert verify_balanced(result.clustering, inst)
    assert result.forest.validate(inst) == []
    assert result.cost >= opt.cost - 1e-9
    assert _within_loose_bound(result, opt)


@pytest.mark.parametrize("seed", range(10))
def test_both_pipelines_on_one_two_group_instance(seed):
    rng = np.random.default_rng(300 + seed)
    n = 2 * int(rng.integers(1, 5, endpoint=True))
    k = int(rng.integers(1, 2, endpoint=True))
    inst = generate_instance(300 + seed, n, 2)
    fair = fair_tk_cluster(inst, 1, k)
    balanced = balanced_cluster(inst, k)
    opt_fair = opt_fair_bruteforce(inst, 1, k)
    opt_balanced = opt_balanced_bruteforce(inst, k)
    # with two groups and t=1 both constraints ask for equal counts in every cluster
    assert opt_fair.cost == pytest.approx(opt_balanced.cost)
    for result, opt in ((fair, opt_fair), (balanced, opt_balanced)):
        assert verify_fair(result.clustering, inst, 1)
        assert verify_balanced(result.clustering, inst)
        assert result.k_used <= k
        assert result.cost >= opt.cost - 1e-9
        assert _within_loose_bound(result, opt)
    assert fair.implied_bound == 48.0 * fair.alpha
    assert balanced.implied_bound == 60.0 * balanced.alpha


def test_three_to_one_needs_t_three():
    inst = instance_from_coords([(0, 0), (1, 0), (2, 0), (3, 0)], [1, 1, 1, 2])
    result = fair_tk_cluster(inst, 3, 2, solver=SOLVER_EXACT)
    assert verify_fair(result.clustering, inst, 3)
    assert result.k_used == 1
    assert result.cost == opt_fair_bruteforce(inst, 3, 2).cost == 2.0
