import json

import numpy as np
import pytest

from fair_sor_api.constants import METRIC_TOLERANCE, MODE_EUCLIDEAN, MODE_RANDOM_METRIC, ROUND_DIGITS
from fair_sor_api.errors import InvalidInputError, MetricError, NonIntegerBalanceError
from fair_sor_api.metric import (
    FairnessSpec,
    balanced_groups,
    euclidean_distances,
    generate_instance,
    instance_from_coords,
    load_instance,
    make_instance,
    save_instance,
    shortest_path_closure,
    validate_metric,
)


def test_two_points_are_a_metric():
    assert validate_metric(np.array([[0.0, 3.0], [3.0, 0.0]])).ok


def test_asymmetric_matrix_reports_symmetry():
    report = validate_metric(np.array([[0.0, 1.0], [2.0, 0.0]]))
    assert not report.ok
    assert any(v.axiom == "symmetry" and v.witness == (0, 1) for v in report.violations)


def test_triangle_violation_names_the_shortcut():
    dist = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
    report = validate_metric(dist)
    assert [(v.axiom, v.witness) for v in report.violations] == [("triangle", (0, 2, 1))]
    assert report.violations[0].excess == 3.0


def test_tolerance_absorbs_small_excess():
    dist = np.array([[0.0, 1.0, 2.0 + 1e-10], [1.0, 0.0, 1.0], [2.0 + 1e-10, 1.0, 0.0]])
    assert not validate_metric(dist).ok
    assert validate_metric(dist, tol=1e-9).ok


def test_negative_and_diagonal_entries_are_reported():
    dist = np.array([[1.0, -1.0], [-1.0, 0.0]])
    axioms = {v.axiom for v in validate_metric(dist).violations}
    assert {"zero-diagonal", "nonnegativity"} <= axioms


def test_generation_is_deterministic():
    a = generate_instance(7, 6, 2, MODE_EUCLIDEAN, 100)
    b = generate_instance(7, 6, 2, MODE_EUCLIDEAN, 100)
    assert np.array_equal(a.dist, b.dist)
    assert np.array_equal(a.groups, b.groups)
    assert np.array_equal(a.coords, b.coords)


def test_every_group_gets_a_point():
    inst = generate_instance(7, 6, 3, MODE_EUCLIDEAN, 100)
    sizes = inst.group_sizes()
    assert sorted(sizes) == [1, 2, 3]
    assert all(size >= 1 for size in sizes.values())
    assert sum(sizes.values()) == inst.n


@pytest.mark.parametrize("mode", [MODE_EUCLIDEAN, MODE_RANDOM_METRIC])
@pytest.mark.parametrize("seed", range(20))
def test_generated_instances_are_metrics(seed, mode):
    inst = generate_instance(seed, 10, 2, mode, 100)
    assert validate_metric(inst, tol=METRIC_TOLERANCE).ok
    if mode == MODE_EUCLIDEAN:
        assert np.array_equal(inst.dist, euclidean_distances(inst.coords))
    else:
        assert validate_metric(inst, tol=0.0).ok


def test_euclidean_coordinates_are_integral_and_boxed():
    inst = generate_instance(3, 12, 2, MODE_EUCLIDEAN, 50)
    assert np.all(inst.coords == np.round(inst.coords))
    assert inst.coords.min() >= 0 and inst.coords.max() <= 50


def test_too_few_points_for_groups():
    with pytest.raises(InvalidInputError):
        generate_instance(1, 2, 3)


def test_non_positive_box_is_rejected():
    with pytest.raises(InvalidInputError):
        generate_instance(1, 4, 2, box=0)


def test_balanced_groups_have_equal_sizes():
    groups = balanced_groups(5, 9, 3)
    assert sorted(np.bincount(groups)[1:]) == [3, 3, 3]
    with pytest.raises(InvalidInputError):
        balanced_groups(5, 10, 3)


def test_collinear_rounding_keeps_the_rounded_distances():
    inst = instance_from_coords([(0, 0), (1, 1), (2, 2), (3, 3)], [1, 2, 1, 2])
    assert validate_metric(inst, tol=METRIC_TOLERANCE).ok
    assert inst.dist[0, 3] == np.round(np.sqrt(18.0), ROUND_DIGITS)
    assert inst.dist[0, 1] == np.round(np.sqrt(2.0), ROUND_DIGITS)


def test_closure_keeps_zero_weight_edges():
    weights = np.array([[0.0, 0.0, np.inf], [0.0, 0.0, 2.0], [np.inf, 2.0, 0.0]])
    dist = shortest_path_closure(weights)
    assert dist[0, 1] == 0.0
    assert dist[0, 2] == 2.0


def test_instance_arrays_are_read_only():
    inst = make_instance([[0, 1], [1, 0]], [1, 2])
    with pytest.raises(ValueError):
        inst.dist[0, 1] = 5


@pytest.mark.parametrize("groups", [[1, 3], [0, 1], [1]])
def test_bad_group_labels(groups):
    with pytest.raises(InvalidInputError):
        make_instance([[0, 1], [1, 0]], groups)


def test_fairness_spec_parsing():
    spec = FairnessSpec.parse("2", 3)
    assert (spec.t, spec.k, spec.ell) == (2, 3, 2)
    assert FairnessSpec.parse(3.0, 1).t == 3


def test_fractional_balance_is_rejected():
    with pytest.raises(NonIntegerBalanceError):
        FairnessSpec.parse("1.5", 2)


@pytest.mark.parametrize("t, k, ell", [(0, 1, 2), (1, 0, 2), (1, 1, 1), (1, 1, 3), ("x", 1, 2)])
def test_fairness_spec_bounds(t, k, ell):
    with pytest.raises(InvalidInputError):
        FairnessSpec.parse(t, k, ell=ell)


def test_csv_ids_map_to_file_order(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("id,group,x,y\nred-a,1,0,0\nblue-a,2,3,4\nred-b,1,6,8\n")
    inst = load_instance(path)
    assert inst.ids == ("red-a", "blue-a", "red-b")
    assert list(inst.groups) == [1, 2, 1]
    assert inst.dist[0, 1] == 5.0
    assert inst.dist[0, 2] == 10.0


def test_csv_with_wrong_header(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("name,group,x,y\na,1,0,0\n")
    with pytest.raises(InvalidInputError):
        load_instance(path)


def test_json_distances_win_over_coordinates(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"n": 2, "groups": [1, 2], "dist": [[0, 3], [3, 0]],
                                "coords": [[0, 0], [10, 0]]}))
    inst = load_instance(path)
    assert inst.dist[0, 1] == 3.0


def test_json_n_must_match(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"n": 3, "groups": [1, 2], "dist": [[0, 3], [3, 0]]}))
    with pytest.raises(InvalidInputError):
        load_instance(path)


def test_missing_file():
    with pytest.raises(InvalidInputError):
        load_instance("/nonexistent/instance.json")


@pytest.mark.parametrize("suffix", [".json", ".csv"])
def test_save_and_load_keep_distances(tmp_path, suffix):
    inst = generate_instance(11, 8, 2)
    path = save_instance(inst, tmp_path / f"inst{suffix}")
    again = load_instance(path)
    assert np.array_equal(again.groups, inst.groups)
    assert np.allclose(again.dist, inst.dist, rtol=0, atol=1e-9)


def test_csv_needs_coordinates(tmp_path):
    inst = generate_instance(2, 6, 2, MODE_RANDOM_METRIC)
    with pytest.raises(InvalidInputError):
        save_instance(inst, tmp_path / "inst.csv")


def test_json_distances_must_be_a_metric(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"groups": [1, 2, 1], "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}))
    with pytest.raises(MetricError):
        load_instance(path)


@pytest.mark.parametrize("groups", [[1, 2.7], [1, True], [1, "2"], [[1], [2]]])
def test_non_integer_group_labels_are_rejected(groups):
    with pytest.raises(InvalidInputError):
        make_instance([[0, 1], [1, 0]], groups)


def test_integral_float_labels_are_accepted():
    assert list(make_instance([[0, 1], [1, 0]], [1.0, 2.0]).groups) == [1, 2]


def test_json_with_fractional_groups(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"groups": [1, 2.7], "dist": [[0, 1], [1, 0]]}))
    with pytest.raises(InvalidInputError):
        load_instance(path)


@pytest.mark.parametrize("ell", [0, 1])
def test_generation_needs_two_groups(ell):
    with pytest.raises(InvalidInputError):
        generate_instance(1, 4, ell)


@pytest.mark.parametrize("name, content", [
    ("inst.json", b'{"groups": [1, 2], "ids": ["\xff", "b"], "dist": [[0, 1], [1, 0]]}'),
    ("inst.csv", b"id,group,x,y\n\xff,1,0,0\nb,2,1,0\n"),
])
def test_files_that_are_not_utf8(tmp_path, name, content):
    path = tmp_path / name
    path.write_bytes(content)
    with pytest.raises(InvalidInputError):
        load_instance(path)


@pytest.mark.parametrize("name", ["inst.json", "inst.csv"])
def test_saving_into_a_missing_directory(tmp_path, name):
    inst = generate_instance(1, 4, 2)
    with pytest.raises(InvalidInputError):
        save_instance(inst, tmp_path / "missing" / name)
