import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, floyd_warshall

from fair_sor_api.constants import GENERATION_MODES, METRIC_TOLERANCE, MODE_EUCLIDEAN, ROUND_DIGITS
from fair_sor_api.errors import InvalidInputError, MetricError, NonIntegerBalanceError

logger = logging.getLogger("fair_sor.metric")

CSV_HEADER = ["id", "group", "x", "y"]


@dataclass(frozen=True, eq=False)
class Instance:
    """A colored finite metric space. Group labels are 1-based, group 1 is the anchor group."""

    dist: np.ndarray
    groups: np.ndarray
    coords: Optional[np.ndarray] = None
    ids: Tuple[str, ...] = ()

    def __post_init__(self):
        self.dist.setflags(write=False)
        self.groups.setflags(write=False)
        if self.coords is not None:
            self.coords.setflags(write=False)

    @property
    def n(self):
        return int(self.dist.shape[0])

    @property
    def ell(self):
        return int(self.groups.max()) if self.n else 0

    def group_of(self, p):
        return int(self.groups[p])

    def members_of(self, group):
        return tuple(int(p) for p in np.flatnonzero(self.groups == group))

    def group_sizes(self):
        return {g: int(np.count_nonzero(self.groups == g)) for g in range(1, self.ell + 1)}


@dataclass(frozen=True)
class FairnessSpec:
    t: int
    k: int
    ell: int = 2

    @classmethod
    def parse(cls, t, k, ell=2, two_color=True):
        t = _as_balance(t)
        if t < 1:
            raise InvalidInputError(f"t must be at least 1, got {t}")
        if int(k) != k or k < 1:
            raise InvalidInputError(f"k must be a positive integer, got {k}")
        if int(ell) != ell or ell < 2:
            raise InvalidInputError(f"ell must be an integer of at least 2, got {ell}")
        if two_color and ell != 2:
            raise InvalidInputError(f"two-color fairness needs exactly 2 groups, got {ell}")
        return cls(t=t, k=int(k), ell=int(ell))


def _as_balance(t):
    try:
        value = float(t)
    except (TypeError, ValueError):
        raise InvalidInputError(f"t must be a number, got {t!r}")
    if not value.is_integer():
        raise NonIntegerBalanceError(
            f"t={t} is not an integer; a fractional balance such as 1+1/I with I red and I+1 blue "
            f"points admits only the single all-points cluster")
    return int(value)


@dataclass(frozen=True)
class MetricViolation:
    axiom: str
    witness: Tuple[int, ...]
    excess: float

    def to_json(self):
        return {"axiom": self.axiom, "witness": list(self.witness), "excess": self.excess}


@dataclass
class MetricReport:
    violations: List[MetricViolation] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


def _group_label(label):
    if isinstance(label, (bool, np.bool_)):
        raise InvalidInputError(f"Group label {label!r} is not an integer")
    if isinstance(label, (int, np.integer)):
        return int(label)
    if isinstance(label, (float, np.floating)) and float(label).is_integer():
        return int(label)
    raise InvalidInputError(f"Group label {label!r} is not an integer")


def make_instance(dist, groups, coords=None, ids=None):
    dist = np.array(dist, dtype=float)
    if np.ndim(groups) != 1:
        raise InvalidInputError("Group labels must be a flat list")
    groups = np.array([_group_label(g) for g in groups], dtype=int)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise InvalidInputError(f"Distance matrix must be square, got shape {dist.shape}")
    n = dist.shape[0]
    if n == 0:
        raise InvalidInputError("Instance has no points")
    if groups.shape != (n,):
        raise InvalidInputError(f"Expected {n} group labels, got {groups.size}")
    if not np.all(np.isfinite(dist)):
        raise InvalidInputError("Distance matrix has non-finite entries")
    ell = int(groups.max())
    if groups.min() < 1:
        raise InvalidInputError("Group labels are 1-based")
    missing = sorted(set(range(1, ell + 1)) - set(int(g) for g in groups))
    if missing:
        raise InvalidInputError(f"Groups {missing} label no point")
    if coords is not None:
        coords = np.array(coords, dtype=float)
    if ids is None:
        ids = tuple(str(p) for p in range(n))
    if len(ids) != n or len(set(ids)) != n:
        raise InvalidInputError("Point ids must be unique, one per point")
    return Instance(dist=dist, groups=groups, coords=coords, ids=tuple(ids))


def shortest_path_closure(weights):
    """All-pairs shortest paths; np.inf marks a missing edge, zeros are real edges.

    The result is relaxed again in floating point until d[p][q] <= d[p][r] + d[r][q]
    holds exactly as evaluated, so the closure passes validate_metric with tol=0.
    """
    graph = csgraph_from_dense(np.asarray(weights, dtype=float), null_value=np.inf)
    dist = floyd_warshall(graph, directed=False)
    np.fill_diagonal(dist, 0.0)
    changed = True
    while changed:
        changed = False
        for r in range(dist.shape[0]):
            through = dist[:, r, None] + dist[None, r, :]
            if np.any(through < dist):
                dist = np.minimum(dist, through)
                changed = True
    return dist


def euclidean_distances(coords):
    coords = np.asarray(coords, dtype=float)
    diff = coords[:, None, :] - coords[None, :, :]
    return np.round(np.sqrt(np.sum(diff * diff, axis=-1)), ROUND_DIGITS)


def instance_from_coords(coords, groups, ids=None):
    # the rounded matrix is kept as is; triangles only hold up to METRIC_TOLERANCE
    inst = make_instance(euclidean_distances(coords), groups, coords=coords, ids=ids)
    _require_metric(inst)
    return inst


def _require_metric(inst):
    report = validate_metric(inst, tol=METRIC_TOLERANCE)
    if not report.ok:
        first = report.violations[0]
        raise MetricError(f"{len(report.violations)} metric violations, first {first.axiom} "
                          f"at {list(first.witness)} by {first.excess}")


def validate_metric(inst, tol=0.0):
    """Check the metric axioms within additive tol. Accepts an Instance or a matrix."""
    dist = np.asarray(inst.dist if isinstance(inst, Instance) else inst, dtype=float)
    report = MetricReport()
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        report.violations.append(MetricViolation("shape", tuple(dist.shape), float("inf")))
        return report
    n = dist.shape[0]
    for p in range(n):
        if abs(dist[p, p]) > tol:
            report.violations.append(MetricViolation("zero-diagonal", (p,), float(abs(dist[p, p]))))
    for p, q in zip(*np.nonzero(dist < -tol)):
        report.violations.append(MetricViolation("nonnegativity", (int(p), int(q)), float(-dist[p, q])))
    asym = np.abs(dist - dist.T)
    for p, q in zip(*np.nonzero(np.triu(asym > tol, k=1))):
        report.violations.append(MetricViolation("symmetry", (int(p), int(q)), float(asym[p, q])))

    best = np.full_like(dist, np.inf)
    via = np.zeros(dist.shape, dtype=int)
    for r in range(n):
        through = dist[:, r, None] + dist[None, r, :]
        better = through < best
        best = np.where(better, through, best)
        via = np.where(better, r, via)
    excess = dist - best
    for p, q in zip(*np.nonzero(excess > tol)):
        if p < q or asym[p, q] > tol:
            report.violations.append(
                MetricViolation("triangle", (int(p), int(q), int(via[p, q])), float(excess[p, q])))
    if not report.ok:
        logger.debug(f"Metric check found {len(report.violations)} violations")
    return report


def generate_instance(seed, n, ell, mode=MODE_EUCLIDEAN, box=100.0):
    if int(ell) != ell or ell < 2:
        raise InvalidInputError(f"ell must be an integer of at least 2, got {ell}")
    if n < ell:
        raise InvalidInputError(f"Need at least one point per group: n={n} < ell={ell}")
    if not box > 0:
        raise InvalidInputError(f"box must be positive, got {box}")
    if mode not in GENERATION_MODES:
        raise InvalidInputError(f"Unknown mode {mode!r}, expected one of {', '.join(GENERATION_MODES)}")
    rng = np.random.default_rng(seed)
    groups = rng.permutation(np.arange(n) % ell + 1)
    if mode == MODE_EUCLIDEAN:
        coords = rng.integers(0, int(box), size=(n, 2), endpoint=True).astype(float)
        return instance_from_coords(coords, groups)
    weights = rng.integers(1, max(int(box), 1), size=(n, n), endpoint=True).astype(float)
    weights = np.triu(weights, k=1)
    weights = weights + weights.T
    np.fill_diagonal(weights, 0.0)
    return make_instance(shortest_path_closure(weights), groups)


def balanced_groups(seed, n, ell):
    """Round-robin labels with n a multiple of ell, shuffled: equal group sizes."""
    if n % ell:
        raise InvalidInputError(f"n={n} is not a multiple of ell={ell}")
    rng = np.random.default_rng(seed)
    return rng.permutation(np.arange(n) % ell + 1)


def load_instance(path):
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"Instance file {path} does not exist")
    try:
        if path.suffix.lower() == ".csv":
            return _load_csv(path)
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise InvalidInputError(f"{path} is not valid JSON: {error}")
    except UnicodeDecodeError as error:
        raise InvalidInputError(f"{path} is not UTF-8 text: {error}")
    except OSError as error:
        raise InvalidInputError(f"Cannot read {path}: {error.strerror or error}")
    return instance_from_json(data)


def instance_from_json(data):
    try:
        groups = data["groups"]
        ids = data.get("ids")
        coords = data.get("coords")
        if "dist" in data:
            inst = make_instance(data["dist"], groups, coords=coords, ids=ids)
            _require_metric(inst)
        elif coords is not None:
            inst = instance_from_coords(coords, groups, ids=ids)
        else:
            raise InvalidInputError("Instance needs either dist or coords")
    except (KeyError, TypeError, ValueError) as error:
        raise InvalidInputError(f"Malformed instance: {error}")
    if "n" in data and data["n"] != inst.n:
        raise InvalidInputError(f"n={data['n']} does not match {inst.n} points")
    return inst


def _load_csv(path):
    ids, groups, coords = [], [], []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != CSV_HEADER:
            raise InvalidInputError(f"CSV header must be {','.join(CSV_HEADER)}")
        for row in reader:
            try:
                ids.append(row["id"].strip())
                groups.append(int(row["group"]))
                coords.append((float(row["x"]), float(row["y"])))
            except (TypeError, ValueError) as error:
                raise InvalidInputError(f"Bad CSV row {row}: {error}")
    if not ids:
        raise InvalidInputError(f"{path} has no points")
    return instance_from_coords(coords, groups, ids=ids)


def instance_to_json(inst):
    data = {
        "n": inst.n,
        "ids": list(inst.ids),
        "groups": [int(g) for g in inst.groups],
        "dist": [[float(x) for x in row] for row in inst.dist],
    }
    if inst.coords is not None:
        data["coords"] = [[float(x) for x in row] for row in inst.coords]
    return data


def save_instance(inst, path):
    path = Path(path)
    if path.suffix.lower() == ".csv" and inst.coords is None:
        raise InvalidInputError("CSV output needs planar coordinates")
    try:
        if path.suffix.lower() == ".csv":
            _save_csv(inst, path)
        else:
            path.write_text(json.dumps(instance_to_json(inst), indent=1) + "\n", encoding="utf-8")
    except OSError as error:
        raise InvalidInputError(f"Cannot write {path}: {error.strerror or error}")
    return path


def _save_csv(inst, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in range(inst.n):
            x, y = inst.coords[p]
            writer.writerow([inst.ids[p], int(inst.groups[p]), _number(x), _number(y)])


def _number(x):
    return int(x) if float(x).is_integer() else float(x)
