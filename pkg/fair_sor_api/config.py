from configparser import ConfigParser
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from fair_sor_api.constants import (
    DEFAULT_EPSILON,
    EXACT_ALPHA,
    MERGE_FACTOR,
    PRIMAL_DUAL_ALPHA,
    EXPANSION_FACTOR,
    SOLVER_EXACT,
    SOLVER_PRIMAL_DUAL,
    SOLVERS,
    SUPERCLUSTER_FACTOR_BALANCED,
    SUPERCLUSTER_FACTOR_TWO_COLOR,
)
from fair_sor_api.errors import InvalidInputError

SECTION = "pipeline"


def solver_alpha(solver):
    if solver == SOLVER_EXACT:
        return EXACT_ALPHA
    if solver == SOLVER_PRIMAL_DUAL:
        return PRIMAL_DUAL_ALPHA
    raise InvalidInputError(f"Unknown solver {solver!r}, expected one of {', '.join(SOLVERS)}")


def two_color_bound(alpha):
    """End-to-end factor of the (t,k)-fair pipeline for a subroutine factor alpha."""
    return EXPANSION_FACTOR * MERGE_FACTOR * SUPERCLUSTER_FACTOR_TWO_COLOR * alpha


def balanced_bound(alpha):
    return EXPANSION_FACTOR * MERGE_FACTOR * SUPERCLUSTER_FACTOR_BALANCED * alpha


@dataclass(frozen=True)
class PipelineConfig:
    solver: str = SOLVER_PRIMAL_DUAL
    epsilon: float = DEFAULT_EPSILON
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise InvalidInputError(f"Unknown solver {self.solver!r}, expected one of {', '.join(SOLVERS)}")
        if not self.epsilon > 0:
            raise InvalidInputError(f"epsilon must be positive, got {self.epsilon}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", solver_alpha(self.solver))
        elif not self.alpha >= 1:
            raise InvalidInputError(f"alpha must be at least 1, got {self.alpha}")

    def with_overrides(self, solver=None, epsilon=None, alpha=None):
        changes = {}
        if solver is not None:
            changes["solver"] = solver
            # a new solver brings its own factor unless one is given
            changes["alpha"] = alpha
        if epsilon is not None:
            changes["epsilon"] = epsilon
        if alpha is not None:
            changes["alpha"] = alpha
        if not changes:
            return self
        return replace(self, **changes)


def load_config(path=None):
    """Read a [pipeline] section from an INI file; missing keys keep their defaults."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"Config file {path} does not exist")
    parser = ConfigParser()
    parser.read(path)
    if not parser.has_section(SECTION):
        return PipelineConfig()
    section = parser[SECTION]
    try:
        epsilon = section.getfloat("epsilon", fallback=DEFAULT_EPSILON)
        alpha = section.getfloat("alpha", fallback=None)
    except ValueError as error:
        raise InvalidInputError(f"Bad value in {path}: {error}")
    return PipelineConfig(solver=section.get("solver", fallback=SOLVER_PRIMAL_DUAL),
                          epsilon=epsilon,
                          alpha=alpha)
