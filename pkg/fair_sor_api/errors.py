class FairSorError(Exception):
    """Base class for every error raised by fair_sor_api."""

    title = "Error"


class InvalidInputError(FairSorError):
    title = "Invalid input."


class NonIntegerBalanceError(InvalidInputError):
    title = "Balance parameter must be an integer."


class InstanceTooLargeError(InvalidInputError):
    title = "Instance too large for exhaustive search."


class MetricError(InvalidInputError):
    title = "Distance matrix is not a metric."


class InfeasibleError(FairSorError):
    title = "No fair clustering exists."


class GroupSizesUnequalError(InfeasibleError):
    title = "Groups must have equal sizes."


class ComponentNotAStarError(FairSorError):
    title = "Degree constrained subgraph is not a star forest."


class UnreachableError(FairSorError):
    title = "Cluster graph is not strongly connected."
