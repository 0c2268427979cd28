"""Exception hierarchy shared by all analysis modules."""


class ControlAnalysisError(Exception):
    """Base class for every error raised by :mod:`macontrol`."""


class GraphError(ControlAnalysisError, ValueError):
    """Invalid graph construction (self-loop, duplicate edge, bad weight...)."""


class GraphParseError(GraphError):
    """Malformed line in a graph text file."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class UnreachableNodes(GraphError):
    def __init__(self, nodes):
        self.nodes = tuple(sorted(nodes))
        super().__init__(f"nodes unreachable from root: {list(self.nodes)}")


class NotATree(GraphError):
    pass


class NotInDegreeRegular(GraphError):
    pass


class LeaderSetError(ControlAnalysisError, ValueError):
    pass


class EigensolverFailure(ControlAnalysisError, ArithmeticError):
    pass


class NotAnEigenvalue(ControlAnalysisError, ValueError):
    pass


class SpectrumMismatch(ControlAnalysisError, ValueError):
    """A spectrum does not belong to the matrix it is used with."""


class RepeatedCrossBranchWeights(ControlAnalysisError, ValueError):
    pass


class BudgetExceeded(ControlAnalysisError):
    """Exhaustive enumeration would exceed the configured candidate cap."""


class NoSpanningTree(ControlAnalysisError, ValueError):
    pass


class NoOffDiagonalEntry(ControlAnalysisError, ValueError):
    pass


class PlanMismatch(ControlAnalysisError, ValueError):
    pass


class IterationLimitExceeded(ControlAnalysisError):
    """Weight adjustment did not reach full rank; carries the partial plan."""

    def __init__(self, plan):
        self.plan = plan
        super().__init__(
            f"weight adjustment stopped after {plan.iterations} iterations "
            f"at rank {plan.final_rank}"
        )


class NotDiagonalizable(ControlAnalysisError, ValueError):
    pass


class UnitWeightsRequired(GraphError):
    pass
