class SolverRefusal(RuntimeError):
    """A solver declined the input (size guard, precondition not met)."""


class TooManyJobs(SolverRefusal):
    pass


class NotAntithetical(SolverRefusal):
    pass


class BudgetExceeded(SolverRefusal):
    pass


class TransformError(ValueError):
    """A schedule transformation's preconditions or step bounds do not hold."""


class InvariantBreach(AssertionError):
    """An exact identity that must hold by construction did not."""
