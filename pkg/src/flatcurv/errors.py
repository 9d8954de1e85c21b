"""Exception types shared across the package.

CLI exit-code mapping: InvalidInputError -> 2, BudgetExceededError and
SeparationError/SelectionError -> 3.
"""


class InvalidInputError(ValueError):
    """Malformed or out-of-contract input (bad dimensions, ranges, files)."""


class DegenerateInputError(InvalidInputError):
    """Input is degenerate where the operation requires otherwise."""


class BudgetExceededError(RuntimeError):
    """Exact enumeration would exceed the configured tuple budget."""

    def __init__(self, tuples, budget):
        super().__init__(
            f"exact enumeration needs {tuples} tuples, budget is {budget}; "
            "use Monte Carlo mode or raise the budget"
        )
        self.tuples = tuples
        self.budget = budget


class SeparationError(RuntimeError):
    """The greedy ball-separation procedure failed at some stage.

    ``stage`` is the index of the vertex that could not be selected
    (0..d for the base simplex, d+1 for the final vertex).
    """

    def __init__(self, stage, message):
        super().__init__(f"separation failed at stage {stage}: {message}")
        self.stage = stage


class SelectionError(RuntimeError):
    """Plane selection found no admissible candidate."""


class InvalidCandidateError(InvalidInputError):
    """Candidate simplex is degenerate or otherwise unusable for scoring."""
