"""Exception types shared across the package."""


class RegisterMismatchError(ValueError):
    """Operands live on different or overlapping qubit registers."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration grew past its circuit-count cap."""

    def __init__(self, visited: int, budget: int):
        super().__init__(f"enumeration budget exceeded: {visited} > {budget} circuits")
        self.visited = visited
        self.budget = budget


class ProtocolError(ValueError):
    """A protocol step is illegal in the current state (e.g. EXTRACT off |0>)."""


class ConfigError(ValueError):
    """Invalid CLI/config input."""
