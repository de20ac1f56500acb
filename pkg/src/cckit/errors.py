"""Shared exception types."""


class InputError(ValueError):
    """An argument violates an operation's precondition."""


class BudgetError(RuntimeError):
    """An exhaustive audit would exceed the configured evaluation budget."""

    def __init__(self, required, budget):
        super().__init__(
            f"exhaustive audit needs {required} evaluations, budget is {budget}"
        )
        self.required = required
        self.budget = budget


class ConfigError(ValueError):
    """A configuration tree is malformed or internally inconsistent."""
