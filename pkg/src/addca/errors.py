"""Exception hierarchy shared by the library and the CLI."""


class AddcaError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class ContractViolation(AddcaError, ValueError):
    """A precondition of an operation does not hold."""


class EnumerationRefused(AddcaError):
    """Listing was refused because the exact count exceeds the cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"enumeration refused: {count} solutions exceed cap {cap}")


class BudgetExceeded(AddcaError):
    """Brute-force enumeration would exceed the configured word budget."""

    def __init__(self, population: int, budget: int):
        self.population = population
        self.budget = budget
        super().__init__(f"oracle budget exceeded: {population} words > budget {budget}")


class ParseError(ValueError):
    """Malformed rule or event text (CLI exit status 2)."""
