"""Exception hierarchy shared by solvers, verifiers, oracle and CLI."""


class FairChoreError(Exception):
    """Base class for all package errors."""


class ValidationError(FairChoreError, ValueError):
    """Malformed instance, allocation or payment data."""


class UnsupportedInstanceError(FairChoreError):
    """The instance lies outside the class a solver handles."""


class BudgetExceededError(FairChoreError):
    """An oracle query would exceed its configured enumeration/LP budget."""


class SolverInvariantError(FairChoreError, RuntimeError):
    """A solver invariant failed. Always indicates a bug, never bad input."""
