"""Exception taxonomy shared by all modules.

The CLI maps these onto its exit codes: verification failures exit 1,
input errors exit 2, budget errors exit 3.
"""


class SpinmodError(Exception):
    """Base class for all package errors."""


class InputError(SpinmodError):
    """Malformed or out-of-contract input (unknown edge id, bad JSON, ...)."""


class DomainError(SpinmodError):
    """Structurally valid input outside an operation's domain (e.g. a
    non-cyclic edge set where a cyclic one is required)."""


class BudgetError(SpinmodError):
    """An enumeration would exceed the configured desk-scale budget."""


class VerificationError(SpinmodError):
    """A checked identity failed.  Carries the canonical keys of the
    witnesses so reports can name the offending objects."""

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = tuple(witnesses)
