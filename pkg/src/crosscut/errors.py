"""Exception types shared across the toolkit.

ValidationFailure maps to CLI exit code 1, InputError (unreadable or
malformed input files) to exit code 2.
"""


class ToolkitError(Exception):
    pass


class ValidationFailure(ToolkitError):
    """Input is readable but violates an invariant (bad class name, duplicate id, ...)."""


class InputError(ToolkitError):
    """Input file is missing, unreadable, or not parseable at all."""


class ConflictError(ToolkitError):
    """State conflict, e.g. re-deciding an item with a different choice without override."""
