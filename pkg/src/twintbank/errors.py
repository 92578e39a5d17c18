"""Exception hierarchy shared across the toolkit.

Every error raised by this package derives from :class:`ToolkitError`, so
callers (the CLI in particular) can catch one type and map it to a nonzero
exit status without swallowing genuine bugs.
"""


class ToolkitError(Exception):
    """Base class for all errors raised by twintbank."""
