"""Exception types shared across the package.

The split matters to callers: the command-line tool maps
:class:`InputDataError` to exit code 2 and :class:`DegenerateDataError`
to exit code 3, and the HTTP service maps them to 4xx responses.
"""


class InputDataError(ValueError):
    """Malformed or inadmissible input: bad CSV cells, negative values,
    overlapping part sets, unknown names, invalid hierarchy documents."""


class DegenerateDataError(ValueError):
    """Data that is structurally valid but numerically degenerate for the
    requested operation, e.g. a constant composition with zero total
    logratio variance."""
