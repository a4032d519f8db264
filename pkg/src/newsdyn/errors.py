"""Exception types shared across the package.

The split matters for the command line front end, which maps DataError to
exit code 2 and NumericalError to exit code 3.
"""


class DataError(Exception):
    """Malformed or inconsistent input data (files, rows, vectors)."""


class NumericalError(Exception):
    """A computation cannot proceed: too little data, degenerate inputs."""
