# ghlab/exceptions.py
"""Error types raised by services and mapped to process exit codes by the CLI."""
from typing import Optional


class GHLabError(Exception):
    """Base error: carries an exit code and a human-readable detail message."""

    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class InputError(GHLabError):
    """Invalid arguments, metric axiom violations, dimension mismatches."""

    exit_code = 3


class DegenerateError(InputError):
    """Coincident points or a zero denominator where a distance ratio is needed."""


class ParseError(GHLabError):
    """An input file could not be read or decoded."""

    exit_code = 2

    def __init__(self, detail: str, location: str = ""):
        super().__init__(f"{location}: {detail}" if location else detail)
        self.location = location


class ConfigError(GHLabError):
    """Environment configuration is malformed."""

    exit_code = 3
