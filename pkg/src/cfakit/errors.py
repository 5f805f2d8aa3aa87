"""Exception hierarchy shared across the toolkit.

The command line maps these to process exit codes: validation errors
exit 1, data access failures exit 2, domain errors exit 3.
"""

from __future__ import annotations


class CfaError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(CfaError):
    """Malformed, inconsistent, or incomplete input data or configuration."""

    exit_code = 1


class DataAccessError(CfaError):
    """Missing or unreadable files and other I/O failures."""

    exit_code = 2


class DomainError(CfaError):
    """Input outside the mathematical domain of an operation."""

    exit_code = 3
